"""Reports: canonical JSON for machines, plain text for people."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction


def exact(x) -> dict:
    """An exact rational entry; its tolerance is zero."""
    return {"value": str(Fraction(x)), "tol": 0}


def measured(x: float, tol: float) -> dict:
    x = float(x)
    return {"value": x if math.isfinite(x) else str(x), "tol": tol, "ok": bool(x < tol)}


@dataclass(frozen=True)
class Report:
    sections: dict = field(default_factory=dict)
    findings: tuple = ()
    errors: tuple = ()
    provenance: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.findings and not self.errors

    @property
    def exit_code(self) -> int:
        if self.errors:
            return 2
        return 1 if self.findings else 0

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "findings": list(self.findings),
            "errors": list(self.errors),
            "provenance": self.provenance,
            **self.sections,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        lines = []
        prov = self.provenance
        lines.append(f"flagvortex {prov.get('version', '?')}  config={prov.get('config', '')}  seed={prov.get('seed', '')}")
        lines.append(f"config sha256 {prov.get('config_sha256', '')}")
        s = self.sections
        if "cohomology" in s:
            c = s["cohomology"]
            lines.append("")
            lines.append(f"[cohomology] fiber {c['diagram']}  dim {c['fiber_dimension']}  K_F {c['canonical_weight']}")
            for m in c["modules"]:
                lines.append(f"  {m['role']} {m['weight']} (rank {m['rank']}): {_coh(m['cohomology'])}")
                lines.append(f"    dual {m['dual_weight']}: {_coh(m['dual_cohomology'])}")
            lines.append(f"  Hom(V2, V1): {_coh(c['hom_V2_V1'])}")
        if "calibration" in s:
            c = s["calibration"]
            lines.append("")
            lines.append(
                f"[calibration] mu_rho = {c['mu_rho']['value']}  calibrated = {c['calibrated']}  H0 vanishes = {c['h0_vanishes']}"
            )
        if "plan" in s:
            p = s["plan"]
            lines.append("")
            lines.append(f"[plan] k = {p['k']}  sigma = {p['sigma']['value']}  window = {_window(p['window'])} ({p['sigma_position']})")
            lines.append(f"  tau1 = {p['tau1']['value']}  tau2 = {p['tau2']['value']}  lambda = {p['lambda_slope']['value']}")
            inv = p["invariant_case"]
            lines.append(f"  ext1 = {p['ext1_dimension']}  invariant case = {inv['invariant']}" + (f" ({inv['reason']})" if inv["reason"] else ""))
        if "solver" in s:
            v = s["solver"]
            lines.append("")
            lines.append(f"[solver] {v['status']} after {v['iterations']} iterations")
            lines.append("  sup residual " + ", ".join(_num(x) for x in v["residual_sup"]))
            lines.append("  Gauss gaps   " + ", ".join(_num(x) for x in v["gauss_gaps"]))
            if v["certificate"]:
                lines.append(f"  certificate {v['certificate']['kind']}: {v['certificate']['message']} (value {v['certificate']['value']:.6g})")
        if "fiber_verification" in s:
            f = s["fiber_verification"]
            lines.append("")
            lines.append(f"[fiber verification] n = {f['n']}")
            for r in f["checks"]:
                if r.get("dim", 0) == 0:
                    lines.append(f"  k={r['k']}: empty basis")
                    continue
                worst = max((k for k in r if isinstance(r[k], dict) and "ok" in r[k]), key=lambda k: r[k]["value"] / r[k]["tol"])
                lines.append(f"  k={r['k']} sigma={r['sigma']['value']}: worst {worst} {_num(r[worst])}  positive={r['positive']}")
        if "sweep" in s:
            w = s["sweep"]
            lines.append("")
            lines.append(f"[sweep] window {_window(w['window'])}  agrees = {w['agrees_with_window']}")
            lines.append(f"  {'sigma':>10} {'tau1':>12} {'tau2':>12} {'position':>9} {'feasible':>8} {'status':>13} {'residual':>10}")
            for r in w["rows"]:
                res = "" if r["residual"] is None else f"{r['residual']['value']:.2e}" if isinstance(r["residual"]["value"], float) else r["residual"]["value"]
                lines.append(
                    f"  {r['sigma']['value']:>10} {r['tau1']['value']:>12} {r['tau2']['value']:>12} {r['window_position']:>9} "
                    f"{str(r['feasible']):>8} {r['status']:>13} {res:>10}"
                )
        lines.append("")
        lines.append("findings: " + ("none" if not self.findings else ""))
        lines.extend(f"  - {x}" for x in self.findings)
        if self.errors:
            lines.append("errors:")
            lines.extend(f"  - {x}" for x in self.errors)
        return "\n".join(lines) + "\n"


def _coh(c: dict) -> str:
    if c["total_vanishing"]:
        return "total vanishing"
    return "; ".join(
        f"H^{e['degree']} = V(" + ",".join(str(x) for x in e["highest_weight"]) + f") dim {e['dimension']}" + (f" x{e['multiplicity']}" if e["multiplicity"] != 1 else "")
        for e in c["entries"]
    )


def _num(x: dict) -> str:
    v = x["value"]
    v = f"{v:.3e}" if isinstance(v, float) else v
    return f"{v} (tol {x['tol']:g}{'' if x['ok'] else ', FAIL'})"


def _window(w: dict) -> str:
    if w["status"] != "ok":
        return "unknown"
    if w["empty"]:
        return "empty"
    if w["hi"] is not None and w["lo"] == w["hi"]:
        return "{" + w["lo"] + "}"
    return ("[" if w["lo_closed"] else "(") + w["lo"] + ", " + ("inf" if w["hi"] is None else w["hi"]) + ("]" if w["hi_closed"] else ")")
