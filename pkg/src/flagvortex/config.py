"""Pipeline configuration: TOML parsing and validation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .flag import CrossedDiagram, KahlerClass, ParabolicModule, parse_diagram, parse_weight

STAGES = ("bbw", "calibrate", "plan", "solve", "verify-fiber")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key path."""

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field = field_path


def _fraction(v, where: str) -> Fraction:
    if isinstance(v, bool):
        raise ConfigError(where, "expected a number")
    if isinstance(v, float):
        return Fraction(repr(v))
    try:
        return Fraction(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(where, f"cannot read {v!r} as a rational number") from None


def _get(table: dict, key: str, where: str, kind, default=...):
    if key not in table:
        if default is ...:
            raise ConfigError(f"{where}.{key}" if where else key, "missing")
        return default
    v = table[key]
    if kind is not None and not isinstance(v, kind):
        raise ConfigError(f"{where}.{key}" if where else key, f"expected {getattr(kind, '__name__', kind)}, got {type(v).__name__}")
    return v


@dataclass(frozen=True)
class BaseSettings:
    mode: str = "exact-only"  # or "torus"
    periods: tuple = (1.0, 1.0)
    volume: Fraction = Fraction(1)
    rank1: int = 1
    rank2: int = 1
    degree1: Fraction = Fraction(0)
    degree2: Fraction = Fraction(0)
    h0_dim: Optional[int] = None
    divisors: tuple = ()
    amplitudes: Optional[tuple] = None


@dataclass(frozen=True)
class SweepRange:
    start: Fraction
    stop: Fraction
    num: int

    def grid(self) -> tuple:
        if self.num == 1:
            return (self.start,)
        step = (self.stop - self.start) / (self.num - 1)
        return tuple(self.start + i * step for i in range(self.num))


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 200
    method: str = "flow-newton"
    grid: int = 64


@dataclass(frozen=True)
class FiberCheckSettings:
    enabled: bool = False
    k_values: tuple = (2, 3)
    sigmas: tuple = (Fraction(1, 2), Fraction(1), Fraction(4))
    n: int = 128
    shape: tuple = (1, 1)


@dataclass(frozen=True)
class PipelineConfig:
    diagram: CrossedDiagram
    rho1: tuple
    rho2: tuple
    kahler: KahlerClass
    base: BaseSettings = field(default_factory=BaseSettings)
    sigma: Fraction = Fraction(1)
    sweep: Optional[SweepRange] = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    fiber_check: FiberCheckSettings = field(default_factory=FiberCheckSettings)
    stages: tuple = STAGES
    seed: int = 0
    outputs: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, compare=False, repr=False)
    name: str = ""

    @property
    def exact_only(self) -> bool:
        return self.base.mode == "exact-only"

    def digest(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()

    def with_overrides(self, **kw) -> "PipelineConfig":
        from dataclasses import replace

        return replace(self, **kw)


def _modules(d: CrossedDiagram, v, where: str) -> tuple:
    items = [v] if isinstance(v, str) else v
    if not isinstance(items, list) or not items:
        raise ConfigError(where, "expected a weight string like '(-2,1,0,0)' or a nonempty list of them")
    out = []
    for i, s in enumerate(items):
        w = f"{where}[{i}]" if len(items) > 1 else where
        if not isinstance(s, str):
            raise ConfigError(w, "weights are written as strings, e.g. '(-2,1,0,0)'")
        try:
            out.append(ParabolicModule(d, parse_weight(s)))
        except ValueError as e:
            raise ConfigError(w, str(e)) from None
    return tuple(out)


def _kahler(d: CrossedDiagram, v, where: str) -> KahlerClass:
    if v is None or isinstance(v, (int, float, str)) and not isinstance(v, bool):
        return KahlerClass.uniform(d, _fraction(1 if v is None else v, where))
    if isinstance(v, dict):
        coeffs = {}
        for key, val in v.items():
            try:
                node = int(key)
            except ValueError:
                raise ConfigError(f"{where}.{key}", "node keys must be integers") from None
            coeffs[node] = _fraction(val, f"{where}.{key}")
        try:
            k = KahlerClass(coeffs)
            k.check(d)
        except ValueError as e:
            raise ConfigError(where, str(e)) from None
        return k
    raise ConfigError(where, "expected a positive number or a table {node = coefficient}")


def _base(t: dict) -> BaseSettings:
    if not isinstance(t, dict):
        raise ConfigError("base", "expected a table")
    mode = _get(t, "mode", "base", str, "exact-only")
    if mode not in ("exact-only", "torus"):
        raise ConfigError("base.mode", "must be 'exact-only' or 'torus'")
    w1 = _get(t, "w1", "base", dict, {})
    w2 = _get(t, "w2", "base", dict, {})
    rank1 = _get(w1, "rank", "base.w1", int, 1)
    rank2 = _get(w2, "rank", "base.w2", int, 1)
    for key, r in (("base.w1.rank", rank1), ("base.w2.rank", rank2)):
        if r < 1:
            raise ConfigError(key, "must be at least 1")
    deg1 = _fraction(w1.get("degree", 0), "base.w1.degree")
    deg2 = _fraction(w2.get("degree", 0), "base.w2.degree")
    h0 = _get(t, "h0_dim", "base", int, None)
    if h0 is not None and h0 < 0:
        raise ConfigError("base.h0_dim", "must be non-negative")
    periods = (1.0, 1.0)
    volume = _fraction(t.get("volume", 1), "base.volume")
    divisors = ()
    amps = None
    if mode == "torus":
        periods = _get(t, "periods", "base", list, [1.0, 1.0])
        if len(periods) != 2 or any(isinstance(p, bool) or not isinstance(p, (int, float)) or p <= 0 for p in periods):
            raise ConfigError("base.periods", "expected two positive numbers")
        periods = tuple(float(p) for p in periods)
        volume = Fraction(repr(periods[0] * periods[1]))
        if "volume" in t:
            raise ConfigError("base.volume", "the torus area is fixed by the periods")
        if rank1 != 1 or rank2 != 1:
            raise ConfigError("base", "torus solves need line bundles (rank 1)")
        for key, deg in (("base.w1.degree", deg1), ("base.w2.degree", deg2)):
            if deg.denominator != 1:
                raise ConfigError(key, "line bundle degrees must be integers")
        raw = _get(t, "divisors", "base", list, [])
        out = []
        for j, d in enumerate(raw):
            if not isinstance(d, list):
                raise ConfigError(f"base.divisors[{j}]", "expected a list of [i, j, multiplicity] points")
            pts = []
            for q, pt in enumerate(d):
                if not isinstance(pt, list) or len(pt) not in (2, 3) or not all(isinstance(x, int) for x in pt):
                    raise ConfigError(f"base.divisors[{j}][{q}]", "expected [i, j] or [i, j, multiplicity]")
                pts.append(tuple(pt))
            out.append(tuple(pts))
        divisors = tuple(out)
        if "amplitudes" in t:
            a = _get(t, "amplitudes", "base", list)
            amps = tuple(float(x) for x in a)
    if volume <= 0:
        raise ConfigError("base.volume", "must be positive")
    return BaseSettings(mode, periods, volume, rank1, rank2, deg1, deg2, h0, divisors, amps)


def parse_config(data: dict, name: str = "") -> PipelineConfig:
    fiber = _get(data, "fiber", "", dict)
    text = _get(fiber, "diagram", "fiber", str)
    try:
        d = parse_diagram(text)
    except ValueError as e:
        raise ConfigError("fiber.diagram", str(e)) from None
    rho1 = _modules(d, _get(fiber, "rho1", "fiber", None), "fiber.rho1")
    rho2 = _modules(d, _get(fiber, "rho2", "fiber", None, "(" + ",".join("0" * d.rank) + ")"), "fiber.rho2")
    kahler = _kahler(d, fiber.get("kahler"), "fiber.kahler")
    base = _base(data.get("base", {}))
    sig = data.get("sigma", {})
    if not isinstance(sig, dict):
        raise ConfigError("sigma", "expected a table")
    sigma = _fraction(sig.get("value", 1), "sigma.value")
    if sigma <= 0:
        raise ConfigError("sigma.value", "must be positive")
    sweep = None
    if "sweep" in sig:
        sw = _get(sig, "sweep", "sigma", dict)
        start = _fraction(_get(sw, "start", "sigma.sweep", None), "sigma.sweep.start")
        stop = _fraction(_get(sw, "stop", "sigma.sweep", None), "sigma.sweep.stop")
        num = _get(sw, "num", "sigma.sweep", int)
        if start <= 0 or stop <= 0:
            raise ConfigError("sigma.sweep", "endpoints must be positive")
        if num < 1 or (num > 1 and stop <= start):
            raise ConfigError("sigma.sweep", "need num >= 1 and stop > start")
        sweep = SweepRange(start, stop, num)
    so = data.get("solver", {})
    tol = float(_get(so, "tol", "solver", (int, float), 1e-8))
    if tol <= 0:
        raise ConfigError("solver.tol", "must be positive")
    method = _get(so, "method", "solver", str, "flow-newton")
    if method not in ("flow-newton", "flow", "newton"):
        raise ConfigError("solver.method", "must be flow-newton, flow or newton")
    grid = _get(so, "grid", "solver", int, 64)
    if grid < 4:
        raise ConfigError("solver.grid", "must be at least 4")
    solver = SolverOptions(tol, _get(so, "max_iter", "solver", int, 200), method, grid)
    fc = data.get("fiber_check", {})
    fiber_check = FiberCheckSettings(
        enabled=_get(fc, "enabled", "fiber_check", bool, bool(fc)),
        k_values=tuple(_get(fc, "k_values", "fiber_check", list, [2, 3])),
        sigmas=tuple(_fraction(s, "fiber_check.sigmas") for s in _get(fc, "sigmas", "fiber_check", list, ["1/2", 1, 4])),
        n=_get(fc, "n", "fiber_check", int, 128),
        shape=tuple(_get(fc, "shape", "fiber_check", list, [1, 1])),
    )
    if any(not isinstance(k, int) or k < 1 for k in fiber_check.k_values):
        raise ConfigError("fiber_check.k_values", "expected positive integers")
    if any(s <= 0 for s in fiber_check.sigmas):
        raise ConfigError("fiber_check.sigmas", "must be positive")
    stages = tuple(_get(data, "stages", "", list, list(STAGES)))
    bad = [s for s in stages if s not in STAGES]
    if bad:
        raise ConfigError("stages", f"unknown stages {bad}; choose from {list(STAGES)}")
    if base.mode == "exact-only":
        stages = tuple(s for s in stages if s != "solve")
    if not fiber_check.enabled:
        stages = tuple(s for s in stages if s != "verify-fiber")
    out = data.get("output", {})
    return PipelineConfig(
        diagram=d,
        rho1=rho1,
        rho2=rho2,
        kahler=kahler,
        base=base,
        sigma=sigma,
        sweep=sweep,
        solver=solver,
        fiber_check=fiber_check,
        stages=stages,
        seed=_get(data, "seed", "", int, 0),
        outputs={k: str(v) for k, v in out.items()},
        raw=data,
        name=name,
    )


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        # message already carries "(at line L, column C)"
        raise ConfigError(str(path), f"TOML syntax error: {e}") from None
    except OSError as e:
        raise ConfigError(str(path), f"cannot read: {e.strerror}") from None
    return parse_config(data, name=path.stem)


def loads_config(text: str, name: str = "") -> PipelineConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError("<string>", f"TOML syntax error: {e}") from None
    return parse_config(data, name=name)
