"""Coupled vortex equations on a flat torus: problems, residuals and the flow solver."""

from .geometry import BaseGeometry
from .problem import (
    Certificate,
    VortexProblem,
    assemble_problem,
    gauss_targets,
    infeasibility_certificate,
    section_potential,
)
from .solver import (
    DegenerationReport,
    SolverState,
    degeneration_check,
    energy,
    energy_gradient,
    finalize,
    moment_map_residual,
    section_density,
    solve,
    solve_split,
    split_distance,
    write_history_csv,
    write_potentials_csv,
)

__all__ = [
    "BaseGeometry",
    "Certificate",
    "DegenerationReport",
    "SolverState",
    "VortexProblem",
    "assemble_problem",
    "degeneration_check",
    "energy",
    "energy_gradient",
    "finalize",
    "gauss_targets",
    "infeasibility_certificate",
    "moment_map_residual",
    "section_density",
    "section_potential",
    "solve",
    "solve_split",
    "split_distance",
    "write_history_csv",
    "write_potentials_csv",
]
