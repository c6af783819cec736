"""Exact root systems, Weyl-group actions and representation theory."""

from ._backend import BACKEND
from .reps import (
    ShiftedDominant,
    dominant_character,
    dominantize_shifted,
    dual_weight,
    freudenthal_multiplicities,
    is_dominant,
    klimyk_tensor,
    reflect_to_dominant,
    simple_reflection,
    weyl_dimension,
    weyl_orbit,
)
from .rootsystem import LieType, RootSystemData, build_root_system, cartan_matrix

__all__ = [
    "BACKEND",
    "LieType",
    "RootSystemData",
    "ShiftedDominant",
    "build_root_system",
    "cartan_matrix",
    "dominant_character",
    "dominantize_shifted",
    "dual_weight",
    "freudenthal_multiplicities",
    "is_dominant",
    "klimyk_tensor",
    "reflect_to_dominant",
    "simple_reflection",
    "weyl_dimension",
    "weyl_orbit",
]
