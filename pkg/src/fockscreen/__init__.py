"""fockscreen: exact screening-kernel engine for free-field vertex algebras."""

__version__ = "0.1.0"

from .errors import (
    D2NotZero,
    DimensionMismatch,
    EmptyWindow,
    FockscreenError,
    NonIntegralPairing,
    NotInSpan,
    RouteMismatch,
    StabilityError,
    UnboundedWindow,
    WindowTooSmall,
)
from .fockspace import BasisState, ConformalSpec, FockModuleSpec, Window
from .model import Model
from .qlattice import LatticeVector, QuadSpace, SignCocycle, change_basis
from .vertexops import DressedVector, GradedOperator, ModeOperator, Tower

__all__ = [
    "BasisState",
    "ConformalSpec",
    "D2NotZero",
    "DimensionMismatch",
    "DressedVector",
    "EmptyWindow",
    "FockModuleSpec",
    "FockscreenError",
    "GradedOperator",
    "LatticeVector",
    "Model",
    "ModeOperator",
    "NonIntegralPairing",
    "NotInSpan",
    "QuadSpace",
    "RouteMismatch",
    "SignCocycle",
    "StabilityError",
    "Tower",
    "UnboundedWindow",
    "Window",
    "WindowTooSmall",
    "change_basis",
]
