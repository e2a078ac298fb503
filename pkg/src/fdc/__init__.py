"""Fuzzy discriminant clustering with fuzzy pairwise constraints."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BadParameter,
    ConstraintOutOfRange,
    ConstraintSet,
    Dataset,
    DimensionMismatch,
    FdcConfig,
    FdcError,
    FuzzyConstraint,
    connected_components,
    validate_inputs,
)
from .fcm import fcm_fit  # noqa: E402
from .kernel import KernelSpec, gram_matrix, kernel_fit  # noqa: E402
from .mem import FdcModel, fit, objective  # noqa: E402

__all__ = [
    "BadParameter",
    "ConstraintOutOfRange",
    "ConstraintSet",
    "Dataset",
    "DimensionMismatch",
    "FdcConfig",
    "FdcError",
    "FdcModel",
    "FuzzyConstraint",
    "KernelSpec",
    "connected_components",
    "fcm_fit",
    "fit",
    "gram_matrix",
    "kernel_fit",
    "objective",
    "validate_inputs",
]
