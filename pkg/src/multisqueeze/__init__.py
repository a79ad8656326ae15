"""Bloch-Messiah, Takagi and tensor (HOSVD) reductions of multimode Gaussian transformations."""

from .errors import DecompositionError, ParseError, RouteMismatch
from .hamiltonian import (
    JSABlockHamiltonian,
    SymmetricHamiltonian,
    TensorHamiltonian,
    antoine_takagi,
    generalized_antoine_takagi,
    propagate,
    propagate_tensor,
    single_vs_two_mode_equiv,
    two_mode_reduce,
)
from .linalg import gram_schmidt_pivoted, permanent, takagi
from .symplectic import (
    BMDecomposition,
    SymplecticKernel,
    apply_passive,
    bloch_messiah,
    compose,
    inverse,
    validate_symplectic,
)
from .tensor import TensorKernel, flatten, fold, gbm, hosvd, n_mode_flatten, polar_split, truncate

__version__ = "0.1.0"

__all__ = [
    "BMDecomposition",
    "DecompositionError",
    "JSABlockHamiltonian",
    "ParseError",
    "RouteMismatch",
    "SymmetricHamiltonian",
    "SymplecticKernel",
    "TensorHamiltonian",
    "TensorKernel",
    "antoine_takagi",
    "apply_passive",
    "bloch_messiah",
    "compose",
    "flatten",
    "fold",
    "gbm",
    "generalized_antoine_takagi",
    "gram_schmidt_pivoted",
    "hosvd",
    "inverse",
    "n_mode_flatten",
    "permanent",
    "polar_split",
    "propagate",
    "propagate_tensor",
    "single_vs_two_mode_equiv",
    "takagi",
    "truncate",
    "two_mode_reduce",
    "validate_symplectic",
]
