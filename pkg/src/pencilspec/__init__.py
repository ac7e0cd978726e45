"""Spectral projectors of symmetric matrices and commuting quadratic pencils.

Forward problem: the spectrum of ``lambda^2 M + lambda C + K`` when
``M^-1 C`` and ``M^-1 K`` commute.  Inverse problem: coefficient matrices for
a prescribed set of conjugate eigenvalue pairs.  An independent
determinant-polynomial oracle cross-checks both directions.
"""

from .dense import DEFAULT_TOLERANCES, Tolerances, random_orthogonal
from .errors import PencilSpecError
from .forward import (
    ModalData,
    NormalizedPencil,
    QuadraticPencil,
    Spectrum,
    evaluate_pencil,
    normalize_pencil,
    pencil_spectrum,
    simultaneous_diagonalize,
)
from .inverse import InverseSpec, ReconstructedPencil, pair_conjugates, reconstruct_pencil
from .oracle import multiset_match, oracle_spectrum
from .spectral import SpectralDecomposition, spectral_decompose, spectral_power

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOLERANCES",
    "Tolerances",
    "random_orthogonal",
    "PencilSpecError",
    "ModalData",
    "NormalizedPencil",
    "QuadraticPencil",
    "Spectrum",
    "evaluate_pencil",
    "normalize_pencil",
    "pencil_spectrum",
    "simultaneous_diagonalize",
    "InverseSpec",
    "ReconstructedPencil",
    "pair_conjugates",
    "reconstruct_pencil",
    "multiset_match",
    "oracle_spectrum",
    "SpectralDecomposition",
    "spectral_decompose",
    "spectral_power",
]
