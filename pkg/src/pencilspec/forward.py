"""Spectrum of a quadratic pencil ``lambda^2 M + lambda C + K`` with commuting coefficients.

After normalizing by the mass matrix the pencil reads
``lambda^2 I + lambda C~ + K~``.  When ``C~`` and ``K~`` commute they share
an orthonormal eigenbasis ``z_i``, the pencil splits into the scalar modal
quadratics ``lambda^2 + alpha_i lambda + beta_i`` and each mode contributes
one conjugate pair of eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import (
    DEFAULT_TOLERANCES,
    Tolerances,
    as_matrix,
    as_symmetric,
    asymmetry,
    determinant,
    frozen,
    inf_norm,
)
from .errors import (
    DimensionMismatch,
    NonCommuting,
    NonSymmetric,
    RealModes,
    SharedBasisViolation,
    SingularMass,
    ValidationError,
)
from .spectral import spectral_decompose

__all__ = [
    "mode_order",
    "QuadraticPencil",
    "NormalizedPencil",
    "ModalData",
    "Spectrum",
    "commutator_norm",
    "normalize_pencil",
    "simultaneous_diagonalize",
    "modal_eigenvalues",
    "pencil_spectrum",
    "evaluate_pencil",
]


@dataclass(frozen=True)
class QuadraticPencil:
    """Coefficients ``(M, C, K)`` of ``P(lambda) = lambda^2 M + lambda C + K``.

    Construction checks only shapes and finiteness; symmetry and the
    non-singularity of ``M`` are enforced by :func:`normalize_pencil` so the
    thresholds stay overridable.
    """

    m: np.ndarray
    c: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        mats = [as_matrix(x) for x in (self.m, self.c, self.k)]
        if len({x.shape for x in mats}) != 1:
            raise DimensionMismatch(
                f"pencil coefficients differ in order: {[x.shape for x in mats]}"
            )
        for name, x in zip("mck", mats):
            object.__setattr__(self, name, frozen(x))

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @classmethod
    def scalar(cls, m: float, c: float, k: float) -> "QuadraticPencil":
        return cls([[m]], [[c]], [[k]])


@dataclass(frozen=True)
class NormalizedPencil:
    """``(C~, K~) = (M^-1 C, M^-1 K)``."""

    c_tilde: np.ndarray
    k_tilde: np.ndarray

    def __post_init__(self):
        c, k = as_matrix(self.c_tilde), as_matrix(self.k_tilde)
        if c.shape != k.shape:
            raise DimensionMismatch(f"order mismatch: {c.shape} vs {k.shape}")
        object.__setattr__(self, "c_tilde", frozen(c))
        object.__setattr__(self, "k_tilde", frozen(k))

    @property
    def n(self) -> int:
        return self.c_tilde.shape[0]


@dataclass(frozen=True)
class ModalData:
    """Per-mode coefficients together with the shared orthonormal basis.

    Column ``i`` of ``basis`` is the unit vector ``z_i`` with
    ``C~ z_i = alphas[i] z_i`` and ``K~ z_i = betas[i] z_i``; ``pairs[i]``
    holds the two roots of ``lambda^2 + alphas[i] lambda + betas[i]``, upper
    half-plane root first.
    """

    alphas: np.ndarray
    betas: np.ndarray
    basis: np.ndarray
    modal_projectors: tuple
    pairs: tuple

    def __post_init__(self):
        object.__setattr__(self, "alphas", frozen(np.asarray(self.alphas, dtype=float)))
        object.__setattr__(self, "betas", frozen(np.asarray(self.betas, dtype=float)))
        object.__setattr__(self, "basis", frozen(np.asarray(self.basis, dtype=float)))
        object.__setattr__(self, "modal_projectors", tuple(frozen(p) for p in self.modal_projectors))
        object.__setattr__(self, "pairs", tuple(tuple(complex(z) for z in p) for p in self.pairs))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def reordered(self, order) -> "ModalData":
        order = list(order)
        return ModalData(
            self.alphas[order],
            self.betas[order],
            self.basis[:, order],
            [self.modal_projectors[i] for i in order],
            [self.pairs[i] for i in order],
        )


def mode_order(alphas, betas) -> list:
    """Indices sorting modes by ascending ``(alpha, beta)``."""
    return sorted(range(len(alphas)), key=lambda i: (float(alphas[i]), float(betas[i])))


@dataclass(frozen=True)
class Spectrum:
    """One representative (positive imaginary part) per conjugate pair."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple(complex(z) for z in self.pairs)
        for z in pairs:
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                raise ValidationError(f"non-finite eigenvalue {z!r}")
            if z.imag <= 0:
                raise ValidationError(f"representative {z!r} must have positive imaginary part")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def sorted(self) -> "Spectrum":
        return Spectrum(sorted(self.pairs, key=lambda z: (z.real, z.imag)))

    def full(self) -> list:
        """All 2n eigenvalues: each representative followed by its conjugate."""
        out = []
        for z in self.pairs:
            out.extend((z, z.conjugate()))
        return out


def commutator_norm(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    return inf_norm(a @ b - b @ a)


def _commute_bound(c, k, tol):
    return tol.commute_tol * max(inf_norm(c) * inf_norm(k), 1.0)


def normalize_pencil(p: QuadraticPencil, tol: Tolerances = DEFAULT_TOLERANCES) -> NormalizedPencil:
    """Divide the pencil through by ``M`` and verify that ``C~ K~ = K~ C~``.

    Raises
    ------
    NonSymmetric
        Any of ``M``, ``C``, ``K`` is not symmetric.
    SingularMass
        ``|det M| <= root_tol``.
    NonCommuting
        The commutator exceeds ``commute_tol * max(||C~|| ||K~||, 1)``.
    """
    for name, x in zip(("mass", "damping", "stiffness"), (p.m, p.c, p.k)):
        try:
            as_symmetric(x, tol)
        except NonSymmetric as exc:
            raise NonSymmetric(f"{name} matrix: {exc}") from None
    det_m = determinant(p.m)
    if abs(det_m) <= tol.root_tol:
        raise SingularMass(f"mass matrix is singular (det M = {det_m:.3g})")
    c_tilde = np.linalg.solve(p.m, p.c)
    k_tilde = np.linalg.solve(p.m, p.k)
    comm = commutator_norm(c_tilde, k_tilde)
    if comm > _commute_bound(c_tilde, k_tilde, tol):
        raise NonCommuting(f"normalized damping and stiffness do not commute (||[C~, K~]|| = {comm:.3g})")
    return NormalizedPencil(c_tilde, k_tilde)


def simultaneous_diagonalize(np_: NormalizedPencil, tol: Tolerances = DEFAULT_TOLERANCES) -> ModalData:
    """Shared eigenbasis of ``C~`` and ``K~``, taken from ``C~`` and checked on ``K~``.

    Modes come out in ascending order of ``alpha``.  ``beta_i`` is the
    Rayleigh quotient ``z_i^T K~ z_i``.
    """
    c, k = np_.c_tilde, np_.k_tilde
    comm = commutator_norm(c, k)
    if comm > _commute_bound(c, k, tol):
        raise NonCommuting(f"normalized damping and stiffness do not commute (||[C~, K~]|| = {comm:.3g})")
    if asymmetry(c) > tol.sym_tol:
        raise NonSymmetric(
            "normalized damping M^-1 C is not symmetric; the mass matrix must share "
            "the eigenbasis of the damping and stiffness matrices"
        )
    dec = spectral_decompose(c, tol)
    z = dec.eigenvectors
    alphas = dec.eigenvalues
    betas = np.einsum("ji,jk,ki->i", z, k, z)
    k_scale = inf_norm(k)
    for i in range(dec.n):
        residual = inf_norm(k @ z[:, i] - betas[i] * z[:, i])
        if residual > tol.eig_residual_tol * k_scale:
            raise SharedBasisViolation(
                f"eigenvector {i} of C~ is not an eigenvector of K~ (residual {residual:.3g})"
            )
    pairs = [modal_eigenvalues(a, b, tol) for a, b in zip(alphas, betas)]
    return ModalData(alphas, betas, z, dec.projectors, pairs)


def modal_eigenvalues(alpha: float, beta: float, tol: Tolerances = DEFAULT_TOLERANCES):
    """Roots of ``lambda^2 + alpha lambda + beta``, ``(upper, lower)``.

    >>> modal_eigenvalues(2.0, 5.0)
    ((-1+2j), (-1-2j))
    """
    alpha, beta = float(alpha), float(beta)
    disc = alpha * alpha - 4.0 * beta
    if disc >= -tol.root_tol:
        raise RealModes(
            f"mode (alpha={alpha!r}, beta={beta!r}) has real eigenvalues "
            f"(discriminant {disc:.3g} >= 0)"
        )
    upper = complex(-0.5 * alpha, 0.5 * np.sqrt(-disc))
    return upper, upper.conjugate()


def pencil_spectrum(p: QuadraticPencil, tol: Tolerances = DEFAULT_TOLERANCES):
    """Forward problem: ``(Spectrum, ModalData)`` for a commuting pencil.

    The spectrum is sorted by ``(re, im)``.  Modes are listed in ascending
    ``(alpha, beta)``, the same order ``reconstruct_pencil`` lays them out,
    so ``modal.pairs[i]`` need not be ``spectrum.pairs[i]``.
    """
    modal = simultaneous_diagonalize(normalize_pencil(p, tol), tol)
    modal = modal.reordered(mode_order(modal.alphas, modal.betas))
    return Spectrum([pair[0] for pair in modal.pairs]).sorted(), modal


def evaluate_pencil(p: QuadraticPencil, lam) -> np.ndarray:
    lam = complex(lam)
    return lam * lam * p.m + lam * p.c + p.k.astype(complex)
