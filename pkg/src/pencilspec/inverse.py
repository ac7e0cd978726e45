"""Inverse problem: build a commuting quadratic pencil with a prescribed spectrum.

Each conjugate pair ``(lambda, conj(lambda))`` fixes one modal quadratic
through ``alpha = -(lambda + conj(lambda))`` and ``beta = lambda conj(lambda)``.
Placing the modes on the canonical one-dimensional projectors gives diagonal
``C~`` and ``K~``; any orthogonal similarity and any mass matrix diagonal in
the same basis keep the spectrum intact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dense import DEFAULT_TOLERANCES, Tolerances, check_orthogonal, frozen
from .errors import (
    DimensionMismatch,
    DuplicateEigenvalue,
    NonPositiveMass,
    OddLength,
    RealValue,
    UnpairedValue,
    ValidationError,
)
from .forward import ModalData, NormalizedPencil, QuadraticPencil, Spectrum, modal_eigenvalues, mode_order

__all__ = [
    "InverseSpec",
    "ReconstructedPencil",
    "pair_conjugates",
    "check_distinct",
    "vieta_coefficients",
    "canonical_projectors",
    "assemble_diagonal",
    "dress",
    "reconstruct_pencil",
]

ORTHOGONAL_TOL = 1e-10


@dataclass(frozen=True)
class InverseSpec:
    spectrum: Spectrum
    dressing: Optional[np.ndarray] = None
    mass_eigenvalues: Optional[np.ndarray] = None

    def __post_init__(self):
        if not isinstance(self.spectrum, Spectrum):
            object.__setattr__(self, "spectrum", Spectrum(self.spectrum))
        n = len(self.spectrum)
        if n < 1:
            raise ValidationError("spectrum must contain at least one conjugate pair")
        if self.dressing is not None:
            q = check_orthogonal(self.dressing, ORTHOGONAL_TOL)
            if q.shape[0] != n:
                raise DimensionMismatch(f"dressing has order {q.shape[0]}, spectrum has {n} pairs")
            object.__setattr__(self, "dressing", frozen(q))
        if self.mass_eigenvalues is not None:
            m = np.asarray(self.mass_eigenvalues, dtype=float).reshape(-1)
            if m.shape != (n,):
                raise DimensionMismatch(f"expected {n} mass eigenvalues, got {m.size}")
            if not np.all(np.isfinite(m)):
                raise ValidationError("mass eigenvalues must be finite")
            object.__setattr__(self, "mass_eigenvalues", frozen(m))


@dataclass(frozen=True)
class ReconstructedPencil:
    pencil: QuadraticPencil
    modal: ModalData


def pair_conjugates(values, tol: Tolerances = DEFAULT_TOLERANCES) -> Spectrum:
    """Group a full list of 2n eigenvalues into n conjugate pairs.

    Each upper half-plane value, in input order, claims the nearest unused
    lower half-plane value within ``conj_pair_tol`` of its conjugate.
    Duplicated pairs are kept; :func:`check_distinct` rejects them.
    """
    values = [complex(v) for v in values]
    if len(values) % 2:
        raise OddLength(f"a conjugate-closed spectrum has even length, got {len(values)}")
    for i, v in enumerate(values):
        if not (np.isfinite(v.real) and np.isfinite(v.imag)):
            raise ValidationError(f"value {i} is not finite: {v!r}")
        if abs(v.imag) <= tol.conj_pair_tol:
            raise RealValue(f"value {i} = {v!r} is real; eigenvalues must be complex")
    lower = {i for i, v in enumerate(values) if v.imag < 0}
    reps = []
    for i, v in enumerate(values):
        if v.imag < 0:
            continue
        target = v.conjugate()
        best = min(lower, key=lambda j: (abs(values[j] - target), j), default=None)
        if best is None or abs(values[best] - target) > tol.conj_pair_tol:
            raise UnpairedValue(f"value {i} = {v!r} has no conjugate partner")
        lower.remove(best)
        reps.append(v)
    if lower:
        j = min(lower)
        raise UnpairedValue(f"value {j} = {values[j]!r} has no conjugate partner")
    return Spectrum(reps).sorted()


def check_distinct(s: Spectrum, tol: Tolerances = DEFAULT_TOLERANCES) -> Spectrum:
    """Reject spectra whose 2n eigenvalues are not pairwise separated by ``distinct_tol``."""
    reps = list(s.pairs)
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            gap = min(abs(reps[i] - reps[j]), abs(reps[i] - reps[j].conjugate()))
            if gap <= tol.distinct_tol:
                raise DuplicateEigenvalue(
                    f"eigenvalues {i} ({reps[i]!r}) and {j} ({reps[j]!r}) coincide "
                    f"within {tol.distinct_tol:g}",
                    indices=(i, j),
                )
    return s


def vieta_coefficients(rep) -> tuple:
    """``(alpha, beta)`` of the real quadratic with roots ``rep`` and ``conj(rep)``."""
    rep = complex(rep)
    return -2.0 * rep.real, rep.real * rep.real + rep.imag * rep.imag


def canonical_projectors(n: int) -> list:
    if n < 1:
        raise ValidationError(f"order must be positive, got {n}")
    out = []
    for k in range(n):
        p = np.zeros((n, n))
        p[k, k] = 1.0
        out.append(p)
    return out


def assemble_diagonal(alphas, betas) -> NormalizedPencil:
    alphas = np.asarray(alphas, dtype=float).reshape(-1)
    betas = np.asarray(betas, dtype=float).reshape(-1)
    if alphas.size == 0:
        raise ValidationError("at least one mode is required")
    if alphas.shape != betas.shape:
        raise DimensionMismatch(f"{alphas.size} alphas but {betas.size} betas")
    projectors = canonical_projectors(alphas.size)
    c = sum(a * p for a, p in zip(alphas, projectors))
    k = sum(b * p for b, p in zip(betas, projectors))
    return NormalizedPencil(c, k)


def _conjugate_by(q, d):
    out = q @ d @ q.T
    return 0.5 * (out + out.T)


def dress(np_: NormalizedPencil, q) -> NormalizedPencil:
    """Orthogonal similarity ``Q D Q^T`` applied to a diagonal normalized pencil."""
    c, k = np.asarray(np_.c_tilde), np.asarray(np_.k_tilde)
    for name, x in (("damping", c), ("stiffness", k)):
        if np.any(x != np.diag(np.diag(x))):
            raise ValidationError(f"{name} matrix must be diagonal before dressing")
    q = check_orthogonal(q, ORTHOGONAL_TOL)
    if q.shape != c.shape:
        raise DimensionMismatch(f"dressing has order {q.shape[0]}, pencil has order {c.shape[0]}")
    return NormalizedPencil(_conjugate_by(q, c), _conjugate_by(q, k))


def reconstruct_pencil(spec: InverseSpec, tol: Tolerances = DEFAULT_TOLERANCES) -> ReconstructedPencil:
    """Assemble ``(M, C, K)`` whose spectrum is ``spec.spectrum``.

    Modes are laid out in ascending ``(alpha, beta)``, so
    ``{-1+2i, -2+3i}`` gives ``C = diag(2, 4)``; mass eigenvalue and column
    ``i`` of the dressing belong to mode ``i``.  With
    dressing ``Q`` and mass eigenvalues ``m_i`` the output is
    ``M = Q diag(m) Q^T``, ``C = Q diag(m alpha) Q^T``,
    ``K = Q diag(m beta) Q^T``; without them ``Q = I`` and ``m = 1``.
    """
    spectrum = check_distinct(spec.spectrum.sorted(), tol)
    n = len(spectrum)
    coeffs = [vieta_coefficients(z) for z in spectrum]
    order = mode_order([a for a, _ in coeffs], [b for _, b in coeffs])
    alphas = np.array([coeffs[i][0] for i in order])
    betas = np.array([coeffs[i][1] for i in order])
    if spec.mass_eigenvalues is None:
        masses = np.ones(n)
    else:
        masses = np.asarray(spec.mass_eigenvalues)
        if np.any(masses <= tol.root_tol):
            raise NonPositiveMass(f"mass eigenvalues must exceed {tol.root_tol:g}, got {masses.tolist()}")
    q = np.eye(n) if spec.dressing is None else np.asarray(spec.dressing)

    diagonal = assemble_diagonal(masses * alphas, masses * betas)
    dressed = dress(diagonal, q)
    m = np.eye(n) if spec.mass_eigenvalues is None else _conjugate_by(q, np.diag(masses))
    pencil = QuadraticPencil(m, dressed.c_tilde, dressed.k_tilde)

    projectors = [np.outer(q[:, i], q[:, i]) for i in range(n)]
    pairs = [modal_eigenvalues(a, b, tol) for a, b in zip(alphas, betas)]
    return ReconstructedPencil(pencil, ModalData(alphas, betas, q, projectors, pairs))
