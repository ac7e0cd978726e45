"""Spectral theory of a real symmetric matrix with simple eigenvalues.

Eigenvalues come from cyclic Jacobi sweeps.  Eigenvectors are then built
from cofactors of ``A - lambda I``: for a simple eigenvalue the adjugate has
rank one, so any row of cofactors that does not vanish is an eigenvector.
From the normalized eigenvectors we form rank-one projectors, and with them
the expansion ``A = sum lambda_i P_i`` and its powers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import DEFAULT_TOLERANCES, Tolerances, as_symmetric, cofactor_row, frozen, inf_norm
from .errors import DegenerateEigenvalue, DimensionMismatch, NonConvergence, NotAnEigenvalue

__all__ = [
    "EigenPair",
    "SpectralDecomposition",
    "jacobi_eigh",
    "symmetric_eigenvalues",
    "cofactor_eigenvector",
    "projector",
    "spectral_decompose",
    "reconstruct",
    "spectral_power",
    "expand_in_eigenbasis",
]

MAX_SWEEPS = 100
OFF_DIAGONAL_RTOL = 1e-12


@dataclass(frozen=True)
class EigenPair:
    """An eigenvalue, its unit eigenvector and the cofactor row that produced it."""

    value: float
    vector: np.ndarray
    g_row: int

    def __post_init__(self):
        object.__setattr__(self, "vector", frozen(np.asarray(self.vector, dtype=float)))


@dataclass(frozen=True)
class SpectralDecomposition:
    source: np.ndarray
    pairs: tuple
    projectors: tuple

    def __post_init__(self):
        object.__setattr__(self, "source", frozen(self.source))
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "projectors", tuple(frozen(p) for p in self.projectors))

    @property
    def n(self) -> int:
        return self.source.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.value for p in self.pairs])

    @property
    def eigenvectors(self) -> np.ndarray:
        """Eigenvectors as the columns of an orthogonal matrix."""
        return np.column_stack([p.vector for p in self.pairs])

    @property
    def g_rows(self) -> list:
        return [p.g_row for p in self.pairs]


def _off_norm(a) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(a, tol: Tolerances = DEFAULT_TOLERANCES):
    """Cyclic Jacobi eigensolver.

    Sweeps over all ``(p, q)`` pairs in row order, annihilating ``a[p, q]``
    with a plane rotation, until the off-diagonal Frobenius norm drops to
    ``1e-12 * ||a||_F``.

    Returns
    -------
    values : ndarray
        Eigenvalues in ascending order.
    vectors : ndarray
        Matching unit eigenvectors as columns (accumulated rotations).
    """
    a = as_symmetric(a, tol)
    n = a.shape[0]
    v = np.eye(n)
    target = OFF_DIAGONAL_RTOL * float(np.linalg.norm(a))
    for sweep in range(MAX_SWEEPS + 1):
        if _off_norm(a) <= target:
            break
        if sweep == MAX_SWEEPS:
            raise NonConvergence(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                a[:, [p, q]] = a[:, [p, q]] @ rot
                a[[p, q], :] = rot.T @ a[[p, q], :]
                a[p, q] = a[q, p] = 0.0
                v[:, [p, q]] = v[:, [p, q]] @ rot
    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def symmetric_eigenvalues(a, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix."""
    return jacobi_eigh(a, tol)[0]


def _canonical_sign(x):
    k = int(np.argmax(np.abs(x)))
    return -x if x[k] < 0 else x


def cofactor_eigenvector(a, value: float, tol: Tolerances = DEFAULT_TOLERANCES) -> EigenPair:
    """Unit eigenvector for a simple eigenvalue from a row of cofactors.

    Every row of cofactors of ``B = a - value*I`` is tried; the row with the
    largest Euclidean norm wins (first index on ties).  The vector is
    normalized and its largest-magnitude entry made positive.

    Raises
    ------
    DegenerateEigenvalue
        All cofactor rows are numerically zero, i.e. ``value`` is repeated.
    NotAnEigenvalue
        The resulting vector fails the residual check.
    """
    a = as_symmetric(a, tol)
    value = float(value)
    n = a.shape[0]
    scale = inf_norm(a)
    b = a - value * np.eye(n)
    rows = [cofactor_row(b, g) for g in range(n)]
    norms = np.array([np.linalg.norm(r) for r in rows])
    g = int(np.argmax(norms))
    if norms[g] <= tol.root_tol * scale ** (n - 1):
        raise DegenerateEigenvalue(f"degenerate eigenvalue {value!r}: every cofactor row vanishes")
    x = _canonical_sign(rows[g] / norms[g])
    residual = inf_norm(a @ x - value * x)
    if residual > tol.eig_residual_tol * scale:
        raise NotAnEigenvalue(f"{value!r} is not an eigenvalue (residual {residual:.3g})")
    return EigenPair(value, x, g)


def projector(pair: EigenPair) -> np.ndarray:
    """Rank-one orthogonal projector ``x x^T`` onto the eigenvector."""
    x = np.asarray(pair.vector if isinstance(pair, EigenPair) else pair, dtype=float)
    return np.outer(x, x)


def _check_simple(values, tol):
    gaps = np.diff(values)
    if gaps.size and np.min(gaps) <= tol.distinct_tol:
        k = int(np.argmin(gaps))
        raise DegenerateEigenvalue(
            f"degenerate eigenvalue: {float(values[k])!r} and {float(values[k + 1])!r} "
            f"are closer than {tol.distinct_tol:g}"
        )


def spectral_decompose(a, tol: Tolerances = DEFAULT_TOLERANCES) -> SpectralDecomposition:
    a = as_symmetric(a, tol)
    values = symmetric_eigenvalues(a, tol)
    _check_simple(values, tol)
    pairs = [cofactor_eigenvector(a, lam, tol) for lam in values]
    return SpectralDecomposition(a, pairs, [projector(p) for p in pairs])


def _weighted_sum(weights, projectors, n):
    out = np.zeros((n, n))
    for w, p in zip(weights, projectors):
        out += w * p
    return out


def reconstruct(d: SpectralDecomposition, values=None) -> np.ndarray:
    """``sum lambda_i P_i``; pass ``values`` to substitute other weights."""
    weights = d.eigenvalues if values is None else np.asarray(values, dtype=float)
    if weights.shape != (d.n,):
        raise DimensionMismatch(f"expected {d.n} weights, got shape {weights.shape}")
    return _weighted_sum(weights, d.projectors, d.n)


def spectral_power(d: SpectralDecomposition, k: int) -> np.ndarray:
    """``A**k`` as ``sum lambda_i**k P_i``; ``k = 0`` gives ``sum P_i``."""
    if int(k) != k or k < 0:
        raise ValueError(f"power must be a non-negative integer, got {k!r}")
    return _weighted_sum(d.eigenvalues ** int(k), d.projectors, d.n)


def expand_in_eigenbasis(d: SpectralDecomposition, y) -> np.ndarray:
    """Coordinates ``y_i = x_i^T y`` of ``y`` in the orthonormal eigenbasis."""
    y = np.asarray(y, dtype=float)
    if y.shape != (d.n,):
        raise DimensionMismatch(f"vector of length {d.n} expected, got shape {y.shape}")
    return d.eigenvectors.T @ y
