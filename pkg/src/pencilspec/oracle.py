"""Brute-force spectrum of a quadratic pencil from ``det P(lambda) = 0``.

Nothing here assumes commuting coefficients or uses an eigensolver: the
degree-2n determinant polynomial is recovered by sampling determinants at
Chebyshev points and interpolating, its roots come from Durand-Kerner
simultaneous iteration, and each root is finally sharpened by Newton steps on
the determinant of the pencil itself (interpolation in the monomial basis
loses several digits already at n = 6).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import DEFAULT_TOLERANCES, Tolerances, determinant, frozen
from .errors import DimensionMismatch, IllConditioned, NoMatching, NonConvergence, ValidationError
from .forward import QuadraticPencil, evaluate_pencil

__all__ = [
    "DetPolynomial",
    "Matching",
    "spectral_radius_estimate",
    "det_poly",
    "poly_roots",
    "refine_roots",
    "oracle_spectrum",
    "multiset_match",
]

MAX_ORDER = 16
MAX_ITERATIONS = 500
NEWTON_STEPS = 3
BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class DetPolynomial:
    """Coefficients of ``det P(lambda)`` in ascending degree."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise ValidationError("polynomial needs at least one finite coefficient")
        object.__setattr__(self, "coefficients", frozen(c))

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, x):
        return _horner(self.coefficients, x)


@dataclass(frozen=True)
class Matching:
    """Index pairs ``(i, j)`` matching ``a[i]`` to ``b[j]`` and the largest distance."""

    pairs: tuple
    worst: float


def _horner(coeffs, x):
    acc = np.zeros_like(np.asarray(x, dtype=complex)) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * x + c
    return acc


def _order_key(z):
    # real parts equal up to rounding noise tie-break on the imaginary part
    return (round(z.real, 9), z.imag)


def spectral_radius_estimate(p: QuadraticPencil) -> float:
    """Rough ``max |lambda|`` from Frobenius norms of ``M^-1 C`` and ``M^-1 K``.

    Exact for scalar pencils with complex roots; it can only overshoot by
    small factors for commuting pencils.
    """
    c_tilde = np.linalg.solve(p.m, p.c)
    k_tilde = np.linalg.solve(p.m, p.k)
    rho = max(np.sqrt(np.linalg.norm(k_tilde)), 0.5 * np.linalg.norm(c_tilde))
    return float(rho) if rho > 0 else 1.0


def det_poly(p: QuadraticPencil) -> DetPolynomial:
    """Interpolate ``det(lambda^2 M + lambda C + K)`` from 2n+1 samples.

    Samples sit at Chebyshev points of ``[-2 rho, 2 rho]``; the Vandermonde
    system is solved in the rescaled variable ``lambda / (2 rho)``.
    """
    n = p.n
    if n > MAX_ORDER:
        raise IllConditioned(f"determinant interpolation is limited to order {MAX_ORDER}, got {n}")
    count = 2 * n + 1
    half_width = 2.0 * spectral_radius_estimate(p)
    t = np.cos((2 * np.arange(count) + 1) * np.pi / (2 * count))
    mu = half_width * t
    values = np.array([determinant(x * x * p.m + x * p.c + p.k) for x in mu])
    scaled = np.linalg.solve(np.vander(t, count, increasing=True), values)
    return DetPolynomial(scaled / half_width ** np.arange(count))


def poly_roots(poly, tol: Tolerances = DEFAULT_TOLERANCES) -> list:
    """All complex roots (with multiplicity), sorted by ``(re, im)``.

    Durand-Kerner from points on a circle of Cauchy-bound radius, followed
    by a few Newton steps per root.
    """
    coeffs = np.asarray(poly.coefficients if isinstance(poly, DetPolynomial) else poly, dtype=float)
    if coeffs.size == 0 or coeffs[-1] == 0:
        raise ValidationError("leading coefficient must be nonzero")
    degree = coeffs.size - 1
    if degree == 0:
        return []
    monic = coeffs / coeffs[-1]
    radius = 1.0 + float(np.max(np.abs(monic[:-1])))
    angles = 2 * np.pi * np.arange(degree) / degree + 0.4
    z = radius * np.exp(1j * angles)
    off_diag = ~np.eye(degree, dtype=bool)

    for _ in range(MAX_ITERATIONS):
        diffs = z[:, None] - z[None, :]
        denom = np.prod(np.where(off_diag, diffs, 1.0), axis=1)
        step = _horner(monic, z) / denom
        z = z - step
        if np.max(np.abs(step)) <= tol.root_tol * max(1.0, float(np.max(np.abs(z)))):
            break
    else:
        raise NonConvergence(f"Durand-Kerner did not converge in {MAX_ITERATIONS} iterations")

    derivative = monic[1:] * np.arange(1, degree + 1)
    for k in range(degree):
        for _ in range(NEWTON_STEPS):
            f = _horner(monic, z[k])
            df = _horner(derivative, z[k])
            if df == 0:
                break
            candidate = z[k] - f / df
            if abs(_horner(monic, candidate)) >= abs(f):
                break
            z[k] = candidate
    return sorted((complex(r) for r in z), key=_order_key)


def refine_roots(p: QuadraticPencil, roots, tol: Tolerances = DEFAULT_TOLERANCES, steps: int = 20) -> list:
    """Newton iteration on ``det P(lambda)`` itself, seeded by ``roots``.

    Uses ``d/dlambda log det P = tr(P^-1 P')`` with ``P' = 2 lambda M + C``,
    so only linear solves are involved.  A step is rejected when it does not
    shrink, or when it would carry a root more than half way to its nearest
    neighbour, which keeps distinct seeds from collapsing onto one root.
    """
    roots = [complex(r) for r in roots]
    out = []
    for k, z in enumerate(roots):
        others = [abs(z - w) for j, w in enumerate(roots) if j != k]
        reach = 0.5 * min(others) if others else np.inf
        start, previous = z, np.inf
        for _ in range(steps):
            pz = evaluate_pencil(p, z)
            dp = 2 * z * p.m + p.c
            try:
                trace = np.trace(np.linalg.solve(pz, dp))
            except np.linalg.LinAlgError:
                break
            if trace == 0:
                break
            step = 1.0 / trace
            if abs(step) >= previous or abs(z - step - start) > reach:
                break
            z, previous = z - step, abs(step)
            if previous <= tol.root_tol * max(1.0, abs(z)):
                break
        out.append(z)
    return sorted(out, key=_order_key)


def oracle_spectrum(p: QuadraticPencil, tol: Tolerances = DEFAULT_TOLERANCES) -> list:
    """Roots of the interpolated determinant, refined on ``det P`` directly."""
    return refine_roots(p, poly_roots(det_poly(p), tol), tol)


def _has_perfect_matching(allowed):
    n = len(allowed)
    owner = [-1] * n

    def augment(i, seen):
        for j in allowed[i]:
            if j not in seen:
                seen.add(j)
                if owner[j] < 0 or augment(owner[j], seen):
                    owner[j] = i
                    return True
        return False

    return all(augment(i, set()) for i in range(n))


def _optimal_assignment(dist):
    """Permutation minimizing the largest distance, then the sum.

    Same answer as scanning every permutation in lexicographic order, but
    the bottleneck is found first by bisection so the exhaustive part only
    walks permutations made of admissible edges.
    """
    n = dist.shape[0]
    levels = np.unique(dist)
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching([np.flatnonzero(row <= levels[mid]) for row in dist]):
            hi = mid
        else:
            lo = mid + 1
    allowed = [[int(j) for j in np.flatnonzero(row <= levels[lo])] for row in dist]
    d = dist.tolist()

    best, best_sum = None, np.inf
    perm, used = [], [False] * n

    def search(i, total):
        nonlocal best, best_sum
        if total >= best_sum:
            return
        if i == n:
            best, best_sum = list(perm), total
            return
        for j in allowed[i]:
            if not used[j]:
                used[j] = True
                perm.append(j)
                search(i + 1, total + d[i][j])
                perm.pop()
                used[j] = False

    search(0, 0.0)
    return best


def multiset_match(a, b, tol: float) -> Matching:
    """Pair two equally long lists of complex numbers.

    Lists of up to 8 entries get the assignment minimizing the largest
    distance (sum of distances breaks ties) by enumeration; longer lists are
    matched greedily, each entry of ``a`` in ``(re, im)`` order taking its
    nearest unused partner in ``b``.

    Raises
    ------
    NoMatching
        Some matched pair is farther apart than ``tol``.
    """
    a = [complex(x) for x in a]
    b = [complex(x) for x in b]
    if len(a) != len(b):
        raise DimensionMismatch(f"cannot match {len(a)} values against {len(b)}")
    if not a:
        return Matching((), 0.0)
    dist = np.abs(np.array(a)[:, None] - np.array(b)[None, :])

    if len(a) <= BRUTE_FORCE_LIMIT:
        pairs = tuple(enumerate(_optimal_assignment(dist)))
    else:
        free = set(range(len(b)))
        pairs = []
        for i in sorted(range(len(a)), key=lambda i: (a[i].real, a[i].imag)):
            j = min(free, key=lambda j: (dist[i, j], j))
            free.remove(j)
            pairs.append((i, j))
        pairs = tuple(sorted(pairs))

    worst = max(float(dist[i, j]) for i, j in pairs)
    if worst > tol:
        raise NoMatching(f"multisets differ: worst matched distance {worst:.3g} > {tol:g}", worst=worst)
    return Matching(pairs, worst)
