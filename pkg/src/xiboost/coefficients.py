"""Correlation coefficients built on y-ranks in ascending-x order.

All rank statistics accumulate integer min-rank sums exactly and perform a
single float division at the end, so values are bit-identical across
platforms. Exact rational variants back the enumeration and extremal-identity
checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from .errors import DegenerateError, RhoRangeError, SizeError
from .ranks import (
    Sample,
    XOrder,
    compute_ranks,
    is_rank_permutation,
    reflect_ranks,
    sorted_y_ranks,
    validate_neighbor_count,
)


class Method(str, Enum):
    """Statistic identifiers, shared by the CLI and report schemas."""

    XI_CLASSIC = "xi-classic"
    XI_NM = "xi-nm"
    XI_NM_REFLECTED = "xi-nm-reflected"
    XI_PM = "xi-pm"
    SYMMETRIC_NN = "symmetric-nn"
    PEARSON = "pearson"
    HOEFFDING_D = "hoeffding-d"


@dataclass(frozen=True)
class CoefficientValue:
    """A computed coefficient with its method and sample metadata."""

    value: float
    method: Method
    n: int
    M: Optional[int] = None


@dataclass(frozen=True)
class PopulationXi:
    """Population dependence measure for the Gaussian rotation model."""

    rho: float
    xi: float
    quadrature_tolerance: float


# ---------------------------------------------------------------------------
# integer kernels


def min_rank_sum(rs: np.ndarray, M: int) -> int:
    """Sum over all points and m = 1..M of min(rank, rank of m-th right neighbor).

    `rs` holds y-ranks in ascending-x order, so the m-th right neighbor of the
    element at position p is simply the element at position p+m; the last m
    elements pair with themselves. Exact integer arithmetic throughout.
    """
    n = rs.size
    v = rs.astype(np.int64, copy=False)
    total = 0
    for m in range(1, M + 1):
        total += int(np.minimum(v[: n - m], v[m:]).sum())
        total += int(v[n - m:].sum())
    return total


def batch_min_rank_sums(rows: np.ndarray, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Min-rank sums of each row and of its rank reflection, in one pass.

    Rows are rank vectors in ascending-x order (for null replicates, drawn
    permutations as-is). The reflected sum reuses the identity
    min(n+1-a, n+1-b) = (n+1) - a - b + min(a, b); summed over all neighbor
    pairs the linear terms collapse to head/tail prefix sums, so per distance
    m the reflected contribution is P_m + H_m where the direct one is
    P_m + T_m (P = pair minima, H/T = head/tail sums of the first/last m
    entries).
    """
    k, n = rows.shape
    cs = np.cumsum(rows, axis=1, dtype=np.int64)
    grand = cs[:, -1]
    direct = np.zeros(k, dtype=np.int64)
    heads = np.zeros(k, dtype=np.int64)
    tails = np.zeros(k, dtype=np.int64)
    for m in range(1, M + 1):
        direct += np.minimum(rows[:, : n - m], rows[:, m:]).sum(axis=1, dtype=np.int64)
        tail = grand - cs[:, n - m - 1]
        direct += tail
        tails += tail
        heads += cs[:, m - 1]
    return direct, direct + heads - tails


def symmetric_neighbor_spans(n: int, M: int) -> list[tuple[int, int, int]]:
    """Ordered-pair slice bounds for the symmetric M-nearest-neighbor rule.

    Each position takes its M nearest positions in x-rank distance, preferring
    the right side on distance ties, shifting inward at the edges. Every
    (anchor, neighbor) incidence maps to exactly one unordered gap (q, q+d);
    the returned triples (d, lo, hi) mean: positions q in [lo, hi) pair with
    q+d. Incidences anchored on both sides of the same gap yield the gap
    twice.
    """
    right_reach = (M + 1) // 2
    left_reach = M // 2
    spans: list[tuple[int, int, int]] = []
    for d in range(1, M + 1):
        # anchors taking their d-th right neighbor
        if d <= right_reach:
            spans.append((d, 0, n - d))
        else:
            spans.append((d, 0, M - d + 1))
        # anchors taking their d-th left neighbor, re-expressed from the left end
        if d <= left_reach:
            spans.append((d, 0, n - d))
        else:
            spans.append((d, n - 1 - M, n - d))
    return spans


def symmetric_min_sum(rs: np.ndarray, M: int) -> int:
    """Raw symmetric-neighbor statistic: sum of min ranks over all incidences."""
    v = rs.astype(np.int64, copy=False)
    total = 0
    for d, lo, hi in symmetric_neighbor_spans(rs.size, M):
        total += int(np.minimum(v[lo:hi], v[lo + d:hi + d]).sum())
    return total


def batch_symmetric_min_sums(rows: np.ndarray, M: int) -> np.ndarray:
    """Row-wise symmetric-neighbor min sums; see :func:`symmetric_min_sum`."""
    k, n = rows.shape
    out = np.zeros(k, dtype=np.int64)
    for d, lo, hi in symmetric_neighbor_spans(n, M):
        out += np.minimum(rows[:, lo:hi], rows[:, lo + d:hi + d]).sum(axis=1, dtype=np.int64)
    return out


def xi_denominator(n: int, M: int) -> int:
    """Exact integer 4 * (n+1) * (nM + M(M+1)/4)."""
    return (n + 1) * (4 * n * M + M * (M + 1))


def xi_from_min_sum(S: int, n: int, M: int) -> float:
    """-2 + 24*S / denominator, as a single correctly rounded float division."""
    return -2.0 + (24 * S) / xi_denominator(n, M)


def xi_fraction_from_min_sum(S: int, n: int, M: int) -> Fraction:
    return Fraction(24 * S, xi_denominator(n, M)) - 2


# ---------------------------------------------------------------------------
# coefficients


def chatterjee_xi(s: Sample) -> CoefficientValue:
    """Classic right-neighbor rank correlation, 1 - 3*sum|dR| / (n^2 - 1).

    The sum runs over consecutive rank differences in ascending-x order; the
    largest x pairs with itself and contributes nothing.
    """
    rs = sorted_y_ranks(s)
    n = rs.size
    jumps = int(np.abs(np.diff(rs)).sum())
    value = 1.0 - (3 * jumps) / (n * n - 1)
    return CoefficientValue(value=value, method=Method.XI_CLASSIC, n=n)


def xi_nm(s: Sample, M: int) -> CoefficientValue:
    """Rank correlation using each point's M right nearest neighbors.

    Normalized so the expectation under independence is exactly zero for any
    M in 1..n-1. Cost is O(n log n + n M).
    """
    rs = sorted_y_ranks(s)
    M = validate_neighbor_count(rs.size, M)
    value = xi_from_min_sum(min_rank_sum(rs, M), rs.size, M)
    return CoefficientValue(value=value, method=Method.XI_NM, n=rs.size, M=M)


def xi_nm_from_ranks(r: Sequence[int], ord: Optional[XOrder], M: int) -> CoefficientValue:
    """Same statistic as :func:`xi_nm`, evaluated from precomputed ranks.

    `ord` sorts the x coordinate; pass None for the identity order, which is
    the null-replicate fast path where the m-th right neighbor of index i is
    simply i+m.
    """
    arr = np.asarray(r, dtype=np.int64)
    if not is_rank_permutation(arr):
        raise SizeError("r must be a permutation of 1..n")
    rs = arr if ord is None else arr[ord.order]
    M = validate_neighbor_count(rs.size, M)
    value = xi_from_min_sum(min_rank_sum(rs, M), rs.size, M)
    return CoefficientValue(value=value, method=Method.XI_NM, n=rs.size, M=M)


def xi_nm_reflected(s: Sample, M: int) -> CoefficientValue:
    """:func:`xi_nm` on (x, -y), computed by rank reflection without re-sorting."""
    rs = sorted_y_ranks(s)
    M = validate_neighbor_count(rs.size, M)
    value = xi_from_min_sum(min_rank_sum(reflect_ranks(rs), M), rs.size, M)
    return CoefficientValue(value=value, method=Method.XI_NM_REFLECTED, n=rs.size, M=M)


def xi_pm(s: Sample, M: int) -> CoefficientValue:
    """Max of :func:`xi_nm` on (x, y) and on (x, -y); the two-direction test statistic."""
    rs = sorted_y_ranks(s)
    M = validate_neighbor_count(rs.size, M)
    n = rs.size
    best = max(min_rank_sum(rs, M), min_rank_sum(reflect_ranks(rs), M))
    return CoefficientValue(value=xi_from_min_sum(best, n, M), method=Method.XI_PM, n=n, M=M)


def symmetric_nn_sum(s: Sample, M: int) -> CoefficientValue:
    """Raw min-rank sum over each point's M nearest x-rank neighbors, both sides.

    Distance ties prefer the right neighbor, so at M=1 every point takes its
    right neighbor except the largest x. The statistic is left uncentered;
    calibrate it by permutation (any affine normalization would cancel).
    """
    rs = sorted_y_ranks(s)
    M = validate_neighbor_count(rs.size, M)
    value = float(symmetric_min_sum(rs, M))
    return CoefficientValue(value=value, method=Method.SYMMETRIC_NN, n=rs.size, M=M)


def pearson_r(s: Sample) -> CoefficientValue:
    """Sample Pearson correlation; requires n >= 3 and nonzero variances."""
    if s.n < 3:
        raise SizeError(f"Pearson correlation needs n >= 3, got {s.n}")
    dx = s.x - s.x.mean()
    dy = s.y - s.y.mean()
    denom = math.sqrt(float((dx * dx).sum()) * float((dy * dy).sum()))
    if denom == 0.0:
        raise DegenerateError("zero variance in a coordinate")
    value = min(1.0, max(-1.0, float((dx * dy).sum()) / denom))
    return CoefficientValue(value=value, method=Method.PEARSON, n=s.n)


def _quadrant_counts(rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    """c_i = #{j : rx_j < rx_i and ry_j < ry_i}, blockwise to bound memory."""
    n = rx.size
    c = np.empty(n, dtype=np.int64)
    block = max(1, 2_000_000 // max(n, 1))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        c[lo:hi] = (
            (rx[None, :] < rx[lo:hi, None]) & (ry[None, :] < ry[lo:hi, None])
        ).sum(axis=1)
    return c


def hoeffding_numerator(rx: np.ndarray, ry: np.ndarray) -> int:
    """Exact integer numerator A - 2(n-2)B + (n-2)(n-3)C of the D statistic."""
    n = rx.size
    c = _quadrant_counts(rx, ry)
    lx, ly, lc = rx.tolist(), ry.tolist(), c.tolist()
    A = sum((a - 1) * (a - 2) * (b - 1) * (b - 2) for a, b in zip(lx, ly))
    B = sum((a - 2) * (b - 2) * q for a, b, q in zip(lx, ly, lc))
    C = sum(q * (q - 1) for q in lc)
    return A - 2 * (n - 2) * B + (n - 2) * (n - 3) * C


def hoeffding_denominator(n: int) -> int:
    return n * (n - 1) * (n - 2) * (n - 3) * (n - 4)


def hoeffding_d(s: Sample) -> CoefficientValue:
    """Hoeffding's dependence statistic from coordinate ranks and quadrant counts.

    Unscaled convention: the population functional ranges over [-1/60, 1/30],
    with 0 under independence. Requires tie-free data and n >= 5.
    """
    if s.n < 5:
        raise SizeError(f"Hoeffding's D needs n >= 5, got {s.n}")
    rx = compute_ranks(s.x)
    ry = compute_ranks(s.y)
    value = hoeffding_numerator(rx, ry) / hoeffding_denominator(s.n)
    return CoefficientValue(value=value, method=Method.HOEFFDING_D, n=s.n)


# ---------------------------------------------------------------------------
# population measure for the Gaussian rotation model


@lru_cache(maxsize=256)
def _population_xi_value(rho: float, tol: float) -> float:
    sig = math.sqrt(1.0 - rho * rho)
    sqrt2pi = math.sqrt(2.0 * math.pi)

    def phi(t: float) -> float:
        return math.exp(-0.5 * t * t) / sqrt2pi

    def sf(t: float) -> float:
        return float(ndtr(-t))

    def conditional_sf_sq_mean(y: float) -> float:
        # E_x[(P(Y >= y | X = x))**2] with x ~ N(0,1)
        def f(x: float) -> float:
            return sf((y - rho * x) / sig) ** 2 * phi(x)

        val, _ = integrate.quad(f, -np.inf, np.inf, epsabs=tol * 1e-2, limit=200)
        return val

    def integrand(y: float) -> float:
        # Var_x P(Y >= y | X = x), weighted by the marginal density of y
        return (conditional_sf_sq_mean(y) - sf(y) ** 2) * phi(y)

    num, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=tol * 1e-1, limit=200)
    return 6.0 * num


def gaussian_population_xi(rho: float, tol: float = 1e-9) -> PopulationXi:
    """Population dependence measure of a standard bivariate normal.

    Evaluates the variance-of-conditional-survival functional by nested
    adaptive quadrature; the marginal-variance denominator is exactly 1/6, so
    only the numerator is integrated. Even in rho, 0 at independence.
    """
    if not -1.0 < rho < 1.0:
        raise RhoRangeError(f"rho must lie in (-1, 1), got {rho}")
    if rho == 0.0:
        return PopulationXi(rho=0.0, xi=0.0, quadrature_tolerance=tol)
    return PopulationXi(rho=float(rho), xi=_population_xi_value(abs(float(rho)), tol),
                        quadrature_tolerance=tol)


# ---------------------------------------------------------------------------
# finite-sample range


def extremal_bounds_exact(n: int, M: int) -> tuple[Fraction, Fraction]:
    """Exact (upper, lower) attainable range of the M-neighbor coefficient."""
    validate_neighbor_count(n, M)
    upper = 1 - Fraction(3 * (M + 1), 4 * n + M + 1)
    lower = Fraction(-1, 2) + Fraction(3 * (4 * n - (n + 1) * (M + 1)),
                                       2 * (n + 1) * (4 * n + M + 1))
    return upper, lower


def extremal_bounds(n: int, M: int) -> tuple[float, float]:
    """Float (upper, lower) range bounds; see :func:`extremal_bounds_exact`."""
    upper, lower = extremal_bounds_exact(n, M)
    return float(upper), float(lower)


def monotone_extremal_values_exact(n: int, M: int) -> tuple[Fraction, Fraction]:
    """Exact coefficient when y is a strictly increasing resp. decreasing
    function of x. The increasing case coincides with the upper range bound."""
    validate_neighbor_count(n, M)
    increasing = 1 - Fraction(3 * (M + 1), 4 * n + M + 1)
    decreasing = 1 - Fraction((M + 1) * (15 * n - 8 * M - 1), (n + 1) * (4 * n + M + 1))
    return increasing, decreasing


def xi_nm_exact(s: Sample, M: int) -> Fraction:
    """Exact rational value of the statistic :func:`xi_nm` evaluates."""
    rs = sorted_y_ranks(s)
    M = validate_neighbor_count(rs.size, M)
    return xi_fraction_from_min_sum(min_rank_sum(rs, M), rs.size, M)
