"""Independence tests and null-moment utilities for the rank coefficients.

The simulation-based test calibrates a statistic against B uniformly drawn
rank permutations, exploiting distribution-freeness under independence; the
reported p-value (1 + #{replicates >= observed}) / (1 + B) is conservative
and valid for any n, B, and M. Replicate statistics are compared to the
observed one on exact integer numerators, so ties are resolved without any
float edge cases.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.special import ndtr
from scipy.stats import t as student_t

from .coefficients import (
    Method,
    batch_min_rank_sums,
    batch_symmetric_min_sums,
    hoeffding_denominator,
    hoeffding_numerator,
    min_rank_sum,
    pearson_r,
    symmetric_min_sum,
    xi_denominator,
    xi_from_min_sum,
    xi_nm,
)
from .errors import ConfigError, RegimeError, SizeError
from .ranks import (
    Sample,
    compute_ranks,
    derive_rng,
    is_rank_permutation,
    reflect_ranks,
    sorted_y_ranks,
    validate_neighbor_count,
)

PERMUTATION_METHODS = (Method.XI_PM, Method.SYMMETRIC_NN, Method.HOEFFDING_D)

# replicate batches are drawn in fixed-size chunks so peak memory stays
# bounded; the chunk rule depends only on (n, B), keeping draws deterministic
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class PermutationTestConfig:
    """Settings for the simulation-based independence test."""

    B: int
    alpha: float
    seed: int
    method: Method = Method.XI_PM
    M: Optional[int] = None

    def __post_init__(self):
        if self.B < 1:
            raise ConfigError(f"B must be >= 1, got {self.B}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.method not in PERMUTATION_METHODS:
            raise ConfigError(f"unsupported permutation-test method {self.method!r}")
        needs_m = self.method in (Method.XI_PM, Method.SYMMETRIC_NN)
        if needs_m and self.M is None:
            raise ConfigError(f"method {self.method.value} requires M")
        if not needs_m and self.M is not None:
            raise ConfigError(f"method {self.method.value} does not take M")


@dataclass(frozen=True)
class TestResult:
    """Outcome of an independence test."""

    statistic: float
    p_value: float
    reject: bool
    method: Method
    n: int
    alpha: float
    M: Optional[int] = None
    B: Optional[int] = None
    seed: Optional[int] = None


@dataclass(frozen=True)
class NullMoments:
    """Exact and asymptotic moments of the M-neighbor coefficient under
    independence. Exact fields come from full permutation enumeration."""

    n: int
    M: int
    mean: Fraction
    variance_exact: Fraction
    variance_asymptotic: float


def _permutation_batches(rng: np.random.Generator, n: int, B: int):
    """Yield (k, n) int32 permutation matrices with rows drawn uniformly."""
    chunk = max(1, min(B, _CHUNK_CELLS // n))
    base = np.arange(1, n + 1, dtype=np.int32)
    done = 0
    while done < B:
        k = min(chunk, B - done)
        mat = np.tile(base, (k, 1))
        rng.permuted(mat, axis=1, out=mat)
        yield mat
        done += k


def permutation_test(s: Sample, cfg: PermutationTestConfig) -> TestResult:
    """Simulation-based independence test; deterministic given cfg.seed.

    Each replicate draws one uniform rank permutation and evaluates the
    statistic on the identity x-order (right neighbors are positions i+m, so
    no sorting is needed); for the two-direction xi statistic the same draw
    also yields the reflected coefficient and the maximum is taken. Cost is
    O(B n M) for the rank statistics.
    """
    n = s.n
    rng = derive_rng(cfg.seed)
    if cfg.method is Method.XI_PM:
        rs = sorted_y_ranks(s)
        M = validate_neighbor_count(n, cfg.M)
        obs_sum = max(min_rank_sum(rs, M), min_rank_sum(reflect_ranks(rs), M))
        statistic = xi_from_min_sum(obs_sum, n, M)
        exceed = 0
        for mat in _permutation_batches(rng, n, cfg.B):
            direct, reflected = batch_min_rank_sums(mat, M)
            exceed += int(np.count_nonzero(np.maximum(direct, reflected) >= obs_sum))
    elif cfg.method is Method.SYMMETRIC_NN:
        rs = sorted_y_ranks(s)
        M = validate_neighbor_count(n, cfg.M)
        obs_sum = symmetric_min_sum(rs, M)
        statistic = float(obs_sum)
        exceed = 0
        for mat in _permutation_batches(rng, n, cfg.B):
            exceed += int(np.count_nonzero(batch_symmetric_min_sums(mat, M) >= obs_sum))
    else:  # Hoeffding's D, compared on exact integer numerators
        if n < 5:
            raise SizeError(f"Hoeffding's D needs n >= 5, got {n}")
        rx = compute_ranks(s.x)
        ry = compute_ranks(s.y)
        obs_num = hoeffding_numerator(rx, ry)
        statistic = obs_num / hoeffding_denominator(n)
        identity = np.arange(1, n + 1, dtype=np.int64)
        exceed = 0
        for mat in _permutation_batches(rng, n, cfg.B):
            for row in mat:
                if hoeffding_numerator(identity, row.astype(np.int64)) >= obs_num:
                    exceed += 1
    p_value = (1 + exceed) / (1 + cfg.B)
    return TestResult(
        statistic=statistic,
        p_value=p_value,
        reject=p_value <= cfg.alpha,
        method=cfg.method,
        n=n,
        alpha=cfg.alpha,
        M=cfg.M,
        B=cfg.B,
        seed=cfg.seed,
    )


def asymptotic_test(s: Sample, M: int, alpha: float, override: bool = False) -> TestResult:
    """One-sided normal test of sqrt(nM) * xi against N(0, 2/5).

    The normal limit needs M to grow slower than n**(1/4); the guard
    M**4 <= n enforces a finite-sample proxy of that regime and can be
    overridden explicitly.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    n = s.n
    M = validate_neighbor_count(n, M)
    if M ** 4 > n and not override:
        raise RegimeError(
            f"M**4 = {M ** 4} exceeds n = {n}; the normal approximation is "
            "unreliable here (pass override=True to force)"
        )
    xi = xi_nm(s, M).value
    z = math.sqrt(n * M) * xi / math.sqrt(0.4)
    p_value = max(float(ndtr(-z)), math.ulp(0.0))
    return TestResult(
        statistic=z,
        p_value=p_value,
        reject=p_value <= alpha,
        method=Method.XI_NM,
        n=n,
        alpha=alpha,
        M=M,
    )


def pearson_test(s: Sample, alpha: float) -> TestResult:
    """Two-sided parametric t-test on the Pearson correlation."""
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    r = pearson_r(s).value
    n = s.n
    if abs(r) >= 1.0:
        p_value = math.ulp(0.0)
    else:
        t_stat = r * math.sqrt((n - 2) / (1.0 - r * r))
        p_value = max(2.0 * float(student_t.sf(abs(t_stat), df=n - 2)), math.ulp(0.0))
    return TestResult(
        statistic=r,
        p_value=min(p_value, 1.0),
        reject=p_value <= alpha,
        method=Method.PEARSON,
        n=n,
        alpha=alpha,
    )


def null_variance_asymptotic(n: int, M: int) -> float:
    """Leading-order null variance (2/5)/(nM) + (8/15) M/n**2."""
    M = validate_neighbor_count(n, M)
    return 0.4 / (n * M) + (8.0 / 15.0) * M / (n * n)


def null_moments_enumerate(n: int, M: int) -> NullMoments:
    """Exact null mean and variance by enumerating all n! rank permutations.

    Fixes x at 1..n (the statistic is conditionally distribution-free given
    the x-order, so this loses nothing) and averages in exact rational
    arithmetic. Limited to n <= 8.
    """
    if n > 8:
        raise SizeError(f"enumeration is limited to n <= 8, got {n}")
    if n < 2:
        raise SizeError(f"need n >= 2, got {n}")
    M = validate_neighbor_count(n, M)
    denom = xi_denominator(n, M)
    count = 0
    acc = Fraction(0)
    acc_sq = Fraction(0)
    for perm in itertools.permutations(range(1, n + 1)):
        S = 0
        for i in range(n):
            ri = perm[i]
            for m in range(1, M + 1):
                j = i + m
                S += min(ri, perm[j]) if j < n else ri
        value = Fraction(24 * S, denom) - 2
        acc += value
        acc_sq += value * value
        count += 1
    mean = acc / count
    variance = acc_sq / count - mean * mean
    return NullMoments(
        n=n,
        M=M,
        mean=mean,
        variance_exact=variance,
        variance_asymptotic=null_variance_asymptotic(n, M),
    )


def replicate_statistic_from_permutation(r: Sequence[int], M: int) -> float:
    """Null-replicate statistic straight from a drawn rank permutation.

    Under the identity x-order the m-th right neighbor of index i is i+m (or
    i itself past the end), so the coefficient is evaluated with no sorting.
    """
    arr = np.asarray(r, dtype=np.int64)
    if not is_rank_permutation(arr):
        raise SizeError("r must be a permutation of 1..n")
    M = validate_neighbor_count(arr.size, M)
    return xi_from_min_sum(min_rank_sum(arr, M), arr.size, M)


def permutation_test_fast_path_equivalence(r: Sequence[int], M: int) -> tuple[float, float]:
    """Both routes to a null-replicate statistic: (shortcut, full pipeline).

    The first value skips sorting entirely; the second builds the synthetic
    sample (x_i = i, y_i = r_i) and runs the full coefficient path. The two
    must agree bit-exactly.
    """
    arr = np.asarray(r, dtype=np.int64)
    a = replicate_statistic_from_permutation(arr, M)
    synthetic = Sample(np.arange(1, arr.size + 1, dtype=np.float64),
                       arr.astype(np.float64))
    b = xi_nm(synthetic, M).value
    return a, b
