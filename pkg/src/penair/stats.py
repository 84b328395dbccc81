"""Rank statistics for comparing feature distributions between two cohorts.

Mann-Whitney U with midranks for ties. Two routes to a two-sided p-value:

* exact_p: the probability, over all C(n_a + n_b, n_a) assignments of the
  pooled values to the two groups, of a U at least as far from the null mean
  n_a * n_b / 2 as observed. Computed as an exact rational by counting
  assignments per tie group rather than iterating them one by one.
* approx_p: normal approximation with continuity correction 0.5 and the
  tie-corrected variance n_a*n_b/12 * ((N+1) - sum(t^3 - t) / (N * (N-1))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .errors import EmptyCohortError, ExactSizeError
from .features import Feature, FeatureVector

# fixed significance level; exact Fraction so p == 0.05 is never significant
ALPHA = Fraction(1, 20)

DEFAULT_EXACT_LIMIT = 20


@dataclass(frozen=True)
class UStat:
    """U statistics for both groups plus the pooled tie structure.

    ``tie_profile`` holds the size of every tie group in the pooled sample,
    in ascending value order; untied values contribute groups of size 1.
    """

    u_a: float
    u_b: float
    n_a: int
    n_b: int
    tie_profile: tuple[int, ...]


@dataclass(frozen=True)
class RankTestResult:
    task: str
    feature: Feature
    u: UStat
    p: Fraction | float
    method: str  # "exact" or "approx"
    significant: bool


def midranks(values: Sequence) -> list[float]:
    """Ranks with tied values sharing the mean of their rank positions.

    midranks([5, 1, 3]) == [3.0, 1.0, 2.0]; midranks([2, 2]) == [1.5, 1.5].
    """
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def mann_whitney_u(a: Sequence, b: Sequence) -> UStat:
    """U for both groups via the rank-sum formula U_A = R_A - n_a(n_a+1)/2."""
    n_a, n_b = len(a), len(b)
    if n_a < 1 or n_b < 1:
        raise ValueError("both groups need at least one value")
    pooled = list(a) + list(b)
    ranks = midranks(pooled)
    r_a = sum(ranks[:n_a])
    u_a = r_a - n_a * (n_a + 1) / 2
    return UStat(
        u_a=u_a,
        u_b=n_a * n_b - u_a,
        n_a=n_a,
        n_b=n_b,
        tie_profile=_tie_profile(sorted(pooled)),
    )


def _tie_profile(pooled_sorted: list) -> tuple[int, ...]:
    sizes = []
    i = 0
    while i < len(pooled_sorted):
        j = i
        while j + 1 < len(pooled_sorted) and pooled_sorted[j + 1] == pooled_sorted[i]:
            j += 1
        sizes.append(j - i + 1)
        i = j + 1
    return tuple(sizes)


@lru_cache(maxsize=None)
def _doubled_u_counts(sizes: tuple[int, ...], n_a: int) -> tuple[tuple[int, int], ...]:
    """Null distribution of 2*U_A over all n_a-subsets of a pooled multiset.

    Only the tie-group sizes matter: group g (size t_g) occupies the next t_g
    sorted positions, so its doubled midrank is 2*offset + t_g + 1. Choosing
    j_g values from group g contributes j_g * that midrank to the doubled rank
    sum, with multiplicity C(t_g, j_g). Doubling keeps everything integral.
    Returns (doubled U, count) pairs; counts sum to C(sum(sizes), n_a).
    """
    # dp[k] maps doubled rank sum -> number of ways to pick k values so far
    dp: list[dict[int, int]] = [{} for _ in range(n_a + 1)]
    dp[0][0] = 1
    offset = 0
    for size in sizes:
        m2 = 2 * offset + size + 1
        ndp: list[dict[int, int]] = [{} for _ in range(n_a + 1)]
        for k, row in enumerate(dp):
            if not row:
                continue
            top = min(size, n_a - k)
            for j in range(top + 1):
                weight = comb(size, j)
                shift = j * m2
                target = ndp[k + j]
                for s2, ways in row.items():
                    key = s2 + shift
                    target[key] = target.get(key, 0) + ways * weight
        dp = ndp
        offset += size
    base = n_a * (n_a + 1)
    return tuple(sorted((s2 - base, ways) for s2, ways in dp[n_a].items()))


def exact_p(a: Sequence, b: Sequence, exact_limit: int = DEFAULT_EXACT_LIMIT) -> Fraction:
    """Exact two-sided p over every group assignment of the pooled values.

    p = P(|U - n_a*n_b/2| >= observed deviation) with ties kept as they are
    in the pooled multiset. Raises ExactSizeError when n_a + n_b exceeds
    ``exact_limit``.
    """
    n_a, n_b = len(a), len(b)
    if n_a < 1 or n_b < 1:
        raise ValueError("both groups need at least one value")
    n = n_a + n_b
    if n > exact_limit:
        raise ExactSizeError(f"pooled size {n} exceeds exact limit {exact_limit}")
    pooled = sorted(list(a) + list(b))
    # doubled midrank per distinct value, in value order
    value_m2: dict = {}
    sizes = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and pooled[j + 1] == pooled[i]:
            j += 1
        value_m2[pooled[i]] = i + j + 2  # (i+1) + (j+1), 1-based positions
        sizes.append(j - i + 1)
        i = j + 1
    r2_obs = sum(value_m2[v] for v in a)
    u2_obs = r2_obs - n_a * (n_a + 1)
    deviation = abs(u2_obs - n_a * n_b)  # doubled |U_A - mu|
    counts = _doubled_u_counts(tuple(sizes), n_a)
    extreme = sum(ways for u2, ways in counts if abs(u2 - n_a * n_b) >= deviation)
    return Fraction(extreme, comb(n, n_a))


def approx_p(u: UStat) -> float:
    """Two-sided normal approximation with continuity correction.

    z is clamped at zero, so a U at (or within half a tick of) the null mean
    gives p = 1.0; an all-tied pool has zero variance and also gives 1.0.
    """
    n_a, n_b = u.n_a, u.n_b
    n = n_a + n_b
    mu = n_a * n_b / 2
    tie_sum = sum(t**3 - t for t in u.tie_profile)
    variance = (n_a * n_b / 12) * ((n + 1) - tie_sum / (n * (n - 1)))
    if variance <= 0:
        return 1.0
    z = (abs(u.u_a - mu) - 0.5) / math.sqrt(variance)
    if z < 0:
        z = 0.0
    return math.erfc(z / math.sqrt(2))


def compare_cohorts(
    features_a: Sequence[FeatureVector],
    features_b: Sequence[FeatureVector],
    task: str,
    feature: Feature,
    exact_limit: int = DEFAULT_EXACT_LIMIT,
) -> RankTestResult:
    """Mann-Whitney test on one feature between two cohorts.

    Anomalous files are excluded; vectors with a source are filtered to the
    given task, unlabeled vectors are taken as already filtered. Uses the
    exact p while the pooled size stays within ``exact_limit``, the normal
    approximation beyond it. Raises EmptyCohortError when either side ends up
    empty.
    """
    xs = _extract(features_a, task, feature)
    ys = _extract(features_b, task, feature)
    if not xs or not ys:
        raise EmptyCohortError(
            f"task {task!r}: a cohort is empty after anomaly exclusion"
        )
    u = mann_whitney_u(xs, ys)
    if len(xs) + len(ys) <= exact_limit:
        p: Fraction | float = exact_p(xs, ys, exact_limit)
        method = "exact"
    else:
        p = approx_p(u)
        method = "approx"
    return RankTestResult(
        task=task,
        feature=feature,
        u=u,
        p=p,
        method=method,
        significant=p < ALPHA,
    )


def _extract(vectors: Sequence[FeatureVector], task: str, feature: Feature) -> list[int]:
    out = []
    for v in vectors:
        if v.anomalous:
            continue
        if v.source is not None and v.source.task != task:
            continue
        out.append(v.value(feature))
    return out
