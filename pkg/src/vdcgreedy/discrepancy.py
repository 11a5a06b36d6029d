"""Definition-level discrepancy of one-dimensional point sets.

With ``R(a) = A([0, a), N) - a*N`` the prefix local discrepancy, ``R`` drops
with slope ``-N`` and jumps up right after every point.  Its supremum is a
right limit at some point and its infimum a left limit, so both are finite
maxima over the points.  The extreme discrepancy over half-open intervals is
``(sup R - inf R) / N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .points import TorusPointSet


@dataclass(frozen=True)
class DiscrepancyReport:
    n: int
    d_extreme: Fraction | float
    d_plus: Fraction | float
    d_minus: Fraction | float
    method: str
    error_bound: float = 0.0

    def to_json(self) -> dict:
        def fmt(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            return float(v)
        return {"n": self.n, "d": fmt(self.d_extreme), "d_plus": fmt(self.d_plus),
                "d_minus": fmt(self.d_minus), "method": self.method,
                "error_bound": self.error_bound}


def _values(X, n: int | None = None) -> list:
    if isinstance(X, TorusPointSet):
        vals = list(X.values())
    else:
        vals = list(X)
    if n is not None:
        if n > len(vals):
            raise ValueError(f"n={n} exceeds the {len(vals)} available points")
        vals = vals[:n]
    return vals


def _check_interval(alpha, beta):
    if not 0 <= alpha < beta <= 1:
        raise ValueError(f"malformed interval [{alpha}, {beta})")


def count_in_interval(X, alpha, beta, n: int) -> int:
    """Number of the first ``n`` points in ``[alpha, beta)``."""
    _check_interval(alpha, beta)
    return sum(1 for x in _values(X, n) if alpha <= x % 1 < beta)


def local_discrepancy_R(X, alpha, beta, n: int):
    """``A([alpha, beta), n) - (beta - alpha) * n``; exact for rational inputs."""
    return count_in_interval(X, alpha, beta, n) - (beta - alpha) * n


def one_sided_counts(X, n: int):
    """``(N*D^+, N*D^-)`` of the first ``n`` points, exact when they are rational."""
    vals = [v % 1 for v in _values(X, n)]
    if n < 1:
        raise ValueError("n must be >= 1")
    if all(isinstance(v, (Fraction, int)) for v in vals):
        return _one_sided_exact(vals, n)
    return _one_sided_float(np.asarray(vals, dtype=float), n)


def _one_sided_exact(vals, n):
    # integer arithmetic over a common denominator
    den = lcm(*(Fraction(v).denominator for v in vals))
    ints = sorted(int(Fraction(v) * den) for v in vals)
    best_plus = 0
    best_minus = 0
    i = 0
    while i < n:
        j = i
        while j < n and ints[j] == ints[i]:
            j += 1
        u = ints[i]
        # right limit at u counts j points, left limit counts i points
        best_plus = max(best_plus, j * den - n * u)
        best_minus = max(best_minus, n * u - i * den)
        i = j
    return Fraction(best_plus, den), Fraction(best_minus, den)


def _one_sided_float(vals, n):
    u = np.sort(vals)
    le = np.searchsorted(u, u, side="right")
    lt = np.searchsorted(u, u, side="left")
    plus = max(0.0, float(np.max(le - n * u)))
    minus = max(0.0, float(np.max(n * u - lt)))
    return plus, minus


def extreme_discrepancy(X, n: int | None = None) -> DiscrepancyReport:
    """``D_n``, ``D_n^+`` and ``D_n^-`` of the first ``n`` points of ``X``."""
    vals = _values(X)
    if n is None:
        n = len(vals)
    if n < 1:
        raise ValueError("n must be >= 1")
    plus, minus = one_sided_counts(vals, n)
    return DiscrepancyReport(n=n, d_extreme=(plus + minus) / n, d_plus=plus / n,
                             d_minus=minus / n, method="geometric", error_bound=0.0)


@dataclass(frozen=True)
class LeVequeBound:
    bound: float
    bracket: float
    truncated_sum: float
    tail: float
    k_max: int


def leveque_bound(X, n: int | None = None, k_max: int = 10_000) -> LeVequeBound:
    """Upper bound ``(6/pi^2 sum_k k^-2 |mean_m exp(2 pi i k x_m)|^2)^(1/3)`` on ``D_n``.

    The series is cut at ``k_max``; each omitted term is at most ``k^-2``, so
    ``6 / (pi^2 k_max)`` is added to the bracket and the result stays a
    rigorous bound.
    """
    vals = _values(X, n)
    if n is None:
        n = len(vals)
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    x = np.asarray([float(v % 1) for v in vals], dtype=float)
    ks = np.arange(1, k_max + 1, dtype=float)
    total = 0.0
    for chunk in np.array_split(ks, max(1, (k_max * len(x)) // 2_000_000 + 1)):
        phase = np.exp(2j * np.pi * np.outer(chunk, x))
        mod2 = np.abs(phase.mean(axis=1)) ** 2
        total += float(np.sum(mod2 / chunk ** 2))
    scale = 6.0 / math.pi ** 2
    tail = scale / k_max
    bracket = scale * total + tail
    return LeVequeBound(bound=bracket ** (1.0 / 3.0), bracket=bracket,
                        truncated_sum=scale * total, tail=tail, k_max=k_max)
