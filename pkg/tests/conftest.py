from fractions import Fraction

import pytest

from vdcgreedy import kernel_make


@pytest.fixture(scope="session")
def logsin():
    return kernel_make("logsin")


@pytest.fixture(scope="session")
def bernoulli2():
    return kernel_make("bernoulli2")


def brute_discrepancy(points):
    """(N D+, N D-) straight from the definition: every prefix [0, a) and
    [0, a] with a at 0, 1 or a point."""
    pts = [p % 1 for p in points]
    n = len(pts)
    best_plus = best_minus = 0
    for a in set(pts) | {Fraction(0), Fraction(1)} if all(isinstance(p, Fraction) for p in pts) \
            else set(pts) | {0.0, 1.0}:
        open_count = sum(1 for p in pts if p < a)
        closed_count = sum(1 for p in pts if p <= a)
        best_plus = max(best_plus, closed_count - a * n, open_count - a * n)
        best_minus = max(best_minus, a * n - open_count, a * n - closed_count)
    return best_plus, best_minus


def brute_interval_discrepancy(points):
    """sup over [alpha, beta) of |A - (beta - alpha) n|, endpoints at critical values."""
    pts = [p % 1 for p in points]
    n = len(pts)
    crit = sorted(set(pts) | {Fraction(0), Fraction(1)})
    best = 0
    for i, a in enumerate(crit):
        for b in crit[i:]:
            for incl_a in (True, False):
                for incl_b in (False, True):
                    cnt = sum(1 for p in pts
                              if (a <= p if incl_a else a < p) and (p <= b if incl_b else p < b))
                    best = max(best, abs(cnt - (b - a) * n))
    return best
