"""Faure's phi/psi functions and the exact discrepancy series of permuted
van der Corput sequences.

On the cell ``[(k-1)/b, k/b)`` every ``phi_{b,h}`` is affine with integer
slope and intercept, so the envelopes psi+ = max_h phi_h and
psi- = max_h (-phi_h) are built cell by cell as exact upper hulls of lines.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm

from .discrepancy import DiscrepancyReport
from .family import Permutation, as_permutation
from .pwa import PiecewiseAffine, upper_envelope_of_lines


def _perm(b: int, sigma) -> Permutation:
    s = Permutation.identity(b) if sigma is None else as_permutation(sigma)
    if s.base != b:
        raise ValueError(f"permutation has size {s.base}, base is {b}")
    return s


def prefix_counts(images: tuple[int, ...]) -> list[list[int]]:
    """``table[k][h]`` = number of ``i < k`` with ``sigma(i) < h``."""
    b = len(images)
    table = [[0] * (b + 1)]
    for k in range(1, b + 1):
        row = table[-1][:]
        v = images[k - 1]
        for h in range(v + 1, b + 1):
            row[h] += 1
        table.append(row)
    return table


def phi_lines(images: tuple[int, ...], table, k: int) -> list[tuple[int, int]]:
    """``(slope, intercept)`` of every ``phi_{b,h}`` on cell ``k`` (1-based)."""
    b = len(images)
    top = images[k - 1]
    row = table[k]
    lines = []
    for h in range(b):
        below = row[h]
        if h <= top:
            lines.append((-h, below))
        else:
            lines.append((b - h, -(k - below)))
    return lines


def phi_function(b: int, sigma, h: int) -> PiecewiseAffine:
    if not 0 <= h < b:
        raise ValueError(f"h must lie in [0, {b})")
    s = _perm(b, sigma)
    table = prefix_counts(s.images)
    pts = []
    for k in range(1, b + 1):
        slope, icpt = phi_lines(s.images, table, k)[h]
        lo, hi = Fraction(k - 1, b), Fraction(k, b)
        pts.append((lo, slope * lo + icpt))
        pts.append((hi, slope * hi + icpt))
    return PiecewiseAffine.from_points(pts)


@lru_cache(maxsize=4096)
def _psi(images: tuple[int, ...]) -> tuple[PiecewiseAffine, PiecewiseAffine, PiecewiseAffine]:
    b = len(images)
    table = prefix_counts(images)
    plus, minus = [], []
    for k in range(1, b + 1):
        lines = phi_lines(images, table, k)
        lo, hi = Fraction(k - 1, b), Fraction(k, b)
        plus.extend(upper_envelope_of_lines(lines, lo, hi))
        minus.extend(upper_envelope_of_lines([(-s, -c) for s, c in lines], lo, hi))
    p = PiecewiseAffine.from_points(plus)
    m = PiecewiseAffine.from_points(minus)
    return p, m, p + m


def psi_functions(b: int, sigma=None):
    """Return ``(psi_plus, psi_minus, psi)`` as canonical exact functions."""
    return _psi(_perm(b, sigma).images)


def psi(b: int, sigma=None) -> PiecewiseAffine:
    return psi_functions(b, sigma)[2]


def _check_first_cell(b: int, s: Permutation, plus: PiecewiseAffine, minus: PiecewiseAffine):
    # the closed tail relies on psi+ = (b-1)x and psi- = 0 on [0, 1/b]
    x = Fraction(1, b)
    if s(0) != 0 or plus(x) != Fraction(b - 1, b) or minus(x) != 0:
        raise ValueError("closed series tail requires sigma(0) = 0")
    if any(bp < x for bp in plus.breakpoints[1:]) or any(bp < x for bp in minus.breakpoints[1:]):
        raise ValueError("psi is not affine on the first cell")


def faure_discrepancy_series(b: int, sigma, n: int) -> tuple[Fraction, Fraction, Fraction]:
    """``(N*D_N, N*D_N^+, N*D_N^-)`` of the first ``n`` points of ``S_b^sigma``.

    The series ``sum_{j>=1} psi(n / b^j)`` is summed exactly: with
    ``J = floor(log_b n) + 1`` every argument beyond ``j = J`` lies in
    ``[0, 1/b)`` where ``psi = psi+ = (b-1)x``, and that tail sums to
    ``n / b^J``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    s = _perm(b, sigma)
    plus, minus, _ = _psi(s.images)
    _check_first_cell(b, s, plus, minus)
    J = 1
    while b ** J <= n:
        J += 1
    dp = Fraction(0)
    dm = Fraction(0)
    for j in range(1, J + 1):
        x = Fraction(n % b ** j, b ** j)
        dp += plus(x)
        dm += minus(x)
    dp += Fraction(n, b ** J)
    return dp + dm, dp, dm


def faure_series_table(b: int, sigma, n_max: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    """:func:`faure_discrepancy_series` for every ``n = 1..n_max`` in one pass.

    Arguments ``n / b^j mod 1`` are deduplicated and evaluated with one sorted
    sweep per scale ``j``.
    """
    if n_max < 1:
        return []
    s = _perm(b, sigma)
    plus, minus, _ = _psi(s.images)
    _check_first_cell(b, s, plus, minus)
    J_max = 1
    while b ** J_max <= n_max:
        J_max += 1
    scales = []
    for j in range(1, J_max + 1):
        bj = b ** j
        # only n >= b^(j-1) reach scale j before the closed tail takes over
        lo = b ** (j - 1)
        residues = sorted({n % bj for n in range(lo, n_max + 1)})
        xs = [Fraction(r, bj) for r in residues]
        scales.append((bj, lo, residues, plus.values_at_sorted(xs), minus.values_at_sorted(xs)))
    # accumulate integers over a common denominator
    den = b ** J_max
    for _, _, _, vp, vm in scales:
        den = lcm(den, *(v.denominator for v in vp), *(v.denominator for v in vm))
    dp = [0] * (n_max + 1)
    dm = [0] * (n_max + 1)
    for bj, lo, residues, vp, vm in scales:
        ip = {r: v.numerator * (den // v.denominator) for r, v in zip(residues, vp)}
        im = {r: v.numerator * (den // v.denominator) for r, v in zip(residues, vm)}
        for n in range(lo, n_max + 1):
            r = n % bj
            dp[n] += ip[r]
            dm[n] += im[r]
    out = []
    bJ = b
    for n in range(1, n_max + 1):
        if bJ <= n:
            bJ *= b
        p = Fraction(dp[n] + n * (den // bJ), den)
        m = Fraction(dm[n], den)
        out.append((p + m, p, m))
    return out


def faure_report(b: int, sigma, n: int) -> DiscrepancyReport:
    d, dp, dm = faure_discrepancy_series(b, sigma, n)
    return DiscrepancyReport(n=n, d_extreme=d / n, d_plus=dp / n, d_minus=dm / n,
                             method="faure-series", error_bound=0.0)


def F_m(b: int, sigma, m: int) -> PiecewiseAffine:
    """``F_m(x) = sum_{j<m} psi(x * b^j)`` on [0, 1]."""
    if m < 1:
        raise ValueError("m must be >= 1")
    base = psi(b, sigma)
    total = base
    for j in range(1, m):
        total = total + base.compose_multiple(b ** j)
    return total


def F_m_and_alpha(b: int, sigma=None, m_max: int = 16,
                  max_breakpoints: int = 2 ** 22) -> list[tuple[int, Fraction]]:
    """``[(m, max_x F_m(x) / m)]`` for ``m = 1..m_max``.

    The sequence is an upper bound for Faure's asymptotic constant alpha and
    is non-increasing.  ``F_m = psi + F_{m-1}(b x mod 1)`` is built
    incrementally, so the cost is linear in the breakpoint count of F_m.
    """
    base = psi(b, sigma)
    out = []
    total = base
    for m in range(1, m_max + 1):
        if m > 1:
            if len(total.breakpoints) * b > max_breakpoints:
                raise OverflowError(f"F_{m} would exceed {max_breakpoints} breakpoints")
            total = base + total.compose_multiple(b)
        out.append((m, total.max_value() / m))
    return out


def off_grid_local_maxima(b: int, sigma=None) -> list[Fraction]:
    """Local maxima of psi whose argument is not of the form k/b."""
    return [x for x in psi(b, sigma).local_maxima() if (x * b).denominator != 1]


def psi_csv(b: int, sigma, resolution: int) -> str:
    """Sampled ``x, psi+, psi-, psi`` rows for plotting."""
    plus, minus, total = psi_functions(b, sigma)
    xs = [Fraction(i, resolution) for i in range(resolution + 1)]
    cols = [f.values_at_sorted(xs) for f in (plus, minus, total)]
    lines = ["x,psi_plus,psi_minus,psi"]
    for i, x in enumerate(xs):
        lines.append(",".join(repr(float(v)) for v in (x, cols[0][i], cols[1][i], cols[2][i])))
    return "\n".join(lines) + "\n"
