"""Exact continuous piecewise-affine functions on [0, 1].

All breakpoints and values are :class:`fractions.Fraction`.  Objects are kept
in canonical form (no breakpoint between two segments of equal slope), so
structural equality is functional equality.
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from heapq import merge
from typing import Iterable, Sequence

Q = Fraction


def _q(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer/decimal string exactly."""
    return Fraction(text.strip())


def format_rational(x: Fraction) -> str:
    x = _q(x)
    return f"{x.numerator}/{x.denominator}"


def _canonical(bps: list, vals: list) -> tuple[tuple, tuple]:
    out_b = [bps[0]]
    out_v = [vals[0]]
    for x, v in zip(bps[1:], vals[1:]):
        if len(out_b) >= 2:
            x0, x1 = out_b[-2], out_b[-1]
            v0, v1 = out_v[-2], out_v[-1]
            if (v1 - v0) * (x - x1) == (v - v1) * (x1 - x0):
                out_b[-1] = x
                out_v[-1] = v
                continue
        out_b.append(x)
        out_v.append(v)
    return tuple(out_b), tuple(out_v)


def _union(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = []
    for x in merge(a, b):
        if not out or x != out[-1]:
            out.append(x)
    return out


class PiecewiseAffine:
    """Continuous piecewise-affine function on [0, 1], extended with period 1.

    Parameters
    ----------
    breakpoints : sequence of rationals
        Strictly increasing, starting at 0 and ending at 1.
    values : sequence of rationals
        Function values at the breakpoints.
    """

    __slots__ = ("breakpoints", "values", "_hash")

    def __init__(self, breakpoints: Iterable, values: Iterable, canonical: bool = True):
        bps = [_q(b) for b in breakpoints]
        vals = [_q(v) for v in values]
        if len(bps) != len(vals) or len(bps) < 2:
            raise ValueError("need at least two breakpoints with matching values")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        for x0, x1 in zip(bps, bps[1:]):
            if not x0 < x1:
                raise ValueError("breakpoints must be strictly increasing")
        if canonical:
            self.breakpoints, self.values = _canonical(bps, vals)
        else:
            self.breakpoints, self.values = tuple(bps), tuple(vals)
        self._hash = None

    @classmethod
    def constant(cls, c=0) -> "PiecewiseAffine":
        return cls((0, 1), (c, c))

    @classmethod
    def from_points(cls, points: Iterable[tuple]) -> "PiecewiseAffine":
        """Build from ``(x, value)`` pairs; repeated x must carry equal values."""
        bps, vals = [], []
        for x, v in points:
            x, v = _q(x), _q(v)
            if bps and x == bps[-1]:
                if v != vals[-1]:
                    raise ValueError(f"discontinuity at x={x}: {vals[-1]} != {v}")
                continue
            bps.append(x)
            vals.append(v)
        return cls(bps, vals)

    # evaluation -----------------------------------------------------------

    def __call__(self, x) -> Fraction:
        x = _q(x)
        if x < 0 or x > 1:
            x = x % 1
        bps = self.breakpoints
        i = bisect_right(bps, x) - 1
        if i >= len(bps) - 1:
            return self.values[-1]
        x0, x1 = bps[i], bps[i + 1]
        v0, v1 = self.values[i], self.values[i + 1]
        if x == x0:
            return v0
        return v0 + (v1 - v0) * (x - x0) / (x1 - x0)

    def values_at_sorted(self, xs: Sequence[Fraction]) -> list[Fraction]:
        """Evaluate at increasing points of [0, 1] in one sweep."""
        bps, vals = self.breakpoints, self.values
        bn = [b.numerator for b in bps]
        bd = [b.denominator for b in bps]
        out = []
        i = 0
        last = len(bps) - 1
        for x in xs:
            xn, xd = x.numerator, x.denominator
            while i < last - 1 and bn[i + 1] * xd <= xn * bd[i + 1]:
                i += 1
            if xn * bd[i] == bn[i] * xd:
                out.append(vals[i])
                continue
            if xn * bd[i + 1] == bn[i + 1] * xd:
                out.append(vals[i + 1])
                continue
            # v0 + (v1 - v0) * (x - x0) / (x1 - x0) with a single normalization
            v0, v1 = vals[i], vals[i + 1]
            dv = v1 - v0
            dx = bps[i + 1] - bps[i]
            sn, sd = dv.numerator * dx.denominator, dv.denominator * dx.numerator
            num = v0.numerator * sd * xd * bd[i] + sn * v0.denominator * (xn * bd[i] - bn[i] * xd)
            den = v0.denominator * sd * xd * bd[i]
            out.append(Fraction(num, den))
        return out

    def slopes(self) -> list[Fraction]:
        b, v = self.breakpoints, self.values
        return [(v[i + 1] - v[i]) / (b[i + 1] - b[i]) for i in range(len(b) - 1)]

    # arithmetic -----------------------------------------------------------

    def _binary(self, other: "PiecewiseAffine", op) -> "PiecewiseAffine":
        xs = _union(self.breakpoints, other.breakpoints)
        a = self.values_at_sorted(xs)
        b = other.values_at_sorted(xs)
        return PiecewiseAffine(xs, [op(u, w) for u, w in zip(a, b)])

    def __add__(self, other: "PiecewiseAffine") -> "PiecewiseAffine":
        return self._binary(other, lambda u, w: u + w)

    def __sub__(self, other: "PiecewiseAffine") -> "PiecewiseAffine":
        return self._binary(other, lambda u, w: u - w)

    def __neg__(self) -> "PiecewiseAffine":
        return PiecewiseAffine(self.breakpoints, [-v for v in self.values], canonical=False)

    def scale(self, c) -> "PiecewiseAffine":
        c = _q(c)
        return PiecewiseAffine(self.breakpoints, [c * v for v in self.values])

    def maximum(self, other: "PiecewiseAffine") -> "PiecewiseAffine":
        """Pointwise maximum, with exact crossing points inserted."""
        xs = _union(self.breakpoints, other.breakpoints)
        a = self.values_at_sorted(xs)
        b = other.values_at_sorted(xs)
        pts = []
        for i, x in enumerate(xs):
            if i:
                d0, d1 = a[i - 1] - b[i - 1], a[i] - b[i]
                if (d0 < 0 < d1) or (d1 < 0 < d0):
                    x0 = xs[i - 1]
                    t = x0 + (x - x0) * d0 / (d0 - d1)
                    pts.append((t, a[i - 1] + (a[i] - a[i - 1]) * (t - x0) / (x - x0)))
            pts.append((x, max(a[i], b[i])))
        return PiecewiseAffine.from_points(pts)

    def compose_multiple(self, c: int) -> "PiecewiseAffine":
        """Return ``x -> f(c*x mod 1)`` for a positive integer ``c``."""
        if c < 1 or int(c) != c:
            raise ValueError("c must be a positive integer")
        if c == 1:
            return self
        if self.values[0] != self.values[-1]:
            raise ValueError("periodic rescaling needs f(0) == f(1)")
        bps, vals = [], []
        for i in range(c):
            start = 0 if i == 0 else 1
            bps.extend((i + b) / c for b in self.breakpoints[start:])
            vals.extend(self.values[start:])
        return PiecewiseAffine(bps, vals, canonical=False)

    def reflect(self) -> "PiecewiseAffine":
        """Return ``x -> f(1 - x)``."""
        return PiecewiseAffine(
            [1 - b for b in reversed(self.breakpoints)], list(reversed(self.values)),
            canonical=False,
        )

    # summaries ------------------------------------------------------------

    def max_value(self) -> Fraction:
        return max(self.values)

    def min_value(self) -> Fraction:
        return min(self.values)

    def argmax(self) -> list[Fraction]:
        m = self.max_value()
        return [b for b, v in zip(self.breakpoints, self.values) if v == m]

    def local_maxima(self) -> list[Fraction]:
        """Breakpoints where the slope changes from positive to non-positive
        (or non-negative to negative), treating the function as 1-periodic."""
        s = self.slopes()
        out = []
        for i in range(len(self.breakpoints) - 1):
            left = s[i - 1] if i else s[-1]
            right = s[i]
            if left > 0 and right < 0:
                out.append(self.breakpoints[i])
        return out

    # comparison / serialization -------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewiseAffine):
            return NotImplemented
        return self.breakpoints == other.breakpoints and self.values == other.values

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.breakpoints, self.values))
        return self._hash

    def __repr__(self) -> str:
        pts = ", ".join(f"({format_rational(b)}, {format_rational(v)})"
                        for b, v in zip(self.breakpoints, self.values))
        return f"PiecewiseAffine([{pts}])"

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "values": [format_rational(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PiecewiseAffine":
        return cls([parse_rational(s) for s in data["breakpoints"]],
                   [parse_rational(s) for s in data["values"]])

    def sample(self, resolution: int) -> list[tuple[Fraction, Fraction]]:
        xs = [Fraction(i, resolution) for i in range(resolution + 1)]
        return list(zip(xs, self.values_at_sorted(xs)))


def upper_envelope_of_lines(lines: Sequence[tuple[int, int]], lo: Fraction, hi: Fraction):
    """Upper envelope of lines ``y = s*x + c`` with integer ``s, c`` on ``[lo, hi]``.

    Returns the list of ``(x, y)`` vertices from ``lo`` to ``hi``.
    """
    best: dict[int, int] = {}
    for s, c in lines:
        if s not in best or c > best[s]:
            best[s] = c
    hull: list[tuple[int, int]] = []
    for s in sorted(best):
        c = best[s]
        while len(hull) >= 2:
            s1, c1 = hull[-2]
            s2, c2 = hull[-1]
            # middle line is dominated once line 3 overtakes line 1 no later than line 2 does
            if (c1 - c) * (s2 - s1) <= (c1 - c2) * (s - s1):
                hull.pop()
            else:
                break
        hull.append((s, c))
    cuts = [Fraction(hull[i][1] - hull[i + 1][1], hull[i + 1][0] - hull[i][0])
            for i in range(len(hull) - 1)]
    i = 0
    while i < len(cuts) and cuts[i] <= lo:
        i += 1
    s, c = hull[i]
    pts = [(lo, s * lo + c)]
    while i < len(cuts) and cuts[i] < hi:
        x = cuts[i]
        pts.append((x, s * x + c))
        i += 1
        s, c = hull[i]
    pts.append((hi, s * hi + c))
    return pts
