"""Digit expansions, (permuted) radical inverses and van der Corput segments."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .family import Permutation, as_permutation
from .points import TorusPointSet


@dataclass(frozen=True)
class DigitVector:
    """Base-``b`` digits of an integer, least significant first, no trailing zeros."""

    base: int
    digits: tuple[int, ...]

    @property
    def value(self) -> int:
        return sum(a * self.base ** j for j, a in enumerate(self.digits))


def digits_base_b(n: int, b: int) -> DigitVector:
    if b < 2:
        raise ValueError("base must be >= 2")
    if n < 0:
        raise ValueError("n must be non-negative")
    out = []
    while n:
        n, a = divmod(n, b)
        out.append(a)
    return DigitVector(b, tuple(out))


def _sigma(b: int, sigma) -> Permutation:
    if sigma is None:
        return Permutation.identity(b)
    s = as_permutation(sigma)
    if s.base != b:
        raise ValueError(f"permutation has size {s.base}, base is {b}")
    return s


def permuted_radical_inverse(n: int, b: int, sigma=None) -> Fraction:
    """``sum_j sigma(a_j(n)) / b^(j+1)`` as an exact rational.

    When ``sigma(0) != 0`` every zero digit above the leading one contributes,
    and that geometric tail is added in closed form ``sigma(0)/(b-1) * b^-L``.
    The result lies in [0, 1]; it equals 1 only for the all-(b-1) tail.
    """
    s = _sigma(b, sigma)
    digits = digits_base_b(n, b).digits
    L = len(digits)
    num = 0
    for a in digits:
        num = num * b + s(a)
    # num holds the reversed-digit integer sum_j s(a_j) b^(L-1-j)
    value = Fraction(num, b ** L)
    if s(0):
        value += Fraction(s(0), (b - 1) * b ** L)
    return value


def radical_inverse(n: int, b: int = 2) -> Fraction:
    return permuted_radical_inverse(n, b)


def vdc_prefix(n: int, b: int = 2, sigma=None) -> list[Fraction]:
    """The first ``n`` points of the (permuted) van der Corput sequence."""
    s = _sigma(b, sigma)
    return [permuted_radical_inverse(i, b, s) for i in range(n)]


def segment_pattern(n1: int, n2: int, b: int) -> int | None:
    """Return ``m0`` when ``n2 = n1 + b^m0`` with ``b^m0`` dividing ``n1``, else None."""
    d = n2 - n1
    m0 = 0
    while d % b == 0 and d > 1:
        d //= b
        m0 += 1
    if d != 1:
        return None
    if n1 % (b ** m0):
        return None
    return m0


def segment_shift(n1: int, m0: int, b: int, sigma=None) -> Fraction:
    """``sum_j sigma(a_{m_j}(n1)) / b^(m_j+1)`` over the digits of ``n1`` above ``m0``."""
    s = _sigma(b, sigma)
    digits = digits_base_b(n1, b).digits
    return sum((Fraction(s(a), b ** (j + 1)) for j, a in enumerate(digits) if j >= m0 and a),
               Fraction(0))


def vdc_segment(n1: int, n2: int, b: int = 2, sigma=None) -> TorusPointSet:
    """Points ``S_b^sigma(i)`` for ``n1 <= i < n2``, in index order.

    If the indices form a self-similar block (``n2 - n1 = b^m0`` dividing
    ``n1``) and ``sigma(0) = 0``, the block is checked to be the grid
    ``{j / b^m0}`` translated by :func:`segment_shift`.
    """
    if not n2 > n1 >= 0:
        raise ValueError("need n2 > n1 >= 0")
    s = _sigma(b, sigma)
    pts = [permuted_radical_inverse(i, b, s) for i in range(n1, n2)]
    m0 = segment_pattern(n1, n2, b)
    if m0 is not None and s(0) == 0:
        shift = segment_shift(n1, m0, b, s)
        grid = {Fraction(j, b ** m0) + shift for j in range(b ** m0)}
        if set(pts) != grid:
            raise AssertionError(f"self-similarity violated for [{n1}, {n2}) in base {b}")
    return TorusPointSet.from_exact([p % 1 for p in pts])
