"""Permutations of {0, ..., b-1} and the doubling family P_m in bases 2^m.

P_1 = {(0, 1)} and P_{m+1} collects every concatenation
``(2*s, (2*t + a) mod 2^(m+1))`` with ``s, t`` in P_m and odd ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_ENUMERATED_M = 4
MAX_CANONICAL_M = 20


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{0, ..., base-1}`` stored by its images."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(v) for v in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"not a permutation: {imgs}")
        object.__setattr__(self, "images", imgs)

    @property
    def base(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k]

    def __len__(self) -> int:
        return len(self.images)

    def __iter__(self):
        return iter(self.images)

    def __str__(self) -> str:
        return ",".join(map(str, self.images))

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse the comma-separated form, e.g. ``"0,2,1,3"``."""
        try:
            return cls(tuple(int(t) for t in text.replace("(", "").replace(")", "").split(",")))
        except ValueError as exc:
            raise ValueError(f"malformed permutation {text!r}: {exc}") from None

    @classmethod
    def identity(cls, b: int) -> "Permutation":
        return cls(tuple(range(b)))

    def compose(self, other: "Permutation") -> "Permutation":
        """``self o other``."""
        return Permutation(tuple(self.images[j] for j in other.images))


def as_permutation(sigma) -> Permutation:
    if isinstance(sigma, Permutation):
        return sigma
    if isinstance(sigma, str):
        return Permutation.parse(sigma)
    return Permutation(tuple(sigma))


def _log2_exact(b: int) -> int:
    m = b.bit_length() - 1
    if b < 2 or (1 << m) != b:
        raise ValueError(f"base {b} is not a power of two >= 2")
    return m


def intricate(sigma, tau) -> Permutation:
    """Faure's intrication: ``(s.t)(k''*b + k') = c*s(k') + t(k'')``."""
    s, t = as_permutation(sigma), as_permutation(tau)
    b, c = s.base, t.base
    return Permutation(tuple(c * s(k1) + t(k2) for k2 in range(c) for k1 in range(b)))


def canonical_sigma_m(m: int) -> Permutation:
    """sigma_1 = (0, 1), sigma_m = sigma_{m-1} . (0, 1)."""
    if not 1 <= m <= MAX_CANONICAL_M:
        raise ValueError(f"m must lie in [1, {MAX_CANONICAL_M}]")
    return _canonical(m)


@lru_cache(maxsize=None)
def _canonical(m: int) -> Permutation:
    if m == 1:
        return Permutation((0, 1))
    return intricate(_canonical(m - 1), (0, 1))


def compose_member(s: Sequence[int], t: Sequence[int], a: int) -> tuple[int, ...]:
    """The tuple ``(2s, (2t + a) mod 2b)`` where ``b = len(s)``."""
    mod = 2 * len(s)
    return tuple(2 * v for v in s) + tuple((2 * v + a) % mod for v in t)


def extend_family(P: Iterable) -> list[Permutation]:
    """All ``(2s, 2t (+) a)`` for s, t in ``P`` and odd ``a`` below ``2*base``."""
    members = [tuple(as_permutation(p).images) for p in P]
    if not members:
        return []
    mod = 2 * len(members[0])
    out = {compose_member(s, t, a) for s in members for t in members for a in range(1, mod, 2)}
    return [Permutation(p) for p in sorted(out)]


@lru_cache(maxsize=None)
def _enumerate(m: int) -> tuple[Permutation, ...]:
    if m == 1:
        return (Permutation((0, 1)),)
    return tuple(extend_family(_enumerate(m - 1)))


def enumerate_family(m: int) -> list[Permutation]:
    """Every member of P_m, sorted lexicographically (m <= 4)."""
    if not 1 <= m <= MAX_ENUMERATED_M:
        raise ValueError(f"enumeration is limited to 1 <= m <= {MAX_ENUMERATED_M}")
    return list(_enumerate(m))


def family_count(m: int) -> int:
    """|P_1| = 1 and |P_{m+1}| = |P_m|^2 * 2^m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    n = 1
    for k in range(1, m):
        n = n * n * 2 ** k
    return n


def decompose(sigma) -> tuple[tuple[int, ...], tuple[int, ...], int] | None:
    """Split ``(2s, 2t (+) a)`` into ``(s, t, a)``; None if the shape is wrong.

    Only the shape is checked, not membership of ``s`` and ``t``.
    """
    imgs = as_permutation(sigma).images
    b = len(imgs)
    half = b // 2
    first, second = imgs[:half], imgs[half:]
    if any(v % 2 for v in first):
        return None
    a = second[0]
    if a % 2 == 0:
        return None
    s = tuple(v // 2 for v in first)
    t = tuple(((v - a) % b) // 2 for v in second)
    return s, t, a


def family_membership(sigma) -> bool:
    """Decide membership in P_m by recursive decomposition."""
    imgs = as_permutation(sigma).images
    _log2_exact(len(imgs))
    return _is_member(imgs)


def _is_member(imgs: tuple[int, ...]) -> bool:
    if len(imgs) == 2:
        return imgs == (0, 1)
    parts = decompose(imgs)
    if parts is None:
        return False
    s, t, _ = parts
    return _is_member(s) and _is_member(t)


def sample_family(m: int, count: int, rng_seed: int) -> list[Permutation]:
    """Draw ``count`` members of P_m uniformly (with replacement).

    Every member has a unique parameterization (s, t, a), so drawing the
    parameters recursively and uniformly gives the uniform law on P_m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(rng_seed)
    return [Permutation(_sample_one(m, rng)) for _ in range(count)]


def _sample_one(m: int, rng) -> tuple[int, ...]:
    if m == 1:
        return (0, 1)
    s = _sample_one(m - 1, rng)
    t = _sample_one(m - 1, rng)
    a = 2 * int(rng.integers(0, 2 ** (m - 1))) + 1
    return compose_member(s, t, a)


def swapping_permutation(b: int) -> Permutation:
    """mu_b(k) = b - 1 - k."""
    return Permutation(tuple(range(b - 1, -1, -1)))


def symmetry_transform(sigma, kind: str, a: int | None = None) -> Permutation:
    """Apply ``shift`` (s + a mod b), ``negate`` (-s mod b) or ``swap`` (s o mu_b)."""
    s = as_permutation(sigma)
    b = s.base
    if kind == "shift":
        if a is None or not 0 < a < b:
            raise ValueError(f"shift needs 0 < a < {b}, got {a}")
        return Permutation(tuple((v + a) % b for v in s))
    if kind == "negate":
        return Permutation(tuple((-v) % b for v in s))
    if kind == "swap":
        return s.compose(swapping_permutation(b))
    raise ValueError(f"unknown transform {kind!r}")


def complete_prefix(prefix: Sequence[int], m: int) -> tuple[int, ...] | None:
    """Extend the image prefix ``prefix`` to some member of P_m, or None.

    The first half of a member fixes ``s``, the first element of the second
    half fixes ``a`` and the rest fixes ``t``; unconstrained parts are filled
    with the canonical sigma.
    """
    b = 2 ** m
    prefix = tuple(prefix)
    if len(prefix) > b or any(not 0 <= v < b for v in prefix):
        return None
    if m == 1:
        full = (0, 1)
        return full if full[: len(prefix)] == prefix else None
    half = b // 2
    first, second = prefix[:half], prefix[half:]
    if any(v % 2 for v in first):
        return None
    s = complete_prefix(tuple(v // 2 for v in first), m - 1)
    if s is None:
        return None
    if second:
        a = second[0]
        if any(v % 2 == 0 for v in second):
            return None
        t = complete_prefix(tuple(((v - a) % b) // 2 for v in second), m - 1)
        if t is None:
            return None
    else:
        a, t = 1, _canonical(m - 1).images
    return compose_member(s, t, a)


@dataclass(frozen=True)
class FamilyHandle:
    """P_m in one of three modes: enumerated (m <= 4), counted, or sampled."""

    m: int
    mode: str = "enumerated"
    rng_seed: int = 0
    count: int = 0

    def __post_init__(self):
        if self.mode not in ("enumerated", "counted", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "enumerated" and self.m > MAX_ENUMERATED_M:
            raise ValueError(f"enumerated mode needs m <= {MAX_ENUMERATED_M}")

    def size(self) -> int:
        return family_count(self.m)

    def members(self) -> list[Permutation]:
        if self.mode == "enumerated":
            return enumerate_family(self.m)
        if self.mode == "sampled":
            return sample_family(self.m, self.count, self.rng_seed)
        raise ValueError("counted mode does not materialize members")


def closure_report(m: int) -> dict:
    """How many members of P_m stay in P_m under each symmetry transform."""
    members = enumerate_family(m)
    b = 2 ** m
    report = {"m": m, "size": len(members)}
    report["negate"] = sum(family_membership(symmetry_transform(s, "negate")) for s in members)
    report["swap"] = sum(family_membership(symmetry_transform(s, "swap")) for s in members)
    report["shift"] = {a: sum(family_membership(symmetry_transform(s, "shift", a)) for s in members)
                       for a in range(1, b)}
    return report
