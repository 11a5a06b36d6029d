"""Ordered point sets on the unit torus, with optional exact rational coordinates."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

EXACT_MATCH_TOL = 1e-15


def parse_point(text: str) -> Fraction | float:
    """``"p/q"`` and integers parse exactly, anything else as a float."""
    text = text.strip()
    if "/" in text or text.lstrip("+-").isdigit():
        return Fraction(text)
    return float(text)


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


@dataclass(frozen=True)
class TorusPointSet:
    """Points in [0, 1); ``exact`` is either None or a parallel tuple of rationals."""

    points: tuple[float, ...]
    exact: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        for p in pts:
            if not 0.0 <= p < 1.0:
                raise ValueError(f"point {p!r} outside [0, 1)")
        object.__setattr__(self, "points", pts)
        if self.exact is not None:
            ex = tuple(Fraction(q) for q in self.exact)
            if len(ex) != len(pts):
                raise ValueError("exact coordinates must parallel points")
            for p, q in zip(pts, ex):
                if abs(p - q) > EXACT_MATCH_TOL:
                    raise ValueError(f"float {p!r} does not match exact {q}")
            object.__setattr__(self, "exact", ex)

    @classmethod
    def from_exact(cls, values: Iterable) -> "TorusPointSet":
        ex = tuple(Fraction(v) for v in values)
        return cls(tuple(float(q) for q in ex), ex)

    @classmethod
    def from_values(cls, values: Iterable) -> "TorusPointSet":
        """Rationals stay exact as long as every value is rational."""
        vals = list(values)
        if vals and all(isinstance(v, (Fraction, int)) for v in vals):
            return cls.from_exact(vals)
        return cls(tuple(float(v) for v in vals))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def is_dyadic(self) -> bool:
        return self.exact is not None and all(is_dyadic(q) for q in self.exact)

    def values(self) -> Sequence:
        """Exact values when available, floats otherwise."""
        return self.exact if self.exact is not None else self.points

    def prefix(self, n: int) -> "TorusPointSet":
        return TorusPointSet(self.points[:n], None if self.exact is None else self.exact[:n])

    def sorted(self) -> "TorusPointSet":
        order = sorted(range(len(self.points)), key=lambda i: self.values()[i])
        return TorusPointSet(tuple(self.points[i] for i in order),
                             None if self.exact is None else tuple(self.exact[i] for i in order))

    def to_records(self) -> list[dict]:
        out = []
        for i, p in enumerate(self.points):
            q = None if self.exact is None else self.exact[i]
            out.append({"index": i, "value_float": p,
                        "value_exact": None if q is None else f"{q.numerator}/{q.denominator}"})
        return out


def read_points(text: str) -> TorusPointSet:
    """One point per line (``p/q`` or decimal); blank lines and ``#`` comments skipped.

    A CSV with a header row from :func:`write_points_csv` is also accepted.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if lines and lines[0].startswith("index"):
        rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
        vals = [parse_point(r["value_exact"]) if r.get("value_exact") else float(r["value_float"])
                for r in rows]
    else:
        vals = [parse_point(ln) for ln in lines]
    return TorusPointSet.from_values(vals)


def write_points_csv(ps: TorusPointSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "value_float", "value_exact"])
    for rec in ps.to_records():
        w.writerow([rec["index"], repr(rec["value_float"]), rec["value_exact"] or ""])
    return buf.getvalue()
