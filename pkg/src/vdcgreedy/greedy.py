"""The greedy energy-minimization dynamical system on the unit torus.

Each step appends a global minimizer of ``E(x) = sum_k f(|x - x_k|)``.
Between two consecutive points every term is a convex function of ``x``, so
the energy restricted to a gap has at most one critical point.  Each gap is
solved independently by a bracketed Newton iteration and the gap minima are
compared globally.  Ties within a relative tolerance form the candidate set
from which a :class:`SelectionPolicy` picks the next point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .kernels import Kernel
from .points import TorusPointSet

log = logging.getLogger(__name__)

DEFAULT_TIE_TOLERANCE = 1e-9
SNAP_TOLERANCE = 1e-9
BRACKET_WIDTH = 1e-13
_MAX_ITER = 200


# selection policies ------------------------------------------------------

@dataclass(frozen=True)
class SelectionPolicy:
    """How to pick among tied minimizers.

    ``kind`` is ``smallest``, ``largest``, ``index`` (``k`` taken modulo the
    candidate count), ``random`` (seeded, stateless per step) or ``follow``
    (the candidate closest to ``targets[step]``, used to replay a known
    sequence).
    """

    kind: str = "smallest"
    k: int = 0
    rng_seed: int = 0
    targets: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in ("smallest", "largest", "index", "random", "follow"):
            raise ValueError(f"unknown policy {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "SelectionPolicy":
        """``smallest | largest | index:<k> | random:<seed>``."""
        text = text.strip()
        head, _, arg = text.partition(":")
        if head in ("smallest", "largest") and not arg:
            return cls(head)
        if head in ("index", "random") and arg:
            try:
                v = int(arg)
            except ValueError:
                raise ValueError(f"malformed policy {text!r}") from None
            return cls("index", k=v) if head == "index" else cls("random", rng_seed=v)
        raise ValueError(f"malformed policy {text!r}")

    @classmethod
    def follow(cls, targets) -> "SelectionPolicy":
        return cls("follow", targets=tuple(float(t) for t in targets))

    def __str__(self) -> str:
        if self.kind == "index":
            return f"index:{self.k}"
        if self.kind == "random":
            return f"random:{self.rng_seed}"
        return self.kind

    def choose(self, candidates: list[float], step: int) -> int:
        """Index into the sorted ``candidates`` for global point index ``step``."""
        n = len(candidates)
        if n == 0:
            raise ValueError("no candidates to choose from")
        if self.kind == "smallest":
            return 0
        if self.kind == "largest":
            return n - 1
        if self.kind == "index":
            return self.k % n
        if self.kind == "random":
            # a fresh generator per step keeps replays independent of history
            return int(np.random.default_rng([self.rng_seed, step]).integers(n))
        if step >= len(self.targets):
            raise ValueError(f"follow policy has no target for step {step}")
        t = self.targets[step]
        dist = [min(abs(c - t), 1 - abs(c - t)) for c in candidates]
        i = int(np.argmin(dist))
        if dist[i] > SNAP_TOLERANCE:
            raise ValueError(f"target {t!r} at step {step} is not a candidate")
        return i


# trajectories --------------------------------------------------------------

@dataclass(frozen=True)
class GreedyTrajectory:
    seed: TorusPointSet
    chosen: tuple[float, ...]
    candidates_per_step: tuple[tuple[float, ...], ...]
    policy: SelectionPolicy
    kernel_name: str
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE
    # energy of the chosen point against all previous points, per step
    min_energies: tuple[float, ...] = ()
    # dyadic snapped values; None once any step leaves the dyadic lattice
    chosen_exact: tuple[Fraction, ...] | None = None
    candidates_exact: tuple[tuple[Fraction, ...], ...] | None = None

    @property
    def points(self) -> TorusPointSet:
        vals = self.seed.points + self.chosen
        if self.chosen_exact is not None and self.seed.exact is not None:
            return TorusPointSet(vals, self.seed.exact + self.chosen_exact)
        return TorusPointSet(vals)

    def __len__(self) -> int:
        return len(self.seed) + len(self.chosen)

    def to_json(self) -> dict:
        def fr(q):
            return f"{q.numerator}/{q.denominator}"
        steps = []
        for i, cands in enumerate(self.candidates_per_step):
            rec = {"step": len(self.seed) + i, "chosen": self.chosen[i],
                   "candidates": list(cands), "energy": self.min_energies[i]}
            if self.candidates_exact is not None:
                rec["chosen_exact"] = fr(self.chosen_exact[i])
                rec["candidates_exact"] = [fr(q) for q in self.candidates_exact[i]]
            steps.append(rec)
        return {"kernel": self.kernel_name, "policy": str(self.policy),
                "tie_tolerance": self.tie_tolerance,
                "points": self.points.to_records(), "steps": steps}


# per-gap solver ------------------------------------------------------------

def _poly_energy_coeffs(p: np.ndarray, poly: tuple[float, ...]) -> np.ndarray:
    """Coefficients (ascending in x) of the energy restricted to every gap.

    On gap ``g`` the offsets are ``y_k = p_k - [k > g]`` and the energy is
    ``sum_j c_j sum_k (x - y_k)^j``, which only needs the power sums of the
    offsets.  Those come from prefix sums, so all gaps cost O(n * deg).
    """
    n = len(p)
    J = len(poly) - 1
    S = np.empty((J + 1, n))
    for i in range(J + 1):
        head = np.cumsum(p ** i)
        tail = np.cumsum(((p - 1.0) ** i)[::-1])[::-1]
        tail = np.append(tail[1:], 0.0)
        S[i] = head + tail
    A = np.zeros((n, J + 1))
    for j, c in enumerate(poly):
        if c == 0:
            continue
        for r in range(j + 1):
            A[:, r] += c * comb(j, r) * (-1.0) ** (j - r) * S[j - r]
    return A


def _horner(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for r in range(A.shape[1] - 1, -1, -1):
        out = out * x + A[:, r]
    return out


def _deriv_coeffs(A: np.ndarray) -> np.ndarray:
    if A.shape[1] == 1:
        return np.zeros((A.shape[0], 1))
    return A[:, 1:] * np.arange(1, A.shape[1])[None, :]


class _GapProblem:
    """Energy, derivative and curvature on each gap, vectorized over gaps."""

    def __init__(self, p: np.ndarray, kernel: Kernel):
        self.p = p
        self.n = len(p)
        self.kernel = kernel
        self.left = p
        self.right = np.append(p[1:], p[0] + 1.0)
        if kernel.poly is not None:
            self.A = _poly_energy_coeffs(p, kernel.poly)
            self.dA = _deriv_coeffs(self.A)
            self.ddA = _deriv_coeffs(self.dA)
        else:
            self.A = None

    def _dist(self, x, rows):
        shift = np.arange(self.n)[None, :] > rows[:, None]
        return (x[:, None] - self.p[None, :]) + shift

    def energy(self, x, rows):
        if self.A is not None:
            return _horner(self.A[rows], x)
        return np.sum(self.kernel.eval(self._dist(x, rows)), axis=1)

    def d1(self, x, rows):
        if self.A is not None:
            return _horner(self.dA[rows], x)
        return np.sum(self.kernel.deriv1(self._dist(x, rows)), axis=1)

    def d12(self, x, rows):
        if self.A is not None:
            return _horner(self.dA[rows], x), _horner(self.ddA[rows], x)
        dist = self._dist(x, rows)
        return (np.sum(self.kernel.deriv1(dist), axis=1),
                np.sum(self.kernel.deriv2(dist), axis=1))


def _solve_gaps(p: np.ndarray, kernel: Kernel, rows: np.ndarray):
    """Minimizers and energies on the given gaps of the sorted array ``p``.

    Returns ``(rows, args, energies)`` restricted to gaps whose derivative
    changes sign; other gaps have no interior minimum.
    """
    prob = _GapProblem(p, kernel)
    lo = prob.left[rows].copy()
    hi = prob.right[rows].copy()
    ok = hi - lo > 0
    if not np.all(ok):
        for g in rows[~ok]:
            log.warning("gap %d has zero width (duplicate points); skipped", g)
        rows, lo, hi = rows[ok], lo[ok], hi[ok]
    if kernel.deriv1 is None:
        return _golden_gaps(prob, rows, lo, hi)
    if not kernel.singular_at_zero:
        with np.errstate(all="ignore"):
            sign_change = (prob.d1(lo, rows) < 0) & (prob.d1(hi, rows) > 0)
        if not np.all(sign_change):
            log.debug("%d gaps without interior minimum", int(np.sum(~sign_change)))
        rows, lo, hi = rows[sign_change], lo[sign_change], hi[sign_change]
    x = 0.5 * (lo + hi)
    active = np.ones(len(rows), dtype=bool)
    for _ in range(_MAX_ITER):
        if not np.any(active):
            break
        idx = np.nonzero(active)[0]
        xa, ra = x[idx], rows[idx]
        with np.errstate(all="ignore"):
            d, dd = prob.d12(xa, ra)
        lo[idx] = np.where(d <= 0, xa, lo[idx])
        hi[idx] = np.where(d >= 0, xa, hi[idx])
        with np.errstate(all="ignore"):
            step = d / dd
        newton = xa - step
        inside = np.isfinite(newton) & (newton > lo[idx]) & (newton < hi[idx])
        x_new = np.where(inside, newton, 0.5 * (lo[idx] + hi[idx]))
        # a sub-resolution Newton step may round onto the bracket edge
        converged = np.isfinite(step) & (np.abs(step) <= 0.25 * BRACKET_WIDTH)
        x_new = np.where(converged, xa, x_new)
        width = hi[idx] - lo[idx]
        x[idx] = x_new
        # Newton converges from one side only; certify with a tight bracket
        stalled = converged & (width > BRACKET_WIDTH)
        if np.any(stalled):
            s = idx[stalled]
            h = 0.4 * BRACKET_WIDTH
            with np.errstate(all="ignore"):
                dl = prob.d1(x[s] - h, rows[s])
                dr = prob.d1(x[s] + h, rows[s])
            good = (dl <= 0) & (dr >= 0)
            lo[s] = np.where(good, x[s] - h, lo[s])
            hi[s] = np.where(good, x[s] + h, hi[s])
            # derivative noise at the root: the iterate is as good as it gets
            hi[s[~good]] = lo[s[~good]] = x[s[~good]]
        active[idx] = (hi[idx] - lo[idx]) > BRACKET_WIDTH
    else:
        log.warning("gap solver hit the iteration cap on %d gaps", int(np.sum(active)))
    return rows, x, prob.energy(x, rows)


def _golden_gaps(prob: _GapProblem, rows, lo, hi):
    # value comparisons only: the argmin is accurate to about sqrt(eps)
    invphi = (math.sqrt(5) - 1) / 2
    args, vals = [], []
    for g, a, b in zip(rows, lo, hi):
        r = np.array([g])
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = prob.energy(np.array([c]), r)[0], prob.energy(np.array([d]), r)[0]
        while b - a > BRACKET_WIDTH:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = prob.energy(np.array([c]), r)[0]
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = prob.energy(np.array([d]), r)[0]
        x = 0.5 * (a + b)
        e = prob.energy(np.array([x]), r)[0]
        # a monotone gap has its infimum at an endpoint, which is a point of the set
        if x - lo[len(args)] <= 2 * BRACKET_WIDTH or hi[len(args)] - x <= 2 * BRACKET_WIDTH:
            e = math.inf
        args.append(x)
        vals.append(e)
    keep = np.isfinite(vals)
    return np.asarray(rows)[keep], np.asarray(args)[keep], np.asarray(vals)[keep]


def _sorted_values(points) -> np.ndarray:
    if isinstance(points, TorusPointSet):
        vals = np.asarray(points.points, dtype=float)
    else:
        vals = np.asarray([float(v) for v in points], dtype=float)
    if len(vals) == 0:
        raise ValueError("need at least one point")
    return np.sort(vals % 1.0)


def find_gap_minimum(points, gap_index: int, kernel: Kernel) -> tuple[float, float] | None:
    """Minimizer and minimum of the energy on one gap of the sorted points.

    Gap ``g`` is the open arc from the ``g``-th to the ``(g+1)``-th sorted
    point, the last one wrapping through 1.  Returns None when the energy is
    monotone on the gap or the gap has zero width.
    """
    p = _sorted_values(points)
    if not 0 <= gap_index < len(p):
        raise ValueError(f"gap index {gap_index} out of range for {len(p)} points")
    rows, args, vals = _solve_gaps(p, kernel, np.array([gap_index]))
    if len(rows) == 0:
        return None
    return float(args[0] % 1.0), float(vals[0])


def _candidates_with_energy(p: np.ndarray, kernel: Kernel, tie_tolerance: float):
    rows, args, vals = _solve_gaps(p, kernel, np.arange(len(p)))
    if len(rows) == 0:
        raise ArithmeticError("no gap has an interior minimum")
    e_min = float(np.min(vals))
    tol = tie_tolerance * (1.0 + abs(e_min))
    keep = vals <= e_min + tol
    xs = args[keep] % 1.0
    es = vals[keep]
    order = np.argsort(xs)
    return [float(v) for v in xs[order]], [float(v) for v in es[order]]


def candidate_minima(points, kernel: Kernel,
                     tie_tolerance: float = DEFAULT_TIE_TOLERANCE) -> list[float]:
    """All global minimizers of the energy, sorted, ties grouped within
    ``tie_tolerance * (1 + |E_min|)``."""
    return _candidates_with_energy(_sorted_values(points), kernel, tie_tolerance)[0]


# dyadic snapping -----------------------------------------------------------

def _snap(x: float, level: int) -> Fraction | None:
    den = 1 << level
    q = round(x * den)
    if abs(x * den - q) > SNAP_TOLERANCE * den:
        return None
    return Fraction(q % den, den)


def _snap_level(exact: tuple[Fraction, ...]) -> int:
    return max(q.denominator.bit_length() - 1 for q in exact) + 1


# driving the system ----------------------------------------------------------

def _start(seed: TorusPointSet, kernel: Kernel, policy: SelectionPolicy,
           tie_tolerance: float) -> GreedyTrajectory:
    vals = seed.values()
    if len(set(vals)) != len(vals) or len(set(seed.points)) != len(seed.points):
        raise ValueError("seed contains duplicate points")
    if len(seed) == 0:
        raise ValueError("seed must contain at least one point")
    exact = () if seed.is_dyadic else None
    return GreedyTrajectory(seed=seed, chosen=(), candidates_per_step=(), policy=policy,
                            kernel_name=kernel.name, tie_tolerance=tie_tolerance,
                            min_energies=(), chosen_exact=exact,
                            candidates_exact=() if exact is not None else None)


def greedy_step(traj: GreedyTrajectory, kernel: Kernel) -> GreedyTrajectory:
    """Append the policy's choice among the current global minimizers."""
    return _advance(traj, kernel, np.sort(np.asarray(traj.points.points)))


def _advance(traj: GreedyTrajectory, kernel: Kernel, p: np.ndarray) -> GreedyTrajectory:
    cands, energies = _candidates_with_energy(p, kernel, traj.tie_tolerance)
    exact_c = None
    if traj.chosen_exact is not None:
        level = _snap_level(traj.seed.exact + traj.chosen_exact)
        snapped = [_snap(c, level) for c in cands]
        if all(s is not None for s in snapped):
            exact_c = tuple(sorted(snapped))
            cands = [float(s) for s in exact_c]
    step = len(traj)
    i = traj.policy.choose(cands, step)
    kw = {}
    if exact_c is not None:
        kw = {"chosen_exact": traj.chosen_exact + (exact_c[i],),
              "candidates_exact": traj.candidates_exact + (exact_c,)}
    elif traj.chosen_exact is not None:
        log.info("step %d left the dyadic lattice; exact tracking stops", step)
        kw = {"chosen_exact": None, "candidates_exact": None}
    return GreedyTrajectory(
        seed=traj.seed, chosen=traj.chosen + (cands[i],),
        candidates_per_step=traj.candidates_per_step + (tuple(cands),),
        policy=traj.policy, kernel_name=traj.kernel_name, tie_tolerance=traj.tie_tolerance,
        min_energies=traj.min_energies + (energies[i],),
        chosen_exact=kw.get("chosen_exact", traj.chosen_exact),
        candidates_exact=kw.get("candidates_exact", traj.candidates_exact),
    )


def greedy_run(seed, kernel: Kernel, n: int, policy: SelectionPolicy | str = "smallest",
               tie_tolerance: float = DEFAULT_TIE_TOLERANCE) -> GreedyTrajectory:
    """Grow ``seed`` greedily to ``n`` points."""
    if not isinstance(seed, TorusPointSet):
        seed = TorusPointSet.from_values(seed)
    if isinstance(policy, str):
        policy = SelectionPolicy.parse(policy)
    if n < len(seed):
        raise ValueError(f"n={n} is smaller than the seed ({len(seed)} points)")
    traj = _start(seed, kernel, policy, tie_tolerance)
    p = np.sort(np.asarray(seed.points))
    while len(traj) < n:
        traj = _advance(traj, kernel, p)
        p = np.insert(p, np.searchsorted(p, traj.chosen[-1]), traj.chosen[-1])
    return traj


def predicted_minima_dyadic(n: int) -> list[Fraction]:
    """Minimizers after the first ``n`` van der Corput points.

    With ``n = 2^{m_k} + ... + 2^{m_1}`` (``m_k > ... > m_1``) these are the
    ``2^{m_1}`` points ``i / 2^{m_1} + sum_h 2^{-(m_h + 1)}``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    bits = [j for j in range(n.bit_length()) if n >> j & 1]
    m1 = bits[0]
    shift = sum(Fraction(1, 2 ** (j + 1)) for j in bits)
    return sorted((Fraction(i, 2 ** m1) + shift) % 1 for i in range(2 ** m1))


__all__ = [
    "SelectionPolicy", "GreedyTrajectory", "find_gap_minimum", "candidate_minima",
    "greedy_step", "greedy_run", "predicted_minima_dyadic",
]
