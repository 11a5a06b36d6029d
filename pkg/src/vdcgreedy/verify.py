"""Cross-module checks tying the greedy system to permuted van der Corput
sequences and Faure's discrepancy calculus.

Every check returns a :class:`CheckReport` with a JSON payload; float
trajectories are compared with rational sequences at tolerance 1e-9 and then
snapped, rational-side comparisons are exact.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .discrepancy import extreme_discrepancy, one_sided_counts
from .family import (Permutation, canonical_sigma_m, complete_prefix, enumerate_family,
                     family_membership, intricate, sample_family, swapping_permutation)
from .faure import faure_series_table, psi, psi_functions
from .greedy import (GreedyTrajectory, SelectionPolicy, greedy_run, predicted_minima_dyadic)
from .kernels import Kernel
from .radical import permuted_radical_inverse, segment_shift, vdc_prefix
from .points import TorusPointSet

MATCH_TOLERANCE = 1e-9
WORKERS_ENV = "VDCGREEDY_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _fmt(q) -> str:
    return f"{q.numerator}/{q.denominator}" if isinstance(q, Fraction) else repr(q)


@dataclass
class CheckReport:
    name: str
    passed: bool
    counterexample: dict | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "counterexample": self.counterexample, "details": self.details}


# trajectory matching ---------------------------------------------------------

@dataclass(frozen=True)
class MatchResult:
    """Outcome of matching a trajectory from seed {0} against P_m.

    On failure ``sigma`` is None and ``failed_step`` names the first point
    that no member of P_m can reproduce.
    """

    m: int
    sigma: Permutation | None
    matched_prefix_length: int
    residual: float
    failed_step: int | None = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.sigma is not None and self.residual <= MATCH_TOLERANCE

    def to_json(self) -> dict:
        return {"m": self.m, "sigma": None if self.sigma is None else str(self.sigma),
                "matched_prefix_length": self.matched_prefix_length,
                "residual": self.residual, "failed_step": self.failed_step,
                "reason": self.reason}


def _trajectory_values(traj) -> list:
    if isinstance(traj, GreedyTrajectory):
        return list(traj.points.values())
    if isinstance(traj, TorusPointSet):
        return list(traj.values())
    return list(traj)


def match_trajectory_to_permutation(traj) -> MatchResult:
    """Recover ``sigma`` in P_m with ``x_k = S_{2^m}^sigma(k)`` constructively.

    ``m`` is the smallest exponent with ``N <= 2^m``.  Each point fixes one
    image ``sigma(k) = x_k 2^m``; the image prefix is completed through the
    recursive ``(2s, 2t (+) a)`` structure, never by enumerating P_m.
    """
    xs = _trajectory_values(traj)
    N = len(xs)
    if N < 2:
        raise ValueError("matching needs at least two points")
    if xs[0] != 0:
        raise ValueError("matching needs a trajectory starting from the seed {0}")
    m = (N - 1).bit_length()
    b = 2 ** m
    images = []
    for k, x in enumerate(xs):
        v = float(x) * b
        q = round(v)
        if abs(v - q) > MATCH_TOLERANCE * b or not 0 <= q < b:
            return MatchResult(m, None, k, float("inf"), k, f"x_{k}={_fmt(x)} is not on the 1/{b} grid")
        images.append(q)
    full = complete_prefix(images, m)
    if full is None:
        # longest consistent prefix pinpoints the first bad step
        k = 1
        while k < N and complete_prefix(images[: k + 1], m) is not None:
            k += 1
        return MatchResult(m, None, k, float("inf"), k,
                           f"no member of P_{m} has images {images[:k + 1]}")
    sigma = Permutation(full)
    if not family_membership(sigma):
        return MatchResult(m, None, N, float("inf"), None, "completion left P_m")
    residual = max(abs(float(x) - float(permuted_radical_inverse(k, b, sigma)))
                   for k, x in enumerate(xs))
    return MatchResult(m, sigma, N, residual)


# greedy versus van der Corput ----------------------------------------------

def check_greedy_equals_vdc(kernel: Kernel, n: int) -> CheckReport:
    """Seed {0}, smallest policy: chosen points are ``S_2(k)`` and every
    candidate set is the predicted dyadic set."""
    traj = greedy_run(TorusPointSet.from_exact([0]), kernel, n, "smallest")
    xs = traj.points.points
    for k in range(n):
        target = permuted_radical_inverse(k, 2)
        if abs(xs[k] - float(target)) > MATCH_TOLERANCE:
            return CheckReport("greedy_equals_vdc", False,
                               {"index": k, "got": xs[k], "expected": _fmt(target)})
    for i, cands in enumerate(traj.candidates_per_step):
        have = len(traj.seed) + i
        want = predicted_minima_dyadic(have)
        got = list(traj.candidates_exact[i]) if traj.candidates_exact is not None else None
        if got != want:
            return CheckReport("greedy_equals_vdc", False,
                               {"index": have, "candidates": list(cands),
                                "expected": [_fmt(q) for q in want]})
    return CheckReport("greedy_equals_vdc", True,
                       details={"kernel": kernel.name, "n": n})


def check_round_trip(kernel: Kernel, m_max: int = 3) -> CheckReport:
    """Every sigma in P_m (m <= m_max) is reproduced by the greedy system
    steered along its own sequence, and matching recovers the prefix."""
    count = 0
    for m in range(1, m_max + 1):
        b = 2 ** m
        for sigma in enumerate_family(m):
            targets = vdc_prefix(b, b, sigma)
            traj = greedy_run(TorusPointSet.from_exact([0]), kernel, b,
                              SelectionPolicy.follow(targets))
            res = match_trajectory_to_permutation(traj)
            if not res.ok or vdc_prefix(b, b, res.sigma) != targets:
                return CheckReport("round_trip", False,
                                   {"sigma": str(sigma), "match": res.to_json()})
            count += 1
    return CheckReport("round_trip", True, details={"kernel": kernel.name, "members": count})


def check_random_policies(kernel: Kernel, runs: int = 50, n: int = 64,
                          rng_seed: int = 0) -> CheckReport:
    """Random-policy trajectories from {0} each match some member of P_m."""
    sigmas = []
    for r in range(runs):
        policy = SelectionPolicy("random", rng_seed=rng_seed + r)
        traj = greedy_run(TorusPointSet.from_exact([0]), kernel, n, policy)
        res = match_trajectory_to_permutation(traj)
        if not (res.ok and res.residual == 0.0 and family_membership(res.sigma)):
            return CheckReport("random_policies", False,
                               {"policy": str(policy), "match": res.to_json()})
        sigmas.append(str(res.sigma))
    return CheckReport("random_policies", True,
                       details={"kernel": kernel.name, "runs": runs, "n": n,
                                "distinct_sigma": len(set(sigmas))})


def check_candidate_count(kernel: Kernel, n: int = 64, runs: int = 10,
                          rng_seed: int = 0) -> CheckReport:
    """With N points placed, the candidate set has ``2^{m_1}`` elements,
    ``2^{m_1}`` being the lowest power of two in N."""
    for r in range(runs):
        policy = SelectionPolicy("random", rng_seed=rng_seed + r) if r else SelectionPolicy()
        traj = greedy_run(TorusPointSet.from_exact([0]), kernel, n, policy)
        for i, cands in enumerate(traj.candidates_per_step):
            N = len(traj.seed) + i
            if len(cands) != N & -N:
                return CheckReport("candidate_count", False,
                                   {"policy": str(policy), "N": N, "size": len(cands),
                                    "expected": N & -N})
    return CheckReport("candidate_count", True, details={"kernel": kernel.name, "runs": runs})


# family-wide discrepancy ---------------------------------------------------

def classical_table(n_max: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    """``(N D, N D+, N D-)`` of the base-2 sequence from the geometric oracle."""
    pts = vdc_prefix(n_max, 2)
    out = []
    for n in range(1, n_max + 1):
        p, m = one_sided_counts(pts, n)
        out.append((p + m, p, m))
    return out


def _family_chunk(args):
    images_list, n_max, reference, psi_ref = args
    rows = []
    for images in images_list:
        sigma = Permutation(images)
        b = len(images)
        viol = {"psi": psi(b, sigma) != psi_ref, "d": None, "d_plus": None, "d_minus": None}
        table = faure_series_table(b, sigma, n_max)
        for key, col in (("d", 0), ("d_plus", 1), ("d_minus", 2)):
            for n, (got, ref) in enumerate(zip(table, reference), start=1):
                if got[col] != ref[col]:
                    viol[key] = {"n": n, "got": _fmt(got[col] / n), "expected": _fmt(ref[col] / n)}
                    break
        rows.append((images, viol))
    return rows


def check_family_equivalences(m: int, n_max: int, sample: int = 0, rng_seed: int = 0,
                              workers: int | None = None) -> CheckReport:
    """psi is the same for every member of P_m, and the Faure series values
    ``D_n``, ``D_n^+``, ``D_n^-`` equal those of the base-2 sequence.

    ``sample = 0`` means exhaustive (m <= 4).  The report lists violations
    per quantity so that the three equalities can be judged separately.
    """
    members = enumerate_family(m) if sample == 0 else sample_family(m, sample, rng_seed)
    members = sorted({s.images for s in members})
    reference = classical_table(n_max)
    psi_ref = psi(2 ** m, canonical_sigma_m(m))
    workers = default_workers() if workers is None else workers
    chunks = [members[i::max(1, workers)] for i in range(max(1, workers))]
    jobs = [(c, n_max, reference, psi_ref) for c in chunks if c]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [r for part in pool.map(_family_chunk, jobs) for r in part]
    else:
        rows = [r for job in jobs for r in _family_chunk(job)]
    rows.sort()
    violations = {k: [] for k in ("psi", "d", "d_plus", "d_minus")}
    for images, viol in rows:
        for key, v in viol.items():
            if v:
                entry = {"sigma": ",".join(map(str, images))}
                if isinstance(v, dict):
                    entry.update(v)
                violations[key].append(entry)
    passed = not any(violations.values())
    details = {"m": m, "n_max": n_max, "members": len(members),
               "violation_counts": {k: len(v) for k, v in violations.items()}}
    counter = None if passed else {k: v[:5] for k, v in violations.items() if v}
    return CheckReport("family_equivalences", passed, counter, details)


def check_geometric_agreement(m: int, n_max: int) -> CheckReport:
    """For every sigma in P_m and n <= n_max: the geometric ``D_n`` equals the
    base-2 value, and the geometric one-sided values equal the series."""
    reference = classical_table(n_max)
    b = 2 ** m
    for sigma in enumerate_family(m):
        pts = vdc_prefix(n_max, b, sigma)
        table = faure_series_table(b, sigma, n_max)
        for n in range(1, n_max + 1):
            p, q = one_sided_counts(pts, n)
            if p + q != reference[n - 1][0] or (p, q) != table[n - 1][1:]:
                return CheckReport("geometric_agreement", False,
                                   {"sigma": str(sigma), "n": n,
                                    "geometric": [_fmt(p / n), _fmt(q / n)],
                                    "series": [_fmt(v / n) for v in table[n - 1][1:]]})
    return CheckReport("geometric_agreement", True, details={"m": m, "n_max": n_max})


# psi identities ------------------------------------------------------------

def swapping_holds(sigma) -> bool:
    """Exchange of psi+ and psi- under the two swaps by ``mu_b(k) = b - 1 - k``.

    Complementing the images (``mu o sigma``) exchanges them exactly.
    Reversing the images (``sigma o mu``) exchanges them up to the
    reflection ``x -> 1 - x``.
    """
    b = sigma.base
    mu = swapping_permutation(b)
    plus, minus, _ = psi_functions(b, sigma)
    cp, cm, _ = psi_functions(b, mu.compose(sigma))
    rp, rm, _ = psi_functions(b, sigma.compose(mu))
    return (cp == minus and cm == plus
            and rp == minus.reflect() and rm == plus.reflect())


def check_psi_identities(m_max: int = 4) -> CheckReport:
    """Canonical psi equality on P_m, reflection, swapping and intrication."""
    for m in range(1, m_max + 1):
        b = 2 ** m
        ref = psi(b, canonical_sigma_m(m))
        for sigma in enumerate_family(m):
            f = psi(b, sigma)
            if f != ref:
                return CheckReport("psi_identities", False, {"sigma": str(sigma), "kind": "equality"})
            if f.reflect() != f:
                return CheckReport("psi_identities", False, {"sigma": str(sigma), "kind": "reflection"})
            if not swapping_holds(sigma):
                return CheckReport("psi_identities", False, {"sigma": str(sigma), "kind": "swapping"})
    small = [p for m in range(1, 3) for p in enumerate_family(m)] + [Permutation((1, 0, 2))]
    for s in small:
        for t in small:
            st = intricate(s, t)
            c = t.base
            lhs = psi(st.base, st)
            rhs = psi(s.base, s).compose_multiple(c) + psi(c, t)
            if lhs != rhs:
                return CheckReport("psi_identities", False,
                                   {"sigma": str(s), "tau": str(t), "kind": "intrication"})
    return CheckReport("psi_identities", True, details={"m_max": m_max})


# self-similarity -------------------------------------------------------------

def _random_pattern(rng, b: int, top: int):
    """``(n1, m0)`` with ``b^m0`` dividing ``n1`` and ``n1 + b^m0 <= b^top``."""
    m0 = int(rng.integers(0, top))
    higher = [j for j in range(m0, top) if rng.random() < 0.5]
    # digits stop below b^top, so n1 + b^m0 <= b^top
    n1 = sum(int(rng.integers(1, b)) * b ** j for j in higher)
    return n1, m0


def check_self_similarity(trials: int = 200, rng_seed: int = 0, b: int = 2,
                          sigma=None, top: int | None = None) -> CheckReport:
    """``{S(i) : n1 <= i < n1 + b^m0}`` is the first block shifted by the
    digit-dependent constant, as exact rational sets."""
    rng = np.random.default_rng(rng_seed)
    if top is None:
        top = max(1, 12 // max(1, (b - 1).bit_length()))
    for _ in range(trials):
        n1, m0 = _random_pattern(rng, b, top)
        n2 = n1 + b ** m0
        seg = {permuted_radical_inverse(i, b, sigma) for i in range(n1, n2)}
        block = {permuted_radical_inverse(i, b, sigma) for i in range(b ** m0)}
        shift = segment_shift(n1, m0, b, sigma)
        if seg != {x + shift for x in block}:
            return CheckReport("self_similarity", False,
                               {"n1": n1, "n2": n2, "b": b,
                                "sigma": None if sigma is None else str(sigma)})
    return CheckReport("self_similarity", True, details={"trials": trials, "b": b})


# energy and discrepancy along trajectories -----------------------------------

def pair_energy_profile(traj: GreedyTrajectory, kernel: Kernel) -> list[tuple[int, float, float]]:
    """``(n, sum_{k,l<n} f(|x_k - x_l|), n f(0))`` for every prefix.

    Totals are accumulated from the per-step energies the solver already
    computed; seed totals are evaluated directly.
    """
    if kernel.singular_at_zero:
        raise ValueError(f"kernel {kernel.name} is singular at 0")
    f0 = float(kernel(0.0))
    seed = np.asarray(traj.seed.points)
    out = []
    total = 0.0
    for i in range(len(seed)):
        if i:
            total += 2.0 * float(np.sum(kernel(np.abs(seed[i] - seed[:i]))))
        total += f0
        out.append((i + 1, total, (i + 1) * f0))
    n = len(seed)
    for e in traj.min_energies:
        total += 2.0 * e + f0
        n += 1
        out.append((n, total, n * f0))
    return out


def discrepancy_envelope(points, n_min: int = 8, exponent: float = 1 / 3) -> tuple[float, int]:
    """``max_N D_N N^exponent`` over prefixes ``N >= n_min`` and its argmax."""
    vals = np.asarray(points.points if isinstance(points, TorusPointSet) else points, dtype=float)
    best, arg = -1.0, n_min
    for N in range(n_min, len(vals) + 1):
        p, m = one_sided_counts(vals[:N], N)
        v = (p + m) / N * N ** exponent
        if v > best:
            best, arg = v, N
    return best, arg


def explore_multi_point_seeds(kernel: Kernel, seeds, n: int,
                              policy: str = "smallest") -> dict:
    """Observed candidate-set sizes for arbitrary seeds; nothing is asserted."""
    rows = []
    for seed in seeds:
        traj = greedy_run(seed, kernel, n, policy)
        sizes = Counter(len(c) for c in traj.candidates_per_step)
        rows.append({"seed": [float(x) for x in TorusPointSet.from_values(seed).points],
                     "candidate_sizes": {str(k): v for k, v in sorted(sizes.items())},
                     "dyadic": traj.chosen_exact is not None,
                     "d_final": float(extreme_discrepancy(traj.points).d_extreme)})
    return {"kernel": kernel.name, "n": n, "policy": policy, "runs": rows}


__all__ = [
    "CheckReport", "MatchResult", "match_trajectory_to_permutation", "check_greedy_equals_vdc",
    "check_round_trip", "check_random_policies", "check_candidate_count",
    "check_family_equivalences", "check_geometric_agreement", "check_psi_identities",
    "check_self_similarity", "swapping_holds", "pair_energy_profile", "discrepancy_envelope",
    "explore_multi_point_seeds", "classical_table", "default_workers",
]
