import dataclasses
from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdcgreedy import (SelectionPolicy, TorusPointSet, candidate_minima, find_gap_minimum,
                       greedy_run, greedy_step, kernel_make, parse_kernel, permuted_radical_inverse,
                       point_energy, predicted_minima_dyadic, total_pair_energy, vdc_prefix)
from vdcgreedy.greedy import _start
from vdcgreedy.verify import pair_energy_profile

ZERO = TorusPointSet.from_exact([0])


def grid_minimizers(points, kernel, grid=1 << 14, rel=1e-9):
    """Dense-grid global minimizers, avoiding the points themselves."""
    xs = (np.arange(grid) + 0.5) / grid
    e = np.array([point_energy(points, kernel, x) for x in xs])
    best = e.min()
    return xs[e <= best + rel * (1 + abs(best)) + 1e-6 * np.ptp(e)], best


def test_gap_minimum_examples(logsin, bernoulli2):
    x, e = find_gap_minimum([0.0], 0, logsin)
    assert x == pytest.approx(0.5, abs=1e-12)
    assert e == pytest.approx(1.0 - np.log(2.0), abs=1e-12)
    assert find_gap_minimum([0.0, 0.5], 0, logsin)[0] == pytest.approx(0.25, abs=1e-12)
    assert find_gap_minimum([0.0, 0.5], 1, logsin)[0] == pytest.approx(0.75, abs=1e-12)
    assert find_gap_minimum([0.0, 0.5], 0, bernoulli2)[0] == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(ValueError):
        find_gap_minimum([0.0], 1, logsin)


def test_bernoulli2_can_have_gaps_without_interior_minimum(bernoulli2):
    # a short gap next to a long one: the energy is monotone across the short gap
    assert find_gap_minimum([0.0, 0.05, 0.1], 0, bernoulli2) is None


def test_candidate_examples(logsin, bernoulli2):
    for k in (logsin, bernoulli2):
        assert candidate_minima([0.0, 0.5], k) == pytest.approx([0.25, 0.75], abs=1e-12)
        assert candidate_minima([float(v) for v in vdc_prefix(4)], k) == \
            pytest.approx([1 / 8, 3 / 8, 5 / 8, 7 / 8], abs=1e-12)
        assert candidate_minima([float(v) for v in vdc_prefix(11)], k) == pytest.approx([13 / 16], abs=1e-12)


@pytest.mark.parametrize("n", [3, 5, 6, 11, 12])
def test_candidates_agree_with_grid_search(logsin, bernoulli2, n):
    pts = [float(v) for v in vdc_prefix(n)]
    for k in (logsin, bernoulli2):
        cands = candidate_minima(pts, k)
        grid, _ = grid_minimizers(pts, k)
        # every candidate is within a grid cell of a near-minimal grid point and vice versa
        assert all(np.min(np.abs(grid - c)) < 2 ** -13 for c in cands)
        assert all(np.min(np.abs(np.asarray(cands) - g)) < 2 ** -6 for g in grid)


def test_run_examples(logsin):
    t = greedy_run(ZERO, logsin, 2)
    assert t.chosen == (0.5,)
    assert greedy_run(ZERO, logsin, 3, "smallest").chosen[-1] == 0.25
    assert greedy_run(ZERO, logsin, 3, "largest").chosen[-1] == 0.75
    assert greedy_run(ZERO, logsin, 8).points.exact == tuple(vdc_prefix(8))
    t = greedy_run([0.1, 0.6], logsin, 3)
    assert t.chosen[0] == pytest.approx(0.35, abs=1e-12)
    assert t.chosen_exact is None


def test_step_matches_run(logsin):
    t = _start(ZERO, logsin, SelectionPolicy("largest"), 1e-9)
    for _ in range(9):
        t = greedy_step(t, logsin)
    assert t == greedy_run(ZERO, logsin, 10, "largest")


@pytest.mark.parametrize("policy", ["smallest", "largest", "index:1", "random:3"])
def test_four_points_any_policy(bernoulli2, policy):
    t = greedy_run(ZERO, bernoulli2, 4, policy)
    assert sorted(t.points.exact) == [0, Q(1, 4), Q(1, 2), Q(3, 4)]


def test_predicted_minima_examples():
    assert predicted_minima_dyadic(1) == [Q(1, 2)]
    assert predicted_minima_dyadic(2) == [Q(1, 4), Q(3, 4)]
    assert predicted_minima_dyadic(4) == [Q(k, 8) for k in (1, 3, 5, 7)]
    assert predicted_minima_dyadic(11) == [Q(13, 16)]
    with pytest.raises(ValueError):
        predicted_minima_dyadic(0)


def test_predicted_minima_are_the_next_unvisited_points():
    # with N = n points visited the candidates are the points S_2(k), N <= k < N + 2^{m_1}
    for n in range(1, 300):
        block = sorted(permuted_radical_inverse(k, 2) for k in range(n, n + (n & -n)))
        assert predicted_minima_dyadic(n) == block


@pytest.mark.parametrize("policy", ["largest", "random:7", "index:2"])
def test_candidate_sets_after_power_of_two_do_not_depend_on_policy(bernoulli2, policy):
    t = greedy_run(ZERO, bernoulli2, 32, policy)
    for n in (1, 2, 4, 8, 16):
        assert list(t.candidates_exact[n - 1]) == predicted_minima_dyadic(n)


def test_prefix_is_van_der_corput_bernoulli2(bernoulli2):
    t = greedy_run(ZERO, bernoulli2, 1024)
    assert t.points.exact == tuple(vdc_prefix(1024))


@pytest.mark.slow
def test_prefix_is_van_der_corput_logsin(logsin):
    t = greedy_run(ZERO, logsin, 512)
    assert t.points.exact == tuple(vdc_prefix(512))


@pytest.mark.parametrize("name", ["power:2", "power:4"])
def test_polynomial_and_generic_paths_agree(name):
    k = parse_kernel(name)
    generic = dataclasses.replace(k, poly=None)
    rng = np.random.default_rng(1)
    for _ in range(5):
        pts = np.sort(rng.random(12))
        a = candidate_minima(pts, k)
        b = candidate_minima(pts, generic)
        assert a == pytest.approx(b, abs=1e-10)


def test_golden_fallback_agrees_with_newton(bernoulli2):
    slow = dataclasses.replace(bernoulli2, deriv1=None, deriv2=None, poly=None)
    pts = [0.0, 0.3, 0.45, 0.8]
    assert candidate_minima(pts, slow) == pytest.approx(candidate_minima(pts, bernoulli2), abs=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=5, unique=True))
def test_pair_energy_excess_never_grows(bernoulli2, seed):
    # each greedy point adds at most f(0): its energy is below the kernel mean, 0
    if len(set(np.round(seed, 12))) != len(seed):
        return
    t = greedy_run(seed, bernoulli2, len(seed) + 20)
    prof = pair_energy_profile(t, bernoulli2)
    excess = [total - bound for _, total, bound in prof[len(seed) - 1:]]
    assert all(b <= a + 1e-9 for a, b in zip(excess, excess[1:]))
    assert prof[-1][1] == pytest.approx(total_pair_energy(t.points.points, bernoulli2), abs=1e-8)


def test_pair_energy_bound_from_zero(bernoulli2):
    t = greedy_run(ZERO, bernoulli2, 200, "random:4")
    assert all(total <= bound + 1e-9 for _, total, bound in pair_energy_profile(t, bernoulli2))


def test_minimum_energy_matches_direct_evaluation(logsin):
    t = greedy_run(ZERO, logsin, 20)
    for i, e in enumerate(t.min_energies):
        prefix = t.points.points[: i + 1]
        assert e == pytest.approx(point_energy(prefix, logsin, t.chosen[i]), abs=1e-9)


def test_duplicate_and_empty_seeds_are_rejected(logsin):
    with pytest.raises(ValueError):
        greedy_run([0.25, 0.25], logsin, 4)
    with pytest.raises(ValueError):
        greedy_run([0.5, 0.3], logsin, 1)


def test_random_policy_is_reproducible(logsin):
    a = greedy_run(ZERO, logsin, 40, "random:9")
    b = greedy_run(ZERO, logsin, 40, "random:9")
    c = greedy_run(ZERO, logsin, 40, "random:10")
    assert a == b and a.to_json() == b.to_json()
    assert a.chosen != c.chosen


def test_policy_parsing():
    assert SelectionPolicy.parse("index:3") == SelectionPolicy("index", k=3)
    assert str(SelectionPolicy.parse("random:5")) == "random:5"
    for bad in ("", "index", "index:x", "random:", "smallest:1", "middle"):
        with pytest.raises(ValueError):
            SelectionPolicy.parse(bad)
    assert SelectionPolicy("index", k=5).choose([0.1, 0.2, 0.3], 0) == 2


def test_follow_policy_rejects_non_candidates(logsin):
    with pytest.raises(ValueError):
        greedy_run(ZERO, logsin, 3, SelectionPolicy.follow([0, 0.5, 0.3]))
