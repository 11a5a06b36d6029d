import math

import numpy as np
import pytest

from vdcgreedy import kernel_fourier_coeff, kernel_make, parse_kernel, point_energy, total_pair_energy
from vdcgreedy.kernels import Kernel

CATALOG = ["logsin", "bernoulli2", "power:2", "power:3", "power:4", "power:2.5"]
GRID = np.round(np.arange(1, 100) / 100, 2)


@pytest.mark.parametrize("name", CATALOG)
def test_symmetry(name):
    k = parse_kernel(name)
    assert np.allclose(k(GRID), k(1 - GRID), rtol=0, atol=1e-12)


@pytest.mark.parametrize("name", CATALOG)
def test_strict_convexity(name):
    k = parse_kernel(name)
    t = GRID
    if k.params and k.params[0] > 2:
        # f'' vanishes at the centre for p > 2 (flagged in the kernel notes)
        t = t[t != 0.5]
    assert np.all(k.deriv2(t) > 0)


@pytest.mark.parametrize("name", CATALOG)
def test_derivatives_match_finite_differences(name):
    k = parse_kernel(name)
    h = 1e-5
    t = GRID
    if k.params and k.params[0] > 2:
        # f'' has a cusp at the centre unless p is an even integer
        t = t[t != 0.5]
    fd1 = (k(t + h) - k(t - h)) / (2 * h)
    fd2 = (k(t + h) - 2 * k(t) + k(t - h)) / h ** 2
    assert np.all(np.abs(fd1 - k.deriv1(t)) <= 1e-6 * np.maximum(1.0, np.abs(k.deriv1(t))))
    # second differences lose ~8 digits to cancellation at this step
    assert np.all(np.abs(fd2 - k.deriv2(t)) <= 1e-4 * np.maximum(1.0, np.abs(k.deriv2(t))))


def test_catalog_values():
    assert parse_kernel("logsin")(0.5) == pytest.approx(1 - math.log(2), abs=1e-15)
    b = parse_kernel("bernoulli2")
    assert b(0.5) == pytest.approx(-1 / 12, abs=1e-15)
    assert b(0.3) == pytest.approx(b(0.7), abs=1e-15)
    assert b(0.3) == pytest.approx(1 / 6 - 0.21, abs=1e-15)
    assert b.mean == 0 and parse_kernel("logsin").mean == 1


def test_catalog_errors():
    with pytest.raises(ValueError):
        kernel_make("riesz")
    with pytest.raises(ValueError):
        parse_kernel("power:1.5")
    with pytest.raises(ValueError):
        parse_kernel("power:abc")


def test_fourier_closed_forms():
    b = parse_kernel("bernoulli2")
    assert abs(kernel_fourier_coeff(b, 0)) < 1e-10
    for k in (1, 2, 5, 17):
        assert kernel_fourier_coeff(b, k) == pytest.approx(1 / (2 * math.pi ** 2 * k ** 2), abs=1e-10)
    # -log(2 sin pi t) = sum_k cos(2 pi k t) / k
    ls = parse_kernel("logsin")
    assert kernel_fourier_coeff(ls, 0) == pytest.approx(1.0, abs=1e-10)
    for k in (1, 2, 7):
        assert kernel_fourier_coeff(ls, k) == pytest.approx(1 / (2 * k), abs=1e-10)
    # (t - 1/2)^2 differs from bernoulli2 by a constant
    p2 = parse_kernel("power:2")
    assert kernel_fourier_coeff(p2, 3) == pytest.approx(1 / (18 * math.pi ** 2), abs=1e-10)
    assert kernel_fourier_coeff(p2, -3) == pytest.approx(kernel_fourier_coeff(p2, 3), abs=1e-12)


def test_bernoulli2_fourier_lower_bound():
    b = parse_kernel("bernoulli2")
    for k in range(1, 65):
        assert kernel_fourier_coeff(b, k) >= 0.05 / k ** 2


def test_asymmetric_kernel_is_rejected_by_quadrature():
    skew = Kernel("skew", lambda t: np.asarray(t, dtype=float), None, None, False, 0.5)
    with pytest.raises(ArithmeticError):
        kernel_fourier_coeff(skew, 1)


def test_energies():
    b = parse_kernel("bernoulli2")
    assert point_energy([0.0], b, 0.5) == pytest.approx(-1 / 12, abs=1e-15)
    assert point_energy([0.0, 0.5], b, 0.25) == pytest.approx(-1 / 24, abs=1e-15)
    assert point_energy([0.0], parse_kernel("logsin"), 0.0) == math.inf
    assert total_pair_energy([0.0, 0.5], b) == pytest.approx(1 / 6, abs=1e-15)
    assert total_pair_energy([0.37], b) == pytest.approx(1 / 6, abs=1e-15)
    assert total_pair_energy([0, 1 / 3, 2 / 3], b) == pytest.approx(1 / 6, abs=1e-14)
    with pytest.raises(ValueError):
        total_pair_energy([0.0, 0.5], parse_kernel("logsin"))


@pytest.mark.parametrize("name", CATALOG)
def test_two_point_function_is_minimal_at_a_quarter(name):
    # g(x) = f(x) + f(1/2 + x) on [0, 1/2] has its unique minimum at 1/4
    k = parse_kernel(name)

    def g(x):
        return float(k(x) + k(0.5 + x))

    def dg(x):
        return float(k.deriv1(x) + k.deriv1(0.5 + x))

    lo, hi = 1e-6, 0.5 - 1e-6
    assert dg(lo) < 0 < dg(hi)
    while hi - lo > 1e-12:
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if dg(mid) < 0 else (lo, mid)
    assert (lo + hi) / 2 == pytest.approx(0.25, abs=1e-9)
    xs = np.linspace(0.01, 0.49, 49)
    assert np.allclose([g(x) for x in xs], [g(0.5 - x) for x in xs], atol=1e-12)
