"""Admissible interaction functions on [0, 1] and energies of point sets.

A kernel ``f`` is admissible when ``f(t) = f(1 - t)``, it is twice
differentiable on (0, 1) and ``f'' > 0`` there.  Because of the symmetry,
``f(|x - y|)`` only depends on ``x - y`` modulo 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .points import TorusPointSet

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Kernel:
    name: str
    eval: ArrayFn
    deriv1: ArrayFn | None
    deriv2: ArrayFn | None
    singular_at_zero: bool
    mean: float
    params: tuple[float, ...] = ()
    # ascending coefficients in t when f is a polynomial on [0, 1]
    poly: tuple[float, ...] | None = field(default=None, repr=False)
    # exact value of f(0) for bounded kernels
    at_zero: float | None = None
    notes: str = ""

    def __call__(self, t):
        return self.eval(np.asarray(t, dtype=float))


def _logsin_eval(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return 1.0 - np.log(2.0 * np.abs(np.sin(np.pi * t)))


def _logsin_d1(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return -np.pi / np.tan(np.pi * t)


def _logsin_d2(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return (np.pi / np.sin(np.pi * t)) ** 2


def _logsin() -> Kernel:
    # log(2 sin(pi t)) integrates to 0 over [0, 1]
    return Kernel("logsin", _logsin_eval, _logsin_d1, _logsin_d2,
                  singular_at_zero=True, mean=1.0)


def _bernoulli2() -> Kernel:
    return Kernel(
        "bernoulli2",
        lambda t: np.asarray(t, dtype=float) ** 2 - np.asarray(t, dtype=float) + 1.0 / 6.0,
        lambda t: 2.0 * np.asarray(t, dtype=float) - 1.0,
        lambda t: np.full_like(np.asarray(t, dtype=float), 2.0),
        singular_at_zero=False,
        mean=0.0,
        poly=(1.0 / 6.0, -1.0, 1.0),
        at_zero=1.0 / 6.0,
    )


def _power(p: float) -> Kernel:
    if not p >= 2:
        raise ValueError(f"power kernel needs p >= 2, got {p}")

    def f(t):
        return np.abs(np.asarray(t, dtype=float) - 0.5) ** p

    def d1(t):
        u = np.asarray(t, dtype=float) - 0.5
        return p * np.sign(u) * np.abs(u) ** (p - 1)

    def d2(t):
        u = np.asarray(t, dtype=float) - 0.5
        return p * (p - 1) * np.abs(u) ** (p - 2)

    poly = None
    if float(p).is_integer() and int(p) % 2 == 0:
        k = int(p)
        # (t - 1/2)^k expanded in powers of t
        poly = tuple(math.comb(k, i) * (-0.5) ** (k - i) for i in range(k + 1))
    notes = "" if p == 2 else "second derivative vanishes at t = 1/2"
    return Kernel(f"power:{p:g}", f, d1, d2, singular_at_zero=False,
                  mean=0.5 ** p / (p + 1), params=(float(p),), poly=poly,
                  at_zero=0.5 ** p, notes=notes)


def kernel_make(name: str, params=()) -> Kernel:
    """Build a catalog kernel: ``logsin``, ``bernoulli2`` or ``power`` (params ``(p,)``)."""
    params = tuple(params)
    if name == "logsin":
        return _logsin()
    if name == "bernoulli2":
        return _bernoulli2()
    if name == "power":
        if len(params) != 1:
            raise ValueError("power kernel takes exactly one parameter p")
        return _power(float(params[0]))
    raise ValueError(f"unknown kernel {name!r}")


def parse_kernel(text: str) -> Kernel:
    """Parse the CLI grammar ``logsin | bernoulli2 | power:<p>``."""
    text = text.strip()
    if text.startswith("power:"):
        try:
            p = float(text.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"malformed power kernel {text!r}") from None
        return kernel_make("power", (p,))
    return kernel_make(text)


# Fourier coefficients ----------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gauss_panels(edges: np.ndarray, g: ArrayFn) -> float:
    a, b = edges[:-1, None], edges[1:, None]
    x = 0.5 * (b - a) * _GL_NODES[None, :] + 0.5 * (a + b)
    w = 0.5 * (b - a) * _GL_WEIGHTS[None, :]
    return float(np.sum(w * g(x)))


def _graded_edges(k: int, depth: int, panels: int) -> np.ndarray:
    # geometric panels 2^-depth .. 2^-4 toward each endpoint, uniform in between
    n_uniform = max(panels, 8 * abs(k))
    inner = np.linspace(2.0 ** -4, 1 - 2.0 ** -4, n_uniform + 1)
    left = 2.0 ** -np.arange(depth, 4, -1, dtype=float)
    return np.concatenate([[0.0], left, inner, (1 - left)[::-1], [1.0]])


def kernel_fourier_coeff(kernel: Kernel, k: int, tol: float = 1e-10,
                         panels: int = 2 ** 10) -> float:
    """``int_0^1 f(x) exp(-2 pi i k x) dx``, real by symmetry of ``f``.

    Quadrature is 16-point Gauss-Legendre per panel.  Bounded kernels use
    ``panels`` uniform panels (at least 8 per period of the exponential).
    Singular kernels add panels graded geometrically toward both endpoints;
    the grading depth doubles until two refinements agree to ``tol``.
    """
    k = int(k)
    w = 2.0 * np.pi * k

    def re(x):
        return kernel.eval(x) * np.cos(w * x)

    def im(x):
        return -kernel.eval(x) * np.sin(w * x)

    if not kernel.singular_at_zero:
        n = 2 * max(panels // 2, 4 * abs(k))
        edges = np.linspace(0.0, 1.0, n + 1)
        real = _gauss_panels(edges, re)
        imag = _gauss_panels(edges, im)
    else:
        depth = 16
        prev = None
        while True:
            edges = _graded_edges(k, depth, 64)
            real = _gauss_panels(edges, re)
            if prev is not None and abs(real - prev) < tol:
                break
            if depth > 1024:
                raise ArithmeticError(f"Fourier quadrature for {kernel.name} did not converge")
            prev = real
            depth *= 2
        imag = _gauss_panels(edges, im)
    if abs(imag) > tol:
        raise ArithmeticError(f"imaginary part {imag:g} exceeds {tol:g}; kernel not symmetric?")
    return real


# energies ----------------------------------------------------------------

def _as_array(points) -> np.ndarray:
    if isinstance(points, TorusPointSet):
        return np.asarray(points.points, dtype=float)
    return np.asarray([float(p) for p in points], dtype=float)


def point_energy(points, kernel: Kernel, x: float) -> float:
    """``sum_k f(|x - x_k|)``; +inf where a singular kernel meets a point."""
    pts = _as_array(points)
    d = np.abs(float(x) - pts)
    if kernel.singular_at_zero and np.any(d == 0.0):
        return math.inf
    return float(np.sum(kernel.eval(d)))


def total_pair_energy(points, kernel: Kernel) -> float:
    """``sum_{k,l} f(|x_k - x_l|)`` including the diagonal."""
    if kernel.singular_at_zero:
        raise ValueError(f"kernel {kernel.name} is singular at 0; pair energy undefined")
    pts = _as_array(points)
    d = np.abs(pts[:, None] - pts[None, :])
    return float(np.sum(kernel.eval(d)))
