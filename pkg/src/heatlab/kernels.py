"""Closed-form solution catalog: Gaussian kernel, derivatives, dipole,
travelling wave, blow-up, caloric polynomials, and a finite-difference
caloricity check.

Point evaluators accept either a single coordinate array (1D) or a tuple of
coordinate arrays (one per axis); scalars work too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EvaluationPastBlowUp, NonPositiveTime, OrderTooHigh

MAX_DERIVATIVE_ORDER = 12


def _coords(xs):
    """Normalize point input to a tuple of float arrays."""
    if isinstance(xs, (tuple, list)):
        return tuple(np.asarray(c, dtype=float) for c in xs)
    return (np.asarray(xs, dtype=float),)


def _maybe_scalar(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def gaussian(xs, t, mass: float = 1.0, center=None, diffusivity: float = 1.0):
    """mass * (4 pi a t)^(-N/2) exp(-|x - center|^2 / (4 a t)), a = diffusivity."""
    if not t > 0:
        raise NonPositiveTime(f"gaussian kernel needs t > 0, got {t}")
    coords = _coords(xs)
    dim = len(coords)
    c = np.zeros(dim) if center is None else np.atleast_1d(np.asarray(center, dtype=float))
    four_at = 4.0 * diffusivity * t
    r2 = sum((coords[i] - c[i]) ** 2 for i in range(dim))
    return _maybe_scalar(mass * (math.pi * four_at) ** (-dim / 2.0)
                         * np.exp(-r2 / four_at))


@lru_cache(maxsize=None)
def _hermite_phys_coeffs(k: int) -> tuple[int, ...]:
    """Integer coefficients of the physicists' Hermite polynomial H_k.

    H_0 = 1, H_{k+1}(z) = 2 z H_k(z) - H_k'(z); then
    (d/dz)^k exp(-z^2) = (-1)^k H_k(z) exp(-z^2).
    """
    if k == 0:
        return (1,)
    prev = _hermite_phys_coeffs(k - 1)
    out = [0] * (k + 1)
    for i, a in enumerate(prev):
        out[i + 1] += 2 * a           # 2 z H_k
        if i >= 1:
            out[i - 1] -= i * a       # - H_k'
    return tuple(out)


def _polyval(coeffs, z):
    acc = np.zeros_like(z)
    for a in reversed(coeffs):
        acc = acc * z + a
    return acc


def gaussian_derivative(xs, t, alpha):
    """Exact D^alpha G_t(x) for the diffusivity-1 kernel.

    Per axis, d^k/dx^k exp(-x^2/4t) = (-1)^k (4t)^(-k/2) H_k(x/sqrt(4t))
    exp(-x^2/4t) with H_k the physicists' Hermite polynomial.
    """
    if not t > 0:
        raise NonPositiveTime(f"gaussian_derivative needs t > 0, got {t}")
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be nonnegative")
    if sum(alpha) > MAX_DERIVATIVE_ORDER:
        raise OrderTooHigh(
            f"|alpha| = {sum(alpha)} exceeds table order {MAX_DERIVATIVE_ORDER}")
    coords = _coords(xs)
    if len(coords) != len(alpha):
        raise ValueError(f"alpha has {len(alpha)} axes but points have {len(coords)}")
    dim = len(coords)
    four_t = 4.0 * t
    root = math.sqrt(four_t)
    out = (math.pi * four_t) ** (-dim / 2.0) * np.ones(np.broadcast(*coords).shape
                                                       if dim > 1 else coords[0].shape)
    for i in range(dim):
        z = coords[i] / root
        k = alpha[i]
        factor = np.exp(-z * z)
        if k > 0:
            factor = factor * ((-1.0) ** k * root ** (-k)
                               * _polyval(_hermite_phys_coeffs(k), z))
        out = out * factor
    return _maybe_scalar(out)


def dipole(x, t, strength: float = 1.0):
    """1D dipole D(x, t) = -d/dx G_t(x), exact constants included."""
    if not t > 0:
        raise NonPositiveTime(f"dipole needs t > 0, got {t}")
    x = np.asarray(x, dtype=float)
    return _maybe_scalar(strength * (4.0 * math.pi * t) ** -0.5
                         * (x / (2.0 * t)) * np.exp(-x * x / (4.0 * t)))


# ---------------------------------------------------------------------------
# special solutions


@dataclass(frozen=True)
class GaussianSolution:
    """mass * G(x - center, t + time_shift); integrable, evolves exactly."""
    mass: float = 1.0
    center: float | tuple = 0.0
    time_shift: float = 0.0
    diffusivity: float = 1.0
    integrable = True

    def __call__(self, xs, t):
        return gaussian(xs, t + self.time_shift, self.mass, self.center,
                        self.diffusivity)


@dataclass(frozen=True)
class GaussianDerivativeSolution:
    """scale * D^alpha G(x, t + time_shift) (diffusivity 1); zero total mass
    for |alpha| >= 1."""
    alpha: tuple
    scale: float = 1.0
    time_shift: float = 0.0
    integrable = True

    def __call__(self, xs, t):
        return self.scale * gaussian_derivative(xs, t + self.time_shift, self.alpha)


@dataclass(frozen=True)
class DipoleSolution:
    """strength * D(x, t + time_shift), 1D."""
    strength: float = 1.0
    time_shift: float = 0.0
    integrable = True

    def __call__(self, xs, t):
        (x,) = _coords(xs)
        return dipole(x, t + self.time_shift, self.strength)


@dataclass(frozen=True)
class TravellingWave:
    """U(x, t) = C exp(c^2 t + c x), 1D; grows at infinity, evaluation only."""
    amplitude: float = 1.0
    speed: float = 1.0
    integrable = False

    def __call__(self, xs, t):
        (x,) = _coords(xs)
        c = self.speed
        return _maybe_scalar(self.amplitude * np.exp(c * c * t + c * x))


@dataclass(frozen=True)
class BlowUpSolution:
    """U(x, t) = C (T - t)^(-N/2) exp(|x|^2 / 4(T - t)), defined for t < T."""
    amplitude: float = 1.0
    blowup_time: float = 1.0
    dim: int = 1
    integrable = False

    def __call__(self, xs, t):
        if t >= self.blowup_time:
            raise EvaluationPastBlowUp(
                f"t = {t} is at or past the blow-up time {self.blowup_time}")
        coords = _coords(xs)
        tau = self.blowup_time - t
        r2 = sum(c * c for c in coords)
        return _maybe_scalar(self.amplitude * tau ** (-self.dim / 2.0)
                             * np.exp(r2 / (4.0 * tau)))


@dataclass(frozen=True)
class CaloricPolynomial:
    """The polynomial solutions u = 1 and u = |x|^2 + 2 N t."""
    kind: str = "one"          # "one" | "square_plus_2nt"
    dim: int = 1
    integrable = False

    def __call__(self, xs, t):
        coords = _coords(xs)
        if self.kind == "one":
            return _maybe_scalar(np.ones(np.broadcast(*coords).shape
                                         if len(coords) > 1 else coords[0].shape))
        if self.kind == "square_plus_2nt":
            r2 = sum(c * c for c in coords)
            return _maybe_scalar(r2 + 2.0 * self.dim * t)
        raise ValueError(f"unknown caloric polynomial kind {self.kind!r}")


def heat_residual(u, xs, t, diffusivity: float = 1.0,
                  dx: float = 1e-3, dt: float = 1e-3) -> float:
    """d_t u - a * Lap u at one space-time point by centered differences.

    The universal "is this caloric" check; returns the residual rather than
    raising.
    """
    coords = _coords(xs)
    point = tuple(float(c) for c in coords)
    if t - dt <= 0:
        dt = t / 2.0
    du_dt = (u(point, t + dt) - u(point, t - dt)) / (2.0 * dt)
    lap = 0.0
    center = u(point, t)
    for i in range(len(point)):
        plus = list(point)
        minus = list(point)
        plus[i] += dx
        minus[i] -= dx
        lap += (u(tuple(plus), t) - 2.0 * center + u(tuple(minus), t)) / dx ** 2
    return float(du_dt - diffusivity * lap)
