"""Smooth circle diffeomorphisms conjugate to an irrational rotation.

A diffeomorphism ``f`` is stored as a pair ``(h, rho)``: the conjugator's
lift ``H`` and the rotation number ``rho``, with ``f = h o R_rho o h^{-1}``
and ``R_rho`` the rotation by ``2*pi*rho``.  Every iterate ``f^n`` (and every
iterate of the square root ``T = h o R_{rho/2} o h^{-1}``) is evaluated by a
single conjugation, never by repeated composition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy.optimize import minimize_scalar

from . import fourier
from .errors import (
    InversionFailure,
    NonPositiveDensity,
    NotADiffeomorphism,
    RationalRotation,
)

TWO_PI = 2.0 * np.pi
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

_INVERSION_TOL = 1e-13
_INVERSION_MAXITER = 100


@dataclass(frozen=True)
class CircleLift:
    """Degree-one lift ``H(t) = t + c + sum_k a_k sin(k t + phi_k)``.

    ``modes`` is a sequence of ``(k, a_k, phi_k)`` with ``k >= 1``.  The
    constant ``c = -sum_k a_k sin(phi_k)`` pins ``H(0) = 0`` so that the
    conjugator fixes ``1``.  ``sum_k k|a_k| < 1`` guarantees ``H' > 0``.
    """

    modes: tuple = ()

    def __post_init__(self):
        modes = tuple((int(k), float(a), float(phi) % TWO_PI) for k, a, phi in self.modes)
        for k, _, _ in modes:
            if k < 1:
                raise ValueError(f"lift frequencies must be >= 1, got {k}")
        if sum(k * abs(a) for k, a, _ in modes) >= 1.0:
            raise NotADiffeomorphism(
                "sum k|a_k| >= 1: the lift derivative may vanish")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def identity(cls) -> "CircleLift":
        return cls(())

    @classmethod
    def sine(cls, amplitude: float, k: int = 1, phase: float = 0.0) -> "CircleLift":
        return cls(((k, amplitude, phase),))

    @property
    def is_identity(self) -> bool:
        return all(a == 0.0 for _, a, _ in self.modes)

    @property
    def offset(self) -> float:
        return -sum(a * math.sin(phi) for _, a, phi in self.modes)

    @property
    def amplitude_bound(self) -> float:
        """Bound on ``|H(t) - t|``."""
        return abs(self.offset) + sum(abs(a) for _, a, _ in self.modes)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = t + self.offset
        for k, a, phi in self.modes:
            out = out + a * np.sin(k * t + phi)
        return out

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.ones_like(t)
        for k, a, phi in self.modes:
            out = out + k * a * np.cos(k * t + phi)
        return out

    def inverse(self, t):
        """Solve ``H(s) = t`` by safeguarded Newton iteration inside a bracket."""
        t = np.asarray(t, dtype=float)
        if self.is_identity:
            return t.copy()
        # H(s + 2pi j) = H(s) + 2pi j, so invert on [0, 2pi) only
        wraps = np.floor(t / TWO_PI)
        t0 = t - TWO_PI * wraps
        b = self.amplitude_bound
        lo = t0 - b - 1e-12
        hi = t0 + b + 1e-12
        s = t0 - self.offset
        for _ in range(_INVERSION_MAXITER):
            r = self(s) - t0
            done = np.abs(r) <= _INVERSION_TOL
            if done.all():
                return s + TWO_PI * wraps
            lo = np.where(r < 0, s, lo)
            hi = np.where(r > 0, s, hi)
            step = s - r / self.derivative(s)
            bad = (step <= lo) | (step >= hi)
            s = np.where(done, s, np.where(bad, 0.5 * (lo + hi), step))
        raise InversionFailure(
            f"lift inversion did not reach {_INVERSION_TOL} in {_INVERSION_MAXITER} steps")


@dataclass(frozen=True)
class CircleDiffeo:
    """``f = h o R_rho o h^{-1}`` with ``rho`` the rotation number of ``f``.

    ``rho`` plays the role of twice the Weyl phase parameter: the algebra
    generated by the induced unitaries has ``UV = exp(2 pi i rho) VU``.
    """

    conjugator: CircleLift
    rotation_number: float

    @property
    def half_rotation(self) -> float:
        """Rotation number of the canonical square root ``T``."""
        return 0.5 * self.rotation_number

    @property
    def weyl_alpha(self) -> float:
        return 0.5 * self.rotation_number

    def iterate(self, k: int, theta):
        """Lift value and derivative of ``T^k`` (so ``f^n`` is ``k = 2n``)."""
        return iterate_lift(self, k, theta)

    def power(self, n: int, theta):
        """Lift value and derivative of ``f^n``."""
        return iterate_lift(self, 2 * n, theta)

    def conjugated_angle(self, k: int, theta):
        """``h^{-1}(T^k(theta)) = h^{-1}(theta) + pi k rho`` as a lift."""
        return self.conjugator.inverse(theta) + np.pi * k * self.rotation_number


def make_diffeo(conjugator: CircleLift, rotation_number) -> CircleDiffeo:
    if isinstance(rotation_number, (Fraction, Rational)) and not isinstance(rotation_number, bool):
        raise RationalRotation(f"rotation number {rotation_number!r} is an exact rational")
    rho = float(rotation_number)
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rotation number must lie in (0, 1), got {rho}")
    if not isinstance(conjugator, CircleLift):
        conjugator = CircleLift(conjugator)
    return CircleDiffeo(conjugator, rho)


def iterate_lift(f: CircleDiffeo, k: int, theta):
    """Return ``(G_k(theta), G_k'(theta))`` for the lift ``G_k`` of ``T^k``."""
    theta = np.asarray(theta, dtype=float)
    H = f.conjugator
    s = H.inverse(theta)
    phi = s + np.pi * k * f.rotation_number
    return H(phi), H.derivative(phi) / H.derivative(s)


@dataclass(frozen=True)
class Cocycle:
    """Radon-Nikodym density ``d_n = F_n'`` of ``f^n`` on a uniform grid."""

    n: int
    samples: np.ndarray = field(repr=False)
    fourier: dict = field(repr=False)

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0]

    @property
    def theta(self) -> np.ndarray:
        return fourier.grid(self.grid_size)

    @property
    def max_modes(self) -> int:
        return self.grid_size // 2 - 1

    def coefficients(self, power: float = 1.0, K: int | None = None) -> np.ndarray:
        """Centred coefficients of ``d_n ** power``."""
        K = self.max_modes if K is None else K
        return fourier.coefficients(self.samples ** power, K)

    def log_derivative(self, K: int | None = None) -> np.ndarray:
        """Centred coefficients of ``(ln d_n)'``."""
        K = self.max_modes if K is None else K
        return fourier.derivative(fourier.coefficients(np.log(self.samples), K))

    def mean(self) -> float:
        return float(self.samples.mean())


def radon_nikodym(f: CircleDiffeo, n: int, grid_size: int = 1024) -> Cocycle:
    if grid_size < 16 or grid_size & (grid_size - 1):
        raise ValueError(f"grid_size must be a power of two >= 16, got {grid_size}")
    theta = fourier.grid(grid_size)
    _, d = f.power(n, theta)
    if np.any(d <= 0):
        raise NonPositiveDensity(f"cocycle d_{n} has non-positive samples")
    K = grid_size // 2 - 1
    coeffs = {
        "d": fourier.coefficients(d, K),
        "inv": fourier.coefficients(1.0 / d, K),
        "sq": fourier.coefficients(d * d, K),
        "log": fourier.coefficients(np.log(d), K),
    }
    return Cocycle(n, d, coeffs)


@dataclass(frozen=True)
class GrowthTable:
    """``gamma_f(n) = sup F_n' v sup F_{-n}'`` with a grid-refinement error bar."""

    entries: dict
    gaps: dict
    grid_size: int

    def __getitem__(self, n: int) -> float:
        return self.entries[abs(n)]

    def running_max(self, N: int) -> float:
        return max(self.entries[j] for j in range(abs(N) + 1))


def _sup_derivative(f: CircleDiffeo, n: int, grid_size: int, polish: bool):
    theta = fourier.grid(grid_size)
    _, d = f.power(n, theta)
    j = int(np.argmax(d))
    best = float(d[j])
    if polish:
        h = TWO_PI / grid_size
        res = minimize_scalar(
            lambda t: -float(f.power(n, np.array([t]))[1][0]),
            bounds=(theta[j] - h, theta[j] + h), method="bounded",
            options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def growth_sequence(f: CircleDiffeo, n_max: int, grid_size: int = 4096,
                    polish: bool = True) -> GrowthTable:
    """Growth sequence on ``0..n_max``.

    Each entry is the grid sup on ``grid_size`` and ``2*grid_size`` points;
    the larger one is kept and their difference reported as the gap.  With
    ``polish`` the sup is additionally refined by a bounded scalar search
    around the grid maximiser, which can only raise the value.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    entries, gaps = {0: 1.0}, {0: 0.0}
    for n in range(1, n_max + 1):
        coarse = max(_sup_derivative(f, n, grid_size, False),
                     _sup_derivative(f, -n, grid_size, False))
        fine = max(_sup_derivative(f, n, 2 * grid_size, polish),
                   _sup_derivative(f, -n, 2 * grid_size, polish))
        entries[n] = max(coarse, fine)
        gaps[n] = abs(fine - coarse)
    return GrowthTable(entries, gaps, grid_size)
