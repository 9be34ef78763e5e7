"""Weyl-form noncommutative torus and its GNS / Tomita data.

Symbols are finitely supported maps ``Z^2 -> C``; ``weyl_mul`` is the
twisted convolution realising ``W(a)W(b) = e^{2 pi i alpha sigma(a,b)} W(a+b)``
with ``sigma((m,n),(p,q)) = mq - pn``.  Here ``alpha`` is the Weyl phase
parameter, i.e. half the rotation number of the diffeomorphism.

The GNS space is truncated to levels ``-N..N`` and Fourier modes ``-M..M``;
a :class:`GNSVector` stores an array of shape ``(2N+1, 2M+1)``.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass

import numpy as np

from . import fourier
from .circle import CircleDiffeo, radon_nikodym
from .errors import UnsupportedSymbol

_ZERO_TOL = 0.0


class Symbol:
    """Finitely supported amplitude map ``(m, n) -> complex``."""

    __slots__ = ("_data",)

    def __init__(self, data=None):
        items = dict(data or {})
        self._data = {(int(m), int(n)): complex(v) for (m, n), v in items.items()
                      if abs(complex(v)) > _ZERO_TOL}

    @classmethod
    def delta(cls, m: int, n: int, value: complex = 1.0) -> "Symbol":
        return cls({(m, n): value})

    @classmethod
    def random(cls, rng: np.random.Generator, size: int, radius: int = 3) -> "Symbol":
        data = {}
        while len(data) < size:
            a = tuple(int(x) for x in rng.integers(-radius, radius + 1, size=2))
            data[a] = complex(rng.normal(), rng.normal())
        return cls(data)

    def items(self):
        return self._data.items()

    def support(self):
        return set(self._data)

    def __getitem__(self, a) -> complex:
        return self._data.get(tuple(a), 0j)

    def __len__(self):
        return len(self._data)

    def __add__(self, other: "Symbol") -> "Symbol":
        out = dict(self._data)
        for a, v in other.items():
            out[a] = out.get(a, 0j) + v
        return Symbol(out)

    def __sub__(self, other: "Symbol") -> "Symbol":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "Symbol":
        return Symbol({a: c * v for a, v in self._data.items()})

    def max_abs_diff(self, other: "Symbol") -> float:
        keys = self.support() | other.support()
        return max((abs(self[a] - other[a]) for a in keys), default=0.0)

    def levels(self) -> set:
        return {n for _, n in self._data}

    def __repr__(self):
        return f"Symbol({self._data!r})"

    def to_json(self) -> str:
        rows = [[m, n, v.real, v.imag] for (m, n), v in sorted(self._data.items())]
        return json.dumps(rows)

    @classmethod
    def from_json(cls, text: str) -> "Symbol":
        return cls({(m, n): complex(re, im) for m, n, re, im in json.loads(text)})


def sigma(a, b) -> int:
    (m, n), (p, q) = a, b
    return m * q - p * n


def weyl_mul(f: Symbol, g: Symbol, alpha: float) -> Symbol:
    """Twisted convolution ``(f*g)(a) = sum_b f(b) g(a-b) e^{-2 pi i alpha sigma(a,b)}``."""
    out = {}
    for b, fb in f.items():
        for c, gc in g.items():
            a = (b[0] + c[0], b[1] + c[1])
            out[a] = out.get(a, 0j) + fb * gc * cmath.exp(-2j * cmath.pi * alpha * sigma(a, b))
    return Symbol(out)


def weyl_star(f: Symbol) -> Symbol:
    return Symbol({(-m, -n): v.conjugate() for (m, n), v in f.items()})


def trace_tau(f: Symbol) -> complex:
    return f[(0, 0)]


@dataclass(frozen=True)
class MeasureCoeffs:
    """Moments ``mu(m) = int z^m dmu`` of a probability measure on the circle."""

    moments: dict

    def __post_init__(self):
        mom = {int(k): complex(v) for k, v in self.moments.items()}
        if abs(mom.get(0, 0j) - 1.0) > 1e-12:
            raise ValueError("a probability measure has mu(0) = 1")
        for k in list(mom):
            mom.setdefault(-k, mom[k].conjugate())
        object.__setattr__(self, "moments", mom)

    def __getitem__(self, m: int) -> complex:
        return self.moments.get(m, 0j)

    @classmethod
    def haar(cls) -> "MeasureCoeffs":
        return cls({0: 1.0})

    @classmethod
    def point_mass(cls, angle: float, K: int) -> "MeasureCoeffs":
        return cls({m: cmath.exp(1j * m * angle) for m in range(-K, K + 1)})

    @classmethod
    def from_density(cls, samples: np.ndarray, K: int) -> "MeasureCoeffs":
        """Moments of ``rho(theta) dtheta/2pi`` for a positive density sampled on a grid."""
        c = fourier.coefficients(np.asarray(samples) / np.mean(samples), K)
        # int z^m rho dm = conj of the m-th Fourier coefficient for real rho
        return cls({m: c[K - m] for m in range(-K, K + 1)})

    @classmethod
    def pushforward(cls, f: CircleDiffeo, K: int, grid_size: int = 1024) -> "MeasureCoeffs":
        """Moments of ``mu_f = m o h``: ``int exp(i m h^{-1}(theta)) dtheta/2pi``."""
        theta = fourier.grid(grid_size)
        u = f.conjugator.inverse(theta)
        return cls({m: complex(np.mean(np.exp(1j * m * u))) for m in range(-K, K + 1)})

    def toeplitz_min_eig(self, K: int) -> float:
        idx = np.arange(K + 1)
        T = np.array([[self[int(i - j)] for j in idx] for i in idx])
        return float(np.linalg.eigvalsh(T).min())


def state_omega(mu: MeasureCoeffs, f: Symbol) -> complex:
    return sum((mu[m] * v for (m, n), v in f.items() if n == 0), 0j)


@dataclass
class GNSVector:
    """Truncated vector of ``(+)_n L^2(T)``: levels ``-N..N``, modes ``-M..M``."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        L, K = self.coeffs.shape
        if L % 2 == 0 or K % 2 == 0:
            raise ValueError("GNSVector shape must be (2N+1, 2M+1)")

    @property
    def N(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def M(self) -> int:
        return (self.coeffs.shape[1] - 1) // 2

    def level(self, n: int) -> np.ndarray:
        return self.coeffs[n + self.N]

    @classmethod
    def zeros(cls, N: int, M: int) -> "GNSVector":
        return cls(np.zeros((2 * N + 1, 2 * M + 1), dtype=complex))

    @classmethod
    def cyclic(cls, N: int, M: int) -> "GNSVector":
        """The GNS cyclic vector: constant 1 at level 0."""
        x = cls.zeros(N, M)
        x.coeffs[N, M] = 1.0
        return x

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, M: int, band: int | None = None) -> "GNSVector":
        """Gaussian coefficients, supported on modes ``|k| <= band``."""
        band = M if band is None else band
        c = np.zeros((2 * N + 1, 2 * M + 1), dtype=complex)
        w = 2 * band + 1
        c[:, M - band: M + band + 1] = rng.normal(size=(2 * N + 1, w)) + 1j * rng.normal(size=(2 * N + 1, w))
        return cls(c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "GNSVector") -> complex:
        return complex(np.vdot(other.coeffs, self.coeffs))

    def restrict(self, n_max: int) -> np.ndarray:
        return self.coeffs[self.N - n_max: self.N + n_max + 1]

    def to_json(self) -> str:
        levels = [[[z.real, z.imag] for z in row] for row in self.coeffs]
        return json.dumps({"N": self.N, "M": self.M, "levels": levels})

    @classmethod
    def from_json(cls, text: str) -> "GNSVector":
        obj = json.loads(text)
        arr = np.array([[complex(re, im) for re, im in row] for row in obj["levels"]])
        if arr.shape != (2 * obj["N"] + 1, 2 * obj["M"] + 1):
            raise ValueError("GNSVector JSON shape does not match N, M")
        return cls(arr)


def _project(values: np.ndarray, M: int) -> np.ndarray:
    return fourier.coefficients(values, M)


def _level_samples(x: GNSVector, n: int, size: int) -> np.ndarray:
    return fourier.synthesize(x.level(n), size)


def gns_apply(f: Symbol, diffeo: CircleDiffeo, x: GNSVector,
              convention: str = "diagonal") -> GNSVector:
    """Apply ``pi_omega(W(f))`` to a truncated GNS vector.

    ``convention="diagonal"`` (default) uses the operator-system form: row-0
    symbols act as ``M_{F o f^n}`` with ``F(z) = sum_m f(m,0) z^m`` and
    ``delta_{(0,l)}`` as the ``l``-step shift.  Any other support raises
    :class:`UnsupportedSymbol`.

    ``convention="gns"`` uses the representation
    ``(pi(W(f)) g)_n = sum_l (f^(l) o h^{-1} o T^{2n-l}) g_{n-l}`` and accepts
    every symbol; it is a genuine *-representation, so products and adjoints
    should be checked with it.  The two coincide for the identity conjugator.

    Levels pushed outside ``-N..N`` are dropped; products are formed on an
    oversampled grid and projected back to modes ``-M..M``.
    """
    N, M = x.N, x.M
    size = fourier.oversampled_size(M)
    theta = fourier.grid(size)
    rows = {}
    for (m, l), v in f.items():
        rows.setdefault(l, {})[m] = v
    if convention == "diagonal":
        for l, row in rows.items():
            if l != 0 and set(row) != {0}:
                raise UnsupportedSymbol(
                    "diagonal convention accepts only row-0 symbols and pure shifts")
    elif convention != "gns":
        raise ValueError(f"unknown convention {convention!r}")

    out = np.zeros_like(x.coeffs)
    for n in range(-N, N + 1):
        acc = np.zeros(size, dtype=complex)
        touched = False
        for l, row in rows.items():
            src = n - l
            if abs(src) > N:
                continue
            ms = np.array(list(row))
            amps = np.array([row[m] for m in ms])
            if convention == "gns":
                angle = diffeo.conjugated_angle(2 * n - l, theta)
                mult = np.exp(1j * np.multiply.outer(angle, ms)) @ amps
            elif l == 0:
                angle, _ = diffeo.power(n, theta)
                mult = np.exp(1j * np.multiply.outer(angle, ms)) @ amps
            else:
                mult = np.full(size, amps[0])
            acc += mult * _level_samples(x, src, size)
            touched = True
        if touched:
            out[n + N] = _project(acc, M)
    return GNSVector(out)


def convention_discrepancy(f: Symbol, diffeo: CircleDiffeo, x: GNSVector) -> float:
    """Norm gap between the two GNS conventions on a generator-shaped symbol."""
    a = gns_apply(f, diffeo, x, "gns")
    b = gns_apply(f, diffeo, x, "diagonal")
    return float(np.linalg.norm(a.coeffs - b.coeffs))


def _compose_level(coeffs: np.ndarray, angle: np.ndarray, M: int) -> np.ndarray:
    """Samples of ``x(angle)`` for a level with centred coefficients."""
    return fourier.evaluate(coeffs, angle)


def modular_apply(which: str, diffeo: CircleDiffeo, x: GNSVector, t: float = 1.0,
                  cocycles: dict | None = None) -> GNSVector:
    """Tomita data on the truncated GNS space.

    ``which`` is ``"S"``, ``"Delta"`` (the power ``Delta^t``) or ``"J"``:

    * ``(S x)_n = conj(x_{-n} o f^n)``
    * ``(Delta^t x)_n = d_n^t x_n``
    * ``(J x)_n = d_n^{1/2} conj(x_{-n} o f^n)``
    """
    N, M = x.N, x.M
    size = fourier.oversampled_size(M)
    theta = fourier.grid(size)
    out = np.zeros_like(x.coeffs)
    for n in range(-N, N + 1):
        if which == "Delta":
            d = _cocycle_samples(diffeo, n, size, cocycles)
            vals = d ** t * _level_samples(x, n, size)
        elif which in ("S", "J"):
            angle, d = diffeo.power(n, theta)
            vals = np.conj(_compose_level(x.level(-n), angle, M))
            if which == "J":
                vals = np.sqrt(d) * vals
        else:
            raise ValueError(f"unknown modular operator {which!r}")
        out[n + N] = _project(vals, M)
    return GNSVector(out)


def _cocycle_samples(diffeo: CircleDiffeo, n: int, size: int, cache: dict | None):
    if cache is not None and (n, size) in cache:
        return cache[(n, size)]
    d = radon_nikodym(diffeo, n, size).samples
    if cache is not None:
        cache[(n, size)] = d
    return d
