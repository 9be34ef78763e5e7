"""Deformed derivation and deformed Fredholm commutator on truncations.

Everything lives on the doubled GNS space, truncated to levels
``|n| <= N`` and modes ``|k| <= M``.  The Dirac operator, its phase and
``|D|^{-1}`` are level-diagonal, and on each level they are 2x2 block
matrices in the (upper, lower) components:

    D_n = [[0, B_n], [B_n^*, 0]]        F_n = [[0, U V^*], [V U^*, 0]]
    |D_n|^{-1} = diag(U S^{-1} U^*, V S^{-1} V^*)     with B_n = U S V^*

An element ``A`` of the operator system acts diagonally in the components,
so ``Gamma A Gamma^{-1}``, ``d_T(A)`` and both sides of the commutator
formula reduce to pairs of ``(2M+1)``-square matrices per level pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, svd, svdvals

from . import fourier
from .circle import CircleDiffeo, radon_nikodym
from .dirac import TAIL_TOL, assemble_block, default_grid
from .errors import CutoffTooSmall, SingularD


# ----------------------------------------------------------------- elements

@dataclass(frozen=True)
class Term:
    """``coeff * M_{G o f^n}`` (``kind="diagonal"``) or ``coeff * lambda^l`` (``"shift"``).

    ``poly`` holds the Laurent coefficients ``{m: c_m}`` of ``G(z) = sum c_m z^m``.
    """

    kind: str
    coeff: complex = 1.0
    poly: tuple = ()
    shift: int = 0

    def star(self) -> "Term":
        if self.kind == "diagonal":
            return Term("diagonal", self.coeff.conjugate(),
                        tuple((-m, complex(c).conjugate()) for m, c in self.poly))
        return Term("shift", complex(self.coeff).conjugate(), shift=-self.shift)


@dataclass(frozen=True)
class ElementSpec:
    """A finite combination of generators, compressed by ``P_N`` on both sides."""

    terms: tuple
    N: int

    @classmethod
    def identity(cls, N: int, coeff: complex = 1.0) -> "ElementSpec":
        return cls((Term("diagonal", complex(coeff), ((0, 1.0),)),), N)

    @classmethod
    def diagonal(cls, poly: dict, N: int, coeff: complex = 1.0) -> "ElementSpec":
        items = tuple(sorted((int(m), complex(c)) for m, c in poly.items()))
        return cls((Term("diagonal", complex(coeff), items),), N)

    @classmethod
    def monomial(cls, m: int, N: int) -> "ElementSpec":
        return cls.diagonal({m: 1.0}, N)

    @classmethod
    def shift(cls, l: int, N: int, coeff: complex = 1.0) -> "ElementSpec":
        return cls((Term("shift", complex(coeff), shift=int(l)),), N)

    def __add__(self, other: "ElementSpec") -> "ElementSpec":
        if other.N != self.N:
            raise ValueError("elements compressed at different N")
        return ElementSpec(self.terms + other.terms, self.N)

    def star(self) -> "ElementSpec":
        return ElementSpec(tuple(t.star() for t in self.terms), self.N)

    @property
    def max_shift(self) -> int:
        return max((abs(t.shift) for t in self.terms), default=0)

    def pairs(self, levels) -> list:
        """Level pairs ``(row, col)`` on which the compressed element can be nonzero."""
        lv = {n for n in levels if abs(n) <= self.N}
        out = set()
        for t in self.terms:
            l = t.shift if t.kind == "shift" else 0
            out.update((n, n - l) for n in lv if n - l in lv)
        return sorted(out)


# --------------------------------------------------------------- level data

class LevelData:
    """Per-level samples of ``d_n`` and of the lift ``F_n`` on a common grid."""

    def __init__(self, f: CircleDiffeo, M: int):
        self.f, self.M = f, M
        self.size = default_grid(M)
        self.theta = fourier.grid(self.size)
        self._d, self._angle = {}, {}

    def density(self, n: int) -> np.ndarray:
        if n not in self._d:
            self._d[n] = radon_nikodym(self.f, n, self.size).samples
        return self._d[n]

    def angle(self, n: int) -> np.ndarray:
        if n not in self._angle:
            self._angle[n] = self.f.power(n, self.theta)[0]
        return self._angle[n]

    def toeplitz(self, samples: np.ndarray, check_tail: bool = False) -> np.ndarray:
        c = fourier.coefficients(samples, 2 * self.M)
        if check_tail and fourier.tail_fraction(c, self.M) > TAIL_TOL:
            raise CutoffTooSmall(f"Fourier tail beyond M={self.M} exceeds {TAIL_TOL}")
        return fourier.toeplitz_matrix(c, self.M)


@dataclass
class PairBlocks:
    """Component matrices of ``A``, ``Gamma^{+-1} A Gamma^{-+1}`` and ``d_T(A)/i`` on one level pair."""

    A: np.ndarray
    Xu: np.ndarray
    Xl: np.ndarray
    Yu: np.ndarray
    Yl: np.ndarray
    dU: np.ndarray
    dL: np.ndarray

    def __iadd__(self, other: "PairBlocks") -> "PairBlocks":
        for name in ("A", "Xu", "Xl", "Yu", "Yl", "dU", "dL"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self


def _poly_values(poly, angle):
    return sum(c * np.exp(1j * m * angle) for m, c in poly)


def _poly_derivative_values(poly, angle):
    # theta-derivative of G(e^{i theta}), evaluated at angle
    return sum(1j * m * c * np.exp(1j * m * angle) for m, c in poly)


def _term_blocks(term: Term, r: int, c: int, data: LevelData, eta: float) -> PairBlocks | None:
    if term.kind == "diagonal":
        if r != c:
            return None
        ang = data.angle(r)
        A = term.coeff * data.toeplitz(_poly_values(term.poly, ang))
        dU = term.coeff * data.toeplitz(_poly_derivative_values(term.poly, ang))
        return PairBlocks(A, A, A, A, A, dU, -dU)
    if term.kind == "shift":
        l = term.shift
        if r - c != l:
            return None
        dr, dc = data.density(r), data.density(c)
        s = term.coeff
        m = 2 * data.M + 1
        T = data.toeplitz
        return PairBlocks(
            s * np.eye(m),
            s * T(dr ** (1 - eta) * dc ** (eta - 1)),
            s * T(dr ** eta * dc ** (-eta)),
            s * T(dr ** (eta - 1) * dc ** (1 - eta)),
            s * T(dr ** (-eta) * dc ** eta),
            -l * s * T(dr ** (eta - 1) * dc ** (-eta), check_tail=True),
            -l * s * T(dr ** (-eta) * dc ** (eta - 1), check_tail=True),
        )
    raise ValueError(f"unknown term kind {term.kind!r}")


def element_blocks(A: ElementSpec, data: LevelData, eta: float, levels) -> dict:
    out = {}
    for r, c in A.pairs(levels):
        acc = None
        for t in A.terms:
            b = _term_blocks(t, r, c, data, eta)
            if b is None:
                continue
            if acc is None:
                acc = b
            else:
                acc += b
        if acc is not None:
            out[(r, c)] = acc
    return out


# ----------------------------------------------------------- block algebra

def _permutation_like(keys) -> bool:
    rows = [r for r, _ in keys]
    cols = [c for _, c in keys]
    return len(set(rows)) == len(rows) and len(set(cols)) == len(cols)


def assemble(pieces: dict, levels, m: int, rows=None, cols=None) -> np.ndarray:
    """Dense level-block matrix from ``{(r, c): matrix}``; optional index restriction."""
    idx = {n: j for j, n in enumerate(levels)}
    out = np.zeros((len(levels) * m, len(levels) * m), dtype=complex)
    for (r, c), X in pieces.items():
        out[idx[r] * m:(idx[r] + 1) * m, idx[c] * m:(idx[c] + 1) * m] = X
    if rows is not None:
        out = out[np.ix_(rows, cols)]
    return out


def block_singular_values(pieces: dict, levels, m: int) -> np.ndarray:
    """Singular values, descending; per block when each level occurs once per side."""
    if not pieces:
        return np.zeros(0)
    if _permutation_like(pieces.keys()):
        sv = np.concatenate([svdvals(X) for X in pieces.values()])
    else:
        sv = svdvals(assemble(pieces, levels, m))
    return np.sort(sv)[::-1]


def block_norm(pieces: dict, levels, m: int) -> float:
    sv = block_singular_values(pieces, levels, m)
    return float(sv[0]) if sv.size else 0.0


# -------------------------------------------------------------- derivation

@dataclass
class DerivationResult:
    """``d_T(A) = i [[0, U], [L, 0]]`` with ``U``, ``L`` stored per level pair."""

    upper: dict = field(repr=False)
    lower: dict = field(repr=False)
    levels: tuple
    M: int
    norm: float

    def matrix(self) -> np.ndarray:
        m = 2 * self.M + 1
        U = assemble(self.upper, self.levels, m)
        L = assemble(self.lower, self.levels, m)
        Z = np.zeros_like(U)
        return 1j * np.block([[Z, U], [L, Z]])


def _levels(N: int, drop_kernel: bool) -> tuple:
    return tuple(n for n in range(-N, N + 1) if not (drop_kernel and n == 0))


def deformed_derivation(A: ElementSpec, f: CircleDiffeo, N: int, M: int, eta: float = 0.0,
                        data: LevelData | None = None) -> DerivationResult:
    if N < 1 or M < 16:
        raise ValueError("need N >= 1 and M >= 16")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    data = data or LevelData(f, M)
    levels = _levels(N, drop_kernel=False)
    blocks = element_blocks(A, data, eta, levels)
    upper = {k: b.dU for k, b in blocks.items() if b.dU.any()}
    lower = {k: b.dL for k, b in blocks.items() if b.dL.any()}
    m = 2 * M + 1
    norm = max(block_norm(upper, levels, m), block_norm(lower, levels, m))
    return DerivationResult(upper, lower, levels, M, norm)


def element_norm(A: ElementSpec, f: CircleDiffeo, N: int, M: int,
                 data: LevelData | None = None) -> float:
    """Operator norm of ``P_N pi(A) P_N`` on the truncated GNS space."""
    data = data or LevelData(f, M)
    levels = _levels(N, drop_kernel=False)
    blocks = element_blocks(A, data, 0.0, levels)
    return block_norm({k: b.A for k, b in blocks.items()}, levels, 2 * M + 1)


def triple_norm(A: ElementSpec, f: CircleDiffeo, N: int, M: int, eta: float = 0.0) -> float:
    """``||A|| + ||d_T(A)||`` on the truncation."""
    data = LevelData(f, M)
    return element_norm(A, f, N, M, data) + deformed_derivation(A, f, N, M, eta, data).norm


# ---------------------------------------------------------------- Fredholm

@dataclass
class PolarLevel:
    """``B_n = U S V^*`` and the pieces of ``D_n``, ``F_n``, ``|D_n|^{-1}``."""

    B: np.ndarray
    phase: np.ndarray          # U V^*: upper-right block of F_n
    inv_upper: np.ndarray      # U S^{-1} U^*
    inv_lower: np.ndarray      # V S^{-1} V^*
    smin: float


def polar_level(f: CircleDiffeo, n: int, M: int, eta: float) -> PolarLevel:
    B = assemble_block(f, n, M, eta).upper_right
    U, s, Vh = svd(B)
    if s[-1] < 1e-10:
        raise SingularD(f"level {n} has |lambda| = {s[-1]:.3e}")
    return PolarLevel(B, U @ Vh, (U / s) @ U.conj().T, (Vh.conj().T / s) @ Vh, float(s[-1]))


@dataclass
class CommutatorReport:
    """Both sides of the commutator formula, as ``i [[0, upper], [lower, 0]]`` per level pair."""

    lhs_upper: dict = field(repr=False)
    lhs_lower: dict = field(repr=False)
    rhs_upper: dict = field(repr=False)
    rhs_lower: dict = field(repr=False)
    levels: tuple
    N: int
    M: int
    eta: float
    gap: float
    interior_levels: tuple
    interior_modes: int
    singular_values: np.ndarray = field(repr=False)
    norm_A: float
    norm_derivation: float

    @property
    def triple_norm(self) -> float:
        return self.norm_A + self.norm_derivation

    def _matrix(self, up, lo) -> np.ndarray:
        m = 2 * self.M + 1
        U = assemble(up, self.levels, m)
        L = assemble(lo, self.levels, m)
        Z = np.zeros_like(U)
        return 1j * np.block([[Z, U], [L, Z]])

    @property
    def matrix_lhs(self) -> np.ndarray:
        return self._matrix(self.lhs_upper, self.lhs_lower)

    @property
    def matrix_rhs(self) -> np.ndarray:
        return self._matrix(self.rhs_upper, self.rhs_lower)

    def to_dict(self) -> dict:
        return {
            "N": self.N, "M": self.M, "eta": self.eta, "gap": self.gap,
            "interior_levels": list(self.interior_levels),
            "interior_modes": self.interior_modes,
            "norm_A": self.norm_A, "norm_derivation": self.norm_derivation,
            "triple_norm": self.triple_norm,
            "singular_values": [float(x) for x in self.singular_values],
        }


class FredholmContext:
    """Caches the per-level polar data of ``D`` for repeated commutators."""

    def __init__(self, f: CircleDiffeo, N: int, M: int, eta: float = 0.0):
        if N < 2 or M < 16:
            raise ValueError("need N >= 2 and M >= 16")
        self.f, self.N, self.M, self.eta = f, N, M, float(eta)
        self.levels = _levels(N, drop_kernel=True)
        self.data = LevelData(f, M)
        self.polar = {n: polar_level(f, n, M, eta) for n in self.levels}

    def commutator(self, A: ElementSpec, interior_modes: int | None = None,
                   singular_values: bool = True) -> CommutatorReport:
        M, eta = self.M, self.eta
        m = 2 * M + 1
        half = M // 2 if interior_modes is None else interior_modes
        blocks = element_blocks(A, self.data, eta, self.levels)
        lu, ll, ru, rl = {}, {}, {}, {}
        for (r, c), b in blocks.items():
            pr, pc = self.polar[r], self.polar[c]
            # F X - Y F  +  D X |D|^{-1} - |D|^{-1} Y D, component by component
            lu[(r, c)] = (pr.phase @ b.Xl - b.Yu @ pc.phase
                          + pr.B @ b.Xl @ pc.inv_lower - pr.inv_upper @ b.Yu @ pc.B)
            ll[(r, c)] = (pr.phase.conj().T @ b.Xu - b.Yl @ pc.phase.conj().T
                          + pr.B.conj().T @ b.Xu @ pc.inv_upper
                          - pr.inv_lower @ b.Yl @ pc.B.conj().T)
            # |D|^{-1} d + d |D|^{-1}
            ru[(r, c)] = pr.inv_upper @ b.dU + b.dU @ pc.inv_lower
            rl[(r, c)] = pr.inv_lower @ b.dL + b.dL @ pc.inv_upper

        inner = tuple(n for n in self.levels if abs(n) <= self.N - A.max_shift)
        modes = np.abs(np.arange(-M, M + 1)) <= half
        gap = 0.0
        for part_l, part_r in ((lu, ru), (ll, rl)):
            diff = {k: (part_l[k] - part_r[k])[np.ix_(modes, modes)]
                    for k in part_l if k[0] in inner and k[1] in inner}
            gap = max(gap, block_norm(diff, inner, int(modes.sum())))

        sv = np.zeros(0)
        if singular_values:
            sv = np.sort(np.concatenate([
                block_singular_values(lu, self.levels, m),
                block_singular_values(ll, self.levels, m)]))[::-1]
        norm_d = max(block_norm({k: b.dU for k, b in blocks.items()}, self.levels, m),
                     block_norm({k: b.dL for k, b in blocks.items()}, self.levels, m))
        norm_a = block_norm({k: b.A for k, b in blocks.items()}, self.levels, m)
        return CommutatorReport(lu, ll, ru, rl, self.levels, self.N, M, eta, gap,
                                inner, half, sv, norm_a, norm_d)


def fredholm_commutator(A: ElementSpec, f: CircleDiffeo, N: int, M: int,
                        eta: float = 0.0) -> CommutatorReport:
    """Compare the four-term commutator with ``|D|^{-1} d(A) + d(A) |D|^{-1}``.

    The kernel level ``n = 0`` is removed.  The gap is the operator norm of
    the difference on levels ``|n| <= N - max_shift`` and modes ``|k| <= M/2``.
    """
    return FredholmContext(f, N, M, eta).commutator(A)


def singular_value_sweep(A: ElementSpec, f: CircleDiffeo, N: int, Ms, eta: float = 0.0) -> dict:
    """Singular values of the commutator for each cutoff in ``Ms``."""
    return {M: FredholmContext(f, N, M, eta).commutator(A).singular_values for M in Ms}


# ----------------------------------------------------------- dense forms

def formcomm_matrix(D: np.ndarray, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """``i(FX - YF) + i(D X |D|^{-1} - |D|^{-1} Y D)`` for an invertible hermitian ``D``."""
    w, V = eigh(D)
    if np.abs(w).min() < 1e-10:
        raise SingularD("D has an eigenvalue below 1e-10")
    F = (V * np.sign(w)) @ V.conj().T
    Dinv = (V / np.abs(w)) @ V.conj().T
    return 1j * (F @ X - Y @ F) + 1j * (D @ X @ Dinv - Dinv @ Y @ D)


def two_term_matrix(D: np.ndarray, d: np.ndarray) -> np.ndarray:
    """``|D|^{-1} d + d |D|^{-1}``."""
    w, V = eigh(D)
    Dinv = (V / np.abs(w)) @ V.conj().T
    return Dinv @ d + d @ Dinv


# ------------------------------------------------------- circle example

def _circle_frequencies(K: int) -> np.ndarray:
    k = np.arange(-K, K + 1)
    return k[k != 0]


def _shift_matrix(l: int, K: int) -> np.ndarray:
    k = _circle_frequencies(K)
    pos = {int(v): j for j, v in enumerate(k)}
    S = np.zeros((k.size, k.size))
    for j, v in enumerate(k):
        if int(v) + l in pos:
            S[pos[int(v) + l], j] = 1.0
    return S


@dataclass(frozen=True)
class CircleExample:
    frequencies: np.ndarray
    matrix: np.ndarray

    def entry(self, row_freq: int, col_freq: int) -> float:
        pos = {int(v): j for j, v in enumerate(self.frequencies)}
        return float(self.matrix[pos[row_freq], pos[col_freq]].real)

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.matrix, tol=1e-12))


def circle_example(l: int, K: int, deformed: bool = True) -> CircleExample:
    """Closed-form commutators on the circle with ``D = diag(k)``, ``k != 0``.

    ``deformed``: ``-i [F, a]_T`` with entry ``l (1/|k+l| + 1/|k|)`` at
    ``(k+l, k)``.  Otherwise ``[F, a]`` with entry ``sign(k+l) - sign(k)``,
    i.e. ``2 sign(l)`` on the ``|l| - 1`` columns crossing zero.
    """
    if K < abs(l) + 2:
        raise ValueError("need K >= |l| + 2")
    k = _circle_frequencies(K)
    pos = {int(v): j for j, v in enumerate(k)}
    mat = np.zeros((k.size, k.size))
    for j, v in enumerate(k):
        t = int(v) + l
        if t == 0 or t not in pos:
            continue
        if deformed:
            mat[pos[t], j] = l * (1.0 / abs(t) + 1.0 / abs(v))
        else:
            mat[pos[t], j] = np.sign(t) - np.sign(v)
    return CircleExample(k, mat)


def circle_general(l: int, K: int, deformed: bool = True) -> np.ndarray:
    """The same matrices from the generic dense machinery (trivial cocycle)."""
    k = _circle_frequencies(K)
    D = np.diag(k.astype(float)).astype(complex)
    a = _shift_matrix(l, K).astype(complex)
    if deformed:
        return -1j * formcomm_matrix(D, a, a)
    F = np.diag(np.sign(k)).astype(complex)
    return F @ a - a @ F


def connes_operator(poly: dict, K: int) -> np.ndarray:
    """``B_a = |D| [F, a]`` for ``a = sum_l f_l z^l`` on frequencies ``0 < |k| <= K``."""
    k = _circle_frequencies(K)
    F = np.diag(np.sign(k))
    a = sum(c * _shift_matrix(l, K) for l, c in poly.items())
    return np.diag(np.abs(k)) @ (F @ a - a @ F)


def connes_bound(poly: dict) -> float:
    """``2 sum_l |l| |f_l|``."""
    return 2.0 * sum(abs(l) * abs(c) for l, c in poly.items())
