"""Fourier-truncated blocks of the (deformed) Dirac operator.

Block ``n`` acts on ``L^2(T) (+) L^2(T)``; with frequency cutoff ``M`` it is the
hermitian matrix ``[[0, B], [B^*, 0]]`` of size ``2(2M+1)`` where

    B = T(d_n^{eta-1}) . diag(ik - n) . T(d_n^{-eta})

and ``T(g)`` is the Toeplitz finite section of multiplication by ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, svdvals, LinAlgError

from . import fourier
from .algebra import GNSVector, modular_apply
from .circle import CircleDiffeo, Cocycle, GrowthTable, growth_sequence, radon_nikodym
from .errors import CutoffTooSmall, EigensolveFailure, SingularBlock

TAIL_TOL = 1e-6
PAIRING_TOL = 1e-9
RESIDUAL_TOL = 1e-9
VARIANTS = ("standard", "growth_weighted")


@dataclass(frozen=True)
class DiracBlock:
    n: int
    M: int
    eta: float
    variant: str
    matrix: np.ndarray = field(repr=False)
    level_weight: float

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def upper_right(self) -> np.ndarray:
        m = 2 * self.M + 1
        return self.matrix[:m, m:]

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)


def growth_multiplier(n: int, growth: GrowthTable) -> float:
    """Level weight ``a_{f,n}``: partial sums of ``1/gamma`` replacing ``n``."""
    if n == 0:
        return 0.0
    sign = 1 if n > 0 else -1
    offset = (1 - sign) // 2
    return sign * sum(1.0 / growth[l - offset] for l in range(1, abs(n) + 1))


def default_grid(M: int) -> int:
    return fourier.oversampled_size(M)


def level_matrix(M: int, weight: float) -> np.ndarray:
    return np.diag(1j * np.arange(-M, M + 1) - weight)


def assemble_block(f: CircleDiffeo, n: int, M: int, eta: float = 0.0,
                   variant: str = "standard", growth: GrowthTable | None = None,
                   cocycle: Cocycle | None = None) -> DiracBlock:
    if M < 8:
        raise ValueError(f"cutoff M must be >= 8, got {M}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if cocycle is None:
        cocycle = radon_nikodym(f, n, default_grid(M))
    if variant == "growth_weighted":
        if growth is None:
            growth = growth_sequence(f, abs(n))
        weight = growth_multiplier(n, growth)
    else:
        weight = float(n)

    K = 2 * M
    right = cocycle.coefficients(-eta, K)
    if fourier.tail_fraction(right, M) > TAIL_TOL:
        raise CutoffTooSmall(
            f"Fourier tail of d_{n}^(-{eta}) beyond M={M} exceeds {TAIL_TOL}")
    L = level_matrix(M, weight)
    upper = L
    if eta != 1.0:
        upper = fourier.toeplitz_matrix(cocycle.coefficients(eta - 1.0, K), M) @ upper
    if eta != 0.0:
        upper = upper @ fourier.toeplitz_matrix(right, M)
    m = 2 * M + 1
    mat = np.zeros((2 * m, 2 * m), dtype=complex)
    mat[:m, m:] = upper
    mat[m:, :m] = upper.conj().T
    return DiracBlock(n, M, float(eta), variant, mat, weight)


def undeformed_block(n: int, M: int) -> np.ndarray:
    """Closed-form block for the trivial cocycle."""
    m = 2 * M + 1
    L = level_matrix(M, float(n))
    mat = np.zeros((2 * m, 2 * m), dtype=complex)
    mat[:m, m:] = L
    mat[m:, :m] = L.conj().T
    return mat


@dataclass
class SpectrumReport:
    """Eigen-data of one block (or one Hill problem) with its provenance."""

    method: str
    n: int
    M: int
    eta: float
    eigenvalues: np.ndarray
    residuals: np.ndarray
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def entries(self) -> list:
        return [(self.n, float(lam), j, self.method) for j, lam in enumerate(self.eigenvalues)]

    def positive(self) -> np.ndarray:
        """Absolute values of the nonnegative half of a ``+-`` symmetric spectrum."""
        ev = np.sort(self.eigenvalues)
        return np.abs(ev[ev.size // 2:])


def block_spectrum(block: DiracBlock) -> SpectrumReport:
    try:
        w, v = eigh(block.matrix)
    except LinAlgError as exc:
        raise EigensolveFailure(str(exc)) from exc
    scale = max(1.0, float(np.abs(w).max()))
    pairing = np.abs(np.sort(w) + np.sort(w)[::-1]).max()
    if pairing > PAIRING_TOL * scale:
        raise EigensolveFailure(f"+- pairing broken by {pairing:.3e}")
    res = np.linalg.norm(block.matrix @ v - v * w, axis=0)
    if res.max() > RESIDUAL_TOL * scale:
        raise EigensolveFailure(f"eigen-residual {res.max():.3e} too large")
    return SpectrumReport("matrix", block.n, block.M, block.eta, w, res, v)


def smallest_singular_value(block: DiracBlock) -> float:
    """``1 / ||D_n^{-1}||``; the off-diagonal block carries all singular values."""
    return float(svdvals(block.upper_right)[-1])


@dataclass(frozen=True)
class InverseNormRow:
    n: int
    inverse_norm: float
    bound: float
    bound_satisfied: bool


def inverse_norm_report(f: CircleDiffeo, n_range, M: int, eta: float = 0.0,
                        growth: GrowthTable | None = None, tol: float = 1e-8) -> list:
    """``||D_n^{-1}||`` against ``gamma_f(n)/|n|`` for every ``n`` in ``n_range``."""
    n_range = list(n_range)
    if 0 in n_range:
        raise ValueError("level 0 carries the kernel and is excluded")
    if growth is None:
        growth = growth_sequence(f, max(abs(n) for n in n_range))
    rows = []
    for n in n_range:
        smin = smallest_singular_value(assemble_block(f, n, M, eta))
        if smin < 1e-12:
            raise SingularBlock(f"block {n} has smallest singular value {smin:.3e}")
        inv = 1.0 / smin
        bound = growth[n] / abs(n)
        rows.append(InverseNormRow(n, inv, bound, inv <= bound + tol))
    return rows


def truncation_stability(f: CircleDiffeo, n: int, M: int, eta: float = 0.0,
                         window: float | None = None) -> float:
    """Largest change of the eigenvalues ``|lambda| <= window`` when ``M`` doubles.

    An eigenfunction at ``lambda`` oscillates locally at frequency up to
    ``lambda * max d_n``, so the default window is ``M / (2 max d_n)``.
    """
    if window is None:
        window = M / (2.0 * radon_nikodym(f, n, default_grid(M)).samples.max())
    a = block_spectrum(assemble_block(f, n, M, eta)).positive()
    b = block_spectrum(assemble_block(f, n, 2 * M, eta)).positive()
    a = a[a <= window]
    return float(np.abs(a - b[: a.size]).max())


@dataclass(frozen=True)
class StructureReport:
    real_structure: float      # ||J_T^2 + I|| on the interior columns
    chirality: float           # ||J_T g + g J_T||
    grading_square: float      # ||g^2 - I||
    modular_square: float      # ||J^2 - I|| for the single-copy conjugation


def conjugation_matrix(f: CircleDiffeo, N: int, M: int) -> np.ndarray:
    """Matrix ``A`` with ``J x = A conj(x)`` on the truncated GNS space."""
    dim = (2 * N + 1) * (2 * M + 1)
    cols = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[j] = 1.0
        x = GNSVector(e.reshape(2 * N + 1, 2 * M + 1))
        cols[:, j] = modular_apply("J", f, x).coeffs.ravel()
    return cols


def structure_checks(f: CircleDiffeo, N: int = 2, M: int = 32, band: int | None = None) -> StructureReport:
    """Residuals of ``J_T^2 = -I`` and ``J_T g = -g J_T`` on the doubled space.

    ``J_T = [[0, J], [-J, 0]]`` is antilinear, ``J_T x = A_T conj(x)``, so its
    square is the matrix ``A_T conj(A_T)``.  Columns are restricted to modes
    ``|k| <= band`` (default ``M/8``), where truncation does not clip the image.
    """
    band = M // 8 if band is None else band
    A = conjugation_matrix(f, N, M)
    dim = A.shape[0]
    Z = np.zeros_like(A)
    AT = np.block([[Z, A], [-A, Z]])
    g = np.diag(np.r_[np.ones(dim), -np.ones(dim)])
    k = np.tile(np.arange(-M, M + 1), 2 * N + 1)
    cols = np.tile(np.abs(k) <= band, 2)
    sq = (AT @ AT.conj() + np.eye(2 * dim))[:, cols]
    # antilinear: (J_T g)(x) = A_T conj(g x) = A_T g conj(x)
    chir = (AT @ g + g @ AT)[:, cols]
    single = (A @ A.conj() - np.eye(dim))[:, cols[:dim]]
    return StructureReport(
        float(np.linalg.norm(sq, 2)),
        float(np.linalg.norm(chir, 2)),
        float(np.abs(g @ g - np.eye(2 * dim)).max()),
        float(np.linalg.norm(single, 2)),
    )
