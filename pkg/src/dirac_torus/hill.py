"""Periodic Hill problem attached to one Dirac block.

Eliminating the lower component of ``D v = lambda v`` on level ``n`` leaves,
for ``H = d^{eta-1} f``,

    H'' - 2 eta p H' + (lambda^2 d^2 - 2 eta n p - n^2) H = 0,   p = (ln d)'

and ``lambda`` is an eigenvalue exactly when this has a 2pi-periodic solution.
The equation is solved three ways here: a Fourier-Galerkin pencil, Floquet
monodromy shooting, and (for comparison) the block eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, eig, eigh

from . import fourier
from .circle import CircleDiffeo, Cocycle, radon_nikodym
from .dirac import assemble_block, block_spectrum, default_grid
from .errors import (
    FactorizationFailure,
    IndefiniteC,
    SpuriousSpectrum,
    StepTooLarge,
    ZeroLambda,
)

IMAG_TOL = 1e-6
NEGATIVE_TOL = 1e-9
SPURIOUS_SHARE = 0.10


@dataclass
class HillProblem:
    """Galerkin data for one ``(n, eta)``.

    ``A``, ``C`` and ``B1`` discretize the equation as written:
    ``(A + B1) h = lambda^2 C h`` with ``A = K^2 + n^2``, ``C = T(d^2)`` and
    ``B1`` the first- and zeroth-order eta-terms (``None`` at ``eta = 0``).

    Multiplying the equation by ``w = d^{-2 eta}`` turns it into the
    self-adjoint form ``-(w H')' + (n^2 w - n w') H = lambda^2 d^{2-2eta} H``,
    whose Galerkin pencil ``(weighted_A, weighted_C)`` is hermitian-definite
    for every ``eta``.  At ``eta = 0`` the two pencils coincide.
    """

    n: int
    eta: float
    M: int
    A: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    B1: np.ndarray | None = field(repr=False)
    weighted_A: np.ndarray = field(repr=False)
    weighted_C: np.ndarray = field(repr=False)
    cocycle: Cocycle = field(repr=False)
    printed_coefficient: bool = False

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    @property
    def is_definite(self) -> bool:
        return self.B1 is None


def _zeroth_order_weight(n: int, printed: bool) -> float:
    # the variant without the factor n in the zeroth-order eta-term
    return 1.0 if printed else float(n)


def _hermitian(X: np.ndarray) -> np.ndarray:
    return 0.5 * (X + X.conj().T)


def hill_assemble(cocycle: Cocycle, n: int, eta: float, M: int,
                  printed_coefficient: bool = False) -> HillProblem:
    """Galerkin matrices of the Hill equation on modes ``-M..M``."""
    if M < 8:
        raise ValueError(f"cutoff M must be >= 8, got {M}")
    if cocycle.n != n:
        raise ValueError(f"cocycle is for level {cocycle.n}, not {n}")
    k = np.arange(-M, M + 1)
    K2 = 2 * M
    A = np.diag((k * k + n * n).astype(complex))
    C = _hermitian(fourier.toeplitz_matrix(cocycle.coefficients(2.0, K2), M))
    if np.linalg.eigvalsh(C).min() <= 0:
        raise IndefiniteC("Toeplitz section of d_n^2 is not positive definite")
    c0 = _zeroth_order_weight(n, printed_coefficient)
    if eta == 0.0:
        return HillProblem(n, 0.0, M, A, C, None, A, C, cocycle, printed_coefficient)

    P = fourier.toeplitz_matrix(cocycle.log_derivative(K2), M)
    B1 = 2.0 * eta * (P @ np.diag(1j * k) + c0 * P)
    if not B1.any():
        return HillProblem(n, float(eta), M, A, C, None, A, C, cocycle, printed_coefficient)
    w = cocycle.coefficients(-2.0 * eta, K2)
    Tw = fourier.toeplitz_matrix(w, M)
    Tdw = fourier.toeplitz_matrix(fourier.derivative(w), M)
    Kd = np.diag(k.astype(complex))
    WA = _hermitian(Kd @ Tw @ Kd + n * n * Tw - c0 * Tdw)
    WC = _hermitian(fourier.toeplitz_matrix(cocycle.coefficients(2.0 - 2.0 * eta, K2), M))
    if np.linalg.eigvalsh(WC).min() <= 0:
        raise IndefiniteC("weighted Toeplitz section is not positive definite")
    return HillProblem(n, float(eta), M, A, C, B1, WA, WC, cocycle, printed_coefficient)


@dataclass
class HillSpectrum:
    """``|lambda|`` values (ascending, with multiplicity) and Galerkin vectors."""

    values: np.ndarray
    vectors: np.ndarray = field(repr=False)
    discarded: int = 0
    anomalies: int = 0


def _definite(A, C):
    try:
        cho_factor(C)
        return eigh(A, C)
    except LinAlgError as exc:
        raise FactorizationFailure(str(exc)) from exc


def hill_eigenvalues(problem: HillProblem, method: str = "symmetric") -> HillSpectrum:
    """Solve the Galerkin pencil for ``lambda^2`` and return ``|lambda|``.

    ``method="symmetric"`` uses the hermitian-definite weighted pencil.
    ``method="general"`` solves ``C^{-1}(A + B1)`` directly and drops
    eigenvalues with imaginary part above ``IMAG_TOL``; this non-normal
    truncation produces complex pairs among the high modes, and
    :class:`SpuriousSpectrum` is raised when they exceed ``SPURIOUS_SHARE``.
    """
    discarded = 0
    if problem.is_definite or method == "symmetric":
        lam2, vecs = _definite(problem.weighted_A, problem.weighted_C)
    elif method == "general":
        try:
            lam2, vecs = eig(problem.A + problem.B1, problem.C)
        except LinAlgError as exc:
            raise FactorizationFailure(str(exc)) from exc
        keep = np.isfinite(lam2) & (np.abs(lam2.imag) <= IMAG_TOL)
        discarded = int((~keep).sum())
        if discarded > SPURIOUS_SHARE * lam2.size:
            raise SpuriousSpectrum(
                f"{discarded} of {lam2.size} Galerkin eigenvalues are not real")
        lam2, vecs = lam2[keep].real, vecs[:, keep]
    else:
        raise ValueError(f"unknown method {method!r}")
    anomalies = int((lam2 < -NEGATIVE_TOL).sum())
    keep = lam2 >= -NEGATIVE_TOL
    lam2, vecs = lam2[keep], vecs[:, keep]
    order = np.argsort(lam2)
    values = np.sqrt(np.clip(lam2[order], 0.0, None))
    return HillSpectrum(values, vecs[:, order], discarded, anomalies)


# ---------------------------------------------------------------- monodromy

@dataclass(frozen=True)
class MonodromyResult:
    lam: float
    monodromy: np.ndarray
    multipliers: np.ndarray
    periodicity_residual: float
    determinant: float
    halving_change: float

    @property
    def discriminant(self) -> float:
        """``(tr/2)^2 - det``: zero exactly when the multipliers coincide."""
        half = 0.5 * np.trace(self.monodromy)
        return float(half * half - self.determinant)


class FloquetIntegrator:
    """Fixed-step RK4 for ``(H, H')`` over one period.

    The coefficients ``d^2`` and ``p = (ln d)'`` are resampled once on the
    half-step grid; each step's propagator is a 2x2 matrix built for all steps
    at once and the period map is their ordered product.

    Arithmetic runs in ``dtype`` (extended precision by default): at a
    periodic eigenvalue the period map is a Jordan block, the multipliers
    move like the square root of the perturbation, and double precision in
    ``lambda`` alone caps the attainable residual near ``1e-6``.
    """

    def __init__(self, cocycle: Cocycle, n: int, eta: float, steps: int = 8192,
                 printed_coefficient: bool = False, dtype=np.longdouble):
        if steps < 1024:
            raise ValueError("need at least 1024 steps")
        self.n, self.eta, self.steps, self.dtype = n, float(eta), steps, dtype
        self._w = _zeroth_order_weight(n, printed_coefficient)
        K = cocycle.max_modes
        self._sq = self._resample(cocycle.coefficients(2.0, K), steps).astype(dtype)
        self._p = self._resample(cocycle.log_derivative(K), steps).astype(dtype)

    @staticmethod
    def _resample(coeffs: np.ndarray, steps: int) -> np.ndarray:
        K = (coeffs.size - 1) // 2
        size = max(2 * steps, 1 << (2 * K + 1).bit_length())
        vals = fourier.synthesize(coeffs, size).real
        stride = size // (2 * steps)
        vals = vals[::stride]
        return np.r_[vals, vals[:1]]

    def period_map(self, lam, halve: bool = False) -> tuple:
        """Entries ``(m00, m01, m10, m11)`` of the period map, in ``dtype``."""
        stride = 2 if halve else 1
        sq = self._sq[::stride]
        p = self._p[::stride]
        steps = (sq.size - 1) // 2
        dt = self.dtype
        h = dt(2) * dt(np.pi) / dt(steps)
        lam = dt(lam)
        a = dt(2.0 * self.eta) * p
        q = lam * lam * sq - dt(2.0 * self.eta * self._w) * p - dt(self.n * self.n)
        # A(t) = [[0, 1], [-q, a]] at the left, middle and right of every step
        qs = (q[0:-1:2], q[1::2], q[2::2])
        as_ = (a[0:-1:2], a[1::2], a[2::2])

        def apply(i, Y):
            y00, y01, y10, y11 = Y
            qq, aa = qs[i], as_[i]
            return (y10, y11, -qq * y00 + aa * y10, -qq * y01 + aa * y11)

        one = np.ones(steps, dtype=dt)
        zero = np.zeros(steps, dtype=dt)
        eye = (one, zero, zero, one)

        def shifted(c, X):
            return tuple(i + c * x for i, x in zip(eye, X))

        k1 = apply(0, eye)
        k2 = apply(1, shifted(h / 2, k1))
        k3 = apply(1, shifted(h / 2, k2))
        k4 = apply(2, shifted(h, k3))
        P = [i + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
             for i, a1, a2, a3, a4 in zip(eye, k1, k2, k3, k4)]
        return _ordered_product(*P)

    def __call__(self, lam) -> MonodromyResult:
        full = self.period_map(lam)
        half = self.period_map(lam, halve=True)
        Mfull = np.array(full, dtype=float).reshape(2, 2)
        change = float(max(abs(x - y) for x, y in zip(full, half))
                       / max(1.0, float(max(abs(x) for x in full))))
        mult = _multipliers(*full)
        res = float(np.min(np.abs(mult - 1.0)))
        det = full[0] * full[3] - full[1] * full[2]
        return MonodromyResult(float(lam), Mfull, mult, res, float(det), change)

    def discriminant(self, lam):
        m00, m01, m10, m11 = self.period_map(lam)
        half = (m00 + m11) / 2
        return half * half - (m00 * m11 - m01 * m10)

    def trace_half(self, lam) -> float:
        m00, _, _, m11 = self.period_map(lam)
        return float((m00 + m11) / 2)


def _multipliers(m00, m01, m10, m11) -> np.ndarray:
    # roots of mu^2 - tr mu + det, kept in the working precision
    half = (m00 + m11) / 2
    disc = half * half - (m00 * m11 - m01 * m10)
    root = np.sqrt(abs(disc))
    if disc >= 0:
        return np.array([complex(half - root), complex(half + root)])
    return np.array([complex(float(half), -float(root)), complex(float(half), float(root))])


def _ordered_product(a, b, c, d) -> tuple:
    """``P[-1] @ ... @ P[0]`` by pairwise reduction of stacked 2x2 entries."""
    while a.size > 1:
        if a.size % 2:
            one, zero = np.ones(1, a.dtype), np.zeros(1, a.dtype)
            a, b, c, d = (np.r_[a, one], np.r_[b, zero], np.r_[c, zero], np.r_[d, one])
        # left factor = odd entries (later steps), right factor = even entries
        la, lb, lc, ld = a[1::2], b[1::2], c[1::2], d[1::2]
        ra, rb, rc, rd = a[0::2], b[0::2], c[0::2], d[0::2]
        a, b, c, d = (la * ra + lb * rc, la * rb + lb * rd,
                      lc * ra + ld * rc, lc * rb + ld * rd)
    return a[0], b[0], c[0], d[0]


def monodromy(cocycle: Cocycle, n: int, eta: float, lam: float, steps: int = 8192,
              printed_coefficient: bool = False, halving_tol: float = 1e-6) -> MonodromyResult:
    """Period map of the Hill equation at ``lam`` with its Floquet data.

    ``halving_change`` is the relative change of the period map when the step
    is doubled; it bounds the integration error and triggers
    :class:`StepTooLarge` above ``halving_tol``.
    """
    result = FloquetIntegrator(cocycle, n, eta, steps, printed_coefficient)(lam)
    if result.halving_change > halving_tol:
        raise StepTooLarge(
            f"step halving moves the period map by {result.halving_change:.3e}")
    return result


def _illinois(g, lo, hi, glo, ghi, maxiter: int = 60):
    """Regula falsi with the Illinois modification, in the integrator's dtype."""
    side = 0
    for _ in range(maxiter):
        x = hi - ghi * (hi - lo) / (ghi - glo)
        if not lo < x < hi:
            x = (lo + hi) / 2
        gx = g(x)
        if gx == 0 or hi - lo <= 4 * np.finfo(type(x)).eps * abs(x):
            return x
        if np.sign(gx) == np.sign(ghi):
            hi, ghi = x, gx
            if side == 1:
                glo = glo / 2
            side = 1
        else:
            lo, glo = x, gx
            if side == -1:
                ghi = ghi / 2
            side = -1
    return (lo + hi) / 2


def polish_root(integrator: FloquetIntegrator, lam0: float, target: float = 1e-6,
                widths=(1e-12, 1e-10, 1e-8, 1e-6, 1e-5)) -> MonodromyResult:
    """Move ``lam0`` onto a periodic eigenvalue of the integrated equation.

    Near a periodic eigenvalue the multipliers merge at ``+1`` and the
    discriminant of the period map changes sign, so the root is bracketed in
    widening windows and refined by regula falsi.  If no sign change is found
    (both band edges inside the window) ``lam0`` itself is returned.
    """
    best = integrator(lam0)
    if best.periodicity_residual <= target / 100 or integrator.trace_half(lam0) < 0:
        return best
    dt = integrator.dtype
    x0 = dt(lam0)
    g0 = integrator.discriminant(x0)
    for w in widths:
        delta = dt(w * max(1.0, abs(lam0)))
        roots = []
        for other in (x0 - delta, x0 + delta):
            g1 = integrator.discriminant(other)
            if g0 == 0:
                roots.append(x0)
            elif np.sign(g1) != np.sign(g0):
                lo, hi, glo, ghi = (other, x0, g1, g0) if other < x0 else (x0, other, g0, g1)
                roots.append(_illinois(integrator.discriminant, lo, hi, glo, ghi))
        if roots:
            cand = [integrator(r) for r in roots]
            r = min(cand, key=lambda c: c.periodicity_residual)
            return r if r.periodicity_residual < best.periodicity_residual else best
    return best


# ----------------------------------------------------------- reconstruction

@dataclass(frozen=True)
class Reconstruction:
    upper: np.ndarray
    lower: np.ndarray
    residual: float


def reconstruct_eigenvector(problem: HillProblem, h: np.ndarray, f: CircleDiffeo,
                            lam: float, block=None) -> Reconstruction:
    """Dirac eigenvector ``(d^{1-eta} H, -(H' + nH) / (lambda d^eta))`` from ``H``.

    The relative residual ``||D v - lambda v|| / ||v||`` is taken against the
    assembled block of the same ``(n, M, eta)``.
    """
    if lam == 0:
        raise ZeroLambda("reconstruction divides by lambda")
    M, n, eta = problem.M, problem.n, problem.eta
    d = problem.cocycle.samples
    size = d.size
    H = fourier.synthesize(h, size)
    dH = fourier.synthesize(fourier.derivative(h), size)
    upper = fourier.coefficients(d ** (1.0 - eta) * H, M)
    lower = fourier.coefficients(-(dH + n * H) / (lam * d ** eta), M)
    v = np.r_[upper, lower]
    if block is None:
        block = assemble_block(f, n, M, eta, cocycle=problem.cocycle)
    res = np.linalg.norm(block.matrix @ v - lam * v) / np.linalg.norm(v)
    return Reconstruction(upper, lower, float(res))


# ------------------------------------------------------------- comparison

@dataclass(frozen=True)
class ComparisonRow:
    n: int
    eta: float
    idx: int
    lambda_matrix: float
    lambda_hill: float
    lambda_monodromy: float
    rel_gap: float
    periodicity_residual: float
    reconstruction_residual: float
    determinant: float

    CSV_FIELDS = ("n", "eta", "idx", "lambda_matrix", "lambda_hill",
                  "lambda_monodromy", "rel_gap", "periodicity_residual")


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def hill_compare(f: CircleDiffeo, n: int, eta: float, M: int, count: int = 10,
                 steps: int = 8192, printed_coefficient: bool = False,
                 grid_size: int | None = None) -> list:
    """Three-way table of the first ``count`` values of ``|lambda|`` on level ``n``."""
    cocycle = radon_nikodym(f, n, grid_size or default_grid(M))
    block = assemble_block(f, n, M, eta, cocycle=cocycle)
    matrix = block_spectrum(block).positive()
    problem = hill_assemble(cocycle, n, eta, M, printed_coefficient)
    hill = hill_eigenvalues(problem)
    integrator = FloquetIntegrator(cocycle, n, eta, steps, printed_coefficient)
    rows = []
    for j in range(min(count, hill.values.size)):
        lh, lm = float(hill.values[j]), float(matrix[j])
        mono = polish_root(integrator, lh)
        rec = reconstruct_eigenvector(problem, hill.vectors[:, j], f, lh, block) if lh > 0 else None
        gap = max(_rel(lm, lh), _rel(lm, mono.lam), _rel(lh, mono.lam))
        rows.append(ComparisonRow(
            n, float(eta), j, lm, lh, mono.lam, gap, mono.periodicity_residual,
            rec.residual if rec else float("nan"), mono.determinant))
    return rows
