"""Fourier-series utilities on the circle.

Functions are sampled on the uniform grid ``theta_j = 2*pi*j/n`` and their
coefficients are stored *centred*: an array ``c`` of odd length ``2K+1``
holds ``c[k + K]`` for ``k = -K..K`` with ``g(theta) = sum_k c_k e^{ik theta}``.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import toeplitz


def grid(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def coefficients(samples: np.ndarray, K: int) -> np.ndarray:
    """Centred coefficients ``c_{-K}..c_K`` of a function sampled on ``grid(n)``.

    Requires ``n > 2K``; modes above ``n/2`` alias, so oversample.
    """
    samples = np.asarray(samples)
    n = samples.shape[-1]
    if n <= 2 * K:
        raise ValueError(f"grid of {n} points cannot resolve {2 * K + 1} modes")
    c = np.fft.fft(samples, axis=-1) / n
    idx = np.arange(-K, K + 1) % n
    return c[..., idx]


def evaluate(coeffs: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Evaluate a centred series at arbitrary (non-uniform) angles."""
    coeffs = np.asarray(coeffs)
    K = (coeffs.shape[-1] - 1) // 2
    k = np.arange(-K, K + 1)
    return np.exp(1j * np.multiply.outer(np.asarray(theta), k)) @ coeffs


def synthesize(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Samples on ``grid(n)`` of a centred series (inverse of :func:`coefficients`)."""
    coeffs = np.asarray(coeffs)
    K = (coeffs.shape[-1] - 1) // 2
    if n <= 2 * K:
        raise ValueError(f"grid of {n} points cannot carry {2 * K + 1} modes")
    full = np.zeros(coeffs.shape[:-1] + (n,), dtype=complex)
    full[..., np.arange(-K, K + 1) % n] = coeffs
    return np.fft.ifft(full, axis=-1) * n


def derivative(coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of ``d/dtheta`` of a centred series."""
    K = (coeffs.shape[-1] - 1) // 2
    return 1j * np.arange(-K, K + 1) * coeffs


def toeplitz_matrix(coeffs: np.ndarray, M: int) -> np.ndarray:
    """Finite section ``P_M M_g P_M`` of a multiplication operator.

    ``coeffs`` must be centred with at least ``2M`` modes on each side; the
    entry at (row j, column k), ``|j|, |k| <= M``, is ``c_{j-k}``.
    """
    K = (coeffs.shape[-1] - 1) // 2
    if K < 2 * M:
        raise ValueError(f"need modes up to {2 * M}, got {K}")
    col = coeffs[K: K + 2 * M + 1]          # c_0, c_1, ..., c_{2M}
    row = coeffs[K - 2 * M: K + 1][::-1]    # c_0, c_{-1}, ..., c_{-2M}
    return toeplitz(col, row)


def tail_fraction(coeffs: np.ndarray, M: int) -> float:
    """Share of the absolute coefficient mass carried by modes ``|k| > M``."""
    K = (coeffs.shape[-1] - 1) // 2
    a = np.abs(coeffs)
    total = a.sum()
    if total == 0.0:
        return 0.0
    return float((a[: K - M].sum() + a[K + M + 1:].sum()) / total)


def oversampled_size(M: int, factor: int = 4, minimum: int = 64) -> int:
    """Smallest power of two at least ``factor*(2M+1)``."""
    n = max(factor * (2 * M + 1), minimum)
    return 1 << (n - 1).bit_length()
