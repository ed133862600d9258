"""Uniform grids on the unit circle and FFT-based coefficient recovery."""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

DEFAULT_GRID = 4096
ON_CIRCLE_TOL = 1e-12


def circle_grid(N):
    """The N-th roots of unity ``exp(2*pi*i*j/N)``, ``j = 0..N-1``."""
    return np.exp(2j * np.pi * np.arange(N) / N)


def next_pow2(n):
    return 1 << max(int(n) - 1, 0).bit_length()


def check_on_circle(zeta, tol=ON_CIRCLE_TOL):
    zeta = np.asarray(zeta, dtype=complex)
    dev = np.abs(np.abs(zeta) - 1.0)
    if dev.size and dev.max() > tol:
        raise DomainError(f"point off the unit circle by {dev.max():.3g}")
    return zeta


def coefficients_from_samples(values):
    """Fourier coefficients of grid samples along axis 0.

    Returns ``(freqs, coeffs)`` where ``coeffs[i]`` is the coefficient of
    ``z**freqs[i]``, frequencies ordered ``-N/2+1 .. N/2``.
    """
    values = np.asarray(values, dtype=complex)
    N = values.shape[0]
    coeffs = np.fft.fft(values, axis=0) / N
    freqs = np.fft.fftfreq(N, d=1.0 / N).astype(int)
    freqs[freqs == -N // 2] = N // 2
    order = np.argsort(freqs, kind="stable")
    return freqs[order], coeffs[order]


def adaptive_coefficients(fn, N0=256, tail_tol=1e-15, max_N=1 << 16):
    """Recover Fourier coefficients of ``fn`` sampled on growing grids.

    ``fn`` maps an array of circle points to an array whose leading axis
    matches. The grid doubles until the coefficients in the outer quarter
    bands (``|k| > N/4``) fall below ``tail_tol`` times the peak.
    """
    N = next_pow2(max(N0, 16))
    while True:
        freqs, coeffs = coefficients_from_samples(fn(circle_grid(N)))
        mags = np.abs(coeffs.reshape(N, -1)).max(axis=1)
        peak = mags.max()
        tail = mags[np.abs(freqs) > N // 4].max()
        if peak == 0 or tail <= tail_tol * peak:
            return freqs, coeffs, N
        if N >= max_N:
            raise ConvergenceError(
                f"Fourier tail {tail / peak:.3g} (relative) not resolved at N={N}"
            )
        N *= 2


@dataclass(frozen=True)
class GridSamples:
    """Samples of an m x n symbol at the N-th roots of unity."""

    N: int
    values: np.ndarray

    @classmethod
    def of(cls, sym, N=DEFAULT_GRID):
        zeta = circle_grid(N)
        vals = np.asarray(sym(zeta), dtype=complex)
        return cls(N, vals)

    @property
    def points(self):
        return circle_grid(self.N)
