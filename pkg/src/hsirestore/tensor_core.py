"""Mode-3 Fourier transforms and per-slice SVD for real m x n x p cubes.

Cubes are plain numpy arrays indexed ``[row, col, band]``. A frontal slice is
``t[:, :, q]``; a tube is ``t[i, j, :]``.
"""
from typing import NamedTuple

import numpy as np

from .errors import ImaginaryResidueTooLarge, NumericalFailure

# imaginary parts below this are roundoff and dropped silently
IMAG_DISCARD_TOL = 1e-8
# imaginary parts at or above this mean the input was not Hermitian along bands
IMAG_ERROR_TOL = 1e-6


class SlicesSVD(NamedTuple):
    """Thin SVD of every frontal slice, stacked along the leading axis.

    ``u[q] @ np.diag(s[q]) @ vh[q]`` reconstructs slice ``q``.
    """

    u: np.ndarray  # (p, m, k)
    s: np.ndarray  # (p, k), nonincreasing
    vh: np.ndarray  # (p, k, n)

    def reconstruct(self):
        t = np.einsum("qik,qk,qkj->qij", self.u, self.s, self.vh)
        return np.moveaxis(t, 0, -1)


def fft3(t):
    """Unnormalized DFT of every tube (along the last axis)."""
    return np.fft.fft(np.asarray(t, dtype=float), axis=-1)


def ifft3(t):
    """Inverse of :func:`fft3`, returning a real cube.

    Raises ImaginaryResidueTooLarge when the input was not conjugate
    symmetric along the band axis.
    """
    out = np.fft.ifft(t, axis=-1)
    residue = np.max(np.abs(out.imag)) if out.size else 0.0
    if residue >= IMAG_ERROR_TOL:
        raise ImaginaryResidueTooLarge(
            f"inverse transform left imaginary part {residue:.3e}"
        )
    return np.ascontiguousarray(out.real)


def half_spectrum(p):
    """Number of leading Fourier slices that determine a real cube's spectrum."""
    return p // 2 + 1


def mirror_spectrum(half, p):
    """Rebuild the full band spectrum from its first ``p // 2 + 1`` slices.

    ``half`` has the band axis last. Slice ``q`` of the result equals the
    conjugate of slice ``p - q`` for ``q > p // 2``.
    """
    h = half_spectrum(p)
    full = np.empty(half.shape[:-1] + (p,), dtype=complex)
    full[..., :h] = half[..., :h]
    if p > h:
        full[..., h:] = np.conj(half[..., 1 : p - h + 1][..., ::-1])
    return full


def _batched_svd(a):
    try:
        return np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError:
        flat = a.reshape((-1,) + a.shape[-2:])
        for idx, mat in enumerate(flat):
            try:
                np.linalg.svd(mat, full_matrices=False)
            except np.linalg.LinAlgError:
                raise NumericalFailure(f"SVD did not converge for slice {idx}") from None
        raise NumericalFailure("SVD did not converge") from None


def svd_slices(t):
    """Thin SVD of each frontal slice ``t[:, :, q]``."""
    slices = np.moveaxis(np.asarray(t), -1, 0)
    u, s, vh = _batched_svd(slices)
    return SlicesSVD(u, s, vh)
