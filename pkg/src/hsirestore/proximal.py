"""Proximal steps of the local low-rank subproblem.

The low-rank penalty is phi(x) = 1 - exp(-gamma * |x|) summed over the
singular values of every Fourier frontal slice. It is handled by
linearizing phi at the previous singular values, which turns the
subproblem into weighted singular value thresholding.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .tensor_core import _batched_svd, fft3, half_spectrum, ifft3, mirror_spectrum, svd_slices


@dataclass(frozen=True)
class GammaPenalty:
    gamma: float = 0.3

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")

    def phi(self, x):
        return 1.0 - np.exp(-self.gamma * np.abs(x))

    def grad(self, x):
        return self.gamma * np.exp(-self.gamma * np.abs(x))


def gamma_norm(t, pen=GammaPenalty()):
    """Nonconvex low-rank surrogate of a real cube.

    Mean over bands of sum(phi(sigma)) taken over the singular values of the
    Fourier-domain frontal slices.
    """
    t = np.asarray(t, dtype=float)
    sv = svd_slices(fft3(t)).s
    return float(pen.phi(sv).sum() / t.shape[-1])


def grad_weights(sigma_prev, pen=GammaPenalty()):
    """Shrinkage weights gamma * exp(-gamma * sigma) at the linearization point.

    For nonincreasing ``sigma_prev`` the weights come out nondecreasing,
    which is the ordering weighted thresholding needs to be optimal.
    """
    sigma_prev = np.asarray(sigma_prev, dtype=float)
    if np.any(sigma_prev < 0):
        raise DomainError("singular values must be nonnegative")
    return pen.grad(sigma_prev)


def _shrink_singular_values(mat, weights, threshold_scale):
    u, s, vh = _batched_svd(np.asarray(mat))
    shrunk = np.maximum(s - threshold_scale * np.asarray(weights), 0.0)
    return (u * shrunk[..., None, :]) @ vh, shrunk


def wsvt(mat, weights, threshold_scale):
    """Weighted singular value thresholding.

    Returns ``U diag(max(s - threshold_scale * weights, 0)) V^H`` for the SVD of
    ``mat``. Works on a single matrix or on a stack (leading batch axes), with
    ``weights`` broadcasting against the singular value axis.
    """
    return _shrink_singular_values(mat, weights, threshold_scale)[0]


def update_L_patch(M, sigma_prev, mu, pen=GammaPenalty()):
    """Low-rank update of one patch, or of a stack of patches.

    ``M`` has shape (..., m1, n1, p). ``sigma_prev`` holds the singular values
    of the previous iterate's Fourier slices with shape (..., p, min(m1, n1)),
    or None for a zero previous iterate. Only the first ``p // 2 + 1`` Fourier
    slices are decomposed; the rest follow by conjugate symmetry.

    Returns the new patch(es) and their per-slice singular values, to be used
    as ``sigma_prev`` on the next call.
    """
    M = np.asarray(M, dtype=float)
    p = M.shape[-1]
    h = half_spectrum(p)
    k = min(M.shape[-3], M.shape[-2])
    if sigma_prev is None:
        sigma_prev = np.zeros(M.shape[:-3] + (p, k))
    weights = grad_weights(np.asarray(sigma_prev)[..., :h, :], pen)

    half = np.fft.rfft(M, axis=-1)
    slices = np.moveaxis(half, -1, -3)  # (..., h, m1, n1)
    shrunk_slices, shrunk = _shrink_singular_values(slices, weights, 1.0 / (2.0 * mu))
    full = mirror_spectrum(np.moveaxis(shrunk_slices, -3, -1), p)
    L = ifft3(full)

    sigma = np.empty(M.shape[:-3] + (p, k))
    sigma[..., :h, :] = shrunk
    if p > h:
        sigma[..., h:, :] = shrunk[..., 1 : p - h + 1, :][..., ::-1, :]
    return L, sigma


def soft(t, delta):
    """Elementwise soft thresholding."""
    t = np.asarray(t, dtype=float)
    return np.sign(t) * np.maximum(np.abs(t) - delta, 0.0)


def update_N_patch(O, L, S, LamO, mu, beta):
    """Closed-form minimizer of the Gaussian-noise subproblem."""
    return (mu * (O - L - S) + LamO) / (mu + 2.0 * beta)
