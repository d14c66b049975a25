"""Weighted spatial-spectral total variation with periodic boundaries.

A difference field is stored as one array of shape (3, m, n, p): component 0
differences along bands, component 1 along columns, component 2 along rows,
each scaled by its weight.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ImaginaryResidueTooLarge
from .proximal import soft
from .tensor_core import IMAG_ERROR_TOL

# (weight index, array axis) for the three components
_AXES = (2, 1, 0)


@dataclass(frozen=True)
class DiffWeights:
    """Strengths along bands, columns and rows."""

    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0

    def __post_init__(self):
        w = self.as_tuple()
        if any(x < 0 for x in w):
            raise DomainError(f"difference weights must be nonnegative, got {w}")
        if not any(x > 0 for x in w):
            raise DomainError("at least one difference weight must be positive")

    def as_tuple(self):
        return (self.w1, self.w2, self.w3)


def diff(t, w=DiffWeights()):
    t = np.asarray(t, dtype=float)
    out = np.empty((3,) + t.shape)
    for k, (wk, axis) in enumerate(zip(w.as_tuple(), _AXES)):
        out[k] = wk * (np.roll(t, -1, axis=axis) - t)
    return out


def diff_adjoint(f, w=DiffWeights()):
    f = np.asarray(f, dtype=float)
    out = np.zeros(f.shape[1:])
    for k, (wk, axis) in enumerate(zip(w.as_tuple(), _AXES)):
        out += wk * (np.roll(f[k], 1, axis=axis) - f[k])
    return out


def sstv_value(t, w=DiffWeights()):
    return float(np.abs(diff(t, w)).sum())


def update_U(X, Lam, w, tau, mu):
    """Soft-threshold the difference field of X around the multiplier shift."""
    return soft(diff(X, w) - Lam / mu, tau / mu)


def transfer_denominator(shape, w=DiffWeights()):
    """Eigenvalues of I + D^T D on the 3-D DFT grid."""
    denom = np.ones(shape)
    for wk, axis in zip(w.as_tuple(), _AXES):
        size = shape[axis]
        eig = 2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(size) / size)
        bshape = [1, 1, 1]
        bshape[axis] = size
        denom = denom + (wk**2) * eig.reshape(bshape)
    return denom


def normal_operator(X, w=DiffWeights()):
    """Apply (D^T D + I) to X."""
    return diff_adjoint(diff(X, w), w) + X


def update_X(J, LamX, U, Lam, w, mu, denom=None):
    """Solve (D^T D + I) X = D^T(U + Lam/mu) + J + LamX/mu exactly."""
    rhs = diff_adjoint(U + Lam / mu, w) + J + LamX / mu
    if denom is None:
        denom = transfer_denominator(rhs.shape, w)
    out = np.fft.ifftn(np.fft.fftn(rhs) / denom)
    residue = np.max(np.abs(out.imag)) if out.size else 0.0
    if residue >= IMAG_ERROR_TOL:
        raise ImaginaryResidueTooLarge(f"X solve left imaginary part {residue:.3e}")
    return np.ascontiguousarray(out.real)
