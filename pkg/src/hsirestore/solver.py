"""ADMM for mixed-noise removal with a local low-rank prior and global SSTV.

The observation is split as O = L + S + N (low-rank image, sparse
corruption, Gaussian residual) on every overlapping window. The windows are
tied together through the global consensus variable J, and J is tied to
the TV-regularized X, with U = D(X) carrying the difference field.

One iteration updates, in order: every window's (L, S, N), then J, X, U,
then all multipliers, then grows the penalty mu.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import metrics
from .errors import DomainError
from .patching import aggregate, build_grid, extract_all, update_J
from .proximal import GammaPenalty, soft, update_L_patch, update_N_patch
from .sstv import DiffWeights, diff, transfer_denominator, update_U, update_X

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    lambda_C: float = 35.0
    tau: float = 0.03
    beta: Optional[float] = 0.015  # None ties it to lambda
    gamma: float = 0.3
    weights: DiffWeights = field(default_factory=DiffWeights)
    patch: tuple = (20, 20)
    stride: tuple = (10, 10)
    mu0: float = 1e-2
    rho: float = 1.5
    mu_max: float = 1e6
    eps: float = 1e-6
    max_iter: int = 60
    record_trace: bool = True

    def __post_init__(self):
        for name in ("lambda_C", "tau", "gamma", "mu0", "mu_max", "eps"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.beta is not None and not self.beta > 0:
            raise DomainError("beta must be positive")
        if not self.rho > 1:
            raise DomainError("rho must exceed 1")
        if self.mu0 > self.mu_max:
            raise DomainError("mu0 must not exceed mu_max")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")
        self.patch = tuple(int(v) for v in np.broadcast_to(self.patch, 2))
        self.stride = tuple(int(v) for v in np.broadcast_to(self.stride, 2))

    def sparsity_weight(self, dims):
        """lambda = C / sqrt(max(m, n) * p), from the full image size."""
        m, n, p = dims
        return self.lambda_C / math.sqrt(max(m, n) * p)

    def noise_weight(self, dims):
        return self.sparsity_weight(dims) if self.beta is None else self.beta


@dataclass
class IterationTrace:
    error1: list = field(default_factory=list)
    error2: list = field(default_factory=list)
    error3: list = field(default_factory=list)
    mpsnr: list = field(default_factory=list)
    mssim: list = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.error1)

    def max_error(self):
        return np.maximum.reduce([self.error1, self.error2, self.error3])


@dataclass
class SolverState:
    """Iterates and multipliers. Windowed quantities are stacked on axis 0."""

    O: np.ndarray
    grid: object
    O_p: np.ndarray
    L_p: np.ndarray
    S_p: np.ndarray
    N_p: np.ndarray
    J_p: np.ndarray
    LamO_p: np.ndarray
    LamL_p: np.ndarray
    sigma_p: np.ndarray
    L: np.ndarray
    S: np.ndarray
    N: np.ndarray
    J: np.ndarray
    X: np.ndarray
    U: np.ndarray
    Lam: np.ndarray
    LamX: np.ndarray
    mu: float
    iteration: int = 0

    @classmethod
    def initial(cls, O, grid, mu0):
        O = np.asarray(O, dtype=float)
        O_p = extract_all(O, grid)
        k = min(grid.patch_size)
        zp = np.zeros_like(O_p)
        zg = np.zeros_like(O)
        return cls(
            O=O, grid=grid, O_p=O_p,
            L_p=zp.copy(), S_p=zp.copy(), N_p=zp.copy(), J_p=zp.copy(),
            LamO_p=zp.copy(), LamL_p=zp.copy(),
            sigma_p=np.zeros((grid.n_windows, O.shape[2], k)),
            L=zg.copy(), S=zg.copy(), N=zg.copy(), J=zg.copy(), X=zg.copy(),
            U=np.zeros((3,) + O.shape), Lam=np.zeros((3,) + O.shape), LamX=zg.copy(),
            mu=mu0,
        )


def local_sweep(state, lam, beta, pen):
    """Update (L, S, N) on every window against the current J."""
    mu = state.mu
    # LamL enters with a minus sign, consistent with LamL += mu * (L - J)
    M = 0.5 * (
        state.O_p + state.J_p - state.S_p - state.N_p
        + (state.LamO_p - state.LamL_p) / mu
    )
    state.L_p, state.sigma_p = update_L_patch(M, state.sigma_p, mu, pen)
    state.S_p = soft(state.O_p - state.L_p - state.N_p + state.LamO_p / mu, lam / mu)
    state.N_p = update_N_patch(state.O_p, state.L_p, state.S_p, state.LamO_p, mu, beta)
    state.L = aggregate(state.L_p, state.grid)
    state.S = aggregate(state.S_p, state.grid)
    state.N = aggregate(state.N_p, state.grid)


def global_sweep(state, tau, w, denom):
    """Update J, X, U given the windowed L."""
    mu = state.mu
    state.J = update_J(state.X, state.LamX, state.L_p, state.LamL_p, state.grid, mu)
    state.J_p = extract_all(state.J, state.grid)
    state.X = update_X(state.J, state.LamX, state.U, state.Lam, w, mu, denom)
    state.U = update_U(state.X, state.Lam, w, tau, mu)


def lagrangian_step(state, w=DiffWeights()):
    mu = state.mu
    state.LamO_p = state.LamO_p + mu * (state.O_p - state.L_p - state.S_p - state.N_p)
    state.LamL_p = state.LamL_p + mu * (state.L_p - state.J_p)
    state.LamX = state.LamX + mu * (state.J - state.X)
    state.Lam = state.Lam + mu * (state.U - diff(state.X, w))
    return state


def _max_abs(a):
    return float(np.max(np.abs(a))) if a.size else 0.0


def convergence_check(state, eps):
    errors = (
        _max_abs(state.O_p - state.L_p - state.S_p - state.N_p),
        _max_abs(state.L_p - state.J_p),
        _max_abs(state.J - state.X),
    )
    return max(errors) <= eps, errors


def denoise(O, cfg=None, reference=None):
    """Restore a cube with values normalized to [0, 1].

    Returns ``(L, S, N, trace)``. Hitting ``max_iter`` is not an error; the
    last iterate is returned and ``trace.converged`` stays False.
    """
    cfg = cfg or SolverConfig()
    O = np.asarray(O, dtype=float)
    if O.ndim != 3:
        raise DomainError(f"expected an m x n x p cube, got shape {O.shape}")
    dims = O.shape
    lam = cfg.sparsity_weight(dims)
    beta = cfg.noise_weight(dims)
    pen = GammaPenalty(cfg.gamma)
    w = cfg.weights
    grid = build_grid(dims, cfg.patch, cfg.stride)
    denom = transfer_denominator(dims, w)

    state = SolverState.initial(O, grid, cfg.mu0)
    trace = IterationTrace()
    for it in range(cfg.max_iter):
        local_sweep(state, lam, beta, pen)
        global_sweep(state, cfg.tau, w, denom)
        lagrangian_step(state, w)
        state.mu = min(cfg.rho * state.mu, cfg.mu_max)
        state.iteration = it + 1

        done, errors = convergence_check(state, cfg.eps)
        if cfg.record_trace:
            trace.error1.append(errors[0])
            trace.error2.append(errors[1])
            trace.error3.append(errors[2])
            if reference is not None:
                trace.mpsnr.append(metrics.mpsnr(state.L, reference))
                trace.mssim.append(metrics.mssim(state.L, reference))
        log.debug("iter %d mu=%.3g errors=%s", it + 1, state.mu, errors)
        if done:
            trace.converged = True
            break

    return state.L, state.S, state.N, trace
