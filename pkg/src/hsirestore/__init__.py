"""Mixed-noise removal for hyperspectral cubes.

Local low-rank patches (nonconvex exponential surrogate on Fourier-slice
singular values) combined with global spatial-spectral TV, solved by ADMM.
"""
from .metrics import MetricsReport, evaluate
from .noise import NoiseSpec, apply_noise, default_spec
from .solver import IterationTrace, SolverConfig, denoise
from .sstv import DiffWeights

__all__ = [
    "DiffWeights",
    "IterationTrace",
    "MetricsReport",
    "NoiseSpec",
    "SolverConfig",
    "apply_noise",
    "default_spec",
    "denoise",
    "evaluate",
]
