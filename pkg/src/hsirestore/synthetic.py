"""Seeded synthetic clean cubes with known low-rank structure."""
import numpy as np


def _smooth_spectrum(rng, p):
    bands = np.linspace(0.0, 1.0, p)
    centre = rng.uniform(0.1, 0.9)
    width = rng.uniform(0.15, 0.4)
    return 0.3 + 0.7 * np.exp(-((bands - centre) ** 2) / (2 * width**2))


def _smooth_map(rng, m, n):
    y, x = np.mgrid[0:m, 0:n]
    cy, cx = rng.uniform(0, m), rng.uniform(0, n)
    s = rng.uniform(0.2, 0.5) * max(m, n)
    return np.exp(-((y - cy) ** 2 + (x - cx) ** 2) / (2 * s**2))


def _block_labels(rng, m, n, n_blocks):
    labels = np.zeros((m, n), dtype=int)
    for k in range(1, n_blocks + 1):
        h, w = rng.integers(m // 6, m // 2 + 1), rng.integers(n // 6, n // 2 + 1)
        r, c = rng.integers(0, m - h + 1), rng.integers(0, n - w + 1)
        labels[r : r + h, c : c + w] = k
    return labels


def make_cube(shape=(64, 64, 20), seed=0, rank=3, n_blocks=4):
    """Sum of ``rank`` separable smooth components plus constant blocks.

    Each block region carries its own spectrum. Values are rescaled into
    [0.05, 0.95] so every band has a positive mean.
    """
    m, n, p = shape
    rng = np.random.default_rng(seed)
    cube = np.zeros(shape)
    for _ in range(rank):
        cube += np.einsum("ij,k->ijk", _smooth_map(rng, m, n), _smooth_spectrum(rng, p))

    if n_blocks:
        labels = _block_labels(rng, m, n, n_blocks)
        spectra = np.stack([0.5 * _smooth_spectrum(rng, p) for _ in range(n_blocks + 1)])
        spectra[0] = 0.0
        cube += spectra[labels]

    lo, hi = cube.min(), cube.max()
    return 0.05 + 0.9 * (cube - lo) / (hi - lo)


def make_low_rank(shape=(32, 32, 10), seed=0, rank=2):
    """Purely separable cube: ``rank`` spatial maps times spectra, in [0.05, 0.95]."""
    return make_cube(shape, seed=seed, rank=rank, n_blocks=0)
