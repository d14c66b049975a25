"""Overlapping spatial windows spanning all bands.

Windows sit on a regular grid of top-left corners spaced by the stride; a
final row/column of windows is clamped flush to the image edge so every
pixel is covered. Scatter-adds loop over windows in grid order, which keeps
aggregation bit-reproducible.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, MissingWindow, PatchLargerThanImage


def _corners(size, patch, stride):
    starts = list(range(0, size - patch + 1, stride))
    if starts[-1] != size - patch:
        starts.append(size - patch)
    return starts


@dataclass(frozen=True)
class PatchGrid:
    dims: tuple
    patch_size: tuple
    stride: tuple
    corners: tuple = field(repr=False)
    coverage: np.ndarray = field(repr=False, compare=False)

    @property
    def n_windows(self):
        return len(self.corners)

    def window(self, index):
        if not 0 <= index < len(self.corners):
            raise IndexOutOfRange(f"window {index} not in [0, {len(self.corners)})")
        r, c = self.corners[index]
        return slice(r, r + self.patch_size[0]), slice(c, c + self.patch_size[1])


def build_grid(dims, patch_size=(20, 20), stride=(10, 10)):
    m, n = dims[0], dims[1]
    m1, n1 = patch_size
    if np.ndim(stride) == 0:
        stride = (stride, stride)
    sr, sc = stride
    if m1 < 1 or n1 < 1 or sr < 1 or sc < 1:
        raise ValueError("patch size and stride must be positive")
    if m1 > m or n1 > n:
        raise PatchLargerThanImage(f"patch {m1}x{n1} exceeds image {m}x{n}")
    # a stride wider than the patch would leave uncovered gaps
    sr, sc = min(sr, m1), min(sc, n1)

    corners = tuple(
        (r, c) for r in _corners(m, m1, sr) for c in _corners(n, n1, sc)
    )
    coverage = np.zeros((m, n), dtype=np.int64)
    for r, c in corners:
        coverage[r : r + m1, c : c + n1] += 1
    coverage.setflags(write=False)
    return PatchGrid(tuple(dims), (m1, n1), (sr, sc), corners, coverage)


def extract(t, grid, window_index):
    rows, cols = grid.window(window_index)
    return np.array(t[rows, cols, ...], copy=True)


def extract_all(t, grid):
    """All windows stacked along a new leading axis."""
    m1, n1 = grid.patch_size
    out = np.empty((grid.n_windows, m1, n1) + t.shape[2:], dtype=t.dtype)
    for k, (r, c) in enumerate(grid.corners):
        out[k] = t[r : r + m1, c : c + n1]
    return out


def scatter_add(patches, grid):
    """Sum of P^T applied to each window's patch (no normalization)."""
    patches = np.asarray(patches)
    m1, n1 = grid.patch_size
    if patches.shape[0] != grid.n_windows or patches.shape[1:3] != (m1, n1):
        raise DimensionMismatch(
            f"expected {grid.n_windows} patches of {m1}x{n1}, got {patches.shape}"
        )
    out = np.zeros(tuple(grid.dims[:2]) + patches.shape[3:], dtype=patches.dtype)
    for k, (r, c) in enumerate(grid.corners):
        out[r : r + m1, c : c + n1] += patches[k]
    return out


def _coverage_like(grid, ndim):
    cov = grid.coverage.astype(float)
    return cov.reshape(cov.shape + (1,) * (ndim - 2))


def aggregate(patches, grid):
    """Mean over overlapping windows of their patch values.

    ``patches`` is either a stacked array (one patch per window, in grid
    order) or a list of ``(window_index, patch)`` pairs covering every window
    exactly once.
    """
    if not isinstance(patches, np.ndarray):
        patches = list(patches)
        seen = sorted(idx for idx, _ in patches)
        if seen != list(range(grid.n_windows)):
            missing = sorted(set(range(grid.n_windows)) - set(seen))
            raise MissingWindow(f"windows missing or repeated (missing: {missing})")
        patches = np.stack([p for _, p in sorted(patches, key=lambda item: item[0])])
    patches = np.asarray(patches)
    m1, n1 = grid.patch_size
    if patches.shape[0] != grid.n_windows or patches.shape[1:3] != (m1, n1):
        raise DimensionMismatch(
            f"expected {grid.n_windows} patches of {m1}x{n1}, got {patches.shape}"
        )
    # running mean: exact when all contributions to a voxel agree
    out = np.zeros(tuple(grid.dims[:2]) + patches.shape[3:])
    seen = np.zeros(tuple(grid.dims[:2]) + (1,) * (patches.ndim - 3))
    for k, (r, c) in enumerate(grid.corners):
        win = (slice(r, r + m1), slice(c, c + n1))
        seen[win] += 1
        out[win] += (patches[k] - out[win]) / seen[win]
    return out


def update_J(X, LamX, L_patches, LamL_patches, grid, mu):
    """Closed-form J update: consensus between X and all overlapping patches."""
    if X.shape[:2] != tuple(grid.dims[:2]):
        raise DimensionMismatch(f"X has shape {X.shape}, grid is {grid.dims}")
    num = X - LamX / mu + scatter_add(L_patches + LamL_patches / mu, grid)
    return num / (1.0 + _coverage_like(grid, X.ndim))
