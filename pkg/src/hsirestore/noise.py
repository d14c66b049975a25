"""Seeded mixed-noise degradation of clean cubes in the [0, 1] domain.

Noise is applied in a fixed order from a single random stream: Gaussian,
stripes, salt-and-pepper impulse, deadlines. Bands are numbered from 1 in
band ranges, matching how datasets are usually described.
"""
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .errors import BandRangeOutOfBounds, DomainError, UnknownCase

# (p, stripe bands, deadline bands) for the two simulated datasets
_KNOWN_LAYOUTS = {
    224: ((111, 140), (131, 160)),  # Indian Pines
    80: ((44, 64), (54, 74)),  # Pavia City Centre subset
}
_REFERENCE_P = 224


@dataclass
class NoiseSpec:
    case: int = 0
    sigma: tuple = (0.0, 0.0)
    impulse: tuple = (0.0, 0.0)
    stripe_bands: Optional[tuple] = None
    stripe_count: tuple = (20, 40)
    stripe_amplitude: tuple = (0.2, 0.5)
    deadline_bands: Optional[tuple] = None
    deadline_count: tuple = (3, 10)
    deadline_width: tuple = (1, 3)
    seed: int = 0

    def __post_init__(self):
        for name in ("sigma", "impulse", "stripe_count", "stripe_amplitude",
                     "deadline_count", "deadline_width"):
            setattr(self, name, _as_range(getattr(self, name), name))
        for name in ("stripe_bands", "deadline_bands"):
            if getattr(self, name) is not None:
                setattr(self, name, tuple(int(v) for v in _as_range(getattr(self, name), name)))
        lo, hi = self.impulse
        if lo < 0 or hi > 1:
            raise DomainError(f"impulse fraction must lie in [0, 1], got {self.impulse}")
        if self.sigma[0] < 0:
            raise DomainError("sigma must be nonnegative")
        for name in ("stripe_count", "deadline_count", "deadline_width"):
            lo, hi = getattr(self, name)
            if lo < 0 or lo != int(lo) or hi != int(hi):
                raise DomainError(f"{name} must be a range of nonnegative integers")
            setattr(self, name, (int(lo), int(hi)))

    def to_items(self):
        """Ordered (key, text) pairs for key=value serialization."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append((f.name, _format_value(v)))
        return out


def _as_range(v, name):
    if np.ndim(v) == 0:
        v = (v, v)
    lo, hi = v
    if lo > hi:
        raise DomainError(f"{name} range is not ordered: {v}")
    return (lo, hi)


def _format_value(v):
    if v is None:
        return "none"
    if isinstance(v, tuple):
        if v[0] == v[1]:
            return _format_value(v[0])
        return ",".join(_format_value(x) for x in v)
    return repr(v) if isinstance(v, float) else str(v)


def _scaled_range(first, last, p):
    lo = max(1, round(first * p / _REFERENCE_P))
    hi = min(p, max(lo, round(last * p / _REFERENCE_P)))
    return (lo, hi)


def default_spec(case_id, p, seed=0):
    if case_id not in range(1, 7):
        raise UnknownCase(f"noise case must be 1..6, got {case_id}")
    if p in _KNOWN_LAYOUTS:
        stripes, deadlines = _KNOWN_LAYOUTS[p]
    else:
        stripes = _scaled_range(111, 140, p)
        deadlines = _scaled_range(131, 160, p)

    if case_id == 1:
        return NoiseSpec(case=1, sigma=0.1, impulse=0.2, seed=seed)
    if case_id == 2:
        return NoiseSpec(case=2, sigma=0.1, impulse=0.0, seed=seed)
    spec = NoiseSpec(case=case_id, sigma=(0.0, 0.2), impulse=(0.0, 0.2), seed=seed)
    if case_id in (4, 6):
        spec.stripe_bands = stripes
    if case_id in (5, 6):
        spec.deadline_bands = deadlines
    return spec


@dataclass
class NoiseRecord:
    """What was struck where. Band indices here are 0-based."""

    sigmas: np.ndarray
    impulse_fractions: np.ndarray
    impulse_mask: np.ndarray
    stripes: dict = field(default_factory=dict)  # band -> [(col, offset)]
    deadlines: dict = field(default_factory=dict)  # band -> [col]


def _draw(rng, rng_range):
    lo, hi = rng_range
    return lo if lo == hi else rng.uniform(lo, hi)


def _draw_int(rng, rng_range):
    lo, hi = rng_range
    return int(rng.integers(lo, hi + 1))


def _band_indices(band_range, p):
    first, last = band_range
    if first < 1 or last > p:
        raise BandRangeOutOfBounds(f"band range {band_range} outside [1, {p}]")
    return range(first - 1, last)


def apply_noise(clean, spec):
    """Return ``(noisy, record)``. The result is not clipped to [0, 1]."""
    clean = np.asarray(clean, dtype=float)
    m, n, p = clean.shape
    stripe_bands = _band_indices(spec.stripe_bands, p) if spec.stripe_bands else range(0)
    deadline_bands = _band_indices(spec.deadline_bands, p) if spec.deadline_bands else range(0)

    rng = np.random.default_rng(spec.seed)
    sigmas = np.array([_draw(rng, spec.sigma) for _ in range(p)], dtype=float)
    fractions = np.array([_draw(rng, spec.impulse) for _ in range(p)], dtype=float)

    noisy = clean.copy()
    if np.any(sigmas > 0):
        noisy += rng.standard_normal(clean.shape) * sigmas

    stripe_record = {}
    for b in stripe_bands:
        count = min(_draw_int(rng, spec.stripe_count), n)
        cols = rng.choice(n, size=count, replace=False)
        amps = rng.uniform(*spec.stripe_amplitude, size=count)
        signs = rng.choice((-1.0, 1.0), size=count)
        offsets = amps * signs
        noisy[:, cols, b] += offsets
        stripe_record[b] = sorted(zip(cols.tolist(), offsets.tolist()))

    # impulses after stripes so struck pixels stay exactly 0 or 1
    mask = np.zeros(clean.shape, dtype=bool)
    for b in range(p):
        k = int(round(fractions[b] * m * n))
        if k == 0:
            continue
        idx = rng.choice(m * n, size=k, replace=False)
        rows, cols = np.unravel_index(idx, (m, n))
        band = noisy[..., b]
        band[rows[: k // 2], cols[: k // 2]] = 0.0
        band[rows[k // 2 :], cols[k // 2 :]] = 1.0
        mask[rows, cols, b] = True

    record = NoiseRecord(sigmas, fractions, mask, stripes=stripe_record)
    for b in deadline_bands:
        count = _draw_int(rng, spec.deadline_count)
        struck = set()
        for _ in range(count):
            width = _draw_int(rng, spec.deadline_width)
            start = int(rng.integers(0, n))
            struck.update(range(start, min(start + width, n)))
        cols = sorted(struck)
        noisy[:, cols, b] = 0.0
        record.deadlines[b] = cols

    return noisy, record
