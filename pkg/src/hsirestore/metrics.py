"""Quality indices for restored cubes in the normalized [0, 1] domain."""
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DimensionMismatch, ImageTooSmall, ZeroBandMean, ZeroSpectrum

PSNR_CAP = 99.0
SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _check_same(x, ref):
    x = np.asarray(x, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if x.shape != ref.shape:
        raise DimensionMismatch(f"shapes differ: {x.shape} vs {ref.shape}")
    return x, ref


def psnr_band(x, ref, peak=1.0):
    x, ref = _check_same(x, ref)
    mse = np.mean((x - ref) ** 2)
    if mse < 1e-12:
        return PSNR_CAP
    return float(10.0 * np.log10(peak**2 / mse))


def gaussian_window(size=SSIM_WIN, sigma=SSIM_SIGMA):
    ax = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(ax**2) / (2.0 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def _ssim_maps(x, ref, data_range=1.0):
    """Local SSIM over 'valid' window positions; bands on the trailing axis."""
    if x.shape[0] < SSIM_WIN or x.shape[1] < SSIM_WIN:
        raise ImageTooSmall(f"SSIM needs at least {SSIM_WIN}x{SSIM_WIN}, got {x.shape[:2]}")
    win = gaussian_window()
    win = win.reshape(win.shape + (1,) * (x.ndim - 2))

    def filt(a):
        return fftconvolve(a, win, mode="valid", axes=(0, 1))

    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    mu_x, mu_y = filt(x), filt(ref)
    sxx = filt(x * x) - mu_x**2
    syy = filt(ref * ref) - mu_y**2
    sxy = filt(x * ref) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (sxx + syy + c2)
    return num / den


def ssim_band(x, ref):
    x, ref = _check_same(x, ref)
    return float(_ssim_maps(x, ref).mean())


def psnr_bands(x, ref, peak=1.0):
    x, ref = _check_same(x, ref)
    return np.array([psnr_band(x[..., b], ref[..., b], peak) for b in range(x.shape[-1])])


def ssim_bands(x, ref):
    x, ref = _check_same(x, ref)
    return _ssim_maps(x, ref).mean(axis=(0, 1))


def mpsnr(x, ref):
    return float(psnr_bands(x, ref).mean())


def mssim(x, ref):
    return float(ssim_bands(x, ref).mean())


def ergas(x, ref):
    """100 * sqrt(mean over bands of (RMSE_b / mean_b)^2), mean_b from ref."""
    x, ref = _check_same(x, ref)
    means = ref.mean(axis=(0, 1))
    if np.any(means == 0):
        raise ZeroBandMean(f"reference bands {np.flatnonzero(means == 0).tolist()} have zero mean")
    rmse = np.sqrt(np.mean((x - ref) ** 2, axis=(0, 1)))
    return float(100.0 * np.sqrt(np.mean((rmse / means) ** 2)))


def msad(x, ref):
    """Mean spectral angle between per-pixel spectra, in degrees."""
    x, ref = _check_same(x, ref)
    xs = x.reshape(-1, x.shape[-1])
    rs = ref.reshape(-1, ref.shape[-1])
    nx = np.linalg.norm(xs, axis=1)
    nr = np.linalg.norm(rs, axis=1)
    if np.any(nx == 0) or np.any(nr == 0):
        raise ZeroSpectrum("zero spectral vector present")
    cos = np.clip(np.sum(xs * rs, axis=1) / (nx * nr), -1.0, 1.0)
    return float(np.degrees(np.arccos(cos)).mean())


@dataclass
class MetricsReport:
    psnr: np.ndarray
    ssim: np.ndarray
    mpsnr: float
    mssim: float
    ergas: float
    msad: float


def evaluate(x, ref):
    x, ref = _check_same(x, ref)
    p = psnr_bands(x, ref)
    s = ssim_bands(x, ref)
    return MetricsReport(
        psnr=p,
        ssim=s,
        mpsnr=float(p.mean()),
        mssim=float(s.mean()),
        ergas=ergas(x, ref),
        msad=msad(x, ref),
    )
