"""Figures written next to the CSV reports."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIG_DPI = 120


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def plot_trace(trace, path):
    """Constraint errors per iteration (log scale), plus MPSNR/MSSIM if traced."""
    has_quality = len(trace.mpsnr) > 0
    ncols = 2 if has_quality else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5 * ncols, 3.6), squeeze=False)
    it = np.arange(1, len(trace) + 1)

    ax = axes[0, 0]
    for name, errs in (("Error1", trace.error1), ("Error2", trace.error2), ("Error3", trace.error3)):
        ax.semilogy(it, np.maximum(errs, 1e-16), label=name)
    ax.set_xlabel("iteration")
    ax.set_ylabel("max abs residual")
    ax.legend(frameon=False)

    if has_quality:
        ax = axes[0, 1]
        ax.plot(it, trace.mpsnr, color="C0")
        ax.set_xlabel("iteration")
        ax.set_ylabel("MPSNR (dB)", color="C0")
        twin = ax.twinx()
        twin.plot(it, trace.mssim, color="C3")
        twin.set_ylabel("MSSIM", color="C3")
    _save(fig, path)


def plot_band_metrics(report, path):
    bands = np.arange(1, len(report.psnr) + 1)
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 3.6))
    a1.plot(bands, report.psnr, marker=".")
    a1.axhline(report.mpsnr, ls="--", lw=0.8, color="k")
    a1.set_xlabel("band")
    a1.set_ylabel("PSNR (dB)")
    a2.plot(bands, report.ssim, marker=".", color="C2")
    a2.axhline(report.mssim, ls="--", lw=0.8, color="k")
    a2.set_xlabel("band")
    a2.set_ylabel("SSIM")
    fig.suptitle(f"ERGAS {report.ergas:.3f}   MSAD {report.msad:.3f} deg", fontsize=10)
    _save(fig, path)


def plot_bands(cubes, band, path):
    """Side-by-side views of one band (0-based) from several cubes.

    ``cubes`` maps a panel title to an m x n x p array.
    """
    fig, axes = plt.subplots(1, len(cubes), figsize=(3.2 * len(cubes), 3.4), squeeze=False)
    for ax, (title, cube) in zip(axes[0], cubes.items()):
        ax.imshow(cube[..., band], cmap="gray", vmin=0.0, vmax=1.0)
        ax.set_title(title, fontsize=10)
        ax.set_axis_off()
    _save(fig, path)
