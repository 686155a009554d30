"""Matplotlib figures written next to the CSV/text reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

DETECTOR_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red")


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_trace(x, intensities, path, xlabel="chi (rad)", peaks=None, title=None):
    """Four detector traces against the swept parameter, peaks marked."""
    x = np.asarray(x)
    intensities = np.asarray(intensities)
    fig, ax = plt.subplots(figsize=(7, 4))
    for k in range(4):
        ax.plot(x, intensities[:, k], color=DETECTOR_COLORS[k], label=f"I{k + 1}")
    if peaks is not None and len(peaks):
        for p in peaks:
            ax.axvline(x[p], color="0.6", lw=0.8, ls=":")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("normalized intensity")
    ax.set_xlim(x[0], x[-1])
    ax.legend(loc="upper right", ncol=4, fontsize="small")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_bell(result, path, reference=None, title=None):
    """Bar chart of the four correlations; optional reference values as markers."""
    labels = ["M(a1,b1)", "M(a1,b2)", "M(a2,b1)", "M(a2,b2)"]
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.bar(labels, result.m, color="0.55", label="measured")
    if reference is not None:
        ax.plot(labels, reference.m, "kx", ms=9, label="ideal")
    ax.axhline(0, color="k", lw=0.6)
    ax.set_ylim(-1.05, 1.05)
    ax.set_ylabel("M")
    ax.set_title(title or f"S = {result.s:.3f}")
    ax.legend(fontsize="small")
    return _finish(fig, path)


def plot_field(fmap, path, step=None, title=None):
    """Intensity map with polarization-orientation ticks."""
    inten = fmap.intensity
    orient, _ = fmap.ellipse(floor=1e-3 * inten.max())
    fig, ax = plt.subplots(figsize=(5, 5))
    ext = [fmap.x.min(), fmap.x.max(), fmap.y.min(), fmap.y.max()]
    ax.imshow(inten, origin="lower", extent=ext, cmap="gray")
    n = inten.shape[0]
    step = step or max(1, n // 16)
    sl = (slice(step // 2, None, step), slice(step // 2, None, step))
    u, v = np.cos(orient[sl]), np.sin(orient[sl])
    ax.quiver(fmap.x[sl], fmap.y[sl], u, v, color="tab:orange", pivot="middle",
              headwidth=0, headlength=0, headaxislength=0, scale=25)
    ax.set_xlabel("x / w")
    ax.set_ylabel("y / w")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_number_distribution(pn, path, mean=None):
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    n = np.arange(len(pn))
    ax.bar(n, pn, color="0.55")
    ax.set_xlabel("total photon number n")
    ax.set_ylabel("P(n)")
    if mean is not None:
        ax.set_title(f"mean photon number {mean:.3g}")
    return _finish(fig, path)
