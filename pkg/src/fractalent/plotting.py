"""Figure rendering to files; every function saves a PNG and closes it."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .lattice import Lattice


def _site_scatter(ax, coords, values, width, cmap="inferno", log=False, size=None):
    if size is None:
        size = max(1.0, (280.0 / width) ** 2)
    vals = np.asarray(values, dtype=float)
    if log:
        floor = max(vals[vals > 0].min() if (vals > 0).any() else 1e-12, 1e-12)
        vals = np.log10(np.maximum(vals, floor))
    sc = ax.scatter(
        coords[:, 0], coords[:, 1], c=vals, s=size, marker="s", cmap=cmap,
        linewidths=0,
    )
    ax.set_aspect("equal")
    ax.set_xlim(-1, width)
    ax.set_ylim(-1, width)
    return sc


def plot_site_field(
    lattice: Lattice, site_indices, values, path, title="", log=True
) -> None:
    """Heatmap of per-site values (e.g. contour shares) on the lattice."""
    fig, ax = plt.subplots(figsize=(6, 6))
    coords = lattice.sites[np.asarray(site_indices, dtype=np.int64)]
    sc = _site_scatter(ax, coords, values, lattice.width, log=log)
    fig.colorbar(sc, ax=ax, shrink=0.8, label="log10 s" if log else "s")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_mask(lattice: Lattice, on, path, title="") -> None:
    """Two-tone rendering of a site mask over the lattice."""
    fig, ax = plt.subplots(figsize=(6, 6))
    on = np.asarray(on, dtype=bool)
    size = max(1.0, (280.0 / lattice.width) ** 2)
    off_coords = lattice.sites[~on]
    on_coords = lattice.sites[on]
    ax.scatter(
        off_coords[:, 0], off_coords[:, 1], c="#c8c8c8", s=size, marker="s",
        linewidths=0,
    )
    ax.scatter(
        on_coords[:, 0], on_coords[:, 1], c="#b40426", s=size, marker="s",
        linewidths=0,
    )
    ax.set_aspect("equal")
    ax.set_xlim(-1, lattice.width)
    ax.set_ylim(-1, lattice.width)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_series_fit(series, fit, path, logcorrected: bool) -> None:
    """Left: data with the best-exponent fit line; right: R^2 over the scan."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ls = series.lengths
    ys = series.entropies / np.log(ls) if logcorrected else series.entropies
    ax1.plot(ls, ys, "o", label="data")
    grid = np.linspace(ls.min(), ls.max(), 200)
    ax1.plot(
        grid,
        fit.best_slope * grid**fit.best_alpha + fit.best_intercept,
        "-",
        label=f"alpha={fit.best_alpha:.2f}",
    )
    ax1.set_xlabel("L")
    ax1.set_ylabel("S / ln L" if logcorrected else "S")
    ax1.legend()
    ax2.plot(fit.alphas, fit.r2, "-")
    ax2.axvline(fit.best_alpha, color="k", ls=":")
    ax2.set_xlabel("alpha")
    ax2.set_ylabel("R^2")
    ax2.set_ylim(min(0.9, fit.r2.min()), 1.001)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_profiles(profiles, fits, path, title="") -> None:
    """Log-log layer means for both mask classes with their fitted lines."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(profiles.depths_on, profiles.mean_on, "o", label="on mask")
    ax.loglog(profiles.depths_off, profiles.mean_off, "s", label="off mask")
    for fitp, style in zip(fits, ("-", "--")):
        if fitp is None:
            continue
        lo, hi = fitp.window
        grid = np.linspace(lo, hi, 50)
        ax.loglog(
            grid,
            np.exp(fitp.intercept) * grid ** (-fitp.beta),
            style,
            label=f"beta={fitp.beta:.2f}",
        )
    ax.set_xlabel("i_y")
    ax.set_ylabel("mean s")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_dos(centers, density, path, title="") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(centers, density, "-")
    ax.set_xlabel("E")
    ax.set_ylabel("density")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_gaps(gap_rows, path, title="", logscale=True) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ns = [n for n, _ in gap_rows]
    gs = [g for _, g in gap_rows]
    if logscale:
        ax.semilogy(ns, gs, "o-")
    else:
        ax.plot(ns, gs, "o-")
    ax.set_xlabel("n")
    ax.set_ylabel("max gap")
    ax.set_xticks(ns)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
