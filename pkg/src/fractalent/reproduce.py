"""Named figure presets: each id rebuilds one published-style panel at desk scale."""
from __future__ import annotations

import json
from collections import OrderedDict
from pathlib import Path

import numpy as np

from . import analysis, artifacts, efractal, plotting
from .entanglement import (
    BUILTIN_PARTITIONS,
    entanglement_contour,
    partition_half_cut,
    write_mask_file,
)
from .errors import ValidationError
from .lattice import build_carpet, build_generalized, build_square
from .models import build_h1, build_h2
from .spectral import diagonalize, dos_exact, dos_kpm, gap_series, occupy


class _EigCache:
    """Keeps the few most recent eigensystems of a reproduction session."""

    def __init__(self, capacity: int = 2) -> None:
        self.capacity = capacity
        self._store: OrderedDict = OrderedDict()

    def get(self, key, builder):
        if key in self._store:
            self._store.move_to_end(key)
            return self._store[key]
        value = builder()
        self._store[key] = value
        while len(self._store) > self.capacity:
            self._store.popitem(last=False)
        return value


def _h1_ground(cache: _EigCache, order: int, allow_large: bool):
    def build():
        lat = build_carpet(order)
        eig = diagonalize(build_h1(lat), allow_large=allow_large)
        occ = occupy(eig.energies, lat.site_count // 2)
        return lat, eig, occ

    return cache.get(("h1", order), build)


def _h2_ground(cache: _EigCache, order: int, allow_large: bool):
    def build():
        lat = build_carpet(order)
        eig = diagonalize(build_h2(lat), allow_large=allow_large)
        occ = occupy(eig.energies, lat.site_count)
        return lat, eig, occ

    return cache.get(("h2", order), build)


def _series(cache, model: str, partition: str, orders, allow_large: bool):
    lengths, entropies = [], []
    for n in orders:
        if model == "h1":
            lat, eig, occ = _h1_ground(cache, n, allow_large)
            orb = 1
        else:
            lat, eig, occ = _h2_ground(cache, n, allow_large)
            orb = 2
        part = BUILTIN_PARTITIONS[partition](lat)
        contour = entanglement_contour(eig, occ, part, orbitals_per_site=orb)
        lengths.append(part.cut_length)
        entropies.append(contour.total)
    return analysis.ScalingSeries(
        orders=list(orders),
        lengths=np.array(lengths, dtype=float),
        entropies=np.array(entropies),
        label=f"{model}-{partition}",
    )


def _write_summary(out: Path, payload: dict) -> None:
    artifacts.atomic_write_text(
        out / "summary.json", json.dumps(payload, sort_keys=True, indent=2) + "\n"
    )


def _fit_figure(out, fig_id, cache, model, partition, allow_large):
    orders = (2, 3, 4)
    series = _series(cache, model, partition, orders, allow_large)
    fit = (
        analysis.fit_superarea(series)
        if model == "h1"
        else analysis.fit_powerlaw_ee(series)
    )
    artifacts.write_series_csv(out / "series.csv", series)
    artifacts.write_fit_csv(out / "fit_scan.csv", fit)
    plotting.plot_series_fit(
        series, fit, out / f"{fig_id}.png", logcorrected=model == "h1"
    )
    _write_summary(
        out,
        {
            "figure": fig_id,
            "model": model,
            "partition": partition,
            "orders": list(orders),
            "best_alpha": fit.best_alpha,
            "best_r2": fit.best_r2,
            "pinned_r2": fit.pinned_r2,
            "pinned_slope": fit.pinned_slope,
            "pinned_intercept": fit.pinned_intercept,
        },
    )


def _contour_figure(out, fig_id, cache, model, partition, allow_large, order=4):
    if model == "h1":
        lat, eig, occ = _h1_ground(cache, order, allow_large)
        orb = 1
    else:
        lat, eig, occ = _h2_ground(cache, order, allow_large)
        orb = 2
    part = BUILTIN_PARTITIONS[partition](lat)
    contour = entanglement_contour(eig, occ, part, orbitals_per_site=orb)
    artifacts.write_contour_csv(out / "contour.csv", lat, part, contour)
    plotting.plot_site_field(
        lat,
        part.rows_a,
        contour.site_values,
        out / f"{fig_id}.png",
        title=f"{lat.label} {model} partition {partition}",
    )
    _write_summary(
        out,
        {
            "figure": fig_id,
            "model": model,
            "partition": partition,
            "order": order,
            "entropy": contour.total,
        },
    )


def _fig3c(out, fig_id, cache, seed, allow_large):
    lat = build_carpet(4)
    families = efractal.ef_families(lat)
    mask = efractal.ef_compose(lat, families)
    write_mask_file(out / "ef_mask.txt", mask.on)
    plotting.plot_mask(lat, mask.on, out / f"{fig_id}.png", title=f"{lat.label} overlay")
    _write_summary(
        out,
        {
            "figure": fig_id,
            "order": 4,
            "families": len(families),
            "offsets": [f.launch_offset for f in families],
            "mask_sites": mask.site_count,
        },
    )


def _fig5b(out, fig_id, cache, seed, allow_large):
    lat, eig, occ = _h1_ground(cache, 4, allow_large)
    part = BUILTIN_PARTITIONS["IV"](lat)
    contour = entanglement_contour(eig, occ, part)
    mask = efractal.ef_compose(lat)
    profiles = analysis.contour_profiles(part, contour.site_values, mask.on)
    window = analysis.triadic_window(int(part.depth.max()))
    fit_on = analysis.fit_powerlaw_profile(profiles.depths_on, profiles.mean_on, window)
    fit_off = analysis.fit_powerlaw_profile(
        profiles.depths_off, profiles.mean_off, window
    )
    artifacts.write_profile_csv(out / "profiles.csv", profiles)
    plotting.plot_profiles(
        profiles, (fit_on, fit_off), out / f"{fig_id}.png",
        title=f"{lat.label} h1 IV",
    )
    _write_summary(
        out,
        {
            "figure": fig_id,
            "window": list(window),
            "beta_on": fit_on.beta,
            "beta_off": fit_off.beta,
            "two_scale_ordering": bool(fit_off.beta - fit_on.beta >= 1.0),
        },
    )


def _fig5d(out, fig_id, cache, seed, allow_large):
    base = analysis.square_lattice_baseline(
        model="h1", lengths=(12, 24, 36, 48), allow_large=allow_large
    )
    lat_side = int(base.series.lengths[-1])
    rows = (
        [str(col), artifacts.fmt(beta)]
        for col, beta in zip(range(lat_side), base.column_betas)
    )
    artifacts.write_csv(out / "column_betas.csv", ["column", "beta"], rows)
    part = base.partition
    contour = base.contour
    lat = build_square(lat_side)
    artifacts.write_contour_csv(out / "contour.csv", lat, part, contour)
    xs = lat.sites[part.rows_a, 0]
    fig_cols = [0, lat_side // 4, lat_side // 2]
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for col in fig_cols:
        sel = xs == col
        order = np.argsort(part.depth[sel])
        ax.loglog(
            part.depth[sel][order], contour.site_values[sel][order], "o-",
            label=f"column {col}",
        )
    ax.set_xlabel("i_y")
    ax.set_ylabel("s")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / f"{fig_id}.png", dpi=150)
    plt.close(fig)
    _write_summary(
        out,
        {
            "figure": fig_id,
            "side": lat_side,
            "window": list(base.profile_window),
            "beta_min": float(base.column_betas.min()),
            "beta_max": float(base.column_betas.max()),
        },
    )


def _gap_figure(out, fig_id, model, allow_large):
    energies = {}
    for n in (1, 2, 3, 4):
        lat = build_carpet(n)
        h = build_h1(lat) if model == "h1" else build_h2(lat)
        energies[n] = diagonalize(h, allow_large=allow_large).energies
    rows = gap_series(energies)
    artifacts.write_gaps_csv(out / "gaps.csv", rows)
    plotting.plot_gaps(rows, out / f"{fig_id}.png", title=f"{model} max gap")
    _write_summary(out, {"figure": fig_id, "model": model, "gaps": dict(rows)})


def _square_dos_figure(out, fig_id, model, allow_large):
    lat = build_square(48, periodic=True)
    h = build_h1(lat) if model == "h1" else build_h2(lat)
    eig = diagonalize(h, allow_large=allow_large)
    centers, density = dos_exact(eig.energies, bins=96)
    artifacts.write_dos_csv(out / "dos.csv", centers, density)
    plotting.plot_dos(centers, density, out / f"{fig_id}.png", title=f"{model} square")
    _write_summary(out, {"figure": fig_id, "model": model, "lattice": lat.label})


def _carpet_dos_figure(out, fig_id, model, seed, allow_large):
    lat = build_carpet(4)
    h = (
        build_h1(lat, sparse=True)
        if model == "h1"
        else build_h2(lat, sparse=True)
    )
    centers, density = dos_kpm(
        h, n_moments=1024, n_vectors=20, bins=96, seed=seed
    )
    artifacts.write_dos_csv(out / "dos.csv", centers, density)
    plotting.plot_dos(
        centers, density, out / f"{fig_id}.png", title=f"{model} {lat.label} (kpm)"
    )
    _write_summary(out, {"figure": fig_id, "model": model, "lattice": lat.label})


def _figA4(out, fig_id, cache, seed, allow_large):
    systems = [(3, 1), (2, 2), (2, 3)]
    entropies = {}
    for order, unit in systems:
        lat = build_generalized(order, unit=unit)
        eig = diagonalize(build_h1(lat), allow_large=allow_large)
        occ = occupy(eig.energies, lat.site_count // 2)
        part = partition_half_cut(lat, label="IV")
        contour = entanglement_contour(eig, occ, part)
        tag = f"n{order}_s{unit}"
        artifacts.write_contour_csv(out / f"contour_{tag}.csv", lat, part, contour)
        plotting.plot_site_field(
            lat,
            part.rows_a,
            contour.site_values,
            out / f"{fig_id}_{tag}.png",
            title=f"{lat.label} h1 half cut",
        )
        entropies[tag] = contour.total
    _write_summary(out, {"figure": fig_id, "systems": entropies})


def _make_reproducers():
    reg = {}
    reg["fig2b"] = lambda out, c, s, a: _fit_figure(out, "fig2b", c, "h1", "I", a)
    reg["fig2d"] = lambda out, c, s, a: _fit_figure(out, "fig2d", c, "h1", "II", a)
    reg["fig3a"] = lambda out, c, s, a: _contour_figure(out, "fig3a", c, "h1", "II", a)
    reg["fig3b"] = lambda out, c, s, a: _contour_figure(out, "fig3b", c, "h1", "I", a)
    reg["fig3c"] = lambda out, c, s, a: _fig3c(out, "fig3c", c, s, a)
    reg["fig3d"] = lambda out, c, s, a: _contour_figure(out, "fig3d", c, "h1", "III", a)
    reg["fig3e"] = lambda out, c, s, a: _contour_figure(out, "fig3e", c, "h1", "IV", a)
    reg["fig5b"] = lambda out, c, s, a: _fig5b(out, "fig5b", c, s, a)
    reg["fig5d"] = lambda out, c, s, a: _fig5d(out, "fig5d", c, s, a)
    reg["fig6a"] = lambda out, c, s, a: _fit_figure(out, "fig6a", c, "h2", "I", a)
    reg["fig6b"] = lambda out, c, s, a: _fit_figure(out, "fig6b", c, "h2", "II", a)
    reg["fig6c"] = lambda out, c, s, a: _contour_figure(out, "fig6c", c, "h2", "I", a)
    reg["fig6d"] = lambda out, c, s, a: _contour_figure(out, "fig6d", c, "h2", "II", a)
    reg["fig8a"] = lambda out, c, s, a: _gap_figure(out, "fig8a", "h1", a)
    reg["fig8b"] = lambda out, c, s, a: _gap_figure(out, "fig8b", "h2", a)
    reg["fig8c"] = lambda out, c, s, a: _square_dos_figure(out, "fig8c", "h1", a)
    reg["fig8d"] = lambda out, c, s, a: _square_dos_figure(out, "fig8d", "h2", a)
    reg["fig8e"] = lambda out, c, s, a: _carpet_dos_figure(out, "fig8e", "h1", s, a)
    reg["fig8f"] = lambda out, c, s, a: _carpet_dos_figure(out, "fig8f", "h2", s, a)
    reg["figA4"] = lambda out, c, s, a: _figA4(out, "figA4", c, s, a)
    return reg


REPRODUCERS = _make_reproducers()
FIGURE_IDS = sorted(REPRODUCERS)


def reproduce(
    figure_id: str,
    out_dir,
    seed: int = 0,
    workers: int = 1,
    allow_large: bool = False,
) -> Path:
    """Regenerate the artifact set of one named figure under out_dir/figure_id."""
    if figure_id not in REPRODUCERS:
        raise ValidationError(
            f"unknown figure id {figure_id!r}; choose from {', '.join(FIGURE_IDS)}"
        )
    out = Path(out_dir) / figure_id
    out.mkdir(parents=True, exist_ok=True)
    cache = _EigCache(capacity=2)
    REPRODUCERS[figure_id](out, cache, seed, allow_large)
    artifacts.write_manifest(
        out,
        params={"figure": figure_id, "seed": seed},
        conventions=artifacts.DEFAULT_CONVENTIONS,
    )
    return out
