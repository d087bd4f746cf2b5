"""End-to-end study driver: config in, artifact directory out."""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, artifacts, efractal, plotting
from .config import RunConfig
from .entanglement import (
    BUILTIN_PARTITIONS,
    entanglement_contour,
    partition_from_mask,
    partition_half_cut,
    read_mask_file,
    write_mask_file,
)
from .errors import ValidationError
from .lattice import Lattice, build_generalized, build_square, hausdorff_dims
from .models import build_h1, build_h2
from .spectral import (
    diagonalize,
    dos_exact,
    dos_kpm,
    ensure_capacity,
    nearest_pure_filling,
    occupy,
)


def build_lattice_from_config(cfg: RunConfig, order: int | None = None) -> Lattice:
    lat = cfg.lattice
    if lat.kind == "square":
        return build_square(lat.side, periodic=lat.periodic)
    m, m_f = (3, 1) if lat.kind == "carpet" else (lat.m, lat.m_f)
    return build_generalized(order or lat.order, unit=lat.unit, m=m, m_f=m_f)


def build_model(cfg: RunConfig, lattice: Lattice, sparse: bool = False):
    if cfg.model.kind == "h1":
        return build_h1(lattice, t=cfg.model.t, mu=cfg.model.mu, sparse=sparse)
    return build_h2(lattice, t=cfg.model.t, t1=cfg.model.t1, sparse=sparse)


def orbitals_per_site(cfg: RunConfig) -> int:
    return 1 if cfg.model.kind == "h1" else 2


def particle_count(cfg: RunConfig, dim: int, energies=None) -> int:
    target = dim // 2
    if cfg.model.filling == "half":
        return target
    if cfg.model.filling == "pure":
        if energies is None:
            raise ValidationError("pure filling needs the spectrum")
        return nearest_pure_filling(energies, target)
    return int(cfg.model.filling)


def make_partition(cfg: RunConfig, lattice: Lattice):
    kind = cfg.partition.kind
    if kind == "mask":
        mask = read_mask_file(cfg.partition.mask_path, lattice.site_count)
        return partition_from_mask(lattice, mask)
    if lattice.rule is None:
        return partition_half_cut(lattice, label=kind if kind == "IV" else "half")
    return BUILTIN_PARTITIONS[kind](lattice)


def _entropy_for_order(cfg: RunConfig, order: int, allow_large: bool):
    lattice = build_lattice_from_config(cfg, order=order)
    ensure_capacity(lattice.site_count * orbitals_per_site(cfg), allow_large)
    h = build_model(cfg, lattice)
    eig = diagonalize(h, allow_large=allow_large)
    particles = particle_count(cfg, eig.dim, eig.energies)
    occ = occupy(eig.energies, particles)
    part = make_partition(cfg, lattice)
    contour = entanglement_contour(
        eig, occ, part, orbitals_per_site=orbitals_per_site(cfg)
    )
    return order, part.cut_length, contour.total


def run_study(
    cfg: RunConfig,
    out_dir,
    seed: int = 0,
    workers: int = 1,
    allow_large: bool = False,
) -> Path:
    """Execute the configured study and write all artifacts under ``out_dir``."""
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary: dict = {"label": cfg.label, "seed": seed}

    lattice = build_lattice_from_config(cfg)
    artifacts.write_lattice_csv(out / "lattice.csv", lattice)
    artifacts.write_adjacency_csv(out / "adjacency.csv", lattice)
    summary["lattice"] = {
        "label": lattice.label,
        "width": lattice.width,
        "sites": lattice.site_count,
        "edges": int(len(lattice.edges)),
    }
    if lattice.rule is not None:
        dims = hausdorff_dims(lattice.rule)
        summary["lattice"]["dims"] = {
            "bulk": dims.bulk,
            "interface": dims.interface,
        }

    ensure_capacity(lattice.site_count * orbitals_per_site(cfg), allow_large)
    h = build_model(cfg, lattice)
    eig = diagonalize(h, allow_large=allow_large)
    particles = particle_count(cfg, eig.dim, eig.energies)
    occ = occupy(eig.energies, particles)
    summary["model"] = {
        "kind": cfg.model.kind,
        "dim": eig.dim,
        "particles": particles,
        "fractional_occupation": bool(
            np.any((occ > 1e-12) & (occ < 1.0 - 1e-12))
        ),
    }

    part = make_partition(cfg, lattice)
    orb = orbitals_per_site(cfg)
    contour = entanglement_contour(eig, occ, part, orbitals_per_site=orb)
    artifacts.write_contour_csv(out / "contour.csv", lattice, part, contour)
    artifacts.write_spectrum_csv(out / "spectrum.csv", contour.spectrum)
    plotting.plot_site_field(
        lattice,
        part.rows_a,
        contour.site_values,
        out / "contour.png",
        title=f"{lattice.label} {cfg.model.kind} partition {part.label}",
    )
    summary["partition"] = {
        "label": part.label,
        "size_a": part.size_a,
        "boundary_sites_geometric": part.boundary_sites_geometric,
        "boundary_sites_reported": part.boundary_sites_reported,
        "cut_length": part.cut_length,
        "entropy": contour.total,
        "contour_sum_matches_entropy": bool(
            abs(contour.site_values.sum() - contour.total) < 1e-8
        ),
    }

    ef_mask = None
    if cfg.ef.enabled and lattice.rule is not None and lattice.rule.m_f > 0:
        offsets = (
            None
            if cfg.ef.offsets == "default"
            else [float(tok) for tok in cfg.ef.offsets.split(",")]
        )
        families = efractal.ef_families(lattice, offsets=offsets)
        ef_mask = efractal.ef_compose(
            lattice, families, exclude_hole_free=cfg.ef.exclude_hole_free
        )
        write_mask_file(out / "ef_mask.txt", ef_mask.on)
        plotting.plot_mask(
            lattice, ef_mask.on, out / "ef_mask.png", title=f"{lattice.label} overlay"
        )
        try:
            overlap = efractal.ef_overlap(
                contour.site_values,
                ef_mask.on[part.rows_a],
                n_permutations=cfg.ef.permutations,
                seed=seed,
            )
            overlap_out = {
                "k": overlap.k,
                "score": overlap.score,
                "null_mean": overlap.null_mean,
                "null_std": overlap.null_std,
                "z": overlap.z,
            }
        except ValidationError:
            # e.g. at low orders the composed loops blanket every subsystem
            # site, so a top-K concentration score is undefined
            overlap_out = None
        summary["ef"] = {
            "families": len(families),
            "offsets": [f.launch_offset for f in families],
            "hole_free_flags": [bool(f.hole_free) for f in families],
            "mask_sites": ef_mask.site_count,
            "overlap": overlap_out,
        }

    if cfg.profile.enabled and ef_mask is not None:
        profiles = analysis.contour_profiles(part, contour.site_values, ef_mask.on)
        artifacts.write_profile_csv(out / "profiles.csv", profiles)
        depth_max = int(part.depth.max())
        if cfg.profile.window == "auto":
            window = (
                analysis.triadic_window(depth_max)
                if lattice.rule is not None and lattice.rule.m_f > 0
                else analysis.baseline_window(depth_max)
            )
        else:
            lo, hi = cfg.profile.window.split(",")
            window = (int(lo), int(hi))
        fit_on = fit_off = None
        try:
            fit_on = analysis.fit_powerlaw_profile(
                profiles.depths_on, profiles.mean_on, window
            )
            fit_off = analysis.fit_powerlaw_profile(
                profiles.depths_off, profiles.mean_off, window
            )
        except ValidationError:
            pass
        plotting.plot_profiles(
            profiles, (fit_on, fit_off), out / "profiles.png",
            title=f"{lattice.label} {cfg.model.kind} {part.label}",
        )
        recon = analysis.reconstruct_ee(profiles, contour.total)
        summary["profiles"] = {
            "window": list(window),
            "beta_on": fit_on.beta if fit_on else None,
            "beta_off": fit_off.beta if fit_off else None,
            "reconstruction": {
                "estimate": recon.estimate,
                "reference": recon.reference,
                "ratio": recon.ratio,
                "lower": recon.lower,
                "upper": recon.upper,
                "min_p": recon.min_p,
            },
        }

    if cfg.dos.enabled:
        if cfg.dos.method == "exact":
            centers, density = dos_exact(eig.energies, bins=cfg.dos.bins)
        else:
            h_sp = build_model(cfg, lattice, sparse=True)
            centers, density = dos_kpm(
                h_sp,
                n_moments=cfg.dos.moments,
                n_vectors=cfg.dos.vectors,
                bins=cfg.dos.bins,
                seed=seed,
            )
        artifacts.write_dos_csv(out / "dos.csv", centers, density)
        plotting.plot_dos(
            centers, density, out / "dos.png",
            title=f"{lattice.label} {cfg.model.kind} ({cfg.dos.method})",
        )
        bin_width = float(centers[1] - centers[0]) if len(centers) > 1 else 1.0
        summary["dos"] = {
            "method": cfg.dos.method,
            "bins": cfg.dos.bins,
            "integral": float(density.sum() * bin_width),
        }

    if cfg.fits.enabled:
        orders = sorted(cfg.fits.orders)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(
                    pool.map(
                        lambda n: _entropy_for_order(cfg, n, allow_large), orders
                    )
                )
        else:
            results = [_entropy_for_order(cfg, n, allow_large) for n in orders]
        results.sort()
        series = analysis.ScalingSeries(
            orders=[r[0] for r in results],
            lengths=np.array([r[1] for r in results], dtype=float),
            entropies=np.array([r[2] for r in results]),
            label=f"{cfg.model.kind}-{cfg.partition.kind}",
        )
        fit = (
            analysis.fit_superarea(series)
            if cfg.model.kind == "h1"
            else analysis.fit_powerlaw_ee(series)
        )
        artifacts.write_series_csv(out / "series.csv", series)
        artifacts.write_fit_csv(out / "fit_scan.csv", fit)
        plotting.plot_series_fit(
            series, fit, out / "fit.png", logcorrected=cfg.model.kind == "h1"
        )
        summary["fit"] = {
            "orders": series.orders,
            "lengths": series.lengths.tolist(),
            "entropies": series.entropies.tolist(),
            "kind": fit.kind,
            "best_alpha": fit.best_alpha,
            "best_r2": fit.best_r2,
            "pinned_r2": fit.pinned_r2,
            "pinned_slope": fit.pinned_slope,
            "pinned_intercept": fit.pinned_intercept,
        }

    artifacts.atomic_write_text(
        out / "summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n"
    )
    artifacts.write_manifest(
        out,
        params={"config": cfg.to_dict(), "seed": seed},
        conventions=artifacts.DEFAULT_CONVENTIONS,
    )
    return out
