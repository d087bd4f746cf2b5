"""Deterministic artifact writing: delimited outputs, masks, and a manifest.

Every file is written atomically (temp file + rename) with a fixed float
format, so identical inputs produce byte-identical artifacts.  The manifest
records run parameters, convention switches, and a content hash per file —
never timestamps.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .entanglement import Contour, Partition
from .lattice import Lattice


def fmt(value) -> str:
    """Canonical text form for a float: 12 significant digits, no noise."""
    return format(float(value), ".12g")


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# Concrete artifact writers
# ---------------------------------------------------------------------------


def write_lattice_csv(path, lattice: Lattice) -> None:
    rows = (
        [str(k), str(x), str(y), str(int(ob))]
        for k, ((x, y), ob) in enumerate(zip(lattice.sites, lattice.outer_boundary))
    )
    write_csv(path, ["index", "x", "y", "outer_boundary"], rows)


def write_adjacency_csv(path, lattice: Lattice) -> None:
    rows = ([str(i), str(j)] for i, j in lattice.edges)
    write_csv(path, ["i", "j"], rows)


def write_hamiltonian_csv(path, h) -> None:
    """Upper-triangle nonzero entries as row, col, value triplets."""
    h = np.asarray(h)
    rows_idx, cols_idx = np.nonzero(np.triu(h))
    rows = (
        [str(r), str(c), fmt(h[r, c])] for r, c in zip(rows_idx, cols_idx)
    )
    write_csv(path, ["row", "col", "value"], rows)


def write_contour_csv(path, lattice: Lattice, partition: Partition, contour: Contour) -> None:
    coords = lattice.sites[partition.rows_a]
    rows = (
        [str(x), str(y), str(d), fmt(s)]
        for (x, y), d, s in zip(coords, partition.depth, contour.site_values)
    )
    write_csv(path, ["x", "y", "i_y", "s"], rows)


def write_series_csv(path, series) -> None:
    rows = (
        [str(n), fmt(length), fmt(entropy)]
        for n, length, entropy in zip(series.orders, series.lengths, series.entropies)
    )
    write_csv(path, ["n", "L", "S"], rows)


def write_fit_csv(path, fit) -> None:
    rows = ([fmt(a), fmt(r)] for a, r in zip(fit.alphas, fit.r2))
    write_csv(path, ["alpha", "r2"], rows)


def write_profile_csv(path, profiles) -> None:
    rows = []
    for d, m, c, p in zip(
        profiles.depths_on, profiles.mean_on, profiles.count_on, profiles.p_on
    ):
        rows.append(["on", str(d), str(c), fmt(m), fmt(p)])
    for d, m, c in zip(profiles.depths_off, profiles.mean_off, profiles.count_off):
        rows.append(["off", str(d), str(c), fmt(m), ""])
    write_csv(path, ["class", "i_y", "n_sites", "mean_s", "p"], rows)


def write_dos_csv(path, centers, density) -> None:
    rows = ([fmt(c), fmt(d)] for c, d in zip(centers, density))
    write_csv(path, ["bin_center", "density"], rows)


def write_gaps_csv(path, gap_rows) -> None:
    rows = ([str(n), fmt(g)] for n, g in gap_rows)
    write_csv(path, ["n", "max_gap"], rows)


def write_spectrum_csv(path, spectrum) -> None:
    rows = (
        [fmt(x), fmt(e)] for x, e in zip(spectrum.xi, spectrum.eh_levels)
    )
    write_csv(path, ["xi", "eh_level"], rows)


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------


def write_manifest(out_dir, params: dict, conventions: dict | None = None) -> Path:
    """Hash every artifact in ``out_dir`` into manifest.json (no timestamps)."""
    out_dir = Path(out_dir)
    files = {}
    for p in sorted(out_dir.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            files[str(p.relative_to(out_dir))] = sha256_file(p)
    payload = {
        "params": params,
        "conventions": conventions or {},
        "files": files,
    }
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    target = out_dir / "manifest.json"
    atomic_write_text(target, text)
    return target


DEFAULT_CONVENTIONS = {
    "entropy_log_base": "e",
    "site_order": "row-major (sorted by y, then x)",
    "edge_order": "index pairs i<j, lexicographic",
    "occupation_ties": "uniform fractional filling across degenerate multiplets",
    "contour_degeneracy": "projector averaging within eigenvalue clusters (tol 1e-10)",
    "depth_origin": "1-based distance from the interface",
    "ef_offsets": "center-anchored half-integer launch offsets",
    "profile_window_fractal": "depths [2, ceil(max/3)]",
    "profile_window_uniform": "depths [2, floor(0.9*max)]",
}
