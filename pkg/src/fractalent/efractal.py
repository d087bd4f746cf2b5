"""Billiard-loop overlay masks and their comparison against contour data.

A loop is the closed orbit of a point launched at 45 degrees from the bottom
edge of the bounding square, reflecting specularly off the outer walls.  Each
orbit is rasterized as a two-cell-wide zigzag stroke.  Launch offsets are
half-integers so every diagonal stroke covers exactly two cells symmetrically
about the ideal line.  The default offsets are anchored at the square's
center with satellite displacements that refine by a factor of the rule base
at each order, which matches where dominant contour ridges sit on these
lattices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .lattice import Lattice

_MAX_BOUNCES = 64


# ---------------------------------------------------------------------------
# Orbit geometry
# ---------------------------------------------------------------------------


def orbit_vertices(width: int, offset: float) -> list[tuple[float, float]]:
    """Reflection vertices of the 45-degree orbit launched at (offset, 0)."""
    if not 0.0 < offset < width:
        raise ValidationError(
            f"launch offset must lie strictly inside (0, {width}), got {offset}"
        )
    pos = np.array([float(offset), 0.0])
    vel = np.array([1.0, 1.0])
    start = (tuple(pos), tuple(vel))
    verts = [tuple(pos)]
    for _ in range(_MAX_BOUNCES):
        times = []
        for ax in (0, 1):
            times.append(
                (width - pos[ax]) / vel[ax] if vel[ax] > 0 else pos[ax] / -vel[ax]
            )
        t = min(t for t in times if t > 1e-12)
        pos = pos + t * vel
        for ax in (0, 1):
            if abs(pos[ax]) < 1e-9:
                pos[ax] = 0.0
            if abs(pos[ax] - width) < 1e-9:
                pos[ax] = float(width)
            if pos[ax] in (0.0, float(width)):
                vel[ax] = -vel[ax]
        verts.append((float(pos[0]), float(pos[1])))
        if (tuple(pos), tuple(vel)) == start:
            break
    else:
        raise ValidationError(
            f"orbit at offset {offset} did not close within {_MAX_BOUNCES} bounces"
        )
    return verts


def _segment_cells(width: int, p, q) -> set[tuple[int, int]]:
    """Grid cells of the two-wide stroke along the 45-degree segment p -> q."""
    x0, y0 = p
    x1, y1 = q
    i_lo = max(0, int(np.ceil(min(x0, x1) - 0.5 - 1e-9)))
    i_hi = min(width - 1, int(np.floor(max(x0, x1) + 0.5 + 1e-9)))
    cells: set[tuple[int, int]] = set()
    if np.isclose(x1 - x0, y1 - y0):
        const = int(np.floor(x0 - y0))
        for d in (const, const + 1):
            for i in range(i_lo, i_hi + 1):
                j = i - d
                if 0 <= j < width:
                    cells.add((i, j))
    else:
        const = int(np.floor(x0 + y0)) - 1
        for ssum in (const, const + 1):
            for i in range(i_lo, i_hi + 1):
                j = ssum - i
                if 0 <= j < width:
                    cells.add((i, j))
    return cells


def orbit_cells(width: int, offset: float) -> set[tuple[int, int]]:
    """All grid cells of the rasterized closed orbit."""
    verts = orbit_vertices(width, offset)
    cells: set[tuple[int, int]] = set()
    for p, q in zip(verts, verts[1:]):
        cells |= _segment_cells(width, p, q)
    return cells


# ---------------------------------------------------------------------------
# Families and composition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopFamily:
    """One rasterized orbit: its launch offset, stroke cells, and hole flag.

    ``hole_free`` is True when no on-lattice stroke cell touches a removed
    cell of the lattice; such a family runs entirely outside hole-hugging
    corridors.
    """

    launch_offset: float
    cells: tuple[tuple[int, int], ...]
    hole_free: bool


def _center_displacements(order: int) -> list[int]:
    """Satellite displacements about the center offset, per iteration order."""
    if order <= 1:
        return [0]
    if order == 2:
        return [0, 3, -3]
    if order == 3:
        return [0, 3, -3, 6, -6, 9, -9]
    if order == 4:
        return [0, 3, -3, 9, -9, 18, -18, 24, -24, 27, -27, 33, -33, 36, -36]
    prev = _center_displacements(order - 1)
    out = sorted({3 * d for d in prev} | {3, -3}, key=abs)
    signed: list[int] = []
    for v in sorted({abs(d) for d in out}):
        signed.append(v)
        if v:
            signed.append(-v)
    return signed


def default_offsets(lattice: Lattice) -> list[float]:
    """Center-anchored launch offsets for the lattice's iteration order.

    Offsets are width/2 plus integer satellite displacements scaled by the
    unit-cell width, snapped to half-integers so strokes are exactly two
    cells wide.
    """
    width = lattice.width
    half = width / 2.0
    offsets = []
    for d in _center_displacements(lattice.order):
        a = half + d * lattice.unit
        if float(a).is_integer():
            a += 0.5 if d >= 0 else -0.5
        if 0.0 < a < width:
            offsets.append(float(a))
    return offsets


def _hole_free(lattice: Lattice, cells) -> bool:
    """True when no on-lattice stroke cell has a removed 8-neighborhood cell."""
    width = lattice.width
    for (cx, cy) in cells:
        if not lattice.contains(cx, cy):
            continue
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                nx, ny = cx + dx, cy + dy
                if 0 <= nx < width and 0 <= ny < width and not lattice.contains(nx, ny):
                    return False
    return True


def ef_families(
    lattice: Lattice, offsets: list[float] | None = None
) -> list[LoopFamily]:
    """Rasterized orbit families for the given (or default) launch offsets."""
    if offsets is None:
        offsets = default_offsets(lattice)
    families = []
    for a in offsets:
        cells = tuple(sorted(orbit_cells(lattice.width, a)))
        families.append(
            LoopFamily(
                launch_offset=float(a),
                cells=cells,
                hole_free=_hole_free(lattice, cells),
            )
        )
    return families


@dataclass
class EFMask:
    """Union of loop families intersected with the lattice sites."""

    on: np.ndarray                       # bool per site, canonical order
    cells: tuple[tuple[int, int], ...]   # on-lattice cells
    families: tuple[LoopFamily, ...]

    @property
    def site_count(self) -> int:
        return int(self.on.sum())


def ef_compose(
    lattice: Lattice,
    families: list[LoopFamily] | None = None,
    exclude_hole_free: bool = True,
) -> EFMask:
    """Compose families into one site mask.

    By default a family lying entirely outside hole-hugging corridors is
    dropped from the composition; on the standard lattices no family
    qualifies, so the default composes all of them.
    """
    if families is None:
        families = ef_families(lattice)
    kept = [
        f for f in families if not (exclude_hole_free and f.hole_free)
    ] or list(families)
    cell_union: set[tuple[int, int]] = set()
    for fam in kept:
        cell_union |= set(fam.cells)
    on = np.zeros(lattice.site_count, dtype=bool)
    on_cells = []
    for (cx, cy) in sorted(cell_union):
        k = lattice.index_of(cx, cy)
        if k >= 0:
            on[k] = True
            on_cells.append((cx, cy))
    return EFMask(on=on, cells=tuple(on_cells), families=tuple(kept))


# ---------------------------------------------------------------------------
# Overlap and self-similarity scores
# ---------------------------------------------------------------------------


@dataclass
class OverlapResult:
    """Top-K contour overlap against a site mask, with a permutation null."""

    k: int
    score: float
    null_mean: float
    null_std: float
    z: float


def _top_k_hits(values: np.ndarray, on: np.ndarray, k: int) -> int:
    order = np.lexsort((np.arange(len(values)), -values))
    top = np.zeros(len(values), dtype=bool)
    top[order[:k]] = True
    return int((top & on).sum())


def ef_overlap(
    contour_values: np.ndarray,
    partition_mask_on_a: np.ndarray,
    n_permutations: int = 100,
    seed: int = 0,
) -> OverlapResult:
    """Score how sharply the largest contour values concentrate on a mask.

    ``contour_values`` are per-A-site entropy shares; ``partition_mask_on_a``
    flags which A sites belong to the mask.  With K mask sites, the score is
    the fraction of the K largest contour values that land on the mask.  Ties
    are broken by canonical site order.  The null distribution reshuffles the
    contour values with a seeded generator.
    """
    values = np.asarray(contour_values, dtype=float)
    on = np.asarray(partition_mask_on_a, dtype=bool)
    if values.shape != on.shape:
        raise ValidationError("contour values and mask flags must align")
    k = int(on.sum())
    if k == 0 or k == len(on):
        raise ValidationError("mask must cover some but not all subsystem sites")
    score = _top_k_hits(values, on, k) / k
    rng = np.random.default_rng(seed)
    null = np.empty(n_permutations)
    for p in range(n_permutations):
        null[p] = _top_k_hits(rng.permutation(values), on, k) / k
    null_mean = float(null.mean())
    null_std = float(null.std())
    z = (score - null_mean) / null_std if null_std > 0 else np.inf
    return OverlapResult(
        k=k, score=float(score), null_mean=null_mean, null_std=null_std, z=float(z)
    )


@dataclass
class SelfSimilarityResult:
    jaccard: float
    coarse_on: int
    reference_on: int
    intersection: int


def ef_self_similarity(
    fine_lattice: Lattice,
    fine_mask: np.ndarray,
    coarse_lattice: Lattice,
    coarse_mask: np.ndarray,
    vote_fraction: float = 1.0 / 3.0,
) -> SelfSimilarityResult:
    """Jaccard overlap of a coarse-grained mask with the previous-order mask.

    Each coarse site collects the fine sites of its m-by-m block; it votes
    "on" when at least ``vote_fraction`` of the present fine sites are on.
    The Jaccard index is computed over present coarse sites.
    """
    if fine_lattice.rule is None or coarse_lattice.rule is None:
        raise ValidationError("self-similarity needs iterated lattices")
    if fine_lattice.order != coarse_lattice.order + 1:
        raise ValidationError(
            "fine lattice must be exactly one order above the coarse lattice"
        )
    if fine_lattice.unit != 1 or coarse_lattice.unit != 1:
        raise ValidationError("self-similarity is defined for unit-width cells only")
    factor = fine_lattice.rule.m
    fine_on = np.asarray(fine_mask, dtype=bool)
    coarse_on = np.asarray(coarse_mask, dtype=bool)
    votes = np.zeros(coarse_lattice.site_count, dtype=bool)
    for k, (cx, cy) in enumerate(coarse_lattice.sites):
        present = 0
        on = 0
        for fx in range(factor * cx, factor * cx + factor):
            for fy in range(factor * cy, factor * cy + factor):
                fi = fine_lattice.index_of(fx, fy)
                if fi >= 0:
                    present += 1
                    if fine_on[fi]:
                        on += 1
        votes[k] = present > 0 and on / present >= vote_fraction
    inter = int((votes & coarse_on).sum())
    union = int((votes | coarse_on).sum())
    return SelfSimilarityResult(
        jaccard=inter / union if union else 1.0,
        coarse_on=int(votes.sum()),
        reference_on=int(coarse_on.sum()),
        intersection=inter,
    )
