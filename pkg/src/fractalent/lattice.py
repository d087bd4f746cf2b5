"""Square-grid lattices with self-similar holes, built by digit-exclusion rules.

A lattice is generated by iterating a substitution step n times: every kept
cell of an m-by-m macro-cell is subdivided again, while a centered block of
m_f-by-m_f cells is removed at each level.  A site survives all n levels iff
no base-m digit position puts both of its coordinates inside the hole band.
The classic carpet is (m, m_f) = (3, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class IterationRule:
    """One substitution step: m-by-m macro-cell with a centered m_f-wide hole."""

    m: int = 3
    m_f: int = 1

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValidationError(f"macro-cell width m must be >= 2, got {self.m}")
        if not 0 <= self.m_f < self.m:
            raise ValidationError(
                f"hole width m_f must satisfy 0 <= m_f < m, got m_f={self.m_f}, m={self.m}"
            )
        if self.m_f > 0 and (self.m - self.m_f) % 2 != 0:
            raise ValidationError(
                f"hole of width {self.m_f} cannot be centered in a width-{self.m} cell "
                "(m - m_f must be even)"
            )

    @property
    def hole_digits(self) -> range:
        """Base-m digit values that fall inside the removed center band."""
        lo = (self.m - self.m_f) // 2
        return range(lo, lo + self.m_f)

    @property
    def cells_kept(self) -> int:
        return self.m * self.m - self.m_f * self.m_f


@dataclass(frozen=True)
class FractalDims:
    """Hausdorff dimensions generated by an iteration rule.

    ``bulk`` is the dimension of the lattice itself; ``interface`` is the
    dimension of a straight cut's surviving intersection (a Cantor-type set).
    """

    bulk: float
    interface: float


def hausdorff_dims(rule: IterationRule) -> FractalDims:
    if rule.m_f == 0:
        return FractalDims(bulk=2.0, interface=1.0)
    return FractalDims(
        bulk=math.log(rule.cells_kept) / math.log(rule.m),
        interface=math.log(rule.m - rule.m_f) / math.log(rule.m),
    )


@dataclass
class Lattice:
    """A finite lattice patch on the integer grid [0, width)^2.

    Sites are stored in canonical row-major order: sorted by (y, x).  Edges
    connect unit-Manhattan neighbors and are stored as index pairs (i, j)
    with i < j, sorted lexicographically.
    """

    order: int
    unit: int
    rule: IterationRule | None
    width: int
    periodic: bool
    sites: np.ndarray                 # (K, 2) int64, columns (x, y)
    edges: np.ndarray                 # (E, 2) int64, i < j
    outer_boundary: np.ndarray        # (K,) bool: on the bounding frame
    hole_boundary: np.ndarray         # (K,) bool: touches a removed cell
    label: str
    _index: np.ndarray = field(repr=False, default=None)  # (W, W) int64, -1 = absent

    @property
    def site_count(self) -> int:
        return len(self.sites)

    def index_of(self, x: int, y: int) -> int:
        """Site index at (x, y), or -1 if absent / out of range."""
        if 0 <= x < self.width and 0 <= y < self.width:
            return int(self._index[y, x])
        return -1

    def contains(self, x: int, y: int) -> bool:
        return self.index_of(x, y) >= 0

    def neighbor_lists(self) -> list[np.ndarray]:
        """Adjacency lists aligned with site order."""
        lists: list[list[int]] = [[] for _ in range(self.site_count)]
        for i, j in self.edges:
            lists[i].append(j)
            lists[j].append(i)
        return [np.array(sorted(l), dtype=np.int64) for l in lists]


def neighbors(lattice: Lattice, site: int) -> np.ndarray:
    """Indices of sites adjacent to ``site``."""
    e = lattice.edges
    out = np.concatenate([e[e[:, 0] == site, 1], e[e[:, 1] == site, 0]])
    return np.sort(out)


def _cell_presence(order: int, rule: IterationRule) -> np.ndarray:
    """Boolean (W_c, W_c) presence grid on the m^order cell grid, indexed [y, x]."""
    base = rule.m
    side = base**order
    coords = np.arange(side)
    hole = np.array(list(rule.hole_digits), dtype=np.int64)
    removed = np.zeros((side, side), dtype=bool)
    v = coords.copy()
    for _ in range(order):
        bad = np.isin(v % base, hole)
        removed |= np.outer(bad, bad)
        v //= base
    return ~removed


def _assemble(
    presence: np.ndarray,
    order: int,
    unit: int,
    rule: IterationRule | None,
    periodic: bool,
    label: str,
) -> Lattice:
    width = presence.shape[0]
    idx = np.full((width, width), -1, dtype=np.int64)
    idx[presence] = np.arange(presence.sum())
    yx = np.argwhere(presence)                       # row-major: sorted by (y, x)
    sites = yx[:, ::-1].astype(np.int64).copy()      # columns (x, y)

    h_mask = presence[:, :-1] & presence[:, 1:]
    v_mask = presence[:-1, :] & presence[1:, :]
    ei = np.concatenate([idx[:, :-1][h_mask], idx[:-1, :][v_mask]])
    ej = np.concatenate([idx[:, 1:][h_mask], idx[1:, :][v_mask]])
    if periodic and width > 2:
        wrap_i = np.concatenate([idx[:, -1], idx[-1, :]])
        wrap_j = np.concatenate([idx[:, 0], idx[0, :]])
        keep = (wrap_i >= 0) & (wrap_j >= 0)
        lo = np.minimum(wrap_i[keep], wrap_j[keep])
        hi = np.maximum(wrap_i[keep], wrap_j[keep])
        ei = np.concatenate([ei, lo])
        ej = np.concatenate([ej, hi])
    edge_order = np.lexsort((ej, ei))
    edges = np.stack([ei[edge_order], ej[edge_order]], axis=1)

    x, y = sites[:, 0], sites[:, 1]
    outer = (x == 0) | (x == width - 1) | (y == 0) | (y == width - 1)

    # A site borders a hole if a unit-Manhattan neighbor inside the bounding
    # box is absent.  Pad with True so the outer frame does not count as a hole.
    padded = np.ones((width + 2, width + 2), dtype=bool)
    padded[1:-1, 1:-1] = presence
    gap_near = (
        ~padded[:-2, 1:-1]
        | ~padded[2:, 1:-1]
        | ~padded[1:-1, :-2]
        | ~padded[1:-1, 2:]
    ) & presence
    hole_flags = gap_near[sites[:, 1], sites[:, 0]]

    return Lattice(
        order=order,
        unit=unit,
        rule=rule,
        width=width,
        periodic=periodic,
        sites=sites,
        edges=edges,
        outer_boundary=outer,
        hole_boundary=hole_flags,
        label=label,
        _index=idx,
    )


def build_generalized(
    order: int, unit: int = 1, m: int = 3, m_f: int = 1
) -> Lattice:
    """Lattice after ``order`` substitution steps on an ``unit``-wide seed cell."""
    if order < 1:
        raise ValidationError(f"order must be >= 1, got {order}")
    if unit < 1:
        raise ValidationError(f"unit cell width must be >= 1, got {unit}")
    rule = IterationRule(m=m, m_f=m_f)
    cell = _cell_presence(order, rule)
    presence = np.kron(cell, np.ones((unit, unit), dtype=bool)) if unit > 1 else cell
    label = f"carpet-n{order}-s{unit}" if (m, m_f) == (3, 1) else (
        f"gen-m{m}-mf{m_f}-n{order}-s{unit}"
    )
    return _assemble(presence, order, unit, rule, periodic=False, label=label)


def build_carpet(order: int, unit: int = 1) -> Lattice:
    """Classic 3x3-minus-center lattice of the given iteration order."""
    return build_generalized(order, unit=unit, m=3, m_f=1)


def build_square(side: int, periodic: bool = False) -> Lattice:
    """Plain square patch, optionally with wrap-around edges."""
    if side < 2:
        raise ValidationError(f"square side must be >= 2, got {side}")
    presence = np.ones((side, side), dtype=bool)
    label = f"square-L{side}" + ("-periodic" if periodic else "")
    return _assemble(presence, 1, side, None, periodic=periodic, label=label)


def expected_site_count(order: int, unit: int, rule: IterationRule) -> int:
    return unit * unit * rule.cells_kept**order
