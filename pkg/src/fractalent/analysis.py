"""Scaling fits, contour depth profiles, entropy reconstruction, baselines."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .entanglement import (
    Contour,
    Partition,
    entanglement_contour,
    partition_half_cut,
)
from .errors import ValidationError
from .lattice import build_square
from .models import build_h1, build_h2
from .spectral import diagonalize, occupy

ALPHA_GRID = (0.30, 1.50, 0.01)


# ---------------------------------------------------------------------------
# Entropy scaling fits
# ---------------------------------------------------------------------------


@dataclass
class ScalingSeries:
    """Entropy values S(L) over a family of growing cuts."""

    orders: list[int]
    lengths: np.ndarray
    entropies: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        self.lengths = np.asarray(self.lengths, dtype=float)
        self.entropies = np.asarray(self.entropies, dtype=float)
        if len(self.lengths) != len(self.entropies):
            raise ValidationError("series lengths and entropies must align")
        if len(self.lengths) < 3:
            raise ValidationError("need at least 3 points to fit a scaling law")
        if (self.lengths <= 0).any():
            raise ValidationError("cut lengths must be positive")


@dataclass
class FitResult:
    """Exponent scan for S = (a L^alpha + b) * optional log factor.

    ``alphas``/``r2`` record the full scan; the best row maximizes R^2.  A
    pinned fit at alpha = 1 is always included for reference.
    """

    kind: str
    alphas: np.ndarray
    r2: np.ndarray
    best_alpha: float
    best_r2: float
    best_slope: float
    best_intercept: float
    pinned_r2: float
    pinned_slope: float
    pinned_intercept: float


def _ols_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    design = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    pred = design @ coef
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def _alpha_scan(lengths: np.ndarray, target: np.ndarray, kind: str) -> FitResult:
    lo, hi, step = ALPHA_GRID
    alphas = np.round(np.arange(lo, hi + step / 2, step), 2)
    r2 = np.empty(len(alphas))
    slopes = np.empty(len(alphas))
    intercepts = np.empty(len(alphas))
    for i, a in enumerate(alphas):
        slopes[i], intercepts[i], r2[i] = _ols_line(lengths**a, target)
    best = int(np.argmax(r2))
    p_slope, p_inter, p_r2 = _ols_line(lengths**1.0, target)
    return FitResult(
        kind=kind,
        alphas=alphas,
        r2=r2,
        best_alpha=float(alphas[best]),
        best_r2=float(r2[best]),
        best_slope=float(slopes[best]),
        best_intercept=float(intercepts[best]),
        pinned_r2=p_r2,
        pinned_slope=p_slope,
        pinned_intercept=p_inter,
    )


def fit_superarea(series: ScalingSeries) -> FitResult:
    """Scan S / ln L = a L^alpha + b; suited to gapless cuts."""
    target = series.entropies / np.log(series.lengths)
    return _alpha_scan(series.lengths, target, kind="super")


def fit_powerlaw_ee(series: ScalingSeries) -> FitResult:
    """Scan S = a L^alpha + b; suited to gapped cuts."""
    return _alpha_scan(series.lengths, series.entropies, kind="power")


# ---------------------------------------------------------------------------
# Contour depth profiles
# ---------------------------------------------------------------------------


@dataclass
class ContourProfiles:
    """Layer-averaged contour shares, split by an on/off site mask.

    Layers are indexed by interface depth (1-based).  ``p_on`` is the on-mask
    site count per layer divided by the partition's cut length.  Layers with
    no sites in a class are omitted from that class's arrays.
    """

    depths_on: np.ndarray
    mean_on: np.ndarray
    count_on: np.ndarray
    p_on: np.ndarray
    depths_off: np.ndarray
    mean_off: np.ndarray
    count_off: np.ndarray
    cut_length: int


def contour_profiles(
    partition: Partition, site_values: np.ndarray, mask_on_sites: np.ndarray
) -> ContourProfiles:
    """Group A-site contour values into depth layers for each mask class."""
    values = np.asarray(site_values, dtype=float)
    if values.shape != partition.rows_a.shape:
        raise ValidationError("contour values must align with subsystem sites")
    on_a = np.asarray(mask_on_sites, dtype=bool)[partition.rows_a]
    depth = partition.depth

    def collect(select: np.ndarray):
        ds, ms, cs = [], [], []
        for d in np.unique(depth[select & (depth > 0)]):
            sel = select & (depth == d)
            ds.append(int(d))
            ms.append(float(values[sel].mean()))
            cs.append(int(sel.sum()))
        return (
            np.array(ds, dtype=np.int64),
            np.array(ms),
            np.array(cs, dtype=np.int64),
        )

    d_on, m_on, c_on = collect(on_a)
    d_off, m_off, c_off = collect(~on_a)
    return ContourProfiles(
        depths_on=d_on,
        mean_on=m_on,
        count_on=c_on,
        p_on=c_on / float(partition.cut_length),
        depths_off=d_off,
        mean_off=m_off,
        count_off=c_off,
        cut_length=partition.cut_length,
    )


@dataclass
class ProfileFit:
    beta: float
    intercept: float
    r2: float
    window: tuple[int, int]
    n_points: int


def triadic_window(depth_max: int) -> tuple[int, int]:
    """Default fit window on self-similar lattices: skip depth 1, keep a third.

    Beyond one third of the maximal depth the off-mask layer means on holed
    lattices are dominated by hole-corner rays and oscillate; the first layer
    carries the interface singularity.  Both are excluded by default.
    """
    return (2, max(2, math.ceil(depth_max / 3)))


def baseline_window(depth_max: int) -> tuple[int, int]:
    """Default fit window on uniform lattices: skip depth 1, drop last 10%."""
    return (2, max(2, int(math.floor(0.9 * depth_max))))


def fit_powerlaw_profile(
    depths: np.ndarray, values: np.ndarray, window: tuple[int, int]
) -> ProfileFit:
    """Least-squares power law value ~ depth^(-beta) inside the window."""
    depths = np.asarray(depths, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    keep = (depths >= lo) & (depths <= hi) & (values > 0)
    if keep.sum() < 5:
        raise ValidationError(
            f"profile window [{lo}, {hi}] leaves {int(keep.sum())} points; need >= 5"
        )
    slope, intercept, r2 = _ols_line(np.log(depths[keep]), np.log(values[keep]))
    return ProfileFit(
        beta=-slope,
        intercept=intercept,
        r2=r2,
        window=(int(lo), int(hi)),
        n_points=int(keep.sum()),
    )


# ---------------------------------------------------------------------------
# Entropy reconstruction from the on-mask profile
# ---------------------------------------------------------------------------


@dataclass
class Reconstruction:
    """Entropy rebuilt from on-mask layer means: L * sum(p * s_on).

    ``lower``/``upper`` bracket the estimate using the smallest layer
    fraction: min(p) * L * sum(s_on) <= estimate <= L * sum(s_on) holds
    exactly whenever every on-mask layer is populated.
    """

    estimate: float
    reference: float
    ratio: float
    lower: float
    upper: float
    min_p: float


def reconstruct_ee(profiles: ContourProfiles, reference_entropy: float) -> Reconstruction:
    if len(profiles.mean_on) == 0:
        raise ValidationError("no on-mask layers to reconstruct from")
    length = float(profiles.cut_length)
    estimate = float((profiles.count_on * profiles.mean_on).sum())
    min_p = float(profiles.p_on.min())
    total_on = float(profiles.mean_on.sum())
    return Reconstruction(
        estimate=estimate,
        reference=float(reference_entropy),
        ratio=estimate / float(reference_entropy),
        lower=min_p * length * total_on,
        upper=length * total_on,
        min_p=min_p,
    )


# ---------------------------------------------------------------------------
# Coefficient integral and uniform-lattice baselines
# ---------------------------------------------------------------------------


def widom_U(mode_entropy, tol: float = 1e-10) -> float:
    """Integral of f(t) / (t (1 - t)) over (0, 1) for an endpoint-vanishing f.

    With f the per-mode binary entropy this evaluates to pi^2 / 3, the
    constant entering the entropy coefficient of uniform gapless lattices.
    """
    value, _err = scipy.integrate.quad(
        lambda t: mode_entropy(t) / (t * (1.0 - t)),
        0.0,
        1.0,
        epsabs=tol,
        epsrel=tol,
        limit=400,
    )
    return float(value)


@dataclass
class BaselineResult:
    """Half-cut entropy scaling and per-column contour fits on plain squares."""

    series: ScalingSeries
    fit: FitResult
    column_betas: np.ndarray | None = None
    profile_window: tuple[int, int] | None = None
    contour: Contour | None = None
    partition: Partition | None = None


def square_lattice_baseline(
    model: str = "h1",
    lengths: tuple[int, ...] = (12, 24, 36, 48),
    t: float = 1.0,
    mu: float = 0.0,
    t1: float = 0.5,
    periodic: bool = False,
    column_profiles: bool = True,
    allow_large: bool = False,
) -> BaselineResult:
    """Reference study on uniform squares: entropy scaling plus column decay.

    For each side length the square is half cut; the entropy series is fitted
    with the scan matching the model (log-corrected for the gapless one-band
    model, plain power law for the gapped two-band model).  For the largest
    square the per-column contour decay exponents are fitted inside the
    uniform-lattice window.
    """
    if model not in ("h1", "h2"):
        raise ValidationError(f"unknown model {model!r}")
    entropies = []
    last = None
    for side in sorted(lengths):
        lat = build_square(side, periodic=periodic)
        if model == "h1":
            h = build_h1(lat, t=t, mu=mu)
            orb = 1
            particles = lat.site_count // 2
        else:
            h = build_h2(lat, t=t, t1=t1)
            orb = 2
            particles = lat.site_count
        eig = diagonalize(h, allow_large=allow_large)
        occ = occupy(eig.energies, particles)
        part = partition_half_cut(lat)
        contour = entanglement_contour(eig, occ, part, orbitals_per_site=orb)
        entropies.append(contour.total)
        last = (lat, part, contour)
    series = ScalingSeries(
        orders=list(sorted(lengths)),
        lengths=np.array(sorted(lengths), dtype=float),
        entropies=np.array(entropies),
        label=f"square-{model}-halfcut",
    )
    fit = fit_superarea(series) if model == "h1" else fit_powerlaw_ee(series)

    betas = None
    window = None
    contour_out = None
    part_out = None
    if column_profiles and last is not None:
        lat, part, contour = last
        contour_out = contour
        part_out = part
        depth_max = int(part.depth.max())
        window = baseline_window(depth_max)
        xs = lat.sites[part.rows_a, 0]
        beta_list = []
        for col in np.unique(xs):
            sel = xs == col
            fitp = fit_powerlaw_profile(
                part.depth[sel], contour.site_values[sel], window
            )
            beta_list.append(fitp.beta)
        betas = np.array(beta_list)
    return BaselineResult(
        series=series,
        fit=fit,
        column_betas=betas,
        profile_window=window,
        contour=contour_out,
        partition=part_out,
    )
