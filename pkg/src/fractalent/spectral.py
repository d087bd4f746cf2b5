"""Dense diagonalization, ground-state occupations, and density of states."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import CapacityError, NumericalError, ValidationError

DENSE_LIMIT = 10_000
HARD_LIMIT = 40_000
DEGENERACY_TOL = 1e-10


@dataclass
class EigenSystem:
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    energies: np.ndarray
    states: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.energies)


def ensure_capacity(
    dim: int, allow_large: bool = False, dense_limit: int = DENSE_LIMIT
) -> None:
    """Refuse problem sizes beyond the dense-solver budget before any allocation."""
    limit = HARD_LIMIT if allow_large else dense_limit
    if dim > limit:
        raise CapacityError(
            f"matrix dimension {dim} exceeds the dense-solver limit {limit}"
            + ("" if allow_large else " (pass allow_large to raise it)")
        )


def diagonalize(
    h, allow_large: bool = False, dense_limit: int = DENSE_LIMIT
) -> EigenSystem:
    """Full symmetric eigendecomposition with a size guard.

    Matrices larger than ``dense_limit`` are refused unless ``allow_large`` is
    set; even then a hard cap protects the machine from hopeless requests.
    """
    if sp.issparse(h):
        h = h.toarray()
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    ensure_capacity(n, allow_large=allow_large, dense_limit=dense_limit)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {h.shape}")
    asym = float(np.abs(h - h.T).max()) if n else 0.0
    if asym > 1e-8:
        raise ValidationError(
            f"matrix is not symmetric (max |H - H^T| = {asym:.3g})"
        )
    try:
        energies, states = scipy.linalg.eigh(h)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"dense eigensolver failed: {exc}") from exc
    return EigenSystem(energies=energies, states=states)


def occupy(
    energies: np.ndarray, n_particles: int, degeneracy_tol: float = DEGENERACY_TOL
) -> np.ndarray:
    """Zero-temperature occupation numbers for a fixed particle count.

    Levels are filled in ascending order.  If the filling boundary lands
    inside a degenerate multiplet (levels within ``degeneracy_tol`` of the
    boundary energy), the remaining particles are spread uniformly over the
    whole multiplet, producing equal fractional occupations.  The result
    always sums to ``n_particles`` exactly.
    """
    energies = np.asarray(energies, dtype=float)
    dim = len(energies)
    if not 0 <= n_particles <= dim:
        raise ValidationError(
            f"particle count {n_particles} outside [0, {dim}]"
        )
    occ = np.zeros(dim)
    if n_particles == 0:
        return occ
    if n_particles == dim:
        return np.ones(dim)
    fermi = energies[n_particles - 1]
    multiplet = np.abs(energies - fermi) <= degeneracy_tol
    full = (energies < fermi) & ~multiplet
    occ[full] = 1.0
    remaining = n_particles - int(full.sum())
    occ[multiplet] = remaining / int(multiplet.sum())
    return occ


def nearest_pure_filling(
    energies: np.ndarray, target: int, degeneracy_tol: float = DEGENERACY_TOL
) -> int:
    """Particle count closest to ``target`` whose filling boundary is gapped.

    A count n is acceptable when the gap energies[n] - energies[n-1] exceeds
    ``degeneracy_tol``, so the ground state is unique and pure.
    """
    energies = np.asarray(energies, dtype=float)
    dim = len(energies)

    def ok(n: int) -> bool:
        if n <= 0 or n >= dim:
            return n in (0, dim)
        return energies[n] - energies[n - 1] > degeneracy_tol

    for delta in range(dim + 1):
        for n in (target - delta, target + delta):
            if 0 <= n <= dim and ok(n):
                return n
    raise NumericalError("no non-degenerate filling exists")  # pragma: no cover


def correlation_matrix(
    eig: EigenSystem, occupations: np.ndarray, rows: np.ndarray
) -> np.ndarray:
    """Ground-state two-point function restricted to the given matrix rows."""
    va = eig.states[np.asarray(rows, dtype=np.int64)]
    return (va * occupations) @ va.T


def dos_exact(
    energies: np.ndarray, bins: int = 64, window: tuple[float, float] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Histogram estimate of the level density, normalized to unit integral."""
    energies = np.asarray(energies, dtype=float)
    if bins < 2:
        raise ValidationError(f"need at least 2 bins, got {bins}")
    density, edges = np.histogram(energies, bins=bins, range=window, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, density


def _chebyshev_bounds(h) -> tuple[float, float]:
    """Crude spectral bounds from Gershgorin disks."""
    if sp.issparse(h):
        diag = h.diagonal()
        radius = np.abs(h).sum(axis=1).A.ravel() - np.abs(diag)
    else:
        h = np.asarray(h, dtype=float)
        diag = np.diag(h)
        radius = np.abs(h).sum(axis=1) - np.abs(diag)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    return lo, hi


def dos_kpm(
    h,
    n_moments: int = 512,
    n_vectors: int = 20,
    bins: int = 64,
    seed: int = 0,
    window: tuple[float, float] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Stochastic Chebyshev-expansion estimate of the level density.

    The matrix is rescaled into [-1, 1] using Gershgorin bounds, moments are
    averaged over random sign vectors, and the truncated series is smoothed
    with Jackson damping before being evaluated at the requested bin centers.
    """
    if n_moments < 32:
        raise ValidationError(f"need at least 32 moments, got {n_moments}")
    if n_vectors < 1:
        raise ValidationError(f"need at least 1 random vector, got {n_vectors}")
    if not sp.issparse(h):
        h = sp.csr_matrix(np.asarray(h, dtype=float))
    n = h.shape[0]

    lo, hi = _chebyshev_bounds(h)
    if not np.isfinite([lo, hi]).all() or hi <= lo:
        raise NumericalError(
            f"spectral-bound estimate invalid: [{lo}, {hi}]; cannot rescale"
        )
    margin = 0.01 * (hi - lo)
    a = (hi - lo) / 2 + margin
    b = (hi + lo) / 2
    h_scaled = (h - b * sp.identity(n, format="csr")) / a

    rng = np.random.default_rng(seed)
    moments = np.zeros(n_moments)
    for _ in range(n_vectors):
        r = rng.integers(0, 2, size=n).astype(float) * 2.0 - 1.0
        t_prev = r
        t_cur = h_scaled @ r
        moments[0] += r @ t_prev
        moments[1] += r @ t_cur
        for m in range(2, n_moments):
            t_next = 2.0 * (h_scaled @ t_cur) - t_prev
            moments[m] += r @ t_next
            t_prev, t_cur = t_cur, t_next
    moments /= n_vectors * n

    m_idx = np.arange(n_moments)
    phase = np.pi / (n_moments + 1)
    jackson = (
        (n_moments - m_idx + 1) * np.cos(phase * m_idx)
        + np.sin(phase * m_idx) / np.tan(phase)
    ) / (n_moments + 1)
    damped = moments * jackson

    if window is None:
        window = (b - a, b + a)
    edges = np.linspace(window[0], window[1], bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    x = np.clip((centers - b) / a, -1.0 + 1e-12, 1.0 - 1e-12)
    theta = np.arccos(x)
    series = damped[0] + 2.0 * np.cos(np.outer(theta, m_idx[1:])) @ damped[1:]
    density = series / (np.pi * np.sqrt(1.0 - x * x)) / a
    return centers, density


def max_gap(energies: np.ndarray, degeneracy_tol: float = 1e-9) -> float:
    """Largest spacing between consecutive levels, ignoring tiny splittings."""
    energies = np.sort(np.asarray(energies, dtype=float))
    diffs = np.diff(energies)
    diffs = diffs[diffs >= degeneracy_tol]
    return float(diffs.max()) if len(diffs) else 0.0


def gap_series(energies_by_order: dict[int, np.ndarray]) -> list[tuple[int, float]]:
    """(order, max spectral gap) rows, in ascending order."""
    return [(n, max_gap(energies_by_order[n])) for n in sorted(energies_by_order)]
