"""Single-particle tight-binding Hamiltonians on lattice patches.

Two models are provided:

* ``build_h1`` — one orbital per site, nearest-neighbor hopping ``-t`` and a
  uniform on-site potential ``-mu``.  Half filled on a bipartite patch, it has
  a particle-hole-symmetric spectrum and no single-particle gap at large size.
* ``build_h2`` — two orbitals per site.  Orbitals are interleaved: matrix row
  ``2*i`` is the first orbital of site ``i``, row ``2*i + 1`` the second.  An
  on-site coupling ``t1`` mixes the orbitals; hopping is ``+t`` in the first
  orbital channel and ``-t`` in the second.  The spectrum is ``±sqrt(e^2 +
  t1^2)`` for each eigenvalue ``e`` of the hopping-only problem, so a gap of
  width ``2*t1`` is pinned around zero.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .lattice import Lattice


def build_h1(
    lattice: Lattice, t: float = 1.0, mu: float = 0.0, sparse: bool = False
):
    """One-band hopping matrix: H[i, j] = -t on edges, H[i, i] = -mu."""
    n = lattice.site_count
    e = lattice.edges
    if sparse:
        rows = np.concatenate([e[:, 0], e[:, 1], np.arange(n)])
        cols = np.concatenate([e[:, 1], e[:, 0], np.arange(n)])
        vals = np.concatenate(
            [np.full(2 * len(e), -t), np.full(n, -mu)]
        )
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    h = np.zeros((n, n))
    h[e[:, 0], e[:, 1]] = -t
    h[e[:, 1], e[:, 0]] = -t
    np.fill_diagonal(h, -mu)
    return h


def build_h2(
    lattice: Lattice, t: float = 1.0, t1: float = 0.5, sparse: bool = False
):
    """Two-band matrix with orbital-interleaved indexing (row = 2*site + orbital)."""
    n = lattice.site_count
    e = lattice.edges
    i0, j0 = 2 * e[:, 0], 2 * e[:, 1]
    sites2 = 2 * np.arange(n)
    rows = np.concatenate([i0, j0, i0 + 1, j0 + 1, sites2, sites2 + 1])
    cols = np.concatenate([j0, i0, j0 + 1, i0 + 1, sites2 + 1, sites2])
    vals = np.concatenate(
        [
            np.full(2 * len(e), t),
            np.full(2 * len(e), -t),
            np.full(2 * n, t1),
        ]
    )
    if sparse:
        return sp.csr_matrix((vals, (rows, cols)), shape=(2 * n, 2 * n))
    h = np.zeros((2 * n, 2 * n))
    h[rows, cols] = vals
    return h


def dispersion_h1(kx, ky, t: float = 1.0, mu: float = 0.0):
    """Translation-invariant band energy of the one-band model."""
    return -2.0 * t * (np.cos(kx) + np.cos(ky)) - mu


def dispersion_h2(kx, ky, t: float = 1.0, t1: float = 0.5):
    """Positive band energy of the two-band model (the spectrum is +/- this)."""
    e = 2.0 * t * (np.cos(kx) + np.cos(ky))
    return np.sqrt(e * e + t1 * t1)


def orbital_rows(site_indices: np.ndarray, orbitals_per_site: int) -> np.ndarray:
    """Matrix rows covering all orbitals of the given sites, ascending per site."""
    site_indices = np.asarray(site_indices, dtype=np.int64)
    if orbitals_per_site == 1:
        return site_indices
    base = orbitals_per_site * site_indices[:, None]
    return (base + np.arange(orbitals_per_site)[None, :]).ravel()
