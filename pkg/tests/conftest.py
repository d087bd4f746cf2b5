"""Shared fixtures: expensive eigensystems are solved once per session."""
from __future__ import annotations

import numpy as np
import pytest

import fractalent as fe


@pytest.fixture(scope="session")
def h1_ground():
    """(lattice, eigensystem, half-filling occupations) for the one-band model."""
    cache: dict[int, tuple] = {}

    def get(order: int):
        if order not in cache:
            lat = fe.build_carpet(order)
            eig = fe.diagonalize(fe.build_h1(lat))
            occ = fe.occupy(eig.energies, lat.site_count // 2)
            cache[order] = (lat, eig, occ)
        return cache[order]

    return get


@pytest.fixture(scope="session")
def h2_ground():
    """(lattice, eigensystem, half-filling occupations) for the two-band model."""
    cache: dict[int, tuple] = {}

    def get(order: int):
        if order not in cache:
            lat = fe.build_carpet(order)
            eig = fe.diagonalize(fe.build_h2(lat))
            occ = fe.occupy(eig.energies, lat.site_count)
            cache[order] = (lat, eig, occ)
        return cache[order]

    return get


@pytest.fixture(scope="session")
def h1_iv_contour(h1_ground):
    """Half-filled one-band contour on the order-4 center half cut."""
    cache: dict[str, tuple] = {}

    def get():
        if "v" not in cache:
            lat, eig, occ = h1_ground(4)
            part = fe.partition_IV(lat)
            contour = fe.entanglement_contour(eig, occ, part)
            cache["v"] = (lat, part, contour)
        return cache["v"]

    return get


def _report(criterion: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"[acceptance] {criterion}: {status} — {detail}")


@pytest.fixture
def report():
    return _report
