"""End-to-end acceptance checks.

Each test covers one numbered criterion, prints a single
``[acceptance] <criterion>: PASS|FAIL — <detail>`` line (visible with
``pytest -s``), and enforces the stated tolerances and time budgets.
Opt-in large runs are gated behind the ``FRACTALENT_LARGE`` environment
variable because the largest lattice generation needs more memory than a
small container provides.
"""
import hashlib
import json
import os
import time

import numpy as np
import pytest

import fractalent as fe
from fractalent.cli import main as cli_main

LARGE = os.environ.get("FRACTALENT_LARGE") == "1"

# (model, partition, order) -> (Partition, Contour) at default half filling
_CONTOURS: dict = {}


def _ground(h1_ground, h2_ground, model: str, order: int):
    if order == 1:
        lat = fe.build_carpet(1)
        if model == "h1":
            eig = fe.diagonalize(fe.build_h1(lat))
            occ = fe.occupy(eig.energies, lat.site_count // 2)
        else:
            eig = fe.diagonalize(fe.build_h2(lat))
            occ = fe.occupy(eig.energies, lat.site_count)
        return lat, eig, occ
    return (h1_ground if model == "h1" else h2_ground)(order)


def _contour(h1_ground, h2_ground, model: str, kind: str, order: int):
    key = (model, kind, order)
    if key not in _CONTOURS:
        lat, eig, occ = _ground(h1_ground, h2_ground, model, order)
        part = fe.entanglement.BUILTIN_PARTITIONS[kind](lat)
        orb = 1 if model == "h1" else 2
        _CONTOURS[key] = (part, fe.entanglement_contour(eig, occ, part, orbitals_per_site=orb))
    return _CONTOURS[key]


def _series(h1_ground, h2_ground, model: str, kind: str, orders) -> fe.ScalingSeries:
    lengths, entropies = [], []
    for n in orders:
        part, contour = _contour(h1_ground, h2_ground, model, kind, n)
        lengths.append(float(part.cut_length))
        entropies.append(contour.total)
    return fe.ScalingSeries(
        orders=list(orders),
        lengths=np.array(lengths),
        entropies=np.array(entropies),
        label=f"{model}-{kind}",
    )


def test_criterion_01_identity_suite(h1_ground, h2_ground, report):
    t0 = time.perf_counter()
    combos = [(kind, n) for kind in ("I", "II", "III") for n in (2, 3)]
    combos += [("IV", n) for n in (1, 2, 3)]
    worst_sum = worst_sym = worst_trace = 0.0
    spec_lo, spec_hi = 0.0, 1.0
    count = 0
    for model in ("h1", "h2"):
        for kind, order in combos:
            lat, eig, occ = _ground(h1_ground, h2_ground, model, order)
            part, contour = _contour(h1_ground, h2_ground, model, kind, order)
            orb = 1 if model == "h1" else 2
            rows_a = fe.orbital_rows(part.rows_a, orb)
            rows_b = fe.orbital_rows(part.rows_b, orb)
            c_a = fe.correlation_matrix(eig, occ, rows_a)
            c_b = fe.correlation_matrix(eig, occ, rows_b)

            worst_sum = max(
                worst_sum, abs(contour.site_values.sum() - contour.total)
            )
            xi = contour.spectrum.xi
            spec_lo = min(spec_lo, float(xi.min()))
            spec_hi = max(spec_hi, float(xi.max()))
            worst_trace = max(
                worst_trace, abs(np.trace(c_a) + np.trace(c_b) - occ.sum())
            )

            # purity requires whole multiplets, so step to the nearest filling
            # that closes the one at the chemical potential
            target = lat.site_count // 2 if model == "h1" else lat.site_count
            pure = fe.nearest_pure_filling(eig.energies, target)
            pocc = fe.occupy(eig.energies, pure)
            s_a = fe.entanglement_entropy(fe.correlation_matrix(eig, pocc, rows_a))
            s_b = fe.entanglement_entropy(fe.correlation_matrix(eig, pocc, rows_b))
            worst_sym = max(worst_sym, abs(s_a - s_b))
            count += 1
    elapsed = time.perf_counter() - t0
    ok = (
        worst_sum < 1e-8
        and worst_sym < 1e-6
        and spec_lo > -1e-10
        and spec_hi < 1 + 1e-10
        and worst_trace < 1e-8
        and elapsed < 120
    )
    detail = (
        f"{count} combos: |sum(s)-S|<={worst_sum:.2e}, |S_A-S_B|<={worst_sym:.2e}, "
        f"spectrum in [{spec_lo:.2e}, 1+{spec_hi - 1:.2e}], "
        f"|TrA+TrB-N|<={worst_trace:.2e}, {elapsed:.1f}s"
    )
    report("criterion 1 (identity suite)", ok, detail)
    assert ok, detail


def test_criterion_02_h1_corner_and_low_cuts(h1_ground, h2_ground, report):
    t0 = time.perf_counter()
    results = {}
    for kind in ("I", "II"):
        series = _series(h1_ground, h2_ground, "h1", kind, (2, 3, 4))
        results[kind] = fe.fit_superarea(series)
    elapsed = time.perf_counter() - t0
    ok = elapsed < 600
    for kind, fit in results.items():
        ok &= 0.85 <= fit.best_alpha <= 1.15
        ok &= fit.pinned_r2 > 0.99
    detail = (
        f"I: alpha={results['I'].best_alpha:.2f} R2(1)={results['I'].pinned_r2:.6f}; "
        f"II: alpha={results['II'].best_alpha:.2f} R2(1)={results['II'].pinned_r2:.6f}; "
        f"{elapsed:.1f}s"
    )
    report("criterion 2 (corner/low cuts scale like area x log)", ok, detail)
    assert ok, detail


@pytest.mark.skipif(not LARGE, reason="set FRACTALENT_LARGE=1 to run order-5 solves")
def test_criterion_02_opt_in_order5(h1_ground, h2_ground, report):
    lat = fe.build_carpet(5)
    eig = fe.diagonalize(fe.build_h1(lat), allow_large=True)
    occ = fe.occupy(eig.energies, lat.site_count // 2)
    slopes = {}
    for kind, expect in (("I", 0.1195), ("II", 0.0837)):
        lengths, entropies = [], []
        for n in (2, 3, 4):
            part, contour = _contour(h1_ground, h2_ground, "h1", kind, n)
            lengths.append(float(part.cut_length))
            entropies.append(contour.total)
        part5 = fe.entanglement.BUILTIN_PARTITIONS[kind](lat)
        c5 = fe.entanglement_contour(eig, occ, part5)
        lengths.append(float(part5.cut_length))
        entropies.append(c5.total)
        series = fe.ScalingSeries(
            orders=[2, 3, 4, 5], lengths=np.array(lengths), entropies=np.array(entropies)
        )
        fit = fe.fit_superarea(series)
        slopes[kind] = (fit.pinned_slope, expect)
    ok = all(abs(got - expect) <= 0.005 for got, expect in slopes.values())
    detail = ", ".join(
        f"{k}: slope={got:.4f} (want {expect}±0.005)" for k, (got, expect) in slopes.items()
    )
    report("criterion 2 opt-in (order-5 slopes)", ok, detail)
    assert ok, detail


def test_criterion_03_h1_straight_and_half_cuts(h1_ground, h2_ground, report):
    t0 = time.perf_counter()
    series_iii = _series(h1_ground, h2_ground, "h1", "III", (2, 3, 4))
    series_iv = _series(h1_ground, h2_ground, "h1", "IV", (1, 2, 3, 4))
    frozen_iii = np.array([3.1663, 12.4423, 42.9547])
    frozen_iv = np.array([1.5932, 3.9040, 12.9398, 36.5796])
    fit_iii = fe.fit_superarea(series_iii)
    fit_iv = fe.fit_superarea(series_iv)
    elapsed = time.perf_counter() - t0
    ok = elapsed < 600
    ok &= bool(np.abs(series_iii.entropies - frozen_iii).max() < 1e-3)
    ok &= bool(np.abs(series_iv.entropies - frozen_iv).max() < 1e-3)
    ok &= 0.85 <= fit_iii.best_alpha <= 1.15
    ok &= 0.85 <= fit_iv.best_alpha <= 1.15
    detail = (
        f"III: alpha={fit_iii.best_alpha:.2f}; IV: alpha={fit_iv.best_alpha:.2f}; "
        f"entropies match frozen values; {elapsed:.1f}s"
    )
    report("criterion 3 (straight/half cuts scale like area x log)", ok, detail)
    assert ok, detail


def test_criterion_04_h2_gapped_scaling(h1_ground, h2_ground, report):
    t0 = time.perf_counter()
    fit_i = fe.fit_powerlaw_ee(_series(h1_ground, h2_ground, "h2", "I", (2, 3, 4)))
    fit_ii = fe.fit_powerlaw_ee(_series(h1_ground, h2_ground, "h2", "II", (2, 3, 4)))
    elapsed = time.perf_counter() - t0
    ok = elapsed < 1200
    ok &= 0.9 <= fit_i.best_alpha <= 1.1
    ok &= 0.53 <= fit_ii.best_alpha <= 0.73
    detail = (
        f"I: alpha={fit_i.best_alpha:.2f} (area law); "
        f"II: alpha={fit_ii.best_alpha:.2f} (fractal interface); {elapsed:.1f}s"
    )
    report("criterion 4 (two-band cuts scale with boundary dimension)", ok, detail)
    assert ok, detail


def test_criterion_05_gaps_and_square_dos(h1_ground, h2_ground, report):
    t0 = time.perf_counter()
    h1_gaps = []
    h2_gaps = []
    for n in (1, 2, 3, 4):
        _lat, eig1, _ = _ground(h1_ground, h2_ground, "h1", n)
        _lat, eig2, _ = _ground(h1_ground, h2_ground, "h2", n)
        h1_gaps.append(fe.max_gap(eig1.energies))
        h2_gaps.append(fe.max_gap(eig2.energies))
    h1_gaps = np.array(h1_gaps)
    h2_gaps = np.array(h2_gaps)
    slope = float(np.polyfit([1, 2, 3, 4], np.log(h1_gaps), 1)[0])
    h2_spread = float((h2_gaps.max() - h2_gaps.min()) / h2_gaps.mean())

    square = fe.build_square(32, periodic=True)
    e2 = fe.diagonalize(fe.build_h2(square)).energies
    in_window = int(((e2 > -0.45) & (e2 < 0.45)).sum())
    elapsed = time.perf_counter() - t0

    ok = elapsed < 300
    ok &= bool(np.all(np.diff(h1_gaps) < 0))
    ok &= slope < -0.3
    ok &= h2_spread < 0.05
    ok &= in_window == 0
    detail = (
        f"one-band gaps {np.array2string(h1_gaps, precision=3)} shrink (slope {slope:.2f}); "
        f"two-band gap spread {h2_spread:.2%}; square DOS empty in (-0.45, 0.45); "
        f"{elapsed:.1f}s"
    )
    report("criterion 5 (gap iteration and square reference spectrum)", ok, detail)
    assert ok, detail


def test_criterion_06_h2_contour_concentration(h1_ground, h2_ground, report):
    t0 = time.perf_counter()
    stats = {}
    ok = True
    for kind in ("I", "II"):
        part, contour = _contour(h1_ground, h2_ground, "h2", kind, 4)
        depth = part.depth
        vals = contour.site_values
        first = float(vals[depth == 1].mean())
        tail = float(vals[depth >= 5].mean())
        ratio = first / tail

        depths = np.unique(depth)
        means = np.array([vals[depth == d].mean() for d in depths])
        floor = means.max() * 1e-6
        inversions = int(
            sum(
                1
                for a, b in zip(means[:-1], means[1:])
                if b > a and a > floor and b > floor
            )
        )
        stats[kind] = (ratio, inversions)
        ok &= ratio >= 20
        ok &= inversions <= 1
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    detail = "; ".join(
        f"{k}: layer-1/deep ratio {r:.0f}, {inv} inversions" for k, (r, inv) in stats.items()
    ) + f"; {elapsed:.1f}s"
    report("criterion 6 (two-band contour hugs the interface)", ok, detail)
    assert ok, detail


def test_criterion_07_overlay_overlap(h1_iv_contour, report):
    t0 = time.perf_counter()
    lat, part, contour = h1_iv_contour()
    mask = fe.ef_compose(lat)
    res = fe.ef_overlap(
        contour.site_values, mask.on[part.rows_a], n_permutations=100, seed=0
    )
    elapsed = time.perf_counter() - t0
    ok = res.z >= 5
    detail = (
        f"top-{res.k} hit rate {res.score:.3f} vs null {res.null_mean:.3f}"
        f"±{res.null_std:.3f} (z={res.z:.1f}); {elapsed:.1f}s"
    )
    report("criterion 7 (contour concentrates on billiard loops)", ok, detail)
    assert ok, detail


def test_criterion_08_profile_exponents(h1_iv_contour, report):
    t0 = time.perf_counter()
    lat, part, contour = h1_iv_contour()
    mask = fe.ef_compose(lat)
    profiles = fe.contour_profiles(part, contour.site_values, mask.on)
    window = fe.triadic_window(int(part.depth.max()))
    fit_on = fe.fit_powerlaw_profile(profiles.depths_on, profiles.mean_on, window)
    fit_off = fe.fit_powerlaw_profile(profiles.depths_off, profiles.mean_off, window)
    elapsed = time.perf_counter() - t0
    ok = fit_off.beta - fit_on.beta >= 1.0
    ok &= 0.8 <= fit_on.beta <= 2.2
    detail = (
        f"window {window}: beta_on={fit_on.beta:.3f}, beta_off={fit_off.beta:.3f}, "
        f"separation {fit_off.beta - fit_on.beta:.2f}; {elapsed:.1f}s"
    )
    report("criterion 8 (on-loop decay is slow, off-loop fast)", ok, detail)
    assert ok, detail


@pytest.mark.skipif(not LARGE, reason="set FRACTALENT_LARGE=1 to run order-5 solves")
def test_criterion_08_opt_in_order5(report):
    lat = fe.build_carpet(5)
    eig = fe.diagonalize(fe.build_h1(lat), allow_large=True)
    occ = fe.occupy(eig.energies, lat.site_count // 2)
    part = fe.partition_IV(lat)
    contour = fe.entanglement_contour(eig, occ, part)
    mask = fe.ef_compose(lat)
    profiles = fe.contour_profiles(part, contour.site_values, mask.on)
    window = fe.triadic_window(int(part.depth.max()))
    fit_on = fe.fit_powerlaw_profile(profiles.depths_on, profiles.mean_on, window)
    fit_off = fe.fit_powerlaw_profile(profiles.depths_off, profiles.mean_off, window)
    ok = 1.1 <= fit_on.beta <= 1.6 and 3.2 <= fit_off.beta <= 4.4
    detail = f"window {window}: beta_on={fit_on.beta:.3f}, beta_off={fit_off.beta:.3f}"
    report("criterion 8 opt-in (order-5 exponents)", ok, detail)
    assert ok, detail


def test_criterion_09_square_baselines(report):
    t0 = time.perf_counter()
    res1 = fe.square_lattice_baseline(model="h1", lengths=(12, 24, 36, 48))
    res2 = fe.square_lattice_baseline(
        model="h2", lengths=(12, 24, 36, 48), column_profiles=False
    )
    elapsed = time.perf_counter() - t0
    frozen1 = np.array([9.746, 21.982, 35.221, 49.121])
    frozen2 = np.array([7.845, 15.379, 22.907, 30.434])
    ok = elapsed < 600
    ok &= bool(np.abs(res1.series.entropies - frozen1).max() < 5e-3)
    ok &= bool(np.abs(res2.series.entropies - frozen2).max() < 5e-3)
    ok &= 0.85 <= res1.fit.best_alpha <= 1.15
    ok &= 0.9 <= res2.fit.best_alpha <= 1.1
    betas = res1.column_betas
    ok &= betas is not None and bool((betas >= 0.7).all() and (betas <= 1.3).all())
    detail = (
        f"one-band alpha={res1.fit.best_alpha:.2f}, two-band alpha={res2.fit.best_alpha:.2f}, "
        f"column betas in [{betas.min():.3f}, {betas.max():.3f}] "
        f"(window {res1.profile_window}); {elapsed:.1f}s"
    )
    report("criterion 9 (uniform squares recover textbook scaling)", ok, detail)
    assert ok, detail


def test_criterion_10_exact_identities(h1_ground, h2_ground, h1_iv_contour, report):
    value = fe.widom_U(lambda t: fe.binary_entropy(np.array([t]))[0])
    ok = abs(value - np.pi**2 / 3) < 1e-6

    eig = fe.diagonalize(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    occ = fe.occupy(eig.energies, 1)
    bond = fe.contour_for_correlation(fe.correlation_matrix(eig, occ, np.array([0])))
    ok &= abs(bond.total - np.log(2)) < 1e-12
    ok &= len(bond.site_values) == 1
    ok &= abs(bond.site_values[0] - np.log(2)) < 1e-12

    min_p = np.inf
    bracket = True
    for order in (2, 3, 4):
        if order == 4:
            lat, part, contour = h1_iv_contour()
        else:
            lat, eig_o, occ_o = _ground(h1_ground, h2_ground, "h1", order)
            part, contour = _contour(h1_ground, h2_ground, "h1", "IV", order)
        mask = fe.ef_compose(lat)
        profiles = fe.contour_profiles(part, contour.site_values, mask.on)
        covered = len(profiles.depths_on) == int(part.depth.max())
        min_p = min(min_p, float(profiles.p_on.min()) if covered else 0.0)
        recon = fe.reconstruct_ee(profiles, contour.total)
        bracket &= recon.lower <= recon.estimate + 1e-12
        bracket &= recon.estimate <= recon.upper + 1e-12
        bracket &= abs(
            recon.estimate - float((profiles.count_on * profiles.mean_on).sum())
        ) < 1e-12
    ok &= min_p > 0
    ok &= bracket
    detail = (
        f"coefficient integral dev {abs(value - np.pi**2 / 3):.1e}; bond contour ln2; "
        f"bracket holds; min layer fraction {min_p:.3f}"
    )
    report("criterion 10 (closed-form anchors)", ok, detail)
    assert ok, detail


def test_criterion_11_byte_identical_reruns(tmp_path, report):
    t0 = time.perf_counter()
    cfg = tmp_path / "study.ini"
    cfg.write_text(
        "[run]\nlabel = repeat\n"
        "[lattice]\nkind = carpet\norder = 2\n"
        "[model]\nkind = h1\nfilling = half\n"   # splits a degenerate multiplet
        "[partition]\nkind = IV\n"
        "[ef]\nenabled = true\npermutations = 50\n"
        "[profile]\nenabled = true\n"
        "[dos]\nenabled = true\nmethod = exact\nbins = 32\n"
    )
    digests = []
    for name in ("run1", "run2"):
        rc = cli_main(
            ["run", "--config", str(cfg), "--out", str(tmp_path / name), "--seed", "7"]
        )
        assert rc == 0
        per_file = {}
        for p in sorted((tmp_path / name).rglob("*")):
            if p.suffix in (".csv", ".txt", ".json") and p.is_file():
                per_file[p.name] = hashlib.sha256(p.read_bytes()).hexdigest()
        digests.append(per_file)
    elapsed = time.perf_counter() - t0
    same = digests[0] == digests[1]
    summary = json.loads((tmp_path / "run1" / "summary.json").read_text())
    degenerate = summary["model"]["fractional_occupation"] is True
    ok = same and degenerate and len(digests[0]) >= 8
    detail = (
        f"{len(digests[0])} text artifacts byte-identical across reruns "
        f"(degenerate multiplet split fractionally); {elapsed:.1f}s"
    )
    report("criterion 11 (determinism)", ok, detail)
    assert ok, detail
