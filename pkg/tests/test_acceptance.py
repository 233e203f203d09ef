"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines inline.
The real-measurement criterion (A9) is optional and skips with a notice
unless KMIG_FRESNEL_DATA_DIR points at the measurement files.
"""

import json
import math
import os
import time
import warnings
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import numpy.testing as npt
import pytest

from kmig import specfun, theory
from kmig.cli import main as cli_main
from kmig.forward import PointTarget, Scene, SmallObject, born_scattered, simulate_matrix
from kmig.fresnel_io import (calibrate, read_fresnel_file, scattered_from_records,
                             synthesize_records, write_exp_file)
from kmig.geometry import ArrayConfig, MediumParams, wavenumber
from kmig.gridio import GridRegion, compare_grids
from kmig.imaging import km_map, local_maxima
from kmig.msr import assemble, build_mask, index_set

from oracles import aperture_integral, bessel_j_series

CFG = ArrayConfig()
MED = MediumParams()
STRENGTH = math.pi * 0.015 ** 2 * 2.0


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - start
    print(f"[PASS] {name} ({elapsed:.1f}s / budget {budget_s:.0f}s)")
    assert elapsed < budget_s


def point_matrix(centers, f_hz):
    scene = Scene(point_targets=[PointTarget(c, STRENGTH) for c in centers])
    return simulate_matrix(scene, CFG, MED, f_hz)


def test_a1_mask_structure():
    with criterion("A1 mask structure", 1.0):
        mask = build_mask(CFG)
        assert mask.shape == (72, 36)
        npt.assert_array_equal(mask.sum(axis=0), np.full(36, 49))
        assert mask.sum() == 1764
        for m in range(35):
            npt.assert_array_equal(np.roll(mask[:, m], 2), mask[:, m + 1])


def test_a2_special_functions():
    with criterion("A2 special functions", 5.0):
        rng = np.random.default_rng(2024)
        for _ in range(60):
            p = int(rng.integers(0, 81))
            x = float(rng.uniform(0.0, 50.0))
            want = bessel_j_series(p, x)
            got = specfun.bessel_j(p, x)
            if abs(want) > 1e-13:
                assert abs(got - want) / abs(want) <= 1e-10
            else:
                assert abs(got - want) <= 1e-12
        xs = np.linspace(0.0, 50.0, 500)
        rows = specfun.bessel_j_rows(128, xs)
        sums = rows[:, 0] ** 2 + 2.0 * np.sum(rows[:, 1:] ** 2, axis=1)
        npt.assert_allclose(sums, 1.0, atol=1e-9)


def test_a3_jacobi_anger():
    with criterion("A3 Jacobi-Anger window series", 5.0):
        window = (math.radians(60.0), math.radians(300.0))
        for x in (0.5, 2.0, 5.0, 10.0, 20.0):
            trunc = theory.SeriesTruncation.for_scale(1.0, x)
            for phi in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False):
                got = theory.jacobi_anger_partial(x, phi, *window, trunc)
                want = aperture_integral(x, phi, *window)
                assert abs(got - want) <= 1e-8 * max(1.0, abs(want))


def test_a4_point_spread_structure():
    with criterion("A4 point-spread structure", 20.0):
        y0 = (0.02, -0.01)
        k4 = wavenumber(MED, 4e9)
        km = km_map(point_matrix([y0], 4e9), GridRegion(0.2), 0.002, "asymptotic")
        th = theory.theory_map([(y0, STRENGTH)], GridRegion(0.2), 0.002, k4)
        stats = compare_grids(km, th, centers=[y0], radius=0.06)
        assert stats["pearson"] >= 0.98
        assert stats["argmax_offset_cells"] <= 1.0


def test_a5_peak_at_target():
    with criterion("A5 localization of random targets", 60.0):
        rng = np.random.default_rng(42)
        for _ in range(10):
            ang = rng.uniform(0.0, 2.0 * math.pi)
            rad = rng.uniform(0.0, 0.1)
            y0 = (rad * math.cos(ang), rad * math.sin(ang))
            grid = km_map(point_matrix([y0], 4e9), GridRegion(0.2), 0.002)
            ax, ay = grid.argmax_point()
            assert math.hypot(ax - y0[0], ay - y0[1]) <= 0.002


def test_a6_two_target_resolution():
    with criterion("A6 two-target resolution", 30.0):
        targets = [(-0.045, 0.0), (0.045, 0.0)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            low = km_map(point_matrix(targets, 1e9), GridRegion(0.2), 0.002)
        assert len(local_maxima(low, 0.5, 0.02)) == 1
        high = km_map(point_matrix(targets, 4e9), GridRegion(0.2), 0.002)
        peaks = local_maxima(high, 0.5, 0.02)
        assert len(peaks) == 2
        for px, py in peaks:
            assert min(math.hypot(px - tx, py - ty) for tx, ty in targets) <= 0.005


def test_a7_symmetries():
    with criterion("A7 symmetry properties", 20.0):
        # rotation of the scene by one emitter step rotates the argmax
        step = math.radians(10.0)
        disk = SmallObject(center=(0.06, 0.0), radius=0.015)
        rotated = SmallObject(center=(0.06 * math.cos(step), 0.06 * math.sin(step)),
                              radius=0.015)
        g0 = km_map(simulate_matrix(Scene(objects=[disk]), CFG, MED, 4e9),
                    GridRegion(0.1), 0.002)
        g1 = km_map(simulate_matrix(Scene(objects=[rotated]), CFG, MED, 4e9),
                    GridRegion(0.1), 0.002)
        a0, a1 = g0.argmax_point(), g1.argmax_point()
        want = (a0[0] * math.cos(step) - a0[1] * math.sin(step),
                a0[0] * math.sin(step) + a0[1] * math.cos(step))
        assert math.hypot(a1[0] - want[0], a1[1] - want[1]) <= math.sqrt(2) * 0.002

        # global complex scaling leaves the argmax bit-identical
        matrix = point_matrix([(0.02, -0.01)], 4e9)
        scaled = matrix.scaled(0.37 - 1.41j)
        assert km_map(matrix, GridRegion(0.1), 0.002).argmax_point() == \
            km_map(scaled, GridRegion(0.1), 0.002).argmax_point()

        # superposition of single-object fields equals the two-object field
        a = SmallObject(center=(0.045, 0.0), radius=0.015)
        b = SmallObject(center=(-0.045, 0.0), radius=0.015)
        k4 = wavenumber(MED, 4e9)
        for m, n in ((1, 20), (9, 40), (30, 60)):
            e, r = CFG.emitter_position(m), CFG.receiver_position(n)
            both = born_scattered(Scene(objects=[a, b]), k4, e, r)
            parts = born_scattered(Scene(objects=[a]), k4, e, r) + \
                born_scattered(Scene(objects=[b]), k4, e, r)
            assert abs(both - parts) <= 1e-12 * max(1.0, abs(both))


def test_a8_ingestion_round_trip(tmp_path):
    with criterion("A8 ingestion round trip", 10.0):
        matrix = point_matrix([(0.02, -0.01)], 4e9)
        fields = {(m, n): complex(matrix.entries[n - 1, m - 1])
                  for m in range(1, 37) for n in index_set(m, CFG)}
        records = synthesize_records(fields, CFG, MED, 4e9, gain=1.0)

        path = tmp_path / "roundtrip.exp"
        write_exp_file(records, path)
        reparsed = read_fresnel_file(path, CFG)
        assert reparsed == records

        cal = calibrate(reparsed, CFG, MED)
        assert abs(cal.factor - 1.0) <= 1e-9

        def imaged(recs):
            cal_r = calibrate(recs, CFG, MED)
            scat = scattered_from_records(recs)[4e9]
            scaled = {k: cal_r.factor * v for k, v in scat.items()}
            return km_map(assemble(scaled, CFG, 4e9), GridRegion(0.1), 0.002)

        direct = imaged(records)
        via_file = imaged(reparsed)
        npt.assert_array_equal(direct.values, via_file.values)


def test_a9_real_dataset_optional(tmp_path):
    data_dir = os.environ.get("KMIG_FRESNEL_DATA_DIR", "")
    single = Path(data_dir) / "dielTM_dec8f.exp" if data_dir else None
    double = Path(data_dir) / "twodielTM_dec8f.exp" if data_dir else None
    if not (single and single.exists() and double and double.exists()):
        print("[SKIP] A9 real measurement files not supplied "
              "(set KMIG_FRESNEL_DATA_DIR to run)")
        pytest.skip("real measurement files not supplied")
    with criterion("A9 real dataset smoke", 600.0):
        for path, expected_peaks in ((single, None), (double, 2)):
            records = read_fresnel_file(path, CFG)
            band = sorted({r.frequency_hz for r in records
                           if 1e9 - 1e6 <= r.frequency_hz <= 8e9 + 1e6})
            assert band, f"{path} holds no 1-8 GHz data"
            out = tmp_path / path.stem
            ghz = ",".join(f"{f / 1e9:g}" for f in band)
            assert cli_main(["image", "--input", str(path), "--freq-ghz", ghz,
                             "--no-figures", "--out-dir", str(out)]) == 0
            for f_hz in band:
                doc = json.loads((out / f"map_f{f_hz / 1e9:g}GHz.json").read_text())
                assert doc["calibration_residual"] < 0.5
                if expected_peaks and f_hz >= 4e9 - 1e6:
                    assert len(doc["argmax_points_m"]) == expected_peaks
