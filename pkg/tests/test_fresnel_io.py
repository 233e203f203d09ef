
import numpy as np
import pytest

from kmig.errors import (AmbiguousDataError, CalibrationError, GeometryMismatchError,
                         ParseError)
from kmig.forward import PointTarget, Scene, green, simulate_matrix
from kmig.fresnel_io import (FresnelRecord, calibrate, frequencies, parse_fresnel_file,
                             read_fresnel_file, read_records_csv, records_at,
                             scattered_from_records, synthesize_records,
                             write_exp_file, write_records_csv)
from kmig.geometry import ArrayConfig, MediumParams, wavenumber
from kmig.msr import index_set

CFG = ArrayConfig()
MED = MediumParams()


_RECORD_MEMO = {}


def sample_records(f_hz=4e9, gain=1.0, count=None):
    key = (f_hz, gain)
    if key not in _RECORD_MEMO:
        matrix = simulate_matrix(Scene(point_targets=[PointTarget((0.02, -0.01))]),
                                 CFG, MED, f_hz)
        fields = {}
        for m in range(1, 37):
            for n in sorted(index_set(m, CFG)):
                fields[(m, n)] = complex(matrix.entries[n - 1, m - 1])
        _RECORD_MEMO[key] = synthesize_records(fields, CFG, MED, f_hz, gain=gain)
    records = _RECORD_MEMO[key]
    return records[:count] if count else records


# --- parsing -------------------------------------------------------------------

def test_headers_only_gives_empty_list():
    text = "# Fresnel measurement\n# freq sweep\nSome header words here\n"
    assert parse_fresnel_file(text.encode(), CFG) == []


def test_round_trip_through_exp_layout(tmp_path):
    records = sample_records()
    path = tmp_path / "synthetic.exp"
    write_exp_file(records, path)
    back = read_fresnel_file(path, CFG)
    assert back == records


def test_wrong_arity_names_the_line():
    text = "# header\n1 13 4.0 0.1 0.2\n"
    with pytest.raises(ParseError, match="line 2"):
        parse_fresnel_file(text, CFG)


def test_non_numeric_token_in_data_row():
    with pytest.raises(ParseError, match="line 1"):
        parse_fresnel_file("1 13 4.0 0.1 oops 0.3 0.4\n", CFG)


def test_degree_columns_are_snapped():
    # emitter 90 deg -> m=10, receiver 185 deg -> n=38
    recs = parse_fresnel_file("90.0 185.0 4.0 1 0 1 0\n", CFG)
    assert recs[0].emitter == 10 and recs[0].receiver == 38
    assert recs[0].frequency_hz == 4e9


def test_degree_zero_wraps_to_index_one():
    recs = parse_fresnel_file("0.0 355.0 1.0 1 0 1 0\n", CFG)
    assert recs[0].emitter == 1 and recs[0].receiver == 72


def test_index_columns_detected():
    recs = parse_fresnel_file("10 38 4.0 1 0 1 0\n", CFG)
    assert recs[0].emitter == 10 and recs[0].receiver == 38


def test_off_grid_angle_rejected():
    with pytest.raises(GeometryMismatchError, match="off the"):
        parse_fresnel_file("90.4 185.0 4.0 1 0 1 0\n", CFG)


def test_angle_within_tolerance_snapped():
    recs = parse_fresnel_file("90.05 185.05 4.0 1 0 1 0\n", CFG)
    assert recs[0].emitter == 10 and recs[0].receiver == 38


# --- scattered fields ------------------------------------------------------------

def test_total_equals_incident_scatters_zero():
    rec = FresnelRecord(1, 20, 1e9, 0.5 + 0.5j, 0.5 + 0.5j)
    fields = scattered_from_records([rec])
    assert fields[1e9][(1, 20)] == 0.0


def test_total_minus_incident():
    v = 0.25 - 1.5j
    rec = FresnelRecord(2, 30, 1e9, (0.5 + 0.5j) + v, 0.5 + 0.5j)
    assert scattered_from_records([rec])[1e9][(2, 30)] == v


def test_duplicate_triples_rejected():
    rec = FresnelRecord(1, 20, 1e9, 1.0, 0.5)
    with pytest.raises(AmbiguousDataError):
        scattered_from_records([rec, rec])


def test_synthetic_records_round_trip_fields():
    records = sample_records()
    matrix = simulate_matrix(Scene(point_targets=[PointTarget((0.02, -0.01))]),
                             CFG, MED, 4e9)
    fields = scattered_from_records(records)[4e9]
    for (m, n), value in fields.items():
        assert value == pytest.approx(complex(matrix.entries[n - 1, m - 1]), abs=1e-12)


# --- calibration -----------------------------------------------------------------

def test_calibration_identity_gain():
    result = calibrate(sample_records(), CFG, MED)
    assert abs(result.factor - 1.0) <= 1e-12
    assert result.residual <= 1e-12


def test_calibration_halves_doubled_incident():
    result = calibrate(sample_records(gain=2.0), CFG, MED)
    assert result.factor == pytest.approx(0.5, abs=1e-12)
    assert result.residual <= 1e-12


def test_calibration_under_noise():
    rng = np.random.default_rng(5)
    k = wavenumber(MED, 4e9)
    noise_level = 1e-3
    records = []
    for m in range(1, 37):
        for n in sorted(index_set(m, CFG)):
            g = green(k, CFG.receiver_position(n), CFG.emitter_position(m))
            noisy = g * (1.0 + noise_level * complex(*rng.standard_normal(2)))
            records.append(FresnelRecord(m, n, 4e9, noisy, noisy))
    result = calibrate(records, CFG, MED)
    assert abs(result.factor - 1.0) <= 5.0 * noise_level
    assert result.residual <= 5.0 * noise_level


def test_calibration_scale_equivariance():
    records = sample_records()
    alpha = 0.3 - 1.7j
    scaled = [FresnelRecord(r.emitter, r.receiver, r.frequency_hz,
                            alpha * r.total_field, alpha * r.incident_field)
              for r in records]
    base = calibrate(records, CFG, MED)
    res = calibrate(scaled, CFG, MED)
    assert res.factor == pytest.approx(base.factor / alpha, rel=1e-12)
    u0 = records[0].total_field - records[0].incident_field
    u1 = scaled[0].total_field - scaled[0].incident_field
    assert res.factor * u1 == pytest.approx(base.factor * u0, rel=1e-12)


def test_calibration_requires_enough_records():
    with pytest.raises(CalibrationError, match=">= 8"):
        calibrate(sample_records(count=5), CFG, MED)


def test_calibration_rejects_zero_incident():
    records = [FresnelRecord(1, n, 1e9, 1.0, 0.0) for n in range(13, 30)]
    with pytest.raises(CalibrationError, match="zero"):
        calibrate(records, CFG, MED)


def test_calibration_rejects_mixed_frequencies():
    records = sample_records(count=10) + sample_records(f_hz=2e9, count=10)
    with pytest.raises(CalibrationError, match="one frequency"):
        calibrate(records, CFG, MED)


def test_calibrated_fields_match_forward_matrix():
    gain = 1.7 - 0.4j
    records = sample_records(gain=gain)
    matrix = simulate_matrix(Scene(point_targets=[PointTarget((0.02, -0.01))]),
                             CFG, MED, 4e9)
    cal = calibrate(records, CFG, MED)
    fields = scattered_from_records(records)[4e9]
    scale = np.abs(matrix.entries[matrix.mask]).max()
    for (m, n), value in fields.items():
        assert abs(cal.factor * value - matrix.entries[n - 1, m - 1]) <= 1e-9 * scale


# --- canonical CSV ----------------------------------------------------------------

def test_records_csv_round_trip_is_identity(tmp_path):
    records = sample_records(count=50)
    first = tmp_path / "first.csv"
    write_records_csv(records, first)
    parsed = read_records_csv(first)
    second = tmp_path / "second.csv"
    write_records_csv(parsed, second)
    assert first.read_bytes() == second.read_bytes()
    assert read_records_csv(second) == parsed


def test_frequency_helpers():
    records = sample_records(count=20) + sample_records(f_hz=2e9, count=20)
    assert frequencies(records) == [2e9, 4e9]
    assert len(records_at(records, 4e9)) == 20
    assert len(records_at(records, 4.0005e9)) == 20   # within 1 MHz
    assert records_at(records, 4.1e9) == []
