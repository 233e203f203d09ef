"""Command-line front end.

Subcommands wire the pipeline end to end: ``simulate`` produces masked
response matrices from a scene, ``image`` migrates a matrix dump or a
measurement file into maps, ``compare-theory`` checks a migrated map
against its predicted point spread, and ``resolution-study`` sweeps
frequency for a two-target scene. Every command writes a manifest with
content hashes of all inputs and outputs; reruns with identical inputs are
byte-identical. Worker count for map evaluation comes from the
KMIG_WORKERS environment variable (default 1).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import figures, forward, fresnel_io, imaging, msr, theory
from .errors import ConfigurationError, KmigError
from .geometry import ArrayConfig, MediumParams, load_config, wavelength, wavenumber
from .gridio import GridRegion, compare_grids, write_grid_csv, write_grid_json, write_grid_pgm
from .manifest import RunManifest, TOOL_VERSION, atomic_path

_VERSION_LINE = (f"kmig {TOOL_VERSION} (formats: matrix-csv v1, grid v1, records-csv v1, "
                 f"manifest v1)")


def _parse_freqs_ghz(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad --freq-ghz list {text!r}: {exc}") from exc
    if not values or any(v <= 0 for v in values):
        raise ConfigurationError("--freq-ghz needs positive comma-separated GHz values")
    return values


def _freq_label(f_hz: float) -> str:
    return f"{f_hz / 1e9:g}GHz"


def _load_config_arg(path) -> tuple[ArrayConfig, MediumParams]:
    if path is None:
        return ArrayConfig(), MediumParams()
    return load_config(path)


def _grid_args(args) -> tuple[GridRegion, float]:
    return GridRegion(args.grid_halfwidth_m), args.grid_spacing_m


def _write_grid_outputs(grid, stem: Path, manifest: RunManifest, argmax_points,
                        figure: bool, figure_title: str, markers=None) -> None:
    for suffix, writer in ((".csv", write_grid_csv), (".pgm", write_grid_pgm)):
        out = stem.with_suffix(suffix)
        with atomic_path(out) as tmp:
            writer(grid, tmp)
        manifest.add_output(out)
    out = stem.with_suffix(".json")
    with atomic_path(out) as tmp:
        write_grid_json(grid, tmp, argmax_points=argmax_points)
    manifest.add_output(out)
    if figure:
        out = stem.with_suffix(".png")
        with atomic_path(out) as tmp:
            figures.save_map_figure(grid, tmp, title=figure_title, markers=markers)
        manifest.add_output(out)


def _manifest_args(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def cmd_simulate(args) -> int:
    config, medium = _load_config_arg(args.config)
    scene = forward.load_scene(args.scene)
    freqs = _parse_freqs_ghz(args.freq_ghz)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest("simulate", _manifest_args(
        args, ["scene", "config", "freq_ghz", "cell_m", "out_dir"]), out_dir)
    manifest.add_input(args.scene)
    if args.config:
        manifest.add_input(args.config)

    for ghz in freqs:
        f_hz = ghz * 1e9
        matrix = forward.simulate_matrix(scene, config, medium, f_hz, cell=args.cell_m)
        label = _freq_label(f_hz)
        csv_path = out_dir / f"msr_f{label}.csv"
        with atomic_path(csv_path) as tmp:
            msr.write_matrix_csv(matrix, tmp)
        manifest.add_output(csv_path)
        pgm_path = out_dir / f"msr_f{label}.pgm"
        with atomic_path(pgm_path) as tmp:
            msr.write_magnitude_pgm(matrix, tmp)
        manifest.add_output(pgm_path)
        if not args.no_figures:
            png_path = out_dir / f"msr_f{label}.png"
            with atomic_path(png_path) as tmp:
                figures.save_matrix_figure(matrix, tmp, title=f"|matrix| at {label}")
            manifest.add_output(png_path)
        print(f"simulate: wrote {csv_path.name} "
              f"({matrix.measured_count} measured entries)")
    manifest.write()
    return 0


def _image_one(matrix, args, config, medium, out_dir, manifest, extra_meta=None) -> None:
    region, spacing = _grid_args(args)
    grid = imaging.km_map(matrix, region, spacing, variant=args.variant, medium=medium)
    if extra_meta:
        grid.meta.update(extra_meta)
    peaks = imaging.local_maxima(grid, args.threshold, args.min_sep_m)
    label = _freq_label(matrix.frequency_hz)
    stem = out_dir / f"map_f{label}.x"
    _write_grid_outputs(grid, stem, manifest, peaks, not args.no_figures,
                        f"migration map at {label} ({args.variant})", markers=peaks)
    print(f"image: {label}: {len(peaks)} local maxima " +
          " ".join(f"({p[0]:.4f},{p[1]:.4f})" for p in peaks[:4]))


def cmd_image(args) -> int:
    config, medium = _load_config_arg(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest("image", _manifest_args(
        args, ["input", "config", "freq_ghz", "variant", "grid_halfwidth_m",
               "grid_spacing_m", "threshold", "min_sep_m", "out_dir"]), out_dir)
    manifest.add_input(args.input)
    if args.config:
        manifest.add_input(args.config)

    in_path = Path(args.input)
    if in_path.suffix.lower() == ".csv":
        matrix = msr.read_matrix_csv(in_path, config)
        if args.freq_ghz is not None:
            wanted = [g * 1e9 for g in _parse_freqs_ghz(args.freq_ghz)]
            hit = [f for f in wanted if abs(f - matrix.frequency_hz) <= fresnel_io.FREQ_MATCH_HZ]
            if not hit:
                raise ConfigurationError(
                    f"requested frequencies not in {in_path.name}; available: "
                    f"{_freq_label(matrix.frequency_hz)}")
        _image_one(matrix, args, config, medium, out_dir, manifest)
    else:
        records = fresnel_io.read_fresnel_file(in_path, config)
        available = fresnel_io.frequencies(records)
        if not available:
            raise ConfigurationError(f"{in_path.name}: no data rows")
        if args.freq_ghz is None:
            selected = available
        else:
            selected = []
            for ghz in _parse_freqs_ghz(args.freq_ghz):
                match = [f for f in available if abs(f - ghz * 1e9) <= fresnel_io.FREQ_MATCH_HZ]
                if not match:
                    labels = ", ".join(_freq_label(f) for f in available)
                    raise ConfigurationError(
                        f"frequency {ghz} GHz not in {in_path.name}; available: {labels}")
                selected.append(match[0])
        scattered = fresnel_io.scattered_from_records(records)
        for f_hz in selected:
            at_f = fresnel_io.records_at(records, f_hz)
            cal = fresnel_io.calibrate(at_f, config, medium)
            fields = fresnel_io.apply_calibration(scattered[f_hz], cal.factor)
            matrix = msr.assemble(fields, config, f_hz)
            meta = {"calibration_factor": [cal.factor.real, cal.factor.imag],
                    "calibration_residual": cal.residual}
            print(f"image: {_freq_label(f_hz)}: calibration residual {cal.residual:.4f}")
            _image_one(matrix, args, config, medium, out_dir, manifest, extra_meta=meta)
    manifest.write()
    return 0


def cmd_compare_theory(args) -> int:
    config, medium = _load_config_arg(args.config)
    scene = forward.load_scene(args.scene)
    forward.require_point_scene(scene)
    freqs = _parse_freqs_ghz(args.freq_ghz)
    if len(freqs) != 1:
        raise ConfigurationError("compare-theory takes a single --freq-ghz value")
    f_hz = freqs[0] * 1e9
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest("compare-theory", _manifest_args(
        args, ["scene", "config", "freq_ghz", "variant", "grid_halfwidth_m",
               "grid_spacing_m", "window_m", "out_dir"]), out_dir)
    manifest.add_input(args.scene)
    if args.config:
        manifest.add_input(args.config)

    region, spacing = _grid_args(args)
    k_b = wavenumber(medium, f_hz)
    matrix = forward.simulate_matrix(scene, config, medium, f_hz)
    km_grid = imaging.km_map(matrix, region, spacing, variant=args.variant, medium=medium)
    targets = [(t.center, t.strength) for t in scene.point_targets]
    th_grid = theory.theory_map(targets, region, spacing, k_b)
    label = _freq_label(f_hz)

    _write_grid_outputs(km_grid, out_dir / f"km_f{label}.x", manifest,
                        [km_grid.argmax_point()], False, "")
    _write_grid_outputs(th_grid, out_dir / f"theory_f{label}.x", manifest,
                        [th_grid.argmax_point()], False, "")

    degenerate = km_grid.meta.get("peak_value", 0.0) == 0.0 or \
        th_grid.meta.get("peak_value", 0.0) == 0.0
    centers = [t.center for t in scene.point_targets]
    report = {"frequency_hz": f_hz, "variant": args.variant,
              "window_radius_m": args.window_m, "degenerate": degenerate}
    if degenerate:
        report["note"] = "at least one map is identically zero; statistics omitted"
    else:
        stats = compare_grids(km_grid, th_grid, centers=centers, radius=args.window_m)
        if math.isnan(stats["pearson"]):
            stats["pearson"] = None
        report.update(stats)
        print(f"compare-theory: {label}: pearson={report['pearson']:.5f} "
              f"argmax offset {report['argmax_offset_cells']:.2f} cells")
    report_path = out_dir / f"compare_f{label}.json"
    with atomic_path(report_path) as tmp:
        tmp.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    manifest.add_output(report_path)
    if not args.no_figures:
        png_path = out_dir / f"compare_f{label}.png"
        with atomic_path(png_path) as tmp:
            figures.save_comparison_figure(km_grid, th_grid, tmp,
                                           title=f"map vs predicted spread at {label}")
        manifest.add_output(png_path)
    manifest.write()
    return 0


def cmd_resolution_study(args) -> int:
    if args.separation_m <= 0:
        raise ConfigurationError("--separation-m must be positive")
    config, medium = _load_config_arg(args.config)
    freqs = _parse_freqs_ghz(args.freq_ghz)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest("resolution-study", _manifest_args(
        args, ["separation_m", "config", "freq_ghz", "variant", "grid_halfwidth_m",
               "grid_spacing_m", "threshold", "min_sep_m", "out_dir"]), out_dir)
    if args.config:
        manifest.add_input(args.config)

    half = 0.5 * args.separation_m
    scene = forward.Scene(point_targets=[forward.PointTarget((-half, 0.0)),
                                         forward.PointTarget((half, 0.0))])
    region, spacing = _grid_args(args)
    results = []
    for ghz in freqs:
        f_hz = ghz * 1e9
        matrix = forward.simulate_matrix(scene, config, medium, f_hz)
        grid = imaging.km_map(matrix, region, spacing, variant=args.variant, medium=medium)
        peaks = imaging.local_maxima(grid, args.threshold, args.min_sep_m)
        lam = wavelength(medium, f_hz)
        results.append({
            "frequency_ghz": ghz,
            "wavelength_m": lam,
            "half_wavelength_m": 0.5 * lam,
            "half_wavelength_below_separation": 0.5 * lam < args.separation_m,
            "maxima_count": len(peaks),
            "maxima_m": [[p[0], p[1]] for p in peaks],
            "distinguishable": len(peaks) == 2,
        })
        label = _freq_label(f_hz)
        _write_grid_outputs(grid, out_dir / f"map_f{label}.x", manifest, peaks,
                            not args.no_figures,
                            f"two targets {args.separation_m} m apart at {label}",
                            markers=peaks)
        print(f"resolution-study: {label}: {len(peaks)} maxima "
              f"(lambda/2 = {0.5 * lam:.4f} m)")

    report = {"separation_m": args.separation_m, "target_count": 2,
              "threshold": args.threshold, "min_separation_m": args.min_sep_m,
              "per_frequency": results}
    report_path = out_dir / "study.json"
    with atomic_path(report_path) as tmp:
        tmp.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    manifest.add_output(report_path)
    if not args.no_figures:
        png_path = out_dir / "study.png"
        with atomic_path(png_path) as tmp:
            figures.save_study_figure([r["frequency_ghz"] for r in results],
                                      [r["maxima_count"] for r in results], 2, tmp,
                                      title=f"separation {args.separation_m} m")
        manifest.add_output(png_path)
    manifest.write()
    return 0


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", choices=imaging.VARIANTS, default="asymptotic",
                   help="steering vectors: far-field plane waves or exact Green's functions")
    p.add_argument("--grid-halfwidth-m", type=float, default=0.2)
    p.add_argument("--grid-spacing-m", type=float, default=0.002)


def _add_peak_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threshold", type=float, default=0.5,
                   help="relative local-maxima threshold in (0,1)")
    p.add_argument("--min-sep-m", type=float, default=0.02,
                   help="minimum separation between reported maxima")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmig",
        description="Kirchhoff-migration imaging of small objects from "
                    "limited-aperture multi-static data")
    parser.add_argument("--version", action="version", version=_VERSION_LINE)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize masked response matrices for a scene")
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--config", help="array/medium JSON config (defaults otherwise)")
    p.add_argument("--freq-ghz", required=True, help="comma-separated frequencies in GHz")
    p.add_argument("--cell-m", type=float, default=None,
                   help="disk quadrature cell size (default min(lambda/20, radius/2))")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("image", help="migrate a matrix dump or measurement file into maps")
    p.add_argument("--input", required=True,
                   help="matrix dump (.csv) or Fresnel-style measurement file")
    p.add_argument("--config", help="array/medium JSON config")
    p.add_argument("--freq-ghz", help="frequencies to image (default: all in file)")
    _add_grid_flags(p)
    _add_peak_flags(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_image)

    p = sub.add_parser("compare-theory",
                       help="compare a migrated map against the predicted point spread")
    p.add_argument("--scene", required=True, help="point-target scene JSON file")
    p.add_argument("--config", help="array/medium JSON config")
    p.add_argument("--freq-ghz", required=True, help="single frequency in GHz")
    _add_grid_flags(p)
    p.add_argument("--window-m", type=float, default=0.06,
                   help="statistics window radius around each target")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_compare_theory)

    p = sub.add_parser("resolution-study",
                       help="two-target distinguishability sweep over frequency")
    p.add_argument("--separation-m", type=float, required=True)
    p.add_argument("--config", help="array/medium JSON config")
    p.add_argument("--freq-ghz", required=True, help="comma-separated frequencies in GHz")
    _add_grid_flags(p)
    _add_peak_flags(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_resolution_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (KmigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
