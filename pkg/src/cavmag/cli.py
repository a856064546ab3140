"""Command line front end.

Subcommands cover the forward models and the inversions: cavity-scan,
saturation (forward and fit modes), odmr, lockin-sim, psd and
sensitivity.  Every command reads one configuration (a JSON file, or the
built-in 'instrument-defaults'), writes data files into --out, and is
deterministic given (config, seed): reruns produce byte-identical output.

Exit codes: 0 on success, 2 for configuration or schema errors (argparse
usage errors included), 3 for numeric failures such as a fit that does
not converge.  Diagnostics go to stderr; data go to files only.
"""

import argparse
import dataclasses
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import cavity, fitting, gaussian_optics, lockin, magnetometry, nv_model, spectral
from .config import (
    BUILTIN_NAME,
    CONFIG_DIR_ENV,
    ConfigError,
    ExperimentConfig,
    load_config,
    to_json_dict,
)
from .seriesio import (
    read_timeseries,
    require_columns,
    read_table,
    write_report,
    write_table,
    write_table_json,
    write_timeseries,
)


def _table_path(out_dir: Path, stem: str, fmt: str) -> Path:
    return out_dir / f"{stem}.{'csv' if fmt == 'csv' else 'json'}"


def _write_columns(path: Path, columns: Dict[str, np.ndarray], fmt: str) -> None:
    if fmt == "csv":
        write_table(path, columns)
    else:
        write_table_json(path, columns)


def _scan_grid(args) -> np.ndarray:
    if args.f_span <= 0:
        raise ConfigError("frequency span must be positive")
    if args.points < 2:
        raise ConfigError("a scan needs at least two points")
    half = args.f_span / 2.0
    return np.linspace(args.f_center - half, args.f_center + half, args.points)


def _cavity_states(config: ExperimentConfig, trace: str):
    """CavityState instances for the requested scan trace.

    The configured mirror spacing refers to the empty cavity; inserting
    the diamond replaces part of the air gap with the slab.
    """
    spacing = config.geometry.mirror_spacing_m
    diamond = config.diamond
    empty_fsr = cavity.free_spectral_range(spacing)
    gouy = config.gouy_offset_hz
    if gouy is None:
        gouy = cavity.gouy_frequency_offset(
            spacing, config.geometry.mirror_curvature_m, empty_fsr
        )
    if trace == "empty":
        return {"": cavity.CavityState(config.mirrors, spacing, 1.0, None, gouy)}
    air_gap = spacing - diamond.thickness_m
    if air_gap <= 0:
        raise ConfigError("diamond thicker than the mirror spacing")
    base = cavity.CavityState(
        config.mirrors, air_gap, diamond.baseline_transmission, diamond, gouy
    )
    if trace == "diamond":
        return {"": base}
    slow_diamond = dataclasses.replace(
        diamond, refractive_index=diamond.refractive_index + diamond.birefringence,
        birefringence=0.0,
    )
    slow = dataclasses.replace(base, diamond=slow_diamond)
    return {"_h": base, "_v": slow}


def cmd_cavity_scan(config: ExperimentConfig, args, out_dir: Path) -> List[Path]:
    """Transmission versus laser frequency for one cavity configuration."""
    grid = _scan_grid(args)
    states = _cavity_states(config, args.trace)
    columns: Dict[str, np.ndarray] = {"frequency_hz": grid}
    for suffix, state in states.items():
        phase = cavity.phase_at_frequency(state, grid)
        columns[f"transmission{suffix}"] = cavity.transmission(state, phase)
    if len(states) > 1:
        stacked = [columns[f"transmission{s}"] for s in states]
        columns["transmission_mixed"] = 0.5 * (stacked[0] + stacked[1])
    path = _table_path(out_dir, f"cavity_scan_{args.trace}", args.format)
    _write_columns(path, columns, args.format)
    return [path]


def cmd_saturation(config: ExperimentConfig, args, out_dir: Path) -> List[Path]:
    """Pump saturation of the on-resonance transmission: model or fit."""
    if args.mode == "forward":
        powers = np.asarray(config.pump.power_grid_w, dtype=float)
        model = config.saturation
        curve = np.array(
            [
                nv_model.transmission_vs_pump(power, model, config.mirrors)
                for power in powers
            ]
        )
        if args.noise_sigma > 0:
            rng = np.random.default_rng(config.seed)
            curve = curve + rng.normal(0.0, args.noise_sigma, curve.size)
        path = _table_path(out_dir, "saturation_curve", args.format)
        _write_columns(
            path, {"power_w": powers, "normalized_transmission": curve}, args.format
        )
        return [path]
    if args.input is None:
        raise ConfigError("fit mode requires --input")
    table = read_table(Path(args.input))
    require_columns(table, ("power_w", "normalized_transmission"), Path(args.input))
    result = fitting.fit_saturation(
        table["power_w"],
        table["normalized_transmission"],
        config.mirrors,
        config.diamond.baseline_transmission,
    )
    if not result.converged:
        raise ValueError("saturation fit did not converge")
    report = result.as_dict()
    report["baseline_transmission"] = config.diamond.baseline_transmission
    report["mirror_reflectivity"] = config.mirrors.reflectivity
    path = out_dir / "saturation_fit.json"
    write_report(path, report)
    return []


def cmd_odmr(config: ExperimentConfig, args, out_dir: Path) -> List[Path]:
    """ODMR spectrum at a static bias field."""
    field = config.bias_field_t if args.field_t is None else args.field_t
    center = args.f_center
    if center is None:
        center = config.spin.zero_field_splitting_hz
    span = args.f_span
    if span is None:
        shift = config.spin.gyromagnetic_hz_per_t * field * config.spin.cos_angle
        span = 2.0 * shift + 40.0 * config.spin.resonance_fwhm_hz
    if span <= 0 or args.points < 2:
        raise ConfigError("frequency span and points must define a grid")
    grid = np.linspace(center - span / 2.0, center + span / 2.0, args.points)
    spectrum = magnetometry.odmr_spectrum(grid, field, config.spin)
    path = _table_path(out_dir, "odmr_spectrum", args.format)
    _write_columns(
        path,
        {"frequency_hz": spectrum.frequencies_hz, "transmission": spectrum.transmission},
        args.format,
    )
    return [path]


def cmd_lockin_sim(config: ExperimentConfig, args, out_dir: Path) -> List[Path]:
    """Full chain: synthesize FM transmission, demodulate, reconstruct B(t)."""
    spin = config.spin
    mod = config.modulation
    lockin_cfg = config.lockin
    bw = config.bandwidth
    rate = config.acquisition.lockin_sample_rate_hz
    settle = 20.0 * lockin_cfg.time_constant_s
    if args.duration_s <= settle + 2.0 / args.b_frequency_hz:
        raise ConfigError(
            "duration too short: need settle time plus at least two field cycles"
        )
    calibration = lockin.slope_alpha(spin, config.bias_field_t, mod, lockin_cfg, bw)
    bias = config.bias_field_t
    amplitude = args.b_amplitude_t
    frequency = args.b_frequency_hz

    def field(times: np.ndarray) -> np.ndarray:
        return bias + amplitude * np.sin(2.0 * math.pi * frequency * times)

    series = lockin.synthesize_transmission(
        args.duration_s,
        rate,
        mod,
        spin,
        field,
        bw,
        noise_sigma=args.noise_sigma,
        seed=config.seed,
    )
    demodulated = lockin.demodulate(series, mod.modulation_frequency_hz, lockin_cfg)
    reconstructed = lockin.field_from_lockin(
        demodulated, calibration.alpha_per_hz, spin
    )
    recovered = _tone_amplitude(
        reconstructed, frequency, settle
    ) / lockin.lowpass_amplitude_response(frequency, lockin_cfg)
    meta = {"seed": config.seed, "config": to_json_dict(config)}
    s_li_path = _table_path(out_dir, "lockin_s_li", args.format)
    field_path = _table_path(out_dir, "lockin_field", args.format)
    write_timeseries(s_li_path, demodulated, meta, args.format)
    write_timeseries(field_path, reconstructed, meta, args.format)
    report = {
        "alpha_per_hz": calibration.alpha_per_hz,
        "slope_residual_rms": calibration.residual_rms,
        "carrier_frequency_hz": mod.center_frequency_hz,
        "injected_amplitude_t": amplitude,
        "injected_frequency_hz": frequency,
        "recovered_amplitude_t": recovered,
        "bandwidth_attenuation_at_fmod": lockin.bandwidth_attenuation(
            mod.modulation_frequency_hz, bw
        ),
        "f3db_hz": bw.f3db_hz,
    }
    write_report(out_dir / "lockin_report.json", report)
    return [s_li_path, field_path]


def _tone_amplitude(
    series: lockin.TimeSeries, frequency_hz: float, settle_s: float
) -> float:
    """Amplitude of the component at one frequency, from the settled tail
    over an integer number of cycles."""
    times = series.times()
    start = int(round(settle_s * series.sample_rate_hz))
    cycles = int((times[-1] - times[start]) * frequency_hz)
    if cycles < 1:
        raise ValueError("record too short to estimate the tone amplitude")
    stop = start + int(round(cycles / frequency_hz * series.sample_rate_hz))
    segment = series.samples[start:stop]
    window = times[start:stop]
    phasor = np.exp(-2j * math.pi * frequency_hz * window)
    return 2.0 * float(np.abs(np.mean(segment * phasor)))


def cmd_psd(config: ExperimentConfig, args, out_dir: Path) -> List[Path]:
    """Amplitude spectral density and band statistics of a stored record."""
    if args.input is None:
        raise ConfigError("psd requires --input")
    series = read_timeseries(Path(args.input))
    spectrum = spectral.psd_welch(
        series,
        segment_length=args.segment_length,
        overlap_fraction=args.overlap,
        window=args.window,
    )
    nyquist = series.sample_rate_hz / 2.0
    lo = args.band_lo if args.band_lo is not None else 0.0
    hi = args.band_hi if args.band_hi is not None else nyquist * (1.0 + 1e-9)
    band = (lo, hi)
    path = _table_path(out_dir, "psd", args.format)
    _write_columns(
        path,
        {"frequency_hz": spectrum.frequencies_hz, "asd": spectrum.asd},
        args.format,
    )
    report = {
        "band_lo_hz": lo,
        "band_hi_hz": hi,
        "noise_floor": spectral.noise_floor(spectrum, band),
        "rms_in_band": spectral.rms_in_band(spectrum, band),
        "segment_length": args.segment_length,
        "window": args.window,
        "sample_rate_hz": series.sample_rate_hz,
    }
    write_report(out_dir / "psd_report.json", report)
    return [path]


def cmd_sensitivity(config: ExperimentConfig, args, out_dir: Path) -> List[Path]:
    """Sensitivity budget of the configured instrument, as a JSON report."""
    spin = config.spin
    mode = gaussian_optics.mode_geometry(config.geometry)
    photons = gaussian_optics.photon_rate(
        config.detection.detected_power_w, config.geometry.wavelength_m
    )
    shot = magnetometry.shot_noise_sensitivity(
        spin.resonance_fwhm_hz, spin.contrast, photons, spin
    )
    density = nv_model.nv_density(
        config.pump.absorbance_amplitude,
        config.ir_cross_section_m2,
        config.diamond.thickness_m,
    )
    count = density * config.detection.sensing_volume_m3
    projection = magnetometry.projection_noise_sensitivity(count, spin)
    cross_k_per_t = magnetometry.temperature_cross_sensitivity(spin)
    intensity = gaussian_optics.peak_intensity(
        config.pump.saturation_power_w, config.pump.waist_m
    )
    report = {
        "waist_m": mode.waist_m,
        "rayleigh_range_m": mode.rayleigh_range_m,
        "photon_rate_per_s": photons,
        "shot_noise_t_per_sqrt_hz": shot,
        "nv_density_per_m3": density,
        "nv_density_ppm": nv_model.nv_density_ppm(density),
        "nv_count": count,
        "projection_noise_t_per_sqrt_hz": projection,
        "temperature_cross_k_per_t": cross_k_per_t,
        "temperature_cross_k_per_ut": cross_k_per_t * 1e-6,
        "peak_intensity_at_saturation_w_m2": intensity,
        "singlet_sat_intensity_w_m2": nv_model.sat_intensity_singlet(config.pump.params),
        "saturation_discrepancy_ratio": nv_model.saturation_discrepancy_ratio(
            intensity, config.pump.params
        ),
        "bandwidth_attenuation_at_fmod": lockin.bandwidth_attenuation(
            config.modulation.modulation_frequency_hz, config.bandwidth
        ),
        "f3db_hz": config.bandwidth.f3db_hz,
    }
    write_report(out_dir / "sensitivity_report.json", report)
    return []


def _plot_tables(paths: List[Path]) -> None:
    """Render an SVG line plot next to each CSV; presentation only."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for path in paths:
        if path.suffix != ".csv":
            continue
        table = read_table(path)
        names = list(table)
        x_name = names[0]
        figure, axis = plt.subplots(figsize=(8, 4.5))
        for name in names[1:]:
            axis.plot(table[x_name], table[name], label=name, linewidth=0.9)
        axis.set_xlabel(x_name)
        axis.set_ylabel(", ".join(names[1:]) if len(names) > 1 else "")
        if len(names) > 2:
            axis.legend(loc="best", fontsize=8)
        axis.grid(True, alpha=0.3)
        figure.tight_layout()
        figure.savefig(path.with_suffix(".svg"))
        plt.close(figure)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavmag",
        description=(
            "Forward models and inversions for a cavity-enhanced "
            "infrared-absorption magnetometer"
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=BUILTIN_NAME,
        help=(
            f"configuration file, or '{BUILTIN_NAME}' for the built-in set; "
            f"bare names are also searched in ${CONFIG_DIR_ENV}"
        ),
    )
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="data table format"
    )
    common.add_argument(
        "--plot", action="store_true", help="also write an SVG plot per CSV table"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser(
        "cavity-scan", parents=[common], help="transmission versus laser frequency"
    )
    scan.add_argument(
        "--trace",
        choices=("empty", "diamond", "birefringent"),
        default="diamond",
        help="cavity contents: empty mirrors, diamond, or split polarization combs",
    )
    scan.add_argument(
        "--f-center", type=float, default=None, help="scan center, Hz (default c/lambda)"
    )
    scan.add_argument("--f-span", type=float, default=7.5e9, help="scan width, Hz")
    scan.add_argument("--points", type=int, default=20001, help="number of grid points")
    scan.set_defaults(func=cmd_cavity_scan)

    saturation = sub.add_parser(
        "saturation", parents=[common], help="pump saturation curve or fit"
    )
    saturation.add_argument(
        "--mode", choices=("forward", "fit"), default="forward", help="generate or fit"
    )
    saturation.add_argument(
        "--input", default=None, help="CSV with power_w, normalized_transmission (fit mode)"
    )
    saturation.add_argument(
        "--noise-sigma", type=float, default=0.0, help="Gaussian noise added in forward mode"
    )
    saturation.set_defaults(func=cmd_saturation)

    odmr = sub.add_parser(
        "odmr", parents=[common], help="ODMR spectrum at a static field"
    )
    odmr.add_argument("--field-t", type=float, default=None, help="bias field, tesla")
    odmr.add_argument("--f-center", type=float, default=None, help="grid center, Hz")
    odmr.add_argument("--f-span", type=float, default=None, help="grid width, Hz")
    odmr.add_argument("--points", type=int, default=4001, help="number of grid points")
    odmr.set_defaults(func=cmd_odmr)

    sim = sub.add_parser(
        "lockin-sim", parents=[common], help="synthesize, demodulate and reconstruct"
    )
    sim.add_argument(
        "--b-amplitude-t", type=float, default=100e-9, help="injected field amplitude"
    )
    sim.add_argument(
        "--b-frequency-hz", type=float, default=100.0, help="injected field frequency"
    )
    sim.add_argument("--duration-s", type=float, default=0.12, help="record length")
    sim.add_argument(
        "--noise-sigma", type=float, default=0.0, help="white readout noise level"
    )
    sim.set_defaults(func=cmd_lockin_sim)

    psd = sub.add_parser(
        "psd", parents=[common], help="amplitude spectral density of a record"
    )
    psd.add_argument("--input", default=None, help="CSV with time_s, value columns")
    psd.add_argument(
        "--segment-length", type=int, default=None, help="Welch segment length"
    )
    psd.add_argument("--overlap", type=float, default=0.5, help="segment overlap fraction")
    psd.add_argument("--window", choices=("hann", "rect"), default="hann")
    psd.add_argument("--band-lo", type=float, default=None, help="report band lower edge")
    psd.add_argument("--band-hi", type=float, default=None, help="report band upper edge")
    psd.set_defaults(func=cmd_psd)

    sens = sub.add_parser(
        "sensitivity", parents=[common], help="sensitivity budget report"
    )
    sens.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        code = exit_request.code
        return int(code) if code is not None else 0
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        if getattr(args, "f_center", "absent") is None and args.command == "cavity-scan":
            args.f_center = cavity.SPEED_OF_LIGHT / config.geometry.wavelength_m
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        tables = args.func(config, args, out_dir)
        if args.plot and tables:
            _plot_tables(tables)
    except ConfigError as error:
        print(f"configuration error: {error}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as error:
        print(f"numeric failure: {error}", file=sys.stderr)
        return 3
    except OSError as error:
        print(f"i/o error: {error}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
