"""Sweep the probe frequency across the empty, diamond-loaded, and
birefringent cavity and summarize what the fringes reveal.

Writes one CSV trace per configuration plus a JSON summary and prints the
headline numbers (finesse, linewidth, polarization splitting).

Run from the repository root:

    python3 scripts/cavity_scan_demo.py --out out/cavity --plot
"""
from __future__ import annotations

import argparse
import dataclasses
import math
from pathlib import Path

import numpy as np

from cavmag import cavity
from cavmag.config import instrument_defaults
from cavmag.constants import SPEED_OF_LIGHT
from cavmag.seriesio import write_report, write_table


def build_states(config):
    """Empty, diamond-loaded, and slow-axis cavity states.

    The configured mirror spacing is the empty-cavity value; the slab
    replaces part of the air gap when inserted.
    """
    spacing = config.geometry.mirror_spacing_m
    diamond = config.diamond
    gouy = cavity.gouy_frequency_offset(
        spacing, config.geometry.mirror_curvature_m, cavity.free_spectral_range(spacing)
    )
    empty = cavity.CavityState(config.mirrors, spacing, 1.0, None, gouy)
    loaded = cavity.CavityState(
        config.mirrors,
        spacing - diamond.thickness_m,
        diamond.baseline_transmission,
        diamond,
        gouy,
    )
    slow_axis = dataclasses.replace(
        diamond,
        refractive_index=diamond.refractive_index + diamond.birefringence,
        birefringence=0.0,
    )
    slow = dataclasses.replace(loaded, diamond=slow_axis)
    return {"empty": empty, "diamond_h": loaded, "diamond_v": slow}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="out/cavity", help="output directory")
    parser.add_argument("--points", type=int, default=20001)
    parser.add_argument("--plot", action="store_true", help="also write an SVG figure")
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    config = instrument_defaults()
    states = build_states(config)
    loaded = states["diamond_h"]

    center = SPEED_OF_LIGHT / config.geometry.wavelength_m
    span = 1.25 * states["empty"].free_spectral_range_hz
    grid = np.linspace(center - span / 2, center + span / 2, args.points)

    summary = {}
    columns = {"frequency_hz": grid}
    for name, state in states.items():
        finesse = cavity.finesse(
            config.mirrors.reflectivity, state.single_pass_transmission
        )
        fsr = state.free_spectral_range_hz
        fwhm = cavity.resonance_fwhm(fsr, finesse)
        columns[f"transmission_{name}"] = cavity.transmission(
            state, cavity.phase_at_frequency(state, grid)
        )
        summary[name] = {
            "free_spectral_range_hz": fsr,
            "finesse": finesse,
            "fwhm_hz": fwhm,
        }
        print(
            f"[scan] {name:9s} FSR={fsr / 1e9:.4f} GHz  "
            f"finesse={finesse:.1f}  FWHM={fwhm / 1e6:.2f} MHz"
        )

    # Polarization pair on the same fringe order: exact comb difference
    # against the first-order estimate.
    diamond = config.diamond
    order = int(round(center / loaded.free_spectral_range_hz))
    exact = cavity.birefringent_pair_difference(loaded, order, order)
    approx = cavity.birefringent_splitting(
        diamond.birefringence,
        diamond.thickness_m,
        loaded.air_gap_m,
        diamond.refractive_index,
        center,
    )
    recovered = cavity.birefringence_from_splitting(
        exact,
        diamond.thickness_m,
        loaded.air_gap_m,
        diamond.refractive_index,
        center,
    )
    phase_deg = math.degrees(
        cavity.phase_difference(
            recovered, diamond.thickness_m, config.geometry.wavelength_m
        )
    )
    print(
        f"[split] order m={order}: exact={exact / 1e6:.3f} MHz, "
        f"first-order={approx / 1e6:.3f} MHz "
        f"(ratio {exact / approx:.6f})"
    )
    print(f"[split] recovered dn={recovered:.4e}, phase difference={phase_deg:.3f} deg")
    summary["birefringence"] = {
        "fringe_order": order,
        "exact_splitting_hz": exact,
        "first_order_splitting_hz": approx,
        "recovered_dn": recovered,
        "phase_difference_deg": phase_deg,
    }

    table = out_dir / "cavity_scan.csv"
    write_table(table, columns)
    write_report(out_dir / "cavity_summary.json", summary)
    print(f"[write] {table}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(8, 4))
        offset = grid - center
        for name in states:
            ax.plot(offset / 1e9, columns[f"transmission_{name}"], label=name, lw=0.8)
        ax.set_xlabel("frequency offset from probe (GHz)")
        ax.set_ylabel("relative transmission")
        ax.legend()
        figure = out_dir / "cavity_scan.svg"
        fig.savefig(figure, bbox_inches="tight")
        plt.close(fig)
        print(f"[write] {figure}")


if __name__ == "__main__":
    main()
