"""Generate a noisy pump-saturation curve, fit the two-parameter model to
it, and report the recovered absorbance amplitude and saturation power.

Also prints the intensity bookkeeping at the fitted knee: the peak pump
intensity on the beam axis versus the intensity the singlet lifetime alone
would demand.

Run from the repository root:

    python3 scripts/saturation_fit_demo.py --out out/saturation --plot
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from cavmag import nv_model
from cavmag.config import instrument_defaults
from cavmag.fitting import fit_saturation
from cavmag.gaussian_optics import peak_intensity
from cavmag.seriesio import write_report, write_table
from cavmag.synthetic import saturation_curve_samples


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="out/saturation", help="output directory")
    parser.add_argument("--noise", type=float, default=0.01, help="additive noise sigma")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--plot", action="store_true", help="also write an SVG figure")
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    config = instrument_defaults()
    seed = config.seed if args.seed is None else args.seed
    model = config.saturation
    powers, samples = saturation_curve_samples(
        model, config.mirrors, noise_sigma=args.noise, seed=seed
    )
    print(
        f"[data] {powers.size} points, 0 to {powers.max():.1f} W, "
        f"noise sigma={args.noise:.3f}, seed={seed}"
    )

    result = fit_saturation(
        powers, samples, config.mirrors, model.baseline_transmission
    )
    truth = {
        "absorbance_amplitude": model.absorbance_amplitude,
        "saturation_power_w": model.saturation_power_w,
    }
    for name in ("absorbance_amplitude", "saturation_power_w"):
        value = result.value(name)
        sigma = result.uncertainty(name)
        true = truth[name]
        print(
            f"[fit] {name} = {value:.5f} +/- {sigma:.5f} "
            f"(truth {true}, error {100 * (value / true - 1):+.2f}%, "
            f"pull {(value - true) / sigma:+.2f} sigma)"
        )

    # Intensity bookkeeping at the fitted knee.
    knee_w = result.value("saturation_power_w")
    params = config.pump.params
    intensity = peak_intensity(knee_w, config.pump.waist_m)
    singlet = nv_model.sat_intensity_singlet(params)
    print(
        f"[intensity] on-axis at the knee: {intensity / 1e6:.1f} MW/m^2; "
        f"singlet-lifetime demand: {singlet / 1e6:.1f} MW/m^2; "
        f"the knee sits {singlet / intensity:.1f}x below it"
    )

    fine = np.linspace(powers.min(), powers.max(), 400)
    fitted_model = nv_model.SaturationModel(
        absorbance_amplitude=result.value("absorbance_amplitude"),
        saturation_power_w=result.value("saturation_power_w"),
        baseline_transmission=model.baseline_transmission,
    )
    fitted = np.array(
        [nv_model.transmission_vs_pump(p, fitted_model, config.mirrors) for p in fine]
    )

    table = out_dir / "saturation_curve.csv"
    write_table(table, {"power_w": powers, "normalized_transmission": samples})
    write_table(
        out_dir / "saturation_fit_curve.csv",
        {"power_w": fine, "normalized_transmission": fitted},
    )
    report = {
        "seed": seed,
        "noise_sigma": args.noise,
        "fit": result.as_dict(),
        "truth": truth,
        "peak_intensity_at_knee_w_m2": intensity,
        "singlet_saturation_intensity_w_m2": singlet,
    }
    write_report(out_dir / "saturation_fit.json", report)
    print(f"[write] {table}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(powers, samples, "o", label="samples")
        ax.plot(fine, fitted, "-", label="fit")
        ax.set_xlabel("pump power (W)")
        ax.set_ylabel("normalized transmission")
        ax.legend()
        figure = out_dir / "saturation_fit.svg"
        fig.savefig(figure, bbox_inches="tight")
        plt.close(fig)
        print(f"[write] {figure}")


if __name__ == "__main__":
    main()
