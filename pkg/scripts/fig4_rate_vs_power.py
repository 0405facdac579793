"""Secrecy rate versus transmit power, with and without the IRS.

Runs both ``fig4_near`` and ``fig4_far`` presets (the two assumed
geometries) and prints the mean rate per solver and power level.
"""

import argparse

from irs_secrecy.harness import emit_results, preset, run_trials, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--geometry", choices=("near", "far", "both"), default="both")
    args = ap.parse_args()

    names = ["fig4_near", "fig4_far"] if args.geometry == "both" else [f"fig4_{args.geometry}"]
    for name in names:
        spec = preset(name, seed=args.seed, trials=args.trials)
        rows = run_trials(spec, workers=args.workers)
        emit_results(rows, "csv", f"{name}.csv")
        print(f"== {name}")
        table = {}
        for s in summarize(rows):
            table.setdefault(s["p_dbm"], {})[s["solver"]] = s["mean_rate"]
        print(f"{'P[dBm]':>7}" + "".join(f"{solver:>24}" for solver in spec.solvers))
        for p in spec.power_grid:
            print(f"{p:>7g}" + "".join(f"{table[p][solver]:>24.4f}" for solver in spec.solvers))


if __name__ == "__main__":
    main()
