"""Massive IRS versus massive MIMO: sweep M at N_t=10 and N_t at M=10."""

import argparse

from irs_secrecy.harness import emit_results, preset, run_trials, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="fig5.csv")
    args = ap.parse_args()

    spec = preset("fig5", seed=args.seed, trials=args.trials)
    rows = run_trials(spec, workers=args.workers)
    emit_results(rows, "csv", args.out)
    summary = {(s["solver"], s["m"], s["n_t"]): s["mean_rate"] for s in summarize(rows)}
    base = spec.scenario
    print(f"{'':>14}" + "".join(f"{x:>9}" for x in spec.m_grid))
    print(f"{'vary M':>14}" + "".join(f"{summary[('aomm', m, base.n_t)]:>9.4f}" for m in spec.m_grid))
    print(f"{'vary N_t':>14}" + "".join(f"{summary[('aomm', base.m, n)]:>9.4f}" for n in spec.nt_grid))
    print(f"{'no IRS, N_t':>14}" + "".join(f"{summary[('no_irs_baseline', base.m, n)]:>9.4f}" for n in spec.nt_grid))


if __name__ == "__main__":
    main()
