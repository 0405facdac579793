"""Command-line entry point: ``irs-secrecy {run,preset,oracle}``."""

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .errors import InvalidArgument, InvalidConfig
from .harness import PRESETS, ExperimentSpec, emit_results, preset, run_trials, summarize
from .trace import SolverOptions

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("irs_secrecy")


def _common(p):
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--trials", type=int, help="override the number of trials")
    p.add_argument("--epsilon", type=float, help="relative-increment stopping threshold")
    p.add_argument("--max-iterations", type=int, help="outer iteration cap per solve")
    p.add_argument("--trace-granularity", choices=("outer", "block"))
    p.add_argument("--out", help="result file (defaults to the spec's output_path or <id>.<format>)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--workers", type=int, default=1, help="worker processes (output is unaffected)")
    p.add_argument("--timing", action="store_true", help="record wall-clock time per solve")
    p.add_argument("--traces", help="write per-solve objective histories to this JSON-lines file")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="irs-secrecy",
        description="Secrecy-rate maximization with an intelligent reflecting surface.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment described by a JSON file")
    run.add_argument("spec", help="path to an experiment spec (JSON)")
    _common(run)

    pre = sub.add_parser("preset", help="run a named preset")
    pre.add_argument("name", nargs="?", choices=PRESETS)
    pre.add_argument("--list", action="store_true", help="print preset specs and exit")
    _common(pre)

    orc = sub.add_parser("oracle", help="print brute-force reference tables")
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--count", type=int, default=50)
    return parser


def _apply_overrides(spec, args):
    sc = spec.scenario
    if args.seed is not None:
        sc = sc.with_(seed=args.seed)
    if args.trials is not None:
        sc = sc.with_(trials=args.trials)
    opts = spec.options
    changes = {}
    if args.epsilon is not None:
        changes["epsilon"] = args.epsilon
    if args.max_iterations is not None:
        changes["max_iterations"] = args.max_iterations
    if args.trace_granularity is not None:
        changes["trace_granularity"] = args.trace_granularity
    if changes:
        opts = SolverOptions(**{**opts.__dict__, **changes})
    return spec.with_(scenario=sc, options=opts)


def _execute(spec, args):
    out = args.out or spec.output_path or f"{spec.id}.{args.format}"
    traces = [] if args.traces else None
    rows = run_trials(spec, workers=args.workers, record_timing=args.timing, traces=traces)
    emit_results(rows, args.format, out)
    summary = summarize(rows)
    Path(str(out) + ".summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if traces is not None:
        with open(args.traces, "w") as fh:
            for t in traces:
                fh.write(json.dumps(t) + "\n")
    print(f"{'solver':<22}{'M':>4}{'N_t':>5}{'P[dBm]':>8}{'rate':>10}{'std':>9}{'iters':>9}{'blocks':>10}")
    for s in summary:
        print(
            f"{s['solver']:<22}{s['m']:>4}{s['n_t']:>5}{s['p_dbm']:>8g}{s['mean_rate']:>10.4f}"
            f"{s['std_rate']:>9.4f}{s['mean_iterations']:>9.1f}{s['mean_block_updates']:>10.1f}"
        )
    print(f"wrote {len(rows)} rows to {out}")
    failures = sum(math.isnan(r.rate_bps_hz) for r in rows)
    if failures:
        print(f"{failures} solve(s) failed numerically", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "oracle":
            from .oracles import reference_tables

            print(f"{'check':<62}{'cases':>7}{'worst':>12}")
            for name, n, worst in reference_tables(seed=args.seed, count=args.count):
                print(f"{name:<62}{n:>7}{worst:>12.3e}")
            return EXIT_OK
        if args.command == "run":
            try:
                text = Path(args.spec).read_text()
            except OSError as exc:
                raise InvalidConfig(f"cannot read {args.spec}: {exc}") from exc
            spec = ExperimentSpec.from_json(text)
        else:
            if args.list or args.name is None:
                for name in PRESETS:
                    print(json.dumps(preset(name).to_dict()))
                return EXIT_OK
            spec = preset(args.name)
        spec = _apply_overrides(spec, args)
    except (InvalidConfig, InvalidArgument) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return _execute(spec, args)


if __name__ == "__main__":
    sys.exit(main())
