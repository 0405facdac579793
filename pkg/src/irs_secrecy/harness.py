"""Monte Carlo experiment driver.

Every trial draws one channel realization per grid point from the trial's
own substream and runs all selected solvers on that same realization, so
solver comparisons are paired.  Rows are sorted by (trial, grid point,
solver) before they are returned, which keeps output independent of the
number of worker processes.
"""

import csv
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import numpy as np

from .aomm import solve_aomm
from .bcd import solve_bcd
from .channel import ScenarioConfig, build_instance, substream
from .errors import InvalidArgument, InvalidConfig, NumericalFailure
from .model import PhaseVector, _optimal_direction, optimal_beamformer, secrecy_rate
from .trace import SolverOptions

KINDS = ("convergence", "rate_vs_power", "sweep_m_nt")
SOLVERS = ("bcd", "aomm", "no_irs_baseline", "random_phase_baseline")
CSV_HEADER = (
    "experiment",
    "trial",
    "solver",
    "m",
    "n_t",
    "p_dbm",
    "rate_bps_hz",
    "iterations",
    "block_updates",
    "wall_ms",
)


def _round12(x):
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    trial: int
    solver: str
    m: int
    n_t: int
    p_dbm: float
    rate_bps_hz: float
    iterations: int = 0
    block_updates: int = 0
    wall_ms: float = 0.0

    def __eq__(self, other):
        if not isinstance(other, ResultRow):
            return NotImplemented
        for a, b in zip(astuple_row(self), astuple_row(other)):
            if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
                continue
            if a != b:
                return False
        return True

    __hash__ = None


def astuple_row(row):
    return tuple(getattr(row, name) for name in CSV_HEADER)


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    scenario: ScenarioConfig
    solvers: tuple
    id: str = "experiment"
    power_grid: Optional[tuple] = None
    m_grid: Optional[tuple] = None
    nt_grid: Optional[tuple] = None
    output_path: Optional[str] = None
    options: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfig(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.solvers:
            raise InvalidConfig("at least one solver must be selected")
        bad = [s for s in self.solvers if s not in SOLVERS]
        if bad:
            raise InvalidConfig(f"unknown solvers: {', '.join(bad)}")
        if len(set(self.solvers)) != len(self.solvers):
            raise InvalidConfig("duplicate solver names")
        if "no_irs_baseline" in self.solvers and not self.scenario.has_direct_links:
            raise InvalidConfig("no_irs_baseline needs r_tl and r_te in the scenario")
        for name in ("power_grid", "m_grid", "nt_grid"):
            grid = getattr(self, name)
            if grid is None:
                continue
            grid = tuple(grid)
            object.__setattr__(self, name, grid)
            if not grid:
                raise InvalidConfig(f"{name} must be non-empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise InvalidConfig(f"{name} must be strictly increasing")
            if name != "power_grid" and any(
                isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in grid
            ):
                raise InvalidConfig(f"{name} entries must be positive integers")
            if name == "power_grid" and not all(math.isfinite(x) for x in grid):
                raise InvalidConfig("power_grid entries must be finite")
        if self.kind == "rate_vs_power" and self.power_grid is None:
            raise InvalidConfig("rate_vs_power needs power_grid")
        if self.kind == "sweep_m_nt" and self.m_grid is None and self.nt_grid is None:
            raise InvalidConfig("sweep_m_nt needs m_grid and/or nt_grid")
        object.__setattr__(self, "solvers", tuple(self.solvers))

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidConfig("experiment spec must be a JSON object")
        opt_keys = ("epsilon", "max_iterations", "trace_granularity")
        known = {f.name for f in fields(cls)} - {"options"} | set(opt_keys)
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidConfig(f"unknown experiment keys: {', '.join(unknown)}")
        for key in ("kind", "scenario", "solvers"):
            if key not in data:
                raise InvalidConfig(f"missing required key {key!r}")
        data = dict(data)
        try:
            options = SolverOptions(**{k: data.pop(k) for k in opt_keys if k in data})
        except (InvalidArgument, TypeError) as exc:
            raise InvalidConfig(str(exc)) from exc
        data["scenario"] = ScenarioConfig.from_dict(data["scenario"])
        if not isinstance(data["solvers"], list):
            raise InvalidConfig("solvers must be a list")
        return cls(options=options, **data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self):
        out = {
            "id": self.id,
            "kind": self.kind,
            "scenario": self.scenario.to_dict(),
            "solvers": list(self.solvers),
            "epsilon": self.options.epsilon,
            "max_iterations": self.options.max_iterations,
            "trace_granularity": self.options.trace_granularity,
        }
        for name in ("power_grid", "m_grid", "nt_grid", "output_path"):
            if getattr(self, name) is not None:
                value = getattr(self, name)
                out[name] = list(value) if isinstance(value, tuple) else value
        return out

    def with_(self, **changes):
        return replace(self, **changes)

    def grid_points(self):
        """Ordered, de-duplicated ``(m, n_t, p_dbm)`` tuples."""
        sc = self.scenario
        if self.kind == "convergence":
            pts = [(m, sc.n_t, sc.p_dbm) for m in (self.m_grid or (sc.m,))]
        elif self.kind == "rate_vs_power":
            pts = [(sc.m, sc.n_t, p) for p in self.power_grid]
        else:
            pts = [(m, sc.n_t, sc.p_dbm) for m in (self.m_grid or ())]
            pts += [(sc.m, n, sc.p_dbm) for n in (self.nt_grid or ())]
        return list(dict.fromkeys(pts))


def no_irs_baseline(inst):
    """Secrecy rate of the best full-power beamformer on the direct links alone."""
    if inst.direct_h_l is None:
        raise InvalidArgument("instance has no direct channels")
    x = _optimal_direction(
        inst.direct_h_l, inst.direct_h_e, inst.p / inst.sigma2_l, inst.p / inst.sigma2_e
    )
    f = np.sqrt(inst.p) * x
    ratio = (1 + abs(np.vdot(inst.direct_h_l, f)) ** 2 / inst.sigma2_l) / (
        1 + abs(np.vdot(inst.direct_h_e, f)) ** 2 / inst.sigma2_e
    )
    return max(0.0, float(np.log2(ratio)))


def random_phase_baseline(inst, rng):
    """Rate with uniformly random IRS phases and the matching optimal beamformer."""
    phases = PhaseVector(rng.uniform(-np.pi, np.pi, inst.m))
    return secrecy_rate(inst, optimal_beamformer(inst, phases), phases)


def _baseline_rng(seed, trial):
    return np.random.Generator(substream(seed, trial).bit_generator.jumped())


def _run_solver(name, inst, spec, trial):
    """Returns (rate, iterations, block_updates, wall_seconds, history)."""
    if name in ("bcd", "aomm"):
        solve = solve_bcd if name == "bcd" else solve_aomm
        _, _, tr = solve(inst, spec.options)
        return tr.secrecy_rate_final, tr.iterations, tr.block_updates, tr.wall_time, tr.objective_history
    t0 = time.perf_counter()
    if name == "no_irs_baseline":
        rate = no_irs_baseline(inst)
    else:
        rate = random_phase_baseline(inst, _baseline_rng(spec.scenario.seed, trial))
    return rate, 0, 0, time.perf_counter() - t0, None


def _run_one_trial(args):
    spec, trial, record_timing, keep_traces = args
    rows, traces = [], []
    for pi, (m, n_t, p_dbm) in enumerate(spec.grid_points()):
        cfg = spec.scenario.with_(m=m, n_t=n_t, p_dbm=p_dbm)
        inst = build_instance(cfg, substream(cfg.seed, trial))
        for si, name in enumerate(spec.solvers):
            try:
                rate, iters, blocks, wall, hist = _run_solver(name, inst, spec, trial)
            except NumericalFailure:
                rate, iters, blocks, wall, hist = math.nan, 0, 0, 0.0, None
            row = ResultRow(
                experiment=spec.id,
                trial=trial,
                solver=name,
                m=m,
                n_t=n_t,
                p_dbm=_round12(float(p_dbm)),
                rate_bps_hz=_round12(rate),
                iterations=iters,
                block_updates=blocks,
                wall_ms=_round12(wall * 1e3) if record_timing else 0.0,
            )
            rows.append(((trial, pi, si), row))
            if keep_traces and hist is not None:
                traces.append(((trial, pi, si), {**asdict(row), "objective_history": list(hist)}))
    return rows, traces


def run_trials(spec, workers=1, record_timing=False, traces=None):
    """Run ``spec.scenario.trials`` paired trials and return the result rows.

    Parameters
    ----------
    spec : ExperimentSpec
    workers : int
        Number of worker processes; output does not depend on it.
    record_timing : bool
        Fill ``wall_ms``.  Off by default because wall-clock times would
        make otherwise identical runs differ byte-for-byte.
    traces : list, optional
        When given, per-solve objective histories are appended to it as
        dicts (same ordering as the rows).
    """
    jobs = [(spec, t, record_timing, traces is not None) for t in range(spec.scenario.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one_trial, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_one_trial(j) for j in jobs]
    keyed_rows = sorted((kr for rows, _ in results for kr in rows), key=lambda kr: kr[0])
    if traces is not None:
        traces.extend(t for _, t in sorted((kt for _, ts in results for kt in ts), key=lambda kt: kt[0]))
    return [row for _, row in keyed_rows]


def summarize(rows):
    """Aggregate statistics per (experiment, solver, m, n_t, p_dbm)."""
    groups = {}
    for r in rows:
        groups.setdefault((r.experiment, r.solver, r.m, r.n_t, r.p_dbm), []).append(r)
    out = []
    for (exp, solver, m, n_t, p), rs in groups.items():
        rates = [r.rate_bps_hz for r in rs if not math.isnan(r.rate_bps_hz)]
        out.append(
            {
                "experiment": exp,
                "solver": solver,
                "m": m,
                "n_t": n_t,
                "p_dbm": p,
                "trials": len(rs),
                "failures": len(rs) - len(rates),
                "mean_rate": statistics.fmean(rates) if rates else math.nan,
                "std_rate": statistics.stdev(rates) if len(rates) > 1 else 0.0,
                "mean_iterations": statistics.fmean(r.iterations for r in rs),
                "mean_block_updates": statistics.fmean(r.block_updates for r in rs),
            }
        )
    return out


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit_results(rows, fmt, path):
    """Write rows as CSV (fixed header) or JSON lines."""
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "csv":
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(CSV_HEADER)
                for r in rows:
                    w.writerow([_fmt(v) for v in astuple_row(r)])
            elif fmt in ("jsonl", "json-lines"):
                for r in rows:
                    rec = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(r).items()}
                    fh.write(json.dumps(rec, sort_keys=False) + "\n")
            else:
                raise InvalidArgument(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


_INT_FIELDS = ("trial", "m", "n_t", "iterations", "block_updates")
_FLOAT_FIELDS = ("p_dbm", "rate_bps_hz", "wall_ms")


def parse_results(path, fmt):
    """Inverse of :func:`emit_results`."""
    rows = []
    with open(path, newline="") as fh:
        if fmt == "csv":
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_HEADER:
                raise InvalidArgument(f"unexpected CSV header in {path}")
            records = list(reader)
        else:
            records = [json.loads(line) for line in fh if line.strip()]
    for rec in records:
        vals = dict(rec)
        for k in _INT_FIELDS:
            vals[k] = int(vals[k])
        for k in _FLOAT_FIELDS:
            vals[k] = math.nan if vals[k] is None else float(vals[k])
        rows.append(ResultRow(**vals))
    return rows


def _scenario(**kw):
    return ScenarioConfig(**kw)


def preset(name, seed=0, trials=200):
    """Named experiment specs encoding the published scenarios.

    The two ``fig4_*`` geometries are assumptions: ``fig4_near`` places both
    receivers closer to the transmitter than to the IRS, ``fig4_far`` the
    opposite (it reuses the fig5 distances).
    """
    common = dict(seed=seed, trials=trials, alpha=4.0, noise_l_dbm=-80.0, noise_e_dbm=-80.0)
    fig5_geom = dict(r_tr=200.0, r_rl=150.0, r_re=100.0, r_tl=300.0, r_te=110.0)
    if name == "fig3":
        return ExperimentSpec(
            id="fig3",
            kind="convergence",
            scenario=_scenario(n_t=5, m=5, p_dbm=5.0, r_tr=250.0, r_rl=160.0, r_re=160.0, **common),
            solvers=("bcd", "aomm"),
            m_grid=(5, 40),
        )
    if name in ("fig4_near", "fig4_far"):
        geom = dict(fig5_geom)
        if name == "fig4_near":
            geom.update(r_tl=120.0, r_te=90.0)
        return ExperimentSpec(
            id=name,
            kind="rate_vs_power",
            scenario=_scenario(n_t=8, m=10, p_dbm=5.0, **geom, **common),
            solvers=("bcd", "aomm", "no_irs_baseline", "random_phase_baseline"),
            power_grid=(0.0, 5.0, 10.0, 15.0, 20.0),
        )
    if name == "fig5":
        return ExperimentSpec(
            id="fig5",
            kind="sweep_m_nt",
            scenario=_scenario(n_t=10, m=10, p_dbm=5.0, **fig5_geom, **common),
            solvers=("aomm", "no_irs_baseline"),
            m_grid=(10, 20, 30, 40),
            nt_grid=(10, 20, 30, 40),
        )
    raise InvalidArgument(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


PRESETS = ("fig3", "fig4_near", "fig4_far", "fig5")
