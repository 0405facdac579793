"""Options and convergence record shared by the two solvers."""

from dataclasses import dataclass, field

from .errors import InvalidArgument, NumericalFailure

ASCENT_RTOL = 1e-10


@dataclass(frozen=True)
class SolverOptions:
    """Stopping rule and bookkeeping knobs.

    The run stops once the relative increment of the objective ratio over a
    full outer iteration falls below `epsilon`.  With
    ``trace_granularity="block"`` the ratio is also logged after every
    individual block update.  `check_ascent` raises on any block that
    decreases the objective beyond a 1e-10 relative slack.
    """

    epsilon: float = 1e-6
    max_iterations: int = 10_000
    trace_granularity: str = "outer"
    check_ascent: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidArgument("epsilon must be positive")
        if self.max_iterations < 1:
            raise InvalidArgument("max_iterations must be >= 1")
        if self.trace_granularity not in ("outer", "block"):
            raise InvalidArgument("trace_granularity must be 'outer' or 'block'")


@dataclass
class SolveTrace:
    objective_history: list = field(default_factory=list)
    block_history: list = field(default_factory=list)
    secrecy_rate_final: float = 0.0
    iterations: int = 0
    block_updates: int = 0
    converged: bool = False
    wall_time: float = 0.0


class _Recorder:
    """Counts block updates and enforces ascent when asked to."""

    def __init__(self, opts, trace):
        self.opts = opts
        self.trace = trace
        self.last = None

    @property
    def wants_values(self):
        return self.opts.check_ascent or self.opts.trace_granularity == "block"

    def count(self):
        self.trace.block_updates += 1

    def block(self, ratio, label):
        self.trace.block_updates += 1
        if self.opts.check_ascent and self.last is not None:
            if ratio < self.last - ASCENT_RTOL * abs(self.last):
                raise NumericalFailure(
                    f"objective decreased at {label}: {self.last!r} -> {ratio!r}",
                    residual=self.last - ratio,
                )
        if self.opts.trace_granularity == "block":
            self.trace.block_history.append(ratio)
        self.last = ratio
