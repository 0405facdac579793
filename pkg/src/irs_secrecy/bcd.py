"""Element-wise block coordinate ascent.

One outer iteration updates the beamformer in closed form and then sweeps
the M phases in ascending order, each set to the global maximizer of the
objective restricted to that single angle.
"""

import cmath
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericalFailure
from .model import Beamformer, PhaseVector, _Workspace, initial_phases, secrecy_rate
from .trace import SolverOptions, SolveTrace, _Recorder

ARCCOS_SLACK = 1e-9


@dataclass(frozen=True)
class PhaseCoefficients:
    """Objective restricted to one angle: ``(c_l + d_l cos(t + p_l)) / (c_e + d_e cos(t + p_e))``."""

    c_l: float
    d_l: float
    p_l: float
    c_e: float
    d_e: float
    p_e: float

    def __post_init__(self):
        if not self.c_e > self.d_e >= 0 or not self.c_l > 0 or not self.d_l >= 0:
            raise NumericalFailure(f"invalid per-element coefficients {self}")

    def ratio(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (self.c_l + self.d_l * np.cos(theta + self.p_l)) / (
            self.c_e + self.d_e * np.cos(theta + self.p_e)
        )

    @property
    def stationary_terms(self):
        """``(A, B, C)`` of the stationarity condition ``A sin t + B cos t = C``."""
        a = self.c_e * self.d_l * np.cos(self.p_l) - self.c_l * self.d_e * np.cos(self.p_e)
        b = self.c_e * self.d_l * np.sin(self.p_l) - self.c_l * self.d_e * np.sin(self.p_e)
        c = self.d_l * self.d_e * np.sin(self.p_e - self.p_l)
        return float(a), float(b), float(c)


def _coefficients(a_l, b_l, a_e, b_e, s2_l, s2_e):
    # a: the k-th term without its phase factor, b: the sum over the other elements
    out = []
    for a, b, s2 in ((a_l, b_l, s2_l), (a_e, b_e, s2_e)):
        cross = complex(a) * complex(b).conjugate()
        out.append((0.5 * (1 + (abs(a) ** 2 + abs(b) ** 2) / s2), abs(cross) / s2, cmath.phase(cross)))
    return out


def _terms(inst, f, theta):
    gf = inst.g @ np.asarray(f)
    return np.conj(inst.h_l) * gf, np.conj(inst.h_e) * gf, np.exp(1j * np.asarray(theta))


def phase_coefficients(inst, f, phases, k):
    """Per-element coefficients for the (0-based) element `k`."""
    if not 0 <= k < inst.m:
        raise InvalidArgument(f"element index {k} out of range for M={inst.m}")
    f = getattr(f, "f", f)
    z_l, z_e, e = _terms(inst, f, phases.theta)
    b_l = np.dot(e, z_l) - e[k] * z_l[k]
    b_e = np.dot(e, z_e) - e[k] * z_e[k]
    (c_l, d_l, p_l), (c_e, d_e, p_e) = _coefficients(z_l[k], b_l, z_e[k], b_e, inst.sigma2_l, inst.sigma2_e)
    return PhaseCoefficients(c_l, d_l, p_l, c_e, d_e, p_e)


def _wrap(t):
    return math.pi - (math.pi - t) % (2 * math.pi)


def _best_angle(c_l, d_l, p_l, c_e, d_e, p_e, current):
    if d_l == 0 and d_e == 0:
        return current
    if d_e == 0:
        return _wrap(-p_l)
    if d_l == 0:
        return _wrap(math.pi - p_e)
    a = c_e * d_l * math.cos(p_l) - c_l * d_e * math.cos(p_e)
    b = c_e * d_l * math.sin(p_l) - c_l * d_e * math.sin(p_e)
    r = math.hypot(a, b)
    if r == 0:
        return current
    q = d_l * d_e * math.sin(p_e - p_l) / r
    if abs(q) > 1 + ARCCOS_SLACK:
        raise NumericalFailure(f"arccos argument {q!r} outside [-1, 1]")
    base = math.atan2(a, b)
    spread = math.acos(min(1.0, max(-1.0, q)))

    def ratio(t):
        return (c_l + d_l * math.cos(t + p_l)) / (c_e + d_e * math.cos(t + p_e))

    best = max((base - spread, base + spread), key=ratio)
    if ratio(current) > ratio(best):
        return current
    return _wrap(best)


def stationary_phase(coeffs):
    """Stationary angle ``atan2(A, B) - arccos(C / sqrt(A^2 + B^2))``.

    This root is the maximizer; its mirror ``atan2(A, B) + arccos(...)`` is
    the minimizer.  Returns None when A = B = 0 (constant objective).
    """
    a, b, c = coeffs.stationary_terms
    r = np.hypot(a, b)
    if r == 0:
        return None
    q = c / r
    if abs(q) > 1 + ARCCOS_SLACK:
        raise NumericalFailure(f"arccos argument {q!r} outside [-1, 1]")
    return float(np.arctan2(a, b) - np.arccos(np.clip(q, -1.0, 1.0)))


def optimal_phase_k(coeffs, current=0.0):
    """Global maximizer of the single-angle objective, wrapped to (-pi, pi].

    Both stationary roots are evaluated and the better one is kept, so no
    branch rule has to be trusted.  When the objective does not depend on
    the angle, `current` is returned unchanged.
    """
    c = coeffs
    return float(_best_angle(c.c_l, c.d_l, c.p_l, c.c_e, c.d_e, c.p_e, float(current)))


def solve_bcd(inst, opts=None, phases=None):
    """Alternate the closed-form beamformer with element-wise phase sweeps.

    Parameters
    ----------
    inst : SystemInstance
    opts : SolverOptions, optional
    phases : PhaseVector, optional
        Starting point; defaults to :func:`initial_phases`.

    Returns
    -------
    (Beamformer, PhaseVector, SolveTrace)
        When the iteration cap is reached the last (and best) iterate is
        returned with ``trace.converged = False``.
    """
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    trace = SolveTrace()
    rec = _Recorder(opts, trace)
    ws = _Workspace(inst)
    theta = [float(t) for t in (phases or initial_phases(inst)).theta]
    s2_l, s2_e = inst.sigma2_l, inst.sigma2_e
    per_block = rec.wants_values

    f, g = ws.beamformer(np.exp(-1j * np.array(theta)))
    rec.block(g, "initial beamformer")
    trace.objective_history.append(g)

    for it in range(1, opts.max_iterations + 1):
        z_l, z_e, e = _terms(inst, f, theta)
        s_l, s_e = complex(np.dot(e, z_l)), complex(np.dot(e, z_e))
        z_l, z_e, e = z_l.tolist(), z_e.tolist(), e.tolist()
        for k in range(inst.m):
            zl, ze, ek = z_l[k], z_e[k], e[k]
            b_l = s_l - ek * zl
            b_e = s_e - ek * ze
            (c_l, d_l, p_l), (c_e, d_e, p_e) = _coefficients(zl, b_l, ze, b_e, s2_l, s2_e)
            theta[k] = _best_angle(c_l, d_l, p_l, c_e, d_e, p_e, theta[k])
            ek = cmath.exp(1j * theta[k])
            s_l = b_l + ek * zl
            s_e = b_e + ek * ze
            if per_block:
                rec.block((1 + abs(s_l) ** 2 / s2_l) / (1 + abs(s_e) ** 2 / s2_e), f"phase {k}")
            else:
                rec.count()
        f, g_new = ws.beamformer(np.exp(-1j * np.array(theta)))
        rec.block(g_new, "beamformer")
        trace.objective_history.append(g_new)
        trace.iterations = it
        if (g_new - g) / g < opts.epsilon:
            trace.converged = True
            break
        g = g_new

    phases = PhaseVector(theta)
    bf = Beamformer(f)
    trace.secrecy_rate_final = secrecy_rate(inst, bf, phases)
    trace.wall_time = time.perf_counter() - t0
    return bf, phases, trace
