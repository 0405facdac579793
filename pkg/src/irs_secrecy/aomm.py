"""Alternating optimization with a minorization-maximization phase step.

The whole reflection vector is one block: a tangent lower bound of the
quadratic-form ratio is maximized in closed form by a phase extraction.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np

from .model import Beamformer, PhaseVector, _Workspace, initial_phases, secrecy_rate
from .trace import SolverOptions, SolveTrace, _Recorder

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MMState:
    v_z: np.ndarray
    w: np.ndarray
    lambda_max_ye: float


def quadratic_ratio(v, forms):
    """``g(v) = v^H Y_l v / v^H Y_e v``."""
    return float(np.real(np.vdot(v, forms.y_l @ v)) / np.real(np.vdot(v, forms.y_e @ v)))


def surrogate_value(v, v_z, forms):
    """Minorizer of :func:`quadratic_ratio` around `v_z`, up to an additive constant.

    ``surrogate_value(v, v_z) + [g(v_z) - surrogate_value(v_z, v_z)]`` lower
    bounds ``g(v)`` and touches it at ``v = v_z``.
    """
    lam = forms.lambda_max_ye
    num = np.real(np.vdot(v_z, forms.y_l @ v_z))
    den = np.real(np.vdot(v_z, forms.y_e @ v_z))
    curv = forms.y_e - lam * np.eye(len(v_z))
    linear = 2 * np.real(np.vdot(v_z, forms.y_l @ v)) / den
    quad = lam * np.real(np.vdot(v, v)) + 2 * np.real(np.vdot(v_z, curv @ v))
    return float(linear - num / den**2 * quad)


def mm_direction(forms, v_z):
    """Direction ``w`` whose phases maximize the surrogate over unit-modulus vectors."""
    v_z = np.asarray(v_z, dtype=complex)
    lam = forms.lambda_max_ye
    yl_v = forms.y_l @ v_z
    ye_v = forms.y_e @ v_z
    num = np.real(np.vdot(v_z, yl_v))
    den = np.real(np.vdot(v_z, ye_v))
    w = yl_v / den - (num / den**2) * (ye_v - lam * v_z)
    return MMState(v_z=v_z, w=w, lambda_max_ye=lam)


def mm_phase_update(state):
    """Unit-modulus maximizer of ``Re(w^H v)``; zero entries of w keep their old phase."""
    w = state.w
    zero = w == 0
    if np.any(zero):
        log.debug("w has %d zero entries; keeping previous phases there", int(zero.sum()))
    return np.where(zero, state.v_z, np.exp(1j * np.angle(w)))


def _mm_step(q_l, q_e, s2_l, s2_e, v):
    # same update as mm_direction + mm_phase_update, using Y_i = I/M + q_i q_i^H / s_i
    m = v.size
    ylv = v / m + q_l * (np.vdot(q_l, v) / s2_l)
    yev = v / m + q_e * (np.vdot(q_e, v) / s2_e)
    num = np.vdot(v, ylv).real
    den = np.vdot(v, yev).real
    lam = 1.0 / m + np.vdot(q_e, q_e).real / s2_e
    w = ylv / den - (num / den**2) * (yev - lam * v)
    if np.all(w != 0):
        return np.exp(1j * np.angle(w))
    return mm_phase_update(MMState(v_z=v, w=w, lambda_max_ye=lam))


def solve_aomm(inst, opts=None, phases=None):
    """Alternate the closed-form beamformer with single MM phase steps.

    Same calling convention and stopping rule as :func:`irs_secrecy.bcd.solve_bcd`.
    """
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    trace = SolveTrace()
    rec = _Recorder(opts, trace)
    ws = _Workspace(inst)
    v = (phases or initial_phases(inst)).v
    hl_c, he_c = np.conj(inst.h_l), np.conj(inst.h_e)

    f, g = ws.beamformer(v)
    rec.block(g, "initial beamformer")
    trace.objective_history.append(g)

    for it in range(1, opts.max_iterations + 1):
        gf = inst.g @ f
        v = _mm_step(hl_c * gf, he_c * gf, inst.sigma2_l, inst.sigma2_e, v)
        if rec.wants_values:
            rec.block(ws.ratio(f, v), "mm phase step")
        else:
            rec.count()
        f, g_new = ws.beamformer(v)
        rec.block(g_new, "beamformer")
        trace.objective_history.append(g_new)
        trace.iterations = it
        if (g_new - g) / g < opts.epsilon:
            trace.converged = True
            break
        g = g_new

    phases = PhaseVector.from_v(v)
    bf = Beamformer(f)
    trace.secrecy_rate_final = secrecy_rate(inst, bf, phases)
    trace.wall_time = time.perf_counter() - t0
    return bf, phases, trace
