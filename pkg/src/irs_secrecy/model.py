"""Secrecy-rate objective and the closed-form pieces shared by both solvers.

Phase convention: the IRS applies ``Phi = diag(exp(1j * theta))`` and the
reflection vector is ``v = exp(-1j * theta)``, so that
``h^H Phi G == v^H R`` with ``R = diag(h^H) G``.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .numerics import canonical_phase, dominant_left_singular, generalized_dominant_eigpair

log = logging.getLogger(__name__)

LEGIT = "legit"
EAVES = "eaves"


def wrap_phase(theta):
    """Map angles into (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    return np.pi - np.mod(np.pi - theta, 2 * np.pi)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    theta: np.ndarray

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if theta.ndim != 1 or not np.all(np.isfinite(theta)):
            raise InvalidArgument("theta must be a finite 1-D array")
        object.__setattr__(self, "theta", wrap_phase(theta))

    @classmethod
    def zeros(cls, m):
        return cls(np.zeros(m))

    @classmethod
    def from_v(cls, v):
        return cls(-np.angle(v))

    @property
    def m(self):
        return self.theta.size

    @property
    def v(self):
        return np.exp(-1j * self.theta)

    @property
    def phi(self):
        return np.diag(np.exp(1j * self.theta))


@dataclass(frozen=True, eq=False)
class Beamformer:
    f: np.ndarray

    @property
    def power(self):
        return float(np.real(np.vdot(self.f, self.f)))


@dataclass(frozen=True, eq=False)
class QuadraticForms:
    y_l: np.ndarray
    y_e: np.ndarray
    r_l: np.ndarray
    r_e: np.ndarray
    # lambda_max(Y_e) from the rank-one-plus-identity structure
    lambda_max_ye: float


def _pick(inst, which):
    if which == LEGIT:
        return inst.h_l, inst.sigma2_l
    if which == EAVES:
        return inst.h_e, inst.sigma2_e
    raise InvalidArgument(f"which must be {LEGIT!r} or {EAVES!r}, got {which!r}")


def _f(f):
    return f.f if isinstance(f, Beamformer) else np.asarray(f, dtype=complex)


def cascade_matrix(inst, which):
    """``R_i = diag(h_i^H) G``."""
    h, _ = _pick(inst, which)
    return np.conj(h)[:, None] * inst.g


def effective_channel(inst, phases, which):
    """Column vector ``(h_i^H Phi G)^H`` of length N_t."""
    if phases.m != inst.m:
        raise InvalidArgument(f"phase vector has {phases.m} entries, instance has M={inst.m}")
    h, _ = _pick(inst, which)
    return inst.g.conj().T @ (np.exp(-1j * phases.theta) * h)


def objective_ratio(inst, f, phases):
    """Raw SNR ratio ``(1 + |h_l^H Phi G f|^2/s_l) / (1 + |h_e^H Phi G f|^2/s_e)``."""
    f = _f(f)
    if f.shape != (inst.n_t,):
        raise InvalidArgument(f"beamformer must have length {inst.n_t}")
    gl = np.vdot(effective_channel(inst, phases, LEGIT), f)
    ge = np.vdot(effective_channel(inst, phases, EAVES), f)
    return float((1 + abs(gl) ** 2 / inst.sigma2_l) / (1 + abs(ge) ** 2 / inst.sigma2_e))


def secrecy_rate(inst, f, phases):
    """Secrecy rate in bits/s/Hz, clamped at zero."""
    return max(0.0, float(np.log2(objective_ratio(inst, f, phases))))


def build_x(inst, phases, which):
    """``X_i = I + (P / s_i) a_i a_i^H`` with ``a_i`` the effective channel."""
    _, s2 = _pick(inst, which)
    a = effective_channel(inst, phases, which)
    return np.eye(inst.n_t) + (inst.p / s2) * np.outer(a, a.conj())


def build_quadratic_forms(inst, f):
    """Matrices Y_l, Y_e such that the objective equals ``v^H Y_l v / v^H Y_e v``.

    `f` is the actual full-power beamformer, so the rank-one term carries
    ``1 / s_i`` only; this keeps the quadratic-form ratio equal to
    :func:`objective_ratio` for every unit-modulus ``v``.
    """
    f = _f(f)
    m = inst.m
    out = {}
    for which in (LEGIT, EAVES):
        _, s2 = _pick(inst, which)
        r = cascade_matrix(inst, which)
        q = r @ f
        out[which] = (r, q, np.eye(m) / m + np.outer(q, q.conj()) / s2, s2)
    r_l, _, y_l, _ = out[LEGIT]
    r_e, q_e, y_e, s2_e = out[EAVES]
    lam = 1.0 / m + float(np.real(np.vdot(q_e, q_e))) / s2_e
    return QuadraticForms(y_l=y_l, y_e=y_e, r_l=r_l, r_e=r_e, lambda_max_ye=lam)


def _reduced_generalized(a_l, a_e, gamma_l, gamma_e, nl2, ne2):
    """Dominant generalized eigenvector of (I + g_l a_l a_l^H, I + g_e a_e a_e^H).

    The maximizer lies in span{a_l, a_e}.  In the orthonormal basis
    (a_l / |a_l|, q2) the first matrix is diag(alpha, 1), and the 2 x 2 pencil
    is solved through its characteristic quadratic.  Returns None when the
    span is not two-dimensional.
    """
    q1 = a_l / np.sqrt(nl2)
    e1 = complex(np.vdot(q1, a_e))
    r = a_e - e1 * q1
    e2 = float(np.sqrt(np.vdot(r, r).real))
    if e2 <= 1e-10 * np.sqrt(ne2):
        return None
    q2 = r / e2
    alpha = 1.0 + gamma_l * nl2
    b11 = 1.0 + gamma_e * abs(e1) ** 2
    b22 = 1.0 + gamma_e * e2**2
    b12 = gamma_e * e1 * e2  # e2 is real
    det_b = b11 * b22 - abs(b12) ** 2
    s = alpha * b22 + b11
    lam = (s + np.sqrt(max(s * s - 4.0 * alpha * det_b, 0.0))) / (2.0 * det_b)
    # null vector of (A - lam B) from whichever row is larger
    y_top = (lam * b12, alpha - lam * b11)
    y_bot = (1.0 - lam * b22, lam * b12.conjugate())
    n_top = abs(y_top[0]) ** 2 + abs(y_top[1]) ** 2
    n_bot = abs(y_bot[0]) ** 2 + abs(y_bot[1]) ** 2
    y = y_top if n_top >= n_bot else y_bot
    if max(n_top, n_bot) == 0:
        return None
    return y[0] * q1 + y[1] * q2


def _optimal_direction(a_l, a_e, gamma_l, gamma_e):
    """Unit-norm maximizer of ``(1 + g_l |a_l^H x|^2) / (1 + g_e |a_e^H x|^2)``."""
    n_t = a_l.size
    nl2 = np.vdot(a_l, a_l).real
    ne2 = np.vdot(a_e, a_e).real
    x = None
    if n_t == 1:
        x = np.ones(1, dtype=complex)
    elif nl2 > 0 and ne2 > 0:
        x = _reduced_generalized(a_l, a_e, gamma_l, gamma_e, nl2, ne2)
    if x is None:
        x_l = np.eye(n_t) + gamma_l * np.outer(a_l, a_l.conj())
        x_e = np.eye(n_t) + gamma_e * np.outer(a_e, a_e.conj())
        x = generalized_dominant_eigpair(x_l, x_e).vector
    return canonical_phase(x / np.sqrt(np.vdot(x, x).real))


def optimal_beamformer(inst, phases):
    """Full-power beamformer maximizing the objective for fixed phases.

    The dominant generalized eigenvector of ``(X_l, X_e)`` lies in the span
    of the two effective channels, so only a 2 x 2 pencil is solved; the
    dense N_t x N_t route is used when that span collapses.
    """
    a_l = effective_channel(inst, phases, LEGIT)
    a_e = effective_channel(inst, phases, EAVES)
    x = _optimal_direction(a_l, a_e, inst.p / inst.sigma2_l, inst.p / inst.sigma2_e)
    return Beamformer(np.sqrt(inst.p) * x)


def initial_phases(inst):
    """Align ``v`` with the dominant left singular vector of ``R_l``."""
    r_l = cascade_matrix(inst, LEGIT)
    if not np.any(r_l):
        log.warning("R_l is zero; starting from all-zero phases")
        return PhaseVector.zeros(inst.m)
    u = dominant_left_singular(r_l)
    # exact zeros in u carry no phase information; keep theta = 0 there
    return PhaseVector(np.where(np.abs(u) > 0, -np.angle(u), 0.0))


class _Workspace:
    """Per-instance precomputations for the solver inner loops.

    Works directly on the reflection vector ``v`` and skips the validation
    done by the public functions.
    """

    def __init__(self, inst):
        self.inst = inst
        self.gh = inst.g.conj().T
        self.h_l, self.h_e = inst.h_l, inst.h_e
        self.s2_l, self.s2_e = inst.sigma2_l, inst.sigma2_e
        self.gamma_l = inst.p / inst.sigma2_l
        self.gamma_e = inst.p / inst.sigma2_e
        self.sqrt_p = np.sqrt(inst.p)

    def ratio(self, f, v):
        gf = self.inst.g @ f
        gl = np.vdot(v * self.h_l, gf)
        ge = np.vdot(v * self.h_e, gf)
        return float((1 + abs(gl) ** 2 / self.s2_l) / (1 + abs(ge) ** 2 / self.s2_e))

    def beamformer(self, v):
        a_l = self.gh @ (v * self.h_l)
        a_e = self.gh @ (v * self.h_e)
        f = self.sqrt_p * _optimal_direction(a_l, a_e, self.gamma_l, self.gamma_e)
        gl, ge = np.vdot(a_l, f), np.vdot(a_e, f)
        return f, float((1 + abs(gl) ** 2 / self.s2_l) / (1 + abs(ge) ** 2 / self.s2_e))
