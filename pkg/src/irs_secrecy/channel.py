"""Random channel realizations: Rayleigh fading with distance path loss.

Randomness comes from numpy's Philox4x64-10 counter-based generator.  Trial
``t`` of a run seeded with ``s`` uses the Philox key ``s ^ t``; normals are
drawn with ``Generator.standard_normal``.  Powers are kept in linear mW.
"""

import json
import math
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np

from .errors import InvalidArgument, InvalidConfig

REFERENCE_DISTANCE_M = 10.0
SEED_MASK = (1 << 64) - 1


def dbm_to_linear(x_dbm):
    """Convert dBm to milliwatts."""
    return 10.0 ** (x_dbm / 10.0)


def path_loss_gain(d_meters, alpha):
    """Power gain ``(d / 10 m) ** -alpha``; unity at the reference distance."""
    if not d_meters > 0:
        raise InvalidArgument(f"distance must be positive, got {d_meters}")
    return (d_meters / REFERENCE_DISTANCE_M) ** (-alpha)


def substream(seed, trial=0):
    """Independent generator for one trial."""
    key = (int(seed) ^ int(trial)) & SEED_MASK
    return np.random.Generator(np.random.Philox(key=key))


def sample_rayleigh(rng, rows, cols, gain):
    """i.i.d. CN(0, gain) entries, shape ``(rows, cols)``."""
    if gain < 0:
        raise InvalidArgument(f"gain must be nonnegative, got {gain}")
    z = rng.standard_normal((rows, cols, 2))
    return math.sqrt(gain / 2.0) * (z[..., 0] + 1j * z[..., 1])


@dataclass(frozen=True)
class ScenarioConfig:
    n_t: int
    m: int
    p_dbm: float
    noise_l_dbm: float = -80.0
    noise_e_dbm: float = -80.0
    alpha: float = 4.0
    r_tr: float = 250.0
    r_rl: float = 160.0
    r_re: float = 160.0
    r_tl: Optional[float] = None
    r_te: Optional[float] = None
    seed: int = 0
    trials: int = 200

    def __post_init__(self):
        for name in ("n_t", "m", "trials"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InvalidConfig(f"{name} must be a positive integer, got {v!r}")
        for name in ("p_dbm", "noise_l_dbm", "noise_e_dbm"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidConfig(f"{name} must be finite")
        if not self.alpha > 0:
            raise InvalidConfig("alpha must be positive")
        for name in ("r_tr", "r_rl", "r_re", "r_tl", "r_te"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidConfig(f"{name} must be positive, got {v}")
        if (self.r_tl is None) != (self.r_te is None):
            raise InvalidConfig("r_tl and r_te must be given together")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= SEED_MASK:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")

    @property
    def has_direct_links(self):
        return self.r_tl is not None

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidConfig("scenario must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidConfig(f"unknown scenario keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class SystemInstance:
    """One channel realization together with noise levels and power budget."""

    g: np.ndarray
    h_l: np.ndarray
    h_e: np.ndarray
    sigma2_l: float
    sigma2_e: float
    p: float
    direct_h_l: Optional[np.ndarray] = None
    direct_h_e: Optional[np.ndarray] = None

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex)
        if g.ndim != 2:
            raise InvalidArgument("g must be an M x N_t matrix")
        m, n_t = g.shape
        object.__setattr__(self, "g", g)
        for name, n in (("h_l", m), ("h_e", m), ("direct_h_l", n_t), ("direct_h_e", n_t)):
            v = getattr(self, name)
            if v is None:
                continue
            v = np.asarray(v, dtype=complex).ravel()
            if v.shape != (n,):
                raise InvalidArgument(f"{name} must have length {n}, got {v.shape}")
            object.__setattr__(self, name, v)
        if (self.direct_h_l is None) != (self.direct_h_e is None):
            raise InvalidArgument("direct channels must be given together")
        for name in ("sigma2_l", "sigma2_e", "p"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be strictly positive")

    @property
    def m(self):
        return self.g.shape[0]

    @property
    def n_t(self):
        return self.g.shape[1]

    def __eq__(self, other):
        if not isinstance(other, SystemInstance):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is b
            return a.shape == b.shape and bool(np.all(a == b))

        return (
            same(self.g, other.g)
            and same(self.h_l, other.h_l)
            and same(self.h_e, other.h_e)
            and same(self.direct_h_l, other.direct_h_l)
            and same(self.direct_h_e, other.direct_h_e)
            and (self.sigma2_l, self.sigma2_e, self.p) == (other.sigma2_l, other.sigma2_e, other.p)
        )


def build_instance(cfg, rng):
    """Draw G, h_l, h_e (and the direct links, when configured) in that order."""
    m, n_t = cfg.m, cfg.n_t
    g = sample_rayleigh(rng, m, n_t, path_loss_gain(cfg.r_tr, cfg.alpha))
    h_l = sample_rayleigh(rng, m, 1, path_loss_gain(cfg.r_rl, cfg.alpha)).ravel()
    h_e = sample_rayleigh(rng, m, 1, path_loss_gain(cfg.r_re, cfg.alpha)).ravel()
    direct_l = direct_e = None
    if cfg.has_direct_links:
        direct_l = sample_rayleigh(rng, n_t, 1, path_loss_gain(cfg.r_tl, cfg.alpha)).ravel()
        direct_e = sample_rayleigh(rng, n_t, 1, path_loss_gain(cfg.r_te, cfg.alpha)).ravel()
    return SystemInstance(
        g=g,
        h_l=h_l,
        h_e=h_e,
        sigma2_l=dbm_to_linear(cfg.noise_l_dbm),
        sigma2_e=dbm_to_linear(cfg.noise_e_dbm),
        p=dbm_to_linear(cfg.p_dbm),
        direct_h_l=direct_l,
        direct_h_e=direct_e,
    )
