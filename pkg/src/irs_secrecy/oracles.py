"""Brute-force reference computations.

These deliberately take a different route from the library code (grid
search, random search, nonsymmetric dense eigensolves) and are used by the
test suite and by ``irs-secrecy oracle``.
"""

import numpy as np

from .bcd import PhaseCoefficients, optimal_phase_k
from .channel import ScenarioConfig, build_instance, substream
from .model import PhaseVector, build_x, objective_ratio, optimal_beamformer


def grid_phase_max(coeffs, points=100_000):
    """Best value of the single-angle ratio on a uniform grid over [-pi, pi)."""
    grid = np.linspace(-np.pi, np.pi, points, endpoint=False)
    vals = coeffs.ratio(grid)
    i = int(np.argmax(vals))
    return float(grid[i]), float(vals[i])


def dense_top_eigenvalue(A):
    """Largest real part among the eigenvalues of a general dense matrix."""
    return float(np.max(np.linalg.eigvals(np.asarray(A, dtype=complex)).real))


def dense_generalized_top(A, B):
    """Top eigenvalue of ``B^{-1} A`` via a nonsymmetric eigensolve."""
    return dense_top_eigenvalue(np.linalg.solve(B, A))


def random_unit_vectors(rng, n, count):
    z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_beamformer_best(inst, phases, rng, count=10_000):
    """Best objective ratio over `count` random full-power beamformers."""
    f = np.sqrt(inst.p) * random_unit_vectors(rng, inst.n_t, count)
    a_l = (inst.g.conj().T @ (phases.v * inst.h_l)).conj()
    a_e = (inst.g.conj().T @ (phases.v * inst.h_e)).conj()
    num = 1 + np.abs(f @ a_l) ** 2 / inst.sigma2_l
    den = 1 + np.abs(f @ a_e) ** 2 / inst.sigma2_e
    return float(np.max(num / den))


def random_coefficients(rng):
    """Random valid per-element coefficients, built from complex amplitudes."""
    out = []
    for _ in range(2):
        s2 = 10 ** rng.uniform(-2, 1)
        a = complex(*rng.standard_normal(2))
        b = complex(*rng.standard_normal(2)) * 10 ** rng.uniform(-1, 1)
        cross = a * b.conjugate()
        out += [0.5 * (1 + (abs(a) ** 2 + abs(b) ** 2) / s2), abs(cross) / s2, float(np.angle(cross))]
    c_l, d_l, p_l, c_e, d_e, p_e = out
    return PhaseCoefficients(c_l, d_l, p_l, c_e, d_e, p_e)


def random_instance(rng_seed, m, n_t, p_dbm=5.0):
    cfg = ScenarioConfig(n_t=n_t, m=m, p_dbm=p_dbm, r_tr=100.0, r_rl=60.0, r_re=60.0, r_tl=150.0, r_te=150.0)
    return build_instance(cfg, substream(rng_seed))


def reference_tables(seed=0, count=50):
    """Worst-case gaps between closed forms and brute-force references."""
    rng = np.random.default_rng(seed)
    phase_gap = 0.0
    for _ in range(count):
        c = random_coefficients(rng)
        _, best = grid_phase_max(c)
        phase_gap = max(phase_gap, (best - float(c.ratio(optimal_phase_k(c)))) / best)
    bf_gap = eig_gap = 0.0
    for i in range(count):
        m, n_t = int(rng.integers(1, 9)), int(rng.integers(1, 5))
        inst = random_instance(seed * 100_003 + i, m, n_t)
        ph = PhaseVector(rng.uniform(-np.pi, np.pi, m))
        f = optimal_beamformer(inst, ph)
        ratio = objective_ratio(inst, f, ph)
        best = random_beamformer_best(inst, ph, rng, 2_000)
        bf_gap = max(bf_gap, (best - ratio) / best)
        top = dense_generalized_top(build_x(inst, ph, "legit"), build_x(inst, ph, "eaves"))
        eig_gap = max(eig_gap, abs(top - ratio) / top)
    return [
        ("single-phase closed form vs 1e5-point grid (rel. shortfall)", count, phase_gap),
        ("beamformer vs random full-power search (rel. shortfall)", count, bf_gap),
        ("beamformer ratio vs dense B^-1 A eigenvalue (rel. error)", count, eig_gap),
    ]
