import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irs_secrecy.bcd import PhaseCoefficients, optimal_phase_k, phase_coefficients, solve_bcd, stationary_phase
from irs_secrecy.channel import SystemInstance
from irs_secrecy.errors import InvalidArgument, NumericalFailure
from irs_secrecy.model import LEGIT, PhaseVector, effective_channel, initial_phases, objective_ratio, optimal_beamformer
from irs_secrecy.oracles import grid_phase_max, random_coefficients
from irs_secrecy.trace import SolverOptions

from .conftest import make_instance


def with_angle(phases, k, t):
    theta = phases.theta.copy()
    theta[k] = t
    return PhaseVector(theta)


# -- phase_coefficients --------------------------------------------------------


def test_single_element_has_no_angle_dependence(rng):
    inst = make_instance(rng, 1, 3)
    ph = PhaseVector.zeros(1)
    c = phase_coefficients(inst, optimal_beamformer(inst, ph), ph, 0)
    assert c.d_l == 0 and c.d_e == 0


def test_coefficients_reconstruct_objective(rng):
    for _ in range(10):
        inst = make_instance(rng, 6, 3, p=2.0, s2_e=0.4)
        ph = PhaseVector(rng.uniform(-np.pi, np.pi, 6))
        f = optimal_beamformer(inst, ph)
        k = int(rng.integers(6))
        c = phase_coefficients(inst, f, ph, k)
        for t in rng.uniform(-np.pi, np.pi, 100):
            assert float(c.ratio(t)) == pytest.approx(objective_ratio(inst, f, with_angle(ph, k, t)), rel=1e-10)


def test_silent_element_gives_zero_amplitudes(rng):
    inst = make_instance(rng, 4, 2)
    h_l, h_e = inst.h_l.copy(), inst.h_e.copy()
    h_l[2] = h_e[2] = 0
    inst = SystemInstance(inst.g, h_l, h_e, 1.0, 1.0, 1.0)
    ph = PhaseVector.zeros(4)
    c = phase_coefficients(inst, optimal_beamformer(inst, ph), ph, 2)
    assert c.d_l == 0 and c.d_e == 0


def test_coefficient_index_out_of_range(rng):
    inst = make_instance(rng, 3, 2)
    ph = PhaseVector.zeros(3)
    f = optimal_beamformer(inst, ph)
    for k in (-1, 3):
        with pytest.raises(InvalidArgument):
            phase_coefficients(inst, f, ph, k)


def test_coefficients_must_keep_denominator_positive():
    with pytest.raises(NumericalFailure):
        PhaseCoefficients(1.0, 0.5, 0.0, 0.5, 0.5, 0.0)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 8))
def test_coefficient_invariants(seed, m):
    rng = np.random.default_rng(seed)
    inst = make_instance(rng, m, 2, s2_l=float(rng.uniform(0.1, 3)))
    ph = PhaseVector(rng.uniform(-np.pi, np.pi, m))
    c = phase_coefficients(inst, optimal_beamformer(inst, ph), ph, int(rng.integers(m)))
    assert c.c_l >= 0.5 and c.c_e >= 0.5
    assert c.d_l >= 0 and c.d_e >= 0
    assert c.c_e > c.d_e


# -- optimal_phase_k -----------------------------------------------------------


def test_no_eavesdropper_dependence():
    c = PhaseCoefficients(2.0, 1.0, 0.7, 1.5, 0.0, 0.3)
    assert optimal_phase_k(c) == pytest.approx(-0.7)


def test_no_legit_dependence():
    c = PhaseCoefficients(2.0, 0.0, 0.7, 1.5, 1.0, 0.3)
    assert optimal_phase_k(c) == pytest.approx(math.pi - 0.3)


def test_constant_objective_keeps_angle():
    c = PhaseCoefficients(2.0, 0.0, 0.7, 1.5, 0.0, 0.3)
    assert optimal_phase_k(c) == 0.0
    assert optimal_phase_k(c, current=1.25) == 1.25


def test_matches_grid_oracle(rng):
    for _ in range(200):
        c = random_coefficients(rng)
        _, best = grid_phase_max(c, 100_000)
        assert float(c.ratio(optimal_phase_k(c))) >= best * (1 - 1e-9)


def test_result_wrapped(rng):
    for _ in range(200):
        t = optimal_phase_k(random_coefficients(rng), current=float(rng.uniform(-np.pi, np.pi)))
        assert -np.pi < t <= np.pi


def test_stationary_root_is_the_maximizer(rng):
    for _ in range(2000):
        c = random_coefficients(rng)
        t = stationary_phase(c)
        assert float(c.ratio(t)) == pytest.approx(float(c.ratio(optimal_phase_k(c))), rel=1e-12)


def test_single_arctan_branch_rule_matches_argmax(rng):
    # arctan(A/B) - arccos(C/R), shifted by pi when B < 0, is the argmax
    mismatches = 0
    for _ in range(10_000):
        c = random_coefficients(rng)
        a, b, cc = c.stationary_terms
        r = math.hypot(a, b)
        t = math.atan(a / b) - math.acos(max(-1.0, min(1.0, cc / r)))
        if b < 0:
            t += math.pi
        best = float(c.ratio(optimal_phase_k(c)))
        if float(c.ratio(t)) < best - 1e-12 * abs(best):
            mismatches += 1
    assert mismatches == 0


# -- solve_bcd ---------------------------------------------------------------


def test_single_element_solver(rng):
    inst = make_instance(rng, 1, 3)
    bf, ph, tr = solve_bcd(inst)
    assert tr.converged
    assert tr.iterations == 1
    closed_form = objective_ratio(inst, optimal_beamformer(inst, ph), ph)
    assert tr.objective_history[-1] == pytest.approx(closed_form, rel=1e-12)
    assert tr.block_updates == 1 + tr.iterations * 2


def test_no_eavesdropper_instance(rng):
    inst = make_instance(rng, 5, 3, p=2.0)
    inst = SystemInstance(inst.g, inst.h_l, np.zeros(5), 1.0, 1.0, 2.0)
    start = initial_phases(inst)
    init_ratio = objective_ratio(inst, optimal_beamformer(inst, start), start)
    bf, ph, tr = solve_bcd(inst, SolverOptions(epsilon=1e-12))
    assert tr.objective_history[-1] >= init_ratio
    # the phase step leaves a fixed point of max ||h^H Phi G||: check against a random search
    a_best = np.linalg.norm(effective_channel(inst, ph, LEGIT)) ** 2
    for _ in range(2000):
        trial = PhaseVector(rng.uniform(-np.pi, np.pi, 5))
        assert np.linalg.norm(effective_channel(inst, trial, LEGIT)) ** 2 <= a_best * (1 + 1e-6)
    assert tr.secrecy_rate_final == pytest.approx(math.log2(1 + inst.p * a_best), rel=1e-9)


def test_block_trace_ascends_and_counts(rng):
    for _ in range(5):
        m = int(rng.integers(2, 9))
        inst = make_instance(rng, m, 3, p=5.0, s2_e=0.2)
        opts = SolverOptions(trace_granularity="block", check_ascent=True)
        _, _, tr = solve_bcd(inst, opts)
        h = tr.block_history
        assert len(h) == tr.block_updates == 1 + tr.iterations * (m + 1)
        assert all(b >= a - 1e-10 * abs(a) for a, b in zip(h, h[1:]))
        o = tr.objective_history
        assert all(b >= a - 1e-10 * abs(a) for a, b in zip(o, o[1:]))


def test_objective_below_capacity_bound(rng):
    for _ in range(5):
        inst = make_instance(rng, 6, 3, p=3.0)
        _, _, tr = solve_bcd(inst)
        bound = 1 + inst.p * np.linalg.eigvalsh(inst.g.conj().T @ inst.g).max() * np.linalg.norm(inst.h_l) ** 2
        assert max(tr.objective_history) <= bound


def test_iteration_cap_reports_not_converged(rng):
    inst = make_instance(rng, 8, 3, p=10.0, s2_e=0.1)
    _, _, tr = solve_bcd(inst, SolverOptions(epsilon=1e-300, max_iterations=3))
    assert tr.iterations == 3
    assert not tr.converged
    assert len(tr.objective_history) == 4


def test_solver_outputs_consistent(rng):
    inst = make_instance(rng, 6, 3, p=2.0)
    bf, ph, tr = solve_bcd(inst)
    assert bf.power == pytest.approx(inst.p, rel=1e-10)
    assert np.allclose(np.abs(ph.v), 1, atol=1e-12)
    assert tr.secrecy_rate_final == pytest.approx(math.log2(objective_ratio(inst, bf, ph)), rel=1e-10)
    assert tr.objective_history[-1] == pytest.approx(objective_ratio(inst, bf, ph), rel=1e-10)
