import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irs_secrecy.aomm import (
    MMState,
    _mm_step,
    mm_direction,
    mm_phase_update,
    quadratic_ratio,
    solve_aomm,
    surrogate_value,
)
from irs_secrecy.bcd import solve_bcd
from irs_secrecy.model import PhaseVector, QuadraticForms, build_quadratic_forms, objective_ratio, optimal_beamformer
from irs_secrecy.numerics import dominant_eigpair
from irs_secrecy.trace import SolverOptions

from .conftest import crandn, make_instance, unit_modulus


def random_forms(rng, m, n_t=3, s2_l=None, s2_e=None):
    inst = make_instance(
        rng,
        m,
        n_t,
        p=float(10 ** rng.uniform(-1, 1)),
        s2_l=s2_l or float(10 ** rng.uniform(-1, 1)),
        s2_e=s2_e or float(10 ** rng.uniform(-1, 1)),
    )
    f = crandn(rng, n_t)
    f *= np.sqrt(inst.p) / np.linalg.norm(f)
    return inst, f, build_quadratic_forms(inst, f)


def bound_slack(v, v_z, forms):
    const = quadratic_ratio(v_z, forms) - surrogate_value(v_z, v_z, forms)
    return quadratic_ratio(v, forms) - (surrogate_value(v, v_z, forms) + const)


def identity_forms(m):
    eye = np.eye(m) / m
    zero = np.zeros((m, 1))
    return QuadraticForms(y_l=eye, y_e=eye, r_l=zero, r_e=zero, lambda_max_ye=1 / m)


# -- surrogate -----------------------------------------------------------------


def test_surrogate_touches_at_expansion_point(rng):
    for _ in range(50):
        _, _, forms = random_forms(rng, 6)
        v_z = unit_modulus(rng, 6)
        assert bound_slack(v_z, v_z, forms) == pytest.approx(0.0, abs=1e-12)


def test_surrogate_lower_bounds_objective(rng):
    for _ in range(300):
        m = int(rng.integers(1, 12))
        _, _, forms = random_forms(rng, m)
        slack = bound_slack(unit_modulus(rng, m), unit_modulus(rng, m), forms)
        assert slack >= -1e-9


def test_surrogate_affine_when_eavesdropper_form_is_scaled_identity(rng):
    m = 5
    _, _, forms = random_forms(rng, m)
    forms = QuadraticForms(forms.y_l, np.eye(m) / m, forms.r_l, forms.r_e, 1 / m)
    v_z = unit_modulus(rng, m)
    den = 1.0  # v^H (I/M) v for unit-modulus v
    for _ in range(20):
        v = unit_modulus(rng, m)
        affine = 2 * np.real(np.vdot(v_z, forms.y_l @ v)) / den - quadratic_ratio(v_z, forms) * np.vdot(v, v).real / m
        assert surrogate_value(v, v_z, forms) == pytest.approx(affine, abs=1e-12)


# -- mm_direction ----------------------------------------------------------------


def test_direction_symmetric_case(rng):
    v_z = unit_modulus(rng, 4)
    st_ = mm_direction(identity_forms(4), v_z)
    # v^H (I/M) v = 1 on the unit-modulus set and Y_e - lambda I = 0, so w = v_z / M
    assert np.allclose(st_.w, v_z / 4, atol=1e-12)
    assert np.allclose(mm_phase_update(st_), v_z, atol=1e-12)


def test_lambda_for_zero_beamformer(rng):
    inst = make_instance(rng, 7, 2)
    forms = build_quadratic_forms(inst, np.zeros(2))
    assert forms.lambda_max_ye == 1 / 7


def test_lambda_cross_checked_with_eigensolver(rng):
    for _ in range(20):
        _, _, forms = random_forms(rng, 6)
        st_ = mm_direction(forms, unit_modulus(rng, 6))
        assert st_.lambda_max_ye == pytest.approx(dominant_eigpair(forms.y_e).value, rel=1e-10)
        assert st_.lambda_max_ye >= 1 / 6


def test_direction_is_surrogate_gradient(rng):
    # the surrogate is linear in v except for lambda*v^H v, which is constant on the
    # unit-modulus set, so its phase derivatives are Re(2 * conj(w_k) * (1j v_k))
    for _ in range(20):
        m = int(rng.integers(2, 9))
        _, _, forms = random_forms(rng, m)
        v_z = unit_modulus(rng, m)
        w = mm_direction(forms, v_z).w
        h = 1e-6
        for k in range(m):
            plus, minus = v_z.copy(), v_z.copy()
            plus[k] *= np.exp(1j * h)
            minus[k] *= np.exp(-1j * h)
            fd = (surrogate_value(plus, v_z, forms) - surrogate_value(minus, v_z, forms)) / (2 * h)
            analytic = 2 * np.real(np.conj(w[k]) * 1j * v_z[k])
            assert fd == pytest.approx(analytic, abs=1e-6 * max(1.0, np.abs(w).max()))


def test_curvature_negative_semidefinite(rng):
    for _ in range(20):
        _, _, forms = random_forms(rng, 6)
        curv = forms.y_e - forms.lambda_max_ye * np.eye(6)
        assert np.linalg.eigvalsh(curv).max() <= 1e-9


# -- mm_phase_update -------------------------------------------------------------


def test_positive_direction_gives_ones(rng):
    v = mm_phase_update(MMState(v_z=unit_modulus(rng, 5), w=rng.uniform(0.1, 2, 5) + 0j, lambda_max_ye=0.2))
    assert np.allclose(v, 1, atol=1e-15)


def test_fixed_point(rng):
    v_z = unit_modulus(rng, 5)
    assert np.allclose(mm_phase_update(MMState(v_z=v_z, w=v_z, lambda_max_ye=0.2)), v_z, atol=1e-15)


def test_zero_direction_entries_keep_phase(rng):
    v_z = unit_modulus(rng, 4)
    w = crandn(rng, 4)
    w[1] = 0
    v = mm_phase_update(MMState(v_z=v_z, w=w, lambda_max_ye=0.25))
    assert v[1] == v_z[1]
    assert np.allclose(np.abs(v), 1, atol=1e-12)


def test_phase_extraction_optimal(rng):
    w = crandn(rng, 6)
    v = mm_phase_update(MMState(v_z=np.ones(6), w=w, lambda_max_ye=1.0))
    best = np.real(np.vdot(w, v))
    assert best == pytest.approx(np.abs(w).sum(), rel=1e-14)
    others = np.exp(1j * rng.uniform(-np.pi, np.pi, (10_000, 6)))
    assert np.all(np.real(others @ w.conj()) <= best + 1e-12)


def test_fast_step_matches_public_route(rng):
    for _ in range(50):
        m = int(rng.integers(1, 12))
        inst, f, forms = random_forms(rng, m)
        v = unit_modulus(rng, m)
        gf = inst.g @ f
        fast = _mm_step(np.conj(inst.h_l) * gf, np.conj(inst.h_e) * gf, inst.sigma2_l, inst.sigma2_e, v)
        slow = mm_phase_update(mm_direction(forms, v))
        assert np.allclose(fast, slow, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 10))
def test_mm_step_never_decreases(seed, m):
    rng = np.random.default_rng(seed)
    _, _, forms = random_forms(rng, m)
    v = unit_modulus(rng, m)
    new = mm_phase_update(mm_direction(forms, v))
    assert np.allclose(np.abs(new), 1, atol=1e-12)
    g0 = quadratic_ratio(v, forms)
    assert quadratic_ratio(new, forms) >= g0 - 1e-9 * g0
    # the three links of the chain: g(new) >= f(new)+c >= f(v)+c = g(v)
    const = g0 - surrogate_value(v, v, forms)
    assert quadratic_ratio(new, forms) >= surrogate_value(new, v, forms) + const - 1e-9 * g0
    assert surrogate_value(new, v, forms) >= surrogate_value(v, v, forms) - 1e-9 * g0


# -- solve_aomm ------------------------------------------------------------------


def test_single_element_converges_immediately(rng):
    inst = make_instance(rng, 1, 3)
    _, ph, tr = solve_aomm(inst)
    assert tr.converged and tr.iterations == 1
    assert tr.objective_history[0] == pytest.approx(tr.objective_history[1], rel=1e-12)


def test_aomm_trace_monotone(rng):
    for _ in range(5):
        m = int(rng.integers(2, 12))
        inst = make_instance(rng, m, 3, p=5.0, s2_e=0.2)
        _, ph, tr = solve_aomm(inst, SolverOptions(trace_granularity="block", check_ascent=True))
        assert len(tr.block_history) == tr.block_updates == 1 + 2 * tr.iterations
        h = tr.block_history
        assert all(b >= a - 1e-10 * abs(a) for a, b in zip(h, h[1:]))
        assert np.allclose(np.abs(ph.v), 1, atol=1e-12)


def test_aomm_and_bcd_reach_similar_values(rng):
    inst = make_instance(rng, 6, 3, p=3.0)
    bf_a, ph_a, tr_a = solve_aomm(inst)
    bf_b, ph_b, tr_b = solve_bcd(inst)
    assert tr_a.objective_history[-1] == pytest.approx(objective_ratio(inst, bf_a, ph_a), rel=1e-10)
    assert tr_a.secrecy_rate_final == pytest.approx(tr_b.secrecy_rate_final, rel=0.05)


def test_aomm_respects_given_start(rng):
    inst = make_instance(rng, 4, 2)
    start = PhaseVector(rng.uniform(-np.pi, np.pi, 4))
    _, _, tr = solve_aomm(inst, SolverOptions(max_iterations=1), phases=start)
    assert tr.objective_history[0] == pytest.approx(
        objective_ratio(inst, optimal_beamformer(inst, start), start), rel=1e-12
    )
