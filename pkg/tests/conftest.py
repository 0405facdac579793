import numpy as np
import pytest

from irs_secrecy.channel import SystemInstance

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def make_instance(rng, m, n_t, p=1.0, s2_l=1.0, s2_e=1.0, scale=1.0, direct=False):
    """Unit-scale instance drawn straight from `rng` (no path loss)."""
    kw = {}
    if direct:
        kw = dict(direct_h_l=crandn(rng, n_t), direct_h_e=crandn(rng, n_t))
    return SystemInstance(
        g=crandn(rng, m, n_t) * scale,
        h_l=crandn(rng, m),
        h_e=crandn(rng, m),
        sigma2_l=s2_l,
        sigma2_e=s2_e,
        p=p,
        **kw,
    )


def unit_modulus(rng, m):
    return np.exp(1j * rng.uniform(-np.pi, np.pi, m))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
