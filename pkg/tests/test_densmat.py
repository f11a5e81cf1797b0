import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgdot import densmat
from lgdot.constants import HBAR
from lgdot.densmat import LindbladChannel, build_liouvillian, lindblad_rhs, propagate
from lgdot.errors import InputError
from lgdot.validation import random_lindblad_problem

from conftest import random_density

SZ = np.diag([1.0, -1.0])


def test_as_matrix_rejects_non_finite():
    with pytest.raises(InputError):
        densmat.as_matrix([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(InputError):
        densmat.as_matrix([[np.inf]])


def test_channel_rejects_negative_rate():
    with pytest.raises(InputError):
        LindbladChannel(np.eye(2), -1e-3)


def test_rhs_identity_state_is_stationary():
    h0 = np.diag([0.0, 0.1, 0.2, 0.3])
    np.testing.assert_array_equal(lindblad_rhs(np.eye(4) / 4, h0, []), np.zeros((4, 4)))


def test_rhs_coherence_rotates_at_splitting():
    s = 3.0 / HBAR
    rho = np.array([[0.5, 0.5], [0.5, 0.5]])
    out = lindblad_rhs(rho, np.diag([0.0, s]), [])
    assert out[0, 1] == pytest.approx(1j * s * 0.5, abs=1e-15)
    assert out[1, 0] == pytest.approx(-1j * s * 0.5, abs=1e-15)


def test_rhs_pure_dephasing_value():
    gd = 2e-3
    rho = 0.5 * np.ones((2, 2))
    out = lindblad_rhs(rho, np.zeros((2, 2)), [LindbladChannel(SZ / np.sqrt(2), gd)])
    np.testing.assert_allclose(out, [[0, -gd / 2], [-gd / 2, 0]], atol=1e-18)


def test_rhs_dephasing_matches_fine_step_integration():
    # finite-difference check of the same value with the independent RK4 oracle
    from lgdot.oracle import rk4_reference

    gd = 2e-3
    rho = 0.5 * np.ones((2, 2))
    ch = [LindbladChannel(SZ / np.sqrt(2), gd)]
    h = 1e-4
    after = rk4_reference(rho, np.zeros((2, 2)), ch, h, 1000)
    np.testing.assert_allclose((after - rho) / h, [[0, -gd / 2], [-gd / 2, 0]], atol=1e-9)


@pytest.mark.parametrize("bad", ["rho", "channel", "rate"])
def test_dimension_and_rate_errors(bad):
    rho, h0 = np.eye(2) / 2, np.zeros((2, 2))
    channels = [LindbladChannel(np.eye(2), 1.0)]
    if bad == "rho":
        rho = np.eye(3) / 3
    elif bad == "channel":
        channels = [LindbladChannel(np.eye(3), 1.0)]
    else:
        ch = LindbladChannel(np.eye(2), 1.0)
        object.__setattr__(ch, "rate", -1.0)
        channels = [ch]
    with pytest.raises(InputError):
        lindblad_rhs(rho, h0, channels)


def test_zero_liouvillian():
    gen = build_liouvillian(np.zeros((3, 3)), [])
    assert gen.matrix.shape == (9, 9)
    assert not np.any(gen.matrix)


def test_liouvillian_matches_rhs_on_random_inputs(rng):
    worst = 0.0
    for _ in range(100):
        h0, channels = random_lindblad_problem(rng, n=int(rng.integers(2, 5)))
        n = h0.shape[0]
        rho = random_density(rng, n)
        gen = build_liouvillian(h0, channels)
        worst = max(worst, np.max(np.abs(gen.apply(rho) - lindblad_rhs(rho, h0, channels))))
    assert worst < 1e-12


def test_liouvillian_is_trace_preserving(rng):
    h0, channels = random_lindblad_problem(rng)
    gen = build_liouvillian(h0, channels)
    trace_functional = densmat.vec(np.eye(4))
    assert np.max(np.abs(trace_functional @ gen.matrix)) < 1e-12


def test_liouvillian_is_deterministic(rng):
    h0, channels = random_lindblad_problem(rng)
    a = build_liouvillian(h0, channels).matrix
    b = build_liouvillian(h0, channels).matrix
    assert a.tobytes() == b.tobytes()


def test_dephasing_spectrum():
    gd = 1e-3
    gen = build_liouvillian(np.zeros((2, 2)), [LindbladChannel(SZ / np.sqrt(2), gd)])
    ev = np.sort(np.linalg.eigvals(gen.matrix).real)
    np.testing.assert_allclose(ev, [-gd, -gd, 0.0, 0.0], atol=1e-15)


def test_propagate_zero_time_is_identity(rng):
    rho = random_density(rng, 3)
    gen = build_liouvillian(np.diag([0.0, 0.01, 0.02]), [])
    np.testing.assert_array_equal(propagate(rho, gen, 0.0), rho)


@pytest.mark.parametrize("t", [10.0, 500.0, 4321.0])
def test_propagate_dephasing_closed_form(t):
    gd, s = 4e-4, 3.0 / HBAR
    gen = build_liouvillian(np.diag([0.0, s]), [LindbladChannel(SZ / np.sqrt(2), gd)])
    rho0 = np.array([[0.3, 0.2 - 0.4j], [0.2 + 0.4j, 0.7]])
    rho = propagate(rho0, gen, t)
    assert rho[1, 0] == pytest.approx(rho0[1, 0] * np.exp((-gd - 1j * s) * t), abs=1e-9)
    assert rho[0, 0] == pytest.approx(0.3, abs=1e-12)


def test_propagate_rejects_bad_input():
    gen = build_liouvillian(np.zeros((2, 2)), [])
    with pytest.raises(InputError):
        propagate(np.eye(2) / 2, gen, -1.0)
    with pytest.raises(InputError):
        propagate(np.eye(2), gen, 1.0)  # trace 2
    with pytest.raises(InputError):
        propagate(np.diag([1.5, -0.5]), gen, 1.0)  # not PSD


def test_validity_helpers():
    assert densmat.trace(np.eye(4)) == 4
    assert densmat.hermiticity_defect(np.array([[1, 1j], [-1j, 2]])) == 0
    assert densmat.min_eigenvalue(np.diag([0.1, 0.9])) == pytest.approx(0.1, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(0.0, 5000.0), split=st.floats(0.0, 1.0))
def test_propagation_invariants(seed, t, split):
    rng = np.random.default_rng(seed)
    h0, channels = random_lindblad_problem(rng, max_rate=rng.uniform(1e-4, 2e-2))
    rho0 = random_density(rng, 4)
    gen = build_liouvillian(h0, channels)
    rho = propagate(rho0, gen, t)
    assert abs(densmat.trace(rho) - 1) < 1e-9
    assert densmat.hermiticity_defect(rho) < 1e-10
    assert densmat.min_eigenvalue(rho) >= -1e-9
    # semigroup: t = t1 + t2
    t1 = split * t
    two_step = propagate(propagate(rho0, gen, t1), gen, t - t1)
    assert np.max(np.abs(two_step - rho)) < 1e-9
