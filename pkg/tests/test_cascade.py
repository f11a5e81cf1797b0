import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgdot import cascade, densmat
from lgdot.cascade import (
    DotParameters,
    PairState,
    build_exciton_channels,
    entangled_initial,
    pair_density_noc,
    pair_density_pol,
    pair_density_total,
    phonon_occupation,
    spectral_overlap,
)
from lgdot.constants import HBAR, K_B
from lgdot.errors import DegenerateError, DegenerateSplittingWarning, InputError, InvariantError


def joint_reference(p, tau):
    """Pair matrix from the full photon (x) {|0>,|1>,|2>} state propagated with every channel."""
    h = np.kron(np.eye(2), cascade.exciton_hamiltonian(p))
    channels = [densmat.LindbladChannel(np.kron(np.eye(2), ch.collapse), ch.rate) for ch in build_exciton_channels(p)]
    psi = np.zeros(6)
    psi[0 * 3 + 2] = psi[1 * 3 + 1] = 1 / math.sqrt(2)
    rho = densmat.propagate(np.outer(psi, psi), densmat.build_liouvillian(h, channels), tau)
    keep = [0 * 3 + 2, 0 * 3 + 1, 1 * 3 + 2, 1 * 3 + 1]  # H2, H1, V2, V1 -> HH, HV, VH, VV
    return rho[np.ix_(keep, keep)]


def test_entangled_initial():
    rho = entangled_initial()
    assert np.trace(rho) == pytest.approx(1)
    assert np.trace(rho @ rho).real == pytest.approx(1)
    assert rho[0, 3] == pytest.approx(0.5)
    exciton = rho.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)
    np.testing.assert_allclose(exciton, np.eye(2) / 2)


def test_phonon_occupation_reference():
    # 30-digit mpmath: 1/(exp(3/(86.17333*5)) - 1)
    assert phonon_occupation(3.0, 5.0) == pytest.approx(143.122796892121579, rel=1e-12)


def test_phonon_occupation_limits():
    assert phonon_occupation(3.0, 1e-5) == 0.0
    assert phonon_occupation(K_B * 7.0 * math.log(2), 7.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InputError):
        phonon_occupation(0.0, 5.0)
    with pytest.raises(DegenerateError):
        phonon_occupation(5e-324, 5.0)


def test_channels_radiative_only():
    p = DotParameters(gamma_phonon=0.0, gamma_dephase0=0.0)
    labels = [ch.label for ch in build_exciton_channels(p)]
    assert labels == ["radiative_2", "radiative_1"]


def test_channel_flip_ratio():
    p = DotParameters(gamma_phonon=1e-6)
    rates = {ch.label: ch.rate for ch in build_exciton_channels(p)}
    assert rates["flip_up"] / rates["flip_down"] == pytest.approx(0.993061472427928821, rel=1e-12)
    assert all(r >= 0 for r in rates.values())


def test_zero_splitting_drops_flips_with_warning():
    p = DotParameters(s_fss=0.0, gamma_phonon=1e-6)
    with pytest.warns(DegenerateSplittingWarning):
        labels = [ch.label for ch in build_exciton_channels(p)]
    assert not any(lab.startswith("flip") for lab in labels)


@pytest.mark.parametrize(
    "field,value",
    [("s_fss", -1.0), ("temperature", 0.0), ("g_noise", -0.1), ("eta_override", 1.5), ("gamma_x", float("nan"))],
)
def test_parameter_validation(field, value):
    with pytest.raises(InputError, match=field):
        DotParameters(**{field: value})


def test_pol_at_zero_delay():
    ps = pair_density_pol(DotParameters(), 0.0)
    np.testing.assert_allclose(ps.diagonal(), [0.5, 0, 0, 0.5])
    assert ps.coherence == pytest.approx(0.5)


@pytest.mark.parametrize("tau", [0.0, 37.5, 400.0, 3000.0])
def test_pol_flip_free_closed_form(tau):
    p = DotParameters(gamma_phonon=0.0, gamma_dephase0=4e-4, gamma_x=2e-3)
    expect = 0.5 * math.exp(-(p.gamma_x + p.gamma_dephase0) * tau) * np.exp(-1j * p.s_fss * tau / HBAR)
    assert abs(pair_density_pol(p, tau).coherence - expect) < 1e-9


@pytest.mark.parametrize("tau", [0.0, 120.0, 900.0, 2500.0])
@pytest.mark.parametrize("gp", [0.0, 5e-6])
def test_pol_matches_joint_propagation(tau, gp):
    p = DotParameters(gamma_phonon=gp, gamma_dephase0=2e-4, gamma_x=1e-3, temperature=20.0)
    np.testing.assert_allclose(pair_density_pol(p, tau).rho, joint_reference(p, tau), atol=1e-12)


def test_flips_populate_cross_terms():
    p = DotParameters(gamma_phonon=1e-6)
    d = pair_density_pol(p, 200.0).diagonal()
    assert d[1] > 0 and d[2] > 0
    np.testing.assert_allclose(joint_reference(p, 200.0).diagonal().real, d, atol=1e-12)


def test_noc():
    p = DotParameters(gamma_phonon=1e-6)
    for tau in (0.0, 250.0, 1000.0):
        noc, pol = pair_density_noc(p, tau), pair_density_pol(p, tau)
        np.testing.assert_array_equal(noc.diagonal(), pol.diagonal())
        assert noc.coherence == 0
    assert np.trace(pair_density_noc(p, 0.0).rho).real == pytest.approx(1.0)


def test_spectral_overlap():
    assert spectral_overlap(DotParameters(s_fss=0.0)) == 1.0
    assert spectral_overlap(DotParameters(s_fss=1e9)) < 1e-9
    assert spectral_overlap(DotParameters(eta_override=0.7)) == 0.7
    p = DotParameters(gamma_phonon=0.0)
    width = p.gamma_x + p.gamma_dephase0
    assert spectral_overlap(p) == pytest.approx(width**2 / (width**2 + (3.0 / HBAR) ** 2))


def test_total_limits():
    p = DotParameters(g_noise=0.0, eta_override=1.0)
    pol = pair_density_pol(p, 300.0).rho
    np.testing.assert_allclose(pair_density_total(p, 300.0).rho, pol / np.trace(pol).real, atol=1e-14)
    p0 = DotParameters(eta_override=0.0, g_noise=0.0)
    assert all(pair_density_total(p0, t).coherence == 0 for t in (0.0, 100.0, 1000.0))
    big = pair_density_total(DotParameters(g_noise=1e9), 300.0)
    np.testing.assert_allclose(big.rho, np.eye(4) / 4, atol=1e-8)


def test_pair_state_rejects_broken_pattern():
    rho = np.eye(4) / 4
    rho[0, 1] = rho[1, 0] = 1e-6
    with pytest.raises(InvariantError):
        PairState(rho, normalized=True)


def test_no_underflow_at_long_delays():
    ps = pair_density_total(DotParameters(), 60000.0)
    assert np.trace(ps.rho).real == pytest.approx(1.0)


dot_params = st.builds(
    DotParameters,
    s_fss=st.floats(0.1, 10.0),
    gamma_x=st.floats(0.0, 0.02),
    gamma_dephase0=st.floats(0.0, 2e-3),
    gamma_phonon=st.floats(0.0, 1e-5),
    temperature=st.floats(1.0, 100.0),
    g_noise=st.floats(0.0, 3.0),
    eta_override=st.one_of(st.none(), st.floats(0.0, 1.0)),
)


@settings(max_examples=200, deadline=None)
@given(p=dot_params, tau=st.floats(0.0, 6000.0))
def test_total_invariants(p, tau):
    ps = pair_density_total(p, tau)  # PairState checks the zero pattern, Hermiticity, PSD, trace
    assert cascade.sparsity_defect(ps.rho) < 1e-12
    eta = spectral_overlap(p)
    bound = 0.5 * eta / (1 + p.g_noise) * math.exp(-p.gamma_dephase0 * tau)
    assert abs(ps.coherence) <= bound + 1e-12
    pol, noc = pair_density_pol(p, tau), pair_density_noc(p, tau)
    assert abs(np.trace(pol.rho) - np.trace(noc.rho)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(p=dot_params, tau=st.floats(0.0, 3000.0))
def test_mixing_is_linear_in_eta(p, tau):
    c = [pair_density_total(dataclasses.replace(p, eta_override=e), tau).coherence for e in (0.0, 0.5, 1.0)]
    assert c[0] == 0
    assert abs(c[1] - 0.5 * c[2]) < 1e-15


@settings(max_examples=30, deadline=None)
@given(p=dot_params)
def test_pol_trace_non_increasing(p):
    traces = [np.trace(pair_density_pol(p, t).rho).real for t in np.linspace(0, 3000, 31)]
    assert all(b <= a + 1e-13 for a, b in zip(traces, traces[1:]))
