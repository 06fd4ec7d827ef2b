import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre, factorial

from digirabi.dynamics import evolve_unitary
from digirabi.hilbert import (
    QuantumState,
    SpaceSpec,
    basis_state,
    bell_cat,
    coherent_state,
    fock_state,
    min_n_max,
    product_state,
)
from digirabi.measure import (
    PhotonMeterSpec,
    conditional_resonator,
    invert_meter,
    mean_photon,
    parity_expectation,
    photon_distribution,
    photon_parity,
    qubit_entropy,
    qubit_parity,
    ramsey_meter_response,
    reduced_qubit,
    reduced_resonator,
    sample_probability,
    von_neumann_entropy,
    wigner_grid,
    wigner_point,
)
from digirabi.models import RabiParams, build_rabi
from digirabi.tomo import double_gaussian_fit

LDR = PhotonMeterSpec(0.0187, -1.26, d=0)


def joint(res, q=(0, 1)):
    return product_state(np.array(q), res)


def fock_wigner_oracle(m, n, alpha):
    """Closed-form Wigner function of |m><n| (m <= n) via generalised Laguerre polynomials."""
    x = 4 * abs(alpha) ** 2
    return (2 / math.pi) * (-1) ** m * math.sqrt(factorial(m) / factorial(n)) * (
        (2 * np.conj(alpha)) ** (n - m)) * math.exp(-x / 2) * eval_genlaguerre(m, n - m, x)


def test_qubit_parity_values():
    sp = SpaceSpec(3)
    assert qubit_parity(basis_state(1, 0, sp)) == 1
    assert qubit_parity(basis_state(0, 0, sp)) == 0
    mixed = 0.5 * (basis_state(0, 1, sp).density_matrix() + basis_state(1, 1, sp).density_matrix())
    assert qubit_parity(QuantumState(sp, mixed)) == pytest.approx(0.5)


def test_photon_observables():
    sp = SpaceSpec(20)
    assert photon_parity(joint(fock_state(0, sp))) == 1
    assert photon_parity(joint(fock_state(1, sp))) == pytest.approx(0)
    assert mean_photon(joint(fock_state(3, sp))) == pytest.approx(3)
    assert mean_photon(joint(fock_state(0, sp))) == 0
    assert photon_parity(joint(coherent_state(1.0, sp))) == pytest.approx((1 + math.exp(-2)) / 2, abs=1e-10)
    assert photon_parity(joint(coherent_state(1.0, sp))) == pytest.approx(0.5677, abs=1e-4)
    # resonator-only states are accepted as well
    assert photon_parity(coherent_state(1.0, sp)) == pytest.approx(0.5677, abs=1e-4)


def test_degenerate_half_period_qubit_parity():
    p = RabiParams.from_ratio(1.95, 1.0)
    sp = SpaceSpec(min_n_max(2))
    tr = evolve_unitary(build_rabi(p, sp), basis_state(1, 0, sp), [0.5 / p.omega_rR])
    assert qubit_parity(tr.states[-1]) == pytest.approx((1 + math.exp(-8)) / 2, abs=1e-6)
    assert mean_photon(tr.states[-1]) == pytest.approx(4, abs=1e-6)


def test_reduced_states_pure_and_mixed_agree():
    sp = SpaceSpec(12)
    s = bell_cat(1.2, sp)
    d = s.as_dm()
    assert np.allclose(reduced_qubit(s), reduced_qubit(d))
    assert np.allclose(reduced_resonator(s), reduced_resonator(d))
    assert np.allclose(photon_distribution(s), photon_distribution(d))
    assert np.trace(reduced_resonator(s)).real == pytest.approx(1)


def test_meter_reference_values():
    assert ramsey_meter_response(fock_state(0, SpaceSpec(4)), LDR) == pytest.approx(0.5)
    p1 = ramsey_meter_response(fock_state(1, SpaceSpec(4)), LDR)
    assert p1 == pytest.approx(0.5 * (1 + math.sin(2 * math.pi * -1.26 * 0.0187)), abs=1e-12)
    assert p1 == pytest.approx(0.427, abs=1e-3)
    spec = PhotonMeterSpec(0.0187, -1.26, d=3)
    assert ramsey_meter_response(fock_state(3, SpaceSpec(6)), spec) == pytest.approx(0.5)
    assert invert_meter(0.5, spec) == pytest.approx(3)


def test_parity_meter():
    s = PhotonMeterSpec.parity(-1.26)
    assert 1000 * s.tau_eff == pytest.approx(396.8, abs=0.1)
    st_ = coherent_state(1.3, SpaceSpec(20))
    p = ramsey_meter_response(photon_distribution(st_), s)
    assert p == pytest.approx(photon_parity(st_), abs=1e-12)
    with pytest.raises(ValueError):
        PhotonMeterSpec(0.1, -1.26, mode="parity")
    with pytest.raises(ValueError):
        invert_meter(0.4, s)
    with pytest.raises(ValueError):
        PhotonMeterSpec(0, 1)
    with pytest.raises(ValueError):
        PhotonMeterSpec(0.1, 0)


def test_meter_round_trip_and_wrapping():
    spec = PhotonMeterSpec(0.0187, -1.26, d=3)
    sp = SpaceSpec(60)
    est = invert_meter(ramsey_meter_response(coherent_state(math.sqrt(2), sp), spec), spec)
    assert abs(est - 2) < 0.15
    # a 0-8 meter under-reports a bright state
    spec0 = PhotonMeterSpec(0.0187, -1.26, d=0)
    est = invert_meter(ramsey_meter_response(coherent_state(math.sqrt(12), sp), spec0), spec0)
    assert est < 10


def test_meter_window_and_monotone():
    spec = PhotonMeterSpec(0.0187, -1.26, d=3)
    lo, hi = spec.linear_window()
    assert abs(spec.slope) * (hi - spec.d) == pytest.approx(math.pi / 6)
    sp = SpaceSpec(40)
    nbar = np.linspace(max(lo, 0.05), hi, 25)
    p = [ramsey_meter_response(coherent_state(math.sqrt(n), sp), spec) for n in nbar]
    # chi2 < 0: response falls monotonically with photon number
    assert np.all(np.diff(p) < 0)


def test_meter_sampling_is_seeded():
    p = sample_probability(0.3, 1000, np.random.default_rng(5))
    assert p == sample_probability(0.3, 1000, np.random.default_rng(5))
    assert abs(p - 0.3) < 0.06
    with pytest.raises(ValueError):
        sample_probability(0.3, 0)


def test_wigner_reference_points():
    sp = SpaceSpec(6)
    assert wigner_point(fock_state(0, sp), 0) == pytest.approx(2 / math.pi)
    assert wigner_point(fock_state(1, sp), 0) == pytest.approx(-2 / math.pi)
    assert wigner_grid(fock_state(1, sp), [0])[0] == pytest.approx(-2 / math.pi)


@given(st.integers(0, 6), st.integers(0, 6), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=40)
def test_wigner_grid_matches_laguerre_oracle(m, n, re, im):
    sp = SpaceSpec(7)
    rho = np.zeros((8, 8), dtype=complex)
    m, n = min(m, n), max(m, n)
    rho[m, n] = 1.0
    a = complex(re, im)
    # W of the Hermitian part |m><n| + |n><m| is 2 Re W_mn for m != n
    w = wigner_grid(rho + rho.conj().T if m != n else rho, [a])[0]
    ref = fock_wigner_oracle(m, n, a)
    ref = 2 * ref.real if m != n else ref.real
    assert w == pytest.approx(ref, abs=1e-10)


@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_wigner_routes_agree(re, im, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    a = complex(re, im)
    assert wigner_point(rho, a) == pytest.approx(wigner_grid(rho, [a])[0], abs=1e-10)


@pytest.mark.parametrize("state", ["vacuum", "fock3", "cat"])
def test_wigner_normalisation_and_parity(state):
    sp = SpaceSpec(30)
    if state == "vacuum":
        s = joint(fock_state(0, sp))
    elif state == "fock3":
        s = joint(fock_state(3, sp))
    else:
        s = bell_cat(1.5, sp)
    xs = np.linspace(-6.5, 6.5, 131)
    w = wigner_grid(s if state != "cat" else reduced_resonator(s), xs[None, :] + 1j * xs[:, None])
    assert w.sum() * (xs[1] - xs[0]) ** 2 == pytest.approx(1, abs=0.02)
    assert np.max(np.abs(w)) <= 2 / math.pi + 1e-12
    w0 = wigner_point(reduced_resonator(s), 0)
    assert photon_parity(s) == pytest.approx((1 + math.pi / 2 * w0) / 2, abs=1e-12)
    assert parity_expectation(s) == pytest.approx(math.pi / 2 * w0, abs=1e-12)


def test_vacuum_width():
    xs = np.linspace(-3, 3, 61)
    w = wigner_grid(fock_state(0, SpaceSpec(4)), xs[None, :] + 1j * xs[:, None])
    fit = double_gaussian_fit(xs, xs, w)
    assert fit.single_peak
    assert fit.peaks[0].width == pytest.approx(0.5, abs=1e-6)


def test_entropy():
    sp = SpaceSpec(40)
    assert qubit_entropy(basis_state(1, 3, sp)) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1)
    # Bell-cat: eigenvalues (1 +- exp(-2|a|^2))/2 of the reduced qubit
    for a in (0.5, 1.0, 3.0):
        lam = (1 + math.exp(-2 * a * a)) / 2
        expect = -(lam * math.log2(lam) + (1 - lam) * math.log2(1 - lam))
        assert qubit_entropy(bell_cat(a, sp)) == pytest.approx(expect, abs=1e-9)
    assert qubit_entropy(bell_cat(3.0, sp)) > 0.999


def test_revival_entropy_dip():
    p = RabiParams.from_ratio(1.95, 0.5)
    sp = SpaceSpec(min_n_max(1.0))
    tr = evolve_unitary(build_rabi(p, sp), basis_state(1, 0, sp), [1 / p.omega_rR])
    assert qubit_entropy(tr.states[-1]) < 0.05


def test_conditional_states():
    sp = SpaceSpec(30)
    s = product_state(np.array([1, 1]), coherent_state(0.7, sp))
    rho, prob = conditional_resonator(s, 0)
    assert prob == pytest.approx(0.5)
    assert np.allclose(rho, np.outer(coherent_state(0.7, sp).data, coherent_state(0.7, sp).data.conj()))
    cat = bell_cat(1.5, sp)
    rho0, p0 = conditional_resonator(cat, 0)
    rho1, p1 = conditional_resonator(cat, 1)
    assert p0 + p1 == pytest.approx(1)
    assert wigner_point(rho0, 0) < 0  # odd cat
    assert wigner_point(rho1, 0) > 0  # even cat
    xs = np.linspace(-4, 4, 41)
    grid = xs[None, :] + 1j * xs[:, None]
    for outcome, sign in (("+", 1), ("-", -1)):
        r, pr = conditional_resonator(cat, outcome)
        assert pr == pytest.approx(0.5, abs=1e-9)
        fit = double_gaussian_fit(xs, xs, wigner_grid(r, grid))
        assert fit.single_peak
        assert fit.peaks[0].center.real == pytest.approx(sign * 1.5, abs=1e-3)
    with pytest.raises(ValueError):
        conditional_resonator(basis_state(1, 0, sp), 0)
    with pytest.raises(ValueError):
        conditional_resonator(cat, "y")
    # mixed-state path agrees with the pure one
    rd, pd_ = conditional_resonator(cat.as_dm(), 0)
    assert np.allclose(rd, rho0) and pd_ == pytest.approx(p0)
