import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digirabi.dynamics import evolve_unitary
from digirabi.hilbert import SpaceSpec, basis_state, embed, min_n_max, pauli
from digirabi.measure import mean_photon, photon_parity, qubit_parity
from digirabi.models import (
    RabiParams,
    ajc_charge,
    build_ajc,
    build_jc,
    build_rabi,
    degenerate_oracle,
    excitation_number,
    jc_reference_period,
    revival_time,
    total_parity,
)

TWO_PI = 2 * math.pi


def comm(a, b):
    return a @ b - b @ a


def test_params_validation_and_r():
    p = RabiParams.from_ratio(1.79, 2.0)
    assert p.r == pytest.approx(2.0)
    assert p.omega_rR == pytest.approx(0.895)
    with pytest.raises(ValueError):
        RabiParams(0, 1)
    with pytest.raises(ValueError):
        RabiParams(1, 1, t1_res=0)
    with pytest.raises(ZeroDivisionError):
        RabiParams(1, 0).r
    assert RabiParams(1, 1).kappa == 0
    assert RabiParams(1, 1, t1_res=2.0).kappa == 0.5


def test_uncoupled_spectrum():
    sp = SpaceSpec(6)
    wq, wr = 0.7, 1.3
    h = build_rabi(RabiParams(1e-300, wr, wq), sp)
    ev = np.sort(np.linalg.eigvalsh(h)) / TWO_PI
    expect = np.sort([s * wq / 2 + n * wr for s in (1, -1) for n in range(7)])
    assert np.allclose(ev, expect, atol=1e-9)


@given(st.floats(0.1, 3), st.floats(-3, 3))
@settings(max_examples=20)
def test_rabi_is_jc_plus_ajc(g, wr):
    sp = SpaceSpec(8)
    # omega_rR split equally between the two halves, qubit frequency zero
    h = build_rabi(RabiParams(g, wr), sp)
    parts = build_jc(g, wr / 2, 0, sp) + build_ajc(g, 0, sp, delta_r=wr / 2)
    assert np.max(np.abs(h - parts)) < 1e-12 * max(1, np.max(np.abs(h)))


def test_ground_state_below_displaced_oscillator_bound():
    g = 1.79
    p = RabiParams(g, g)
    e0 = np.linalg.eigvalsh(build_rabi(p, SpaceSpec(40)))[0] / TWO_PI
    assert e0 < -p.omega_rR * p.r**2 * (1 - 1e-3)


def test_jc_conservation_and_splitting():
    sp = SpaceSpec(10)
    h = build_jc(1.95, 0.3, -0.2, sp)
    assert np.max(np.abs(comm(h, excitation_number(sp)))) < 1e-12
    h0 = build_jc(1.95, 0, 0, sp)
    # one-excitation manifold {|1,0>, |0,1>}: independent 2x2 diagonalisation
    i10, i01 = sp.dim_res, 1
    block = h0[np.ix_([i10, i01], [i10, i01])]
    ev = np.linalg.eigvalsh(block) / TWO_PI
    assert ev[1] - ev[0] == pytest.approx(2 * 1.95, abs=1e-12)


def test_jc_swap_period():
    g = 1.95
    sp = SpaceSpec(4)
    t = np.linspace(0, 1 / (2 * g), 201)
    tr = evolve_unitary(build_jc(g, 0, 0, sp), basis_state(1, 0, sp), t)
    p1 = tr.map(qubit_parity)
    assert np.allclose(p1, np.cos(TWO_PI * g * t) ** 2, atol=1e-12)
    assert p1[-1] == pytest.approx(1, abs=1e-12)


def test_ajc_conjugation_and_charge():
    sp = SpaceSpec(8)
    sx = embed(pauli("x"), None, sp)
    hj = build_jc(1.2, 0, 0.4, sp)
    ha = build_ajc(1.2, 0.4, sp)
    assert np.max(np.abs(ha - sx @ hj @ sx)) < 1e-12
    assert np.max(np.abs(comm(ha, ajc_charge(sp)))) < 1e-12
    d = build_ajc(0.0, 0.4, sp)
    assert np.allclose(d, np.diag(np.diag(d)))


def test_total_parity_helper():
    sp = SpaceSpec(6)
    h = build_rabi(RabiParams(1.0, 0.5, 0.3), sp)
    assert np.max(np.abs(comm(h, total_parity(sp)))) < 1e-10


def test_oracle_closed_forms():
    p = RabiParams.from_ratio(1.79, 1.0)
    s0 = degenerate_oracle(p, 0.0)
    assert s0.mean_n == 0 and s0.photon_parity == 1 and s0.qubit_parity == 1
    per = revival_time(p.omega_rR)
    assert per == pytest.approx(0.5587, abs=1e-4)  # 0.56 us at 1.79 MHz, r = 1
    sr = degenerate_oracle(p, per)
    assert sr.photon_parity == pytest.approx(1, abs=1e-12)
    half = degenerate_oracle(p, per / 2)
    assert abs(half.alpha_plus) == pytest.approx(2, abs=1e-12)
    assert half.photon_parity == pytest.approx((1 + math.exp(-8)) / 2, abs=1e-12)
    assert half.photon_parity == pytest.approx(0.50017, abs=1e-5)
    with pytest.raises(ValueError):
        degenerate_oracle(RabiParams(1, 1, omega_qR=0.1), 0.1)


@pytest.mark.parametrize("r", [0.3, 0.5, 1.0, 2.0])
def test_oracle_matches_exact_evolution(r):
    g = 1.79
    p = RabiParams.from_ratio(g, r)
    sp = SpaceSpec(min_n_max(2 * r))
    t = np.linspace(0, revival_time(p.omega_rR), 41)
    tr = evolve_unitary(build_rabi(p, sp), basis_state(1, 0, sp), t)
    o = degenerate_oracle(p, t)
    assert np.max(np.abs(tr.map(mean_photon) - o.mean_n)) < 1e-3
    assert np.max(np.abs(tr.map(photon_parity) - o.photon_parity)) < 1e-3
    assert np.max(np.abs(tr.map(qubit_parity) - o.qubit_parity)) < 1e-3


def test_oracle_centroid_sign():
    # sx = +1 branch of the exact state sits at alpha_plus
    g, r = 1.79, 1.0
    p = RabiParams.from_ratio(g, r)
    sp = SpaceSpec(40)
    t = 0.1
    psi = evolve_unitary(build_rabi(p, sp), basis_state(1, 0, sp), [t]).states[-1].data.reshape(2, -1)
    plus = (psi[0] + psi[1]) / math.sqrt(2)
    plus /= np.linalg.norm(plus)
    a = np.diag(np.sqrt(np.arange(1, sp.dim_res)), 1)
    centroid = np.vdot(plus, a @ plus)
    assert abs(centroid - degenerate_oracle(p, t).alpha_plus) < 1e-6


def test_jc_reference_period():
    assert jc_reference_period(1.95, 0) == pytest.approx(0.2564, abs=1e-4)
    vals = [jc_reference_period(1.95, d) for d in (0, 1, 5, 50, 1e6)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-5
    with pytest.raises(ValueError):
        jc_reference_period(0, 1)


def test_kerr_term_spectrum():
    sp = SpaceSpec(5)
    h = build_rabi(RabiParams(1e-300, 0.0, 0.0, kerr=0.2), sp)
    d = np.diag(h).real[: sp.dim_res] / TWO_PI
    n = np.arange(sp.dim_res)
    assert np.allclose(d, 0.1 * n * (n - 1))
