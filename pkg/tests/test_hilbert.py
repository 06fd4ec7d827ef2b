import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digirabi.hilbert import (
    QuantumState,
    SpaceSpec,
    TruncationError,
    annihilation,
    basis_state,
    bell_cat,
    coherent_state,
    displacement,
    embed,
    expm_hermitian,
    fock_state,
    is_hermitian,
    min_n_max,
    number,
    parity_operator,
    pauli,
)
from digirabi.models import RabiParams, build_rabi


def poisson(alpha, n_terms=200):
    # independent oracle: log-space Poisson weights
    lam = abs(alpha) ** 2
    n = np.arange(n_terms)
    logp = -lam + n * math.log(lam) - np.array([math.lgamma(k + 1) for k in n]) if lam else None
    if logp is None:
        p = np.zeros(n_terms)
        p[0] = 1
        return p
    return np.exp(logp)


def test_space_dims():
    sp = SpaceSpec(5)
    assert sp.dim_res == 6 and sp.dim_total == 12
    for bad in (0, -1, 2.5):
        with pytest.raises(ValueError):
            SpaceSpec(bad)


def test_annihilation_entries():
    a = annihilation(SpaceSpec(1))
    assert a[0, 1] == 1 and np.count_nonzero(a) == 1
    a = annihilation(SpaceSpec(6))
    for n in range(1, 7):
        assert a[n - 1, n] == pytest.approx(math.sqrt(n))
    assert np.allclose(a @ fock_state(0, SpaceSpec(6)).data, 0)


def test_commutator_below_truncation():
    sp = SpaceSpec(12)
    a = annihilation(sp)
    c = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(c[:-1, :-1], np.eye(12), atol=1e-12)
    # the truncation artefact sits in the last diagonal entry
    assert c[-1, -1] == pytest.approx(-12)


def test_coherent_mean_and_parity_poisson_oracle():
    sp = SpaceSpec(20)
    s = coherent_state(1.0, sp)
    p = poisson(1.0, 21)
    assert s.expect(number(sp)).real == pytest.approx(np.dot(np.arange(21), p) / p.sum(), abs=1e-10)
    assert s.expect(number(sp)).real == pytest.approx(1.0, abs=1e-10)
    assert s.expect(parity_operator(sp)).real == pytest.approx(math.exp(-2), abs=1e-9)
    s15 = coherent_state(1.5, SpaceSpec(30))
    assert s15.expect(parity_operator(SpaceSpec(30))).real == pytest.approx(math.exp(-2 * 1.5**2), abs=1e-8)


def test_coherent_zero_and_truncation_error():
    sp = SpaceSpec(4)
    assert np.allclose(coherent_state(0, sp).data, fock_state(0, sp).data)
    with pytest.raises(TruncationError):
        coherent_state(3.0, sp)


def test_pauli_conventions():
    z, x = pauli("z"), pauli("x")
    sp_, sm = pauli("+"), pauli("-")
    assert np.allclose(z @ [1, 0], [1, 0])
    assert np.allclose(sp_ @ sm + sm @ sp_, np.eye(2))
    assert np.allclose(x, sp_ + sm)
    # sigma_+ raises |0> to the excited |1>
    assert np.allclose(sp_ @ [1, 0], [0, 1])


@given(st.integers(1, 15))
def test_embed_properties(n_max):
    sp = SpaceSpec(n_max)
    assert np.allclose(embed(np.eye(2), np.eye(sp.dim_res), sp), np.eye(sp.dim_total))
    a = annihilation(sp)
    za = embed(pauli("z"), None, sp)
    ia = embed(None, a, sp)
    assert np.allclose(za @ ia - ia @ za, 0)
    assert abs(np.trace(embed(pauli("z"), number(sp), sp))) < 1e-12


def test_embed_dimension_mismatch():
    with pytest.raises(ValueError):
        embed(np.eye(3), None, SpaceSpec(2))
    with pytest.raises(ValueError):
        embed(None, np.eye(2), SpaceSpec(3))


def test_displacement():
    sp = SpaceSpec(20)
    assert np.allclose(displacement(0, sp), np.eye(21))
    assert np.allclose(displacement(1, sp) @ displacement(-1, sp), np.eye(21), atol=1e-9)
    d = displacement(1.0, SpaceSpec(40))
    v = d[:, 0]
    assert np.allclose(v[:21], coherent_state(1.0, SpaceSpec(20)).data, atol=1e-9)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
@settings(max_examples=25)
def test_displacement_unitary_within_guard(re, im):
    alpha = complex(re, im)
    sp = SpaceSpec(max(12, int(4 * abs(alpha) ** 2) + 4))
    d = displacement(alpha, sp)
    assert np.allclose(d.conj().T @ d, np.eye(sp.dim_res), atol=1e-9)


def test_parity_operator():
    sp = SpaceSpec(3)
    pi = parity_operator(sp)
    assert np.allclose(pi @ fock_state(0, sp).data, fock_state(0, sp).data)
    assert np.allclose(pi @ fock_state(1, sp).data, -fock_state(1, sp).data)


@given(st.floats(0.1, 3), st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=30)
def test_total_parity_conserved(g, wr, wq):
    sp = SpaceSpec(10)
    h = build_rabi(RabiParams(g, wr, wq), sp)
    p = embed(pauli("z"), parity_operator(sp), sp)
    assert np.linalg.norm(h @ p - p @ h) < 1e-10 * np.linalg.norm(h)


def test_state_validation():
    sp = SpaceSpec(2)
    with pytest.raises(ValueError):
        QuantumState(sp, np.ones(6))  # not normalised
    with pytest.raises(ValueError):
        QuantumState(sp, np.ones(5) / math.sqrt(5))  # wrong dimension
    rho = np.diag([0.5, 0.5, 0, 0, 0, 0]).astype(complex)
    s = QuantumState(sp, rho)
    assert not s.is_pure
    bad = rho.copy()
    bad[0, 0], bad[1, 1] = 1.2, -0.2
    with pytest.raises(ValueError):
        QuantumState(sp, bad)


def test_basis_and_bell_cat():
    sp = SpaceSpec(30)
    s = basis_state(1, 0, sp)
    assert s.data[sp.dim_res] == 1
    c = bell_cat(2.0, sp)
    assert np.linalg.norm(c.data) == pytest.approx(1)
    # same total parity sz (x) Pi = -1 as the |1,0> it evolves from
    p = embed(pauli("z"), parity_operator(sp), sp)
    assert c.expect(p).real == pytest.approx(-1, abs=1e-12)
    assert s.expect(p).real == pytest.approx(-1)


def test_min_n_max_guard():
    for a in (0.0, 0.5, 1.0, 2.0, 4.0, 6.0):
        n = min_n_max(a)
        assert n >= 4 * a * a
        if a:
            # truncation loss below 1e-6
            p = poisson(a, 400)
            assert 1 - p[: n + 1].sum() < 1e-6


def test_expm_hermitian_and_is_hermitian():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = m + m.conj().T
    assert is_hermitian(h)
    assert not is_hermitian(m)
    from scipy.linalg import expm

    assert np.allclose(expm_hermitian(h, 0.3), expm(-1j * 0.3 * h), atol=1e-12)
