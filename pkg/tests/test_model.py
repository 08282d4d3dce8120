import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from entrans import dense
from entrans.model import (
    ChainSpec,
    ContractError,
    HamiltonianKind,
    apply_driven,
    apply_effective,
    apply_hamiltonian,
    apply_static,
    apply_terms,
    drive_amplitude,
    effective_coefficients,
    static_terms,
)
from entrans.states import all_up, basis_state

KINDS = [HamiltonianKind.driven(), HamiltonianKind.static(), HamiltonianKind.effective()]


@pytest.mark.parametrize("kw", [
    dict(L=1, L_A=1), dict(L=25, L_A=3), dict(L=8, L_A=0), dict(L=8, L_A=8),
    dict(L=8, L_A=4, J=0.0), dict(L=8, L_A=4, omega=-1.0), dict(L=8, L_A=4, h0=float("nan")),
])
def test_chainspec_rejects_invalid(kw):
    with pytest.raises(ContractError):
        ChainSpec(**kw)


def test_two_site_zz_only():
    spec = ChainSpec(2, 1, h0=0.0)
    np.testing.assert_allclose(apply_driven(spec, all_up(2), 0.3), -all_up(2))


def test_two_site_static_hand_expansion():
    spec = ChainSpec(2, 1, h0=2.0)
    out = apply_static(spec, all_up(2))
    expected = -all_up(2) - basis_state(2, [1]) - basis_state(2, [2])
    np.testing.assert_allclose(out, expected, atol=1e-15)


def test_static_is_driven_at_zero_bitwise():
    spec = ChainSpec(8, 3)
    psi = random_state(8, 1)
    assert np.array_equal(apply_static(spec, psi), apply_driven(spec, psi, 0.0))


@pytest.mark.parametrize("L,t", [(8, 0.0), (8, 0.37), (10, 1.3)])
def test_driven_matches_dense(L, t):
    spec = ChainSpec(L, 2)
    psi = random_state(L, L)
    np.testing.assert_allclose(apply_driven(spec, psi, t), dense.driven_matrix(spec, t) @ psi, atol=1e-12)


def test_static_matches_dense_L10():
    spec = ChainSpec(10, 4)
    psi = random_state(10, 3)
    np.testing.assert_allclose(apply_static(spec, psi), dense.static_matrix(spec) @ psi, atol=1e-12)


@pytest.mark.parametrize("L,omega", [(3, 10.0), (6, 3.0), (10, 50.0)])
def test_effective_matches_dense(L, omega):
    spec = ChainSpec(L, 1, omega=omega)
    psi = random_state(L, 7)
    np.testing.assert_allclose(apply_effective(spec, psi), dense.effective_matrix(spec) @ psi, atol=1e-12)


def test_effective_bulk_x_coefficient():
    spec = ChainSpec(3, 1, J=1.0, h0=2.0, omega=10.0)
    assert effective_coefficients(spec)["x_bulk"] == pytest.approx(-0.08, rel=1e-14)
    # matrix element <up up up| H_eff |up down up> collects bulk X and the three-body term
    H = dense.effective_matrix(spec)
    c = effective_coefficients(spec)
    assert H[0b000, 0b010].real == pytest.approx(c["x_bulk"] + c["zxz"], abs=1e-15)


def test_three_body_on_all_up():
    spec = ChainSpec(3, 1, J=1.0, h0=2.0, omega=10.0)
    out = apply_effective(spec, all_up(3))
    c = effective_coefficients(spec)
    # site 2 flipped: bulk X plus ZXZ with both neighbours up
    assert out[0b010] == pytest.approx(c["x_bulk"] + c["zxz"])
    assert c["zxz"] == pytest.approx(-4 * 2 * 1 / 100)


def test_effective_infinite_frequency_is_pure_zz():
    spec = ChainSpec(8, 4, omega=1e9)
    psi = random_state(8, 2)
    zz = -dense.zz_part(8) @ psi
    out = apply_effective(spec, psi)
    assert np.linalg.norm(out - zz) <= 1e-9 * np.linalg.norm(zz)


def test_effective_needs_positive_omega():
    with pytest.raises(ContractError):
        apply_effective(ChainSpec(4, 2, omega=0.0), all_up(4))


def test_dimension_mismatch():
    with pytest.raises(ContractError):
        apply_driven(ChainSpec(4, 2), np.ones(8, complex), 0.0)


def test_caller_buffer_is_used():
    spec = ChainSpec(6, 3)
    psi = random_state(6, 0)
    out = np.empty_like(psi)
    res = apply_terms(static_terms(spec), psi, out)
    assert res is out
    with pytest.raises(ContractError):
        apply_terms(static_terms(spec), psi, np.empty(64, dtype=np.complex64))


def test_drive_amplitude_values():
    spec = ChainSpec(4, 2, h0=2.0, omega=5.0)
    assert drive_amplitude(spec, 0.0) == 1.0
    assert drive_amplitude(spec, math.pi / 2 / 5.0) == pytest.approx(0.0, abs=1e-15)
    assert drive_amplitude(spec, 1.0) == pytest.approx(0.28366218546322625, abs=1e-15)


@given(t=st.floats(0, 20), seed=st.integers(0, 2**16))
def test_drive_periodicity(t, seed):
    spec = ChainSpec(6, 3, omega=4.0)
    psi = random_state(6, seed)
    T = 2 * math.pi / spec.omega
    a = apply_driven(spec, psi, t)
    b = apply_driven(spec, psi, t + T)
    # equal up to rounding of cos at shifted arguments
    np.testing.assert_allclose(a, b, atol=1e-12)


@given(kind=st.sampled_from(KINDS), t=st.floats(0, 10), L=st.integers(2, 10), seed=st.integers(0, 2**16))
def test_hermiticity(kind, t, L, seed):
    spec = ChainSpec(L, 1, omega=7.0)
    phi, psi = random_state(L, seed), random_state(L, seed + 1)
    a = np.vdot(phi, apply_hamiltonian(spec, kind, psi, t))
    b = np.vdot(psi, apply_hamiltonian(spec, kind, phi, t))
    assert abs(a - b.conjugate()) <= 1e-12


@given(kind=st.sampled_from(KINDS), t=st.floats(0, 10), L=st.integers(2, 10), seed=st.integers(0, 2**16))
def test_global_parity_commutes(kind, t, L, seed):
    spec = ChainSpec(L, 1, omega=7.0)
    psi = random_state(L, seed)
    HP = apply_hamiltonian(spec, kind, psi[::-1].copy(), t)
    PH = apply_hamiltonian(spec, kind, psi, t)[::-1]
    assert np.linalg.norm(HP - PH) <= 1e-12


@given(kind=st.sampled_from(KINDS), t=st.floats(0, 10), L=st.integers(2, 8), seed=st.integers(0, 2**16))
def test_matrix_free_matches_dense_property(kind, t, L, seed):
    spec = ChainSpec(L, 1, h0=1.5, omega=3.0)
    psi = random_state(L, seed)
    np.testing.assert_allclose(apply_hamiltonian(spec, kind, psi, t), dense.matrix(spec, kind, t) @ psi, atol=1e-12)
