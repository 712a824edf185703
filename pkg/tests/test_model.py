import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hqdmft.greens import MatsubaraGrid
from hqdmft.model import (
    MODES,
    BetheLattice,
    SiamParams,
    bare_g0_inv,
    bethe_dos,
    build_spin_hamiltonian,
    fermion_operators,
    fermionic_hamiltonian_matrix,
    jordan_wigner,
    self_energy,
    weiss_inv,
)
from hqdmft.qsim import embed, PAULI

W0 = np.pi / 20


def test_params_validation():
    with pytest.raises(ValueError):
        SiamParams(U=-1.0, mu=0.0, eps=0.0, V=0.5)
    p = SiamParams.half_filled(1.2, 0.3)
    assert p.mu == pytest.approx(0.6) and p.eps == 0.0 and p.is_half_filled
    assert p.with_V(0.7).V == 0.7


def test_anticommutation():
    ops = fermion_operators()
    eye = np.eye(16)
    for a, b in itertools.product(MODES, repeat=2):
        ca, cb = ops.annihilate[a], ops.annihilate[b]
        cbd = ops.create[b]
        assert np.allclose(ca @ cbd + cbd @ ca, eye * (a == b), atol=1e-12)
        assert np.allclose(ca @ cb + cb @ ca, 0, atol=1e-12)


def test_nilpotent():
    c = fermion_operators().annihilate["1dn"]
    assert np.allclose(c @ c, 0, atol=1e-12)


def test_quadratures():
    ops = fermion_operators()
    assert np.allclose(ops.q1, embed(PAULI["X"], 1, 4))
    assert np.allclose(ops.q2, embed(-PAULI["Y"], 1, 4))


def test_modes_order():
    assert MODES == ("1dn", "2dn", "1up", "2up")


def test_spin_hamiltonian_diagonal_element():
    H = build_spin_hamiltonian(SiamParams.half_filled(1.0, 0.5)).matrix()
    assert H[0b0101, 0b0101].real == pytest.approx(0.25)


@pytest.mark.parametrize("U,expected", [(0.0, -1.0), (1.0, -np.sqrt(17) / 4)])
def test_ground_energy(U, expected):
    H = build_spin_hamiltonian(SiamParams.half_filled(U, 0.5)).matrix()
    assert np.linalg.eigvalsh(H)[0] == pytest.approx(expected, abs=1e-12)


def test_spin_hamiltonian_requires_half_filling():
    with pytest.raises(NotImplementedError):
        build_spin_hamiltonian(SiamParams(U=1.0, mu=0.1, eps=0.0, V=0.5))


def test_fermionic_equals_spin_minus_shift():
    p = SiamParams.half_filled(1.0, 0.5)
    diff = fermionic_hamiltonian_matrix(p) - (build_spin_hamiltonian(p).matrix() - p.U / 4 * np.eye(16))
    assert np.max(np.abs(diff)) < 1e-12


@given(st.floats(0, 4), st.floats(0.01, 2))
def test_spin_fermion_spectra(U, V):
    p = SiamParams.half_filled(U, V)
    ops, H_ferm = jordan_wigner(p)
    a = np.linalg.eigvalsh(build_spin_hamiltonian(p).matrix())
    b = np.linalg.eigvalsh(H_ferm.matrix() + U / 4 * np.eye(16))
    assert np.allclose(a, b, atol=1e-10)


@pytest.mark.parametrize("x,expected", [(0.0, 1 / np.pi), (2.0, 0.0), (1.0, np.sqrt(3) / (2 * np.pi)), (3.0, 0.0)])
def test_bethe_dos_values(x, expected):
    assert bethe_dos(x) == pytest.approx(expected, abs=1e-12)


def test_bethe_dos_normalized_and_even():
    x = np.linspace(-2, 2, 400001)
    d = bethe_dos(x)
    assert np.trapezoid(d, x) == pytest.approx(1.0, abs=1e-6)
    assert np.allclose(d, d[::-1])
    assert BetheLattice().dos(0.5) == pytest.approx(bethe_dos(0.5))


def test_bare_g0_inv_values():
    assert bare_g0_inv(np.array([W0]), SiamParams.half_filled(0.0, 0.5))[0] == pytest.approx(1.748630j, abs=1e-6)
    assert bare_g0_inv(np.array([W0]), SiamParams.half_filled(1.0, 0.5))[0] == pytest.approx(0.5 + 1.748630j, abs=1e-6)
    w = MatsubaraGrid(50, 5).frequencies
    p = SiamParams(U=1.0, mu=0.5, eps=0.0, V=0.0)
    assert np.array_equal(bare_g0_inv(w, p), 1j * w + 0.5)


def test_bare_g0_inv_pole():
    with pytest.raises(ZeroDivisionError):
        bare_g0_inv(np.array([0.0]), SiamParams.half_filled(0.0, 0.5))


def test_weiss_inv_values():
    grid = MatsubaraGrid(50, 4)
    w = grid.frequencies
    assert np.allclose(weiss_inv(np.zeros(4), 0.3, grid), 1j * w + 0.3)
    G = -1j * W0 / (W0 ** 2 + 0.25)
    assert weiss_inv(np.array([G]), 0.0, np.array([W0]))[0] == pytest.approx(1j * (W0 + W0 / (W0 ** 2 + 0.25)))
    assert abs(weiss_inv(np.array([G]), 0.0, np.array([W0]))[0] - 0.729j) < 1e-3
    g0 = 1 / bare_g0_inv(grid, SiamParams.half_filled(1.0, 0.5))
    assert np.array_equal(weiss_inv(g0, 0.5, grid), 1j * w + 0.5 - g0)


def test_weiss_inv_shape_mismatch():
    with pytest.raises(ValueError):
        weiss_inv(np.zeros(3), 0.0, MatsubaraGrid(50, 4))


def test_purely_imaginary_at_zero_mu():
    grid = MatsubaraGrid(50, 10)
    g0 = bare_g0_inv(grid, SiamParams.half_filled(0.0, 0.7))
    assert np.all(g0.real == 0)
    G = -1j * grid.frequencies / (grid.frequencies ** 2 + 0.49)
    assert np.all(weiss_inv(G, 0.0, grid).real == 0)


def test_self_energy():
    assert self_energy(np.array([1 + 2j]), np.array([1 + 1j]))[0] == pytest.approx(1j)
    x = np.array([1 + 1j, 2 - 3j])
    assert np.array_equal(self_energy(x, x), np.zeros(2))
    with pytest.raises(ValueError):
        self_energy(np.zeros(2), np.zeros(3))
