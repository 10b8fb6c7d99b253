import numpy as np
import pytest

from entwidth.linalg_core import (
    I2,
    SX,
    SZ,
    as_density,
    as_state,
    ground_state,
    hermitian_eig,
    is_hermitian,
    is_unitary,
    kron,
    partial_transpose,
    reduced_density,
)
from entwidth.spin_ops import build_H2, heisenberg_bond
from entwidth.states import SINGLET, majumdar_ghosh, singlet_pairing_state

from conftest import random_density


class TestKron:
    def test_identity(self):
        assert np.array_equal(kron(I2, I2), np.eye(4))

    def test_diagonal(self):
        assert np.allclose(kron(SZ, I2), np.diag([1, 1, -1, -1]))

    def test_bit_flip(self):
        assert np.allclose(kron(SX, SX) @ np.array([1, 0, 0, 0]), [0, 0, 0, 1])

    def test_trace_multiplicative(self, rng):
        a, b = rng.normal(size=(3, 3)), rng.normal(size=(2, 2))
        assert np.isclose(np.trace(kron(a, b)), np.trace(a) * np.trace(b))


class TestHermitianEig:
    def test_pauli_z(self):
        w, _ = hermitian_eig(SZ)
        assert np.allclose(w, [-1, 1])

    def test_heisenberg_bond(self):
        w, _ = hermitian_eig(heisenberg_bond(2, 1, 2))
        assert np.allclose(w, [-3, 1, 1, 1])

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_eig(np.array([[0, 1], [0, 0]]))

    def test_reconstruction(self, rng):
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        a = a + a.conj().T
        w, v = hermitian_eig(a)
        assert np.all(np.diff(w) >= 0)
        assert np.allclose((v * w) @ v.conj().T, a, atol=1e-9)
        assert np.max(np.abs(a @ v - v * w)) <= 1e-9 * np.max(np.abs(w))

    def test_ground_energy_matches_inverse_power_iteration(self):
        h = build_H2(8, 0.0)
        e, _ = ground_state(h)
        # inverse iteration with a shift just below the spectrum
        shift = e - 0.1
        m = np.linalg.inv(h - shift * np.eye(len(h)))
        v = np.random.default_rng(0).normal(size=len(h))
        for _ in range(200):
            v = m @ v
            v /= np.linalg.norm(v)
        assert abs(v @ h @ v - e) < 1e-8


class TestGroundState:
    def test_sigma_z(self):
        e, psi = ground_state(SZ)
        assert e == pytest.approx(-1)
        assert abs(psi[1]) == pytest.approx(1)

    def test_singlet(self):
        e, psi = ground_state(heisenberg_bond(2, 1, 2))
        assert e == pytest.approx(-3)
        assert abs(np.vdot(SINGLET, psi)) == pytest.approx(1)

    def test_majumdar_ghosh_in_ground_space(self):
        h = build_H2(8, 0.5)
        e, psi = ground_state(h)
        assert e == pytest.approx(-12, abs=1e-9)
        assert psi.conj() @ h @ psi == pytest.approx(e, abs=1e-8)
        mg = singlet_pairing_state(majumdar_ghosh(8))
        hv = h @ mg
        assert np.vdot(mg, hv).real == pytest.approx(-12, abs=1e-10)
        assert np.linalg.norm(hv) ** 2 - np.vdot(mg, hv).real ** 2 == pytest.approx(0, abs=1e-9)


class TestPartialTranspose:
    def test_product_stays_positive(self, rng):
        ra, rb = random_density(1, rng), random_density(2, rng)
        pt = partial_transpose(np.kron(ra, rb), [2, 3])
        assert np.allclose(pt, np.kron(ra, rb.T))
        assert np.linalg.eigvalsh(pt).min() > -1e-12

    def test_singlet_spectrum(self):
        rho = np.outer(SINGLET, SINGLET.conj())
        assert np.allclose(np.linalg.eigvalsh(partial_transpose(rho, [2])), [-0.5, 0.5, 0.5, 0.5])

    def test_involution_and_trace(self, rng):
        rho = random_density(3, rng)
        pt = partial_transpose(rho, [1, 3])
        assert np.allclose(partial_transpose(pt, [1, 3]), rho)
        assert np.isclose(np.trace(pt), 1)
        assert is_hermitian(pt)

    def test_out_of_range(self, rng):
        with pytest.raises(ValueError):
            partial_transpose(random_density(2, rng), [3])


class TestValidators:
    def test_state_norm(self):
        with pytest.raises(ValueError):
            as_state([1, 1])
        assert np.allclose(as_state([0, 1]), [0, 1])

    def test_density_checks(self):
        with pytest.raises(ValueError):
            as_density(np.diag([1.5, -0.5]))
        assert np.allclose(as_density(np.eye(2) / 2), np.eye(2) / 2)

    def test_unitary(self):
        assert is_unitary(SX)
        assert not is_unitary(2 * SX)

    def test_reduced_density_of_singlet(self):
        rho = reduced_density(SINGLET, [1])
        assert np.allclose(rho, np.eye(2) / 2)
        assert np.allclose(reduced_density(np.outer(SINGLET, SINGLET.conj()), [2]), np.eye(2) / 2)
