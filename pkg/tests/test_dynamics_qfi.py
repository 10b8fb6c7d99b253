import numpy as np
import pytest
from scipy.linalg import expm

from entwidth.dynamics_qfi import (
    GradientGenerator,
    QfiRow,
    evolve,
    qfi_fidelity_oracle,
    qfi_pure,
    qfi_ratio_scan,
    singlet_pair_qfi,
)
from entwidth.linalg_core import is_unitary
from entwidth.spin_ops import ChainGeometry
from entwidth.states import haar_state, hugging, product_state, right_neighbor, singlet_pairing_state


def generator(n, lam=None, x0=-0.5):
    return GradientGenerator(ChainGeometry(n, x0), 2.0 * n if lam is None else lam)


class TestGenerator:
    def test_coefficients(self):
        g = generator(4, lam=8)
        np.testing.assert_allclose(g.coefficients, 2 * np.pi * np.array([0.5, 1.5, 2.5, 3.5]) / 8)

    def test_zero_wavelength_rejected(self):
        with pytest.raises(ValueError):
            generator(2, lam=0)

    def test_unitary_matches_expm(self):
        g = generator(3, lam=5.0)
        u = g.unitary(0.7)
        assert is_unitary(u)
        np.testing.assert_allclose(u, expm(1j * 0.7 * g.operator.to_dense()), atol=1e-12)

    def test_evolve_matches_unitary(self, rng):
        g = generator(4, lam=3.0)
        psi = haar_state(4, rng)
        np.testing.assert_allclose(evolve(psi, g, 1.3), g.unitary(1.3) @ psi, atol=1e-12)

    def test_quarter_turn(self):
        # angles pi/4 and 3pi/4; the phase convention sends |0> to cos|0> - sin|1>
        g = GradientGenerator(ChainGeometry(2, x0=-0.5), 4.0)
        out = evolve(np.array([1, 0, 0, 0], dtype=complex), g, 1.0)
        expected = np.kron(np.array([1, -1]) / np.sqrt(2), np.array([-1, -1]) / np.sqrt(2))
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_evolve_shape_check(self):
        with pytest.raises(ValueError):
            evolve(np.ones(8) / np.sqrt(8), generator(2), 0.1)


class TestQfi:
    def test_matches_fidelity_oracle(self, rng):
        g = generator(6, lam=7.0)
        for _ in range(5):
            psi = haar_state(6, rng)
            exact = qfi_pure(psi, g)
            assert qfi_fidelity_oracle(psi, g, delta=1e-3) == pytest.approx(exact, rel=1e-4)

    def test_singlet_states(self):
        g = generator(8)
        for config in (hugging(8), right_neighbor(8)):
            assert qfi_pure(singlet_pairing_state(config), g) == pytest.approx(
                singlet_pair_qfi(config.pairs, g.coefficients), abs=1e-9
            )

    def test_product_eigenstate_has_zero_qfi(self):
        # sigma_y eigenstates on every site
        psi = product_state([[0, 1, 0]] * 4)
        assert qfi_pure(psi, generator(4)) == pytest.approx(0, abs=1e-12)

    @pytest.mark.parametrize("n", [4, 8, 12, 16])
    def test_ratio_law(self, n):
        (row,) = qfi_ratio_scan([n])
        assert row.ratio == pytest.approx((n**2 - 1) / 3, abs=1e-9 * n**2)

    def test_ratio_independent_of_wavelength(self):
        a = qfi_ratio_scan([8], lambda_rule=lambda n: 3.7)[0]
        b = qfi_ratio_scan([8])[0]
        assert a.ratio == pytest.approx(b.ratio)

    def test_workers_agree(self):
        assert qfi_ratio_scan([4, 6, 8], workers=3) == qfi_ratio_scan([4, 6, 8])

    def test_row_ratio(self):
        assert QfiRow(4, 10.0, 2.0).ratio == 5.0
