import json

import numpy as np
import pytest

from entwidth.chi_criteria import chi
from entwidth.gradient_sdp import b_squared, j_squared
from entwidth.spin_ops import bloch_vector, collective_spin, squared_norm, two_point_correlator
from entwidth.states import (
    PairingConfiguration,
    domain_wall_state,
    hugging,
    majumdar_ghosh,
    mixture,
    nnn,
    product_state,
    random_pairing,
    right_neighbor,
    singlet_pairing_state,
    spiral_bloch_vectors,
)


class TestPairingConfiguration:
    def test_partition_enforced(self):
        with pytest.raises(ValueError):
            PairingConfiguration(4, ((1, 2), (2, 3)))
        with pytest.raises(ValueError):
            PairingConfiguration(4, ((1, 2),))
        with pytest.raises(ValueError):
            PairingConfiguration(2, (), {1: (0, 0, 2), 2: (0, 0, 1)})

    def test_widths(self):
        assert hugging(16).width == 16
        assert right_neighbor(16).width == 2
        assert nnn(8).width == 3
        assert PairingConfiguration.from_pairs(3, []).width == 1
        for n in (4, 8, 12):
            assert (hugging(n).width, right_neighbor(n).width, nnn(n).width) == (n, 2, 3)

    def test_parity(self):
        with pytest.raises(ValueError):
            hugging(5)
        with pytest.raises(ValueError):
            nnn(6)
        with pytest.raises(ValueError):
            majumdar_ghosh(7)

    def test_majumdar_ghosh_coverings(self):
        assert majumdar_ghosh(8).pairs == ((1, 8), (2, 3), (4, 5), (6, 7))
        assert majumdar_ghosh(8, offset=1).pairs == right_neighbor(8).pairs

    def test_json_round_trip(self):
        c = PairingConfiguration(5, ((1, 4), (2, 3)), {5: (1.0, 0.0, 0.0)})
        text = c.to_json()
        assert json.loads(text)["singles"] == [{"site": 5, "bloch": [1.0, 0.0, 0.0]}]
        assert PairingConfiguration.from_json(text) == c

    def test_malformed_json(self):
        with pytest.raises(ValueError):
            PairingConfiguration.from_dict({"pairs": [[1, 2]]})

    def test_random_pairing_respects_width(self, rng):
        for _ in range(50):
            c = random_pairing(10, 3, rng)
            assert c.width <= 3


class TestSingletStates:
    def test_two_site_amplitudes(self):
        psi = singlet_pairing_state(right_neighbor(2))
        assert np.allclose(psi, [0, 1 / np.sqrt(2), -1 / np.sqrt(2), 0])

    def test_hugging_correlators(self):
        psi = singlet_pairing_state(hugging(4))
        assert two_point_correlator(psi, 1, 4) == pytest.approx(-3)
        assert two_point_correlator(psi, 1, 2) == pytest.approx(0, abs=1e-12)

    def test_nnn_four_sites(self):
        # chi needs N >= 5; at N = 4 the same ring sum is taken by hand
        psi = singlet_pairing_state(nnn(4))
        total = sum(two_point_correlator(psi, j, (j + 1) % 4 + 1) for j in range(1, 5))
        assert total == pytest.approx(-12)

    def test_nnn_chi(self):
        assert chi(singlet_pairing_state(nnn(8)), 8) == pytest.approx(-24)

    def test_paired_sites_have_no_polarization(self):
        psi = singlet_pairing_state(nnn(8))
        for s in range(1, 9):
            assert np.allclose(bloch_vector(psi, s), 0, atol=1e-12)
        assert squared_norm(collective_spin(8), psi) == pytest.approx(0, abs=1e-12)

    def test_singles_keep_bloch_vectors(self):
        c = PairingConfiguration(4, ((2, 3),), {1: (1, 0, 0), 4: (0, -1, 0)})
        psi = singlet_pairing_state(c)
        assert np.allclose(bloch_vector(psi, 1), [1, 0, 0])
        assert np.allclose(bloch_vector(psi, 4), [0, -1, 0])


class TestOtherStates:
    def test_domain_wall(self):
        assert j_squared(domain_wall_state(4)) == pytest.approx(8)
        assert b_squared(domain_wall_state(4)) == pytest.approx(104)
        assert j_squared(domain_wall_state(6)) == pytest.approx(12)
        assert np.argmax(np.abs(domain_wall_state(4))) == 0b0011

    def test_product_state(self):
        assert np.allclose(product_state([[0, 0, 1]] * 3), np.eye(8)[0])
        assert np.allclose(product_state([[1, 0, 0]]), [1 / np.sqrt(2), 1 / np.sqrt(2)])
        with pytest.raises(ValueError):
            product_state([[1, 1, 0]])

    def test_product_state_bloch(self, rng):
        vecs = rng.normal(size=(4, 3))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        psi = product_state(vecs)
        for j, v in enumerate(vecs, start=1):
            assert np.allclose(bloch_vector(psi, j), v, atol=1e-10)

    def test_spiral_chi(self):
        for n in (6, 8, 11):
            psi = product_state(spiral_bloch_vectors(n))
            assert chi(psi, n) == pytest.approx(-n * np.sin(3 * np.pi / n) / np.sin(np.pi / n), abs=1e-9)


class TestMixture:
    def test_identity_weight(self):
        psi = singlet_pairing_state(right_neighbor(2))
        assert np.allclose(mixture([psi, np.eye(4)[0]], [1, 0]), np.outer(psi, psi.conj()))

    @pytest.mark.parametrize("p, point", [(0.5, (4, 64)), (0.25, (6, 84))])
    def test_line_points(self, p, point):
        rho = mixture([singlet_pairing_state(right_neighbor(4)), domain_wall_state(4)], [p, 1 - p])
        assert (j_squared(rho), b_squared(rho)) == pytest.approx(point)
        assert b_squared(rho) == pytest.approx(24 + 10 * j_squared(rho))

    def test_bad_weights(self):
        psi = np.eye(2)[0]
        with pytest.raises(ValueError):
            mixture([psi, psi], [0.7, 0.7])
        with pytest.raises(ValueError):
            mixture([psi], [1.5])
        with pytest.raises(ValueError):
            mixture([psi, psi], [1.0])
