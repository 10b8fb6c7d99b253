import numpy as np
import pytest

from entwidth.gradient_sdp import (
    ParetoRow,
    b_squared,
    b_squared_classical,
    b_squared_operator,
    b_squared_singlet,
    bipartition_blocks,
    check_partition_inequality,
    conjecture_check,
    conjecture_line,
    cut_sites,
    endpoint_mixture,
    expectation_pairs,
    gradient_objective,
    half_chain_products,
    j_squared,
    nearest_neighbor_limit,
    optimal_intercept_slope,
    scatter_samples,
    sdp_intercept,
    singlet_pair_b_squared,
)
from entwidth.linalg_core import to_density
from entwidth.states import (
    domain_wall_state,
    haar_state,
    hugging,
    pairing_state,
    random_pairing,
    right_neighbor,
    singlet_pairing_state,
)


class TestOperators:
    def test_two_site_values(self):
        up_down = domain_wall_state(2)
        assert b_squared(up_down) == pytest.approx(8)
        assert j_squared(up_down) == pytest.approx(4)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_endpoints(self, n):
        assert b_squared(singlet_pairing_state(right_neighbor(n))) == pytest.approx(b_squared_singlet(n), abs=1e-9)
        assert j_squared(singlet_pairing_state(right_neighbor(n))) == pytest.approx(0, abs=1e-9)
        assert b_squared(domain_wall_state(n)) == pytest.approx(b_squared_classical(n), abs=1e-9)
        assert j_squared(domain_wall_state(n)) == pytest.approx(2 * n, abs=1e-9)

    def test_n4_constants(self):
        assert b_squared_classical(4) == 104
        assert b_squared_singlet(4) == 24
        assert nearest_neighbor_limit(4) == 108

    def test_density_input_matches_vector(self, rng):
        psi = haar_state(4, rng)
        assert b_squared(to_density(psi)) == pytest.approx(b_squared(psi))

    def test_singlet_pair_identity(self):
        for config in (right_neighbor(6), hugging(6)):
            assert b_squared(singlet_pairing_state(config)) == pytest.approx(singlet_pair_b_squared(config))
        with pytest.raises(ValueError):
            singlet_pair_b_squared(random_pairing(5, 2, np.random.default_rng(0)))

    def test_odd_chain_rejected(self):
        with pytest.raises(ValueError):
            b_squared_operator(5)

    def test_nearest_neighbour_states_stay_below_limit(self, rng):
        for n in (4, 6):
            b2 = b_squared_operator(n)
            for _ in range(300):
                c = random_pairing(n, 2, rng)
                psi = pairing_state(c, {p: haar_state(2, rng) for p in c.pairs})
                assert np.vdot(psi, b2 @ psi).real <= nearest_neighbor_limit(n) + 1e-9


class TestSdp:
    def test_blocks(self):
        assert cut_sites(2) == (1, 2)
        assert bipartition_blocks(4, [1, 3]) == ((1,), (4,))
        with pytest.raises(ValueError):
            bipartition_blocks(4, [4])

    def test_objective_symmetric(self):
        c = gradient_objective(4, 10)
        assert np.allclose(c, c.T)

    def test_half_chain_intercept(self):
        r = sdp_intercept(4, 10, [2])
        assert r.intercept == pytest.approx(24, abs=1e-3)
        assert r.intercept >= -r.optimum - 1e-12
        d = r.to_dict()
        assert d["partitions"] == [[[1, 2], [3, 4]]]
        assert d["slope"] == 10

    def test_two_cut_family(self):
        r = sdp_intercept(4, 10, [1, 3])
        assert r.intercept == pytest.approx(50.2, abs=0.2)

    def test_ppt_states_respect_intercept(self, rng):
        # products across 12|34 are PPT across that cut
        a = sdp_intercept(4, 10, [2]).intercept
        for _ in range(200):
            psi = np.kron(haar_state(2, rng), haar_state(2, rng))
            assert not check_partition_inequality(psi, 4, 10, a).violated

    def test_size_limit(self):
        with pytest.raises(ValueError):
            sdp_intercept(8, 10, [4])

    def test_optimal_slope_on_grid(self):
        rows = [ParetoRow(m, (a,)) for m, a in [(10, 50), (14, 30), (16, 24.0004), (18, 24)]]
        assert optimal_intercept_slope(rows, 24) == 16
        assert optimal_intercept_slope(rows, 10) is None
        assert ParetoRow(1.0, (3.0, 5.0)).joint == 5.0


class TestConjecture:
    def test_line_through_endpoints(self):
        a, m = conjecture_line(4)
        assert (a, m) == (24, 10)

    @pytest.mark.parametrize("n", [4, 6])
    def test_mixtures_lie_on_line(self, n):
        a, m = conjecture_line(n)
        for p in np.linspace(0, 1, 7):
            rho = endpoint_mixture(n, p)
            assert b_squared(rho) == pytest.approx(a + m * j_squared(rho), abs=1e-9)

    def test_half_chain_products_normalized(self, rng):
        s = half_chain_products(6, 5, rng)
        assert s.shape == (5, 64)
        np.testing.assert_allclose(np.linalg.norm(s, axis=1), 1)

    def test_expectation_pairs(self, rng):
        psi = haar_state(4, rng)
        np.testing.assert_allclose(expectation_pairs(psi[None], 4)[0], [j_squared(psi), b_squared(psi)])

    @pytest.mark.parametrize("n", [4, 6])
    def test_no_violations(self, n):
        r = conjecture_check(n, 2000, seed=1)
        assert r.violations == 0 and r.min_margin > -1e-6
        assert r.histogram[0].sum() == 2000

    def test_deterministic(self):
        assert conjecture_check(4, 100, seed=5).min_margin == conjecture_check(4, 100, seed=5).min_margin

    def test_size_limits(self):
        with pytest.raises(ValueError):
            conjecture_check(10, 10)
        with pytest.raises(ValueError):
            conjecture_check(5, 10)


class TestScatter:
    def test_product_kinds_respect_line(self):
        for kind in ("12|34", "12|34-same"):
            pts = scatter_samples(kind, 2000, seed=2)
            assert np.all(pts[:, 1] <= 24 + 10 * pts[:, 0] + 1e-9)

    def test_hugging_kind_breaks_line(self):
        pts = scatter_samples("14|23", 2000, seed=2)
        assert np.any(pts[:, 1] > 24 + 10 * pts[:, 0] + 1e-6)

    def test_hugging_pair_layout(self):
        singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
        # the 14|23 layout of two singlets is the hugging configuration
        t = np.einsum("i,j->ij", singlet, singlet).reshape(2, 2, 2, 2).transpose(0, 2, 3, 1).reshape(16)
        np.testing.assert_allclose(t, singlet_pairing_state(hugging(4)), atol=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            scatter_samples("13|24", 5)
