import numpy as np
import pytest

from entwidth.linalg_core import kron, partial_transpose, SX, SY, SZ
from entwidth.sdp import SdpNotConverged, SdpProblem, solve_sdp

HEIS = sum(kron(s, s) for s in (SX, SY, SZ))


def random_symmetric(dim, rng, complex_=False):
    a = rng.normal(size=(dim, dim))
    if complex_:
        a = a + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def assert_feasible(sol, problem, tol=1e-7):
    rho = sol.rho
    assert np.trace(rho).real == pytest.approx(1, abs=1e-9)
    for sites in problem.blocks:
        m = partial_transpose(rho, sites) if sites else rho
        assert np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= -tol


class TestProblem:
    def test_rejects_bad_objectives(self):
        with pytest.raises(ValueError):
            SdpProblem(np.zeros((4, 3)))
        with pytest.raises(ValueError):
            SdpProblem(np.array([[0, 1], [0, 0]], dtype=float))

    def test_rejects_bad_sites(self):
        with pytest.raises(ValueError):
            SdpProblem(np.eye(4), ((3,),))
        with pytest.raises(ValueError):
            SdpProblem(np.eye(4), ((),))

    def test_blocks_include_identity(self):
        p = SdpProblem(np.eye(8), ((2, 1),))
        assert p.blocks == ((), (1, 2)) and p.n_qubits == 3


class TestSolver:
    @pytest.mark.parametrize("complex_", [False, True])
    def test_unconstrained_is_min_eigenvalue(self, rng, complex_):
        c = random_symmetric(8, rng, complex_)
        p = SdpProblem(c)
        sol = solve_sdp(p)
        assert sol.optimum == pytest.approx(np.linalg.eigvalsh(c).min(), abs=1e-5)
        assert sol.dual_bound <= sol.optimum + 1e-12
        assert sol.duality_gap <= 1e-5 * (1 + abs(sol.optimum))
        assert_feasible(sol, p)

    def test_ppt_heisenberg_pair(self):
        # the singlet reaches -3; PPT states cannot go below -1
        assert solve_sdp(SdpProblem(HEIS)).optimum == pytest.approx(-3, abs=1e-5)
        sol = solve_sdp(SdpProblem(HEIS, ((1,),)))
        assert sol.optimum == pytest.approx(-1, abs=1e-5)
        assert sol.dual_bound <= -1 + 1e-9

    def test_weak_duality_with_cuts(self, rng):
        c = random_symmetric(16, rng)
        p = SdpProblem(c, ((1,), (1, 2)))
        sol = solve_sdp(p)
        assert sol.dual_bound <= sol.optimum
        assert sol.optimum >= np.linalg.eigvalsh(c).min() - 1e-9
        assert sol.min_block_eigenvalue >= -1e-7
        assert_feasible(sol, p)

    def test_not_converged_carries_bracket(self, rng):
        c = random_symmetric(8, rng)
        with pytest.raises(SdpNotConverged) as err:
            solve_sdp(SdpProblem(c, ((1,),)), gap_tol=1e-14, max_outer=2)
        assert err.value.lower <= err.value.upper

    def test_matches_cvxpy(self, rng):
        cp = pytest.importorskip("cvxpy")
        for complex_ in (False, True):
            c = random_symmetric(8, rng, complex_)
            sol = solve_sdp(SdpProblem(c, ((1,), (3,))))
            rho = cp.Variable((8, 8), hermitian=True)
            cons = [rho >> 0, cp.real(cp.trace(rho)) == 1]
            for dims_keep in (0, 2):
                cons.append(cp.partial_transpose(rho, dims=(2, 2, 2), axis=dims_keep) >> 0)
            prob = cp.Problem(cp.Minimize(cp.real(cp.trace(c @ rho))), cons)
            prob.solve(solver="CLARABEL")
            assert sol.optimum == pytest.approx(prob.value, abs=1e-5)
