import math
import pytest
import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh

from exceptions import DomainError
import spectral.extension_spectrum as extension_spectrum
from spectral.assembly import p1_matrices
from spectral.cap_spectrum import solve_cap
from spectral.extension_spectrum import (
    assemble_weighted_forms, boundary_exponent, convergence_study, fractional_cap_eigenvalue, smallest_eigenpair,
    solve_extension, trace_profile,
)
from spectral.geometry import CapCone, HalfSphereMesh
from spectral.mu_zero import barrier_exponent, solve_mu_zero
from spectral.profiles import SampledProfile
from spectral.utils import is_close, is_spd, is_symmetric


def laplacian_1d(size: int) -> sp.csr_matrix:
    return sp.diags([[-1.0] * (size - 1), [2.0] * size, [-1.0] * (size - 1)], [-1, 0, 1], format="csr")


class TestP1Matrices:
    def test_mass_integrates_weight(self) -> None:
        nodes = np.linspace(0.0, 2.0, 21)
        K, M = p1_matrices(nodes, lambda x: 1.0 + x ** 2)
        ones = np.ones(nodes.shape[0])
        assert is_close(ones @ (M @ ones), 2.0 + 8.0 / 3.0, threshold=1e-12)
        assert is_close(K @ ones, 0.0, threshold=1e-12)

    @pytest.mark.parametrize("alpha", [-0.8, -0.2, 0.5])
    def test_singular_first_element(self, alpha: float) -> None:
        nodes = np.linspace(0.0, 1.0, 11)
        _, M = p1_matrices(nodes, lambda x: x ** alpha, points=5, left_singularity=alpha)
        ones = np.ones(nodes.shape[0])
        # only the first element is exact, the rest is a smooth Gauss rule
        assert is_close(ones @ (M @ ones), 1.0 / (1.0 + alpha), threshold=1e-5, relative=True)


class TestAssembly:
    @pytest.mark.parametrize("n, s", [(2, 0.5), (3, 0.3), (4, 0.9)])
    def test_forms_are_spd(self, n: int, s: float, half_sphere_mesh) -> None:
        cone = CapCone(n=n, theta=1.0)
        K, M, P = assemble_weighted_forms(cone, s, half_sphere_mesh(1.0, s, (16, 8)))
        assert is_symmetric(K) and is_symmetric(M)
        assert is_spd(K) and is_spd(M)
        assert P.shape == (17 * 9, K.shape[0])

    def test_dirichlet_rows_are_eliminated(self, half_sphere_mesh) -> None:
        mesh = half_sphere_mesh(1.0, 0.5, (16, 8))
        _, _, P = assemble_weighted_forms(CapCone(n=2, theta=1.0), 0.5, mesh)
        nodal = (P @ np.ones(P.shape[1])).reshape(17, 9)
        assert np.all(nodal[mesh.cap_intervals:, 0] == 0.0)
        assert np.all(nodal[:mesh.cap_intervals, 0] == 1.0)
        assert np.all(nodal[:, -1] == 1.0)

    @pytest.mark.parametrize("s", [0.0, 1.0, -0.3])
    def test_invalid_order(self, s: float, half_sphere_mesh) -> None:
        with pytest.raises(DomainError):
            assemble_weighted_forms(CapCone(n=2, theta=1.0), s, half_sphere_mesh(1.0, 0.5, (16, 8)))

    def test_mesh_for_another_cone(self, half_sphere_mesh) -> None:
        with pytest.raises(DomainError):
            assemble_weighted_forms(CapCone(n=2, theta=1.0), 0.5, half_sphere_mesh(1.1, 0.5, (16, 8)))


class TestSmallestEigenpair:
    @pytest.mark.parametrize("inner", ["direct", "cg"])
    def test_against_dense_solver(self, inner: str) -> None:
        K = laplacian_1d(30)
        M = sp.diags(np.linspace(1.0, 2.0, 30), format="csr")
        pair = smallest_eigenpair(K, M, inner=inner)
        expected = eigh(K.toarray(), M.toarray(), eigvals_only=True)[0]
        assert is_close(pair.value, expected, threshold=1e-10, relative=True)
        assert is_close(pair.vector @ (M @ pair.vector), 1.0, threshold=1e-12)
        assert np.all(pair.vector > 0)
        assert pair.converged and pair.residual <= 1e-8

    def test_unreachable_tolerance_is_flagged(self) -> None:
        """With tol = 0 the iteration stops at the round-off floor and reports it"""
        K = laplacian_1d(30)
        M = sp.diags(np.linspace(1.0, 2.0, 30), format="csr")
        pair = smallest_eigenpair(K, M, tol=0.0)
        expected = eigh(K.toarray(), M.toarray(), eigvals_only=True)[0]
        assert not pair.converged
        assert 0.0 < pair.residual <= 1e-5 * pair.value
        assert is_close(pair.value, expected, threshold=1e-10, relative=True)

    def test_unknown_inner_solver(self) -> None:
        with pytest.raises(DomainError):
            smallest_eigenpair(laplacian_1d(10), sp.eye(10), inner="gmres")


class TestFractionalCapEigenvalue:
    @pytest.mark.parametrize("n, s", [(2, 0.5), (2, 0.75), (3, 0.5)])
    def test_half_space(self, n: int, s: float, half_sphere_mesh) -> None:
        """The half-space has lambda_1^s = s (n - s) and gamma_s = s"""
        result = fractional_cap_eigenvalue(CapCone(n=n, theta=math.pi / 2), s, half_sphere_mesh(math.pi / 2, s))
        assert is_close(result.lambda1s, s * (n - s), threshold=2e-2, relative=True)
        assert is_close(result.gamma_s, s, threshold=2e-2)

    def test_half_space_trace(self, half_sphere_mesh) -> None:
        s = 0.5
        result = fractional_cap_eigenvalue(CapCone(n=2, theta=math.pi / 2), s, half_sphere_mesh(math.pi / 2, s))
        profile = trace_profile(result)
        phi = np.array([0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8])
        assert is_close(profile(phi), np.cos(phi) ** s, threshold=5e-2)
        assert np.all(profile(np.array([math.pi / 2, 2.0, 3.0])) == 0.0)
        assert profile.edge_exponent == s

    def test_exponent_range_and_monotonicity(self, half_sphere_mesh) -> None:
        s = 0.5
        narrow = fractional_cap_eigenvalue(CapCone(n=2, theta=math.pi / 3), s, half_sphere_mesh(math.pi / 3, s))
        wide = fractional_cap_eigenvalue(CapCone(n=2, theta=2 * math.pi / 3), s, half_sphere_mesh(2 * math.pi / 3, s))
        assert 0.0 < wide.gamma_s < narrow.gamma_s < 2 * s
        # gamma_s stays below the classical exponent pi / (2 theta)
        assert narrow.gamma_s < 1.5

    @pytest.mark.parametrize("s", [0.0, 0.9995, 1.0])
    def test_order_out_of_range(self, s: float) -> None:
        with pytest.raises(DomainError):
            fractional_cap_eigenvalue(CapCone(n=2, theta=1.0), s)

    def test_solve_extension_is_cached(self) -> None:
        cone = CapCone(n=2, theta=1.2)
        assert solve_extension(cone, 0.6, (16, 8)) is solve_extension(cone, 0.6, (16, 8))

    def test_round_off_levels_widen_the_error(self, monkeypatch, half_sphere_mesh) -> None:
        cone = CapCone(n=2, theta=1.0)
        mesh = half_sphere_mesh(1.0, 0.5, (16, 8))
        monkeypatch.setattr(extension_spectrum, "RESIDUAL_TOLERANCE", 0.0)
        result = fractional_cap_eigenvalue(cone, 0.5, mesh)
        assert not result.converged
        assert result.est_error > abs(result.fine_lambda - result.coarse_lambda) / 3.0

    def test_convergence_study(self) -> None:
        frame = convergence_study(CapCone(n=2, theta=1.0), 0.5, base=(16, 8), levels=2)
        assert list(frame.columns) == ["phi_cells", "psi_cells", "lambda1s", "difference"]
        assert frame["phi_cells"].tolist() == [16, 32]
        assert math.isnan(frame["difference"].iloc[0])
        assert frame["difference"].iloc[1] > 0


class TestBoundaryExponent:
    @pytest.mark.parametrize("e", [0.3, 0.5, 0.9])
    def test_power_law_profile(self, e: float) -> None:
        theta = 1.0
        mesh = HalfSphereMesh.build(theta, 128, 8, grading=2.0)
        nodes = mesh.phi_nodes[:mesh.cap_intervals + 1]
        values = ((theta - nodes) / theta) ** e * (2.0 - nodes)
        profile = SampledProfile(nodes, values, theta, edge_exponent=e)
        assert is_close(boundary_exponent(profile), e, threshold=1e-2)

    def test_window_without_nodes(self) -> None:
        nodes = np.linspace(0.0, 1.0, 11)
        profile = SampledProfile(nodes, 1.0 - nodes, 1.0)
        with pytest.raises(DomainError):
            boundary_exponent(profile)

    @pytest.mark.parametrize("s", [0.5, 0.75])
    def test_trace_is_s_holder_at_the_edge(self, s: float, half_sphere_mesh) -> None:
        """The trace vanishes like (theta - phi)^s at the edge of the cap"""
        result = fractional_cap_eigenvalue(CapCone(n=2, theta=math.pi / 2), s, half_sphere_mesh(math.pi / 2, s))
        assert is_close(boundary_exponent(trace_profile(result), window=(1e-2, 2e-1)), s, threshold=0.1)


class TestExponentBounds:
    @pytest.mark.parametrize("theta", [math.pi / 8, math.pi / 2, 3 * math.pi / 4])
    def test_nondecreasing_in_order(self, theta: float, small_shape) -> None:
        cone = CapCone(n=2, theta=theta)
        exponents = [solve_extension(cone, s, small_shape).gamma_s for s in (0.3, 0.6, 0.9)]
        assert all(b >= a - 1e-3 for a, b in zip(exponents, exponents[1:]))

    @pytest.mark.parametrize("theta, s", [(math.pi / 2, 0.9), (3 * math.pi / 4, 0.5), (math.pi / 3, 0.7)])
    def test_below_classical_exponent(self, theta: float, s: float, small_shape) -> None:
        cone = CapCone(n=2, theta=theta)
        assert solve_extension(cone, s, small_shape).gamma_s <= solve_cap(cone).gamma + 1e-3

    @pytest.mark.parametrize("s", [0.3, 0.5])
    def test_below_barrier_exponent(self, s: float, small_shape) -> None:
        cone = CapCone(n=2, theta=math.pi / 8)
        gamma_star = barrier_exponent(cone, s, solve_mu_zero(cone).mu0)
        assert solve_extension(cone, s, small_shape).gamma_s <= gamma_star + 1e-3
