"""The limit coefficient mu_0(theta) of narrow caps, its minimizer psi and the barrier exponent gamma_s*(theta).

mu_0 minimizes (int |grad u|^2 - 2n u^2) / (int |u|)^2 over the cap. Scaling the Euler-Lagrange equation
-Delta psi = 2n psi + mu_0 int psi by mu_0 int psi turns it into the linear problem (-Delta - 2n) w = 1, w = 0 on the
boundary of the cap, and mu_0 = 1 / int w.
"""
import math
from dataclasses import dataclass
import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

from exceptions import AdmissibilityError, DomainError, NumericalFailureError
from settings import CAP_MESH_NODES
from .cap_spectrum import aperture_from_exponent, cap_matrices, classical_cap_eigenvalue
from .decorators import data_cache, log
from .geometry import CapCone, Mesh1D
from .profiles import SampledProfile
from .special_functions import FracParams, normalization_constant, sphere_area
from .utils import richardson_extrapolate

ADMISSIBILITY_MARGIN = 1e-8
MAX_ITERATIONS = 10_000
FIXED_POINT_TOLERANCE = 1e-13


@dataclass(frozen=True, eq=False)
class MuZeroResult:
    n: int
    theta: float
    mu0: float
    w: np.ndarray
    psi: np.ndarray
    lambda1: float
    est_error: float
    mesh: Mesh1D
    mesh_mu0: float

    def profile(self) -> SampledProfile:
        """psi as an angular profile vanishing outside the cap."""
        return SampledProfile(self.mesh.nodes, self.psi, self.theta, edge_exponent=1.0)


class _ShiftedOperator:
    """Interior-node matrices of -Delta - 2n on a cap mesh and the weighted integration vector of S^{n-1}."""

    def __init__(self, n: int, mesh: Mesh1D) -> None:
        K, M = cap_matrices(n, mesh)
        self.K = K[:-1, :-1].tocsr()
        self.M = M[:-1, :-1].tocsr()
        self.A = (self.K - 2.0 * n * self.M).tocsr()
        # mass times the constant function, including the Dirichlet node column
        self.load = np.asarray(M[:-1, :].sum(axis=1)).ravel()
        self.area = sphere_area(n - 1)

        ab = np.zeros((2, self.A.shape[0]))
        ab[1] = self.A.diagonal()
        ab[0, 1:] = self.A.diagonal(1)
        try:
            self._factor = cholesky_banded(ab, lower=False)
        except LinAlgError as exc:
            raise NumericalFailureError("Expected -Delta - 2n to be positive definite on the cap, the factorization failed.") from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve_banded((self._factor, False), rhs)

    def integral(self, u: np.ndarray) -> float:
        """int_{cap} u d sigma of the P1 function with interior values u."""
        return self.area * float(self.load @ u)

    def quotient(self, u: np.ndarray) -> float:
        return self.area * float(u @ (self.A @ u)) / self.integral(u) ** 2


def is_admissible(n: int, lambda1: float) -> bool:
    """mu_0 is defined on caps with lambda1(theta) > 2n."""
    return lambda1 >= 2.0 * n + ADMISSIBILITY_MARGIN


@data_cache(maxsize=16)
def narrow_threshold(n: int) -> float:
    """Half-aperture where gamma(theta) = 2, i.e. lambda1(theta) = 2n; NaN if the bisection fails."""
    try:
        return aperture_from_exponent(n, 2.0)
    except NumericalFailureError as exc:
        log(f"Threshold aperture for n={n} unavailable: {exc}")
        return math.nan


def _check_admissible(cone: CapCone, mesh: Mesh1D) -> float:
    lambda1 = classical_cap_eigenvalue(cone, mesh).lambda1
    if not is_admissible(cone.n, lambda1):
        threshold = narrow_threshold(cone.n)
        raise AdmissibilityError(
            f"Expected a narrow cap with lambda1 > 2n = {2 * cone.n}, instead found lambda1 = {lambda1:.10g} "
            f"(mu_0 is defined for theta < {threshold:.10g}).",
            threshold_theta=threshold,
            lambda1=lambda1,
        )
    return lambda1


def _linear_level(n: int, mesh: Mesh1D) -> tuple[float, np.ndarray]:
    op = _ShiftedOperator(n, mesh)
    w = op.solve(op.load)
    return 1.0 / op.integral(w), np.append(w, 0.0)


def mu_zero_cap(cone: CapCone, mesh: Mesh1D | None = None) -> MuZeroResult:
    """mu_0(theta) through the linear reduction (-Delta - 2n) w = 1 on the cap, mu_0 = 1 / int w.

    The value is Richardson-extrapolated from `mesh` and its nested refinement.

    Args:
        cone (CapCone): A narrow cap with lambda1(theta) > 2n.
        mesh (Mesh1D | None, optional): Mesh of [0, theta]. Defaults to 1024 uniform nodes.

    Returns:
        MuZeroResult: mu_0, w and psi = w / max(w) on `mesh`, lambda1 and the error estimate.

    Raises:
        AdmissibilityError: If lambda1(theta) < 2n + 1e-8, naming the threshold aperture where gamma(theta) = 2.
        NumericalFailureError: If the linear system is singular.

    Examples:
        >>> mu_zero_cap(CapCone(n=2, theta=math.pi / 8)).mu0  # 16 / (4 - pi)
        18.6391...
    """
    mesh = mesh if mesh is not None else Mesh1D.uniform(cone.theta, CAP_MESH_NODES)
    lambda1 = _check_admissible(cone, mesh)

    coarse, w = _linear_level(cone.n, mesh)
    fine, _ = _linear_level(cone.n, mesh.refine())
    mu0, est_error = richardson_extrapolate(coarse, fine)
    if not mu0 > 0:
        raise NumericalFailureError(f"Expected a positive mu_0, instead found {mu0}.")

    psi = w / w.max()
    w.setflags(write=False)
    psi.setflags(write=False)
    return MuZeroResult(
        n=cone.n, theta=cone.theta, mu0=mu0, w=w, psi=psi, lambda1=lambda1, est_error=est_error, mesh=mesh, mesh_mu0=coarse
    )


@data_cache(maxsize=256)
def solve_mu_zero(cone: CapCone, count: int = CAP_MESH_NODES) -> MuZeroResult:
    """Cached `mu_zero_cap` on a uniform mesh with `count` nodes."""
    result = mu_zero_cap(cone, Mesh1D.uniform(cone.theta, count))
    log(f"mu_0 n={cone.n} theta={cone.theta:.10g}: mu0={result.mu0:.12g} est_error={result.est_error:.3g}")
    return result


def rayleigh_quotient(cone: CapCone, mesh: Mesh1D, u: np.ndarray) -> float:
    """Discrete quotient (u^T K u - 2n u^T M u) / (int u)^2 of a nodal vector (its value at theta is ignored).

    Raises:
        DomainError: If u has the wrong length or zero integral.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != mesh.nodes.shape:
        raise DomainError(f"Expected {mesh.count} nodal values, instead found {u.shape}.")
    op = _ShiftedOperator(cone.n, mesh)
    if op.integral(u[:-1]) == 0:
        raise DomainError("Expected a trial function with nonzero integral.")
    return op.quotient(u[:-1])


def _fixed_point_level(n: int, mesh: Mesh1D) -> float:
    op = _ShiftedOperator(n, mesh)
    ab = np.zeros((2, op.K.shape[0]))
    ab[1] = op.K.diagonal()
    ab[0, 1:] = op.K.diagonal(1)
    factor = cholesky_banded(ab, lower=False)

    u = mesh.end - mesh.nodes[:-1]
    u /= op.integral(u)
    q = op.quotient(u)
    for iteration in range(1, MAX_ITERATIONS + 1):
        # Euler-Lagrange system with the current quotient as multiplier
        rhs = 2.0 * n * (op.M @ u) + q * op.integral(u) * op.load
        v = np.clip(cho_solve_banded((factor, False), rhs), 0.0, None)
        v /= op.integral(v)
        previous, q = q, op.quotient(v)
        change = float(np.abs(v - u).max() / np.abs(v).max())
        u = v
        if abs(q - previous) <= FIXED_POINT_TOLERANCE * abs(q) and change <= 1e-10:
            break
    else:
        raise NumericalFailureError(f"Fixed-point iteration did not converge in {MAX_ITERATIONS} iterations.", iterations=MAX_ITERATIONS)
    log(f"Rayleigh fixed point: {iteration} iterations, quotient={q:.15g}")
    return q


def mu_zero_rayleigh(cone: CapCone, mesh: Mesh1D | None = None) -> float:
    """mu_0(theta) by direct minimization of the discrete quotient over nonnegative nodal vectors.

    Normalized fixed-point iteration on the Euler-Lagrange system K u = 2n M u + mu (int u) 1, projected onto u >= 0,
    Richardson-extrapolated like `mu_zero_cap`. Used as an independent cross-check of the linear reduction.

    Raises:
        AdmissibilityError: If lambda1(theta) < 2n + 1e-8.
        NumericalFailureError: If the iteration does not settle.
    """
    mesh = mesh if mesh is not None else Mesh1D.uniform(cone.theta, CAP_MESH_NODES)
    _check_admissible(cone, mesh)
    coarse = _fixed_point_level(cone.n, mesh)
    fine = _fixed_point_level(cone.n, mesh.refine())
    return richardson_extrapolate(coarse, fine)[0]


def euler_lagrange_residual(result: MuZeroResult, cone: CapCone) -> float:
    """Sup norm of ((-Delta_h - 2n) psi - mu_0 int psi) / (lumped mass) over the interior nodes of the result's mesh."""
    op = _ShiftedOperator(cone.n, result.mesh)
    psi = result.psi[:-1]
    residual = op.A @ psi - result.mesh_mu0 * op.integral(psi) * op.load
    return float(np.abs(residual / op.load).max())


def barrier_exponent(cone: CapCone, s: float, mu0: float) -> float:
    """Homogeneity gamma_s*(theta) = 2s - s C(n, s) / mu_0(theta) of the barrier built on psi.

    Args:
        cone (CapCone): The cone C_theta.
        s (float): Fractional order in (0, 1); s = 1 is classical mode and gives 2.
        mu0 (float): mu_0(theta) > 0.

    Returns:
        float: gamma_s*, strictly below 2s for s < 1.

    Raises:
        DomainError: If mu0 <= 0.
    """
    if not mu0 > 0:
        raise DomainError(f"Expected mu0 > 0, instead found {mu0}.")
    params = FracParams.classical_mode(cone.n) if s == 1.0 else FracParams(n=cone.n, s=s)
    return 2.0 * s - s * normalization_constant(params) / mu0
