"""Classical (s = 1) spectral quantities of spherical caps: lambda_1(theta), gamma(theta) and the aperture of a given exponent."""
import math
from dataclasses import dataclass
import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded
from scipy.optimize import bisect

from exceptions import DomainError, NumericalFailureError
from settings import CAP_MESH_NODES
from .assembly import p1_matrices
from .decorators import data_cache, log
from .geometry import CapCone, Mesh1D
from .special_functions import FracParams, exponent_from_eigenvalue
from .utils import max_normalize, richardson_extrapolate

MAX_ITERATIONS = 10_000
RAYLEIGH_TOLERANCE = 1e-12
# iterations without a smaller Rayleigh step before the round-off floor is assumed
STAGNATION_STEPS = 20
# scaled residual accepted at the round-off floor; the eigenvalue error is of its square
STAGNATION_RESIDUAL = 1e-5
# attainable apertures for aperture_from_exponent
APERTURE_BRACKET = (1e-3, math.pi - 1e-3)


@dataclass(frozen=True, eq=False)
class CapEigenResult:
    lambda1: float
    gamma: float
    eigenfunction: np.ndarray
    mesh: Mesh1D
    est_error: float
    iterations: int = 0


def sphere_weight(n: int):
    """Axisymmetric surface weight sin^{n-2}(phi) of S^{n-1}."""
    if n == 2:
        return lambda phi: np.ones_like(phi)
    return lambda phi: np.sin(phi) ** (n - 2)


def cap_matrices(n: int, mesh: Mesh1D):
    """Stiffness and mass of -(sin^{n-2} u')' = lambda sin^{n-2} u, three Gauss points per element."""
    return p1_matrices(mesh.nodes, sphere_weight(n), points=3)


def _to_banded(K) -> np.ndarray:
    size = K.shape[0]
    ab = np.zeros((2, size))
    ab[1] = K.diagonal()
    ab[0, 1:] = K.diagonal(1)
    return ab


def _check_mesh(cone: CapCone, mesh: Mesh1D) -> None:
    if not math.isclose(mesh.end, cone.theta, rel_tol=1e-14, abs_tol=1e-15):
        raise DomainError(f"Expected the mesh to end at theta = {cone.theta}, instead found {mesh.end}.")


def scaled_residual(K, M, x: np.ndarray, rayleigh: float) -> float:
    """||K x - rayleigh M x|| / (rayleigh ||M x||)."""
    Mx = M @ x
    return float(np.linalg.norm(K @ x - rayleigh * Mx) / (abs(rayleigh) * np.linalg.norm(Mx)))


def smallest_dirichlet_eigenpair(n: int, mesh: Mesh1D) -> tuple[float, np.ndarray, int]:
    """Inverse power iteration for the first eigenpair, Dirichlet at the last node, natural condition at phi = 0.

    The iteration stops once successive Rayleigh quotients agree to 1e-12, or once they stop improving for
    STAGNATION_STEPS iterations with a scaled residual of at most 1e-5 (the round-off floor of fine meshes).

    Returns:
        tuple[float, np.ndarray, int]: Eigenvalue, nodal eigenfunction (zero at the last node) and iteration count.

    Raises:
        NumericalFailureError: If neither criterion is met within the iteration cap.
    """
    K, M = cap_matrices(n, mesh)
    K = K[:-1, :-1]
    M = M[:-1, :-1]
    factor = cholesky_banded(_to_banded(K), lower=False)

    # hat-function interpolant of (theta - phi)
    x = mesh.end - mesh.nodes[:-1]
    rayleigh = (x @ (K @ x)) / (x @ (M @ x))
    best_step = math.inf
    stalled = 0
    for iteration in range(1, MAX_ITERATIONS + 1):
        x = cho_solve_banded((factor, False), M @ x)
        x /= np.abs(x).max()
        previous, rayleigh = rayleigh, (x @ (K @ x)) / (x @ (M @ x))
        step = abs(rayleigh - previous)
        if step <= RAYLEIGH_TOLERANCE * abs(rayleigh):
            break
        if step < best_step:
            best_step, stalled = step, 0
        else:
            stalled += 1
        if stalled >= STAGNATION_STEPS and scaled_residual(K, M, x, rayleigh) <= STAGNATION_RESIDUAL:
            log(f"Inverse iteration at round-off after {iteration} iterations: lambda={rayleigh:.15g} step={step:.3g}")
            break
    else:
        residual = scaled_residual(K, M, x, rayleigh)
        raise NumericalFailureError(f"Inverse iteration did not converge in {MAX_ITERATIONS} iterations.", residual, MAX_ITERATIONS)

    return float(rayleigh), np.append(x, 0.0), iteration


def classical_cap_eigenvalue(cone: CapCone, mesh: Mesh1D | None = None) -> CapEigenResult:
    """First Dirichlet eigenvalue lambda_1(theta) of the Laplace-Beltrami operator on the cap S^{n-1} cap C_theta.

    The axisymmetric eigenfunction solves the Sturm-Liouville problem -(sin^{n-2} u')' = lambda sin^{n-2} u on (0, theta),
    u(theta) = 0. The value is Richardson-extrapolated from `mesh` and its nested refinement.

    Args:
        cone (CapCone): The cone C_theta.
        mesh (Mesh1D | None, optional): Mesh of [0, theta]. Defaults to 1024 uniform nodes.

    Returns:
        CapEigenResult: lambda_1, gamma, the max-normalized eigenfunction on `mesh` and the error estimate.

    Raises:
        DomainError: If the mesh does not end at theta.
        NumericalFailureError: If the eigensolve does not converge.

    Examples:
        >>> classical_cap_eigenvalue(CapCone(n=2, theta=math.pi / 4)).lambda1
        4.000000000...
    """
    mesh = mesh if mesh is not None else Mesh1D.uniform(cone.theta, CAP_MESH_NODES)
    _check_mesh(cone, mesh)

    coarse, eigenfunction, iterations = smallest_dirichlet_eigenpair(cone.n, mesh)
    fine, _, _ = smallest_dirichlet_eigenpair(cone.n, mesh.refine())
    lambda1, est_error = richardson_extrapolate(coarse, fine)
    gamma = exponent_from_eigenvalue(lambda1, FracParams.classical_mode(cone.n))

    eigenfunction = max_normalize(eigenfunction)
    eigenfunction.setflags(write=False)
    return CapEigenResult(lambda1=lambda1, gamma=gamma, eigenfunction=eigenfunction, mesh=mesh, est_error=est_error, iterations=iterations)


@data_cache(maxsize=512)
def solve_cap(cone: CapCone, count: int = CAP_MESH_NODES) -> CapEigenResult:
    """Cached `classical_cap_eigenvalue` on a uniform mesh with `count` nodes."""
    result = classical_cap_eigenvalue(cone, Mesh1D.uniform(cone.theta, count))
    log(f"cap eigenvalue n={cone.n} theta={cone.theta:.10g}: lambda1={result.lambda1:.12g} est_error={result.est_error:.3g}")
    return result


def classical_exponent(cone: CapCone, mesh: Mesh1D | None = None) -> float:
    """Homogeneity gamma(theta) of the positive harmonic function of C_theta vanishing on its boundary."""
    if mesh is None:
        return solve_cap(cone).gamma
    return classical_cap_eigenvalue(cone, mesh).gamma


def aperture_from_exponent(n: int, gamma_target: float, count: int = CAP_MESH_NODES) -> float:
    """Half-aperture theta with gamma(theta) = gamma_target, found by bisection (gamma decreases in theta).

    Args:
        n (int): Dimension.
        gamma_target (float): Target exponent, e.g. 2 for the narrow/wide threshold.
        count (int, optional): Mesh nodes of each eigensolve. Defaults to 1024.

    Returns:
        float: theta with |gamma(theta) - gamma_target| <= 1e-6.

    Raises:
        DomainError: If gamma_target lies outside the attainable range.
    """
    def gap(theta: float) -> float:
        return solve_cap(CapCone(n=n, theta=theta), count).gamma - gamma_target

    lo, hi = APERTURE_BRACKET
    g_lo, g_hi = gap(lo), gap(hi)
    if not g_lo > 0 > g_hi:
        raise DomainError(
            f"Expected gamma_target between {g_hi + gamma_target:.6g} and {g_lo + gamma_target:.6g}, instead found {gamma_target}."
        )
    return float(bisect(gap, lo, hi, xtol=1e-12, maxiter=200))
