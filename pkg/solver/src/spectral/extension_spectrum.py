"""The fractional cap eigenvalue lambda_1^s(theta) and exponent gamma_s(theta).

lambda_1^s is the first eigenvalue of -div(y^{1-2s} grad u) = lambda y^{1-2s} u on the upper half-sphere S^n_+,
with u = 0 on the part of the equator S^{n-1} outside the cap and natural conditions elsewhere. Axisymmetric
functions are parameterized by (phi, psi): the point (cos(psi) sigma(phi), sin(psi)) with sigma on S^{n-1} at angle
phi from the axis, so that y = sin(psi) and the metric is dpsi^2 + cos^2(psi) dsigma^2. The principal eigenfunction is
unique and invariant under rotations fixing the axis, hence axisymmetric.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple
import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.sparse.linalg import splu, cg, LinearOperator

from exceptions import DomainError, NumericalFailureError
from settings import EXTENSION_MESH, MAX_FRACTIONAL_ORDER
from .assembly import p1_matrices
from .cap_spectrum import sphere_weight
from .decorators import data_cache, log
from .geometry import CapCone, HalfSphereMesh, default_grading
from .profiles import SampledProfile
from .special_functions import FracParams, exponent_from_eigenvalue
from .utils import max_normalize, richardson_extrapolate

MAX_ITERATIONS = 10_000
RESIDUAL_TOLERANCE = 1e-8
CG_TOLERANCE = 1e-10
QUADRATURE_POINTS = 5
# iterations without a smaller Rayleigh step before the round-off floor is assumed
STAGNATION_STEPS = 20
# largest residual, relative to lambda, accepted at the round-off floor
STAGNATION_RESIDUAL = 1e-5


class WeightedForms(NamedTuple):
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    prolongation: sp.csr_matrix


class Eigenpair(NamedTuple):
    value: float
    vector: np.ndarray
    residual: float
    converged: bool


@dataclass(frozen=True, eq=False)
class ExtensionEigenResult:
    n: int
    s: float
    theta: float
    lambda1s: float
    gamma_s: float
    eigenvector: np.ndarray
    trace: np.ndarray
    mesh: HalfSphereMesh
    est_error: float
    coarse_lambda: float
    fine_lambda: float
    converged: bool = True


def check_order(s: float) -> None:
    if not 0.0 < s <= MAX_FRACTIONAL_ORDER:
        raise DomainError(f"Expected s in (0, {MAX_FRACTIONAL_ORDER}] for extension solves, instead found {s}.")


def _psi_weights(n: int, s: float):
    alpha = 1.0 - 2.0 * s

    def radial(psi: np.ndarray) -> np.ndarray:
        return np.sin(psi) ** alpha * np.cos(psi) ** (n - 1)

    def tangential(psi: np.ndarray) -> np.ndarray:
        return np.sin(psi) ** alpha * np.cos(psi) ** (n - 3)

    return radial, tangential


def _dof_map(mesh: HalfSphereMesh) -> tuple[np.ndarray, int]:
    """Degree of freedom of every node: -1 on the Dirichlet set, one shared index for the pole psi = pi/2."""
    n_phi, n_psi = mesh.shape
    nodes = np.arange((n_phi + 1) * (n_psi + 1)).reshape(n_phi + 1, n_psi + 1)
    dof = np.full(nodes.shape, -1, dtype=int)

    free = np.ones(nodes.shape, dtype=bool)
    free[mesh.cap_intervals:, 0] = False
    free[:, -1] = False
    count = int(free.sum())
    dof[free] = np.arange(count)
    dof[:, -1] = count
    return dof.ravel(), count + 1


def assemble_weighted_forms(cone: CapCone, s: float, mesh: HalfSphereMesh) -> WeightedForms:
    """Reduced stiffness and mass of the weighted forms on S^n_+.

        a(u, u) = int int sin(psi)^{1-2s} cos^{n-1}(psi) sin^{n-2}(phi) [u_psi^2 + u_phi^2 / cos^2(psi)] dphi dpsi
        m(u, u) = int int sin(psi)^{1-2s} cos^{n-1}(psi) sin^{n-2}(phi) u^2 dphi dpsi

    Bilinear elements on the tensor mesh. Since the weights factor in phi and psi, the matrices are Kronecker products of
    weighted one-dimensional P1 matrices. Elements touching psi = 0 use Gauss-Jacobi rules exact for psi^{1-2s}.
    Nodes on {psi = 0, phi >= theta} are eliminated and the psi = pi/2 row, a single point of S^n, is one degree of
    freedom (its phi-gradient contribution vanishes, so those rows of the tangential mass are dropped).

    Args:
        cone (CapCone): The cone C_theta.
        s (float): Fractional order in (0, 1).
        mesh (HalfSphereMesh): Tensor mesh with theta as a phi node.

    Returns:
        WeightedForms: Stiffness and mass on the free degrees of freedom, and the prolongation to all nodes.

    Raises:
        DomainError: If s is out of range or the mesh does not match the cone.
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"Expected s in (0, 1), instead found {s}.")
    if mesh.theta != cone.theta:
        raise DomainError(f"Expected a mesh built for theta = {cone.theta}, instead found {mesh.theta}.")

    alpha = 1.0 - 2.0 * s
    radial, tangential = _psi_weights(cone.n, s)
    K_phi, M_phi = p1_matrices(mesh.phi_nodes, sphere_weight(cone.n), points=QUADRATURE_POINTS)
    K_psi, M_psi = p1_matrices(mesh.psi_nodes, radial, points=QUADRATURE_POINTS, left_singularity=alpha)
    _, T_psi = p1_matrices(mesh.psi_nodes, tangential, points=QUADRATURE_POINTS, left_singularity=alpha)

    keep = np.ones(T_psi.shape[0])
    keep[-1] = 0.0
    T_psi = sp.diags(keep) @ T_psi @ sp.diags(keep)

    K = sp.kron(M_phi, K_psi) + sp.kron(K_phi, T_psi)
    M = sp.kron(M_phi, M_psi)

    dof, count = _dof_map(mesh)
    rows = np.flatnonzero(dof >= 0)
    P = sp.csr_matrix((np.ones(rows.shape[0]), (rows, dof[rows])), shape=(dof.shape[0], count))
    stiffness = (P.T @ K @ P).tocsr()
    mass = (P.T @ M @ P).tocsr()
    return WeightedForms(stiffness, mass, P)


def _inner_solver(stiffness: sp.csr_matrix, inner: str):
    if inner == "direct":
        lu = splu(stiffness.tocsc())
        return lambda b, x0: lu.solve(b)
    if inner == "cg":
        inv_diag = 1.0 / stiffness.diagonal()
        preconditioner = LinearOperator(stiffness.shape, matvec=lambda r: inv_diag * r)

        def solve(b: np.ndarray, x0: np.ndarray) -> np.ndarray:
            x, info = cg(stiffness, b, x0=x0, rtol=CG_TOLERANCE, maxiter=MAX_ITERATIONS, M=preconditioner)
            if info != 0:
                raise NumericalFailureError(f"Conjugate gradient stopped with info={info}.", iterations=MAX_ITERATIONS)
            return x

        return solve
    raise DomainError(f"Expected inner solver 'direct' or 'cg', instead found {inner}.")


def smallest_eigenpair(
    stiffness: sp.spmatrix | np.ndarray,
    mass: sp.spmatrix | np.ndarray,
    inner: str = "direct",
    tol: float | None = None,
    max_iter: int = MAX_ITERATIONS
) -> Eigenpair:
    """Smallest eigenpair of K v = lambda M v by inverse power iteration.

    When the Rayleigh quotient stops improving for STAGNATION_STEPS iterations while ||K v - lambda M v|| is still above
    the tolerance but within 1e-5 lambda ||M v||, the pair is returned with converged=False.

    Args:
        stiffness (sparse matrix | np.ndarray): Symmetric positive definite K.
        mass (sparse matrix | np.ndarray): Symmetric positive definite M.
        inner (str, optional): 'direct' (sparse LU, factored once) or 'cg' (Jacobi-preconditioned conjugate gradient,
            tolerance 1e-10). Defaults to 'direct'.
        tol (float | None, optional): Residual tolerance ||K v - lambda M v|| <= tol ||M v||. Defaults to 1e-8.
        max_iter (int, optional): Iteration cap. Defaults to 10,000.

    Returns:
        Eigenpair: The eigenvalue, the M-normalized eigenvector with nonnegative dominant sign,
            ||K v - lambda M v|| / ||M v|| and whether the tolerance was met.

    Raises:
        NumericalFailureError: If the iteration cap is exceeded.
    """
    tol = RESIDUAL_TOLERANCE if tol is None else tol
    K = sp.csr_matrix(stiffness)
    M = sp.csr_matrix(mass)
    solve = _inner_solver(K, inner)

    # deterministic all-ones start
    x = np.ones(K.shape[0])
    x /= math.sqrt(x @ (M @ x))
    rayleigh = x @ (K @ x)
    residual = math.inf
    best_step = math.inf
    stalled = 0
    converged = False
    for iteration in range(1, max_iter + 1):
        y = solve(M @ x, x / max(rayleigh, 1e-300))
        y /= math.sqrt(y @ (M @ y))
        previous, rayleigh = rayleigh, float(y @ (K @ y))
        My = M @ y
        residual = float(np.linalg.norm(K @ y - rayleigh * My) / np.linalg.norm(My))
        x = y
        if residual <= tol:
            converged = True
            break
        step = abs(rayleigh - previous)
        if step < best_step:
            best_step, stalled = step, 0
        else:
            stalled += 1
        if stalled >= STAGNATION_STEPS and residual <= STAGNATION_RESIDUAL * abs(rayleigh):
            log(f"Inverse iteration stagnated at round-off: lambda={rayleigh:.15g} residual={residual:.3g} above tol={tol:.3g}")
            break
    else:
        raise NumericalFailureError(f"Inverse iteration did not converge in {max_iter} iterations.", residual, max_iter)

    if x.sum() < 0:
        x = -x
    log(f"Inverse iteration: {iteration} iterations, lambda={rayleigh:.15g}, residual={residual:.3g}")
    return Eigenpair(rayleigh, x, residual, converged)


def _solve_level(cone: CapCone, s: float, mesh: HalfSphereMesh, inner: str) -> tuple[Eigenpair, np.ndarray]:
    K, M, P = assemble_weighted_forms(cone, s, mesh)
    pair = smallest_eigenpair(K, M, inner=inner)
    n_phi, n_psi = mesh.shape
    return pair, (P @ pair.vector).reshape(n_phi + 1, n_psi + 1)


def default_mesh(theta: float, s: float, shape: tuple[int, int] = EXTENSION_MESH) -> HalfSphereMesh:
    return HalfSphereMesh.build(theta, shape[0], shape[1], default_grading(s))


def fractional_cap_eigenvalue(cone: CapCone, s: float, mesh: HalfSphereMesh | None = None, inner: str = "direct") -> ExtensionEigenResult:
    """First eigenvalue lambda_1^s(theta) of the weighted problem on S^n_+, Richardson-extrapolated over `mesh` and its
    nested coarsening.

    Args:
        cone (CapCone): The cone C_theta.
        s (float): Fractional order in (0, 0.999].
        mesh (HalfSphereMesh | None, optional): Fine mesh. Defaults to 256 x 128 cells graded for s.
        inner (str, optional): Inner solver of the inverse iteration. Defaults to 'direct'.

    Returns:
        ExtensionEigenResult: lambda_1^s, gamma_s, the max-normalized eigenvector on the fine mesh and its psi = 0 row.
            est_error adds the residual of any level that stopped at round-off above tolerance (converged=False).

    Raises:
        DomainError: If s is out of range.
        NumericalFailureError: If an eigensolve fails.

    Examples:
        >>> fractional_cap_eigenvalue(CapCone(n=2, theta=math.pi / 2), 0.5).lambda1s  # s (n - s)
        0.75...
    """
    check_order(s)
    mesh = mesh if mesh is not None else default_mesh(cone.theta, s)

    fine_pair, vector = _solve_level(cone, s, mesh, inner)
    coarse_pair, _ = _solve_level(cone, s, mesh.coarsen(), inner)
    fine, coarse = fine_pair.value, coarse_pair.value
    lambda1s, est_error = richardson_extrapolate(coarse, fine)
    converged = fine_pair.converged and coarse_pair.converged
    # a level stopped at round-off contributes its residual
    est_error += sum(pair.residual for pair in (fine_pair, coarse_pair) if not pair.converged)
    gamma_s = exponent_from_eigenvalue(lambda1s, FracParams(n=cone.n, s=s))

    vector = max_normalize(vector.ravel()).reshape(vector.shape)
    vector.setflags(write=False)
    trace = np.array(vector[:, 0])
    trace.setflags(write=False)
    return ExtensionEigenResult(
        n=cone.n, s=s, theta=cone.theta, lambda1s=lambda1s, gamma_s=gamma_s, eigenvector=vector, trace=trace,
        mesh=mesh, est_error=est_error, coarse_lambda=coarse, fine_lambda=fine, converged=converged,
    )


@data_cache(maxsize=256)
def solve_extension(cone: CapCone, s: float, shape: tuple[int, int] = EXTENSION_MESH, inner: str = "direct") -> ExtensionEigenResult:
    """Cached `fractional_cap_eigenvalue` on the default graded mesh with `shape` cells."""
    result = fractional_cap_eigenvalue(cone, s, default_mesh(cone.theta, s, shape), inner)
    log(f"extension eigenvalue n={cone.n} s={s:.6g} theta={cone.theta:.10g}: lambda1s={result.lambda1s:.12g} "
        f"gamma_s={result.gamma_s:.12g} est_error={result.est_error:.3g}")
    return result


def fractional_exponent(cone: CapCone, s: float, mesh: HalfSphereMesh | None = None) -> float:
    """Characteristic exponent gamma_s(theta) in (0, 2s) of the cone."""
    if mesh is None:
        return solve_extension(cone, s).gamma_s
    return fractional_cap_eigenvalue(cone, s, mesh).gamma_s


def trace_profile(result: ExtensionEigenResult) -> SampledProfile:
    """Angular profile of the s-harmonic function u_s on S^{n-1}: the psi = 0 row, max-normalized, zero for phi >= theta."""
    return SampledProfile(result.mesh.phi_nodes, result.trace, result.theta, edge_exponent=result.s)


def boundary_exponent(profile: SampledProfile, window: tuple[float, float] = (1e-3, 1e-2)) -> float:
    """Least-squares slope of log g against log(theta - phi) over nodes whose relative distance to theta lies in `window`.

    Raises:
        DomainError: If fewer than 3 nodes fall in the window.
    """
    distance = (profile.theta - profile.nodes) / profile.theta
    mask = (distance >= window[0]) & (distance <= window[1]) & (profile.values > 0)
    if mask.sum() < 3:
        raise DomainError(f"Expected at least 3 nodes in the window {window}, instead found {mask.sum()}.")
    slope, _ = np.polyfit(np.log(distance[mask]), np.log(profile.values[mask]), 1)
    return float(slope)


def convergence_study(cone: CapCone, s: float, base: tuple[int, int] = (64, 32), levels: int = 3) -> pd.DataFrame:
    """Raw (unextrapolated) lambda_1^s over successive nested refinements of the graded mesh.

    Returns:
        pd.DataFrame: Columns phi_cells, psi_cells, lambda1s and difference (to the previous level).
    """
    check_order(s)
    rows = []
    previous = math.nan
    for level in range(levels):
        shape = (base[0] * 2 ** level, base[1] * 2 ** level)
        pair, _ = _solve_level(cone, s, default_mesh(cone.theta, s, shape), "direct")
        lam = pair.value
        rows.append({"phi_cells": shape[0], "psi_cells": shape[1], "lambda1s": lam, "difference": abs(lam - previous)})
        previous = lam
    return pd.DataFrame(rows)
