"""Weighted P1 finite-element matrices on one-dimensional meshes."""
from typing import Callable, Tuple
import numpy as np
import scipy.sparse as sp

from .utils import gauss_legendre, gauss_jacobi_left


def _element_rule(a: np.ndarray, b: np.ndarray, points: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(points)
    half = 0.5 * (b - a)[:, None]
    return a[:, None] + half * (x[None, :] + 1.0), half * w[None, :]


def p1_matrices(
    nodes: np.ndarray,
    weight: Callable[[np.ndarray], np.ndarray],
    points: int = 3,
    left_singularity: float = 0.0
) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    """Stiffness and mass matrices of continuous piecewise-linear elements with a weight function.

        K_ij = int w N_i' N_j',   M_ij = int w N_i N_j

    Args:
        nodes (np.ndarray): Strictly increasing mesh nodes.
        weight (Callable[[np.ndarray], np.ndarray]): Vectorized weight w(x) >= 0.
        points (int, optional): Gauss points per element. Defaults to 3.
        left_singularity (float, optional): Exponent alpha of an integrable factor (x - nodes[0])^alpha in the weight.
            The first element is then integrated with a Gauss-Jacobi rule that is exact for that factor. Defaults to 0.

    Returns:
        Tuple[sp.csr_matrix, sp.csr_matrix]: Tridiagonal stiffness and mass matrices.
    """
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    x, w = _element_rule(a, b, points)
    wx = weight(x) * w

    if left_singularity != 0.0:
        xj, wj = gauss_jacobi_left(a[0], b[0], left_singularity, points)
        x[0], wx[0] = xj, weight(xj) / (xj - a[0]) ** left_singularity * wj

    n0 = (b[:, None] - x) / h[:, None]
    n1 = (x - a[:, None]) / h[:, None]
    k_el = wx.sum(axis=1) / h ** 2
    m00 = (wx * n0 * n0).sum(axis=1)
    m01 = (wx * n0 * n1).sum(axis=1)
    m11 = (wx * n1 * n1).sum(axis=1)

    size = nodes.shape[0]
    k_diag = np.zeros(size)
    m_diag = np.zeros(size)
    k_diag[:-1] += k_el
    k_diag[1:] += k_el
    m_diag[:-1] += m00
    m_diag[1:] += m11

    K = sp.diags([-k_el, k_diag, -k_el], [-1, 0, 1], format="csr")
    M = sp.diags([m01, m_diag, m01], [-1, 0, 1], format="csr")
    return K, M


def weighted_integral(nodes: np.ndarray, values: np.ndarray, weight: Callable[[np.ndarray], np.ndarray], points: int = 3) -> float:
    """Integral of the P1 interpolant of `values` against the weight."""
    x, w = gauss_legendre(0.0, 1.0, points)
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    pts = a[:, None] + h[:, None] * x[None, :]
    interp = values[:-1, None] * (1.0 - x[None, :]) + values[1:, None] * x[None, :]
    return float((weight(pts) * interp * (h[:, None] * w[None, :])).sum())
