from typing import List, Tuple
import numpy as np
import scipy.sparse as sp
from scipy.special import roots_jacobi


def is_spd(X: np.ndarray | sp.spmatrix | sp.sparray) -> bool:
    """Check if the provided matrix is symmetric positive definite (SPD).

    Args:
        X (np.ndarray | sparse matrix): Matrix to be checked.

    Returns:
        bool: True if the input 'X' is SPD, otherwise False.

    Raises:
        TypeError: If the input 'X' is neither a sparse matrix nor a ndarray.

    Examples:
        >>> is_spd(np.eye(3))
        True

        >>> is_spd(np.array([[1, 2], [2, 1]]))
        False
    """
    if sp.issparse(X):
        X = X.toarray()
    if not isinstance(X, np.ndarray):
        raise TypeError(f"Expected input matrix X to be a sparse matrix or ndarray, instead found {type(X)}.")

    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        return False
    if not np.allclose(X, X.T, rtol=1e-12, atol=1e-14 * max(1.0, np.abs(X).max())):
        return False

    try:
        # Cholesky fails unless X is positive definite
        _ = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return False

    return True


def is_symmetric(X: sp.spmatrix | sp.sparray | np.ndarray, rtol: float = 1e-12) -> bool:
    """Check symmetry of a (possibly sparse) matrix relative to its largest entry."""
    if sp.issparse(X):
        diff = abs(X - X.T)
        scale = abs(X).max()
        return diff.nnz == 0 or diff.max() <= rtol * scale
    return bool(np.allclose(X, X.T, rtol=0.0, atol=rtol * np.abs(X).max()))


def max_normalize(v: np.ndarray) -> np.ndarray:
    """Fix the sign of a principal eigenvector and scale it to unit maximum.

    Args:
        v (np.ndarray): Input vector, dominated by entries of a single sign.

    Returns:
        np.ndarray: The vector with nonnegative dominant sign, maximum 1 and round-off negatives clipped to 0.

    Raises:
        TypeError: If the input 'v' is not a ndarray.
        ValueError: If the input 'v' is identically zero.

    Examples:
        >>> max_normalize(np.array([-1.0, -2.0, -4.0]))
        array([0.25, 0.5 , 1.  ])
    """
    if not isinstance(v, np.ndarray):
        raise TypeError(f"Expected v to be a ndarray, instead found {type(v)}")
    peak = v[np.argmax(np.abs(v))]
    if peak == 0:
        raise ValueError("Expected v to have a nonzero entry.")
    return np.clip(v / peak, 0.0, None)


def richardson_extrapolate(coarse: float, fine: float, ratio: float = 2.0, order: float = 2.0) -> Tuple[float, float]:
    """Combine two mesh levels to cancel the leading discretization error.

    Args:
        coarse (float): Value on the coarse mesh.
        fine (float): Value on the mesh refined by `ratio`.
        ratio (float, optional): Mesh-size ratio between the levels. Defaults to 2.
        order (float, optional): Order of the leading error term. Defaults to 2.

    Returns:
        Tuple[float, float]: The extrapolated value and the estimated error of the fine level.

    Examples:
        >>> richardson_extrapolate(1.04, 1.01)
        (1.0, 0.01)
    """
    factor = 1.0 / (ratio ** order - 1.0)
    correction = factor * (fine - coarse)
    return fine + correction, abs(correction)


def gauss_legendre(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def gauss_jacobi_left(a: float, b: float, alpha: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating (x - a)^alpha f(x) on [a, b] exactly for polynomial f of degree 2n - 1.

    The returned weights already contain the factor (x - a)^alpha, so that sum(w * f(x)) approximates the weighted integral.
    """
    x, w = roots_jacobi(n, 0.0, alpha)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), w * half ** (alpha + 1.0)


def is_close(
    d1: np.ndarray | List[float] | float | int,
    d2: np.ndarray | List[float] | float | int,
    threshold: float = 1e-5,
    relative: bool = False
) -> bool:
    """
    Check if two values or arrays are element-wise close to each other within a specified threshold.

    Args:
        d1 (np.ndarray | List[float] | float | int): First value.
        d2 (np.ndarray | List[float] | float | int): Second value to compare with.
        threshold (float, optional): The maximum allowed difference. Defaults to 1e-5.
        relative (bool, optional): Whether the threshold is relative to |d2|. Defaults to False.

    Returns:
        bool: True if the values are element-wise close, False otherwise.

    Examples:
        >>> is_close(18.6392, 16 / (4 - np.pi), threshold=1e-4)
        True

        >>> is_close([1, 2, 3], [1, 2, 4])
        False
    """
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    scale = np.abs(d2) if relative else 1.0
    return bool(np.all(np.abs(d1 - d2) <= threshold * scale))
