"""ACF curves, s-sweeps toward s = 1 and the limits of gamma_s and C(n, s) / (2s - gamma_s)."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from exceptions import AdmissibilityError, DomainError, NumericalFailureError
from settings import CAP_MESH_NODES, EXTENSION_MESH, MAX_FRACTIONAL_ORDER, worker_count
from .cap_spectrum import CapEigenResult, classical_exponent, solve_cap
from .decorators import log
from .extension_spectrum import solve_extension
from .geometry import CapCone, Mesh1D
from .mu_zero import MuZeroResult, barrier_exponent, is_admissible, solve_mu_zero
from .special_functions import FracParams, normalization_constant

GRID_SPAN = (0.02 * math.pi, 0.98 * math.pi)
ARGMIN_TOLERANCE = 1e-4
TIE_TOLERANCE = 1e-9
LIMIT_ROWS = 3
LIMIT_MIN_ORDER = 0.9
SWEEP_COLUMNS = ["n", "s", "theta", "lambda1s", "gamma_s", "Cns", "ratio", "gamma_star", "est_error"]


class ConeClass(str, Enum):
    NARROW = "narrow"
    WIDE = "wide"


@dataclass(frozen=True, eq=False)
class AcfCurve:
    n: int
    s: float
    theta_grid: np.ndarray
    gamma_s_values: np.ndarray
    Gamma_s_values: np.ndarray
    nu_acf: float
    argmin_theta: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "theta": self.theta_grid,
            "theta_over_pi": self.theta_grid / math.pi,
            "gamma_s": self.gamma_s_values,
            "Gamma_s": self.Gamma_s_values,
        })


@dataclass(frozen=True, eq=False)
class SweepTable:
    """Rows ordered in s with the columns of SWEEP_COLUMNS."""
    cone: CapCone
    frame: pd.DataFrame


@dataclass(frozen=True)
class LimitEstimate:
    gamma_bar_est: float
    mu_est: float
    classification: ConeClass
    predicted_gamma_bar: float
    predicted_mu: float
    gamma_residual: float
    mu_residual: float


def exponent(n: int, s: float, theta: float, shape: tuple[int, int] = EXTENSION_MESH) -> float:
    """gamma_s(theta); s = 1 is classical mode and uses the cap problem."""
    cone = CapCone(n=n, theta=theta)
    if s == 1.0:
        return solve_cap(cone).gamma
    return solve_extension(cone, s, shape).gamma_s


def symmetric_grid(count: int) -> np.ndarray:
    """`count` equispaced apertures in [0.02 pi, 0.98 pi], symmetric under theta -> pi - theta, pi / 2 in the middle.

    Raises:
        DomainError: If count is even or smaller than 9.
    """
    if count < 9 or count % 2 == 0:
        raise DomainError(f"Expected an odd grid size >= 9, instead found {count}.")
    grid = np.linspace(*GRID_SPAN, count)
    half = count // 2
    grid[half] = 0.5 * math.pi
    grid[half + 1:] = math.pi - grid[:half][::-1]
    return grid


def _exponents(n: int, s: float, thetas: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    def cell(theta: float) -> float:
        try:
            return exponent(n, s, float(theta), shape)
        except NumericalFailureError as exc:
            raise NumericalFailureError(f"Eigensolve failed at theta = {theta:.12g}: {exc}", exc.residual, exc.iterations) from exc

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return np.array(list(pool.map(cell, thetas)))


def _check_order(s: float) -> None:
    if not (0.0 < s <= MAX_FRACTIONAL_ORDER or s == 1.0):
        raise DomainError(f"Expected s in (0, {MAX_FRACTIONAL_ORDER}] or s = 1, instead found {s}.")


def acf_curve(n: int, s: float, grid: int = 41, shape: tuple[int, int] = EXTENSION_MESH) -> AcfCurve:
    """Gamma^s(theta) = (gamma_s(theta) + gamma_s(pi - theta)) / 2 on a symmetric grid and its minimum nu_s^ACF.

    Each grid aperture is solved once; the complement values are read off the mirrored grid point. A minimum at an
    interior grid point other than pi / 2 is refined by golden-section search to 1e-4 in theta when it lies strictly
    below both neighbours; a tied or flat minimum keeps the first best grid point.

    Args:
        n (int): Dimension.
        s (float): Fractional order in (0, 0.999], or 1 for the classical curve.
        grid (int, optional): Odd number of apertures, at least 9. Defaults to 41.
        shape (tuple[int, int], optional): Extension mesh cells. Defaults to (256, 128).

    Returns:
        AcfCurve: The curve, nu_s^ACF and its argmin.

    Raises:
        DomainError: If s or the grid size is invalid.
        NumericalFailureError: If an eigensolve fails, naming the aperture.

    Examples:
        >>> acf_curve(2, 1.0, grid=41).nu_acf
        1.0000000...
    """
    _check_order(s)
    thetas = symmetric_grid(grid)
    gammas = _exponents(n, s, thetas, shape)
    curve = 0.5 * (gammas + gammas[::-1])

    half = grid // 2
    i = int(np.argmin(curve[:half + 1]))
    nu, argmin = float(curve[i]), float(thetas[i])
    bracketed = 0 < i < half and curve[i] < curve[i - 1] and curve[i] < curve[i + 1]
    if bracketed:
        def objective(theta: float) -> float:
            return 0.5 * (exponent(n, s, theta, shape) + exponent(n, s, math.pi - theta, shape))

        found = minimize_scalar(
            objective, bracket=(thetas[i - 1], thetas[i], thetas[i + 1]), method="golden",
            options={"xtol": ARGMIN_TOLERANCE / (2.0 * thetas[i])},
        )
        if found.fun < nu:
            nu, argmin = float(found.fun), float(found.x)
    elif i == half:
        argmin = 0.5 * math.pi

    log(f"acf n={n} s={s:.6g}: nu={nu:.12g} argmin={argmin:.10g}")
    return AcfCurve(n=n, s=s, theta_grid=thetas, gamma_s_values=gammas, Gamma_s_values=curve, nu_acf=nu, argmin_theta=argmin)


def acf_value(n: int, s: float, grid: int = 41, shape: tuple[int, int] = EXTENSION_MESH) -> tuple[float, float]:
    """(nu_s^ACF, argmin theta) of `acf_curve`."""
    curve = acf_curve(n, s, grid, shape)
    return curve.nu_acf, curve.argmin_theta


def _mu_zero_or_none(cone: CapCone) -> MuZeroResult | None:
    """mu_0 of a narrow cap, None for a wide one. Wide caps are recognised from the cached cap eigenvalue."""
    if not is_admissible(cone.n, solve_cap(cone).lambda1):
        return None
    try:
        return solve_mu_zero(cone)
    except AdmissibilityError:
        return None


def limit_sweep(cone: CapCone, s_list: list[float], shape: tuple[int, int] = EXTENSION_MESH) -> SweepTable:
    """gamma_s(theta), C(n, s) and the ratio C(n, s) / (2s - gamma_s) along increasing orders s.

    gamma_star is filled in for narrow caps with lambda1 > 2n and left NaN otherwise.

    Raises:
        DomainError: If s_list is empty, not increasing or exceeds 0.999.
    """
    s_values = [float(s) for s in s_list]
    if not s_values or any(b <= a for a, b in zip(s_values, s_values[1:])):
        raise DomainError(f"Expected a nonempty increasing list of orders, instead found {s_list}.")
    if s_values[0] <= 0.0 or s_values[-1] > MAX_FRACTIONAL_ORDER:
        raise DomainError(f"Expected orders in (0, {MAX_FRACTIONAL_ORDER}], instead found {s_list}.")

    mu = _mu_zero_or_none(cone)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(lambda s: solve_extension(cone, s, shape), s_values))

    rows = []
    for s, result in zip(s_values, results):
        c = normalization_constant(FracParams(n=cone.n, s=s))
        rows.append({
            "n": cone.n,
            "s": s,
            "theta": cone.theta,
            "lambda1s": result.lambda1s,
            "gamma_s": result.gamma_s,
            "Cns": c,
            "ratio": c / (2.0 * s - result.gamma_s),
            "gamma_star": barrier_exponent(cone, s, mu.mu0) if mu is not None else math.nan,
            "est_error": result.est_error,
        })
    return SweepTable(cone=cone, frame=pd.DataFrame(rows, columns=SWEEP_COLUMNS))


def _linear_limit(one_minus_s: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(one_minus_s, values, 1)
    residual = values - (intercept + slope * one_minus_s)
    return float(intercept), float(np.abs(residual).max())


def classify_cone(cone: CapCone, mesh: Mesh1D | None = None) -> ConeClass:
    """Narrow when gamma(theta) >= 2 (up to 1e-9), wide otherwise.

    Examples:
        >>> classify_cone(CapCone(n=2, theta=math.pi / 4))
        <ConeClass.NARROW: 'narrow'>
    """
    gamma = classical_exponent(cone, mesh)
    return ConeClass.NARROW if gamma >= 2.0 - TIE_TOLERANCE else ConeClass.WIDE


def limit_estimates(table: SweepTable, cap: CapEigenResult, mu: MuZeroResult | None = None) -> LimitEstimate:
    """Limits of gamma_s and of the ratio as s -> 1, from a fit a + b (1 - s) through the last three rows with s >= 0.9.

    Predictions: gamma_bar = min(gamma, 2), and mu = mu_0 for gamma > 2, 0 for gamma <= 2.

    Args:
        table (SweepTable): Sweep of the cone.
        cap (CapEigenResult): Classical solve of the same cone.
        mu (MuZeroResult | None, optional): mu_0 of the cone; computed when needed and not given.

    Returns:
        LimitEstimate: Extrapolated and predicted limits, the classification and the fit residuals.

    Raises:
        DomainError: If fewer than three rows have s >= 0.9.
    """
    usable = table.frame[table.frame["s"] >= LIMIT_MIN_ORDER]
    if len(usable) < LIMIT_ROWS:
        raise DomainError(f"Expected at least {LIMIT_ROWS} sweep rows with s >= {LIMIT_MIN_ORDER}, instead found {len(usable)}.")
    last = usable.tail(LIMIT_ROWS)
    one_minus_s = 1.0 - last["s"].to_numpy()
    gamma_bar, gamma_residual = _linear_limit(one_minus_s, last["gamma_s"].to_numpy())
    mu_est, mu_residual = _linear_limit(one_minus_s, last["ratio"].to_numpy())

    classification = ConeClass.NARROW if cap.gamma >= 2.0 - TIE_TOLERANCE else ConeClass.WIDE
    if cap.gamma <= 2.0 + TIE_TOLERANCE:
        predicted_mu = 0.0
    else:
        mu = mu if mu is not None else _mu_zero_or_none(table.cone)
        predicted_mu = mu.mu0 if mu is not None else 0.0
    return LimitEstimate(
        gamma_bar_est=gamma_bar,
        mu_est=mu_est,
        classification=classification,
        predicted_gamma_bar=min(cap.gamma, 2.0),
        predicted_mu=predicted_mu,
        gamma_residual=gamma_residual,
        mu_residual=mu_residual,
    )


def acf_lower_bound(n: int, s: float) -> float:
    """Known lower bound of nu_s^ACF: max(s / 2, s - 1/4) in the plane, s / 2 otherwise. The upper bound is s."""
    return max(0.5 * s, s - 0.25) if n == 2 else 0.5 * s


def endpoint_limits(n: int, s: float) -> tuple[float, float]:
    """(gamma_s(0+), gamma_s(pi-)): 2s, and (2s - 1) / 2 for n = 2 with s > 1/2, 0 otherwise."""
    return 2.0 * s, (s - 0.5 if n == 2 and s > 0.5 else 0.0)


def limit_profile(n: int, grid: int = 41, count: int = CAP_MESH_NODES) -> pd.DataFrame:
    """The s -> 1 limit curve Gamma_bar(theta) = (gamma_bar(theta) + gamma_bar(pi - theta)) / 2 with
    gamma_bar = min(gamma, 2), next to the classical curve Gamma(theta).

    Returns:
        pd.DataFrame: Columns theta, theta_over_pi, gamma, gamma_bar, Gamma, Gamma_bar.
    """
    thetas = symmetric_grid(grid)
    gamma = np.array([solve_cap(CapCone(n=n, theta=float(t)), count).gamma for t in thetas])
    gamma_bar = np.minimum(gamma, 2.0)
    return pd.DataFrame({
        "theta": thetas,
        "theta_over_pi": thetas / math.pi,
        "gamma": gamma,
        "gamma_bar": gamma_bar,
        "Gamma": 0.5 * (gamma + gamma[::-1]),
        "Gamma_bar": 0.5 * (gamma_bar + gamma_bar[::-1]),
    })
