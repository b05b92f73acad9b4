"""Direct quadrature of the fractional Laplacian of homogeneous axisymmetric functions.

For u(x) = |x|^gamma g(phi(x)) and a point x inside the cone,

    (-Delta)^s u(x) = C(n, s) / 2 int_{S^{n-1}} int_0^inf (2u(x) - u(x + rho w) - u(x - rho w)) rho^{-1-2s} d rho d w.

The radial integral runs over log-spaced panels between rho_min |x| and rho_max |x|, split at the radii where the
lines x +- rho w cross the cone boundary or pass closest to the origin. The part below rho_min is the second-order
Taylor term and the part above rho_max uses the asymptotic form rho^gamma g(+-w).
"""
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence
import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from exceptions import AccuracyWarning, DomainError
from settings import QUADRATURE_ANGULAR_NODES, QUADRATURE_PANELS_PER_DECADE, QUADRATURE_RHO_MAX, QUADRATURE_RHO_MIN, worker_count
from .geometry import CapCone
from .mu_zero import MuZeroResult, barrier_exponent
from .profiles import AngularProfile
from .special_functions import FracParams, normalization_constant, sphere_area
from .utils import gauss_legendre

# interior margin (radians) required of evaluation points
BOUNDARY_MARGIN = 0.01
# geometric sub-panels toward every radial breakpoint
BREAKPOINT_RATIO = 0.2
BREAKPOINT_LEVELS = 10
ACCURACY_FRACTION = 0.1
SPLIT_TOLERANCE = 1e-12


class QuadratureRule(BaseModel):
    """Resolution of the fractional-Laplacian quadrature. Cutoffs are relative to |x|."""
    model_config = ConfigDict(frozen=True)

    angular_nodes: int = QUADRATURE_ANGULAR_NODES
    panels_per_decade: int = QUADRATURE_PANELS_PER_DECADE
    rho_min: float = QUADRATURE_RHO_MIN
    rho_max: float = QUADRATURE_RHO_MAX
    radial_points: int = 8

    @model_validator(mode="after")
    def check_resolution(self) -> "QuadratureRule":
        if self.angular_nodes < 16:
            raise ValueError(f"Expected at least 16 angular nodes, instead found {self.angular_nodes}.")
        if self.panels_per_decade < 1 or self.radial_points < 2:
            raise ValueError("Expected at least one radial panel per decade and two points per panel.")
        if not 0.0 < self.rho_min < 1.0 < self.rho_max:
            raise ValueError(f"Expected 0 < rho_min < 1 < rho_max, instead found {self.rho_min} and {self.rho_max}.")
        return self

    def refined(self) -> "QuadratureRule":
        """Twice the angular nodes and radial panels."""
        return self.model_copy(update={"angular_nodes": 2 * self.angular_nodes, "panels_per_decade": 2 * self.panels_per_decade})

    def coarsened(self) -> "QuadratureRule":
        # comparison level for the error estimate, exempt from the resolution floor
        return self.model_copy(
            update={"angular_nodes": max(8, self.angular_nodes // 2), "panels_per_decade": max(1, self.panels_per_decade // 2)}
        )


@dataclass(frozen=True, eq=False)
class HomogeneousProfile:
    """The gamma-homogeneous function r^gamma g(phi) on R^n, zero outside the cone."""
    gamma: float
    g: AngularProfile
    cone: CapCone
    s: float

    def __post_init__(self) -> None:
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"Expected s in (0, 1), instead found {self.s}.")
        if not 0.0 < self.gamma < 2.0 * self.s:
            raise DomainError(f"Expected gamma in (0, 2s) = (0, {2 * self.s}), instead found {self.gamma}.")
        if not math.isclose(self.g.theta, self.cone.theta, rel_tol=1e-12):
            raise DomainError(f"Expected a profile vanishing at theta = {self.cone.theta}, instead found {self.g.theta}.")

    def __call__(self, axial: np.ndarray, radial: np.ndarray) -> np.ndarray:
        """Values at points with axial coordinate `axial` and distance `radial` >= 0 from the axis."""
        norm = np.hypot(axial, radial)
        phi = np.arctan2(radial, axial)
        return norm ** self.gamma * self.g(phi)

    def scaled(self, factor: float) -> "HomogeneousProfile":
        return HomogeneousProfile(gamma=self.gamma, g=self.g.scaled(factor), cone=self.cone, s=self.s)


class FractionalLaplacianValue(NamedTuple):
    value: float
    error: float
    scale: float
    flagged: bool


def _angular_panels(lo: float, hi: float, splits: Sequence[float], nodes: int) -> tuple[np.ndarray, np.ndarray]:
    cuts = sorted({lo, hi, *(c for c in splits if lo + SPLIT_TOLERANCE < c < hi - SPLIT_TOLERANCE)})
    parts = [gauss_legendre(a, b, nodes) for a, b in zip(cuts[:-1], cuts[1:])]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _directions(n: int, phi: float, theta: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit directions (rows, in the frame axis / point plane / normal) and weights of int_{S^{n-1}} dw.

    n = 2 integrates alpha over [0, pi] twice, the integrand being even in w. Off-axis points in n >= 3 add the azimuth
    beta of w around the axis, measured from the plane of the point.
    """
    splits = (theta, math.pi - theta, phi, math.pi - phi)
    alpha, w_alpha = _angular_panels(0.0, math.pi, splits, nodes)
    planar = np.column_stack([np.cos(alpha), np.sin(alpha), np.zeros_like(alpha)])
    if n == 2:
        return planar, 2.0 * w_alpha
    polar = np.sin(alpha) ** (n - 2) * w_alpha
    if phi == 0.0:
        return planar, sphere_area(n - 1) * polar

    beta, w_beta = _angular_panels(0.0, math.pi, (0.5 * math.pi,), max(8, nodes // 2))
    a, b = np.meshgrid(alpha, beta, indexing="ij")
    directions = np.column_stack([np.cos(a).ravel(), (np.sin(a) * np.cos(b)).ravel(), (np.sin(a) * np.sin(b)).ravel()])
    weights = sphere_area(n - 2) * np.outer(polar, np.sin(beta) ** (n - 3) * w_beta).ravel()
    return directions, weights


def _crossing_radii(x: np.ndarray, omega: np.ndarray, theta: float) -> np.ndarray:
    """|t| for the real t with x + t omega on the cone boundary, from (z . e)^2 = cos^2(theta) |z|^2."""
    cos_theta = math.cos(theta)
    c2 = cos_theta * cos_theta
    a = omega[0] ** 2 - c2
    b = 2.0 * (x[0] * omega[0] - c2 * float(x @ omega))
    c = x[0] ** 2 - c2 * float(x @ x)
    if abs(a) < 1e-14:
        roots = np.array([-c / b]) if b != 0.0 else np.empty(0)
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            # double roots at theta = pi / 2 may come out slightly negative
            if disc < -1e-12 * max(b * b, 1.0):
                return np.empty(0)
            disc = 0.0
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        roots = np.array([q / a, c / q]) if q != 0.0 else np.array([-0.5 * b / a])
    if abs(cos_theta) > SPLIT_TOLERANCE:
        roots = roots[(x[0] + roots * omega[0]) * cos_theta >= 0.0]
    return np.abs(roots)


def _radial_rule(breakpoints: np.ndarray, rule: QuadratureRule) -> tuple[np.ndarray, np.ndarray]:
    panels = int(math.ceil(math.log10(rule.rho_max / rule.rho_min) * rule.panels_per_decade))
    edges = np.geomspace(rule.rho_min, rule.rho_max, panels + 1)
    extra = []
    for point in breakpoints:
        if not rule.rho_min < point < rule.rho_max:
            continue
        k = int(np.searchsorted(edges, point))
        ratios = BREAKPOINT_RATIO ** np.arange(1, BREAKPOINT_LEVELS + 1)
        extra.append([point])
        extra.append(point - (point - edges[k - 1]) * ratios)
        extra.append(point + (edges[k] - point) * ratios)
    if extra:
        edges = np.unique(np.concatenate([edges, *extra]))

    x, w = np.polynomial.legendre.leggauss(rule.radial_points)
    half = 0.5 * np.diff(edges)
    nodes = edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)
    return nodes.ravel(), (half[:, None] * w[None, :]).ravel()


def _symmetric_difference(p: HomogeneousProfile, x: np.ndarray, ux: float, omega: np.ndarray, rho: np.ndarray) -> np.ndarray:
    plus = x[None, :] + rho[:, None] * omega[None, :]
    minus = x[None, :] - rho[:, None] * omega[None, :]
    return (
        2.0 * ux
        - p(plus[:, 0], np.hypot(plus[:, 1], plus[:, 2]))
        - p(minus[:, 0], np.hypot(minus[:, 1], minus[:, 2]))
    )


def _unit_integral(p: HomogeneousProfile, phi: float, rule: QuadratureRule) -> tuple[float, float]:
    """(-Delta)^s p at the unit point of angle phi, and the bound on the cutoff corrections."""
    n, s, gamma, theta = p.cone.n, p.s, p.gamma, p.cone.theta
    x = np.array([math.cos(phi), math.sin(phi), 0.0])
    ux = float(p(np.array([x[0]]), np.array([x[1]]))[0])
    distance = math.sin(min(theta - phi, 0.5 * math.pi))
    edge = min(p.g.edge_exponent, 1.0)

    directions, weights = _directions(n, phi, theta, rule.angular_nodes)
    total = 0.0
    bound = 0.0
    for omega, weight in zip(directions, weights):
        breakpoints = np.append(_crossing_radii(x, omega, theta), abs(float(x @ omega)))
        rho, w = _radial_rule(breakpoints, rule)
        body = float(w @ (_symmetric_difference(p, x, ux, omega, rho) * rho ** (-1.0 - 2.0 * s)))

        h0 = float(_symmetric_difference(p, x, ux, omega, np.array([rule.rho_min]))[0])
        inner = h0 * rule.rho_min ** (-2.0 * s) / (2.0 - 2.0 * s)

        alpha = math.atan2(math.hypot(omega[1], omega[2]), omega[0])
        far = float(p.g(np.array([alpha]))[0] + p.g(np.array([math.pi - alpha]))[0])
        tail = 2.0 * ux * rule.rho_max ** (-2.0 * s) / (2.0 * s) - far * rule.rho_max ** (gamma - 2.0 * s) / (2.0 * s - gamma)

        total += weight * (body + inner + tail)
        bound += weight * (
            abs(inner) * (rule.rho_min / distance) ** 2
            + 4.0 * (1.0 + gamma) * rule.rho_max ** (gamma - 2.0 * s - edge) / (2.0 * s + edge - gamma)
        )

    half_constant = 0.5 * normalization_constant(FracParams(n=n, s=s))
    return half_constant * total, half_constant * bound


def evaluate_fractional_laplacian(p: HomogeneousProfile, point: tuple[float, float], rule: QuadratureRule | None = None) -> FractionalLaplacianValue:
    """(-Delta)^s of a homogeneous profile at an interior point, with an error estimate.

    The estimate adds the difference to a run with half the angular nodes and radial panels to the cutoff bounds.

    Args:
        p (HomogeneousProfile): The function r^gamma g(phi).
        point (tuple[float, float]): (r, phi) with r > 0 and phi < theta - 0.01.
        rule (QuadratureRule | None, optional): Quadrature resolution. Defaults to QuadratureRule().

    Returns:
        FractionalLaplacianValue: The value, its error estimate, the local scale C(n, s) r^{gamma - 2s} and whether the
            estimate exceeds 10% of that scale.

    Raises:
        DomainError: If the point is not strictly inside the cone.
    """
    rule = rule if rule is not None else QuadratureRule()
    r, phi = float(point[0]), float(point[1])
    if not r > 0:
        raise DomainError(f"Expected r > 0, instead found {r}.")
    if not 0.0 <= phi < p.cone.theta - BOUNDARY_MARGIN:
        raise DomainError(f"Expected phi in [0, theta - {BOUNDARY_MARGIN}) = [0, {p.cone.theta - BOUNDARY_MARGIN:.6g}), instead found {phi}.")

    fine, bound = _unit_integral(p, phi, rule)
    coarse, _ = _unit_integral(p, phi, rule.coarsened())

    factor = r ** (p.gamma - 2.0 * p.s)
    value = factor * fine
    error = factor * (abs(fine - coarse) + bound)
    scale = normalization_constant(FracParams(n=p.cone.n, s=p.s)) * factor
    flagged = error > ACCURACY_FRACTION * scale
    if flagged:
        warnings.warn(
            f"Quadrature error {error:.3g} exceeds {ACCURACY_FRACTION:.0%} of the scale {scale:.3g} at (r, phi) = ({r}, {phi}).",
            AccuracyWarning,
        )
    return FractionalLaplacianValue(value=value, error=error, scale=scale, flagged=flagged)


def _evaluate_all(p: HomogeneousProfile, points: Sequence[tuple[float, float]], rule: QuadratureRule | None) -> list[FractionalLaplacianValue]:
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(lambda point: evaluate_fractional_laplacian(p, point, rule), points))


def sharmonicity_residual(p: HomogeneousProfile, points: Sequence[tuple[float, float]], rule: QuadratureRule | None = None) -> float:
    """max |(-Delta)^s p| / (C(n, s) r^{gamma - 2s}) over interior points.

    Raises:
        DomainError: If fewer than 3 points are given, or a point is not interior.
    """
    if len(points) < 3:
        raise DomainError(f"Expected at least 3 interior points, instead found {len(points)}.")
    return max(abs(v.value) / v.scale for v in _evaluate_all(p, points, rule))


def cap_sample_points(cone: CapCone, count: int = 5, r: float = 1.0) -> list[tuple[float, float]]:
    """Evenly spaced points (r, phi) with phi in [0, 0.8 theta]."""
    return [(r, float(phi)) for phi in np.linspace(0.0, 0.8 * cone.theta, count)]


def barrier_profile(cone: CapCone, s: float, mu_result: MuZeroResult) -> HomogeneousProfile:
    """The barrier v_s = r^{gamma_s*} psi(phi) built on the mu_0 minimizer, extended by zero outside the cap."""
    gamma_star = barrier_exponent(cone, s, mu_result.mu0)
    return HomogeneousProfile(gamma=gamma_star, g=mu_result.profile(), cone=cone, s=s)


@dataclass(frozen=True)
class BarrierReport:
    gamma_star: float
    max_value: float
    tolerance: float
    nonpositive: bool
    values: tuple[float, ...]


def barrier_sign_check(
    cone: CapCone,
    s: float,
    mu_result: MuZeroResult,
    points: Sequence[tuple[float, float]] | None = None,
    rule: QuadratureRule | None = None,
    scale: float = 1.0
) -> BarrierReport:
    """Evaluate (-Delta)^s v_s on the cap and report whether it is nonpositive.

    The sign holds for s close enough to 1; smaller s are reported without any claim.

    Args:
        cone (CapCone): A narrow admissible cap.
        s (float): Fractional order.
        mu_result (MuZeroResult): mu_0 and psi of the cap.
        points (Sequence[tuple[float, float]] | None, optional): Sample points (r, phi). Defaults to five points on the
            unit sphere.
        rule (QuadratureRule | None, optional): Quadrature resolution.
        scale (float, optional): Positive multiple applied to psi. Defaults to 1.

    Returns:
        BarrierReport: The maximum of the sampled values and whether it is <= 1e-2 C(n, s) / (2s - gamma_s*).
    """
    points = points if points is not None else cap_sample_points(cone)
    profile = barrier_profile(cone, s, mu_result)
    if scale != 1.0:
        profile = profile.scaled(scale)
    values = tuple(v.value for v in _evaluate_all(profile, points, rule))
    tolerance = 1e-2 * normalization_constant(FracParams(n=cone.n, s=s)) / (2.0 * s - profile.gamma)
    max_value = max(values)
    return BarrierReport(gamma_star=profile.gamma, max_value=max_value, tolerance=tolerance, nonpositive=max_value <= tolerance, values=values)
