"""Angular profiles g(phi) of axisymmetric functions vanishing outside a cap."""
import math
import numpy as np
from scipy.interpolate import CubicSpline

from exceptions import DomainError
from .utils import max_normalize


class AngularProfile:
    """A function of the angle phi from the cone axis, zero for phi >= theta, Holder of order `edge_exponent` at theta."""
    theta: float
    edge_exponent: float

    def __call__(self, phi: np.ndarray | float) -> np.ndarray:
        raise NotImplementedError

    def scaled(self, factor: float) -> "ScaledProfile":
        if not factor > 0:
            raise DomainError(f"Expected a positive scaling factor, instead found {factor}.")
        return ScaledProfile(self, factor)


class SampledProfile(AngularProfile):
    """Cubic interpolant of nodal samples on [0, theta], extended by zero for phi >= theta.

    Over the last interval before theta the spline is replaced by g(phi_k) ((theta - phi) / (theta - phi_k))^e, the
    boundary behaviour of the profile (e = s for s-harmonic traces, e = 1 for H^1_0 solutions). This avoids overshoot
    next to the kink at phi = theta.
    """

    def __init__(self, nodes: np.ndarray, values: np.ndarray, theta: float, edge_exponent: float = 1.0) -> None:
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.shape != values.shape:
            raise DomainError(f"Expected matching nodes and values, instead found {nodes.shape} and {values.shape}.")
        inside = nodes < theta
        if inside.sum() < 4:
            raise DomainError("Expected at least 4 sample nodes inside the cap.")

        self.theta = float(theta)
        self.edge_exponent = float(edge_exponent)
        self.nodes = nodes[inside]
        self.values = max_normalize(values[inside])
        self.edge_node = float(self.nodes[-1])
        self.edge_value = float(self.values[-1])
        # even reflection at the axis gives a vanishing slope at phi = 0
        self._spline = CubicSpline(self.nodes, self.values, bc_type=((1, 0.0), "not-a-knot"))

    def __call__(self, phi: np.ndarray | float) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        out = np.zeros_like(phi)
        body = phi <= self.edge_node
        edge = (phi > self.edge_node) & (phi < self.theta)
        out[body] = np.clip(self._spline(phi[body]), 0.0, None)
        out[edge] = self.edge_value * ((self.theta - phi[edge]) / (self.theta - self.edge_node)) ** self.edge_exponent
        return out


class ScaledProfile(AngularProfile):
    """A positive multiple of another profile."""

    def __init__(self, base: AngularProfile, factor: float) -> None:
        self.base = base
        self.factor = float(factor)
        self.theta = base.theta
        self.edge_exponent = base.edge_exponent

    def __call__(self, phi: np.ndarray | float) -> np.ndarray:
        return self.factor * self.base(phi)


class HalfSpaceProfile(AngularProfile):
    """Closed-form profile cos^s(phi) of (x . e)_+^s, the s-harmonic function of the half-space."""
    theta = 0.5 * math.pi

    def __init__(self, s: float) -> None:
        self.s = float(s)
        self.edge_exponent = self.s

    def __call__(self, phi: np.ndarray | float) -> np.ndarray:
        c = np.cos(np.asarray(phi, dtype=float))
        return np.where(c > 0.0, np.abs(c) ** self.s, 0.0)
