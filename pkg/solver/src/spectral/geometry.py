"""Cones, spherical-cap meshes and the tensor meshes of the upper half-sphere."""
import math
from dataclasses import dataclass
import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from exceptions import DomainError

MIN_NODES = 16


class CapCone(BaseModel):
    """Right circular cone C_theta of half-aperture theta around a fixed axis of R^n."""
    model_config = ConfigDict(frozen=True)

    n: int
    theta: float

    @field_validator("n")
    @classmethod
    def check_dimension(cls, n: int) -> int:
        if n < 2:
            raise ValueError(f"Expected dimension n >= 2, instead found {n}.")
        return n

    @field_validator("theta")
    @classmethod
    def check_aperture(cls, theta: float) -> float:
        if not 0.0 < theta < math.pi:
            raise ValueError(f"Expected theta in (0, pi), instead found {theta}.")
        return theta

    def complement(self) -> "CapCone":
        return CapCone(n=self.n, theta=math.pi - self.theta)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_increasing(nodes: np.ndarray, name: str) -> None:
    if np.any(np.diff(nodes) <= 0):
        raise DomainError(f"Expected strictly increasing {name} nodes, found a zero-length cell.")


@dataclass(frozen=True, eq=False)
class Mesh1D:
    nodes: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        if self.nodes.ndim != 1 or self.nodes.shape[0] < MIN_NODES:
            raise DomainError(f"Expected at least {MIN_NODES} mesh nodes, instead found {self.nodes.shape}.")
        if self.nodes[0] != 0.0:
            raise DomainError(f"Expected the mesh to start at 0, instead found {self.nodes[0]}.")
        _check_increasing(self.nodes, "mesh")

    @property
    def count(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def end(self) -> float:
        return float(self.nodes[-1])

    @classmethod
    def uniform(cls, end: float, count: int) -> "Mesh1D":
        nodes = np.linspace(0.0, end, count)
        nodes[-1] = end
        return cls(nodes)

    def refine(self) -> "Mesh1D":
        """Nested refinement: every cell is split at its midpoint."""
        mids = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        nodes = np.empty(2 * self.count - 1)
        nodes[0::2] = self.nodes
        nodes[1::2] = mids
        return Mesh1D(nodes)


def default_grading(s: float) -> float:
    """Grading exponent toward the singular set of the extension problem; q * s >= 1.2 keeps the second-order rate."""
    return max(2.0, 1.2 / s)


@dataclass(frozen=True, eq=False)
class HalfSphereMesh:
    """Tensor mesh of the (phi, psi) rectangle parameterizing the upper half-sphere S^n_+.

    phi in [0, pi] is the angle from the cone axis on S^{n-1}, psi in [0, pi/2] the latitude with y = sin(psi).
    Cap nodes and complement nodes are both graded toward phi = theta, psi nodes toward psi = 0.
    """
    theta: float
    phi_nodes: np.ndarray
    psi_nodes: np.ndarray
    grading: float
    cap_intervals: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi_nodes", _frozen(self.phi_nodes))
        object.__setattr__(self, "psi_nodes", _frozen(self.psi_nodes))
        _check_increasing(self.phi_nodes, "phi")
        _check_increasing(self.psi_nodes, "psi")
        if self.phi_nodes[self.cap_intervals] != self.theta:
            raise DomainError(f"Expected theta = {self.theta} to be a phi node.")

    @classmethod
    def build(cls, theta: float, phi_intervals: int, psi_intervals: int, grading: float = 2.0) -> "HalfSphereMesh":
        """Graded tensor mesh with theta as an exact phi node.

        Args:
            theta (float): Cap half-aperture.
            phi_intervals (int): Number of phi cells on [0, pi], half of them inside the cap.
            psi_intervals (int): Number of psi cells on [0, pi/2].
            grading (float, optional): Grading exponent q >= 1. Defaults to 2.

        Raises:
            DomainError: If the counts are too small or q < 1.
        """
        if phi_intervals < 8 or psi_intervals < 4:
            raise DomainError(f"Expected at least 8 x 4 cells, instead found {phi_intervals} x {psi_intervals}.")
        if grading < 1.0:
            raise DomainError(f"Expected a grading exponent q >= 1, instead found {grading}.")
        if not 0.0 < theta < math.pi:
            raise DomainError(f"Expected theta in (0, pi), instead found {theta}.")

        m_in = phi_intervals // 2
        m_out = phi_intervals - m_in
        t_in = np.arange(m_in + 1) / m_in
        t_out = np.arange(1, m_out + 1) / m_out
        inner = theta * (1.0 - (1.0 - t_in) ** grading)
        outer = theta + (math.pi - theta) * t_out ** grading
        inner[-1] = theta
        outer[-1] = math.pi
        phi = np.concatenate([inner, outer])

        psi = 0.5 * math.pi * (np.arange(psi_intervals + 1) / psi_intervals) ** grading
        psi[-1] = 0.5 * math.pi
        return cls(theta=theta, phi_nodes=phi, psi_nodes=psi, grading=grading, cap_intervals=m_in)

    @property
    def shape(self) -> tuple[int, int]:
        return self.phi_nodes.shape[0] - 1, self.psi_nodes.shape[0] - 1

    def coarsen(self) -> "HalfSphereMesh":
        """The nested mesh with half the cells in each direction.

        Raises:
            DomainError: If the cell counts do not halve into a nested sub-mesh.
        """
        n_phi, n_psi = self.shape
        if self.cap_intervals % 2 or (n_phi - self.cap_intervals) % 2 or n_psi % 2:
            raise DomainError(f"Expected even cell counts to coarsen, instead found {n_phi} x {n_psi}.")
        return HalfSphereMesh(
            theta=self.theta,
            phi_nodes=self.phi_nodes[::2],
            psi_nodes=self.psi_nodes[::2],
            grading=self.grading,
            cap_intervals=self.cap_intervals // 2,
        )
