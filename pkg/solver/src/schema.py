import math
from enum import Enum
from typing import Any, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from settings import CAP_MESH_NODES, EXTENSION_MESH, MAX_FRACTIONAL_ORDER, __version__

Scalar = Optional[float | int | bool | str]
SIGNIFICANT_DIGITS = 12


class Command(str, Enum):
    GAMMA = "gamma"
    FRAC_GAMMA = "frac-gamma"
    MU0 = "mu0"
    ACF = "acf"
    SWEEP = "sweep"
    ORACLE = "oracle"
    VERIFY = "verify"


class Suite(str, Enum):
    ANCHORS = "anchors"
    MONOTONICITY = "monotonicity"
    LIMITS = "limits"
    ACF = "acf"
    ORACLE = "oracle"


class OracleCheck(str, Enum):
    HALFSPACE = "halfspace"
    PROFILE = "profile"
    BARRIER = "barrier"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


# commands that need an aperture, and those that run extension solves
NEEDS_THETA = {Command.GAMMA, Command.FRAC_GAMMA, Command.MU0, Command.SWEEP}
EXTENSION_COMMANDS = {Command.FRAC_GAMMA, Command.SWEEP, Command.ORACLE}


class RunConfig(BaseModel):
    """A validated command line."""
    model_config = ConfigDict(frozen=True)

    command: Command
    n: int = 2
    theta: Optional[float] = None
    s: Optional[float] = None
    s_list: tuple[float, ...] = ()
    mesh: tuple[int, int] = EXTENSION_MESH
    nodes: int = CAP_MESH_NODES
    grid: int = 41
    levels: int = 1
    curve: bool = False
    limit: bool = False
    estimates: bool = False
    check: OracleCheck = OracleCheck.HALFSPACE
    suite: Optional[Suite] = None
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
    seed: int = 0

    @field_validator("n")
    @classmethod
    def check_dimension(cls, n: int) -> int:
        if n < 2:
            raise ValueError(f"Expected --dim >= 2, instead found {n}.")
        return n

    @field_validator("theta")
    @classmethod
    def check_theta(cls, theta: Optional[float]) -> Optional[float]:
        if theta is not None and not 0.0 < theta < math.pi:
            raise ValueError(f"Expected --theta in (0, pi), instead found {theta}.")
        return theta

    @field_validator("s")
    @classmethod
    def check_order(cls, s: Optional[float]) -> Optional[float]:
        if s is not None and not (0.0 < s < 1.0 or s == 1.0):
            raise ValueError(f"Expected --s in (0, 1), or 1 for classical mode, instead found {s}.")
        return s

    @field_validator("s_list")
    @classmethod
    def check_orders(cls, s_list: tuple[float, ...]) -> tuple[float, ...]:
        if any(b <= a for a, b in zip(s_list, s_list[1:])):
            raise ValueError(f"Expected an increasing --s-list, instead found {list(s_list)}.")
        if s_list and not (0.0 < s_list[0] and s_list[-1] <= MAX_FRACTIONAL_ORDER):
            raise ValueError(f"Expected --s-list inside (0, {MAX_FRACTIONAL_ORDER}], instead found {list(s_list)}.")
        return s_list

    @field_validator("mesh")
    @classmethod
    def check_mesh(cls, mesh: tuple[int, int]) -> tuple[int, int]:
        phi, psi = mesh
        if phi < 16 or psi < 8 or phi % 4 or psi % 2:
            raise ValueError(f"Expected --mesh NxM with N >= 16 divisible by 4 and M >= 8 even, instead found {phi}x{psi}.")
        return mesh

    @field_validator("nodes")
    @classmethod
    def check_nodes(cls, nodes: int) -> int:
        if nodes < 16:
            raise ValueError(f"Expected --nodes >= 16, instead found {nodes}.")
        return nodes

    @field_validator("grid")
    @classmethod
    def check_grid(cls, grid: int) -> int:
        if grid < 9 or grid % 2 == 0:
            raise ValueError(f"Expected an odd --grid >= 9, instead found {grid}.")
        return grid

    @model_validator(mode="after")
    def check_command(self) -> "RunConfig":
        if self.command in NEEDS_THETA and self.theta is None:
            raise ValueError(f"Expected --theta for '{self.command.value}'.")
        if self.command in {Command.FRAC_GAMMA, Command.ACF, Command.ORACLE} and self.s is None and not self.limit:
            raise ValueError(f"Expected --s for '{self.command.value}'.")
        if self.command in EXTENSION_COMMANDS and self.s is not None and self.s > MAX_FRACTIONAL_ORDER:
            raise ValueError(f"Expected --s <= {MAX_FRACTIONAL_ORDER} for '{self.command.value}', instead found {self.s}.")
        if self.command == Command.SWEEP and not self.s_list:
            raise ValueError("Expected --s-list for 'sweep'.")
        if self.command == Command.ORACLE and self.check != OracleCheck.HALFSPACE and self.theta is None:
            raise ValueError(f"Expected --theta for the '{self.check.value}' oracle check.")
        if self.command == Command.VERIFY and self.suite is None:
            raise ValueError("Expected --suite for 'verify'.")
        return self

    def provenance(self) -> dict[str, Scalar]:
        return {
            "mesh": f"{self.mesh[0]}x{self.mesh[1]}",
            "nodes": self.nodes,
            "version": __version__,
        }


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float | None:
    if math.isnan(value):
        return None
    return float(f"{value:.{digits}g}")


class ResultRecord(BaseModel):
    """A flat result row. Floats are kept to 12 significant digits and NaN becomes None."""
    model_config = ConfigDict(frozen=True)

    fields: dict[str, Scalar] = Field(default_factory=dict)

    @field_validator("fields", mode="before")
    @classmethod
    def normalize(cls, fields: dict[str, Any]) -> dict[str, Scalar]:
        out = {}
        for key, value in fields.items():
            if hasattr(value, "item"):
                value = value.item()
            if isinstance(value, Enum):
                value = value.value
            if isinstance(value, float):
                value = round_significant(value)
            out[str(key)] = value
        return out

    @classmethod
    def build(cls, values: dict[str, Any], config: RunConfig) -> "ResultRecord":
        return cls(fields={"command": config.command.value, **values, **config.provenance()})

    def __getitem__(self, key: str) -> Scalar:
        return self.fields[key]
