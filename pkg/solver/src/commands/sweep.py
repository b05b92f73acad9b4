import math

from schema import ResultRecord, RunConfig
from spectral.asymptotics import limit_estimates, limit_sweep
from spectral.cap_spectrum import solve_cap
from spectral.geometry import CapCone


def run(config: RunConfig) -> list[ResultRecord]:
    """The s-sweep table of a cone, or with --estimates its extrapolated s -> 1 limits."""
    cone = CapCone(n=config.n, theta=config.theta)
    table = limit_sweep(cone, list(config.s_list), config.mesh)
    if config.estimates:
        estimate = limit_estimates(table, solve_cap(cone, config.nodes))
        return [ResultRecord.build({
            "n": cone.n,
            "theta": cone.theta,
            "theta_over_pi": cone.theta / math.pi,
            **vars(estimate),
        }, config)]

    frame = table.frame.assign(theta_over_pi=table.frame["theta"] / math.pi)
    return [ResultRecord.build(row, config) for row in frame.to_dict(orient="records")]
