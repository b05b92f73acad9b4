import math

from schema import ResultRecord, RunConfig
from spectral.asymptotics import classify_cone
from spectral.cap_spectrum import solve_cap
from spectral.geometry import CapCone, Mesh1D


def run(config: RunConfig) -> list[ResultRecord]:
    """Classical exponent gamma(theta) and lambda1(theta) of the cap."""
    cone = CapCone(n=config.n, theta=config.theta)
    result = solve_cap(cone, config.nodes)
    classification = classify_cone(cone, Mesh1D.uniform(cone.theta, config.nodes))
    return [ResultRecord.build({
        "n": cone.n,
        "theta": cone.theta,
        "theta_over_pi": cone.theta / math.pi,
        "lambda1": result.lambda1,
        "gamma": result.gamma,
        "est_error": result.est_error,
        "classification": classification,
    }, config)]
