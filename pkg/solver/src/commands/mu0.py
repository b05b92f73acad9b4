import math

from schema import ResultRecord, RunConfig
from spectral.geometry import CapCone, Mesh1D
from spectral.mu_zero import barrier_exponent, euler_lagrange_residual, mu_zero_cap, mu_zero_rayleigh


def run(config: RunConfig) -> list[ResultRecord]:
    """mu_0(theta) of a narrow cap, its fixed-point cross-check and, with --s, the barrier exponent."""
    cone = CapCone(n=config.n, theta=config.theta)
    mesh = Mesh1D.uniform(cone.theta, config.nodes)
    result = mu_zero_cap(cone, mesh)
    return [ResultRecord.build({
        "n": cone.n,
        "theta": cone.theta,
        "theta_over_pi": cone.theta / math.pi,
        "lambda1": result.lambda1,
        "mu0": result.mu0,
        "mu0_rayleigh": mu_zero_rayleigh(cone, mesh),
        "euler_lagrange_residual": euler_lagrange_residual(result, cone),
        "est_error": result.est_error,
        "s": config.s,
        "gamma_star": barrier_exponent(cone, config.s, result.mu0) if config.s is not None else None,
    }, config)]
