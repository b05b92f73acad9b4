import math

from schema import ResultRecord, RunConfig
from spectral.extension_spectrum import convergence_study, solve_extension
from spectral.geometry import CapCone


def run(config: RunConfig) -> list[ResultRecord]:
    """Fractional exponent gamma_s(theta), or with --levels > 1 the raw eigenvalues over successive mesh doublings
    ending at --mesh."""
    cone = CapCone(n=config.n, theta=config.theta)
    if config.levels > 1:
        scale = 2 ** (config.levels - 1)
        base = (config.mesh[0] // scale, config.mesh[1] // scale)
        study = convergence_study(cone, config.s, base=base, levels=config.levels)
        return [
            ResultRecord.build({"n": cone.n, "s": config.s, "theta": cone.theta, "theta_over_pi": cone.theta / math.pi, **row}, config)
            for row in study.to_dict(orient="records")
        ]

    result = solve_extension(cone, config.s, config.mesh)
    return [ResultRecord.build({
        "n": cone.n,
        "s": config.s,
        "theta": cone.theta,
        "theta_over_pi": cone.theta / math.pi,
        "lambda1s": result.lambda1s,
        "gamma_s": result.gamma_s,
        "lambda1s_coarse": result.coarse_lambda,
        "lambda1s_fine": result.fine_lambda,
        "est_error": result.est_error,
        "converged": result.converged,
    }, config)]
