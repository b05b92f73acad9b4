import math

from schema import OracleCheck, ResultRecord, RunConfig
from spectral.extension_spectrum import solve_extension, trace_profile
from spectral.frac_oracle import HomogeneousProfile, barrier_sign_check, cap_sample_points, evaluate_fractional_laplacian
from spectral.geometry import CapCone
from spectral.mu_zero import solve_mu_zero
from spectral.profiles import HalfSpaceProfile


def _residual_record(profile: HomogeneousProfile) -> dict:
    values = [evaluate_fractional_laplacian(profile, point) for point in cap_sample_points(profile.cone)]
    return {
        "gamma": profile.gamma,
        "residual": max(abs(v.value) / v.scale for v in values),
        "max_error": max(v.error / v.scale for v in values),
        "flagged": any(v.flagged for v in values),
    }


def run(config: RunConfig) -> list[ResultRecord]:
    """Quadrature checks of (-Delta)^s: the half-space anchor, extension traces and the mu_0 barrier."""
    if config.check == OracleCheck.HALFSPACE:
        cone = CapCone(n=config.n, theta=0.5 * math.pi)
        values = _residual_record(HomogeneousProfile(gamma=config.s, g=HalfSpaceProfile(config.s), cone=cone, s=config.s))
    elif config.check == OracleCheck.PROFILE:
        cone = CapCone(n=config.n, theta=config.theta)
        result = solve_extension(cone, config.s, config.mesh)
        values = _residual_record(HomogeneousProfile(gamma=result.gamma_s, g=trace_profile(result), cone=cone, s=config.s))
    else:
        cone = CapCone(n=config.n, theta=config.theta)
        report = barrier_sign_check(cone, config.s, solve_mu_zero(cone, config.nodes))
        values = {
            "gamma": report.gamma_star,
            "max_value": report.max_value,
            "tolerance": report.tolerance,
            "nonpositive": report.nonpositive,
        }
    return [ResultRecord.build({
        "check": config.check,
        "n": cone.n,
        "s": config.s,
        "theta": cone.theta,
        "theta_over_pi": cone.theta / math.pi,
        **values,
    }, config)]
