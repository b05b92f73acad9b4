import math

from schema import ResultRecord, RunConfig
from spectral.asymptotics import acf_curve, acf_lower_bound, limit_profile


def run(config: RunConfig) -> list[ResultRecord]:
    """nu_s^ACF and its argmin; --curve emits Gamma^s on the grid and --limit the s -> 1 limit curve."""
    if config.limit:
        frame = limit_profile(config.n, config.grid, config.nodes)
        return [ResultRecord.build({"n": config.n, **row}, config) for row in frame.to_dict(orient="records")]

    curve = acf_curve(config.n, config.s, config.grid, config.mesh)
    if config.curve:
        return [
            ResultRecord.build({"n": config.n, "s": config.s, **row}, config)
            for row in curve.to_frame().to_dict(orient="records")
        ]
    return [ResultRecord.build({
        "n": config.n,
        "s": config.s,
        "grid": config.grid,
        "nu": curve.nu_acf,
        "argmin_theta": curve.argmin_theta,
        "argmin_over_pi": curve.argmin_theta / math.pi,
        "lower_bound": acf_lower_bound(config.n, config.s),
        "upper_bound": config.s,
    }, config)]
