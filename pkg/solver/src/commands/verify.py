"""Verification suites: closed-form anchors, monotonicity and bounds, s -> 1 limits, ACF values and quadrature checks."""
import math
from dataclasses import dataclass
from typing import Callable
import numpy as np
from scipy.special import gammaln

from schema import ResultRecord, RunConfig, Suite
from spectral.asymptotics import ConeClass, acf_lower_bound, acf_value, limit_estimates, limit_sweep
from spectral.cap_spectrum import solve_cap
from spectral.decorators import capture_logs
from spectral.extension_spectrum import solve_extension, trace_profile
from spectral.frac_oracle import (
    HomogeneousProfile, QuadratureRule, barrier_sign_check, cap_sample_points, evaluate_fractional_laplacian, sharmonicity_residual
)
from spectral.geometry import CapCone, Mesh1D
from spectral.mu_zero import barrier_exponent, is_admissible, mu_zero_cap, mu_zero_rayleigh, solve_mu_zero
from spectral.profiles import HalfSpaceProfile
from spectral.special_functions import FracParams, log_gamma, normalization_constant, sphere_area

LOG_TAIL = 5
MU_ZERO_NODES = 2000
ACF_GRID = 21


@dataclass
class Check:
    name: str
    observed: float
    expected: float
    tolerance: float
    relation: str
    passed: bool
    log: str | None = None


def close(name: str, observed: float, expected: float, tolerance: float, relative: bool = False) -> Check:
    scale = abs(expected) if relative else 1.0
    return Check(name, observed, expected, tolerance, "rel" if relative else "abs", abs(observed - expected) <= tolerance * scale)


def at_most(name: str, observed: float, bound: float, slack: float = 0.0) -> Check:
    return Check(name, observed, bound, slack, "le", observed <= bound + slack)


def at_least(name: str, observed: float, bound: float, slack: float = 0.0) -> Check:
    return Check(name, observed, bound, slack, "ge", observed >= bound - slack)


def anchors(config: RunConfig) -> list[Check]:
    checks = []
    for x in (1.0, 5.0, 0.5, 0.1, 50.0):
        checks.append(close(f"log_gamma({x})", log_gamma(x), float(gammaln(x)), 1e-12 * max(1.0, abs(float(gammaln(x))))))
    checks.append(close("C(1,1/2)", normalization_constant(FracParams.model_construct(n=1, s=0.5, classical=False)), 1.0 / math.pi, 1e-12))
    checks.append(close("C(2,1/2)", normalization_constant(FracParams(n=2, s=0.5)), 0.5 / math.pi, 1e-12))
    for n in (2, 3):
        s = 0.999
        ratio = normalization_constant(FracParams(n=n, s=s)) * sphere_area(n) / (4.0 * n * (1.0 - s))
        checks.append(close(f"C({n},{s}) omega / (4n(1-s))", ratio, 1.0, 0.02))
    for n, area in ((2, 2.0 * math.pi), (3, 4.0 * math.pi), (4, 2.0 * math.pi ** 2)):
        checks.append(close(f"sphere_area({n})", sphere_area(n), area, 1e-12, relative=True))

    checks.append(close("lambda1(pi/2, n=3)", solve_cap(CapCone(n=3, theta=0.5 * math.pi), config.nodes).lambda1, 2.0, 1e-6))
    for k in (8, 6, 4, 3, 2):
        theta = math.pi / k
        checks.append(close(f"gamma(pi/{k}, n=2)", solve_cap(CapCone(n=2, theta=theta), config.nodes).gamma, k / 2.0, 1e-6))

    for n in (2, 3):
        for s in (0.3, 0.5, 0.75, 0.9):
            result = solve_extension(CapCone(n=n, theta=0.5 * math.pi), s, config.mesh)
            checks.append(close(f"lambda1s(pi/2, n={n}, s={s})", result.lambda1s, s * (n - s), 2e-3, relative=True))

    for k in (16, 8, 6):
        theta = math.pi / k
        cone = CapCone(n=2, theta=theta)
        mesh = Mesh1D.uniform(theta, MU_ZERO_NODES)
        mu0 = mu_zero_cap(cone, mesh).mu0
        checks.append(close(f"mu0(pi/{k}, n=2)", mu0, 4.0 / (math.tan(2.0 * theta) - 2.0 * theta), 1e-5, relative=True))
        checks.append(close(f"mu0 fixed point (pi/{k}, n=2)", mu_zero_rayleigh(cone, mesh), mu0, 1e-6, relative=True))
    cone = CapCone(n=3, theta=math.pi / 8)
    mesh = Mesh1D.uniform(cone.theta, MU_ZERO_NODES)
    checks.append(close("mu0 fixed point (pi/8, n=3)", mu_zero_rayleigh(cone, mesh), mu_zero_cap(cone, mesh).mu0, 1e-6, relative=True))
    return checks


def monotonicity(config: RunConfig) -> list[Check]:
    checks = []
    orders = (0.3, 0.5, 0.7, 0.9, 0.99)
    for k, label in ((1 / 8, "pi/8"), (1 / 4, "pi/4"), (1 / 2, "pi/2"), (3 / 4, "3pi/4")):
        cone = CapCone(n=config.n, theta=k * math.pi)
        cap = solve_cap(cone, config.nodes)
        gamma = cap.gamma
        mu = solve_mu_zero(cone, config.nodes) if is_admissible(cone.n, cap.lambda1) else None
        exponents = [solve_extension(cone, s, config.mesh).gamma_s for s in orders]
        for s, previous, current in zip(orders[1:], exponents, exponents[1:]):
            checks.append(at_least(f"gamma_s nondecreasing ({label}, s={s})", current, previous, 1e-3))
        for s, gamma_s in zip(orders, exponents):
            checks.append(at_most(f"gamma_s <= gamma ({label}, s={s})", gamma_s, gamma, 1e-3))
            checks.append(Check(f"gamma_s < 2s ({label}, s={s})", gamma_s, 2.0 * s, 0.0, "lt", gamma_s < 2.0 * s))
            if mu is not None:
                checks.append(at_most(f"gamma_s <= gamma_s* ({label}, s={s})", gamma_s, barrier_exponent(cone, s, mu.mu0), 1e-3))
    return checks


def limits(config: RunConfig) -> list[Check]:
    checks = []
    orders = [0.9, 0.95, 0.99, 0.999]

    wide = CapCone(n=2, theta=0.5 * math.pi)
    table = limit_sweep(wide, orders, config.mesh)
    estimate = limit_estimates(table, solve_cap(wide, config.nodes))
    checks.append(close("gamma_bar wide (pi/2)", estimate.gamma_bar_est, 1.0, 0.02))
    checks.append(at_most("ratio at s=0.999 wide (pi/2)", float(table.frame["ratio"].iloc[-1]), 0.01))
    checks.append(Check("classification (pi/2)", 0.0, 0.0, 0.0, "eq", estimate.classification == ConeClass.WIDE))
    checks.append(close("predicted mu wide (pi/2)", estimate.predicted_mu, 0.0, 0.0))

    narrow = CapCone(n=2, theta=math.pi / 8)
    mu0 = 16.0 / (4.0 - math.pi)
    table = limit_sweep(narrow, orders, config.mesh)
    estimate = limit_estimates(table, solve_cap(narrow, config.nodes))
    checks.append(close("gamma_s(0.999) narrow (pi/8)", float(table.frame["gamma_s"].iloc[-1]), 2.0, 0.05))
    checks.append(close("mu estimate narrow (pi/8)", estimate.mu_est, mu0, 0.1, relative=True))
    checks.append(at_most("ratio <= mu0 narrow (pi/8)", float(table.frame["ratio"].iloc[-1]), mu0 * 1.05))
    checks.append(close("predicted mu narrow (pi/8)", estimate.predicted_mu, mu0, 1e-5, relative=True))
    return checks


def acf(config: RunConfig) -> list[Check]:
    nu, argmin = acf_value(2, 1.0, 41)
    checks = [close("classical nu", nu, 1.0, 1e-6), close("classical argmin", argmin, 0.5 * math.pi, 1e-6)]
    distances = []
    for s in (0.75, 0.9, 0.99):
        nu, _ = acf_value(2, s, ACF_GRID, config.mesh)
        checks.append(at_least(f"nu lower bound (s={s})", nu, acf_lower_bound(2, s), 1e-3))
        checks.append(at_most(f"nu upper bound (s={s})", nu, s, 1e-3))
        distances.append(abs(nu - 1.0))
    for s, previous, current in zip((0.9, 0.99), distances, distances[1:]):
        checks.append(Check(f"|nu - 1| decreasing (s={s})", current, previous, 0.0, "lt", current < previous))
    return checks


def oracle(config: RunConfig) -> list[Check]:
    rng = np.random.default_rng(config.seed)
    half_space = CapCone(n=2, theta=0.5 * math.pi)
    anchor = HomogeneousProfile(gamma=0.7, g=HalfSpaceProfile(0.7), cone=half_space, s=0.7)
    anchor_residual = sharmonicity_residual(anchor, cap_sample_points(half_space))
    checks = [at_most("half-space residual (n=2, s=0.7)", anchor_residual, 1e-3)]

    rule = QuadratureRule()
    base = evaluate_fractional_laplacian(anchor, (1.0, 0.0), rule).value
    refined = evaluate_fractional_laplacian(anchor, (1.0, 0.0), rule.refined()).value
    checks.append(close("half-space quadrature convergence", refined, base, 1e-4))

    perturbed = HomogeneousProfile(gamma=0.9, g=HalfSpaceProfile(0.7), cone=half_space, s=0.7)
    checks.append(at_least("perturbed exponent residual", sharmonicity_residual(perturbed, cap_sample_points(half_space)), 10.0 * anchor_residual))

    for i in range(10):
        r, phi = float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.0, 0.4 * math.pi))
        at_r = evaluate_fractional_laplacian(anchor, (r, phi))
        at_one = evaluate_fractional_laplacian(anchor, (1.0, phi))
        factor = r ** (anchor.gamma - 2.0 * anchor.s)
        checks.append(close(f"homogeneity ({r:.4f}, {phi:.4f})", at_r.value, factor * at_one.value, at_r.error + factor * at_one.error))

    honest = 0
    trials = 20
    for _ in range(trials):
        phi = float(rng.uniform(0.0, 0.4 * math.pi))
        coarse = evaluate_fractional_laplacian(anchor, (1.0, phi), rule)
        fine = evaluate_fractional_laplacian(anchor, (1.0, phi), rule.refined())
        honest += abs(fine.value - coarse.value) <= coarse.error
    checks.append(at_least("error bound honesty", honest / trials, 0.95))

    cone = CapCone(n=2, theta=0.25 * math.pi)
    residuals = []
    for shape in ((64, 32), (128, 64)):
        result = solve_extension(cone, 0.5, shape)
        profile = HomogeneousProfile(gamma=result.gamma_s, g=trace_profile(result), cone=cone, s=0.5)
        residuals.append(sharmonicity_residual(profile, cap_sample_points(cone)))
    checks.append(Check("extension residual decreases (pi/4, s=0.5)", residuals[1], residuals[0], 0.0, "lt", residuals[1] < residuals[0]))

    narrow = CapCone(n=2, theta=math.pi / 8)
    mu = solve_mu_zero(narrow, config.nodes)
    report = barrier_sign_check(narrow, 0.99, mu)
    checks.append(at_most("barrier sign (pi/8, s=0.99)", report.max_value, report.tolerance))
    scaled = barrier_sign_check(narrow, 0.99, mu, scale=2.0)
    same_sign = scaled.nonpositive == report.nonpositive
    checks.append(Check("barrier sign scale invariance", float(scaled.nonpositive), float(report.nonpositive), 0.0, "eq", same_sign))
    return checks


SUITES: dict[Suite, Callable[[RunConfig], list[Check]]] = {
    Suite.ANCHORS: anchors,
    Suite.MONOTONICITY: monotonicity,
    Suite.LIMITS: limits,
    Suite.ACF: acf,
    Suite.ORACLE: oracle,
}


def run(config: RunConfig) -> list[ResultRecord]:
    """Run one suite; every check becomes a record, failed ones carry the tail of the solver diagnostics."""
    checks, logs = capture_logs(SUITES[config.suite])(config)
    tail = " | ".join(logs.strip().splitlines()[-LOG_TAIL:])
    return [ResultRecord.build({
        "suite": config.suite,
        "check": check.name,
        "observed": float(check.observed),
        "expected": float(check.expected),
        "tolerance": float(check.tolerance),
        "relation": check.relation,
        "passed": bool(check.passed),
        "log": None if check.passed else (tail or None),
    }, config) for check in checks]
