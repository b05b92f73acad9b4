import math
import pytest
import numpy as np
import pandas as pd

from exceptions import DomainError, NumericalFailureError
import spectral.asymptotics as asymptotics
from spectral.asymptotics import (
    SWEEP_COLUMNS, ConeClass, SweepTable, acf_curve, acf_lower_bound, classify_cone, endpoint_limits, limit_estimates,
    limit_profile, limit_sweep, symmetric_grid,
)
from spectral.cap_spectrum import solve_cap
from spectral.geometry import CapCone, Mesh1D
import spectral.mu_zero as mu_zero
from spectral.mu_zero import mu_zero_cap
from spectral.special_functions import FracParams, normalization_constant
from spectral.utils import is_close

TINY_SHAPE = (16, 8)


def synthetic_table(cone: CapCone, gamma_bar: float, mu: float) -> SweepTable:
    """Sweep rows exactly linear in 1 - s"""
    s = np.array([0.5, 0.9, 0.95, 0.99])
    frame = pd.DataFrame({
        "n": cone.n,
        "s": s,
        "theta": cone.theta,
        "lambda1s": np.nan,
        "gamma_s": gamma_bar - 0.5 * (1.0 - s),
        "Cns": np.nan,
        "ratio": mu + 2.0 * (1.0 - s),
        "gamma_star": np.nan,
        "est_error": 0.0,
    }, columns=SWEEP_COLUMNS)
    return SweepTable(cone=cone, frame=frame)


class TestSymmetricGrid:
    @pytest.mark.parametrize("count", [9, 21, 41])
    def test_mirror_symmetry(self, count: int) -> None:
        grid = symmetric_grid(count)
        assert grid.shape == (count,)
        assert grid[count // 2] == 0.5 * math.pi
        assert is_close(grid + grid[::-1], math.pi, threshold=1e-15)
        assert is_close(grid[0], 0.02 * math.pi, threshold=1e-15)
        assert np.all(np.diff(grid) > 0)

    @pytest.mark.parametrize("count", [7, 10, 40])
    def test_invalid_size(self, count: int) -> None:
        with pytest.raises(DomainError):
            symmetric_grid(count)


class TestAcfCurve:
    def test_classical_planar(self) -> None:
        """Gamma(theta) = (pi / (2 theta) + pi / (2 (pi - theta))) / 2 is minimal at pi / 2 with value 1"""
        curve = acf_curve(2, 1.0, grid=9)
        assert is_close(curve.nu_acf, 1.0, threshold=1e-6)
        assert curve.argmin_theta == 0.5 * math.pi
        expected = 0.5 * (math.pi / (2 * curve.theta_grid) + math.pi / (2 * (math.pi - curve.theta_grid)))
        assert is_close(curve.Gamma_s_values, expected, threshold=1e-6, relative=True)

    def test_fractional_curve_shape(self) -> None:
        curve = acf_curve(2, 0.5, grid=9, shape=TINY_SHAPE)
        assert np.array_equal(curve.Gamma_s_values, curve.Gamma_s_values[::-1])
        assert np.all(curve.gamma_s_values > 0)
        assert curve.nu_acf <= curve.Gamma_s_values.min() + 1e-12
        assert 0.0 < curve.argmin_theta <= 0.5 * math.pi

        frame = curve.to_frame()
        assert list(frame.columns) == ["theta", "theta_over_pi", "gamma_s", "Gamma_s"]
        assert is_close(frame["theta_over_pi"].to_numpy(), curve.theta_grid / math.pi, threshold=1e-15)

    def test_flat_minimum_keeps_grid_point(self, monkeypatch) -> None:
        """Gamma is flat on [0.2 pi, 0.4 pi], so the grid points 0.26 pi and 0.38 pi tie"""
        def flat(n: int, s: float, theta: float, shape: tuple[int, int]) -> float:
            return 1.0 + max(0.0, abs(min(theta, math.pi - theta) - 0.3 * math.pi) - 0.1 * math.pi)

        monkeypatch.setattr(asymptotics, "exponent", flat)
        curve = acf_curve(2, 0.5, grid=9, shape=TINY_SHAPE)
        assert curve.nu_acf == 1.0
        assert curve.argmin_theta == curve.theta_grid[2]
        assert is_close(curve.argmin_theta, 0.26 * math.pi, threshold=1e-12)

    @pytest.mark.parametrize("s", [0.0, 0.9995, 1.5])
    def test_invalid_order(self, s: float) -> None:
        with pytest.raises(DomainError):
            acf_curve(2, s, grid=9, shape=TINY_SHAPE)


class TestBounds:
    @pytest.mark.parametrize("n, s, expected", [
        (2, 0.2, 0.1),
        (2, 0.8, 0.55),
        (3, 0.8, 0.4),
    ])
    def test_acf_lower_bound(self, n: int, s: float, expected: float) -> None:
        assert is_close(acf_lower_bound(n, s), expected, threshold=1e-15)

    @pytest.mark.parametrize("n, s, expected", [
        (2, 0.75, (1.5, 0.25)),
        (2, 0.4, (0.8, 0.0)),
        (3, 0.75, (1.5, 0.0)),
    ])
    def test_endpoint_limits(self, n: int, s: float, expected: tuple[float, float]) -> None:
        assert is_close(endpoint_limits(n, s), expected, threshold=1e-15)


class TestClassification:
    @pytest.mark.parametrize("n, theta, expected", [
        (2, math.pi / 5, ConeClass.NARROW),
        (2, math.pi / 3, ConeClass.WIDE),
        (3, 0.3, ConeClass.NARROW),
        (3, math.pi / 2, ConeClass.WIDE),
    ])
    def test_classify_cone(self, n: int, theta: float, expected: ConeClass) -> None:
        assert classify_cone(CapCone(n=n, theta=theta), Mesh1D.uniform(theta, 128)) == expected


class TestLimitEstimates:
    def test_narrow_cone(self) -> None:
        cone = CapCone(n=2, theta=math.pi / 8)
        mu = mu_zero_cap(cone, Mesh1D.uniform(cone.theta, 128))
        estimate = limit_estimates(synthetic_table(cone, 2.0, 18.6), solve_cap(cone, 128), mu)
        assert is_close(estimate.gamma_bar_est, 2.0, threshold=1e-10)
        assert is_close(estimate.mu_est, 18.6, threshold=1e-10)
        assert estimate.gamma_residual < 1e-10 and estimate.mu_residual < 1e-10
        assert estimate.classification == ConeClass.NARROW
        assert estimate.predicted_gamma_bar == 2.0
        assert estimate.predicted_mu == mu.mu0

    def test_wide_cone(self) -> None:
        cone = CapCone(n=2, theta=math.pi / 2)
        estimate = limit_estimates(synthetic_table(cone, 1.0, 0.0), solve_cap(cone, 128))
        assert is_close(estimate.gamma_bar_est, 1.0, threshold=1e-10)
        assert is_close(estimate.mu_est, 0.0, threshold=1e-10)
        assert estimate.classification == ConeClass.WIDE
        assert is_close(estimate.predicted_gamma_bar, 1.0, threshold=1e-6)
        assert estimate.predicted_mu == 0.0

    def test_too_few_rows_near_one(self) -> None:
        cone = CapCone(n=2, theta=math.pi / 2)
        table = synthetic_table(cone, 1.0, 0.0)
        table = SweepTable(cone=cone, frame=table.frame.iloc[:3])
        with pytest.raises(DomainError):
            limit_estimates(table, solve_cap(cone, 128))


class TestLimitSweep:
    def test_narrow_rows(self) -> None:
        cone = CapCone(n=2, theta=math.pi / 8)
        table = limit_sweep(cone, [0.9, 0.95], TINY_SHAPE)
        frame = table.frame
        assert list(frame.columns) == SWEEP_COLUMNS
        assert frame["s"].tolist() == [0.9, 0.95]
        for _, row in frame.iterrows():
            assert is_close(row["Cns"], normalization_constant(FracParams(n=2, s=row["s"])), threshold=1e-15)
            assert is_close(row["ratio"], row["Cns"] / (2 * row["s"] - row["gamma_s"]), threshold=1e-12, relative=True)
            assert row["gamma_star"] < 2 * row["s"]

    def test_wide_cone_has_no_barrier(self) -> None:
        table = limit_sweep(CapCone(n=2, theta=2.0), [0.6], TINY_SHAPE)
        assert table.frame["gamma_star"].isna().all()

    def test_wide_cone_skips_the_threshold_solve(self, monkeypatch) -> None:
        def unavailable(n: int) -> float:
            raise NumericalFailureError("Inverse iteration did not converge in 10000 iterations.", 1.7e-9, 10_000)

        monkeypatch.setattr(mu_zero, "narrow_threshold", unavailable)
        table = limit_sweep(CapCone(n=2, theta=1.9), [0.6, 0.7], TINY_SHAPE)
        assert table.frame["gamma_star"].isna().all()
        assert table.frame["gamma_s"].notna().all()

    @pytest.mark.parametrize("s_list", [[], [0.9, 0.8], [0.9, 0.9], [0.0, 0.5], [0.99, 0.9995]])
    def test_invalid_orders(self, s_list: list[float]) -> None:
        with pytest.raises(DomainError):
            limit_sweep(CapCone(n=2, theta=1.0), s_list, TINY_SHAPE)


class TestLimitProfile:
    def test_planar(self) -> None:
        frame = limit_profile(2, grid=9, count=128)
        assert list(frame.columns) == ["theta", "theta_over_pi", "gamma", "gamma_bar", "Gamma", "Gamma_bar"]
        assert (frame["gamma_bar"] <= 2.0).all()
        assert is_close(frame["Gamma"].iloc[4], 1.0, threshold=1e-6)
        assert np.array_equal(frame["Gamma_bar"].to_numpy(), frame["Gamma_bar"].to_numpy()[::-1])
        assert (frame["Gamma_bar"] <= frame["Gamma"] + 1e-15).all()
