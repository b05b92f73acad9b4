import math
import pytest
import numpy as np
from pydantic import ValidationError
from scipy.special import gammaln

import spectral.special_functions as sf
from exceptions import DomainError
from spectral.utils import is_close


class TestLogGamma:
    @pytest.mark.parametrize("x, expected", [
        (1.0, 0.0),
        (5.0, math.log(24.0)),
        (0.5, 0.5 * math.log(math.pi)),
    ])
    def test_known_values(self, x: float, expected: float) -> None:
        assert is_close(sf.log_gamma(x), expected, threshold=1e-13)

    @pytest.mark.parametrize("x", np.geomspace(0.1, 50.0, 37))
    def test_against_gammaln(self, x: float) -> None:
        """Relative error at most 1e-12 on [0.1, 50]"""
        reference = float(gammaln(x))
        assert abs(sf.log_gamma(x) - reference) <= 1e-12 * max(1.0, abs(reference))

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_nonpositive_argument(self, x: float) -> None:
        with pytest.raises(DomainError):
            sf.log_gamma(x)

    def test_gamma_recursion(self) -> None:
        for x in (0.3, 1.7, 4.2):
            assert is_close(sf.gamma(x + 1.0), x * sf.gamma(x), threshold=1e-12, relative=True)


class TestFracParams:
    @pytest.mark.parametrize("n, s", [(1, 0.5), (2, 0.0), (2, 1.0), (3, -0.2), (2, 1.5)])
    def test_invalid(self, n: int, s: float) -> None:
        with pytest.raises(ValidationError):
            sf.FracParams(n=n, s=s)

    def test_classical_mode(self) -> None:
        p = sf.FracParams.classical_mode(3)
        assert p.classical and p.s == 1.0
        with pytest.raises(ValidationError):
            sf.FracParams(n=2, s=0.5, classical=True)

    def test_frozen(self) -> None:
        p = sf.FracParams(n=2, s=0.5)
        with pytest.raises(ValidationError):
            p.s = 0.6


class TestNormalizationConstant:
    def test_one_dimensional_half(self) -> None:
        p = sf.FracParams.model_construct(n=1, s=0.5, classical=False)
        assert is_close(sf.normalization_constant(p), 1.0 / math.pi, threshold=1e-12)

    def test_planar_half(self) -> None:
        assert is_close(sf.normalization_constant(sf.FracParams(n=2, s=0.5)), 1.0 / (2.0 * math.pi), threshold=1e-12)

    def test_classical_mode_is_zero(self) -> None:
        assert sf.normalization_constant(sf.FracParams.classical_mode(2)) == 0.0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_vanishes_toward_one(self, n: int) -> None:
        values = [sf.normalization_constant(sf.FracParams(n=n, s=s)) for s in (0.9, 0.99, 0.999, 0.9999)]
        assert all(b < a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("n", [2, 3])
    def test_asymptotics_near_one(self, n: int) -> None:
        """C(n, s) ~ 4n (1 - s) / omega_{n-1} as s -> 1"""
        s = 0.999
        ratio = sf.normalization_constant(sf.FracParams(n=n, s=s)) * sf.sphere_area(n) / (4.0 * n * (1.0 - s))
        assert abs(ratio - 1.0) <= 0.02

    @pytest.mark.parametrize("n", [2, 3, 5])
    @pytest.mark.parametrize("s", [0.01, 0.3, 0.5, 0.9, 0.999])
    def test_upper_bound(self, n: int, s: float) -> None:
        assert 0.0 < sf.normalization_constant(sf.FracParams(n=n, s=s)) <= 4.0 * sf.gamma(0.5 * n + 1.0)

    @pytest.mark.parametrize("n, s", [(2, 0.3), (3, 0.75), (7, 0.2)])
    def test_against_gammaln(self, n: int, s: float) -> None:
        reference = math.exp(2 * s * math.log(2) + math.log(s) + gammaln(n / 2 + s) - n / 2 * math.log(math.pi) - gammaln(1 - s))
        assert is_close(sf.normalization_constant(sf.FracParams(n=n, s=s)), reference, threshold=1e-12, relative=True)


class TestSphereArea:
    @pytest.mark.parametrize("n, expected", [
        (1, 2.0),
        (2, 2.0 * math.pi),
        (3, 4.0 * math.pi),
        (4, 2.0 * math.pi ** 2),
    ])
    def test_values(self, n: int, expected: float) -> None:
        assert is_close(sf.sphere_area(n), expected, threshold=1e-12, relative=True)

    def test_invalid(self) -> None:
        with pytest.raises(DomainError):
            sf.sphere_area(0)


class TestExponentMap:
    def test_zero_eigenvalue(self) -> None:
        assert sf.exponent_from_eigenvalue(0.0, sf.FracParams(n=3, s=0.5)) == 0.0

    @pytest.mark.parametrize("n, s", [(2, 0.5), (3, 0.3), (2, 0.999)])
    def test_half_space(self, n: int, s: float) -> None:
        """The half-space eigenvalue s (n - s) maps to the exponent s"""
        p = sf.FracParams(n=n, s=s)
        assert is_close(sf.exponent_from_eigenvalue(s * (n - s), p), s, threshold=1e-14)

    def test_classical(self) -> None:
        p = sf.FracParams.classical_mode(2)
        assert is_close(sf.exponent_from_eigenvalue(16.0, p), 4.0, threshold=1e-14)
        assert is_close(sf.exponent_from_eigenvalue(2.0, sf.FracParams.classical_mode(3)), 1.0, threshold=1e-14)

    @pytest.mark.parametrize("t", [1e-12, 1e-3, 0.7, 12.0, 1e4])
    def test_inverse(self, t: float) -> None:
        p = sf.FracParams(n=3, s=0.4)
        assert is_close(sf.eigenvalue_from_exponent(sf.exponent_from_eigenvalue(t, p), p), t, threshold=1e-12, relative=True)

    def test_monotone(self) -> None:
        p = sf.FracParams(n=2, s=0.75)
        values = [sf.exponent_from_eigenvalue(t, p) for t in np.linspace(0.0, 10.0, 50)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_negative(self) -> None:
        with pytest.raises(DomainError):
            sf.exponent_from_eigenvalue(-1e-3, sf.FracParams(n=2, s=0.5))
        with pytest.raises(DomainError):
            sf.eigenvalue_from_exponent(-0.1, sf.FracParams(n=2, s=0.5))
