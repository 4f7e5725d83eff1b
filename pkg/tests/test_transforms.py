"""Преобразования Фурье и Радона, тождества и маршруты спаривания."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import trapezoid

from models.frequency_grid import FrequencyGrid
from models.norm_body import NormBody
from models.radial_profile import exp_power, power, profile_product
from models.test_function import TestFunction
from services.transform_service import TransformService
from utils.errors import RefusalError


@pytest.fixture(scope='module')
def transforms():
    return TransformService()


class TestFourier:

    @pytest.mark.parametrize('xi', [0.5, 2.0, 6.0])
    def test_gaussian_1d(self, transforms, xi):
        result = transforms.ft_even_1d(exp_power(2.0), xi)
        assert_allclose(result.value, math.sqrt(math.pi) * math.exp(-xi * xi / 4.0), rtol=1e-9, atol=1e-14)

    @pytest.mark.parametrize('n', [2, 3, 5])
    @pytest.mark.parametrize('rho', [0.3, 1.0, 4.0])
    def test_gaussian_radial(self, transforms, n, rho):
        result = transforms.radial_ft(exp_power(2.0), n, rho)
        assert result.converged
        assert_allclose(result.value, math.pi ** (0.5 * n) * math.exp(-rho * rho / 4.0), rtol=1e-8, atol=1e-14)

    def test_exponential_in_three_dimensions(self, transforms):
        # e^{-|x|} в R^3: 8 pi / (1 + rho^2)^2
        assert_allclose(transforms.radial_ft(exp_power(1.0), 3, 1.0).value, 2.0 * math.pi, rtol=1e-8)

    def test_yukawa_potential(self, transforms):
        # e^{-|x|} / |x| в R^3: 4 pi / (1 + rho^2)
        f = profile_product(power(-1.0), exp_power(1.0))
        assert_allclose(transforms.radial_ft(f, 3, 2.0).value, 4.0 * math.pi / 5.0, rtol=1e-8)

    def test_one_dimension_uses_cosine_transform(self, transforms):
        assert_allclose(transforms.radial_ft(exp_power(1.0), 1, 2.0).value, 2.0 / 5.0, rtol=1e-9)

    def test_grid_includes_zero(self, transforms):
        grid = FrequencyGrid([0.0, 1.0, 2.0])
        values = [r.value for r in transforms.transform_grid(exp_power(2.0), 3, grid)]
        assert_allclose(values, math.pi ** 1.5 * np.exp(-np.array([0.0, 1.0, 2.0]) ** 2 / 4.0), rtol=1e-8)

    def test_refusals(self, transforms):
        with pytest.raises(RefusalError):
            transforms.radial_ft(power(-3.0), 3, 1.0)
        with pytest.raises(RefusalError):
            transforms.radial_ft(power(-1.0), 3, 1.0)
        with pytest.raises(RefusalError):
            transforms.ft_even_1d(power(-1.0), 1.0)

    def test_argument_validation(self, transforms):
        with pytest.raises(ValueError):
            transforms.radial_ft(exp_power(2.0), 3, 0.0)
        with pytest.raises(ValueError):
            transforms.radial_ft(exp_power(2.0), 0, 1.0)


class TestRadon:

    def test_pair_orthogonal_to_center(self, transforms):
        phi = TestFunction.gaussian_pair([0.0, 1.0])
        assert_allclose(transforms.radon(phi, [1.0, 0.0], 0.0), 2.0 * math.sqrt(2.0 * math.pi))

    def test_direction_is_normalized(self, transforms):
        phi = TestFunction.gaussian(3)
        assert_allclose(transforms.radon(phi, [2.0, 0.0, 0.0], 0.0), 2.0 * math.pi)

    def test_total_mass(self, transforms):
        phi = TestFunction.gaussian_pair([0.5, -1.0, 0.3], sigma=0.8)
        t = np.linspace(-12.0, 12.0, 4001)
        mass = trapezoid(transforms.radon(phi, [0.6, 0.0, 0.8], t), t)
        assert_allclose(mass, phi.l1_norm(), rtol=1e-8)

    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_slice_identity(self, transforms, seed):
        phi = TestFunction.battery(3, 1, seed)[0]
        rng = np.random.default_rng(seed)
        residual = transforms.slice_identity_check(phi, rng.normal(size=3), float(rng.uniform(0.1, 5.0)))
        assert residual.passed, residual.to_dict()

    @pytest.mark.parametrize('n, r', [(3, 1.0), (4, 0.5), (5, 2.0)])
    def test_radon_average_identity(self, transforms, n, r):
        residual = transforms.integral_radon_identity(TestFunction.gaussian(n), n, r)
        assert residual.relative
        assert residual.passed, residual.to_dict()

    def test_radon_average_requirements(self, transforms):
        with pytest.raises(ValueError):
            transforms.integral_radon_identity(TestFunction.gaussian(2), 2, 1.0)
        with pytest.raises(ValueError):
            transforms.integral_radon_identity(TestFunction.gaussian_pair([1.0, 0.0, 0.0]), 3, 1.0)


class TestDilation:

    @pytest.mark.parametrize('body, xi', [
        (NormBody.cube(3), [1.5, 0.0, 0.0]),
        (NormBody.ball(3), [0.3, 0.4, 1.2]),
        (NormBody.ellipsoid(np.diag([1.0, 4.0, 0.25])), [0.8, 0.6, 0.0]),
    ])
    def test_identity_holds(self, transforms, body, xi):
        residual = transforms.dilation_ft_check(body, 2.0, xi)
        assert residual.passed, residual.to_dict()

    def test_matches_closed_form(self, transforms):
        residual = transforms.dilation_ft_check(NormBody.cube(3), 2.0, [1.5, 0.0, 0.0])
        # chi^ куба [-2, 2]^3 в точке 1.5 e_1
        assert_allclose(residual.lhs, 2.0 * math.sin(3.0) / 1.5 * 16.0, rtol=1e-9)

    def test_zero_frequency(self, transforms):
        with pytest.raises(ValueError):
            transforms.dilation_ft_check(NormBody.ball(2), 2.0, [0.0, 0.0])


class TestSectionTransform:

    @pytest.mark.parametrize('body, v', [
        (NormBody.cube(3), [1.0, 2.0, 2.0]),
        (NormBody.ball(3), [0.0, 0.6, 0.8]),
        (NormBody.ellipsoid(np.diag([1.0, 4.0, 0.25])), [0.8, 0.6, 0.0]),
    ])
    def test_matches_indicator_transform(self, transforms, body, v):
        u = np.asarray(v) / np.linalg.norm(v)
        result = transforms.section_ft(body, u, 1.5, backend='exact')
        assert_allclose(result.value, transforms.bodies.indicator_ft(body, 1.5 * u), rtol=1e-6)

    def test_monte_carlo_backend(self, transforms):
        body, axis = NormBody.lp(3, 1.0), [0.0, 0.0, 1.0]
        exact = transforms.section_ft(body, axis, 2.0, backend='exact')
        sampled = transforms.section_ft(body, axis, 2.0, backend='monte_carlo', samples=20_000, seed=1)
        assert abs(sampled.value - exact.value) <= 5.0 * sampled.error_estimate + 1e-2

    def test_backends(self, transforms):
        with pytest.raises(RefusalError):
            transforms.section_ft(NormBody.lp(3, 1.0), [1.0, 1.0, 1.0], 1.0, backend='exact')
        with pytest.raises(ValueError):
            transforms.section_ft(NormBody.ball(3), [1.0, 0.0, 0.0], 1.0, backend='simpson')


class TestPairing:

    @staticmethod
    def gaussian_pairing(n: int) -> float:
        # int e^{-|x|^2} (2 pi)^{n/2} e^{-|x|^2 / 2} dx
        return (2.0 * math.pi) ** (0.5 * n) * (math.pi / 1.5) ** (0.5 * n)

    def test_radial_route(self, transforms):
        result = transforms.pairing(exp_power(2.0), NormBody.ball(3), TestFunction.gaussian(3), route='radial')
        assert_allclose(result.value, self.gaussian_pairing(3), rtol=1e-8)

    @pytest.mark.slow
    def test_direct_route_agrees(self, transforms):
        exact = self.gaussian_pairing(3)
        result = transforms.pairing(exp_power(2.0), NormBody.ball(3), TestFunction.gaussian(3),
                                    route='direct', samples=200_000, seed=4)
        assert abs(result.value - exact) <= 5.0 * result.error_estimate + 1e-3 * exact

    @pytest.mark.slow
    def test_sectional_route_agrees(self, transforms):
        exact = self.gaussian_pairing(3)
        result = transforms.pairing(exp_power(2.0), NormBody.ball(3), TestFunction.gaussian(3),
                                    route='sectional', samples=2048, seed=4)
        assert abs(result.value - exact) <= 5.0 * result.error_estimate + 1e-3 * exact

    @pytest.mark.slow
    def test_sectional_route_on_polytope_matches_cube(self, transforms):
        phi = TestFunction.gaussian(3)
        exact = transforms.pairing(exp_power(2.0), NormBody.cube(3), phi, route='sectional', samples=256, seed=6)
        sampled = transforms.pairing(exp_power(2.0), NormBody.polytope(np.eye(3)), phi, route='sectional',
                                     samples=256, seed=6)
        tolerance = 5.0 * (exact.error_estimate + sampled.error_estimate) + 1e-2 * abs(exact.value)
        assert abs(sampled.value - exact.value) <= tolerance

    def test_sectional_route_without_section_formula(self, transforms):
        args = (exp_power(2.0), NormBody.lp(3, 1.0), TestFunction.gaussian_pair([0.5, 0.0, 1.0]))
        first = transforms.pairing(*args, route='sectional', samples=64, seed=2)
        second = transforms.pairing(*args, route='sectional', samples=64, seed=2)
        assert math.isfinite(first.value)
        assert first.error_estimate > 0
        assert first.value == second.value

    def test_direct_route_is_reproducible(self, transforms):
        args = (exp_power(1.0), NormBody.cube(2), TestFunction.gaussian_pair([0.5, 1.0]))
        first = transforms.pairing(*args, route='direct', samples=5000, seed=11)
        second = transforms.pairing(*args, route='direct', samples=5000, seed=11)
        assert first.value == second.value

    def test_route_preconditions(self, transforms):
        phi = TestFunction.gaussian(2)
        with pytest.raises(ValueError):
            transforms.pairing(exp_power(2.0), NormBody.ball(2), phi, route='polar')
        with pytest.raises(ValueError):
            transforms.pairing(exp_power(2.0), NormBody.ball(3), phi)
        with pytest.raises(RefusalError):
            transforms.pairing(exp_power(2.0), NormBody.cube(2), phi, route='radial')
        with pytest.raises(RefusalError):
            transforms.pairing(exp_power(2.0), NormBody.lp(2, 0.5), phi, route='sectional')
        with pytest.raises(RefusalError):
            transforms.pairing(power(-2.0), NormBody.ball(2), phi)

    def test_spherical_average(self):
        s = np.array([0.5, 2.0, 7.0])
        assert_allclose(TransformService.spherical_average_cos(3, s), np.sin(s) / s, rtol=1e-12)
        assert_allclose(TransformService.spherical_average_cos(1, s), np.cos(s))
        assert_allclose(TransformService.spherical_average_cos(2, np.array([0.0])), [1.0])

    def test_truncation_converges(self, transforms):
        rows = transforms.truncation_stability(-1.0, 1.0, [0.2, 0.05, 0.01], TestFunction.gaussian(3))
        assert [eps for eps, _ in rows] == [0.2, 0.05, 0.01, 0.0]
        limit = rows[-1][1].value
        gaps = [abs(result.value - limit) for _, result in rows[:-1]]
        assert gaps[0] > gaps[1] > gaps[2]
