"""Критерии положительной определенности: лемма, теоремы, Пойа, матрицы Грама, проходы."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from models.frequency_grid import FrequencyGrid
from models.gram_spec import GramSpec
from models.kernels import BodyStack, CosineKernel, NormKernel, RadialWeight
from models.norm_body import NormBody
from models.radial_profile import (admissible_omega_profile, exp_power, mixture, power, truncated_power)
from models.test_function import TestFunction
from models.verdict import Classification
from services.criteria_service import CriteriaService
from services.gram_service import GramService
from utils.errors import RefusalError


@pytest.fixture(scope='module')
def criteria():
    return CriteriaService()


@pytest.fixture(scope='module')
def gram():
    return GramService()


SMALL_GRID = FrequencyGrid.log(0.1, 10.0, 20)


class TestLemma1:

    def test_closed_form(self):
        assert_allclose(CriteriaService.lemma1_closed_form(1.0, math.pi), 8.0)
        assert_allclose(CriteriaService.lemma1_closed_form(2.0, math.pi), 0.0, atol=1e-15)
        with pytest.raises(ValueError):
            CriteriaService.lemma1_closed_form(0.0, 1.0)

    def test_closed_form_small_b(self):
        a, b = 1.0, 1e-3
        assert_allclose(CriteriaService.lemma1_closed_form(a, b), 2.0 * a * b * b, rtol=1e-6)

    @pytest.mark.parametrize('a, b', [(1.0, math.pi), (0.1, 10.0), (3.0, 0.5), (10.0, 10.0)])
    def test_identity(self, criteria, a, b):
        residual = criteria.lemma1_identity_check(a, b)
        assert residual.passed, residual.to_dict()

    @pytest.mark.parametrize('branch', [1, 2])
    def test_base_case_pairing(self, criteria, branch):
        verdict = criteria.lemma1_pairing(truncated_power(0.0, 1.0), truncated_power(1.0, math.pi), branch)
        assert verdict.classification == Classification.POSITIVE_NUMERIC
        assert_allclose(verdict.min_value, 8.0, rtol=1e-8)
        assert [h.name for h in verdict.hypotheses] == ['phi_nonincreasing', 'psi_over_x_nonincreasing',
                                                        f'lemma1_branch{branch}']

    @pytest.mark.parametrize('branch', [1, 2, 3])
    def test_every_branch_fails_for_slow_tail(self, criteria, branch):
        verdict = criteria.lemma1_pairing(truncated_power(0.0, 1.0), power(0.5), branch)
        assert verdict.classification == Classification.HYPOTHESES_FAILED
        assert verdict.hypotheses[-1].satisfied is False
        assert verdict.exit_code == 3

    def test_increasing_phi(self, criteria):
        verdict = criteria.lemma1_pairing(power(1.0), truncated_power(1.0, 1.0), 2)
        assert verdict.classification == Classification.HYPOTHESES_FAILED
        assert verdict.hypotheses[0].satisfied is False

    def test_branch_validation(self, criteria):
        with pytest.raises(ValueError):
            criteria.lemma1_pairing(truncated_power(0.0, 1.0), truncated_power(1.0, 1.0), 4)


class TestThmDecreasing:

    def test_exponential_matches_closed_transform(self, criteria):
        # |x|^{-1} e^{-|x|} в R^3: 4 pi / (1 + rho^2)
        verdict = criteria.verify_thm_decreasing(exp_power(1.0), 3, grid=SMALL_GRID)
        assert verdict.classification == Classification.POSITIVE_NUMERIC
        assert_allclose(verdict.min_value, 4.0 * math.pi / 101.0, rtol=1e-6)
        assert_allclose(verdict.details['value_at_smallest'], 4.0 * math.pi / 1.01, rtol=1e-6)
        assert verdict.witness is None

    @pytest.mark.parametrize('p', [0.5, 2.0, 3.0])
    def test_stretched_exponentials_are_positive(self, criteria, p):
        verdict = criteria.verify_thm_decreasing(exp_power(p), 3, grid=SMALL_GRID)
        assert verdict.classification == Classification.POSITIVE_NUMERIC

    def test_five_dimensions(self, criteria):
        verdict = criteria.verify_thm_decreasing(exp_power(2.0), 5, grid=SMALL_GRID)
        assert verdict.classification == Classification.POSITIVE_NUMERIC

    def test_refuses_plane(self, criteria):
        with pytest.raises(RefusalError):
            criteria.verify_thm_decreasing(exp_power(1.0), 2)

    def test_branch_dimension_constraints(self, criteria):
        with pytest.raises(RefusalError):
            criteria.verify_thm_decreasing(exp_power(1.0), 5, branch=2)
        with pytest.raises(ValueError):
            criteria.verify_thm_decreasing(exp_power(1.0), 3, branch=3)

    def test_hypotheses_failed(self, criteria):
        verdict = criteria.verify_thm_decreasing(power(1.0), 3, grid=SMALL_GRID)
        assert verdict.classification == Classification.HYPOTHESES_FAILED
        assert verdict.min_value is None

    def test_non_integrable_head(self, criteria):
        verdict = criteria.verify_thm_decreasing(power(-2.5), 3, grid=SMALL_GRID)
        assert verdict.classification == Classification.HYPOTHESES_FAILED
        assert any(h.name == 'thm2_integrability_branch1' and h.satisfied is False for h in verdict.hypotheses)

    def test_gnp_sweep(self, criteria):
        rows = criteria.sweep_gnp(3, [1.0, 4.0], SMALL_GRID)
        assert [p for p, _ in rows] == [1.0, 4.0]
        assert all(v.classification == Classification.POSITIVE_NUMERIC for _, v in rows)
        with pytest.raises(ValueError):
            criteria.sweep_gnp(3, [])


class TestThmOmega:

    def test_hypothesis_c_fails_for_exponential(self, criteria):
        verdict = criteria.verify_thm_omega(exp_power(1.0), NormBody.ball(3))
        assert verdict.classification == Classification.HYPOTHESES_FAILED
        failed = [h for h in verdict.hypotheses if h.name == 'omega_over_t_nonincreasing'][0]
        assert failed.satisfied is False
        assert len(failed.evidence) == 2
        assert failed.evidence[0][1] < failed.evidence[1][1]

    def test_unknown_waiver(self, criteria):
        with pytest.raises(ValueError):
            criteria.verify_thm_omega(exp_power(1.0), NormBody.ball(3), waive=['omega_positive'])

    def test_battery_dimension(self, criteria):
        with pytest.raises(ValueError):
            criteria.verify_thm_omega(admissible_omega_profile(3, -1.5), NormBody.cube(3),
                                      battery=TestFunction.battery(2, 2, 0))

    @pytest.mark.slow
    def test_admissible_profile_on_cube(self, criteria):
        battery = TestFunction.battery(3, 2, seed=5)
        verdict = criteria.verify_thm_omega(admissible_omega_profile(3, -1.5), NormBody.cube(3), battery,
                                            samples=20_000, seed=5, routes=('direct',))
        assert verdict.classification == Classification.POSITIVE_NUMERIC
        assert len(verdict.budget['seeds']) == 2
        assert len(verdict.details['pairings']) == 2
        assert all(p['sectional'] is None for p in verdict.details['pairings'])

    @pytest.mark.slow
    def test_sectional_route_on_cross_polytope(self, criteria):
        battery = TestFunction.battery(3, 1, seed=4)
        verdict = criteria.verify_thm_omega(admissible_omega_profile(3, -1.5), NormBody.lp(3, 1.0), battery,
                                            samples=20_000, seed=4)
        assert verdict.budget['sectional_samples'] > 0
        assert all(p['sectional'] is not None for p in verdict.details['pairings'])
        assert any(h.name == 'route_agreement' for h in verdict.hypotheses)

    @pytest.mark.slow
    def test_seeded_run_is_reproducible(self, criteria):
        battery = TestFunction.battery(3, 1, seed=9)
        args = (admissible_omega_profile(3, -1.5), NormBody.ball(3), battery)
        first = criteria.verify_thm_omega(*args, samples=5000, seed=9, routes=('direct',))
        second = criteria.verify_thm_omega(*args, samples=5000, seed=9, routes=('direct',))
        assert first.to_dict() == second.to_dict()


class TestThmConvex:

    def test_square_against_disk(self, criteria):
        phi = BodyStack.single(NormBody.cube(2))
        verdict = criteria.verify_thm_convex(phi, RadialWeight.ball(1.0), 0.0, samples=400, seed=1)
        assert verdict.classification == Classification.POSITIVE_NUMERIC
        assert verdict.details['value'] > 0

    def test_ball_against_ball_is_deterministic(self, criteria):
        phi = BodyStack.single(NormBody.ball(3))
        verdict = criteria.verify_thm_convex(phi, RadialWeight.ball(1.0), -1.0, samples=50, seed=0)
        assert verdict.classification == Classification.POSITIVE_NUMERIC
        # 4 pi int_0^1 r * 4 pi (sin r - r cos r) / r^3 dr
        reference, _ = quad(lambda r: 4.0 * math.pi * (math.sin(r) - r * math.cos(r)) / (r * r), 0.0, 1.0)
        assert_allclose(verdict.details['value'], 4.0 * math.pi * reference, rtol=1e-8)
        assert verdict.details['error'] <= 1e-12 * verdict.details['value']

    def test_gaussian_weight(self, criteria):
        verdict = criteria.verify_thm_convex(BodyStack.single(NormBody.ball(2)), RadialWeight.gaussian(1.0), 0.0,
                                             samples=64)
        assert verdict.classification == Classification.POSITIVE_NUMERIC

    def test_alpha_out_of_range(self, criteria):
        with pytest.raises(RefusalError):
            criteria.verify_thm_convex(BodyStack.single(NormBody.cube(2)), RadialWeight.ball(), 0.5)
        with pytest.raises(RefusalError):
            criteria.verify_thm_convex(BodyStack.single(NormBody.cube(3)), RadialWeight.ball(), -3.0)

    def test_star_body_fails_hypothesis(self, criteria):
        verdict = criteria.verify_thm_convex(BodyStack.single(NormBody.lp(2, 0.5)), RadialWeight.ball(), 0.0)
        assert verdict.classification == Classification.HYPOTHESES_FAILED

    def test_psi_transform(self, criteria):
        r = np.array([0.5, 2.0])
        assert_allclose(criteria.psi_transform(RadialWeight.gaussian(1.0), 2, r), 2.0 * math.pi * np.exp(-0.5 * r * r))
        assert_allclose(criteria.psi_transform(RadialWeight.ball(1.0), 1, r), 2.0 * np.sin(r) / r, rtol=1e-12)


class TestPolya:

    def test_certified(self, criteria):
        verdict = criteria.polya_verdict(exp_power(0.5), FrequencyGrid([0.5, 1.0, 2.0]))
        assert verdict.classification == Classification.POSITIVE_NUMERIC
        assert verdict.details['scan']['positive'] is True

    def test_gaussian_is_inconclusive_by_polya(self, criteria):
        verdict = criteria.polya_verdict(exp_power(2.0), FrequencyGrid([0.5, 1.0, 2.0]))
        assert verdict.classification == Classification.INCONCLUSIVE
        assert verdict.hypotheses[0].satisfied is False
        assert verdict.details['scan']['positive'] is True

    def test_cubic_exponent_violates(self, criteria):
        verdict = criteria.polya_verdict(exp_power(3.0), FrequencyGrid.log(0.1, 20.0, 60))
        assert verdict.classification == Classification.VIOLATION_FOUND
        assert verdict.witness['value'] < 0
        assert verdict.exit_code == 1


class TestGram:

    def test_gaussian_is_positive(self, criteria):
        verdict = criteria.gram_test(NormKernel(exp_power(2.0), NormBody.ball(2)), GramSpec.random(2, 50, seed=0))
        assert verdict.classification == Classification.POSITIVE_NUMERIC
        assert verdict.min_value >= -1e-10 * verdict.details['matrix_norm']

    def test_quartic_exponent_violates(self, criteria):
        spec = GramSpec.grid(1, -5.0, 5.0, 40)
        verdict = criteria.gram_test(NormKernel(exp_power(4.0), NormBody.ball(1)), spec)
        assert verdict.classification == Classification.VIOLATION_FOUND
        assert verdict.min_value < -verdict.tolerance
        assert len(verdict.witness['points']) == GramService.WITNESS_POINTS
        assert len(verdict.witness['coefficients']) == GramService.WITNESS_POINTS

    def test_cosine_kernel_has_rank_two(self, gram):
        spec = GramSpec.random(3, 30, seed=2)
        kernel = CosineKernel([0.3, -1.0, 2.0])
        eigenvalues, _, _, converged = gram.jacobi_eigen(gram.gram_matrix(kernel, spec))
        assert converged
        assert np.sum(eigenvalues > 1e-9 * eigenvalues.max()) == 2
        assert gram.gram_test(kernel, spec).classification == Classification.POSITIVE_NUMERIC

    @pytest.mark.parametrize('seed', range(10))
    def test_mixture_of_positive_kernels(self, criteria, seed):
        rng = np.random.default_rng(seed)
        count = int(rng.integers(2, 5))
        weights = rng.uniform(0.1, 2.0, size=count)
        exponents = 2.0 - 1.8 * rng.random(count)
        f = mixture([(w, exp_power(p)) for w, p in zip(weights, exponents)])
        verdict = criteria.gram_test(NormKernel(f, NormBody.ball(2)), GramSpec.random(2, 40, seed=seed, scale=2.0))
        assert verdict.classification == Classification.POSITIVE_NUMERIC
        assert verdict.min_value >= -verdict.tolerance

    def test_quadratic_form(self, gram):
        spec = GramSpec(1, [[0.0], [1.0]], coefficients=[1.0, -1.0])
        verdict = gram.gram_test(NormKernel(exp_power(2.0), NormBody.ball(1)), spec)
        assert_allclose(verdict.details['quadratic_form'], 2.0 - 2.0 * math.exp(-1.0))

    def test_singular_kernel_at_zero(self, gram):
        with pytest.raises(ValueError):
            gram.gram_test(NormKernel(power(-1.0), NormBody.ball(1)), GramSpec.random(1, 5, seed=0))

    def test_dimension_mismatch(self, gram):
        with pytest.raises(ValueError):
            gram.gram_test(NormKernel(exp_power(2.0), NormBody.ball(3)), GramSpec.random(2, 5, seed=0))


class TestJacobi:

    def test_matches_numpy(self, gram):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(12, 12))
        matrix = a + a.T
        eigenvalues, vectors, sweeps, converged = gram.jacobi_eigen(matrix)
        assert converged
        assert sweeps <= 30
        assert_allclose(np.sort(eigenvalues), np.linalg.eigvalsh(matrix), atol=1e-10)
        assert_allclose(vectors.T @ vectors, np.eye(12), atol=1e-10)
        assert_allclose(matrix @ vectors, vectors * eigenvalues, atol=1e-9)

    def test_trivial_matrices(self, gram):
        values, _, sweeps, converged = gram.jacobi_eigen(np.zeros((3, 3)))
        assert converged and sweeps == 0
        assert_allclose(values, 0.0)
        values, _, _, _ = gram.jacobi_eigen([[2.0]])
        assert values.tolist() == [2.0]

    def test_requires_symmetry(self, gram):
        with pytest.raises(ValueError):
            gram.jacobi_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestSchoenbergSweep:

    def test_classification_grid(self, criteria):
        spec = GramSpec.grid(1, -5.0, 5.0, 40)
        rows = criteria.sweep_schoenberg(1, [2.0], [1.0, 3.0], spec)
        outcome = {q: v.classification for _, q, v in rows}
        assert outcome[1.0] == Classification.POSITIVE_NUMERIC
        assert outcome[3.0] == Classification.VIOLATION_FOUND

    def test_plane_exponents_up_to_one(self, criteria):
        spec = GramSpec.random(2, 30, seed=1, scale=3.0)
        rows = criteria.sweep_schoenberg(2, [1.0, 2.0], [1.0], spec)
        assert [(p, q) for p, q, _ in rows] == [(1.0, 1.0), (2.0, 1.0)]
        assert all(v.classification == Classification.POSITIVE_NUMERIC for _, _, v in rows)

    @pytest.mark.parametrize('p_grid, q_grid', [([], [1.0]), ([2.0], [5.0]), ([0.0], [1.0])])
    def test_validation(self, criteria, p_grid, q_grid):
        with pytest.raises(ValueError):
            criteria.sweep_schoenberg(2, p_grid, q_grid, GramSpec.random(2, 5, seed=0))

    def test_template_dimension(self, criteria):
        with pytest.raises(ValueError):
            criteria.sweep_schoenberg(3, [2.0], [1.0], GramSpec.random(2, 5, seed=0))
