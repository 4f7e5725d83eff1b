"""Тела, функции сечений, принцип Брунна и преобразования индикаторов."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import trapezoid

from models.norm_body import NormBody, lp_ball_volume
from repositories.body_repository import BodyRepository, load_polytope
from services.body_service import BodyService
from utils.errors import GrammarError, RefusalError, SamplingError
from utils.helpers import unit

SQRT3 = math.sqrt(3.0)
HEXAGON = [[1.0, 0.0], [0.5, 0.5 * SQRT3], [-0.5, 0.5 * SQRT3]]


def section_triples(count: int = 20, seed: int = 2024):
    """Тройки (K, v, t): шар и куб в общих направлениях, кросс-политоп вдоль осей"""
    rng = np.random.default_rng(seed)
    triples = []
    for i in range(count):
        n = int(rng.integers(2, 5))
        kind = ('ball', 'cube', 'cross')[i % 3]
        if kind == 'cross':
            body = NormBody.lp(n, 1.0)
            v = np.zeros(n)
            v[rng.integers(n)] = rng.choice([-1.0, 1.0])
        else:
            body = NormBody.ball(n) if kind == 'ball' else NormBody.cube(n)
            v = unit(rng.choice([-1.0, 1.0], size=n) * rng.uniform(0.3, 1.0, size=n))
        t = float(rng.uniform(0.1, 0.7) * body.support(v))
        triples.append((body, v, t))
    return triples


SECTION_TRIPLES = section_triples()


@pytest.fixture(scope='module')
def bodies():
    return BodyService()


@pytest.fixture
def hexagon():
    # Правильный шестиугольник с апофемой 1
    return NormBody.polytope(HEXAGON)


class TestNormBody:

    def test_norms(self, hexagon):
        assert_allclose(NormBody.ball(3).norm([3.0, 4.0, 0.0]), 5.0)
        assert_allclose(NormBody.cube(2).norm([1.0, -3.0]), 3.0)
        assert_allclose(NormBody.lp(3, 1.0).norm([1.0, -2.0, 3.0]), 6.0)
        assert_allclose(NormBody.ball(2, 2.0).norm([0.0, 1.0]), 0.5)
        assert_allclose(hexagon.norm([2.0, 0.0]), 2.0)

    def test_vectorized_norm(self):
        points = np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 4.0]])
        assert_allclose(NormBody.ball(2).norm(points), [1.0, 2.0, 5.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            NormBody.ball(3).norm([1.0, 0.0])

    @given(st.lists(st.floats(min_value=-10.0, max_value=10.0), min_size=3, max_size=3),
           st.floats(min_value=-5.0, max_value=5.0),
           st.sampled_from([0.5, 1.0, 1.5, 3.0]))
    def test_homogeneity(self, x, lam, p):
        body = NormBody.lp(3, p)
        assert_allclose(body.norm(lam * np.array(x)), abs(lam) * body.norm(x), rtol=1e-10, atol=1e-12)

    @given(st.sampled_from(['ball', 'cube', 'lp', 'hexagon']),
           st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=3, max_size=3)
           .filter(lambda x: np.linalg.norm(x[:2]) > 0.1))
    def test_radial_point_on_boundary(self, kind, x):
        body = {
            'ball': NormBody.ball(3, 2.0),
            'cube': NormBody.cube(3),
            'lp': NormBody.lp(3, 1.5),
            'hexagon': NormBody.polytope(HEXAGON),
        }[kind]
        v = unit(x[:body.dim])
        assert_allclose(body.norm(body.radial(v) * v), 1.0, rtol=0, atol=1e-12)

    def test_lp_shortcuts(self):
        assert NormBody.lp(3, 2.0).kind == 'euclidean_ball'
        assert NormBody.lp(3, math.inf).kind == 'cube'
        assert not NormBody.lp(3, 0.5).is_convex
        assert NormBody.cube(3).exponent == math.inf

    def test_support(self, hexagon):
        assert_allclose(NormBody.ball(3, 2.0).support([0.0, 0.6, 0.8]), 2.0)
        assert_allclose(NormBody.cube(2).support([1.0, -1.0]), 2.0)
        assert_allclose(NormBody.lp(2, 1.0).support([0.6, 0.8]), 0.8)
        assert_allclose(hexagon.support([1.0, 0.0]), 1.0, rtol=1e-8)
        assert_allclose(hexagon.support([0.0, 1.0]), 2.0 / SQRT3, rtol=1e-8)

    def test_radial(self):
        assert_allclose(NormBody.cube(2).radial(np.array([1.0, 1.0]) / math.sqrt(2.0)), math.sqrt(2.0))

    def test_volume(self):
        assert_allclose(NormBody.ball(3).volume(), 4.0 * math.pi / 3.0)
        assert_allclose(NormBody.cube(3, 0.5).volume(), 1.0)
        assert_allclose(NormBody.lp(2, 1.0).volume(), 2.0)
        assert_allclose(NormBody.ellipsoid(np.diag([1.0, 0.25])).volume(), 2.0 * math.pi)
        assert NormBody.polytope(HEXAGON).volume() is None

    def test_lp_volume_limits(self):
        assert_allclose(lp_ball_volume(3, 2.0), 4.0 * math.pi / 3.0)
        assert lp_ball_volume(3, math.inf) == 8.0
        assert lp_ball_volume(0, 1.0) == 1.0

    def test_bounding(self, hexagon):
        assert_allclose(NormBody.cube(3).bounding_radius, SQRT3)
        assert_allclose(NormBody.lp(4, 4.0).bounding_radius, 4.0 ** 0.25)
        assert_allclose(hexagon.bounding_box, [1.0, 2.0 / SQRT3], rtol=1e-8)
        assert hexagon.bounding_radius >= 2.0 / SQRT3

    def test_dilate(self, hexagon):
        assert_allclose(NormBody.ball(3).dilate(2.0).volume(), 8.0 * 4.0 * math.pi / 3.0)
        assert_allclose(hexagon.dilate(3.0).support([1.0, 0.0]), 3.0, rtol=1e-8)
        with pytest.raises(ValueError):
            hexagon.dilate(0.0)

    def test_labels(self):
        assert NormBody.ball(3).label == 'ball(3)'
        assert NormBody.cube(2, 0.5).label == 'cube(2, 0.5)'
        assert NormBody.lp(3, 1.0).label == 'lp(3, 1.0)'

    def test_validation(self):
        with pytest.raises(ValueError):
            NormBody.ball(0)
        with pytest.raises(ValueError):
            NormBody.ball(2, -1.0)
        with pytest.raises(ValueError):
            NormBody.polytope([[1.0, 0.0], [2.0, 0.0]])
        with pytest.raises(ValueError):
            NormBody.ellipsoid([[1.0, 2.0], [2.0, 1.0]])


class TestSections:

    def test_ball_section(self, bodies):
        assert_allclose(bodies.exact_section(NormBody.ball(3), [1.0, 0.0, 0.0], 0.5), 0.75 * math.pi)
        assert bodies.exact_section(NormBody.ball(3), [1.0, 0.0, 0.0], 1.5) == 0.0

    def test_cube_sections(self, bodies):
        assert_allclose(bodies.exact_section(NormBody.cube(3), [0.0, 1.0, 0.0], 0.3), 4.0)
        assert bodies.exact_section(NormBody.cube(3), [0.0, 1.0, 0.0], 1.2) == 0.0
        diagonal = np.array([1.0, 1.0]) / math.sqrt(2.0)
        assert_allclose(bodies.exact_section(NormBody.cube(2), diagonal, 0.0), 2.0 * math.sqrt(2.0), rtol=1e-12)

    def test_lp_axis_section(self, bodies):
        assert_allclose(bodies.exact_section(NormBody.lp(3, 1.0), [0.0, 0.0, 1.0], 0.5), 0.5)

    def test_hexagon_chord_through_vertices(self, bodies, hexagon):
        assert bodies.has_exact_section(hexagon, [1.0, 0.0])
        assert_allclose(bodies.exact_section(hexagon, [1.0, 0.0], 0.0), 4.0 / SQRT3, rtol=1e-8)

    def test_ellipsoid_matches_ball_after_scaling(self, bodies):
        ellipsoid = NormBody.ellipsoid(np.eye(3) / 4.0)
        assert_allclose(bodies.exact_section(ellipsoid, [0.0, 1.0, 0.0], 1.0),
                        bodies.exact_section(NormBody.ball(3, 2.0), [0.0, 1.0, 0.0], 1.0), rtol=1e-12)

    def test_refuses_without_formula(self, bodies):
        star = NormBody.lp(3, 0.5)
        v = np.ones(3) / SQRT3
        assert not bodies.has_exact_section(star, v)
        with pytest.raises(RefusalError):
            bodies.section_function(star, v, 0.1, backend='exact')

    def test_monte_carlo_agrees_with_exact(self, bodies):
        result = bodies.section_function(NormBody.ball(3), [1.0, 0.0, 0.0], 0.0, backend='monte_carlo',
                                         samples=200_000, seed=1)
        assert_allclose(result.value, math.pi, rtol=0.01)
        assert result.error_estimate > 0

    def test_monte_carlo_is_reproducible(self, bodies):
        body = NormBody.lp(3, 0.5)
        first = bodies.mc_section(body, [1.0, 1.0, 0.0], 0.1, 20_000, 7)
        second = bodies.mc_section(body, [1.0, 1.0, 0.0], 0.1, 20_000, 7)
        assert first.value == second.value

    def test_section_spec_validation(self, bodies):
        with pytest.raises(ValueError):
            bodies.section_function(NormBody.ball(3), [1.0, 0.0, 0.0], 0.0, backend='simpson')

    def test_radial_needs_unit_direction(self, bodies):
        with pytest.raises(ValueError):
            bodies.radial(NormBody.ball(2), [2.0, 0.0])

    @pytest.mark.parametrize('body, v, volume', [
        (NormBody.ball(3), [0.0, 0.6, 0.8], 4.0 * math.pi / 3.0),
        (NormBody.cube(3), [1.0, 1.0, 1.0], 8.0),
        (NormBody.cube(3), [0.3, -0.5, 0.8], 8.0),
        (NormBody.lp(3, 1.0), [0.0, 0.0, 1.0], 4.0 / 3.0),
    ])
    def test_sections_integrate_to_volume(self, bodies, body, v, volume):
        u = unit(v)
        h = body.support(u)
        t = np.linspace(-h, h, 20001)
        assert_allclose(trapezoid(bodies.exact_section(body, u, t), t), volume, rtol=1e-5)

    def test_cube_diagonal_central_section(self, bodies):
        diagonal = np.ones(3) / SQRT3
        assert_allclose(bodies.exact_section(NormBody.cube(3), diagonal, 0.0), 3.0 * SQRT3, rtol=1e-10)

    @pytest.mark.parametrize('factor', [0.5, 2.0])
    @pytest.mark.parametrize('body, v', [
        (NormBody.ball(3), [0.0, 0.6, 0.8]),
        (NormBody.cube(3), [1.0, 2.0, 2.0]),
        (NormBody.lp(3, 1.0), [0.0, 0.0, 1.0]),
        (NormBody.ellipsoid(np.diag([1.0, 4.0, 0.25])), [1.0, 1.0, 1.0]),
    ])
    def test_section_of_dilated_body(self, bodies, body, v, factor):
        u = unit(v)
        t = np.linspace(0.0, 0.9 * factor * body.support(u), 7)
        scaled = bodies.exact_section(body.dilate(factor), u, t)
        expected = factor ** (body.dim - 1) * bodies.exact_section(body, u, t / factor)
        assert_allclose(scaled, expected, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize('index', range(len(SECTION_TRIPLES)))
    def test_monte_carlo_within_error_estimate(self, bodies, index):
        body, v, t = SECTION_TRIPLES[index]
        exact = float(bodies.exact_section(body, v, t))
        estimate = bodies.mc_section(body, v, t, 50_000, seed=index)
        assert abs(estimate.value - exact) <= 4.0 * estimate.error_estimate

    def test_section_backends(self, bodies, hexagon):
        assert bodies.has_section_backend(hexagon)
        assert bodies.has_section_backend(NormBody.lp(3, 1.0))
        assert not bodies.has_section_backend(NormBody.lp(3, 0.5))
        assert bodies.has_exact_sections(NormBody.ellipsoid(np.eye(2)))
        assert not bodies.has_exact_sections(NormBody.lp(3, 1.0))

    def test_section_table_from_one_sample(self, bodies):
        ball = NormBody.ball(3)
        sample = bodies.sample_uniform(ball, 20_000, seed=5)
        ts = np.array([[0.0, 0.2, 0.4, 0.6]])
        table = bodies.mc_section_table(ball, [[0.0, 0.0, 1.0]], ts, sample)
        assert table.shape == (1, 4)
        assert_allclose(table[0], math.pi * (1.0 - ts[0] ** 2), rtol=0.2)
        with pytest.raises(ValueError):
            bodies.mc_section_table(ball, np.eye(3)[:2], ts, sample)

    def test_volume_from_acceptance_rate(self, bodies, hexagon):
        sample = bodies.sample_uniform(hexagon, 20_000, seed=2)
        assert_allclose(bodies.estimate_volume(hexagon, sample), 2.0 * SQRT3, rtol=0.02)
        assert bodies.estimate_volume(NormBody.ball(3), sample) == NormBody.ball(3).volume()


class TestBrunn:

    def test_convex_body_passes(self, bodies):
        report = bodies.check_brunn(NormBody.ball(3), [1.0, 0.0, 0.0], np.linspace(0.0, 0.95, 20))
        assert report.satisfied is True
        assert report.margin >= 0

    def test_cube_diagonal_passes(self, bodies):
        report = bodies.check_brunn(NormBody.cube(3), np.ones(3) / SQRT3, np.linspace(0.0, 1.6, 17))
        assert report.satisfied is True

    def test_star_body_fails_concavity(self, bodies):
        report = bodies.check_brunn(NormBody.lp(3, 0.5), [0.0, 0.0, 1.0], np.linspace(0.05, 0.9, 12))
        assert report.satisfied is False
        assert len(report.evidence) == 2
        assert report.margin < 0


class TestSampling:

    def test_uniform_points_inside(self, bodies):
        sample = bodies.sample_uniform(NormBody.ball(3), 1000, seed=0)
        assert len(sample) == 1000
        assert np.all(NormBody.ball(3).norm(sample.points) <= 1.0)
        assert 0.45 < sample.acceptance_rate < 0.6

    def test_same_seed_same_points(self, bodies):
        a = bodies.sample_uniform(NormBody.cube(2), 50, seed=3).points
        b = bodies.sample_uniform(NormBody.cube(2), 50, seed=3).points
        assert np.array_equal(a, b)

    def test_low_acceptance(self, bodies):
        with pytest.raises(SamplingError):
            bodies.sample_uniform(NormBody.ball(40), 10, seed=0)

    def test_count_must_be_positive(self, bodies):
        with pytest.raises(ValueError):
            bodies.sample_uniform(NormBody.ball(2), 0, seed=0)


class TestIndicatorTransform:

    def test_ball_at_origin_is_volume(self, bodies):
        assert_allclose(bodies.ball_indicator_ft(3, 1.0, 0.0), 4.0 * math.pi / 3.0)

    def test_interval(self, bodies):
        x = np.array([0.5, 1.0, 4.0])
        assert_allclose(bodies.ball_indicator_ft(1, 1.0, x), 2.0 * np.sin(x) / x, rtol=1e-12)

    def test_cube(self, bodies):
        assert_allclose(bodies.indicator_ft(NormBody.cube(2), [1.0, 2.0]), 2.0 * math.sin(1.0) * math.sin(2.0),
                        rtol=1e-12)

    def test_refuses_polytope(self, bodies, hexagon):
        assert not bodies.has_indicator_ft(hexagon)
        with pytest.raises(RefusalError):
            bodies.indicator_ft(hexagon, [1.0, 0.0])

    def test_section_transform_matches_cube(self, bodies):
        result = bodies.section_transform(NormBody.cube(3), [1.0, 0.0, 0.0], 2.0)
        assert_allclose(result.value, 4.0 * math.sin(2.0), rtol=1e-9)

    def test_section_transform_matches_ball(self, bodies):
        result = bodies.section_transform(NormBody.ball(3), [0.0, 0.0, 1.0], 3.0)
        assert_allclose(result.value, bodies.ball_indicator_ft(3, 1.0, 3.0), rtol=1e-8)

    def test_section_transform_monte_carlo(self, bodies):
        result = bodies.section_transform(NormBody.ball(3), [0.6, 0.8, 0.0], 2.0, backend='monte_carlo',
                                          samples=20_000, seed=3)
        exact = bodies.ball_indicator_ft(3, 1.0, 2.0)
        assert result.error_estimate > 0
        assert abs(result.value - exact) <= 5.0 * result.error_estimate + 0.02

    def test_section_transform_backends(self, bodies):
        with pytest.raises(RefusalError):
            bodies.section_transform(NormBody.lp(3, 1.0), np.ones(3) / SQRT3, 1.0, backend='exact')
        with pytest.raises(ValueError):
            bodies.section_transform(NormBody.ball(3), [1.0, 0.0, 0.0], 1.0, backend='simpson')


class TestBodyRepository:

    def test_create(self):
        repo = BodyRepository()
        assert repo.create('ball(3)').label == 'ball(3)'
        assert repo.create('cross(2)').kind == 'lp_ball'
        assert_allclose(repo.create('ellipsoid(1, 2)').support([0.0, 1.0]), 2.0)

    def test_unknown_and_bad_arguments(self):
        repo = BodyRepository()
        with pytest.raises(GrammarError):
            repo.create('sphere(3)')
        with pytest.raises(GrammarError):
            repo.create('ball(2.5)')
        with pytest.raises(GrammarError):
            repo.create('ball(1, 2, 3)')

    def test_polytope_file(self, tmp_path):
        path = tmp_path / 'hexagon.txt'
        path.write_text("# шестиугольник\n" + "\n".join(" ".join(repr(c) for c in row) for row in HEXAGON) + "\n\n")
        body = BodyRepository().create(f'polytope(file="{path}")')
        assert body.dim == 2
        assert len(body.normals) == 3
        assert body.source == str(path)

    def test_polytope_file_errors(self, tmp_path):
        with pytest.raises(ValueError):
            load_polytope(str(tmp_path / 'missing.txt'))
        ragged = tmp_path / 'ragged.txt'
        ragged.write_text("1 0\n0 1 2\n")
        with pytest.raises(ValueError):
            load_polytope(str(ragged))

    def test_stack_and_weight(self):
        repo = BodyRepository()
        stack = repo.create_stack('stack(1, cube(2), 0.5, ball(2))')
        assert stack.dim == 2
        assert stack.is_convex
        assert repo.create_weight('gaussian(2)').label.startswith('gaussian')
        with pytest.raises(GrammarError):
            repo.create_weight('cube(2)')
