"""
Сервис геометрии тел: функционал Минковского, функции сечений
(точные формулы и Монте-Карло), принцип Брунна, равномерная выборка,
преобразования Фурье индикаторов.
"""

import itertools
import logging
import math
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from config import Config
from models.hypothesis_report import HypothesisReport
from models.norm_body import NormBody, lp_ball_volume
from models.quadrature_result import QuadratureResult, SphereConstant
from models.section_function import SectionFunction, UniformSample
from services.bessel_service import BesselService
from services.quadrature_service import QuadratureService
from utils.errors import RefusalError, SamplingError
from utils.helpers import derive_seed, stream, unit


class BodyService:
    """Операции над симметричными телами"""

    # Минимум панелей для преобразования сечений Монте-Карло
    MC_TRANSFORM_PANELS = 8

    def __init__(self, quadrature_service: Optional[QuadratureService] = None):
        self.logger = logging.getLogger(__name__)
        self.quadrature = quadrature_service or QuadratureService()
        self.bessel: BesselService = self.quadrature.bessel

    # ==================== ФУНКЦИОНАЛЫ ====================

    def norm(self, body: NormBody, x) -> np.ndarray:
        """||x||_K"""
        return body.norm(x)

    def radial(self, body: NormBody, v) -> float:
        """rho_K(v) = 1 / ||v||_K для единичного v"""
        u = np.asarray(v, dtype=float)
        if abs(np.linalg.norm(u) - 1.0) > 1e-10:
            raise ValueError("Направление должно быть единичным вектором")
        return body.radial(u)

    def support(self, body: NormBody, v) -> float:
        """Опорная функция h_K(v)"""
        return body.support(v)

    # ==================== ТОЧНЫЕ СЕЧЕНИЯ ====================

    @staticmethod
    def _axis_index(v: np.ndarray) -> Optional[int]:
        nonzero = np.flatnonzero(np.abs(v) > 1e-14)
        if len(nonzero) == 1 and abs(abs(v[nonzero[0]]) - 1.0) < 1e-14:
            return int(nonzero[0])
        return None

    def has_exact_section(self, body: NormBody, v) -> bool:
        """Есть ли точная формула A_{K,v}"""
        u = np.asarray(v, dtype=float)
        if body.dim == 1 or body.kind in ('euclidean_ball', 'cube', 'ellipsoid'):
            return True
        if body.kind == 'lp_ball' and self._axis_index(u) is not None:
            return True
        return body.dim == 2 and body.is_convex

    def has_exact_sections(self, body: NormBody) -> bool:
        """Есть ли векторизованная точная формула A_{K,v} во всех направлениях"""
        return body.dim == 1 or body.kind in ('euclidean_ball', 'cube', 'ellipsoid')

    def has_section_backend(self, body: NormBody) -> bool:
        """Секционная редукция определена для выпуклых тел: точные сечения или слои Монте-Карло"""
        return body.is_convex

    def exact_section(self, body: NormBody, v, t) -> np.ndarray:
        """
        Точное значение A_{K,v}(t) (векторизованно по t).

        Raises:
            RefusalError: Для тела и направления нет точной формулы
        """
        u = np.asarray(v, dtype=float)
        ts = np.abs(np.asarray(t, dtype=float))
        n = body.dim
        if n == 1:
            return np.where(ts <= body.support(u), 1.0, 0.0)
        if body.kind == 'euclidean_ball':
            return self._ball_section(n, body.radius, ts)
        if body.kind == 'cube':
            return self._cube_section(n, body.radius, u, ts)
        if body.kind == 'ellipsoid':
            values, vectors = np.linalg.eigh(body.matrix)
            root_inv = vectors @ np.diag(values ** -0.5) @ vectors.T
            w = np.linalg.norm(root_inv @ u)
            det = float(np.prod(values ** -0.5))
            return det / w * self._ball_section(n, 1.0, ts / w)
        axis = self._axis_index(u)
        if body.kind == 'lp_ball' and axis is not None:
            r, p = body.radius, body.p
            base = np.clip(1.0 - (ts / r) ** p, 0.0, None)
            return lp_ball_volume(n - 1, p) * r ** (n - 1) * base ** ((n - 1) / p)
        if n == 2 and body.is_convex:
            return np.array([self._chord(body, u, float(s)) for s in np.atleast_1d(ts)]).reshape(ts.shape)
        raise RefusalError(f"Нет точной формулы сечения для {body.label} в направлении {u.tolist()}")

    @staticmethod
    def _ball_section(n: int, radius: float, ts: np.ndarray) -> np.ndarray:
        base = np.clip(radius * radius - ts * ts, 0.0, None)
        return SphereConstant.ball_volume(n - 1) * base ** (0.5 * (n - 1))

    @staticmethod
    def _cube_section(n: int, radius: float, v: np.ndarray, ts: np.ndarray) -> np.ndarray:
        # Плотность суммы a_i U_i, U_i ~ U[-1, 1], умноженная на объем куба
        a = radius * np.abs(v)
        a = a[a > 1e-14 * a.max()]
        m = len(a)
        volume = (2.0 * radius) ** n
        if m == 1:
            return np.where(ts <= a[0] * (1.0 + 1e-14), volume / (2.0 * a[0]), 0.0)
        total = np.zeros_like(ts)
        for signs in itertools.product((1.0, -1.0), repeat=m):
            shift = float(np.dot(signs, a))
            total += np.prod(signs) * np.clip(ts + shift, 0.0, None) ** (m - 1)
        density = total / (np.prod(2.0 * a) * math.factorial(m - 1))
        return np.where(ts < a.sum(), volume * np.clip(density, 0.0, None), 0.0)

    def _chord(self, body: NormBody, v: np.ndarray, t: float) -> float:
        """Длина хорды плоского выпуклого тела на прямой {<x, v> = t}"""
        along = np.array([-v[1], v[0]])
        reach = 2.0 * body.bounding_radius + abs(t)

        def gauge(s: float) -> float:
            return float(body.norm(t * v + s * along))

        best = minimize_scalar(gauge, bounds=(-reach, reach), method='bounded',
                               options={'xatol': 1e-12})
        if best.fun >= 1.0:
            return 0.0
        lo = brentq(lambda s: gauge(s) - 1.0, -reach, best.x, xtol=1e-14)
        hi = brentq(lambda s: gauge(s) - 1.0, best.x, reach, xtol=1e-14)
        return hi - lo

    # ==================== МОНТЕ-КАРЛО ====================

    def mc_section(self, body: NormBody, v, t: float, samples: int, seed: int) -> QuadratureResult:
        """
        Оценка A_{K,v}(t) по доле точек тонкого слоя |<x, v> - t| <= delta внутри K.

        Слой параметризуется в повернутой системе координат; delta = R max(0.01, N^{-1/3}).
        """
        u = unit(v)
        n = body.dim
        big_r = body.bounding_radius
        delta = self.slab_half_width(body, samples)
        basis, _ = np.linalg.qr(np.column_stack([u, np.eye(n)]))
        across = basis[:, 1:n]
        rng = stream(seed, 0)

        inside = inner = inner_total = 0
        done = 0
        while done < samples:
            size = min(Config.MC_CHUNK, samples - done)
            offsets = rng.uniform(-big_r, big_r, size=(size, n - 1))
            tau = rng.uniform(-delta, delta, size=size)
            points = (t + tau)[:, None] * u[None, :] + offsets @ across.T
            hit = body.norm(points) <= 1.0
            inside += int(hit.sum())
            near = np.abs(tau) <= 0.5 * delta
            inner += int((hit & near).sum())
            inner_total += int(near.sum())
            done += size

        face = (2.0 * big_r) ** (n - 1)
        frac = inside / samples
        value = face * frac
        noise = face * math.sqrt(frac * (1.0 - frac) / samples)
        # Смещение слоя: сравнение со слоем половинной ширины
        bias = 4.0 / 3.0 * abs(value - face * inner / inner_total) if inner_total else 0.0
        error = math.hypot(noise, bias)
        self.logger.debug(f"Сечение {body.label} t={t}: A={value:.6g} +- {noise:.2g}, смещение ~{bias:.2g}")
        return QuadratureResult(value, error, samples, True)

    @staticmethod
    def slab_half_width(body: NormBody, samples: int) -> float:
        """delta = R max(0.01, N^{-1/3})"""
        return body.bounding_radius * max(0.01, samples ** (-1.0 / 3.0))

    def estimate_volume(self, body: NormBody, sample: UniformSample) -> float:
        """Объем K: точный, если известен, иначе доля принятия на объем параллелепипеда"""
        exact = body.volume()
        if exact is not None:
            return exact
        return sample.acceptance_rate * float(np.prod(2.0 * body.bounding_box))

    def mc_section_table(self, body: NormBody, directions, ts, sample: UniformSample,
                         volume: Optional[float] = None) -> np.ndarray:
        """
        A_{K,v}(t) для набора направлений по одной равномерной выборке из K:
        vol(K) * #{|<y, v> - t| <= delta} / (2 delta N).

        Args:
            directions: Единичные векторы, массив (B, n)
            ts: Смещения, массив (B, T) - своя строка на каждое направление
            sample: Равномерная выборка из K
            volume: Объем K (по умолчанию estimate_volume)

        Returns:
            Массив (B, T)
        """
        v = np.atleast_2d(np.asarray(directions, dtype=float))
        ts = np.atleast_2d(np.asarray(ts, dtype=float))
        if ts.shape[0] != v.shape[0]:
            raise ValueError("Число строк смещений должно совпадать с числом направлений")
        count = len(sample)
        delta = self.slab_half_width(body, count)
        volume = self.estimate_volume(body, sample) if volume is None else volume
        projections = np.sort(sample.points @ v.T, axis=0)
        hits = np.empty(ts.shape)
        for k in range(v.shape[0]):
            column = projections[:, k]
            upper = np.searchsorted(column, ts[k] + delta, side='right')
            lower = np.searchsorted(column, ts[k] - delta, side='left')
            hits[k] = upper - lower
        return volume * hits / (2.0 * delta * count)

    def section_function(self, body: NormBody, v, t: float, backend: str = 'auto',
                         samples: int = Config.MC_SECTION_SAMPLES, seed: int = 0,
                         rel_tol: Optional[float] = None) -> QuadratureResult:
        """
        A_{K,v}(t) с выбранным бэкендом.

        Args:
            body: Тело
            v: Единичное направление
            t: Смещение
            backend: 'exact' | 'monte_carlo' | 'auto' (точный, если доступен)
            samples: Бюджет Монте-Карло
            seed: Сид Монте-Карло
            rel_tol: Требуемая относительная ошибка Монте-Карло (иначе converged=True)

        Raises:
            RefusalError: backend='exact', но точной формулы нет
        """
        spec = SectionFunction(body, unit(v), backend, samples, seed)
        return self.evaluate_section(spec, t, rel_tol)

    def evaluate_section(self, spec: SectionFunction, t: float,
                         rel_tol: Optional[float] = None) -> QuadratureResult:
        """Значение функции сечений по ее описанию"""
        use_exact = spec.backend == 'exact' or (
            spec.backend == 'auto' and self.has_exact_section(spec.body, spec.direction))
        if use_exact:
            value = float(self.exact_section(spec.body, spec.direction, t))
            return QuadratureResult(value, 0.0, 1, True)
        result = self.mc_section(spec.body, spec.direction, t, spec.samples, spec.seed)
        if rel_tol is not None and result.error_estimate > rel_tol * abs(result.value):
            result.converged = False
            self.logger.warning(f"Бюджет {spec.samples} исчерпан: ошибка сечения {result.error_estimate:.3e}")
        return result

    # ==================== ПРИНЦИП БРУННА ====================

    def check_brunn(self, body: NormBody, v, grid, backend: str = 'auto',
                    samples: int = Config.MC_SECTION_SAMPLES, seed: int = 0) -> HypothesisReport:
        """
        Невозрастание A_{K,v} при t > 0 и вогнутость A^{1/(n-1)} на сетке
        с допуском из ошибок бэкенда (3 сигмы для Монте-Карло).
        """
        name = 'brunn_concavity'
        ts = np.unique(np.abs(np.asarray(grid, dtype=float)))
        results = [self.section_function(body, v, float(t), backend, samples, derive_seed(seed, i))
                   for i, t in enumerate(ts)]
        values = np.array([r.value for r in results])
        errors = np.array([r.error_estimate for r in results]) * Config.MC_SIGMA
        n = body.dim
        if n == 1 or len(ts) < 2:
            return HypothesisReport(name, True, [(float(ts[0]), float(values[0]))], note="Тривиальный случай")

        floor = 1e-12 * float(np.max(values))
        rises = values[1:] - values[:-1]
        excess = rises - (errors[1:] + errors[:-1]) - floor
        worst = int(np.argmax(excess))
        if excess[worst] > 0:
            evidence = [(float(ts[worst]), float(values[worst])), (float(ts[worst + 1]), float(values[worst + 1]))]
            return HypothesisReport(name, False, evidence, margin=-float(excess[worst]),
                                    note="A_{K,v} возрастает при t > 0")
        mono_margin = -float(excess[worst])

        power = 1.0 / (n - 1)
        root = values ** power
        with np.errstate(divide='ignore', invalid='ignore'):
            root_err = np.where(values > 0, root * errors * power / values, errors ** power)
        slack_min = math.inf
        for i in range(1, len(ts) - 1):
            w = (ts[i + 1] - ts[i]) / (ts[i + 1] - ts[i - 1])
            chord = w * root[i - 1] + (1.0 - w) * root[i + 1]
            allowed = root_err[i] + w * root_err[i - 1] + (1.0 - w) * root_err[i + 1] + 1e-12 * float(root.max())
            slack = root[i] - chord + allowed
            if slack < 0:
                evidence = [(float(ts[i]), float(root[i])), (float(ts[i]), float(chord))]
                return HypothesisReport(name, False, evidence, margin=float(slack),
                                        note="A^{1/(n-1)} ниже хорды: нарушена вогнутость")
            slack_min = min(slack_min, slack)
        margin = min(mono_margin, slack_min) if math.isfinite(slack_min) else mono_margin
        return HypothesisReport(name, True, [(float(ts[-1]), float(values[-1]))], margin=margin)

    # ==================== ВЫБОРКА ====================

    def sample_uniform(self, body: NormBody, count: int, seed: int) -> UniformSample:
        """
        Равномерные точки в K отбраковкой из ограничивающего параллелепипеда.

        Raises:
            SamplingError: Доля принятия ниже 1e-4
        """
        if count < 1:
            raise ValueError("Число точек должно быть >= 1")
        box = body.bounding_box
        rng = np.random.default_rng(seed)
        batch = max(20_000, 2 * count)
        accepted: List[np.ndarray] = []
        total = proposals = 0
        while total < count:
            candidates = rng.uniform(-box, box, size=(batch, body.dim))
            keep = candidates[body.norm(candidates) <= 1.0]
            proposals += batch
            accepted.append(keep)
            total += len(keep)
            rate = total / proposals
            if rate < Config.MIN_ACCEPTANCE:
                raise SamplingError(
                    f"Доля принятия {rate:.2e} < {Config.MIN_ACCEPTANCE}: уменьшите размерность "
                    f"или используйте другой бэкенд"
                )
        points = np.concatenate(accepted)[:count]
        return UniformSample(points, total / proposals, proposals, seed)

    # ==================== ПРЕОБРАЗОВАНИЯ ФУРЬЕ ====================

    def ball_indicator_ft(self, n: int, r: float, xi_mag) -> np.ndarray:
        """
        Преобразование Фурье индикатора шара радиуса r:
        (2 pi)^{n/2} r^n (r |xi|)^{-n/2} J_{n/2}(r |xi|), в нуле - объем шара.
        """
        if n < 1 or not r > 0:
            raise ValueError("Требуется n >= 1 и r > 0")
        z = r * np.abs(np.asarray(xi_mag, dtype=float))
        small = z < 1e-8
        safe = np.where(small, 1.0, z)
        value = (2.0 * math.pi) ** (0.5 * n) * r ** n * safe ** (-0.5 * n) * self.bessel.kernel(0.5 * n, safe)
        result = np.where(small, SphereConstant.ball_volume(n, r), value)
        return float(result) if np.ndim(xi_mag) == 0 else result

    def has_indicator_ft(self, body: NormBody) -> bool:
        return body.kind in ('euclidean_ball', 'cube', 'ellipsoid')

    def indicator_ft(self, body: NormBody, xi) -> np.ndarray:
        """
        Замкнутые формулы chi_K^(xi) для шара, куба и эллипсоида.

        Raises:
            RefusalError: Для остальных тел
        """
        x = np.asarray(xi, dtype=float)
        if body.kind == 'euclidean_ball':
            return self.ball_indicator_ft(body.dim, body.radius, np.linalg.norm(x, axis=-1))
        if body.kind == 'cube':
            r = body.radius
            return np.prod(2.0 * r * np.sinc(r * x / math.pi), axis=-1)
        if body.kind == 'ellipsoid':
            values, vectors = np.linalg.eigh(body.matrix)
            root_inv = vectors @ np.diag(values ** -0.5) @ vectors.T
            det = float(np.prod(values ** -0.5))
            return det * self.ball_indicator_ft(body.dim, 1.0, np.linalg.norm(x @ root_inv, axis=-1))
        raise RefusalError(f"Нет замкнутой формулы преобразования индикатора {body.label}")

    def section_transform(self, body: NormBody, v, mu: float, backend: str = 'auto',
                          samples: int = Config.MC_SECTION_SAMPLES, seed: int = 0) -> QuadratureResult:
        """
        Одномерное преобразование Фурье функции сечений: 2 int_0^h A_{K,v}(t) cos(mu t) dt
        (совпадает с chi_K^(mu v) по теореме о срезе).

        Точный бэкенд - осцилляционная квадратура; Монте-Карло - значения mc_section
        в узлах панелей Гаусса-Лежандра на [0, h_K(v)].

        Raises:
            RefusalError: backend='exact', но точной формулы нет
        """
        u = unit(v)
        if backend not in SectionFunction.VALID_BACKENDS:
            raise ValueError(f"Бэкенд должен быть одним из: {SectionFunction.VALID_BACKENDS}")
        width = body.support(u)
        exact = self.has_exact_section(body, u)
        if backend == 'exact' and not exact:
            raise RefusalError(f"Для {body.label} нет точной функции сечений в направлении {u.tolist()}")
        if exact and backend != 'monte_carlo':
            result = self.quadrature.integrate_oscillatory_cosine(
                lambda t: self.exact_section(body, u, t), mu, support=width)
            return result.scaled(2.0)

        panels = max(self.MC_TRANSFORM_PANELS, int(math.ceil(abs(mu) * width / 2.0)))
        nodes, weights = self.quadrature.gauss_legendre_panels(np.linspace(0.0, width, panels + 1), 4)
        sections = [self.mc_section(body, u, float(t), samples, derive_seed(seed, i)) for i, t in enumerate(nodes)]
        kernel = 2.0 * weights * np.cos(mu * nodes)
        value = float(kernel @ np.array([s.value for s in sections]))
        error = float(np.linalg.norm(kernel * np.array([s.error_estimate for s in sections])))
        return QuadratureResult(value, error, samples * len(nodes), True)
