"""
Сервис преобразований: одномерные и радиальные преобразования Фурье,
преобразования Радона пробных функций, спаривание <f(||.||_K), phi^>
тремя независимыми маршрутами и интегральные тождества.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gammaln, jv
from scipy.stats import chi

from config import Config
from models.frequency_grid import FrequencyGrid
from models.identity_result import IdentityResidual
from models.norm_body import NormBody
from models.quadrature_result import QuadratureResult, SphereConstant
from models.radial_profile import Decay, RadialProfile, smoothed_truncated_power, truncated_power
from models.test_function import TestFunction
from services.body_service import BodyService
from services.profile_service import ProfileService
from services.quadrature_service import QuadratureService
from utils.errors import RefusalError
from utils.helpers import derive_seed, log_grid, parallel_map, stream, unit


class TransformService:
    """Преобразования Фурье/Радона и спаривания"""

    ROUTES = ('direct', 'sectional', 'radial')

    # Доля выборки для внутреннего слоя у нуля (прямой маршрут)
    INNER_SHARE = 0.25
    SECTIONAL_CHUNK = 256
    PANEL_ORDER = 10
    GRADING_LEVELS = 20
    # Панели по t для A_{K,v}: не больше PANEL_PHASE радиан фазы на панель
    PANEL_PHASE = 4.0
    MIN_PANELS = 32
    MAX_PANELS = 512
    TABLE_STEP = 0.25

    def __init__(self, quadrature_service: Optional[QuadratureService] = None,
                 profile_service: Optional[ProfileService] = None,
                 body_service: Optional[BodyService] = None):
        self.logger = logging.getLogger(__name__)
        self.quadrature = quadrature_service or QuadratureService()
        self.profiles = profile_service or ProfileService(self.quadrature)
        self.bodies = body_service or BodyService(self.quadrature)

    # ==================== ОДНОМЕРНОЕ И РАДИАЛЬНОЕ ====================

    def ft_even_1d(self, psi: RadialProfile, xi: float, tol: float = Config.QUAD_TOL) -> QuadratureResult:
        """
        Преобразование Фурье четного продолжения: 2 int_0^inf psi(t) cos(xi t) dt.

        Raises:
            RefusalError: Неинтегрируемая особенность в нуле или неубывающий хвост
        """
        gamma = psi.singularity_exponent
        if gamma <= -1:
            raise RefusalError(f"Профиль {psi.name} неинтегрируем в нуле (gamma={gamma})")
        result = self.quadrature.integrate_oscillatory_cosine(
            psi.eval, xi, tol, singularity_exponent=gamma, support=psi.support, decaying=psi.decays)
        return result.scaled(2.0)

    def radial_ft(self, f: RadialProfile, n: int, rho: float, tol: float = Config.QUAD_TOL) -> QuadratureResult:
        """
        Преобразование Фурье радиальной функции f(|x|) в R^n:
        (2 pi)^{n/2} rho^{1-n/2} int_0^inf f(r) r^{n/2} J_{n/2-1}(r rho) dr.

        Raises:
            RefusalError: r^{n-1} f(r) неинтегрируема у нуля или хвост не убывает
        """
        if n < 1:
            raise ValueError("Размерность должна быть >= 1")
        if not rho > 0:
            raise ValueError("Частота rho должна быть положительной")
        if n == 1:
            return self.ft_even_1d(f, rho, tol)
        gamma = f.singularity_exponent
        if gamma <= -n:
            raise RefusalError(f"r^{n - 1} f(r) неинтегрируема у нуля для {f.name}")
        decays = f.decays
        if f.decay.kind == 'polynomial':
            decays = f.decay.parameter + 0.5 * (n - 1) < 0
        if not math.isfinite(f.support) and not decays:
            raise RefusalError(f"Хвост профиля {f.name} не убывает достаточно быстро")
        half = 0.5 * n

        def amplitude(r):
            return f.eval(r) * r ** half

        result = self.quadrature.integrate_oscillatory_bessel(
            amplitude, half - 1.0, rho, tol, singularity_exponent=gamma + half,
            support=f.support, decaying=True)
        return result.scaled((2.0 * math.pi) ** half * rho ** (1.0 - half))

    def transform_grid(self, f: RadialProfile, n: int, grid: FrequencyGrid,
                       tol: float = Config.QUAD_TOL) -> List[QuadratureResult]:
        """radial_ft на всех частотах сетки (параллельно, порядок сохраняется)"""
        def at(rho: float) -> QuadratureResult:
            if rho == 0.0:
                return self._radial_at_zero(f, n, tol)
            return self.radial_ft(f, n, rho, tol)
        return parallel_map(at, list(grid), Config.THREADS)

    def _radial_at_zero(self, f: RadialProfile, n: int, tol: float) -> QuadratureResult:
        """Значение в нуле: surface(n) int_0^inf f(r) r^{n-1} dr (для n = 1 - 2 int f)"""
        surface = SphereConstant(n).surface
        result = self._integrate_segments(lambda r: f.eval(r) * r ** (n - 1.0), f,
                                          f.singularity_exponent + n - 1.0, tol)
        return result.scaled(surface)

    def _integrate_segments(self, fn: Callable[[np.ndarray], np.ndarray], f: RadialProfile,
                            exponent: float, tol: float, scale: float = 1.0) -> QuadratureResult:
        """Интеграл по (0, inf) с разбиением в точках излома профиля f(r / scale)"""
        support = f.support * scale
        edges = [0.0] + sorted(b * scale for b in f.breakpoints if 0 < b * scale < support)
        gamma = exponent if exponent < 0 else None
        result = QuadratureResult()
        for k, lo in enumerate(edges):
            hi = edges[k + 1] if k + 1 < len(edges) else support
            first = gamma if k == 0 else None
            if math.isfinite(hi):
                result = result + self.quadrature.integrate_adaptive(fn, lo, hi, tol, singularity_exponent=first)
            else:
                result = result + self.quadrature.integrate_semi_infinite(fn, lo, tol, singularity_exponent=first)
        return result

    def ball_indicator_ft(self, n: int, r: float, xi_mag) -> np.ndarray:
        """Преобразование Фурье индикатора шара радиуса r"""
        return self.bodies.ball_indicator_ft(n, r, xi_mag)

    def section_ft(self, body: NormBody, v, mu: float, backend: str = 'auto',
                   samples: int = Config.MC_SECTION_SAMPLES, seed: int = 0,
                   tol: float = Config.QUAD_TOL) -> QuadratureResult:
        """
        chi_K^(mu v) как ft_even_1d функции сечений A_{K,v} (теорема о срезе).
        Без точной формулы сечения - преобразование значений Монте-Карло.

        Raises:
            RefusalError: backend='exact', но точной формулы нет
        """
        u = unit(v)
        exact = self.bodies.has_exact_section(body, u)
        if backend == 'monte_carlo' or (backend == 'auto' and not exact):
            return self.bodies.section_transform(body, u, mu, 'monte_carlo', samples, seed)
        if backend not in ('exact', 'auto'):
            raise ValueError(f"Неизвестный бэкенд сечений: {backend}")
        if not exact:
            raise RefusalError(f"Для {body.label} нет точной функции сечений в направлении {u.tolist()}")
        section = RadialProfile.from_callable(
            lambda t: self.bodies.exact_section(body, u, t), name=f"A[{body.label}]",
            decay=Decay.compact(body.support(u)), monotone_nonincreasing=body.is_convex, nonnegative=True)
        return self.ft_even_1d(section, mu, tol)

    # ==================== РАДОН ====================

    def radon(self, phi: TestFunction, v, t) -> np.ndarray:
        """R phi(v, t) по аналитической формуле"""
        return phi.radon(unit(v), t)

    def slice_identity_check(self, phi: TestFunction, v, s: float,
                             threshold: float = Config.IDENTITY_THRESHOLDS['slice']) -> IdentityResidual:
        """|FT_1d[R phi(v, .)](s) - phi^(s v)| (теорема о срезе)"""
        u = unit(v)
        lhs = self.ft_even_1d(phi.radon_profile(u), s, tol=1e-13)
        rhs = float(phi.ft(s * u))
        return IdentityResidual.compare('slice', lhs.value, rhs, threshold, s=s, v=u.tolist(), phi=phi.to_dict())

    def integral_radon_identity(self, delta: TestFunction, n: int, r: float,
                                threshold: float = Config.IDENTITY_THRESHOLDS['radon-average']) -> IdentityResidual:
        """
        Усреднение преобразования Радона радиальной функции по сфере:
        lhs = surface(n) R delta(e_1, r),
        rhs = surface(n-1) surface(n) int_r^inf delta_0(rho) (1 - (r/rho)^2)^{(n-3)/2} rho^{n-2} d rho.
        """
        if n < 3:
            raise ValueError("Тождество проверяется при n >= 3")
        if delta.paired or delta.dim != n:
            raise ValueError(f"Нужна одиночная гауссиана размерности {n}")
        if not r > 0:
            raise ValueError("Смещение r должно быть положительным")
        surface_n = SphereConstant(n).surface
        surface_low = SphereConstant(n - 1).surface
        profile = delta.radial_profile()
        e1 = np.eye(n)[0]
        lhs = surface_n * float(delta.radon(e1, r))
        power = 0.5 * (n - 3)

        def kernel(rho):
            return profile.eval(rho) * np.clip(1.0 - (r / rho) ** 2, 0.0, None) ** power * rho ** (n - 2.0)

        inner = self.quadrature.integrate_semi_infinite(kernel, r, tol=1e-12, tol_abs=1e-300)
        rhs = surface_low * surface_n * inner.value
        return IdentityResidual.compare('radon-average', lhs, rhs, threshold, relative=True, n=n, r=r)

    # ==================== СПАРИВАНИЕ ====================

    def pairing(self, f: RadialProfile, body: NormBody, phi: TestFunction, route: str = 'direct',
                samples: Optional[int] = None, seed: int = 0,
                tol: float = Config.QUAD_TOL) -> QuadratureResult:
        """
        <f(||.||_K), phi^> = int f(||x||_K) phi^(x) dx.

        Args:
            f: Радиальный профиль (gamma0 > -n)
            body: Тело K размерности phi.dim
            phi: Пробная функция
            route: 'direct' - Монте-Карло с выборкой по гауссовой огибающей phi^;
                'sectional' - редукция через omega и функции сечений A_{K,v} (выпуклые тела);
                'radial' - одномерная квадратура (только евклидов шар)
            samples: Бюджет Монте-Карло
            seed: Сид (потоки по стратам и порциям)

        Raises:
            RefusalError: Предусловия маршрута не выполнены
        """
        if route not in self.ROUTES:
            raise ValueError(f"Маршрут должен быть одним из: {self.ROUTES}")
        if body.dim != phi.dim:
            raise ValueError("Размерности тела и пробной функции не совпадают")
        if f.singularity_exponent <= -body.dim:
            raise RefusalError(f"f(||x||_K) не является локально интегрируемой для {f.name}")
        if route == 'direct':
            return self._pairing_direct(f, body, phi, samples or Config.MC_SAMPLES, seed)
        if route == 'sectional':
            return self._pairing_sectional(f, body, phi, samples or Config.MC_SECTIONAL_SAMPLES, seed)
        return self._pairing_radial(f, body, phi, tol)

    def _pairing_direct(self, f: RadialProfile, body: NormBody, phi: TestFunction,
                        samples: int, seed: int) -> QuadratureResult:
        n, sigma = body.dim, phi.sigma
        surface = SphereConstant(n).surface
        r0 = 0.5 / sigma
        beta = n - 1.0 + min(f.singularity_exponent, 0.0)
        inner_count = max(2, int(samples * self.INNER_SHARE))
        outer_count = max(2, samples - inner_count)
        weight_scale = phi.multiplicity * phi.amplitude
        ft_scale = weight_scale * (2.0 * math.pi) ** (0.5 * n) * sigma ** n
        chi_dist = chi(df=n, scale=1.0 / sigma)
        tail_mass = float(chi_dist.sf(r0))

        def directions(rng, size):
            g = rng.standard_normal((size, n))
            return g / np.linalg.norm(g, axis=1, keepdims=True)

        def inner_chunk(rng, size, start):
            # r ~ r^beta на [0, r0]
            r = r0 * rng.uniform(size=size) ** (1.0 / (beta + 1.0))
            x = r[:, None] * directions(rng, size)
            ft = ft_scale * np.cos(x @ phi.center) * np.exp(-0.5 * sigma ** 2 * r * r)
            jac = surface * r0 ** (beta + 1.0) / (beta + 1.0) * r ** (n - 1.0 - beta)
            return f.eval(body.norm(x)) * ft * jac

        def outer_chunk(rng, size, start):
            # Стратифицированные квантили хи-распределения при условии r > r0
            u = (np.arange(start, start + size) + rng.uniform(size=size)) / outer_count
            r = chi_dist.isf(tail_mass * (1.0 - u))
            x = r[:, None] * directions(rng, size)
            return f.eval(body.norm(x)) * weight_scale * np.cos(x @ phi.center) * tail_mass * (2.0 * math.pi) ** n

        strata = [(inner_chunk, inner_count), (outer_chunk, outer_count)]
        value = variance = 0.0
        for index, (draw, count) in enumerate(strata):
            weights = self._draw_chunks(draw, count, seed, index)
            value += float(np.mean(weights))
            variance += float(np.var(weights, ddof=1)) / count
        self.logger.debug(f"Прямое спаривание {f.name} / {body.label}: {value:.6g} +- {math.sqrt(variance):.2g}")
        return QuadratureResult(value, math.sqrt(variance), samples, True)

    @staticmethod
    def _draw_chunks(draw, count: int, seed: int, stratum: int) -> np.ndarray:
        parts = []
        for chunk, start in enumerate(range(0, count, Config.MC_CHUNK)):
            size = min(Config.MC_CHUNK, count - start)
            parts.append(draw(stream(seed, stratum, chunk), size, start))
        weights = np.concatenate(parts)
        bad = ~np.isfinite(weights)
        if bad.any():
            raise RefusalError(f"Неконечные веса Монте-Карло ({int(bad.sum())} шт.)")
        return weights

    def _omega_cutoff(self, omega: RadialProfile) -> float:
        """Верхний предел Lambda для внутреннего интеграла по omega"""
        if math.isfinite(omega.support):
            return omega.support
        grid = log_grid(Config.SCAN_MIN, Config.SCAN_MAX, Config.SCAN_POINTS)
        values = np.abs(omega.eval(grid))
        peak = float(np.max(values))
        alive = np.flatnonzero(values > 1e-15 * peak)
        return float(grid[min(alive[-1] + 1, len(grid) - 1)])

    def _lambda_nodes(self, omega: RadialProfile, cutoff: float, width: float) -> Tuple[np.ndarray, np.ndarray]:
        graded = [width * 2.0 ** (-k) for k in range(self.GRADING_LEVELS, 0, -1)]
        uniform = list(np.arange(width, cutoff, width))
        breaks = [b for b in omega.breakpoints if 0 < b < cutoff]
        edges = np.unique(np.concatenate([[0.0], graded, uniform, breaks, [cutoff]]))
        return self.quadrature.gauss_legendre_panels(edges, self.PANEL_ORDER)

    def _pairing_sectional(self, f: RadialProfile, body: NormBody, phi: TestFunction,
                           samples: int, seed: int) -> QuadratureResult:
        """
        Внешний интеграл по x ~ phi / ||phi||_1, внутренний - одномерное спаривание
        преобразования функции сечений A_{K,v}, v = x/|x|, с omega:
        int omega(lam) FT[A_{K,v}](lam |x|) d lam = int_0^h A_{K,v}(t) FT[omega](|x| t) dt.
        FT[omega] табулируется один раз; A_{K,v} берется из точных формул или из
        слоев общей равномерной выборки K (тогда ошибка - по средним порций).
        """
        if not self.bodies.has_section_backend(body):
            raise RefusalError(f"Секционный маршрут определен только для выпуклых тел, получено {body.label}")
        omega = self.profiles.omega_of(f, body.dim)
        cutoff = self._omega_cutoff(omega)
        exact = self.bodies.has_exact_sections(body)
        points = self._sectional_points(phi, samples, seed)
        radii = np.linalg.norm(points, axis=1)
        reach = body.bounding_radius
        u_max = max(reach * float(np.max(radii)), 1e-12)
        kernel = self._omega_cosine_table(omega, cutoff, u_max)
        panels = int(np.clip(math.ceil(cutoff * u_max / self.PANEL_PHASE), self.MIN_PANELS, self.MAX_PANELS))
        nodes, weights = self.quadrature.gauss_legendre_panels(np.linspace(0.0, 1.0, panels + 1), self.PANEL_ORDER)

        if exact:
            chunk = self.SECTIONAL_CHUNK
        else:
            chunk = max(1, min(self.SECTIONAL_CHUNK, -(-samples // Config.MC_SECTIONAL_BATCHES)))
        inner = np.empty(samples)
        batch_means = []
        for index, start in enumerate(range(0, samples, chunk)):
            block = slice(start, min(start + chunk, samples))
            directions = self._directions(points[block], radii[block])
            if exact:
                widths = np.array([body.support(v) for v in directions])
                ts = widths[:, None] * nodes[None, :]
                sections = np.array([self.bodies.exact_section(body, v, t) for v, t in zip(directions, ts)])
            else:
                sample = self.bodies.sample_uniform(body, Config.MC_SECTION_BODY_SAMPLES, derive_seed(seed, index))
                widths = np.full(len(directions), reach)
                ts = widths[:, None] * nodes[None, :]
                sections = self.bodies.mc_section_table(body, directions, ts, sample)
            phases = radii[block, None] * ts
            inner[block] = widths * ((sections * kernel(phases)) @ weights)
            batch_means.append(float(np.mean(inner[block])))

        mass = phi.l1_norm()
        value = mass * float(np.mean(inner))
        if exact:
            error = mass * float(np.std(inner, ddof=1)) / math.sqrt(samples)
        else:
            error = mass * float(np.std(batch_means, ddof=1)) / math.sqrt(len(batch_means))
        self.logger.debug(f"Секционное спаривание {f.name} / {body.label}: {value:.6g} +- {error:.2g}")
        return QuadratureResult(value, error, samples, True)

    def _sectional_points(self, phi: TestFunction, samples: int, seed: int) -> np.ndarray:
        """Точки x с плотностью |phi| / ||phi||_1 (по порциям от независимых потоков)"""
        parts = []
        for chunk, start in enumerate(range(0, samples, self.SECTIONAL_CHUNK)):
            size = min(self.SECTIONAL_CHUNK, samples - start)
            rng = stream(seed, 2, chunk)
            x = phi.sigma * rng.standard_normal((size, phi.dim))
            if phi.paired:
                signs = rng.choice([-1.0, 1.0], size=size)
                x += signs[:, None] * phi.center[None, :]
            parts.append(x)
        return np.concatenate(parts)

    @staticmethod
    def _directions(points: np.ndarray, radii: np.ndarray) -> np.ndarray:
        directions = np.zeros_like(points)
        directions[:, 0] = 1.0
        alive = radii > 0
        directions[alive] = points[alive] / radii[alive, None]
        return directions

    def _omega_cosine_table(self, omega: RadialProfile, cutoff: float, u_max: float) -> CubicSpline:
        """Сплайн FT[omega](u) = 2 int_0^Lambda omega(lam) cos(lam u) d lam на [0, u_max]"""
        width = min(1.0, 3.0 / u_max)
        lam, w = self._lambda_nodes(omega, cutoff, width)
        weights = 2.0 * w * omega.eval(lam)
        step = min(self.TABLE_STEP, self.TABLE_STEP / cutoff)
        u = np.linspace(0.0, u_max, int(math.ceil(u_max / step)) + 2)
        values = np.concatenate([np.cos(np.outer(block, lam)) @ weights
                                 for block in np.array_split(u, max(1, len(u) // 512))])
        return CubicSpline(u, values)

    @staticmethod
    def spherical_average_cos(n: int, s: np.ndarray) -> np.ndarray:
        """Среднее cos(s <e, u>) по единичной сфере: Gamma(n/2) (2/s)^{n/2-1} J_{n/2-1}(s)"""
        s = np.asarray(s, dtype=float)
        if n == 1:
            return np.cos(s)
        nu = 0.5 * n - 1.0
        small = s < 1e-6
        safe = np.where(small, 1.0, s)
        full = np.exp(gammaln(nu + 1.0) + nu * np.log(2.0 / safe)) * jv(nu, safe)
        return np.where(small, 1.0 - s * s / (4.0 * (nu + 1.0)), full)

    def _pairing_radial(self, f: RadialProfile, body: NormBody, phi: TestFunction,
                        tol: float) -> QuadratureResult:
        if body.kind != 'euclidean_ball':
            raise RefusalError("Радиальный маршрут доступен только для евклидова шара")
        n, sigma, radius = body.dim, phi.sigma, body.radius
        c_norm = float(np.linalg.norm(phi.center))
        scale = phi.multiplicity * phi.amplitude * (2.0 * math.pi) ** (0.5 * n) * sigma ** n

        def integrand(r):
            return (f.eval(r / radius) * r ** (n - 1.0) * np.exp(-0.5 * sigma ** 2 * r * r)
                    * self.spherical_average_cos(n, r * c_norm))

        result = self._integrate_segments(integrand, f, f.singularity_exponent + n - 1.0, tol, scale=radius)
        return result.scaled(scale * SphereConstant(n).surface)

    def truncation_stability(self, alpha: float, cutoff: float, eps_list: Sequence[float],
                             phi: TestFunction) -> List[Tuple[float, QuadratureResult]]:
        """
        Спаривание сглаженной усеченной степени с phi^ для убывающих eps
        (евклидов шар, радиальный маршрут); последняя строка eps = 0 - само усечение.
        """
        body = NormBody.ball(phi.dim)
        rows = [(float(eps), self.pairing(smoothed_truncated_power(alpha, cutoff, eps), body, phi, 'radial'))
                for eps in sorted(eps_list, reverse=True)]
        rows.append((0.0, self.pairing(truncated_power(alpha, cutoff), body, phi, 'radial')))
        return rows

    # ==================== РАСТЯЖЕНИЕ ====================

    def dilation_ft_check(self, body: NormBody, factor: float, xi,
                          threshold: float = Config.IDENTITY_THRESHOLDS['dilation']) -> IdentityResidual:
        """
        |chi_{lambda K}^(xi) - lambda^n chi_K^(lambda xi)|, обе стороны через
        одномерные преобразования точных функций сечений.
        """
        x = np.asarray(xi, dtype=float)
        mu = float(np.linalg.norm(x))
        if mu == 0:
            raise ValueError("Частота xi должна быть ненулевой")
        u = x / mu
        lhs = self.section_ft(body.dilate(factor), u, mu, backend='exact')
        rhs = self.section_ft(body, u, factor * mu, backend='exact').scaled(factor ** body.dim)
        return IdentityResidual.compare('dilation', lhs.value, rhs.value, threshold,
                                        body=body.label, factor=factor, xi=x.tolist())
