"""
Сервис критериев положительной определенности: лемма о скалярном произведении
с тремя ветвями условий, теоремы для убывающих профилей, omega-профилей и выпуклых
тел, критерий Пойа, матрицы Грама и проходы по параметрам.
"""

import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from models.frequency_grid import FrequencyGrid
from models.gram_spec import GramSpec
from models.hypothesis_report import HypothesisReport
from models.identity_result import IdentityResidual
from models.kernels import BodyStack, NormKernel, RadialWeight
from models.norm_body import NormBody
from models.quadrature_result import QuadratureResult, SphereConstant
from models.radial_profile import RadialProfile, exp_power, power, profile_product, truncated_power
from models.test_function import TestFunction
from models.verdict import Classification, Verdict
from services.gram_service import GramService
from services.transform_service import TransformService
from utils.errors import RefusalError
from utils.helpers import derive_seed, parallel_map, stream


class CriteriaService:
    """Движки вердиктов"""

    OMEGA_HYPOTHESES = ('omega_bounded', 'omega_integrable', 'omega_over_t_nonincreasing')

    def __init__(self, transform_service: Optional[TransformService] = None,
                 gram_service: Optional[GramService] = None):
        self.logger = logging.getLogger(__name__)
        self.transforms = transform_service or TransformService()
        self.quadrature = self.transforms.quadrature
        self.profiles = self.transforms.profiles
        self.bodies = self.transforms.bodies
        self.gram = gram_service or GramService()

    # ==================== ЛЕММА О СКАЛЯРНОМ ПРОИЗВЕДЕНИИ ====================

    @staticmethod
    def lemma1_closed_form(a: float, b: float) -> float:
        """int chi_{[-a,a]}^(x) |x| chi_{[-b,b]}(x) dx = (4/a)(1 - cos(ab))"""
        if not a > 0 or not b > 0:
            raise ValueError("Требуется a > 0 и b > 0")
        return 4.0 / a * (1.0 - math.cos(a * b))

    def lemma1_integral(self, phi: RadialProfile, psi: RadialProfile,
                        tol: float = 1e-11) -> QuadratureResult:
        """
        int phi^(x) psi(x) dx = 2 int_0^inf phi^(x) psi(x) dx, phi^ через ft_even_1d.

        Внешний интеграл разбивается в точках излома psi.
        """
        inner_tol = min(tol, 1e-12)

        def integrand(xs):
            xs = np.atleast_1d(xs)
            hat = np.array([self.transforms.ft_even_1d(phi, float(x), inner_tol).value for x in xs])
            return hat * psi.eval(xs)

        support = psi.support
        edges = [0.0] + sorted(b for b in psi.breakpoints if 0 < b < support)
        gamma = psi.singularity_exponent if psi.singularity_exponent < 0 else None
        result = QuadratureResult()
        for k, lo in enumerate(edges):
            hi = edges[k + 1] if k + 1 < len(edges) else support
            first = gamma if k == 0 else None
            if math.isfinite(hi):
                part = self.quadrature.integrate_adaptive(integrand, lo, hi, tol, singularity_exponent=first)
            else:
                part = self.quadrature.integrate_semi_infinite(integrand, lo, tol, singularity_exponent=first)
            result = result + part
        return result.scaled(2.0)

    def lemma1_identity_check(self, a: float, b: float,
                              threshold: float = Config.IDENTITY_THRESHOLDS['lemma1']) -> IdentityResidual:
        """Численный интеграл базового случая против замкнутой формулы"""
        numeric = self.lemma1_integral(truncated_power(0.0, a), truncated_power(1.0, b))
        return IdentityResidual.compare('lemma1', numeric.value, self.lemma1_closed_form(a, b), threshold, a=a, b=b)

    @staticmethod
    def _lp_range(f: RadialProfile) -> Optional[Tuple[float, float]]:
        """Открытый интервал показателей p, при которых f из L^p(0, inf) (None - убывание неизвестно)"""
        if f.decay.kind == 'unknown':
            return None
        lo, hi = 0.0, math.inf
        if f.singularity_exponent < 0:
            hi = -1.0 / f.singularity_exponent
        if f.decay.kind == 'polynomial':
            beta = f.decay.parameter
            lo = -1.0 / beta if beta < 0 else math.inf
        return lo, hi

    def _lemma1_branch_report(self, phi: RadialProfile, psi: RadialProfile, branch: int) -> HypothesisReport:
        name = f"lemma1_branch{branch}"
        if branch == 1:
            ranges = [self._lp_range(phi), self._lp_range(psi)]
            if None in ranges:
                return HypothesisReport(name, None, [], note="Убывание на бесконечности неизвестно")
            lo = max(r[0] for r in ranges)
            hi = min(r[1] for r in ranges)
            ok = lo < hi and lo < 2.0 and hi > 1.0
            evidence = [('p_min', max(lo, 1.0)), ('p_max', min(hi, 2.0))]
            return HypothesisReport(name, ok, evidence, margin=min(hi, 2.0) - max(lo, 1.0),
                                    note='' if ok else "Нет общего p в [1, 2]")
        if branch == 2:
            checks = [
                ('phi_bounded', phi.singularity_exponent >= 0, phi.singularity_exponent),
                ('phi_compact_support', phi.decay.kind == 'compact', phi.support),
                ('psi_integrable_near_zero', psi.singularity_exponent > -1, psi.singularity_exponent),
                ('psi_over_x_integrable_at_infinity', psi.decay.integrable_with_weight(-1.0), psi.decay.parameter)
            ]
        else:
            checks = [
                ('phi_integrable', self._integrable(phi), phi.singularity_exponent),
                ('phi_c3', phi.even_smoothness >= 3, float(phi.even_smoothness)),
                ('psi_locally_integrable', psi.singularity_exponent > -1, psi.singularity_exponent)
            ]
        failed = [(label, value) for label, ok, value in checks if ok is False]
        if failed:
            return HypothesisReport(name, False, failed, margin=-1.0,
                                    note=', '.join(label for label, _ in failed))
        if any(ok is None for _, ok, _ in checks):
            return HypothesisReport(name, None, [(label, value) for label, _, value in checks],
                                    note="Часть условий не удалось проверить")
        return HypothesisReport(name, True, [(label, value) for label, _, value in checks])

    @staticmethod
    def _integrable(f: RadialProfile) -> Optional[bool]:
        if f.singularity_exponent <= -1:
            return False
        return f.decay.integrable_with_weight(0.0)

    def lemma1_pairing(self, phi: RadialProfile, psi: RadialProfile, branch: int,
                       tol: float = Config.VERDICT_TOL) -> Verdict:
        """
        Знак int phi^ psi для четных phi (невозрастающая) и psi (psi(x)/x невозрастает).

        Args:
            phi: Профиль phi на (0, inf)
            psi: Профиль psi на (0, inf)
            branch: 1 - phi, psi в L^p, p в [1, 2]; 2 - phi ограничена с компактным носителем,
                psi min{1, 1/x} интегрируема; 3 - phi в L^1 и C^3, psi локально интегрируема
            tol: Относительный допуск

        Returns:
            Verdict (HYPOTHESES_FAILED, если хоть одна гипотеза не подтверждена)
        """
        if branch not in (1, 2, 3):
            raise ValueError("Ветвь должна быть 1, 2 или 3")
        phi_report = self.profiles.check_nonincreasing(phi)
        phi_report.name = 'phi_nonincreasing'
        psi_report = self.profiles.check_quotient_nonincreasing(psi, 'psi_over_x_nonincreasing')
        reports = [phi_report, psi_report, self._lemma1_branch_report(phi, psi, branch)]
        check = f"lemma1[{phi.name}, {psi.name}]"
        if not all(r.accepted for r in reports):
            return Verdict(check, Classification.HYPOTHESES_FAILED, reports, tolerance=tol)

        result = self.lemma1_integral(phi, psi)
        peak = self.transforms.ft_even_1d(phi, 0.0).value
        head = self.quadrature.integrate_adaptive(
            psi.eval, 0.0, min(1.0, psi.support),
            singularity_exponent=psi.singularity_exponent if psi.singularity_exponent < 0 else None)
        tolerance = tol * max(abs(result.value), abs(peak) * 2.0 * head.value) + Config.MC_SIGMA * result.error_estimate
        budget = {'evaluations': result.evaluations}
        details = {'integral': result.value, 'error_estimate': result.error_estimate, 'branch': branch}
        if result.value < -tolerance:
            return Verdict(check, Classification.VIOLATION_FOUND, reports, result.value,
                           {'integral': result.value}, tolerance, budget, details)
        classification = Classification.POSITIVE_NUMERIC if result.converged else Classification.INCONCLUSIVE
        return Verdict(check, classification, reports, result.value, None, tolerance, budget, details)

    # ==================== УБЫВАЮЩИЕ ПРОФИЛИ ====================

    def verify_thm_decreasing(self, f: RadialProfile, n: int, branch: int = 1,
                              grid: Optional[FrequencyGrid] = None,
                              tol: float = Config.VERDICT_TOL) -> Verdict:
        """
        |x|^{2-n} f(|x|) как положительно определенное распределение.

        Args:
            f: Неотрицательный невозрастающий профиль
            n: Размерность (n >= 3 для ветви 1, n >= 9 для ветви 2)
            branch: 1 - f(r) min{1, r} интегрируема; 2 - r f(r) локально интегрируема
            grid: Частоты (по умолчанию 200 лог-точек на [1e-2, 50])
            tol: Допуск относительно значения на наименьшей частоте

        Raises:
            RefusalError: n = 2 или нарушено ограничение ветви на размерность
        """
        if branch not in (1, 2):
            raise ValueError("Ветвь должна быть 1 или 2")
        if n == 2:
            raise RefusalError("Случай n = 2 не покрывается теоремой")
        minimum = 3 if branch == 1 else 9
        if n < minimum:
            raise RefusalError(f"Ветвь {branch} требует n >= {minimum}")
        grid = grid or FrequencyGrid.default()
        check = f"thm-decreasing[{f.name}, n={n}]"
        reports = [self.profiles.check_nonnegative(f), self.profiles.check_nonincreasing(f),
                   self.profiles.check_thm2_integrability(f, branch)]
        if not all(r.accepted for r in reports):
            return Verdict(check, Classification.HYPOTHESES_FAILED, reports, tolerance=tol)

        h = profile_product(power(2.0 - n), f)
        try:
            results = self.transforms.transform_grid(h, n, grid)
        except RefusalError as e:
            reports.append(HypothesisReport('transform_defined', False, [(float(grid.points[0]), math.nan)],
                                            note=str(e)))
            return Verdict(check, Classification.HYPOTHESES_FAILED, reports, tolerance=tol)

        values = np.array([r.value for r in results])
        tolerance = tol * abs(values[0])
        index = int(np.argmin(values))
        nonconverged = sum(not r.converged for r in results)
        budget = {'frequencies': len(grid), 'evaluations': sum(r.evaluations for r in results)}
        details = {'profile': h.name, 'grid': grid.to_dict(), 'nonconverged': nonconverged,
                   'value_at_smallest': float(values[0])}
        min_value = float(values[index])
        if min_value < -tolerance:
            witness = {'frequency': float(grid.points[index]), 'value': min_value}
            classification = Classification.VIOLATION_FOUND
        else:
            witness = None
            classification = Classification.INCONCLUSIVE if nonconverged else Classification.POSITIVE_NUMERIC
        self.logger.info(f"{check}: min={min_value:.3g}, {classification.value}")
        return Verdict(check, classification, reports, min_value, witness, tolerance, budget, details)

    # ==================== OMEGA-ПРОФИЛИ ====================

    def verify_thm_omega(self, f: RadialProfile, body: NormBody,
                         battery: Optional[Sequence[TestFunction]] = None,
                         tol: float = Config.VERDICT_TOL, samples: Optional[int] = None,
                         seed: int = 0, waive: Iterable[str] = (),
                         routes: Sequence[str] = ('direct', 'sectional')) -> Verdict:
        """
        f(||x||_K) как положительно определенное распределение: знак спариваний с батареей
        пробных функций.

        Args:
            f: Профиль с omega(t) = -t^n f'(t)
            body: Симметричное выпуклое тело K
            battery: Пробные функции (по умолчанию 20 пар гауссиан от seed)
            tol: Допуск на (значение + 3 sigma) / ||phi||_1
            samples: Бюджет прямого маршрута
            seed: Базовый сид; элементу i достается derive_seed(seed, i)
            waive: Имена гипотез, снятых явно
            routes: Маршруты спаривания

        Raises:
            ValueError: Неизвестное имя в waive
            RefusalError: Отказ маршрута спаривания
        """
        n = body.dim
        waive = set(waive)
        unknown = waive - set(self.OMEGA_HYPOTHESES)
        if unknown:
            raise ValueError(f"Неизвестные гипотезы для снятия: {sorted(unknown)}")
        battery = list(battery) if battery is not None else TestFunction.battery(n, Config.BATTERY_SIZE, seed)
        if any(phi.dim != n for phi in battery):
            raise ValueError("Размерности батареи и тела не совпадают")
        check = f"thm-omega[{f.name}, {body.label}]"
        reports = self.profiles.check_omega_hypotheses(f, n)
        for report in reports:
            report.waived = report.name in waive
        if not all(r.accepted for r in reports):
            return Verdict(check, Classification.HYPOTHESES_FAILED, reports, tolerance=tol)

        use_sectional = 'sectional' in routes and self.bodies.has_section_backend(body)
        seeds = [derive_seed(seed, i) for i in range(len(battery))]

        def run(i: int):
            phi = battery[i]
            direct = self.transforms.pairing(f, body, phi, 'direct', samples, seeds[i])
            sectional = self.transforms.pairing(f, body, phi, 'sectional', None, seeds[i]) if use_sectional else None
            return direct, sectional

        pairs = parallel_map(run, range(len(battery)), Config.THREADS)

        normalized = []
        for phi, (direct, sectional) in zip(battery, pairs):
            mass = phi.l1_norm()
            candidates = [direct] + ([sectional] if sectional is not None else [])
            normalized.append(min((r.value + Config.MC_SIGMA * r.error_estimate) / mass for r in candidates))
        index = int(np.argmin(normalized))
        min_value = float(normalized[index])

        agreement = None
        if use_sectional:
            scores = [abs(d.value - s.value) / max(math.hypot(d.error_estimate, s.error_estimate), 1e-300)
                      for d, s in pairs]
            worst = int(np.argmax(scores))
            agreement = HypothesisReport('route_agreement', scores[worst] <= Config.MC_SIGMA,
                                         [(worst, float(scores[worst]))],
                                         margin=Config.MC_SIGMA - float(scores[worst]))
            reports.append(agreement)

        budget = {'seeds': seeds, 'samples': samples or Config.MC_SAMPLES,
                  'sectional_samples': Config.MC_SECTIONAL_SAMPLES if use_sectional else 0,
                  'battery': len(battery)}
        details = {'pairings': [{'direct': d.to_dict(), 'sectional': s.to_dict() if s else None,
                                 'l1_norm': phi.l1_norm()}
                                for phi, (d, s) in zip(battery, pairs)]}
        if min_value < -tol:
            direct, sectional = pairs[index]
            witness = {'index': index, 'test_function': battery[index].to_dict(),
                       'value': direct.value, 'error': direct.error_estimate}
            classification = Classification.VIOLATION_FOUND
        else:
            witness = None
            classification = (Classification.INCONCLUSIVE if agreement is not None and not agreement.satisfied
                              else Classification.POSITIVE_NUMERIC)
        self.logger.info(f"{check}: min={min_value:.3g}, {classification.value}")
        return Verdict(check, classification, reports, min_value, witness, tol, budget, details)

    # ==================== ВЫПУКЛЫЕ ТЕЛА ====================

    def psi_transform(self, psi: RadialWeight, n: int, r) -> np.ndarray:
        """Радиальный профиль psi^: стопка шаров или гауссиана"""
        r = np.asarray(r, dtype=float)
        if psi.kind == 'gaussian':
            s = psi.sigma
            return (2.0 * math.pi) ** (0.5 * n) * s ** n * np.exp(-0.5 * s * s * r * r)
        return sum(w * self.bodies.ball_indicator_ft(n, radius, r) for w, radius in psi.balls)

    def _cumulative_radial(self, fn, radii: np.ndarray, exponent: float) -> np.ndarray:
        """Q(R) = int_0^R fn(r) dr во всех точках radii (накоплением по отсортированным узлам)"""
        nodes = np.unique(radii)
        values = np.empty_like(nodes)
        total, prev = 0.0, 0.0
        for k, node in enumerate(nodes):
            singular = exponent if k == 0 and exponent < 0 else None
            total += self.quadrature.integrate_adaptive(fn, prev, float(node), 1e-12,
                                                        singularity_exponent=singular).value
            values[k] = total
            prev = float(node)
        return values[np.searchsorted(nodes, radii)]

    def _sphere_directions(self, n: int, count: int, seed: int) -> np.ndarray:
        rng = stream(seed, 0)
        if n == 2:
            theta = 2.0 * math.pi * (np.arange(count) + rng.uniform(size=count)) / count
            return np.column_stack([np.cos(theta), np.sin(theta)])
        g = rng.standard_normal((count, n))
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    def verify_thm_convex(self, phi: BodyStack, psi: RadialWeight, alpha: float,
                          tol: float = Config.VERDICT_TOL, samples: Optional[int] = None,
                          seed: int = 0) -> Verdict:
        """
        Знак int |x|^alpha phi(x) psi^(x) dx в полярных координатах:
        surface(n) E_v[sum_j w_j Q(rho_{K_j}(v))], Q(R) = int_0^R r^{n-1+alpha} psi^(r) dr.

        Args:
            phi: Стопка индикаторов выпуклых тел
            psi: Стопка шаров или гауссиана
            alpha: Показатель в (-n, 2-n]
            tol: Допуск относительно int |x|^alpha phi |psi^|
            samples: Число направлений
            seed: Сид направлений

        Raises:
            RefusalError: alpha вне (-n, 2-n]
        """
        n = phi.dim
        if not (-n < alpha <= 2 - n):
            raise RefusalError(f"alpha={alpha} вне промежутка ({-n}, {2 - n}]")
        count = samples or Config.MC_SECTIONAL_SAMPLES
        check = f"thm-convex[{phi.label}, {psi.label}, alpha={alpha:g}]"
        reports = [
            HypothesisReport('alpha_in_range', True, [('alpha', alpha)], margin=2.0 - n - alpha),
            HypothesisReport('phi_convex_sublevel', phi.is_convex, [(phi.label, 0.0)]),
            HypothesisReport('psi_radially_decreasing', True, [(psi.label, 0.0)])
        ]
        if not phi.is_convex:
            return Verdict(check, Classification.HYPOTHESES_FAILED, reports, tolerance=tol)

        exponent = n - 1.0 + alpha
        directions = self._sphere_directions(n, count, seed)
        radii = np.concatenate([1.0 / body.norm(directions) for _, body in phi.layers])
        signed = self._cumulative_radial(lambda r: r ** exponent * self.psi_transform(psi, n, r), radii, exponent)
        absolute = self._cumulative_radial(lambda r: r ** exponent * np.abs(self.psi_transform(psi, n, r)),
                                           radii, exponent)
        weights = np.repeat([w for w, _ in phi.layers], count)
        surface = SphereConstant(n).surface
        per_direction = surface * (weights * signed).reshape(len(phi.layers), count).sum(axis=0)
        per_direction_abs = surface * (weights * absolute).reshape(len(phi.layers), count).sum(axis=0)

        value = float(np.mean(per_direction))
        error = float(np.std(per_direction, ddof=1)) / math.sqrt(count) if count > 1 else 0.0
        abs_scale = float(np.mean(per_direction_abs))
        tolerance = tol * abs_scale
        min_value = value + Config.MC_SIGMA * error
        budget = {'seeds': [seed], 'directions': count}
        details = {'value': value, 'error': error, 'abs_integral': abs_scale,
                   'error_ratio': error / abs_scale if abs_scale > 0 else 0.0}
        if min_value < -tolerance:
            return Verdict(check, Classification.VIOLATION_FOUND, reports, min_value,
                           {'value': value, 'error': error}, tolerance, budget, details)
        self.logger.info(f"{check}: {value:.6g} +- {error:.2g}")
        return Verdict(check, Classification.POSITIVE_NUMERIC, reports, min_value, None, tolerance, budget, details)

    # ==================== ПОЙА ====================

    def polya_verdict(self, f: RadialProfile, grid: Optional[FrequencyGrid] = None,
                      tol: float = Config.VERDICT_TOL) -> Verdict:
        """
        Сертификат Пойа плюс подтверждающий скан одномерного преобразования.

        Returns:
            POSITIVE_NUMERIC при выполненном критерии; VIOLATION_FOUND, если критерий
            не выполнен и скан нашел отрицательное значение; иначе INCONCLUSIVE
        """
        grid = grid or FrequencyGrid.default()
        report = self.profiles.check_polya(f)
        check = f"polya[{f.name}]"
        details = {'grid': grid.to_dict()}
        try:
            results = parallel_map(lambda xi: self.transforms.ft_even_1d(f, xi), list(grid), Config.THREADS)
        except RefusalError as e:
            details['scan'] = {'available': False, 'note': str(e)}
            classification = Classification.POSITIVE_NUMERIC if report.satisfied else Classification.INCONCLUSIVE
            return Verdict(check, classification, [report], tolerance=0.0, details=details)

        values = np.array([r.value for r in results])
        tolerance = tol * abs(values[0])
        index = int(np.argmin(values))
        min_value = float(values[index])
        scan_positive = min_value >= -tolerance
        details['scan'] = {'available': True, 'positive': scan_positive, 'min_value': min_value,
                           'frequency': float(grid.points[index])}
        budget = {'frequencies': len(grid), 'evaluations': sum(r.evaluations for r in results)}
        if report.satisfied and scan_positive:
            classification, witness = Classification.POSITIVE_NUMERIC, None
        elif not scan_positive and not report.satisfied:
            classification = Classification.VIOLATION_FOUND
            witness = {'frequency': float(grid.points[index]), 'value': min_value}
        else:
            classification, witness = Classification.INCONCLUSIVE, None
        return Verdict(check, classification, [report], min_value, witness, tolerance, budget, details)

    # ==================== МАТРИЦЫ ГРАМА И ПРОХОДЫ ====================

    def gram_test(self, kernel, spec: GramSpec, tol: float = Config.GRAM_TOL) -> Verdict:
        return self.gram.gram_test(kernel, spec, tol)

    def sweep_schoenberg(self, n: int, p_grid: Sequence[float], q_grid: Sequence[float],
                         spec: GramSpec, tol: float = Config.GRAM_TOL) -> List[Tuple[float, float, Verdict]]:
        """
        Классификация e^{-||x||_p^q} на шаблоне точек для всех пар (p, q).

        Raises:
            ValueError: Пустые сетки, q вне (0, 4] или p <= 0
        """
        if not len(p_grid) or not len(q_grid):
            raise ValueError("Сетки p и q не могут быть пустыми")
        if any(not 0 < q <= 4 for q in q_grid):
            raise ValueError("q должно лежать в (0, 4]")
        if any(not p > 0 for p in p_grid):
            raise ValueError("p должно быть положительным")
        if spec.dim != n:
            raise ValueError("Размерность шаблона точек не совпадает с n")
        cells = [(float(p), float(q)) for p in p_grid for q in q_grid]

        def run(cell):
            p, q = cell
            kernel = NormKernel(exp_power(q), NormBody.lp(n, p))
            return p, q, self.gram.gram_test(kernel, spec, tol)

        return parallel_map(run, cells, Config.THREADS)

    def sweep_gnp(self, n: int, p_grid: Sequence[float], grid: Optional[FrequencyGrid] = None,
                  tol: float = Config.VERDICT_TOL) -> List[Tuple[float, Verdict]]:
        """verify_thm_decreasing для e^{-r^p} по сетке p"""
        if not len(p_grid):
            raise ValueError("Сетка p не может быть пустой")
        return [(float(p), self.verify_thm_decreasing(exp_power(p), n, 1, grid, tol)) for p in p_grid]
