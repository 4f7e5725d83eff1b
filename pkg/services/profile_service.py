"""
Сервис радиальных профилей: omega-представление и проверки гипотез
(монотонность, интегрируемость, критерий Пойа, ширины множеств уровня).
"""

import logging
import math
from typing import List, Optional

import numpy as np

from config import Config
from models.hypothesis_report import HypothesisReport
from models.quadrature_result import QuadratureResult
from models.radial_profile import Decay, RadialProfile
from services.quadrature_service import QuadratureService
from utils.errors import RefusalError
from utils.helpers import log_grid


class ProfileService:
    """Операции над профилями и проверки гипотез по сеткам"""

    # Относительный допуск сканов монотонности/выпуклости
    SCAN_RTOL = 1e-9
    # Для производных по центральной разности
    FD_RTOL = 1e-6

    def __init__(self, quadrature_service: Optional[QuadratureService] = None):
        self.logger = logging.getLogger(__name__)
        self.quadrature = quadrature_service or QuadratureService()

    # ==================== СЕТКИ ====================

    def scan_grid(self, f: RadialProfile, beyond_support: bool = False) -> np.ndarray:
        """
        Лог-сетка сканирования [1e-4, 1e4], пересеченная с носителем.

        Args:
            f: Профиль
            beyond_support: Не обрезать сетку по носителю (нужно для проверки выпуклости)
        """
        hi = Config.SCAN_MAX
        if not beyond_support and f.support < hi:
            hi = f.support * (1.0 - 1e-9)
        grid = log_grid(Config.SCAN_MIN, hi, Config.SCAN_POINTS)
        extra = [b for b in f.breakpoints if Config.SCAN_MIN < b < hi]
        if beyond_support and f.support < Config.SCAN_MAX:
            extra.append(f.support)
        if extra:
            grid = np.unique(np.concatenate([grid, extra]))
        return grid

    def _integrate_profile(self, fn, lo: float, hi: float, exponent: Optional[float]) -> QuadratureResult:
        gamma = exponent if exponent is not None and exponent < 0 else None
        if math.isfinite(hi):
            return self.quadrature.integrate_adaptive(fn, lo, hi, singularity_exponent=gamma)
        return self.quadrature.integrate_semi_infinite(fn, lo, singularity_exponent=gamma)

    # ==================== OMEGA ====================

    def omega_of(self, f: RadialProfile, n: int, allow_finite_difference: bool = True) -> RadialProfile:
        """
        omega(t) = -t^n f'(t).

        Args:
            f: Невозрастающий профиль
            n: Размерность >= 1
            allow_finite_difference: Разрешить центральную разность, если нет аналитической производной

        Returns:
            Профиль omega с метаданными, выведенными из f

        Raises:
            ValueError: Нет производной и разность запрещена, либо n < 1
            RefusalError: Профиль заведомо не является невозрастающим
        """
        if n < 1:
            raise ValueError("Размерность должна быть >= 1")
        if f.monotone_nonincreasing is False:
            raise RefusalError(f"Профиль {f.name} не является невозрастающим")
        if not f.has_analytic_derivative and not allow_finite_difference:
            raise ValueError(f"У профиля {f.name} нет производной, а численное дифференцирование запрещено")

        if f.decay.kind == 'polynomial':
            decay = Decay.polynomial(f.decay.parameter - 1.0 + n)
        else:
            decay = f.decay

        def omega(t):
            return -t ** n * f.deriv(t)

        return RadialProfile(
            name=f"omega({f.name}, {n})",
            value_fn=omega,
            singularity_exponent=f.singularity_exponent + n - 1.0,
            decay=decay,
            monotone_nonincreasing=None,
            nonnegative=True if f.monotone_nonincreasing else None,
            even_smoothness=-1,
            bound_constant=max(1.0, abs(f.singularity_exponent)) * f.bound_constant,
            absolutely_continuous=f.absolutely_continuous,
            breakpoints=f.breakpoints
        )

    def reconstruct_from_omega(self, omega: RadialProfile, n: int, s: float) -> QuadratureResult:
        """f(s) = int_s^inf omega(lambda) lambda^{-n} d lambda"""
        if s <= 0:
            raise ValueError("Точка восстановления должна быть положительной")

        def integrand(lam):
            return omega.eval(lam) * lam ** (-float(n))

        if s >= omega.support:
            return QuadratureResult()
        return self._integrate_profile(integrand, s, omega.support, None)

    def check_omega_hypotheses(self, f: RadialProfile, n: int) -> List[HypothesisReport]:
        """
        Три гипотезы omega-теоремы:
        (a) omega ограничена на (0, inf), (b) omega интегрируема, (c) omega(t)/t не возрастает.
        """
        try:
            omega = self.omega_of(f, n)
        except (RefusalError, ValueError) as e:
            witness = [(Config.SCAN_MIN, float(f.eval(Config.SCAN_MIN)))]
            return [HypothesisReport(name, False, witness, note=str(e))
                    for name in ('omega_bounded', 'omega_integrable', 'omega_over_t_nonincreasing')]
        grid = self.scan_grid(omega)
        values = omega.eval(grid)
        return [
            self._check_bounded(omega, grid, values),
            self._check_integrable(omega, grid, values),
            self._check_omega_monotone(f, n, grid, values)
        ]

    def _check_bounded(self, omega: RadialProfile, grid: np.ndarray, values: np.ndarray) -> HypothesisReport:
        name = 'omega_bounded'
        gamma = omega.singularity_exponent
        peak = int(np.argmax(np.abs(values)))
        if gamma < 0:
            return HypothesisReport(name, False, [(float(grid[0]), float(values[0]))], margin=gamma,
                                    note=f"omega ~ t^{gamma} около нуля")
        if omega.decay.kind == 'polynomial' and omega.decay.parameter > 0:
            return HypothesisReport(name, False, [(float(grid[-1]), float(values[-1]))],
                                    margin=-omega.decay.parameter, note="omega растет на бесконечности")
        satisfied = True if omega.decay.kind != 'unknown' else None
        return HypothesisReport(name, satisfied, [(float(grid[peak]), float(values[peak]))],
                                margin=float(np.max(np.abs(values))))

    def _check_integrable(self, omega: RadialProfile, grid: np.ndarray, values: np.ndarray) -> HypothesisReport:
        name = 'omega_integrable'
        gamma = omega.singularity_exponent
        if gamma <= -1:
            return HypothesisReport(name, False, [(float(grid[0]), float(values[0] * grid[0]))],
                                    margin=gamma + 1.0, note="Неинтегрируемая особенность в нуле")
        tail = omega.decay.integrable_with_weight(0.0)
        if tail is False:
            return HypothesisReport(name, False, [(float(grid[-1]), float(values[-1] * grid[-1]))],
                                    margin=-(omega.decay.parameter + 1.0), note="Расходящийся хвост")
        if tail is None:
            return HypothesisReport(name, None, [], note="Убывание на бесконечности неизвестно")
        result = self._integrate_profile(omega.eval, 0.0, omega.support, gamma)
        if not result.converged or not math.isfinite(result.value):
            return HypothesisReport(name, None, [('integral', result.value)], note="Квадратура не сошлась")
        return HypothesisReport(name, True, [('integral', result.value)], margin=result.value)

    def _check_omega_monotone(self, f: RadialProfile, n: int, grid: np.ndarray,
                              values: np.ndarray) -> HypothesisReport:
        name = 'omega_over_t_nonincreasing'
        h = values / grid
        rtol = self.SCAN_RTOL if f.has_analytic_derivative else self.FD_RTOL
        return self._monotone_scan(name, grid, h, rtol, tail_known=f.decay.kind != 'unknown')

    # ==================== СКАНЫ ====================

    @staticmethod
    def _monotone_scan(name: str, grid: np.ndarray, h: np.ndarray, rtol: float,
                       tail_known: bool = True) -> HypothesisReport:
        """Проверка невозрастания h на сетке; свидетель - наиболее нарушающая пара соседей"""
        rises = h[1:] - h[:-1]
        allowed = rtol * (np.abs(h[1:]) + np.abs(h[:-1])) + 1e-300
        excess = rises - allowed
        worst = int(np.argmax(excess))
        if excess[worst] > 0:
            evidence = [(float(grid[worst]), float(h[worst])), (float(grid[worst + 1]), float(h[worst + 1]))]
            return HypothesisReport(name, False, evidence, margin=-float(rises[worst]))
        satisfied = True if tail_known else None
        return HypothesisReport(name, satisfied, [(float(grid[worst]), float(h[worst]))],
                                margin=-float(np.max(rises)))

    def check_nonincreasing(self, f: RadialProfile) -> HypothesisReport:
        """Невозрастание профиля: скан по сетке, подтвержденный метаданными"""
        grid = self.scan_grid(f)
        report = self._monotone_scan('nonincreasing', grid, f.eval(grid), self.SCAN_RTOL)
        if report.satisfied and f.monotone_nonincreasing is None:
            report.satisfied = None
            report.note = "Скан не нашел нарушений, метаданные не подтверждают"
        return report

    def check_quotient_nonincreasing(self, f: RadialProfile, name: str = 'over_t_nonincreasing') -> HypothesisReport:
        """Невозрастание f(t)/t на сетке"""
        grid = self.scan_grid(f)
        return self._monotone_scan(name, grid, f.eval(grid) / grid, self.SCAN_RTOL,
                                   tail_known=f.decay.kind != 'unknown')

    def check_nonnegative(self, f: RadialProfile) -> HypothesisReport:
        """Неотрицательность профиля на сетке"""
        grid = self.scan_grid(f)
        values = f.eval(grid)
        worst = int(np.argmin(values))
        evidence = [(float(grid[worst]), float(values[worst]))]
        if values[worst] < 0:
            return HypothesisReport('nonnegative', False, evidence, margin=float(values[worst]))
        satisfied = True if f.nonnegative else None
        return HypothesisReport('nonnegative', satisfied, evidence, margin=float(values[worst]))

    # ==================== ИНТЕГРИРУЕМОСТЬ ====================

    def check_thm2_integrability(self, f: RadialProfile, branch: int) -> HypothesisReport:
        """
        Интегрируемость для убывающей теоремы.

        Args:
            f: Неотрицательный невозрастающий профиль
            branch: 1 - f(r) min{1, r} интегрируема на (0, inf); 2 - r f(r) интегрируема на (0, 1]

        Returns:
            HypothesisReport (satisfied=None при неизвестном убывании в ветви 1)
        """
        if branch not in (1, 2):
            raise ValueError("Ветвь должна быть 1 или 2")
        name = f"thm2_integrability_branch{branch}"
        gamma = f.singularity_exponent + 1.0
        if gamma <= -1:
            r0 = Config.SCAN_MIN
            return HypothesisReport(name, False, [(r0, float(f.eval(r0)) * r0)], margin=gamma + 1.0,
                                    note="r f(r) неинтегрируема около нуля")

        head_end = min(1.0, f.support)
        head = self._integrate_profile(lambda r: r * f.eval(r), 0.0, head_end, gamma)
        total = head
        if branch == 1 and f.support > 1.0:
            tail_ok = f.decay.integrable_with_weight(0.0)
            if tail_ok is None:
                return HypothesisReport(name, None, [('head', head.value)], note="Убывание неизвестно")
            if tail_ok is False:
                r1 = Config.SCAN_MAX
                return HypothesisReport(name, False, [(r1, float(f.eval(r1)) * r1)],
                                        margin=-(f.decay.parameter + 1.0), note="Хвост f неинтегрируем")
            total = head + self._integrate_profile(f.eval, 1.0, f.support, None)

        if not total.converged or not math.isfinite(total.value):
            return HypothesisReport(name, None, [('integral', total.value)], note="Квадратура не сошлась")
        return HypothesisReport(name, True, [('integral', total.value)], margin=total.value)

    # ==================== ПОЙА ====================

    def check_polya(self, f: RadialProfile) -> HypothesisReport:
        """
        Критерий Пойа: выпуклость на (0, inf) (наклоны хорд не убывают) и стремление к нулю.
        """
        name = 'polya_convex_decaying'
        grid = self.scan_grid(f, beyond_support=True)
        values = f.eval(grid)
        slopes = np.diff(values) / np.diff(grid)
        drops = slopes[:-1] - slopes[1:]
        allowed = self.SCAN_RTOL * (np.abs(slopes[:-1]) + np.abs(slopes[1:])) + 1e-300
        excess = drops - allowed
        worst = int(np.argmax(excess))
        if excess[worst] > 0:
            evidence = [(float(grid[worst]), float(slopes[worst])),
                        (float(grid[worst + 1]), float(slopes[worst + 1]))]
            return HypothesisReport(name, False, evidence, margin=-float(drops[worst]),
                                    note="Нарушена выпуклость (наклоны хорд)")

        decays = f.decays
        if decays is False:
            return HypothesisReport(name, False, [(float(grid[-1]), float(values[-1]))],
                                    margin=-abs(float(values[-1])), note="Профиль не стремится к нулю")
        return HypothesisReport(name, True if decays else None,
                                [(float(grid[worst]), float(slopes[worst]))],
                                margin=-float(np.max(drops)))

    # ==================== МНОЖЕСТВА УРОВНЯ ====================

    def layer_cake_width(self, phi: RadialProfile, t: float) -> float:
        """
        Полуширина множества уровня a(t) = sup{x >= 0 : phi(x) > t} монотонной бисекцией.

        Returns:
            0.0 при t >= sup phi
        """
        if t < 0:
            raise ValueError("Уровень t должен быть неотрицательным")
        top = float(phi.eval(0.0))
        if not math.isnan(top) and t >= top:
            return 0.0
        hi = phi.support if math.isfinite(phi.support) else 1.0
        for _ in range(1000):
            if float(phi.eval(hi)) <= t:
                break
            hi *= 2.0
        else:
            raise RefusalError(f"Уровень {t} не достигается профилем {phi.name}")
        lo = 0.0
        while hi - lo > 4.0 * np.finfo(float).eps * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if float(phi.eval(mid)) > t:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
