"""
Сервис численного интегрирования: адаптивная пара Гаусса-Кронрода (7/15),
полубесконечные интервалы и осцилляторные интегралы с ядрами J_nu и cos.
"""

import heapq
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from models.quadrature_result import QuadratureResult
from services.bessel_service import BesselService
from utils.errors import IntegrationError, RefusalError

Integrand = Callable[[np.ndarray], np.ndarray]

# Узлы и веса пары Гаусса (7) - Кронрода (15) на [-1, 1]
XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000
])
WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714
])
WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327
])

_EPS = np.finfo(float).eps
_NODES = np.concatenate([-XGK[:7], [0.0], XGK[:7][::-1]])
_KRONROD_WEIGHTS = np.concatenate([WGK[:7], [WGK[7]], WGK[:7][::-1]])
_GAUSS_WEIGHTS = np.zeros(15)
_GAUSS_WEIGHTS[[1, 3, 5]] = WG[:3]
_GAUSS_WEIGHTS[[13, 11, 9]] = WG[:3]
_GAUSS_WEIGHTS[7] = WG[3]


class QuadratureService:
    """Квадратуры с оценкой ошибки"""

    def __init__(self, bessel_service: Optional[BesselService] = None):
        self.logger = logging.getLogger(__name__)
        self.bessel = bessel_service or BesselService()

    # ==================== ОТРЕЗОК ====================

    @staticmethod
    def _evaluate(f: Integrand, x: np.ndarray) -> np.ndarray:
        values = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
        bad = ~np.isfinite(values)
        if bad.any():
            raise IntegrationError(float(x[bad][0]))
        return values

    def _gk15(self, f: Integrand, a: float, b: float) -> Tuple[float, float]:
        center, half = 0.5 * (a + b), 0.5 * (b - a)
        values = self._evaluate(f, center + half * _NODES)
        kronrod = half * float(np.dot(_KRONROD_WEIGHTS, values))
        gauss = half * float(np.dot(_GAUSS_WEIGHTS, values))
        resabs = abs(half) * float(np.dot(_KRONROD_WEIGHTS, np.abs(values)))
        return kronrod, max(abs(kronrod - gauss), 50.0 * _EPS * resabs)

    def _adaptive(self, f: Integrand, a: float, b: float, tol: float, tol_abs: float) -> QuadratureResult:
        value, error = self._gk15(f, a, b)
        evaluations = 15
        heap: List[Tuple[float, float, float, float, int]] = [(-error, a, b, value, 0)]
        frozen_value = frozen_error = 0.0
        total_value, total_error = value, error
        converged = True

        while total_error > max(tol * abs(total_value), tol_abs):
            if not heap:
                converged = False
                break
            if len(heap) >= Config.QUAD_MAX_INTERVALS:
                converged = False
                break
            neg_err, lo, hi, val, depth = heapq.heappop(heap)
            if depth >= Config.QUAD_MAX_DEPTH:
                frozen_value += val
                frozen_error += -neg_err
                continue
            mid = 0.5 * (lo + hi)
            left_val, left_err = self._gk15(f, lo, mid)
            right_val, right_err = self._gk15(f, mid, hi)
            evaluations += 30
            heapq.heappush(heap, (-left_err, lo, mid, left_val, depth + 1))
            heapq.heappush(heap, (-right_err, mid, hi, right_val, depth + 1))
            total_value += left_val + right_val - val
            total_error = frozen_error + math.fsum(-item[0] for item in heap)

        if not converged:
            self.logger.warning(
                f"Адаптивная квадратура на [{a}, {b}] не достигла точности: ошибка {total_error:.3e}"
            )
        return QuadratureResult(total_value, total_error, evaluations, converged)

    def integrate_adaptive(self, f: Integrand, a: float, b: float,
                           tol: float = Config.QUAD_TOL,
                           tol_abs: float = Config.QUAD_TOL_ABS,
                           singularity_exponent: Optional[float] = None,
                           singular_end: str = 'a') -> QuadratureResult:
        """
        Интеграл f по [a, b] глобально-адаптивной схемой G7-K15.

        Args:
            f: Векторизованная подынтегральная функция
            a, b: Конечные пределы, a < b
            tol: Относительная точность
            tol_abs: Абсолютная точность
            singularity_exponent: Показатель gamma > -1 особенности (t - a)^gamma на конце;
                при gamma < 0 выполняется замена t = a + (b - a) u^{1/(1+gamma)}
            singular_end: 'a' или 'b' - конец с особенностью

        Returns:
            QuadratureResult (converged=False при исчерпании подразбиений)

        Raises:
            ValueError: При некорректных пределах или gamma <= -1
            IntegrationError: Если подынтегральная функция вернула NaN
        """
        if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
            raise ValueError(f"Требуются конечные пределы a < b, получено [{a}, {b}]")
        if singular_end not in ('a', 'b'):
            raise ValueError("singular_end должен быть 'a' или 'b'")
        gamma = singularity_exponent
        if gamma is not None and gamma <= -1.0:
            raise ValueError(f"Особенность с показателем {gamma} <= -1 неинтегрируема")
        if gamma is None or gamma >= 0.0:
            return self._adaptive(f, a, b, tol, tol_abs)

        power = 1.0 / (1.0 + gamma)
        length = b - a
        sign = 1.0 if singular_end == 'a' else -1.0
        origin = a if singular_end == 'a' else b

        def mapped(u):
            return f(origin + sign * length * u ** power) * length * power * u ** (power - 1.0)

        return self._adaptive(mapped, 0.0, 1.0, tol, tol_abs)

    def integrate_semi_infinite(self, f: Integrand, a: float = 0.0,
                                tol: float = Config.QUAD_TOL,
                                tol_abs: float = Config.QUAD_TOL_ABS,
                                singularity_exponent: Optional[float] = None) -> QuadratureResult:
        """
        Интеграл f по [a, inf): голова [a, a+1] (с возможной особенностью в a)
        и хвост через замену t = a + 1 + u / (1 - u).
        """
        head = self.integrate_adaptive(f, a, a + 1.0, tol, tol_abs, singularity_exponent)
        start = a + 1.0

        def mapped(u):
            w = 1.0 - u
            return f(start + u / w) / (w * w)

        tail = self._adaptive(mapped, 0.0, 1.0, tol, tol_abs)
        return head + tail

    # ==================== ОСЦИЛЛЯТОРНЫЕ ИНТЕГРАЛЫ ====================

    @staticmethod
    def wynn_epsilon(sums: Sequence[float]) -> float:
        """
        Эпсилон-алгоритм Винна: экстраполяция последовательности частичных сумм.

        Возвращает последний элемент наибольшего четного столбца таблицы.
        """
        current = np.asarray(sums, dtype=float)
        best = float(current[-1])
        previous = np.zeros(len(current) + 1)
        for k in range(1, len(current)):
            diff = current[1:] - current[:-1]
            scale = np.maximum(np.abs(current[1:]), np.abs(current[:-1]))
            if np.any(np.abs(diff) <= 1e3 * _EPS * np.maximum(scale, 1e-300)):
                break
            following = previous[1:len(current)] + 1.0 / diff
            previous, current = current, following
            if k % 2 == 0:
                best = float(current[-1])
        return best

    def _between_zeros(self, integrand: Integrand, zeros: Callable[[int], np.ndarray],
                       first_exponent: float, tol: float, tol_abs: float) -> QuadratureResult:
        """Суммирование кусков между нулями ядра с ускорением частичных сумм"""
        window = Config.OSC_EPSILON_WINDOW
        budget = Config.OSC_MAX_PARTIAL_SUMS
        nodes = np.concatenate([[0.0], zeros(budget)])

        partial: List[float] = []
        estimates: List[float] = []
        total = 0.0
        abs_total = 0.0
        piece_error = 0.0
        evaluations = 0
        agreements = 0
        for k in range(budget):
            exponent = first_exponent if k == 0 else None
            piece = self.integrate_adaptive(integrand, nodes[k], nodes[k + 1], tol, tol_abs * 1e-2, exponent)
            evaluations += piece.evaluations
            piece_error += piece.error_estimate
            total += piece.value
            abs_total += abs(piece.value)
            partial.append(total)
            estimates.append(self.wynn_epsilon(partial[-window:]))
            if len(estimates) < max(Config.OSC_MIN_PARTIAL_SUMS, 2):
                continue
            change = abs(estimates[-1] - estimates[-2])
            floor = max(tol * abs(estimates[-1]), 10.0 * _EPS * abs_total, tol_abs)
            agreements = agreements + 1 if change <= floor else 0
            if agreements >= 2:
                return QuadratureResult(estimates[-1], max(change, piece_error), evaluations, True)

        change = abs(estimates[-1] - estimates[-2])
        self.logger.warning(
            f"Ускорение частичных сумм не сошлось за {budget} кусков: изменение {change:.3e}"
        )
        return QuadratureResult(estimates[-1], max(change, piece_error), evaluations, False)

    def _compact(self, integrand: Integrand, zeros: Callable[[int], np.ndarray], support: float,
                 first_exponent: float, tol: float, tol_abs: float) -> QuadratureResult:
        """Интеграл по [0, support] с разбиением по нулям ядра"""
        count = 16
        inner = zeros(count)
        while inner[-1] < support and count < 100_000:
            count *= 4
            inner = zeros(count)
        edges = np.concatenate([[0.0], inner[inner < support], [support]])
        result = QuadratureResult()
        for k in range(len(edges) - 1):
            if edges[k + 1] <= edges[k]:
                continue
            exponent = first_exponent if k == 0 else None
            result = result + self.integrate_adaptive(integrand, edges[k], edges[k + 1], tol,
                                                      tol_abs * 1e-2, exponent)
        return result

    def integrate_oscillatory_bessel(self, g: Integrand, nu: float, omega: float,
                                     tol: float = Config.QUAD_TOL,
                                     tol_abs: float = Config.QUAD_TOL_ABS,
                                     singularity_exponent: float = 0.0,
                                     support: float = math.inf,
                                     decaying: Optional[bool] = True) -> QuadratureResult:
        """
        Интеграл int_0^inf g(r) J_nu(omega r) dr.

        Интервал делится по масштабированным нулям j_{nu,k}/omega, частичные суммы
        ускоряются эпсилон-алгоритмом. Для финитной амплитуды интегрирование идет
        только по носителю, без ускорения.

        Args:
            g: Амплитуда (векторизованная)
            nu: Порядок ядра, 0 <= nu <= 30
            omega: Частота > 0
            singularity_exponent: Показатель g(r) ~ r^gamma около нуля
            support: Радиус носителя амплитуды (inf для некомпактной)
            decaying: Монотонно ли убывает амплитуда на бесконечности

        Raises:
            RefusalError: Амплитуда не убывает и не финитна
        """
        if omega <= 0:
            raise ValueError("Частота omega должна быть положительной")
        if not math.isfinite(support) and not decaying:
            raise RefusalError("Амплитуда не убывает и не имеет компактного носителя")
        nu = float(nu)

        def integrand(r):
            return g(r) * self.bessel.kernel(nu, omega * r)

        def zeros(count: int) -> np.ndarray:
            return self.bessel.bessel_zeros(nu, count) / omega

        first_exponent = singularity_exponent + nu
        if math.isfinite(support):
            return self._compact(integrand, zeros, support, first_exponent, tol, tol_abs)
        return self._between_zeros(integrand, zeros, first_exponent, tol, tol_abs)

    def integrate_oscillatory_cosine(self, g: Integrand, xi: float,
                                     tol: float = Config.QUAD_TOL,
                                     tol_abs: float = Config.QUAD_TOL_ABS,
                                     singularity_exponent: float = 0.0,
                                     support: float = math.inf,
                                     decaying: Optional[bool] = True) -> QuadratureResult:
        """Интеграл int_0^inf g(t) cos(xi t) dt (при xi = 0 - обычный интеграл)"""
        if not math.isfinite(support) and not decaying:
            raise RefusalError("Амплитуда не убывает и не имеет компактного носителя")
        xi = abs(float(xi))
        gamma = singularity_exponent if singularity_exponent < 0 else None
        if xi == 0.0:
            if math.isfinite(support):
                return self.integrate_adaptive(g, 0.0, support, tol, tol_abs, gamma)
            return self.integrate_semi_infinite(g, 0.0, tol, tol_abs, gamma)

        def integrand(t):
            return g(t) * np.cos(xi * t)

        def zeros(count: int) -> np.ndarray:
            return (np.arange(1, count + 1) - 0.5) * math.pi / xi

        if math.isfinite(support):
            return self._compact(integrand, zeros, support, singularity_exponent, tol, tol_abs)
        return self._between_zeros(integrand, zeros, singularity_exponent, tol, tol_abs)

    # ==================== СОСТАВНОЙ ГАУСС-ЛЕЖАНДР ====================

    @staticmethod
    def gauss_legendre_panels(edges: Sequence[float], order: int = 10) -> Tuple[np.ndarray, np.ndarray]:
        """
        Узлы и веса составного правила Гаусса-Лежандра на панелях между edges.

        Returns:
            (nodes, weights) - плоские массивы длины order * (len(edges) - 1)
        """
        base_nodes, base_weights = np.polynomial.legendre.leggauss(order)
        e = np.asarray(edges, dtype=float)
        if e.ndim != 1 or len(e) < 2 or np.any(np.diff(e) <= 0):
            raise ValueError("Границы панелей должны строго возрастать")
        centers = 0.5 * (e[1:] + e[:-1])
        halves = 0.5 * (e[1:] - e[:-1])
        nodes = (centers[:, None] + halves[:, None] * base_nodes[None, :]).ravel()
        weights = (halves[:, None] * base_weights[None, :]).ravel()
        return nodes, weights
