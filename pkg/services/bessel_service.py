"""
Сервис функций Бесселя первого рода J_nu и их положительных нулей
"""

import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import jv, spherical_jn

from config import Config
from utils.errors import ConvergenceError

_SCAN_STEP = 0.1


def _is_half_integer(nu: float) -> bool:
    return float(2.0 * nu).is_integer() and not float(nu).is_integer()


def _evaluate(nu: float, x: np.ndarray) -> np.ndarray:
    """J_nu без проверки диапазонов (x уже массив)"""
    if nu == 0.5:
        with np.errstate(divide='ignore', invalid='ignore'):
            out = np.sqrt(2.0 / (np.pi * x)) * np.sin(x)
        return np.where(x == 0, 0.0, out)
    if _is_half_integer(nu):
        order = int(nu - 0.5)
        return np.sqrt(2.0 * x / np.pi) * spherical_jn(order, x)
    return jv(nu, x)


def _derivative(nu: float, x: np.ndarray) -> np.ndarray:
    """J'_nu = (J_{nu-1} - J_{nu+1}) / 2"""
    return 0.5 * (jv(nu - 1.0, x) - jv(nu + 1.0, x))


@lru_cache(maxsize=256)
def _zeros_cached(nu: float, count: int) -> Tuple[float, ...]:
    # Грубая локализация: смена знака на сетке с шагом 0.1 начиная с nu
    hi = (count + 0.5 * nu + 1.0) * math.pi + nu + 10.0
    while True:
        grid = np.arange(max(nu, 1e-3), hi, _SCAN_STEP)
        values = _evaluate(nu, grid)
        exact = np.flatnonzero(values[:-1] == 0.0)
        change = np.flatnonzero(values[:-1] * values[1:] < 0)
        if len(exact) + len(change) >= count:
            break
        hi *= 2.0

    lo = grid[change]
    up = grid[change + 1]
    f_lo = values[change]

    # Ньютон с защитой: шаг вне скобки заменяется бисекцией
    x = 0.5 * (lo + up)
    done = np.zeros_like(x, dtype=bool)
    for _ in range(Config.BESSEL_NEWTON_ITERATIONS):
        fx = _evaluate(nu, x)
        same = np.sign(fx) == np.sign(f_lo)
        lo = np.where(same, x, lo)
        f_lo = np.where(same, fx, f_lo)
        up = np.where(same, up, x)
        d = _derivative(nu, x)
        with np.errstate(divide='ignore', invalid='ignore'):
            newton = x - fx / d
        inside = np.isfinite(newton) & (newton > lo) & (newton < up)
        x_new = np.where(inside, newton, 0.5 * (lo + up))
        step = np.abs(x_new - x)
        x = np.where(done, x, x_new)
        done |= (step <= Config.BESSEL_ZERO_TOL * np.maximum(1.0, np.abs(x))) | (fx == 0.0)
        if done.all():
            break
    if not done.all():
        raise ConvergenceError(f"Ньютон не сошелся для нулей J_{nu} (сошлось {int(done.sum())} из {len(done)})")

    roots = np.sort(np.concatenate([grid[exact], x]))
    return tuple(float(v) for v in roots[:count])


class BesselService:
    """Вычисление J_nu(x), ряда и нулей с проверкой диапазонов"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def _validate(self, nu: float, x) -> np.ndarray:
        if not 0.0 <= nu <= Config.BESSEL_NU_MAX:
            raise ValueError(f"Порядок nu={nu} вне поддерживаемого диапазона [0, {Config.BESSEL_NU_MAX}]")
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0) or np.any(~np.isfinite(arr)):
            raise ValueError("Аргумент функции Бесселя должен быть конечным и неотрицательным")
        return arr

    def bessel_j(self, nu: float, x):
        """
        J_nu(x) для nu в [0, 30], x >= 0.

        Полуцелые порядки вычисляются через замкнутые тригонометрические формы
        (сферические функции Бесселя), остальные через scipy.special.jv.

        Args:
            nu: Порядок
            x: Аргумент (скаляр или массив)

        Returns:
            float для скалярного x, иначе np.ndarray

        Raises:
            ValueError: При nu или x вне диапазона
        """
        arr = self._validate(float(nu), x)
        result = _evaluate(float(nu), arr)
        if np.ndim(x) == 0:
            return float(result)
        return result

    def kernel(self, nu: float, x: np.ndarray) -> np.ndarray:
        """J_nu(x) для массивов внутри квадратур (диапазоны проверены вызывающим)"""
        return _evaluate(nu, np.asarray(x, dtype=float))

    def bessel_j_series(self, nu: float, x: float, terms: int = 40) -> float:
        """Восходящий степенной ряд (независимая проверка, точен при малых x)"""
        self._validate(float(nu), x)
        half = 0.5 * float(x)
        if half == 0.0:
            return 1.0 if nu == 0 else 0.0
        term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
        total = term
        for m in range(terms - 1):
            term *= -half * half / ((m + 1.0) * (m + 1.0 + nu))
            total += term
        return total

    def bessel_zeros(self, nu: float, count: int) -> np.ndarray:
        """
        Первые count положительных нулей J_nu.

        Raises:
            ValueError: При nu вне диапазона или count < 1
            ConvergenceError: Если уточнение Ньютоном не сошлось
        """
        self._validate(float(nu), 0.0)
        if count < 1:
            raise ValueError("Число нулей должно быть >= 1")
        return np.array(_zeros_cached(float(nu), int(count)))

    def bessel_zero(self, nu: float, k: int) -> float:
        """k-й положительный нуль J_nu (k >= 1)"""
        if k < 1:
            raise ValueError("Номер нуля должен быть >= 1")
        return float(self.bessel_zeros(nu, k)[k - 1])
