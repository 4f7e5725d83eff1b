"""
Результат численного интегрирования и константы сфер.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict

from scipy.special import gammaln


@dataclass
class QuadratureResult:
    """
    Значение интеграла с оценкой ошибки.

    Attributes:
        value: Значение интеграла
        error_estimate: Оценка абсолютной ошибки (>= 0)
        evaluations: Число вычислений подынтегральной функции
        converged: Достигнута ли запрошенная точность
    """

    value: float = 0.0
    error_estimate: float = 0.0
    evaluations: int = 0
    converged: bool = True

    def __post_init__(self):
        """Валидация после инициализации"""
        self.validate()

    def validate(self) -> bool:
        """
        Проверка инвариантов результата.

        Raises:
            ValueError: При отрицательной ошибке или числе вычислений
        """
        if self.error_estimate < 0 or math.isnan(self.error_estimate):
            raise ValueError("Оценка ошибки должна быть неотрицательной")
        if self.evaluations < 0:
            raise ValueError("Число вычислений должно быть неотрицательным")
        return True

    def __add__(self, other: 'QuadratureResult') -> 'QuadratureResult':
        return QuadratureResult(
            value=self.value + other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged
        )

    def scaled(self, factor: float) -> 'QuadratureResult':
        """Результат, умноженный на константу"""
        return QuadratureResult(
            value=self.value * factor,
            error_estimate=self.error_estimate * abs(factor),
            evaluations=self.evaluations,
            converged=self.converged
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': self.value,
            'error_estimate': self.error_estimate,
            'evaluations': self.evaluations,
            'converged': self.converged
        }


@dataclass(frozen=True)
class SphereConstant:
    """
    Площадь единичной сферы S^{d-1} в R^d: 2 pi^{d/2} / Gamma(d/2).

    Attributes:
        dim: Размерность объемлющего пространства d >= 1
        surface: (d-1)-мерный объем S^{d-1}
    """

    dim: int
    surface: float = field(init=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("Размерность сферы должна быть >= 1")
        d = self.dim
        value = 2.0 * math.exp(0.5 * d * math.log(math.pi) - gammaln(0.5 * d))
        object.__setattr__(self, 'surface', value)

    @staticmethod
    def ball_volume(dim: int, radius: float = 1.0) -> float:
        """Объем шара радиуса radius в R^dim"""
        if dim == 0:
            return 1.0
        return math.exp(0.5 * dim * math.log(math.pi) - gammaln(0.5 * dim + 1.0)) * radius ** dim
