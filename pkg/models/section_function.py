"""
Модели функции параллельных сечений A_{K,v} и равномерной выборки из тела
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from config import Config
from models.norm_body import NormBody


@dataclass(frozen=True, eq=False)
class SectionFunction:
    """
    Функция сечений A_{K,v}(t): (n-1)-объем K пересеченного с {<x, v> = t}.

    Attributes:
        body: Тело K
        direction: Единичный вектор v
        backend: 'exact' | 'monte_carlo' | 'auto'
        samples: Бюджет Монте-Карло на одно значение
        seed: Сид Монте-Карло
    """

    body: NormBody
    direction: np.ndarray
    backend: str = 'auto'
    samples: int = Config.MC_SECTION_SAMPLES
    seed: int = 0

    VALID_BACKENDS = ('exact', 'monte_carlo', 'auto')

    def __post_init__(self):
        v = np.asarray(self.direction, dtype=float)
        object.__setattr__(self, 'direction', v)
        self.validate()

    def validate(self) -> bool:
        """
        Raises:
            ValueError: Если направление не единичное или бэкенд неизвестен
        """
        if self.direction.shape != (self.body.dim,):
            raise ValueError(f"Направление должно иметь размерность {self.body.dim}")
        if abs(np.linalg.norm(self.direction) - 1.0) > 1e-10:
            raise ValueError("Направление сечения должно быть единичным вектором")
        if self.backend not in self.VALID_BACKENDS:
            raise ValueError(f"Бэкенд должен быть одним из: {self.VALID_BACKENDS}")
        if self.samples < 1:
            raise ValueError("Бюджет выборки должен быть >= 1")
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            'body': self.body.label,
            'direction': self.direction.tolist(),
            'backend': self.backend,
            'samples': self.samples,
            'seed': self.seed
        }


@dataclass
class UniformSample:
    """
    Равномерная выборка из тела методом отбраковки.

    Attributes:
        points: Массив (count, n)
        acceptance_rate: Доля принятых предложений
        proposals: Число предложенных точек
        seed: Сид генератора
    """

    points: np.ndarray
    acceptance_rate: float
    proposals: int
    seed: int

    def __len__(self) -> int:
        return len(self.points)
