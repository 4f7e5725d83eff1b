"""
Модель сетки частот
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from config import Config
from utils.helpers import log_grid


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """
    Отсортированный набор частот xi >= 0.

    Attributes:
        points: Строго возрастающие конечные частоты
        scale: 'log' | 'lin' | 'list'
    """

    points: np.ndarray
    scale: str = 'list'

    def __post_init__(self):
        object.__setattr__(self, 'points', np.asarray(self.points, dtype=float).reshape(-1))
        self.validate()

    def validate(self) -> bool:
        """
        Raises:
            ValueError: Пустая, неконечная, отрицательная или невозрастающая сетка
        """
        pts = self.points
        if len(pts) == 0:
            raise ValueError("Сетка частот не может быть пустой")
        if not np.all(np.isfinite(pts)):
            raise ValueError("Частоты должны быть конечными")
        if np.any(pts < 0):
            raise ValueError("Частоты должны быть неотрицательными")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("Частоты должны строго возрастать")
        return True

    @classmethod
    def log(cls, lo: float, hi: float, count: int) -> 'FrequencyGrid':
        if not 0 < lo < hi or count < 1:
            raise ValueError("Логарифмическая сетка требует 0 < lo < hi и count >= 1")
        return cls(log_grid(lo, hi, count), 'log')

    @classmethod
    def linear(cls, lo: float, hi: float, count: int) -> 'FrequencyGrid':
        if not lo < hi or count < 1:
            raise ValueError("Линейная сетка требует lo < hi и count >= 1")
        return cls(np.linspace(lo, hi, count), 'lin')

    @classmethod
    def default(cls) -> 'FrequencyGrid':
        return cls.log(Config.GRID_MIN, Config.GRID_MAX, Config.GRID_POINTS)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(float(x) for x in self.points)

    def to_dict(self) -> Dict[str, Any]:
        return {'scale': self.scale, 'count': len(self), 'min': float(self.points[0]), 'max': float(self.points[-1])}
