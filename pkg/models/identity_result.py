"""
Модель невязки проверяемого интегрального тождества
"""

from dataclasses import dataclass, field
from typing import Any, Dict

from utils.helpers import to_builtin


@dataclass
class IdentityResidual:
    """
    Две стороны тождества и их расхождение.

    Attributes:
        name: Название тождества
        lhs: Левая часть
        rhs: Правая часть
        residual: |lhs - rhs| (абсолютная или относительная, см. relative)
        threshold: Допустимая невязка
        relative: Невязка нормирована на max(|lhs|, |rhs|)
        params: Параметры проверки
    """

    name: str
    lhs: float
    rhs: float
    residual: float
    threshold: float
    relative: bool = False
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.residual < 0:
            raise ValueError("Невязка должна быть неотрицательной")

    @classmethod
    def compare(cls, name: str, lhs: float, rhs: float, threshold: float,
                relative: bool = False, **params) -> 'IdentityResidual':
        diff = abs(lhs - rhs)
        if relative:
            scale = max(abs(lhs), abs(rhs))
            diff = diff / scale if scale > 0 else 0.0
        return cls(name, float(lhs), float(rhs), float(diff), threshold, relative, params)

    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold

    def to_dict(self) -> Dict[str, Any]:
        return to_builtin({
            'name': self.name,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'residual': self.residual,
            'threshold': self.threshold,
            'relative': self.relative,
            'passed': self.passed,
            'params': self.params
        })
