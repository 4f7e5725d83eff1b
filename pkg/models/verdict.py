"""
Модель вердикта проверки положительной определенности
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from config import Config
from models.hypothesis_report import HypothesisReport
from utils.helpers import to_builtin


class Classification(str, Enum):
    """Исход проверки"""

    POSITIVE_NUMERIC = 'POSITIVE_NUMERIC'
    VIOLATION_FOUND = 'VIOLATION_FOUND'
    HYPOTHESES_FAILED = 'HYPOTHESES_FAILED'
    INCONCLUSIVE = 'INCONCLUSIVE'


@dataclass
class Verdict:
    """
    Вердикт: отчеты о гипотезах, минимум знаковой величины и классификация.

    Attributes:
        check: Название проверки
        classification: Исход
        hypotheses: Отчеты о гипотезах
        min_value: Минимум проверяемой величины (None, если не вычислялась)
        witness: Точка/частота/пробная функция, где достигнут минимум
        tolerance: Порог: нарушение означает min_value < -tolerance
        budget: Бюджеты вычислений и сиды
        details: Дополнительные данные (сканы, согласие маршрутов)
    """

    check: str
    classification: Classification
    hypotheses: List[HypothesisReport] = field(default_factory=list)
    min_value: Optional[float] = None
    witness: Optional[Any] = None
    tolerance: float = 0.0
    budget: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        """Валидация после инициализации"""
        self.classification = Classification(self.classification)
        self.validate()

    def validate(self) -> bool:
        """
        Проверка согласованности классификации

        Raises:
            ValueError: Если классификация противоречит минимуму, свидетелю или гипотезам
        """
        if self.tolerance < 0:
            raise ValueError("Допуск должен быть неотрицательным")
        if self.classification == Classification.VIOLATION_FOUND:
            if self.witness is None:
                raise ValueError("Нарушение должно сопровождаться свидетелем")
            if self.min_value is None or not self.min_value < -self.tolerance:
                raise ValueError("Нарушение требует min_value < -tolerance")
        if self.classification == Classification.POSITIVE_NUMERIC:
            if self.min_value is not None and self.min_value < -self.tolerance:
                raise ValueError("Положительный вердикт требует min_value >= -tolerance")
            if not all(h.accepted for h in self.hypotheses):
                raise ValueError("Положительный вердикт требует выполнения всех гипотез")
        return True

    @property
    def exit_code(self) -> int:
        return Config.EXIT_CODES[self.classification.value]

    @property
    def failed_hypotheses(self) -> List[HypothesisReport]:
        return [h for h in self.hypotheses if not h.accepted]

    def to_dict(self) -> Dict[str, Any]:
        """Сериализация со стабильными именами полей"""
        return to_builtin({
            'check': self.check,
            'classification': self.classification.value,
            'min_value': self.min_value,
            'witness': self.witness,
            'tolerance': self.tolerance,
            'hypotheses': [h.to_dict() for h in self.hypotheses],
            'seeds': self.budget.get('seeds', []),
            'budget': {k: v for k, v in self.budget.items() if k != 'seeds'},
            'details': self.details
        })
