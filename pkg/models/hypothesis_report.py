"""
Модель отчета о проверке гипотезы
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from utils.helpers import to_builtin


@dataclass
class HypothesisReport:
    """
    Результат проверки одной гипотезы.

    Attributes:
        name: Название гипотезы
        satisfied: True / False / None (неизвестно)
        evidence: Пары (точка сетки, проверяемая величина); при satisfied=False
            содержит конкретного свидетеля
        margin: Запас (отрицательный - величина нарушения)
        waived: Гипотеза явно снята пользователем
        note: Пояснение
    """

    name: str
    satisfied: Optional[bool] = None
    evidence: List[Tuple[Any, float]] = field(default_factory=list)
    margin: float = 0.0
    waived: bool = False
    note: str = ''

    def __post_init__(self):
        """Валидация после инициализации"""
        self.validate()

    def validate(self) -> bool:
        """
        Raises:
            ValueError: Если гипотеза нарушена без свидетеля
        """
        if not self.name:
            raise ValueError("Название гипотезы не может быть пустым")
        if self.satisfied is False and not self.evidence:
            raise ValueError(f"Нарушение гипотезы '{self.name}' должно сопровождаться свидетелем")
        return True

    @property
    def accepted(self) -> bool:
        """Выполнена или явно снята"""
        return self.satisfied is True or self.waived

    @property
    def status(self) -> str:
        if self.waived:
            return 'waived'
        return {True: 'satisfied', False: 'failed', None: 'unknown'}[self.satisfied]

    def to_dict(self) -> Dict[str, Any]:
        return to_builtin({
            'name': self.name,
            'satisfied': self.satisfied,
            'status': self.status,
            'evidence': [list(item) for item in self.evidence],
            'margin': self.margin,
            'waived': self.waived,
            'note': self.note
        })
