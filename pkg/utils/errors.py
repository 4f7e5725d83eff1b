"""Типы ошибок предметной области"""

from typing import Optional


class GrammarError(ValueError):
    """Ошибка разбора мини-грамматики профилей/тел"""

    def __init__(self, message: str, token: Optional[str] = None):
        super().__init__(message if token is None else f"{message}: '{token}'")
        self.token = token


class RefusalError(ValueError):
    """Операция отказывается работать: не выполнены предусловия"""


class IntegrationError(ValueError):
    """Подынтегральная функция вернула NaN"""

    def __init__(self, abscissa: float):
        super().__init__(f"Подынтегральная функция вернула NaN в точке x={abscissa!r}")
        self.abscissa = abscissa


class ConvergenceError(RuntimeError):
    """Итерационный метод не сошелся"""


class SamplingError(ValueError):
    """Слишком низкая доля принятия при отбраковке"""


class OutputError(ValueError):
    """Артефакт нельзя записать по указанному пути"""

    def __init__(self, path: str, reason: str):
        super().__init__(f"Не удалось записать '{path}': {reason}")
        self.path = path
