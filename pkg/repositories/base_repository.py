"""
Базовый репозиторий именованных конструкторов.
Конкретные репозитории (профили, тела) наследуются от этого класса.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Generic, List, Optional, TypeVar, Union

from utils.errors import GrammarError
from utils.grammar import Call, parse_expression

T = TypeVar('T')


@dataclass(frozen=True)
class Constructor:
    """
    Запись реестра.

    Attributes:
        name: Имя в мини-грамматике
        factory: Функция построения из разобранных аргументов
        signature: Подсказка для сообщений об ошибках
        description: Описание
    """

    name: str
    factory: Callable[..., Any]
    signature: str
    description: str = ''


class BaseRepository(Generic[T]):
    """
    Реестр конструкторов объектов по имени.

    Предоставляет общие методы:
    - register - регистрация конструктора
    - find_by_name - поиск записи
    - find_all - все записи
    - exists - проверка наличия
    - create - построение объекта из текста мини-грамматики
    """

    def __init__(self, kind: str):
        """
        Args:
            kind: Название вида объектов (для сообщений)
        """
        self.kind = kind
        self._registry: Dict[str, Constructor] = {}
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def register(self, name: str, factory: Callable[..., Any], signature: str, description: str = '') -> None:
        if name in self._registry:
            raise ValueError(f"Конструктор '{name}' уже зарегистрирован")
        self._registry[name] = Constructor(name, factory, signature, description)

    def find_by_name(self, name: str) -> Optional[Constructor]:
        return self._registry.get(name)

    def find_all(self) -> List[Constructor]:
        return [self._registry[name] for name in sorted(self._registry)]

    def exists(self, name: str) -> bool:
        return name in self._registry

    def create(self, text: str) -> T:
        """
        Построение объекта из текста.

        Raises:
            GrammarError: Синтаксическая ошибка или неизвестное имя
            ValueError: Недопустимые значения аргументов
        """
        node = parse_expression(text)
        result = self.build(node)
        self.logger.debug(f"Построен {self.kind}: {text}")
        return result

    @staticmethod
    def _number(arg: Union[float, str, Call]) -> float:
        """Числовой аргумент конструктора (вызов или строка - ошибка грамматики)"""
        if isinstance(arg, Call):
            raise GrammarError("Ожидалось число", arg.name)
        if isinstance(arg, str):
            raise GrammarError("Ожидалось число", arg)
        return float(arg)

    def build(self, node: Union[float, Call]) -> T:
        """Построение из узла разбора"""
        if not isinstance(node, Call):
            raise GrammarError(f"Ожидался {self.kind}", repr(node))
        entry = self.find_by_name(node.name)
        if entry is None:
            raise GrammarError(f"Неизвестный {self.kind}", node.name)
        try:
            return entry.factory(*node.args, **node.kwargs)
        except TypeError:
            raise GrammarError(f"Неверные аргументы, ожидалось {entry.signature}", node.name)
