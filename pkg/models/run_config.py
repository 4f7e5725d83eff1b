"""
Модель конфигурации запуска команды CLI
"""

import os
from dataclasses import dataclass, field
from typing import Any, Dict

from dotenv import dotenv_values

from config import Config
from utils.helpers import config_hash, to_builtin


@dataclass
class RunConfig:
    """
    Параметры одного запуска: по ним запуск воспроизводится полностью.

    Attributes:
        command: Команда ('transform', 'check thm-omega', ...)
        params: Параметры команды (только сериализуемые значения)
    """

    command: str
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.params = to_builtin(self.params)
        self.validate()

    def validate(self) -> bool:
        if not self.command:
            raise ValueError("Команда не может быть пустой")
        return True

    @property
    def hash(self) -> str:
        """Хеш конфигурации (без путей вывода)"""
        stable = {k: v for k, v in self.params.items() if k not in ('output', 'format', 'config')}
        return config_hash({'command': self.command, 'params': stable, 'version': Config.TOOL_VERSION})

    def header(self) -> Dict[str, Any]:
        return {'tool': Config.TOOL_NAME, 'version': Config.TOOL_VERSION, 'config_hash': self.hash}

    def to_dict(self) -> Dict[str, Any]:
        return {'command': self.command, 'params': self.params, **self.header()}

    @staticmethod
    def load_file(path: str) -> Dict[str, str]:
        """
        Плоский файл key=value; ключи совпадают с именами флагов (дефисы или подчеркивания).

        Raises:
            ValueError: Файл не найден
        """
        if not os.path.isfile(path):
            raise ValueError(f"Файл конфигурации не найден: {path}")
        return {key.replace('-', '_'): value for key, value in dotenv_values(path).items() if value is not None}
