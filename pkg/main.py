"""Главный файл приложения - точка входа"""

import logging
import os
import sys

# Добавляем путь к проекту
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import Config
from views.cli_app import cli


def main():
    """Основная функция: логирование в stderr и дерево команд"""
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, Config.LOG_LEVEL.upper(), logging.WARNING),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )
    cli(prog_name=Config.TOOL_NAME)


if __name__ == "__main__":
    main()
