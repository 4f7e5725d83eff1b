"""
Инициализационный файл для пакета repositories.
Экспортирует реестры конструкторов мини-грамматики.
"""

from repositories.base_repository import BaseRepository, Constructor
from repositories.profile_repository import EXAMPLES, Example, ProfileRepository
from repositories.body_repository import BodyRepository

__all__ = [
    'BaseRepository',
    'Constructor',
    'ProfileRepository',
    'BodyRepository',
    'Example',
    'EXAMPLES'
]
