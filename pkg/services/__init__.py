"""
Инициализационный файл для пакета services.
Экспортирует все сервисы для удобного импорта.
"""

from services.bessel_service import BesselService
from services.quadrature_service import QuadratureService
from services.profile_service import ProfileService
from services.body_service import BodyService
from services.transform_service import TransformService
from services.gram_service import GramService
from services.criteria_service import CriteriaService
from services.report_service import ReportService
from services.validation_service import ValidationService

__all__ = [
    'BesselService',
    'QuadratureService',
    'ProfileService',
    'BodyService',
    'TransformService',
    'GramService',
    'CriteriaService',
    'ReportService',
    'ValidationService'
]
