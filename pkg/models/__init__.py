"""
Инициализационный файл для пакета models.
Экспортирует все классы моделей для удобного импорта.
"""

from models.frequency_grid import FrequencyGrid
from models.gram_spec import GramSpec
from models.hypothesis_report import HypothesisReport
from models.identity_result import IdentityResidual
from models.kernels import BodyStack, CosineKernel, NormKernel, RadialWeight
from models.norm_body import NormBody
from models.quadrature_result import QuadratureResult, SphereConstant
from models.radial_profile import Decay, RadialProfile
from models.run_config import RunConfig
from models.section_function import SectionFunction, UniformSample
from models.test_function import TestFunction
from models.verdict import Classification, Verdict

__all__ = [
    'FrequencyGrid',
    'GramSpec',
    'HypothesisReport',
    'IdentityResidual',
    'BodyStack',
    'CosineKernel',
    'NormKernel',
    'RadialWeight',
    'NormBody',
    'QuadratureResult',
    'SphereConstant',
    'Decay',
    'RadialProfile',
    'RunConfig',
    'SectionFunction',
    'UniformSample',
    'TestFunction',
    'Classification',
    'Verdict'
]
