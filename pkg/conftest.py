"""Общая настройка тестов: путь к проекту и профили hypothesis"""

import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

settings.register_profile('fast', max_examples=10, deadline=None)
settings.register_profile('ci', max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv('HYPOTHESIS_PROFILE', 'ci'))
