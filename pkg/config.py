"""Конфигурационные параметры приложения"""

import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    # Версия инструмента (попадает в заголовки CSV/JSON)
    TOOL_NAME = 'posdef-verifier'
    TOOL_VERSION = '0.1.0'

    # Логирование
    LOG_LEVEL = os.getenv('POSDEF_LOG_LEVEL', 'WARNING')

    # Параллелизм (по точкам сетки / элементам батареи)
    THREADS = max(1, int(os.getenv('POSDEF_THREADS', '1')))

    # Квадратуры
    QUAD_TOL = 1e-10  # Относительная точность по умолчанию
    QUAD_TOL_ABS = 1e-13  # Абсолютный порог
    QUAD_MAX_DEPTH = 50  # Максимальная глубина бисекции
    QUAD_MAX_INTERVALS = 2000  # Максимальное число подынтервалов
    OSC_MAX_PARTIAL_SUMS = 200  # Частичные суммы между нулями ядра
    OSC_EPSILON_WINDOW = 24  # Окно эпсилон-алгоритма
    OSC_MIN_PARTIAL_SUMS = 6

    # Бесселевы функции
    BESSEL_NU_MAX = 30.0
    BESSEL_ZERO_TOL = 1e-13
    BESSEL_NEWTON_ITERATIONS = 60

    # Профили и сканирование гипотез
    SCAN_POINTS = 401
    SCAN_MIN = 1e-4
    SCAN_MAX = 1e4
    FD_STEP = 1e-5  # Шаг центральной разности: FD_STEP * max(r, 1)

    # Сетки частот
    GRID_POINTS = 200
    GRID_MIN = 1e-2
    GRID_MAX = 50.0

    # Монте-Карло
    MC_SAMPLES = 1_000_000  # Прямой маршрут спаривания
    MC_SECTIONAL_SAMPLES = 20_000  # Секционный маршрут
    MC_CHUNK = 200_000
    MC_SECTION_SAMPLES = 200_000  # Сечения тел
    MC_SECTION_BODY_SAMPLES = 20_000  # Общая выборка из K на порцию секционного маршрута
    MC_SECTIONAL_BATCHES = 8  # Минимум порций для оценки ошибки по средним порций
    MC_SIGMA = 3.0  # Порог в стандартных отклонениях
    MIN_ACCEPTANCE = 1e-4

    # Критерии
    VERDICT_TOL = 1e-6  # Для вердиктов на квадратурах
    GRAM_TOL = 1e-10
    GRAM_MAX_POINTS = 200
    JACOBI_SWEEPS = 30
    JACOBI_TOL = 1e-13
    BATTERY_SIZE = 20

    # Пороги проверки тождеств
    IDENTITY_THRESHOLDS = {
        'slice': 1e-8,
        'radon-average': 1e-6,
        'dilation': 1e-8,
        'lemma1': 1e-8
    }

    # Коды возврата CLI
    EXIT_CODES = {
        'POSITIVE_NUMERIC': 0,
        'VIOLATION_FOUND': 1,
        'NOT_CONVERGED': 2,
        'HYPOTHESES_FAILED': 3,
        'INCONCLUSIVE': 4,
        'USAGE': 64
    }
