"""Вспомогательные функции"""

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List

import numpy as np


def derive_seed(seed: int, task_index: int) -> int:
    """Сид подзадачи: seed XOR хеш индекса задачи (не зависит от порядка выполнения)"""
    digest = hashlib.sha256(f"task-{task_index}".encode()).hexdigest()
    return (int(seed) ^ int(digest[:8], 16)) & 0x7FFFFFFF


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Независимый генератор для (seed, ключи) через spawn key SeedSequence"""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys)))


def config_hash(params: Dict[str, Any]) -> str:
    """Хеш конфигурации запуска для заголовков артефактов"""
    payload = json.dumps(params, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """Логарифмическая сетка из count точек на [lo, hi]"""
    if count == 1:
        return np.array([float(lo)])
    return np.logspace(np.log10(lo), np.log10(hi), count)


def to_builtin(value: Any) -> Any:
    """Приведение numpy-типов к встроенным для JSON"""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return repr(value)
    return value


def unit(vector: List[float]) -> np.ndarray:
    """Нормировка вектора на единичную длину"""
    v = np.asarray(vector, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("Нулевой вектор нельзя нормировать")
    return v / norm


def parallel_map(func: Callable[[Any], Any], items: Iterable[Any], threads: int = 1) -> List[Any]:
    """Применение func к элементам с сохранением порядка результатов"""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))
