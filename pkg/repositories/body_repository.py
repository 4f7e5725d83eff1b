"""
Репозиторий тел: конструкторы мини-грамматики, загрузка многогранников из файлов,
стопки тел и радиальные веса для критерия выпуклых тел.
"""

import os
from typing import List, Optional, Union

import numpy as np

from models.kernels import BodyStack, RadialWeight
from models.norm_body import NormBody
from repositories.base_repository import BaseRepository
from utils.errors import GrammarError
from utils.grammar import Call, parse_expression


def load_polytope(path: str) -> NormBody:
    """
    Многогранник из текстового файла: строка "a1 ... an" на ограничение |<a, x>| <= 1,
    пустые строки и строки с '#' пропускаются.

    Raises:
        ValueError: Файл не найден, нечисловые значения или строки разной длины
    """
    if not os.path.isfile(path):
        raise ValueError(f"Файл многогранника не найден: {path}")
    rows: List[List[float]] = []
    with open(path, 'r', encoding='utf-8') as handle:
        for number, line in enumerate(handle, 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            try:
                rows.append([float(token) for token in line.replace(',', ' ').split()])
            except ValueError:
                raise ValueError(f"{path}:{number}: нечисловое значение в строке '{line}'")
            if len(rows[-1]) != len(rows[0]):
                raise ValueError(f"{path}:{number}: ожидалось {len(rows[0])} чисел")
    if not rows:
        raise ValueError(f"Файл многогранника пуст: {path}")
    return NormBody.polytope(np.array(rows), source=path)


class BodyRepository(BaseRepository[NormBody]):
    """Конструкторы тел по имени"""

    def __init__(self):
        super().__init__('тело')
        num = self._number
        self.register('ball', lambda n, r=1.0: NormBody.ball(self._dim(n), num(r)), 'ball(n[, r])',
                      "Евклидов шар")
        self.register('cube', lambda n, r=1.0: NormBody.cube(self._dim(n), num(r)), 'cube(n[, r])',
                      "Куб [-r, r]^n")
        self.register('lp', lambda n, p, r=1.0: NormBody.lp(self._dim(n), num(p), num(r)), 'lp(n, p[, r])',
                      "Шар l_p (p < 1 - звездное тело)")
        self.register('cross', lambda n, r=1.0: NormBody.lp(self._dim(n), 1.0, num(r)), 'cross(n[, r])',
                      "Кросс-политоп (шар l_1)")
        self.register('ellipsoid', self._ellipsoid, 'ellipsoid(a1, ..., an)', "Эллипсоид с полуосями a_i")
        self.register('polytope', self._polytope, 'polytope(file=path)', "Многогранник из файла нормалей")

    def _dim(self, arg) -> int:
        value = self._number(arg)
        if value != int(value) or value < 1:
            raise GrammarError("Размерность должна быть натуральным числом", repr(arg))
        return int(value)

    def _ellipsoid(self, *axes) -> NormBody:
        if not axes:
            raise GrammarError("ellipsoid ожидает полуоси", 'ellipsoid')
        semi = np.array([self._number(a) for a in axes])
        if np.any(semi <= 0):
            raise ValueError("Полуоси эллипсоида должны быть положительными")
        return NormBody.ellipsoid(np.diag(semi ** -2.0))

    @staticmethod
    def _polytope(file: Optional[str] = None) -> NormBody:
        if not file:
            raise GrammarError("polytope ожидает file=путь", 'polytope')
        return load_polytope(str(file))

    # ==================== СТОПКИ И ВЕСА ====================

    def create_stack(self, text: str) -> BodyStack:
        """Одно тело или stack(w1, тело1, w2, тело2, ...)"""
        node = parse_expression(text)
        if isinstance(node, Call) and node.name == 'stack':
            args = node.args
            if not args or len(args) % 2:
                raise GrammarError("stack ожидает пары (вес, тело)", str(len(args)))
            return BodyStack([(self._number(w), self.build(b)) for w, b in zip(args[::2], args[1::2])])
        return BodyStack.single(self.build(node))

    def create_weight(self, text: str) -> RadialWeight:
        """Вес psi: ball(r), balls(w1, r1, w2, r2, ...) или gaussian(sigma)"""
        node = parse_expression(text)
        if not isinstance(node, Call):
            raise GrammarError("Ожидался вес psi", repr(node))
        args = [self._number(a) for a in node.args]
        if node.name == 'ball' and len(args) <= 1:
            return RadialWeight.ball(args[0] if args else 1.0)
        if node.name == 'balls' and args and len(args) % 2 == 0:
            return RadialWeight.ball_stack(list(zip(args[::2], args[1::2])))
        if node.name == 'gaussian' and len(args) <= 1:
            return RadialWeight.gaussian(args[0] if args else 1.0)
        raise GrammarError("Вес psi должен быть ball(r), balls(w, r, ...) или gaussian(sigma)", node.name)
