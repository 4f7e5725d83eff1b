"""
Мини-грамматики командной строки.

Выражения профилей и тел:
    expr   := NAME '(' [arg (',' arg)*] ')' | number
    arg    := NAME '=' value | expr
    number := ['-' | '+'] (FLOAT | 'inf' | 'pi')

Сетки частот: "log:lo:hi:count", "lin:lo:hi:count", "list:x1,x2,...".
Точки Грама: "grid:lo:hi:count", "random:count:scale", "list:x1 y1;x2 y2;...".
Диапазоны параметров: "lo:hi:count" или "x1,x2,...".
"""

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Union

import numpy as np

from models.frequency_grid import FrequencyGrid
from models.gram_spec import GramSpec
from utils.errors import GrammarError

_NUMBER = re.compile(r'[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?')
_NAME = re.compile(r'[A-Za-z_][A-Za-z0-9_]*')
_CONSTANTS = {'inf': math.inf, 'pi': math.pi}


@dataclass
class Call:
    """Узел разбора: имя конструктора с позиционными и именованными аргументами"""

    name: str
    args: List[Union[float, 'Call']] = field(default_factory=list)
    kwargs: Dict[str, Union[float, str]] = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> GrammarError:
        rest = self.text[self.pos:].strip()
        return GrammarError(message, rest.split(',')[0].split(')')[0] if rest else '<конец строки>')

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ''

    def expect(self, char: str) -> None:
        if self.peek() != char:
            raise self.error(f"Ожидался символ '{char}'")
        self.pos += 1

    def name(self) -> str:
        self.skip()
        match = _NAME.match(self.text, self.pos)
        if not match:
            raise self.error("Ожидалось имя")
        self.pos = match.end()
        return match.group()

    def number(self) -> float:
        self.skip()
        sign = 1.0
        char = self.peek()
        if char and char in '+-' and _NAME.match(self.text, self.pos + 1):
            sign = -1.0 if self.text[self.pos] == '-' else 1.0
            self.pos += 1
        match = _NUMBER.match(self.text, self.pos)
        if match:
            self.pos = match.end()
            return sign * float(match.group())
        word = self.name()
        if word not in _CONSTANTS:
            raise GrammarError("Неизвестная константа", word)
        return sign * _CONSTANTS[word]

    def expression(self) -> Union[float, Call]:
        self.skip()
        match = _NAME.match(self.text, self.pos)
        if match and match.group() not in _CONSTANTS:
            return self.call()
        return self.number()

    def call(self) -> Call:
        node = Call(self.name())
        self.expect('(')
        if self.peek() == ')':
            self.pos += 1
            return node
        while True:
            self.skip()
            keyword = re.compile(r'([A-Za-z_][A-Za-z0-9_]*)\s*=').match(self.text, self.pos)
            if keyword:
                self.pos = keyword.end()
                node.kwargs[keyword.group(1)] = self.value()
            else:
                node.args.append(self.expression())
            char = self.peek()
            if char == ',':
                self.pos += 1
                continue
            if char == ')':
                self.pos += 1
                return node
            raise self.error("Ожидалась ',' или ')'")

    def value(self) -> Union[float, str]:
        self.skip()
        char = self.peek()
        if char and char in '"\'':
            quote = self.text[self.pos]
            end = self.text.find(quote, self.pos + 1)
            if end < 0:
                raise self.error("Незакрытая кавычка")
            raw = self.text[self.pos + 1:end]
            self.pos = end + 1
            return raw
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in ',)':
            self.pos += 1
        raw = self.text[start:self.pos].strip()
        if not raw:
            raise self.error("Пустое значение")
        try:
            return float(raw)
        except ValueError:
            return raw


def parse_expression(text: str) -> Union[float, Call]:
    """
    Разбор выражения профиля или тела.

    Raises:
        GrammarError: Синтаксическая ошибка (с нарушающим токеном)
    """
    if not text or not text.strip():
        raise GrammarError("Пустое выражение")
    parser = _Parser(text)
    node = parser.expression()
    if parser.peek():
        raise parser.error("Лишние символы после выражения")
    return node


def _float(token: str) -> float:
    token = token.strip()
    if token.lstrip('+-') in _CONSTANTS:
        value = _CONSTANTS[token.lstrip('+-')]
        return -value if token.startswith('-') else value
    try:
        return float(token)
    except ValueError:
        raise GrammarError("Ожидалось число", token)


def _count(token: str) -> int:
    try:
        value = int(token.strip())
    except ValueError:
        raise GrammarError("Ожидалось целое число", token)
    if value < 1:
        raise GrammarError("Количество должно быть положительным", token)
    return value


def parse_grid(text: str) -> FrequencyGrid:
    """Сетка частот: log:lo:hi:count, lin:lo:hi:count или list:x1,x2,..."""
    kind, _, rest = text.partition(':')
    try:
        if kind == 'list':
            return FrequencyGrid(sorted(_float(t) for t in rest.split(',') if t.strip()), 'list')
        parts = rest.split(':')
        if kind not in ('log', 'lin') or len(parts) != 3:
            raise GrammarError("Сетка должна иметь вид log:lo:hi:count, lin:lo:hi:count или list:...", text)
        lo, hi, count = _float(parts[0]), _float(parts[1]), _count(parts[2])
        return FrequencyGrid.log(lo, hi, count) if kind == 'log' else FrequencyGrid.linear(lo, hi, count)
    except GrammarError:
        raise
    except ValueError as e:
        raise GrammarError(str(e), text)


def parse_points(text: str, dim: int, seed: int = 0) -> GramSpec:
    """Точки Грама: grid:lo:hi:count, random:count[:scale] или list:x1 y1;x2 y2"""
    kind, _, rest = text.partition(':')
    parts = rest.split(':')
    try:
        if kind == 'grid' and len(parts) == 3:
            return GramSpec.grid(dim, _float(parts[0]), _float(parts[1]), _count(parts[2]))
        if kind == 'random' and len(parts) in (1, 2):
            scale = _float(parts[1]) if len(parts) == 2 else 1.0
            return GramSpec.random(dim, _count(parts[0]), seed, scale)
        if kind == 'list':
            rows = [[_float(t) for t in row.replace(',', ' ').split()] for row in rest.split(';') if row.strip()]
            if any(len(row) != dim for row in rows):
                raise GrammarError(f"Каждая точка должна иметь {dim} координат", rest)
            return GramSpec(dim, np.array(rows), origin='list')
    except GrammarError:
        raise
    except ValueError as e:
        raise GrammarError(str(e), text)
    raise GrammarError("Точки должны иметь вид grid:lo:hi:count, random:count[:scale] или list:...", text)


def parse_range(text: str) -> List[float]:
    """Диапазон lo:hi:count (равномерно, с концами) или список x1,x2,..."""
    if not text or not text.strip():
        raise GrammarError("Пустой диапазон")
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise GrammarError("Диапазон должен иметь вид lo:hi:count", text)
        lo, hi, count = _float(parts[0]), _float(parts[1]), _count(parts[2])
        if count == 1:
            return [lo]
        return [float(x) for x in np.linspace(lo, hi, count)]
    values = [_float(t) for t in text.split(',') if t.strip()]
    if not values:
        raise GrammarError("Пустой диапазон", text)
    return values
