"""
Модель симметричного тела K, заданного функционалом Минковского ||x||_K
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.special import gammaln


@dataclass(frozen=True, eq=False)
class NormBody:
    """
    Центрально-симметричное тело в R^n.

    Attributes:
        dim: Размерность n >= 1
        kind: 'euclidean_ball' | 'lp_ball' | 'cube' | 'polytope' | 'ellipsoid'
        p: Показатель для lp_ball (0 < p <= inf)
        normals: Нормали полупространств |<a_i, x>| <= 1 (для polytope)
        matrix: Положительно определенная матрица M (для ellipsoid, x^T M x <= 1)
        radius: Масштаб для ball / lp_ball / cube
        source: Откуда взяты нормали (имя файла)
    """

    dim: int
    kind: str
    p: float = 2.0
    normals: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None
    radius: float = 1.0
    source: Optional[str] = None
    _box: np.ndarray = field(init=False, repr=False)

    VALID_KINDS = ('euclidean_ball', 'lp_ball', 'cube', 'polytope', 'ellipsoid')

    def __post_init__(self):
        """Валидация после инициализации"""
        self.validate()
        object.__setattr__(self, '_box', self._bounding_box())

    def validate(self) -> bool:
        """
        Проверка корректности тела

        Raises:
            ValueError: Если параметры тела некорректны
        """
        if self.dim < 1:
            raise ValueError("Размерность тела должна быть >= 1")
        if self.kind not in self.VALID_KINDS:
            raise ValueError(f"Тип тела должен быть одним из: {self.VALID_KINDS}")
        if not self.radius > 0:
            raise ValueError("Радиус тела должен быть положительным")
        if self.kind == 'lp_ball' and not self.p > 0:
            raise ValueError("Показатель p должен быть положительным")
        if self.kind == 'polytope':
            a = np.asarray(self.normals, dtype=float) if self.normals is not None else None
            if a is None or a.ndim != 2 or a.shape[1] != self.dim:
                raise ValueError(f"Нормали многогранника должны иметь форму (m, {self.dim})")
            if np.linalg.matrix_rank(a) < self.dim:
                raise ValueError("Нормали не задают ограниченный многогранник")
            object.__setattr__(self, 'normals', a)
        if self.kind == 'ellipsoid':
            m = np.asarray(self.matrix, dtype=float) if self.matrix is not None else None
            if m is None or m.shape != (self.dim, self.dim) or not np.allclose(m, m.T):
                raise ValueError("Матрица эллипсоида должна быть симметричной n x n")
            try:
                np.linalg.cholesky(m)
            except np.linalg.LinAlgError:
                raise ValueError("Матрица эллипсоида должна быть положительно определенной")
            object.__setattr__(self, 'matrix', m)
        return True

    # ==================== КОНСТРУКТОРЫ ====================

    @classmethod
    def ball(cls, n: int, radius: float = 1.0) -> 'NormBody':
        return cls(dim=n, kind='euclidean_ball', radius=radius)

    @classmethod
    def cube(cls, n: int, radius: float = 1.0) -> 'NormBody':
        return cls(dim=n, kind='cube', p=math.inf, radius=radius)

    @classmethod
    def lp(cls, n: int, p: float, radius: float = 1.0) -> 'NormBody':
        if p == 2:
            return cls.ball(n, radius)
        if math.isinf(p):
            return cls.cube(n, radius)
        return cls(dim=n, kind='lp_ball', p=float(p), radius=radius)

    @classmethod
    def polytope(cls, normals, source: Optional[str] = None) -> 'NormBody':
        a = np.atleast_2d(np.asarray(normals, dtype=float))
        return cls(dim=a.shape[1], kind='polytope', normals=a, source=source)

    @classmethod
    def ellipsoid(cls, matrix) -> 'NormBody':
        m = np.asarray(matrix, dtype=float)
        return cls(dim=m.shape[0], kind='ellipsoid', matrix=m)

    # ==================== ГЕОМЕТРИЯ ====================

    @property
    def exponent(self) -> float:
        """Показатель p нормы (2 для шара, inf для куба)"""
        return {'euclidean_ball': 2.0, 'cube': math.inf}.get(self.kind, self.p)

    @property
    def is_convex(self) -> bool:
        return self.kind != 'lp_ball' or self.p >= 1

    def norm(self, x) -> np.ndarray:
        """
        Функционал Минковского inf{lambda > 0 : x in lambda K}.

        Args:
            x: Точка (n,) или массив точек (..., n)
        """
        pts = np.asarray(x, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValueError(f"Ожидалась точка размерности {self.dim}")
        absx = np.abs(pts)
        if self.kind == 'euclidean_ball':
            value = np.sqrt(np.sum(pts * pts, axis=-1))
        elif self.kind == 'cube':
            value = np.max(absx, axis=-1)
        elif self.kind == 'lp_ball':
            # Масштабирование на максимум защищает от переполнения степеней
            top = np.max(absx, axis=-1)
            safe = np.where(top > 0, top, 1.0)
            value = top * np.sum((absx / safe[..., None]) ** self.p, axis=-1) ** (1.0 / self.p)
        elif self.kind == 'polytope':
            value = np.max(np.abs(pts @ self.normals.T), axis=-1)
        else:
            value = np.sqrt(np.maximum(np.einsum('...i,ij,...j->...', pts, self.matrix, pts), 0.0))
        return value / self.radius

    def radial(self, v) -> float:
        """Радиальная функция rho_K(v) = 1 / ||v||_K"""
        return 1.0 / float(self.norm(v))

    def support(self, v) -> float:
        """Опорная функция h_K(v) = max_{x in K} <x, v>"""
        u = np.asarray(v, dtype=float)
        if self.kind == 'euclidean_ball':
            return self.radius * float(np.linalg.norm(u))
        if self.kind == 'cube':
            return self.radius * float(np.sum(np.abs(u)))
        if self.kind == 'lp_ball':
            if self.p <= 1:
                return self.radius * float(np.max(np.abs(u)))
            q = self.p / (self.p - 1.0)
            return self.radius * float(np.sum(np.abs(u) ** q) ** (1.0 / q))
        if self.kind == 'ellipsoid':
            return float(math.sqrt(u @ np.linalg.solve(self.matrix, u)))
        return self._polytope_support(u)

    def _polytope_support(self, u: np.ndarray) -> float:
        a = self.normals
        result = linprog(-u, A_ub=np.vstack([a, -a]), b_ub=np.ones(2 * len(a)),
                         bounds=[(None, None)] * self.dim, method='highs')
        if not result.success:
            raise ValueError(f"Не удалось вычислить опорную функцию: {result.message}")
        return float(-result.fun)

    def _bounding_box(self) -> np.ndarray:
        if self.kind == 'ellipsoid':
            return np.sqrt(np.diag(np.linalg.inv(self.matrix)))
        if self.kind == 'polytope':
            return np.array([self._polytope_support(e) for e in np.eye(self.dim)])
        return np.full(self.dim, self.radius)

    @property
    def bounding_box(self) -> np.ndarray:
        """Полуширины ограничивающего параллелепипеда по координатам"""
        return self._box.copy()

    @property
    def bounding_radius(self) -> float:
        """
        Радиус R с K в R * B_2^n (для многогранника - оценка сверху по углу параллелепипеда)
        """
        n = self.dim
        if self.kind == 'euclidean_ball':
            return self.radius
        if self.kind == 'cube':
            return self.radius * math.sqrt(n)
        if self.kind == 'lp_ball':
            return self.radius * (n ** (0.5 - 1.0 / self.p) if self.p > 2 else 1.0)
        if self.kind == 'ellipsoid':
            return float(1.0 / math.sqrt(np.linalg.eigvalsh(self.matrix)[0]))
        return float(np.linalg.norm(self._box))

    def volume(self) -> Optional[float]:
        """Объем тела (None для многогранника)"""
        n = self.dim
        if self.kind == 'euclidean_ball':
            return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1.0)) * self.radius ** n
        if self.kind == 'cube':
            return (2.0 * self.radius) ** n
        if self.kind == 'lp_ball':
            return lp_ball_volume(n, self.p) * self.radius ** n
        if self.kind == 'ellipsoid':
            unit = math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1.0))
            return unit / math.sqrt(np.linalg.det(self.matrix))
        return None

    def dilate(self, factor: float) -> 'NormBody':
        """Тело factor * K"""
        if not factor > 0:
            raise ValueError("Коэффициент растяжения должен быть положительным")
        if factor == 1.0:
            return self
        if self.kind == 'polytope':
            return NormBody(self.dim, 'polytope', normals=self.normals / factor, source=self.source)
        if self.kind == 'ellipsoid':
            return NormBody(self.dim, 'ellipsoid', matrix=self.matrix / factor ** 2)
        return NormBody(self.dim, self.kind, p=self.p, radius=self.radius * factor)

    # ==================== ПРЕДСТАВЛЕНИЕ ====================

    @property
    def label(self) -> str:
        """Текстовое описание в синтаксисе мини-грамматики"""
        scale = '' if self.radius == 1.0 else f", {self.radius!r}"
        if self.kind == 'euclidean_ball':
            return f"ball({self.dim}{scale})"
        if self.kind == 'cube':
            return f"cube({self.dim}{scale})"
        if self.kind == 'lp_ball':
            return f"lp({self.dim}, {self.p!r}{scale})"
        if self.kind == 'polytope':
            return f"polytope(file={self.source})" if self.source else f"polytope({len(self.normals)} faces)"
        return f"ellipsoid({self.dim})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'label': self.label,
            'dim': self.dim,
            'kind': self.kind,
            'p': self.exponent,
            'radius': self.radius,
            'bounding_radius': self.bounding_radius
        }

    def __repr__(self) -> str:
        return f"NormBody({self.label})"


def lp_ball_volume(m: int, p: float) -> float:
    """Объем единичного шара l_p в R^m: (2 Gamma(1 + 1/p))^m / Gamma(1 + m/p)"""
    if m == 0:
        return 1.0
    if math.isinf(p):
        return 2.0 ** m
    return math.exp(m * (math.log(2.0) + gammaln(1.0 + 1.0 / p)) - gammaln(1.0 + m / p))
