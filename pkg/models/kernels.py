"""
Ядра и входные данные критериев: F = f(||.||_K) для матриц Грама,
косинусное ядро, стопки тел (layer-cake) и радиальные веса psi.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from models.norm_body import NormBody
from models.radial_profile import RadialProfile


@dataclass(frozen=True, eq=False)
class NormKernel:
    """F(x) = f(||x||_K)"""

    profile: RadialProfile
    body: NormBody

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def name(self) -> str:
        return f"{self.profile.name} o ||.||_{self.body.label}"

    def __call__(self, x) -> np.ndarray:
        return self.profile.eval(self.body.norm(x))

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': 'norm', 'profile': self.profile.name, 'body': self.body.label}


@dataclass(frozen=True, eq=False)
class CosineKernel:
    """F(x) = cos(<x, u>): матрица Грама ранга 2"""

    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'direction', np.asarray(self.direction, dtype=float).reshape(-1))
        if not np.all(np.isfinite(self.direction)):
            raise ValueError("Направление должно быть конечным")

    @property
    def dim(self) -> int:
        return len(self.direction)

    @property
    def name(self) -> str:
        return f"cos(<x, {self.direction.tolist()}>)"

    def __call__(self, x) -> np.ndarray:
        return np.cos(np.asarray(x, dtype=float) @ self.direction)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': 'cosine', 'direction': self.direction.tolist()}


@dataclass
class BodyStack:
    """
    Конечная стопка индикаторов: phi = sum_j w_j chi_{K_j}, w_j > 0.

    Attributes:
        layers: Пары (вес, тело) одной размерности
    """

    layers: List[Tuple[float, NormBody]] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self) -> bool:
        """
        Raises:
            ValueError: Пустая стопка, неположительный вес или разные размерности
        """
        if not self.layers:
            raise ValueError("Стопка тел не может быть пустой")
        dims = {body.dim for _, body in self.layers}
        if len(dims) != 1:
            raise ValueError("Все тела стопки должны иметь одну размерность")
        for weight, _ in self.layers:
            if not weight > 0 or not math.isfinite(weight):
                raise ValueError("Веса стопки должны быть положительными")
        return True

    @classmethod
    def single(cls, body: NormBody) -> 'BodyStack':
        return cls([(1.0, body)])

    @property
    def dim(self) -> int:
        return self.layers[0][1].dim

    @property
    def is_convex(self) -> bool:
        return all(body.is_convex for _, body in self.layers)

    @property
    def label(self) -> str:
        return ' + '.join(f"{w:g}*{body.label}" for w, body in self.layers)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return sum(w * (body.norm(x) <= 1.0) for w, body in self.layers)

    def to_dict(self) -> Dict[str, Any]:
        return {'layers': [{'weight': w, 'body': body.label} for w, body in self.layers]}


@dataclass
class RadialWeight:
    """
    Четная радиально убывающая функция psi: стопка индикаторов центрированных шаров
    sum_j w_j chi_{|x| <= r_j} или гауссиана exp(-|x|^2 / (2 sigma^2)).

    Attributes:
        kind: 'balls' | 'gaussian'
        balls: Пары (вес, радиус) для kind='balls'
        sigma: Ширина для kind='gaussian'
    """

    kind: str
    balls: List[Tuple[float, float]] = field(default_factory=list)
    sigma: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> bool:
        if self.kind not in ('balls', 'gaussian'):
            raise ValueError("Вид psi должен быть 'balls' или 'gaussian'")
        if self.kind == 'balls':
            if not self.balls:
                raise ValueError("Нужен хотя бы один шар")
            if any(not w > 0 or not r > 0 for w, r in self.balls):
                raise ValueError("Веса и радиусы шаров должны быть положительными")
        if not self.sigma > 0:
            raise ValueError("sigma должна быть положительной")
        return True

    @classmethod
    def ball(cls, radius: float = 1.0) -> 'RadialWeight':
        return cls('balls', [(1.0, radius)])

    @classmethod
    def ball_stack(cls, balls: Sequence[Tuple[float, float]]) -> 'RadialWeight':
        return cls('balls', [(float(w), float(r)) for w, r in balls])

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> 'RadialWeight':
        return cls('gaussian', sigma=sigma)

    @property
    def label(self) -> str:
        if self.kind == 'gaussian':
            return f"gaussian({self.sigma:g})"
        return ' + '.join(f"{w:g}*ball({r:g})" for w, r in self.balls)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'balls': [list(b) for b in self.balls], 'sigma': self.sigma}

