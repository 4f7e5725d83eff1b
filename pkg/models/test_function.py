"""
Модель пробной функции: пара гауссиан или одна центрированная гауссиана
с аналитическими преобразованиями Фурье и Радона.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

from models.radial_profile import SMOOTH, Decay, RadialProfile
from utils.helpers import stream


@dataclass(frozen=True, eq=False)
class TestFunction:
    """
    phi(x) = A [G(x - c) + G(x + c)] (пара) или A G(x) (одна), G(x) = exp(-|x|^2 / (2 sigma^2)).

    Attributes:
        dim: Размерность n
        center: Центр c (для одной гауссианы - ноль)
        sigma: Ширина > 0
        amplitude: Амплитуда A > 0
        paired: Пара гауссиан или одна
    """

    __test__ = False  # не тестовый класс pytest

    dim: int
    center: np.ndarray
    sigma: float = 1.0
    amplitude: float = 1.0
    paired: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'center', np.asarray(self.center, dtype=float).reshape(-1))
        self.validate()

    def validate(self) -> bool:
        """
        Raises:
            ValueError: При некорректной размерности, ширине или амплитуде
        """
        if self.dim < 1:
            raise ValueError("Размерность должна быть >= 1")
        if self.center.shape != (self.dim,):
            raise ValueError(f"Центр должен иметь размерность {self.dim}")
        if not self.sigma > 0:
            raise ValueError("Ширина sigma должна быть положительной")
        if not self.amplitude > 0:
            raise ValueError("Амплитуда должна быть положительной")
        if not self.paired and np.any(self.center != 0):
            raise ValueError("Одиночная гауссиана должна быть центрирована")
        return True

    @classmethod
    def gaussian(cls, dim: int, sigma: float = 1.0, amplitude: float = 1.0) -> 'TestFunction':
        return cls(dim, np.zeros(dim), sigma, amplitude, paired=False)

    @classmethod
    def gaussian_pair(cls, center, sigma: float = 1.0, amplitude: float = 1.0) -> 'TestFunction':
        c = np.asarray(center, dtype=float).reshape(-1)
        return cls(len(c), c, sigma, amplitude, paired=True)

    @classmethod
    def battery(cls, dim: int, size: int, seed: int) -> List['TestFunction']:
        """Набор пар гауссиан: sigma ~ U[0.5, 1.5], c ~ U[-2, 2]^n, генератор на каждый элемент"""
        items = []
        for i in range(size):
            rng = stream(seed, i)
            sigma = float(rng.uniform(0.5, 1.5))
            center = rng.uniform(-2.0, 2.0, size=dim)
            items.append(cls.gaussian_pair(center, sigma))
        return items

    @property
    def kind(self) -> str:
        return 'gaussian_pair' if self.paired else 'gaussian'

    @property
    def multiplicity(self) -> float:
        return 2.0 if self.paired else 1.0

    # ==================== ЗНАЧЕНИЯ ====================

    def _g(self, sq):
        return np.exp(-sq / (2.0 * self.sigma ** 2))

    def eval(self, x) -> np.ndarray:
        """phi(x) для точек (..., n)"""
        pts = np.asarray(x, dtype=float)
        if not self.paired:
            return self.amplitude * self._g(np.sum(pts * pts, axis=-1))
        minus = pts - self.center
        plus = pts + self.center
        return self.amplitude * (self._g(np.sum(minus * minus, axis=-1)) + self._g(np.sum(plus * plus, axis=-1)))

    def ft(self, xi) -> np.ndarray:
        """
        phi^(xi) = m A (2 pi)^{n/2} sigma^n cos(<c, xi>) exp(-sigma^2 |xi|^2 / 2),
        m = 2 для пары и 1 для одиночной гауссианы.
        """
        x = np.asarray(xi, dtype=float)
        n, s = self.dim, self.sigma
        envelope = np.exp(-0.5 * s * s * np.sum(x * x, axis=-1))
        scale = self.multiplicity * self.amplitude * (2.0 * math.pi) ** (0.5 * n) * s ** n
        return scale * np.cos(x @ self.center) * envelope

    def l1_norm(self) -> float:
        """||phi||_1 = m A (2 pi sigma^2)^{n/2}"""
        return self.multiplicity * self.amplitude * (2.0 * math.pi * self.sigma ** 2) ** (0.5 * self.dim)

    def radon(self, v, t) -> np.ndarray:
        """R phi(v, t) = A (2 pi sigma^2)^{(n-1)/2} [g(t - p) + g(t + p)], p = <c, v>"""
        u = np.asarray(v, dtype=float)
        ts = np.asarray(t, dtype=float)
        scale = self.amplitude * (2.0 * math.pi * self.sigma ** 2) ** (0.5 * (self.dim - 1))
        if not self.paired:
            return scale * self._g(ts * ts)
        p = float(u @ self.center)
        return scale * (self._g((ts - p) ** 2) + self._g((ts + p) ** 2))

    # ==================== ПРОФИЛИ ====================

    def radon_profile(self, v) -> RadialProfile:
        """t -> R phi(v, t) как четный профиль на (0, inf)"""
        u = np.asarray(v, dtype=float)
        return RadialProfile(
            name=f"radon({self.kind}, v={np.round(u, 6).tolist()})",
            value_fn=lambda t: self.radon(u, t),
            singularity_exponent=0.0,
            decay=Decay.exponential(2.0),
            monotone_nonincreasing=None if self.paired else True,
            nonnegative=True,
            even_smoothness=SMOOTH
        )

    def radial_profile(self) -> RadialProfile:
        """Радиальный профиль delta_0(rho) одиночной гауссианы"""
        if self.paired:
            raise ValueError("Пара гауссиан не является радиальной функцией")
        s2 = self.sigma ** 2
        a = self.amplitude
        return RadialProfile(
            name=f"gaussian(sigma={self.sigma!r})",
            value_fn=lambda r: a * np.exp(-r * r / (2.0 * s2)),
            deriv_fn=lambda r: -a * r / s2 * np.exp(-r * r / (2.0 * s2)),
            singularity_exponent=0.0,
            decay=Decay.exponential(2.0),
            monotone_nonincreasing=True,
            nonnegative=True,
            even_smoothness=SMOOTH
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'dim': self.dim,
            'center': self.center.tolist(),
            'sigma': self.sigma,
            'amplitude': self.amplitude
        }
