"""
Модель радиального профиля f:(0, inf) -> R.
Хранит функцию, производную и аналитические метаданные, которые используют
проверки гипотез (показатель особенности в нуле, убывание, монотонность).
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import Config

ArrayFn = Callable[[np.ndarray], np.ndarray]

# Условное значение гладкости для C^infinity
SMOOTH = 99


@dataclass(frozen=True)
class Decay:
    """
    Поведение профиля на бесконечности.

    Attributes:
        kind: 'compact' | 'exponential' | 'polynomial' | 'unknown'
        parameter: радиус носителя, показатель растянутой экспоненты e^{-r^p}
            или показатель степени r^beta
    """

    kind: str = 'unknown'
    parameter: float = 0.0

    VALID_KINDS = ('compact', 'exponential', 'polynomial', 'unknown')

    def __post_init__(self):
        if self.kind not in self.VALID_KINDS:
            raise ValueError(f"Тип убывания должен быть одним из: {self.VALID_KINDS}")
        if self.kind == 'compact' and not self.parameter > 0:
            raise ValueError("Радиус компактного носителя должен быть положительным")

    @classmethod
    def compact(cls, radius: float) -> 'Decay':
        return cls('compact', float(radius))

    @classmethod
    def exponential(cls, rate: float) -> 'Decay':
        return cls('exponential', float(rate))

    @classmethod
    def polynomial(cls, exponent: float) -> 'Decay':
        return cls('polynomial', float(exponent))

    @property
    def support(self) -> float:
        """Радиус носителя (inf для некомпактных)"""
        return self.parameter if self.kind == 'compact' else math.inf

    def tends_to_zero(self) -> Optional[bool]:
        """Стремится ли профиль к нулю на бесконечности"""
        if self.kind in ('compact', 'exponential'):
            return True
        if self.kind == 'polynomial':
            return self.parameter < 0
        return None

    def integrable_with_weight(self, weight_exponent: float) -> Optional[bool]:
        """Интегрируемость f(r) r^w на [1, inf)"""
        if self.kind in ('compact', 'exponential'):
            return True
        if self.kind == 'polynomial':
            return self.parameter + weight_exponent < -1
        return None

    @staticmethod
    def slower(a: 'Decay', b: 'Decay') -> 'Decay':
        """Убывание суммы: более медленное из двух"""
        if 'unknown' in (a.kind, b.kind):
            return Decay()
        if a.kind == 'polynomial' and b.kind == 'polynomial':
            return Decay.polynomial(max(a.parameter, b.parameter))
        for kind in ('polynomial', 'exponential'):
            if a.kind == kind and b.kind == kind:
                return Decay.exponential(min(a.parameter, b.parameter))
            if a.kind == kind:
                return a
            if b.kind == kind:
                return b
        return Decay.compact(max(a.parameter, b.parameter))

    @staticmethod
    def faster(a: 'Decay', b: 'Decay') -> 'Decay':
        """Убывание произведения"""
        if a.kind == 'compact' and b.kind == 'compact':
            return Decay.compact(min(a.parameter, b.parameter))
        for d in (a, b):
            if d.kind == 'compact':
                return d
        if 'unknown' in (a.kind, b.kind):
            return Decay()
        if a.kind == 'exponential' and b.kind == 'exponential':
            return Decay.exponential(max(a.parameter, b.parameter))
        for d in (a, b):
            if d.kind == 'exponential':
                return d
        return Decay.polynomial(a.parameter + b.parameter)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'parameter': self.parameter}


@dataclass(frozen=True)
class RadialProfile:
    """
    Одномерный радиальный профиль с метаданными.

    Attributes:
        name: Текстовое описание (в синтаксисе мини-грамматики)
        value_fn: Векторизованная функция r -> f(r)
        deriv_fn: Аналитическая производная или None (центральная разность)
        singularity_exponent: gamma0: |f(r)| <= C r^gamma0 при r <= 1
        decay: Поведение на бесконечности
        monotone_nonincreasing: True / False / None (неизвестно)
        nonnegative: True / False / None
        even_smoothness: Число непрерывных производных четного продолжения (-1: разрыв)
        bound_constant: Константа C в оценке около нуля
        absolutely_continuous: Абсолютно непрерывен ли профиль на (0, inf)
        breakpoints: Точки излома или разрыва на (0, inf)
    """

    name: str
    value_fn: ArrayFn
    deriv_fn: Optional[ArrayFn] = None
    singularity_exponent: float = 0.0
    decay: Decay = field(default_factory=Decay)
    monotone_nonincreasing: Optional[bool] = None
    nonnegative: Optional[bool] = None
    even_smoothness: int = 0
    bound_constant: float = 1.0
    absolutely_continuous: bool = True
    breakpoints: Tuple[float, ...] = ()

    def eval(self, r) -> np.ndarray:
        """Значения профиля (векторизованно)"""
        x = np.asarray(r, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            return np.asarray(self.value_fn(x), dtype=float) + np.zeros_like(x)

    def __call__(self, r) -> np.ndarray:
        return self.eval(r)

    @property
    def has_analytic_derivative(self) -> bool:
        return self.deriv_fn is not None

    def deriv(self, r, allow_finite_difference: bool = True) -> np.ndarray:
        """
        Производная профиля.

        Args:
            r: Точки r > 0
            allow_finite_difference: Разрешить центральную разность при отсутствии аналитической

        Raises:
            ValueError: Если производной нет и разность запрещена
        """
        x = np.asarray(r, dtype=float)
        if self.deriv_fn is not None:
            with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
                return np.asarray(self.deriv_fn(x), dtype=float) + np.zeros_like(x)
        if not allow_finite_difference:
            raise ValueError(f"У профиля {self.name} нет аналитической производной")
        h = Config.FD_STEP * np.maximum(x, 1.0)
        h = np.minimum(h, 0.5 * x)
        return (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)

    @property
    def support(self) -> float:
        return self.decay.support

    @property
    def decays(self) -> Optional[bool]:
        return self.decay.tends_to_zero()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'singularity_exponent': self.singularity_exponent,
            'decay': self.decay.to_dict(),
            'monotone_nonincreasing': self.monotone_nonincreasing,
            'nonnegative': self.nonnegative,
            'even_smoothness': self.even_smoothness,
            'absolutely_continuous': self.absolutely_continuous,
            'breakpoints': list(self.breakpoints)
        }

    @classmethod
    def from_callable(cls, func: ArrayFn, name: str = 'custom',
                      singularity_exponent: float = 0.0,
                      decay: Optional[Decay] = None,
                      monotone_nonincreasing: Optional[bool] = None,
                      nonnegative: Optional[bool] = None,
                      deriv: Optional[ArrayFn] = None,
                      even_smoothness: int = 0,
                      breakpoints: Sequence[float] = ()) -> 'RadialProfile':
        """
        Профиль из произвольной функции с заявленными метаданными.

        Returns:
            Объект RadialProfile (производная по центральной разности, если не задана)
        """
        return cls(
            name=name,
            value_fn=func,
            deriv_fn=deriv,
            singularity_exponent=float(singularity_exponent),
            decay=decay or Decay(),
            monotone_nonincreasing=monotone_nonincreasing,
            nonnegative=nonnegative,
            even_smoothness=even_smoothness,
            breakpoints=tuple(float(b) for b in breakpoints)
        )

    def __repr__(self) -> str:
        return f"RadialProfile({self.name})"


# ==================== ВСТРОЕННЫЕ ПРОФИЛИ ====================

def _power_smoothness(alpha: float) -> int:
    if alpha < 0:
        return -1
    if float(alpha).is_integer() and int(alpha) % 2 == 0:
        return SMOOTH
    return int(math.ceil(alpha)) - 1


def _fmt(x: float) -> str:
    return repr(float(x))


def power(alpha: float) -> RadialProfile:
    """r^alpha"""
    a = float(alpha)
    return RadialProfile(
        name=f"power({_fmt(a)})",
        value_fn=lambda r: r ** a,
        deriv_fn=lambda r: a * r ** (a - 1.0),
        singularity_exponent=a,
        decay=Decay.polynomial(a),
        monotone_nonincreasing=a <= 0,
        nonnegative=True,
        even_smoothness=_power_smoothness(a)
    )


def exp_power(p: float) -> RadialProfile:
    """e^{-r^p}"""
    q = float(p)
    if q <= 0:
        raise ValueError("Показатель p должен быть положительным")
    return RadialProfile(
        name=f"exp_power({_fmt(q)})",
        value_fn=lambda r: np.exp(-r ** q),
        deriv_fn=lambda r: -q * r ** (q - 1.0) * np.exp(-r ** q),
        singularity_exponent=0.0,
        decay=Decay.exponential(q),
        monotone_nonincreasing=True,
        nonnegative=True,
        even_smoothness=_power_smoothness(q)
    )


def g_profile(n: int, p: float) -> RadialProfile:
    """g_{n,p}(r) = r^{1-n} e^{-r^p}"""
    dim, q = int(n), float(p)
    if dim < 1 or q <= 0:
        raise ValueError("Требуется n >= 1 и p > 0")
    return RadialProfile(
        name=f"g({dim}, {_fmt(q)})",
        value_fn=lambda r: r ** (1.0 - dim) * np.exp(-r ** q),
        deriv_fn=lambda r: ((1.0 - dim) * r ** (-dim) - q * r ** (q - dim)) * np.exp(-r ** q),
        singularity_exponent=1.0 - dim,
        decay=Decay.exponential(q),
        monotone_nonincreasing=True,
        nonnegative=True,
        even_smoothness=_power_smoothness(q) if dim == 1 else -1
    )


def truncated_power(alpha: float, a: float) -> RadialProfile:
    """r^alpha * chi_{r <= a} (разрыв в точке a)"""
    al, cut = float(alpha), float(a)
    if cut <= 0:
        raise ValueError("Точка обрезки должна быть положительной")
    return RadialProfile(
        name=f"truncated_power({_fmt(al)}, {_fmt(cut)})",
        value_fn=lambda r: np.where(r <= cut, r ** al, 0.0),
        deriv_fn=lambda r: np.where(r < cut, al * r ** (al - 1.0), 0.0),
        singularity_exponent=al,
        decay=Decay.compact(cut),
        monotone_nonincreasing=al <= 0,
        nonnegative=True,
        even_smoothness=-1,
        absolutely_continuous=False,
        breakpoints=(cut,)
    )


def smoothed_truncated_power(alpha: float, a: float, eps: float) -> RadialProfile:
    """r^alpha с линейным спуском к нулю на [a, a + eps]"""
    al, cut, width = float(alpha), float(a), float(eps)
    if cut <= 0 or width <= 0:
        raise ValueError("Требуется a > 0 и eps > 0")

    def ramp(r):
        return np.clip((cut + width - r) / width, 0.0, 1.0)

    def deriv(r):
        on_ramp = (r > cut) & (r < cut + width)
        return al * r ** (al - 1.0) * ramp(r) - np.where(on_ramp, r ** al / width, 0.0)

    return RadialProfile(
        name=f"smoothed({_fmt(al)}, {_fmt(cut)}, {_fmt(width)})",
        value_fn=lambda r: r ** al * ramp(r),
        deriv_fn=deriv,
        singularity_exponent=al,
        decay=Decay.compact(cut + width),
        monotone_nonincreasing=al <= 0,
        nonnegative=True,
        even_smoothness=-1 if al < 0 else min(_power_smoothness(al), 0),
        breakpoints=(cut, cut + width)
    )


def admissible_omega_profile(n: int, alpha: float) -> RadialProfile:
    """r^alpha e^{-r} при alpha в (1-n, 2-n)"""
    dim, al = int(n), float(alpha)
    if not (1 - dim < al < 2 - dim):
        raise ValueError(f"alpha должно лежать в ({1 - dim}, {2 - dim})")
    return RadialProfile(
        name=f"admissible({dim}, {_fmt(al)})",
        value_fn=lambda r: r ** al * np.exp(-r),
        deriv_fn=lambda r: (al * r ** (al - 1.0) - r ** al) * np.exp(-r),
        singularity_exponent=al,
        decay=Decay.exponential(1.0),
        monotone_nonincreasing=al <= 0,
        nonnegative=True,
        even_smoothness=_power_smoothness(al)
    )


# ==================== КОМБИНАТОРЫ ====================

def _both_true(*flags: Optional[bool]) -> Optional[bool]:
    if all(f is True for f in flags):
        return True
    return None


def profile_sum(f: RadialProfile, g: RadialProfile) -> RadialProfile:
    """f + g"""
    return mixture([(1.0, f), (1.0, g)], name=f"sum({f.name}, {g.name})")


def profile_scale(c: float, f: RadialProfile) -> RadialProfile:
    """c * f"""
    k = float(c)
    deriv = None if f.deriv_fn is None else (lambda r: k * f.deriv_fn(r))
    if k > 0:
        monotone, nonneg = f.monotone_nonincreasing, f.nonnegative
    elif k == 0:
        monotone, nonneg = True, True
    else:
        monotone = None
        nonneg = False if f.nonnegative else None
    return RadialProfile(
        name=f"scale({_fmt(k)}, {f.name})",
        value_fn=lambda r: k * f.value_fn(r),
        deriv_fn=deriv,
        singularity_exponent=f.singularity_exponent,
        decay=f.decay,
        monotone_nonincreasing=monotone,
        nonnegative=nonneg,
        even_smoothness=f.even_smoothness,
        bound_constant=abs(k) * f.bound_constant,
        absolutely_continuous=f.absolutely_continuous,
        breakpoints=f.breakpoints
    )


def profile_product(f: RadialProfile, g: RadialProfile) -> RadialProfile:
    """f * g"""
    if f.deriv_fn is not None and g.deriv_fn is not None:
        def deriv(r):
            return f.deriv_fn(r) * g.value_fn(r) + f.value_fn(r) * g.deriv_fn(r)
    else:
        deriv = None
    nonneg = _both_true(f.nonnegative, g.nonnegative)
    monotone = _both_true(f.monotone_nonincreasing, g.monotone_nonincreasing, nonneg)
    return RadialProfile(
        name=f"product({f.name}, {g.name})",
        value_fn=lambda r: f.value_fn(r) * g.value_fn(r),
        deriv_fn=deriv,
        singularity_exponent=f.singularity_exponent + g.singularity_exponent,
        decay=Decay.faster(f.decay, g.decay),
        monotone_nonincreasing=monotone,
        nonnegative=nonneg,
        even_smoothness=min(f.even_smoothness, g.even_smoothness),
        bound_constant=f.bound_constant * g.bound_constant,
        absolutely_continuous=f.absolutely_continuous and g.absolutely_continuous,
        breakpoints=tuple(sorted(set(f.breakpoints) | set(g.breakpoints)))
    )


def mixture(components: Sequence[Tuple[float, RadialProfile]], name: Optional[str] = None) -> RadialProfile:
    """
    Неотрицательная комбинация профилей sum w_i f_i.

    Args:
        components: Список пар (вес >= 0, профиль)
        name: Имя результата (по умолчанию mixture(...))

    Raises:
        ValueError: При пустом списке или отрицательном весе
    """
    items: List[Tuple[float, RadialProfile]] = [(float(w), f) for w, f in components]
    if not items:
        raise ValueError("Смесь должна содержать хотя бы один профиль")
    if any(w < 0 for w, _ in items):
        raise ValueError("Веса смеси должны быть неотрицательными")

    def value(r):
        return sum(w * f.value_fn(r) for w, f in items)

    if all(f.deriv_fn is not None for _, f in items):
        def deriv(r):
            return sum(w * f.deriv_fn(r) for w, f in items)
    else:
        deriv = None

    decay = items[0][1].decay
    for _, f in items[1:]:
        decay = Decay.slower(decay, f.decay)

    if name is None:
        name = "mixture(" + ", ".join(f"{_fmt(w)}, {f.name}" for w, f in items) + ")"
    return RadialProfile(
        name=name,
        value_fn=value,
        deriv_fn=deriv,
        singularity_exponent=min(f.singularity_exponent for _, f in items),
        decay=decay,
        monotone_nonincreasing=_both_true(*(f.monotone_nonincreasing for _, f in items)),
        nonnegative=_both_true(*(f.nonnegative for _, f in items)),
        even_smoothness=min(f.even_smoothness for _, f in items),
        bound_constant=sum(w * f.bound_constant for w, f in items),
        absolutely_continuous=all(f.absolutely_continuous for _, f in items),
        breakpoints=tuple(sorted(set().union(*(f.breakpoints for _, f in items))))
    )
