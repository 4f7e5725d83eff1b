"""
Репозиторий радиальных профилей: конструкторы мини-грамматики и реестр примеров.
"""

from dataclasses import dataclass
from typing import Dict, List, Union

from models.radial_profile import (RadialProfile, admissible_omega_profile, exp_power, g_profile, mixture, power,
                                   profile_product, profile_scale, profile_sum, smoothed_truncated_power,
                                   truncated_power)
from repositories.base_repository import BaseRepository
from utils.errors import GrammarError
from utils.grammar import Call


@dataclass(frozen=True)
class Example:
    """Именованный пример: текст профиля, размерность и ожидаемый исход"""

    name: str
    text: str
    dim: int
    expectation: str


EXAMPLES: Dict[str, Example] = {e.name: e for e in [
    Example('truncated-power', 'truncated_power(-1.5, 1)', 3,
            "||x||_K^alpha chi_{||x||_K <= a}, alpha в (1-n, 2-n); разрыв в точке обрезки"),
    Example('smoothed-truncated-power', 'smoothed(-1.5, 1, 0.1)', 3,
            "Сглаженная усеченная степень; omega-теорема со снятием гипотезы (c)"),
    Example('norm-power', 'power(-2.5)', 3,
            "||x||_K^p при p в (-n, 1-n): положительно определена для любого K"),
    Example('admissible', 'admissible(3, -1.5)', 3,
            "t^alpha e^{-t}, alpha в (1-n, 2-n): все гипотезы omega-теоремы выполнены"),
    Example('g-3-3', 'g(3, 3)', 3,
            "g_{n,p}(r) = r^{1-n} e^{-r^p}: положительно определена при n >= 3 и всех p > 0"),
    Example('non-converse', 'exp_power(3)', 1,
            "e^{-|t|^p}, p > 2: не положительно определена уже на прямой"),
    Example('polya', 'exp_power(0.5)', 1,
            "e^{-|x|^p}, p <= 1: выпукла на (0, inf), критерий Пойа"),
]}


class ProfileRepository(BaseRepository[RadialProfile]):
    """Конструкторы профилей по имени"""

    def __init__(self):
        super().__init__('профиль')
        num = self._number
        sub = self._profile
        self.register('power', lambda a: power(num(a)), 'power(alpha)', "r^alpha")
        self.register('exp_power', lambda p: exp_power(num(p)), 'exp_power(p)', "e^{-r^p}")
        self.register('g', lambda n, p: g_profile(int(num(n)), num(p)), 'g(n, p)', "r^{1-n} e^{-r^p}")
        self.register('truncated_power', lambda a, cut: truncated_power(num(a), num(cut)),
                      'truncated_power(alpha, a)', "r^alpha chi_{r <= a}")
        self.register('smoothed', lambda a, cut, eps: smoothed_truncated_power(num(a), num(cut), num(eps)),
                      'smoothed(alpha, a, eps)', "r^alpha с линейным спуском на [a, a + eps]")
        self.register('admissible', lambda n, a: admissible_omega_profile(int(num(n)), num(a)),
                      'admissible(n, alpha)', "r^alpha e^{-r}")
        self.register('product', lambda f, g: profile_product(sub(f), sub(g)), 'product(f, g)', "f g")
        self.register('sum', lambda f, g: profile_sum(sub(f), sub(g)), 'sum(f, g)', "f + g")
        self.register('scale', lambda c, f: profile_scale(num(c), sub(f)), 'scale(c, f)', "c f")
        self.register('mixture', self._mixture, 'mixture(w1, f1, w2, f2, ...)', "sum w_i f_i, w_i >= 0")

    def create(self, text: str) -> RadialProfile:
        """Текст мини-грамматики или имя примера"""
        example = EXAMPLES.get(text.strip())
        return super().create(example.text if example else text)

    def _profile(self, arg: Union[float, Call]) -> RadialProfile:
        if not isinstance(arg, Call):
            raise GrammarError("Ожидался профиль", repr(arg))
        return self.build(arg)

    def _mixture(self, *args) -> RadialProfile:
        if not args or len(args) % 2:
            raise GrammarError("mixture ожидает пары (вес, профиль)", str(len(args)))
        return mixture([(self._number(w), self._profile(f)) for w, f in zip(args[::2], args[1::2])])

    def examples(self) -> List[Example]:
        return [EXAMPLES[name] for name in sorted(EXAMPLES)]
