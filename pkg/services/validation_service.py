"""
Сервис валидации параметров команд.
Собирает все ошибки диапазонов и сообщает о них одним исключением.
"""

from typing import Any, Dict, List, Sequence


class ValidationService:
    """
    Проверка параметров команд CLI до запуска вычислений.
    """

    MAX_DIM = 60
    BRANCHES = (1, 2, 3)
    FORMATS = ('csv', 'json')

    def _common(self, data: Dict[str, Any], errors: List[str]) -> None:
        """Параметры, общие для всех команд"""
        n = data.get('n')
        if n is not None and (not isinstance(n, int) or not 1 <= n <= self.MAX_DIM):
            errors.append(f"Размерность n должна быть целым числом от 1 до {self.MAX_DIM}")

        tol = data.get('tol')
        if tol is not None and not tol > 0:
            errors.append("Допуск tol должен быть положительным")

        seed = data.get('seed')
        if seed is not None and seed < 0:
            errors.append("Сид должен быть неотрицательным")

        samples = data.get('samples')
        if samples is not None and samples < 2:
            errors.append("Бюджет Монте-Карло должен быть не меньше 2")

        fmt = data.get('format')
        if fmt is not None and fmt not in self.FORMATS:
            errors.append(f"Формат должен быть одним из: {self.FORMATS}")

    @staticmethod
    def _raise(errors: List[str]) -> bool:
        if errors:
            raise ValueError("\n".join(errors))
        return True

    def validate_transform(self, data: Dict[str, Any]) -> bool:
        """
        Валидация параметров преобразования.

        Raises:
            ValueError: При некорректных данных
        """
        errors: List[str] = []
        if not data.get('profile'):
            errors.append("Поле 'profile' обязательно")
        self._common(data, errors)
        return self._raise(errors)

    def validate_check(self, criterion: str, data: Dict[str, Any]) -> bool:
        """
        Валидация параметров проверки критерия.

        Args:
            criterion: thm-decreasing | thm-omega | thm-convex | polya | gram | lemma1
            data: Параметры

        Raises:
            ValueError: При некорректных данных
        """
        errors: List[str] = []
        self._common(data, errors)

        if criterion == 'thm-decreasing':
            if data.get('branch') not in (1, 2):
                errors.append("Ветвь должна быть 1 или 2")
        elif criterion == 'thm-omega':
            battery = data.get('battery')
            if battery is not None and battery < 1:
                errors.append("Размер батареи должен быть положительным")
            routes = data.get('routes') or ()
            if isinstance(routes, str):
                routes = [r.strip() for r in routes.split(',') if r.strip()]
            unknown = [r for r in routes if r not in ('direct', 'sectional')]
            if unknown or not routes:
                errors.append("Маршруты: непустой набор из 'direct', 'sectional'")
        elif criterion == 'gram':
            points = data.get('points')
            if not points:
                errors.append("Поле 'points' обязательно")
        elif criterion == 'lemma1':
            if data.get('branch') not in self.BRANCHES:
                errors.append(f"Ветвь должна быть одной из: {self.BRANCHES}")

        return self._raise(errors)

    def validate_identity(self, identity: str, data: Dict[str, Any]) -> bool:
        """
        Raises:
            ValueError: При некорректных данных
        """
        errors: List[str] = []
        self._common(data, errors)

        trials = data.get('trials')
        if trials is not None and trials < 1:
            errors.append("Число испытаний должно быть положительным")
        pairs = data.get('pairs')
        if pairs is not None and pairs < 1:
            errors.append("Число пар должно быть положительным")
        threshold = data.get('threshold')
        if threshold is not None and not threshold > 0:
            errors.append("Порог невязки должен быть положительным")
        if identity == 'radon-average' and data.get('n') is not None and data['n'] < 3:
            errors.append("Тождество усреднения Радона проверяется при n >= 3")
        factor = data.get('factor')
        if factor is not None and not factor > 0:
            errors.append("Коэффициент растяжения должен быть положительным")

        return self._raise(errors)

    def validate_sweep(self, data: Dict[str, Any], grids: Dict[str, Sequence[float]]) -> bool:
        """
        Args:
            data: Параметры
            grids: Разобранные сетки параметров по именам

        Raises:
            ValueError: Пустая сетка или значения вне диапазона
        """
        errors: List[str] = []
        self._common(data, errors)
        for name, values in grids.items():
            if len(values) == 0:
                errors.append(f"Сетка '{name}' не может быть пустой")
            elif min(values) <= 0:
                errors.append(f"Значения сетки '{name}' должны быть положительными")
        q = grids.get('q')
        if q is not None and len(q) and max(q) > 4:
            errors.append("Показатель q должен лежать в (0, 4]")
        return self._raise(errors)

