"""
Консольный интерфейс инструмента проверки положительной определенности.
Машиночитаемый вывод (CSV/JSON) идет в stdout или файл, сводка для человека - в stderr.
"""

import functools
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
import numpy as np

# Для цветного вывода в консоль
try:
    from colorama import Fore, Style, init

    init(autoreset=True)
    COLORS_AVAILABLE = True
except ImportError:
    # Заглушки, если colorama не установлена
    class Fore:
        RED = GREEN = YELLOW = CYAN = WHITE = RESET = ''


    class Style:
        BRIGHT = NORMAL = RESET_ALL = ''


    COLORS_AVAILABLE = False

# Для форматирования таблиц
try:
    from tabulate import tabulate

    TABULATE_AVAILABLE = True
except ImportError:
    TABULATE_AVAILABLE = False

from config import Config
from models.kernels import CosineKernel, NormKernel
from models.run_config import RunConfig
from models.test_function import TestFunction
from models.verdict import Classification, Verdict
from repositories.body_repository import BodyRepository
from repositories.profile_repository import ProfileRepository
from services.criteria_service import CriteriaService
from services.report_service import ReportService
from services.validation_service import ValidationService
from utils.errors import ConvergenceError, GrammarError
from utils.grammar import Call, parse_expression, parse_grid, parse_points, parse_range
from utils.helpers import log_grid, stream

logger = logging.getLogger(__name__)

DEFAULT_GRID = 'log:0.01:50:200'


class Console:
    """Сводки для человека в stderr"""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def _echo(self, text: str):
        if not self.quiet:
            click.echo(text, err=True)

    def print_header(self, title: str):
        """Вывод заголовка с оформлением"""
        self._echo("=" * 70)
        self._echo(f"   {title}")
        self._echo("=" * 70)

    def print_success(self, message: str):
        """Вывод сообщения об успехе зеленым цветом"""
        if COLORS_AVAILABLE:
            self._echo(f"{Fore.GREEN}✓ {message}{Style.RESET_ALL}")
        else:
            self._echo(f"[OK] {message}")

    def print_error(self, message: str):
        """Вывод сообщения об ошибке красным цветом (даже в тихом режиме)"""
        if COLORS_AVAILABLE:
            click.echo(f"{Fore.RED}✗ {message}{Style.RESET_ALL}", err=True)
        else:
            click.echo(f"[ERROR] {message}", err=True)

    def print_warning(self, message: str):
        """Вывод предупреждения желтым цветом"""
        if COLORS_AVAILABLE:
            self._echo(f"{Fore.YELLOW}⚠ {message}{Style.RESET_ALL}")
        else:
            self._echo(f"[WARN] {message}")

    def print_info(self, message: str):
        """Вывод информационного сообщения синим цветом"""
        if COLORS_AVAILABLE:
            self._echo(f"{Fore.CYAN}ℹ {message}{Style.RESET_ALL}")
        else:
            self._echo(f"[INFO] {message}")

    def print_table(self, data: List[Dict], headers: Dict[str, str]):
        """
        Вывод данных в виде таблицы

        Args:
            data: Список словарей с данными
            headers: Словарь {поле_в_данных: заголовок_колонки}
        """
        if not data:
            self.print_warning("Нет данных для отображения")
            return

        table_data = []
        for row in data:
            table_row = []
            for field in headers.keys():
                value = row.get(field, '')
                if isinstance(value, bool):
                    value = "✓" if value else "✗"
                elif value is None:
                    value = "-"
                elif isinstance(value, float):
                    value = f"{value:.6g}"
                table_row.append(value)
            table_data.append(table_row)

        if TABULATE_AVAILABLE:
            self._echo(tabulate(table_data, headers=list(headers.values()), tablefmt="grid", stralign="left"))
        else:
            for i, row in enumerate(table_data, 1):
                self._echo(f"--- Запись {i} ---")
                for header, value in zip(headers.values(), row):
                    self._echo(f"  {header}: {value}")

    def print_verdict(self, verdict: Verdict):
        """Классификация, гипотезы, минимум и свидетель"""
        self.print_header(verdict.check)
        self.print_table([h.to_dict() for h in verdict.hypotheses],
                         {'name': 'Гипотеза', 'satisfied': 'Выполнена', 'waived': 'Снята', 'margin': 'Запас'})
        message = f"{verdict.classification.value}"
        if verdict.min_value is not None:
            message += f": min = {verdict.min_value:.6g}, допуск = {verdict.tolerance:.3g}"
        if verdict.classification == Classification.POSITIVE_NUMERIC:
            self.print_success(message)
        elif verdict.classification == Classification.VIOLATION_FOUND:
            self.print_error(message)
            self.print_info(f"Свидетель: {verdict.witness}")
        else:
            self.print_warning(message)
            for h in verdict.failed_hypotheses:
                self.print_info(f"Не выполнена: {h.name}")


class CLIApp:
    """
    Связывает репозитории, сервисы и вывод.
    Каждый метод run_* возвращает (текст артефакта, код возврата).
    """

    def __init__(self, quiet: bool = False):
        """Инициализация сервисов"""
        self.console = Console(quiet)
        self.criteria = CriteriaService()
        self.transforms = self.criteria.transforms
        self.reports = ReportService()
        self.validation = ValidationService()

        # Инициализация репозиториев
        self.profiles = ProfileRepository()
        self.bodies = BodyRepository()

    # ==================== ПРЕОБРАЗОВАНИЕ ====================

    def run_transform(self, run: RunConfig) -> Tuple[str, int]:
        p = run.params
        self.validation.validate_transform(p)
        profile = self.profiles.create(p['profile'])
        grid = parse_grid(p['grid'])
        results = self.transforms.transform_grid(profile, p['n'], grid, p['tol'])
        rows = [(xi, r.value, r.error_estimate, r.converged) for xi, r in zip(grid, results)]
        payload = {'profile': profile.to_dict(), 'n': p['n'], 'grid': grid.to_dict(),
                   'rows': [dict(zip(('xi', 'value', 'error_estimate', 'converged'), row)) for row in rows]}
        text = self.reports.render(p['format'], ('xi', 'value', 'error_estimate', 'converged'), rows, payload, run)

        failed = sum(1 for r in results if not r.converged)
        self.console.print_header(f"FT[{profile.name}], n = {p['n']}")
        step = max(1, len(rows) // 10)
        self.console.print_table(payload['rows'][::step],
                                 {'xi': 'xi', 'value': 'Значение', 'error_estimate': 'Погрешность',
                                  'converged': 'Сошлось'})
        lowest = min(rows, key=lambda row: row[1])
        self.console.print_info(f"Минимум {lowest[1]:.6g} при xi = {lowest[0]:.6g}")
        if failed:
            self.console.print_warning(f"Не сошлось строк: {failed} из {len(rows)}")
            return text, Config.EXIT_CODES['NOT_CONVERGED']
        self.console.print_success(f"Все {len(rows)} строк сошлись")
        return text, Config.EXIT_CODES['POSITIVE_NUMERIC']

    # ==================== ВЕРДИКТЫ ====================

    def _verdict(self, run: RunConfig, verdict: Verdict) -> Tuple[str, int]:
        headers = ('check', 'classification', 'min_value', 'tolerance', 'witness')
        row = (verdict.check, verdict.classification.value, verdict.min_value, verdict.tolerance, verdict.witness)
        text = self.reports.render(run.params.get('format', 'json'), headers, [row], verdict.to_dict(), run)
        self.console.print_verdict(verdict)
        return text, verdict.exit_code

    def run_check(self, criterion: str, run: RunConfig) -> Tuple[str, int]:
        p = run.params
        self.validation.validate_check(criterion, p)
        if criterion == 'thm-decreasing':
            grid = parse_grid(p['grid'])
            verdict = self.criteria.verify_thm_decreasing(self.profiles.create(p['profile']), p['n'],
                                                          p['branch'], grid, p['tol'])
        elif criterion == 'thm-omega':
            body = self.bodies.create(p['body'])
            battery = TestFunction.battery(body.dim, p['battery'], p['seed'])
            verdict = self.criteria.verify_thm_omega(self.profiles.create(p['profile']), body, battery, p['tol'],
                                                     p['samples'], p['seed'], _names(p['waive']),
                                                     _names(p['routes']))
        elif criterion == 'thm-convex':
            verdict = self.criteria.verify_thm_convex(self.bodies.create_stack(p['phi']),
                                                      self.bodies.create_weight(p['psi']),
                                                      p['alpha'], p['tol'], p['samples'], p['seed'])
        elif criterion == 'polya':
            verdict = self.criteria.polya_verdict(self.profiles.create(p['profile']), parse_grid(p['grid']),
                                                  p['tol'])
        elif criterion == 'gram':
            spec = parse_points(p['points'], p['n'], p['seed'])
            verdict = self.criteria.gram_test(self._kernel(p['function'], p['body'], p['n']), spec, p['tol'])
        elif criterion == 'lemma1':
            verdict = self.criteria.lemma1_pairing(self.profiles.create(p['phi']), self.profiles.create(p['psi']),
                                                   p['branch'], p['tol'])
        else:
            raise ValueError(f"Неизвестный критерий: {criterion}")
        return self._verdict(run, verdict)

    def _kernel(self, function: str, body_text: Optional[str], n: int):
        """cos(u1, ..., un) или профиль от нормы тела (по умолчанию евклидов шар)"""
        node = parse_expression(function)
        if isinstance(node, Call) and node.name == 'cos':
            if len(node.args) != n or any(isinstance(a, (Call, str)) for a in node.args):
                raise GrammarError(f"cos ожидает {n} числовых координат направления", function)
            return CosineKernel(np.array(node.args, dtype=float))
        body = self.bodies.create(body_text or f"ball({n})")
        if body.dim != n:
            raise ValueError(f"Размерность тела {body.dim} не совпадает с n = {n}")
        return NormKernel(self.profiles.build(node), body)

    # ==================== ТОЖДЕСТВА ====================

    def run_identity(self, identity: str, run: RunConfig) -> Tuple[str, int]:
        p = run.params
        self.validation.validate_identity(identity, p)
        threshold = p['threshold'] or Config.IDENTITY_THRESHOLDS[identity]
        if identity == 'slice':
            residuals = []
            for i, phi in enumerate(TestFunction.battery(p['n'], p['trials'], p['seed'])):
                rng = stream(p['seed'], i, 1)
                direction = rng.normal(size=p['n'])
                s = float(rng.uniform(0.1, 5.0))
                residuals.append(self.transforms.slice_identity_check(phi, direction, s, threshold))
        elif identity == 'radon-average':
            delta = TestFunction.gaussian(p['n'], p['sigma'])
            residuals = [self.transforms.integral_radon_identity(delta, p['n'], r, threshold)
                         for r in parse_range(p['r'])]
        elif identity == 'dilation':
            body = self.bodies.create(p['body'])
            xi = _vector(p['xi'], body.dim)
            residuals = [self.transforms.dilation_ft_check(body, p['factor'], xi, threshold)]
        elif identity == 'lemma1':
            side = max(1, int(round(math.sqrt(p['pairs']))))
            values = log_grid(0.1, 10.0, side)
            residuals = [self.criteria.lemma1_identity_check(float(a), float(b), threshold)
                         for a in values for b in values]
        else:
            raise ValueError(f"Неизвестное тождество: {identity}")

        headers = ('name', 'lhs', 'rhs', 'residual', 'threshold', 'passed', 'params')
        rows = [tuple(r.to_dict()[h] for h in headers) for r in residuals]
        passed = all(r.passed for r in residuals)
        payload = {'identity': identity, 'passed': passed, 'residuals': [r.to_dict() for r in residuals]}
        text = self.reports.render(p['format'], headers, rows, payload, run)

        self.console.print_header(f"Тождество {identity}")
        self.console.print_table([r.to_dict() for r in residuals],
                                 {'lhs': 'Левая часть', 'rhs': 'Правая часть', 'residual': 'Невязка',
                                  'passed': 'OK'})
        worst = max(r.residual for r in residuals)
        if passed:
            self.console.print_success(f"Все невязки <= {threshold:.1e} (максимум {worst:.3e})")
            return text, Config.EXIT_CODES['POSITIVE_NUMERIC']
        self.console.print_error(f"Максимальная невязка {worst:.3e} > {threshold:.1e}")
        return text, Config.EXIT_CODES['VIOLATION_FOUND']

    # ==================== ПРОХОДЫ ====================

    def run_sweep(self, family: str, run: RunConfig) -> Tuple[str, int]:
        p = run.params
        p_grid = parse_range(p['p'])
        if family == 'schoenberg':
            q_grid = parse_range(p['q'])
            self.validation.validate_sweep(p, {'p': p_grid, 'q': q_grid})
            spec = parse_points(p['points'], p['n'], p['seed'])
            cells = self.criteria.sweep_schoenberg(p['n'], p_grid, q_grid, spec, p['tol'])
        elif family == 'gnp':
            self.validation.validate_sweep(p, {'p': p_grid})
            cells = [(pv, None, v) for pv, v in self.criteria.sweep_gnp(p['n'], p_grid, parse_grid(p['grid']),
                                                                         p['tol'])]
        else:
            raise ValueError(f"Неизвестный проход: {family}")

        headers = ('p', 'q', 'classification', 'min_value')
        rows = [(pv, qv, v.classification.value, v.min_value) for pv, qv, v in cells]
        payload = [dict(zip(headers, row)) | {'verdict': v.to_dict()} for row, (_, _, v) in zip(rows, cells)]
        text = self.reports.render(p['format'], headers, rows, payload, run)

        self.console.print_header(f"Проход {family}, n = {p['n']}")
        self.console.print_table([dict(zip(headers, row)) for row in rows],
                                 {'p': 'p', 'q': 'q', 'classification': 'Класс', 'min_value': 'Минимум'})
        counts: Dict[str, int] = {}
        for row in rows:
            counts[row[2]] = counts.get(row[2], 0) + 1
        self.console.print_info(", ".join(f"{k}: {v}" for k, v in sorted(counts.items())))
        return text, Config.EXIT_CODES['POSITIVE_NUMERIC']


def _names(text: Optional[str]) -> Tuple[str, ...]:
    return tuple(t.strip() for t in (text or '').split(',') if t.strip())


def _vector(text: Optional[str], dim: int) -> np.ndarray:
    """Вектор из списка через запятую; по умолчанию 1.5 e_1"""
    if not text:
        return 1.5 * np.eye(dim)[0]
    values = parse_range(text) if ':' not in text else []
    if len(values) != dim:
        raise GrammarError(f"Ожидалось {dim} координат", text)
    return np.array(values)


# ==================== КОМАНДЫ ====================


class PosdefGroup(click.Group):
    """Ошибки разбора флагов подкоманд завершаются кодом 64"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = Config.EXIT_CODES['USAGE']
            raise


def _default_map(group: click.Group, values: Dict[str, str]) -> Dict[str, Any]:
    """Плоский файл конфигурации как default_map для каждой подкоманды"""
    mapping: Dict[str, Any] = {}
    for name, command in group.commands.items():
        mapping[name] = dict(values)
        if isinstance(command, click.Group):
            mapping[name].update(_default_map(command, values))
    return mapping


def _command_name(ctx: click.Context) -> str:
    names = []
    while ctx.parent is not None:
        names.append(ctx.info_name)
        ctx = ctx.parent
    return " ".join(reversed(names))


def handled(runner: Callable[[CLIApp, str, RunConfig], Tuple[str, int]]):
    """
    Обертка команды: RunConfig из параметров, запуск, запись артефакта, код возврата.
    ValueError (и подклассы) -> код 64.
    """
    def decorator(func):
        @functools.wraps(func)
        @click.pass_context
        def wrapper(ctx, **params):
            app: CLIApp = ctx.obj
            try:
                run = RunConfig(_command_name(ctx), params)
                text, code = runner(app, ctx.info_name, run)
                if params.get('output'):
                    ReportService.write(text, params['output'])
                else:
                    click.echo(text, nl=False)
            except ValueError as e:
                logger.debug(f"Ошибка параметров: {e}")
                app.console.print_error(str(e))
                ctx.exit(Config.EXIT_CODES['USAGE'])
            except ConvergenceError as e:
                app.console.print_error(str(e))
                ctx.exit(Config.EXIT_CODES['NOT_CONVERGED'])
            ctx.exit(code)
        return wrapper
    return decorator


def output_options(default_format: str):
    def decorator(func):
        func = click.option('--output', '-o', type=click.Path(dir_okay=False), default=None,
                            help="Файл артефакта (по умолчанию stdout)")(func)
        func = click.option('--format', 'format', type=click.Choice(ReportService.FORMATS),
                            default=default_format, show_default=True, help="Формат артефакта")(func)
        return func
    return decorator


def tol_option(default: float):
    return click.option('--tol', type=float, default=default, show_default=True, help="Допуск вердикта")


@click.group(cls=PosdefGroup)
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help="Плоский файл key=value с параметрами (флаги имеют приоритет)")
@click.option('--quiet', '-q', is_flag=True, help="Без сводки в stderr")
@click.version_option(Config.TOOL_VERSION, prog_name=Config.TOOL_NAME)
@click.pass_context
def cli(ctx, config_path, quiet):
    """Численная проверка критериев положительной определенности."""
    ctx.obj = CLIApp(quiet)
    if config_path:
        try:
            values = RunConfig.load_file(config_path)
        except ValueError as e:
            ctx.obj.console.print_error(str(e))
            ctx.exit(Config.EXIT_CODES['USAGE'])
        ctx.default_map = _default_map(ctx.command, values)


@cli.command()
@click.option('--profile', required=True, help="Профиль: 'exp_power(2)', 'g(3,3)' или имя примера")
@click.option('--n', type=int, default=1, show_default=True, help="Размерность")
@click.option('--grid', default=DEFAULT_GRID, show_default=True, help="log:lo:hi:count | lin:... | list:...")
@tol_option(Config.QUAD_TOL)
@output_options('csv')
@handled(lambda app, name, run: app.run_transform(run))
def transform(**params):
    """Радиальное преобразование Фурье профиля на сетке частот."""


@cli.group(cls=PosdefGroup)
def check():
    """Вердикты критериев положительной определенности."""


@check.command('thm-decreasing')
@click.option('--profile', required=True, help="Неотрицательный невозрастающий профиль f")
@click.option('--n', type=int, default=3, show_default=True)
@click.option('--branch', type=int, default=1, show_default=True, help="1: f min{1,r} в L^1; 2: r f локально")
@click.option('--grid', default=DEFAULT_GRID, show_default=True)
@tol_option(Config.VERDICT_TOL)
@output_options('json')
@handled(lambda app, name, run: app.run_check(name, run))
def thm_decreasing(**params):
    """|x|^{2-n} f(|x|) для невозрастающих f."""


@check.command('thm-omega')
@click.option('--profile', required=True)
@click.option('--body', default='ball(3)', show_default=True, help="Тело K: ball(n), cube(n), lp(n,p), ...")
@click.option('--battery', type=int, default=Config.BATTERY_SIZE, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--samples', type=int, default=Config.MC_SAMPLES, show_default=True)
@click.option('--waive', default='', help="Снятые гипотезы через запятую")
@click.option('--routes', default='direct,sectional', show_default=True)
@tol_option(Config.VERDICT_TOL)
@output_options('json')
@handled(lambda app, name, run: app.run_check(name, run))
def thm_omega(**params):
    """f(||x||_K) при omega(t) = -t^n f'(t)."""


@check.command('thm-convex')
@click.option('--phi', default='cube(2)', show_default=True, help="Тело или stack(w, тело, ...)")
@click.option('--psi', default='ball(1)', show_default=True, help="ball(r), balls(w, r, ...), gaussian(s)")
@click.option('--alpha', type=float, default=0.0, show_default=True)
@click.option('--samples', type=int, default=None)
@click.option('--seed', type=int, default=0, show_default=True)
@tol_option(Config.VERDICT_TOL)
@output_options('json')
@handled(lambda app, name, run: app.run_check(name, run))
def thm_convex(**params):
    """int |x|^alpha phi psi^ для индикаторов выпуклых тел."""


@check.command('polya')
@click.option('--profile', required=True)
@click.option('--grid', default=DEFAULT_GRID, show_default=True)
@tol_option(Config.VERDICT_TOL)
@output_options('json')
@handled(lambda app, name, run: app.run_check(name, run))
def polya(**params):
    """Критерий Пойа и скан одномерного преобразования."""


@check.command('gram')
@click.option('--function', 'function', required=True, help="Профиль от нормы или cos(u1, ..., un)")
@click.option('--body', default=None, help="Тело нормы (по умолчанию ball(n))")
@click.option('--points', default='random:40:3', show_default=True,
              help="grid:lo:hi:count | random:count[:scale] | list:x y;x y")
@click.option('--n', type=int, default=1, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@tol_option(Config.GRAM_TOL)
@output_options('json')
@handled(lambda app, name, run: app.run_check(name, run))
def gram(**params):
    """Наименьшее собственное значение матрицы Грама."""


@check.command('lemma1')
@click.option('--phi', required=True, help="Четная невозрастающая phi")
@click.option('--psi', required=True, help="psi с невозрастающим psi(x)/x")
@click.option('--branch', type=int, default=1, show_default=True)
@tol_option(Config.VERDICT_TOL)
@output_options('json')
@handled(lambda app, name, run: app.run_check(name, run))
def lemma1_check(**params):
    """Знак int phi^ psi."""


@cli.group(cls=PosdefGroup)
def identity():
    """Проверка интегральных тождеств по невязкам."""


@identity.command('slice')
@click.option('--n', type=int, default=3, show_default=True)
@click.option('--trials', type=int, default=50, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--threshold', type=float, default=None)
@output_options('csv')
@handled(lambda app, name, run: app.run_identity(name, run))
def slice_identity(**params):
    """Теорема о срезе для преобразования Радона."""


@identity.command('radon-average')
@click.option('--n', type=int, default=3, show_default=True)
@click.option('--r', default='1.0', show_default=True, help="Смещение или список через запятую")
@click.option('--sigma', type=float, default=1.0, show_default=True)
@click.option('--threshold', type=float, default=None)
@output_options('csv')
@handled(lambda app, name, run: app.run_identity(name, run))
def radon_average(**params):
    """Сферическое усреднение преобразования Радона радиальной гауссианы."""


@identity.command('dilation')
@click.option('--body', default='cube(3)', show_default=True)
@click.option('--factor', type=float, default=2.0, show_default=True)
@click.option('--xi', default=None, help="Частота через запятую (по умолчанию 1.5 e_1)")
@click.option('--threshold', type=float, default=None)
@output_options('csv')
@handled(lambda app, name, run: app.run_identity(name, run))
def dilation(**params):
    """chi_{lambda K}^(xi) = lambda^n chi_K^(lambda xi)."""


@identity.command('lemma1')
@click.option('--pairs', type=int, default=25, show_default=True)
@click.option('--threshold', type=float, default=None)
@output_options('csv')
@handled(lambda app, name, run: app.run_identity(name, run))
def lemma1_identity(**params):
    """Численный интеграл против (4/a)(1 - cos ab) на сетке (a, b)."""


@cli.group(cls=PosdefGroup)
def sweep():
    """Проходы по параметрам семейств."""


@sweep.command('schoenberg')
@click.option('--n', type=int, default=2, show_default=True)
@click.option('--p', 'p', required=True, help="lo:hi:count или список")
@click.option('--q', 'q', required=True, help="lo:hi:count или список, q в (0, 4]")
@click.option('--points', default='random:40:3', show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@tol_option(Config.GRAM_TOL)
@output_options('csv')
@handled(lambda app, name, run: app.run_sweep(name, run))
def schoenberg(**params):
    """e^{-||x||_p^q} на шаблоне точек для всех (p, q)."""


@sweep.command('gnp')
@click.option('--n', type=int, default=3, show_default=True)
@click.option('--p', 'p', required=True)
@click.option('--grid', default=DEFAULT_GRID, show_default=True)
@tol_option(Config.VERDICT_TOL)
@output_options('csv')
@handled(lambda app, name, run: app.run_sweep(name, run))
def gnp(**params):
    """|x|^{2-n} e^{-|x|^p} по сетке p."""
