"""
Сервис машиночитаемых артефактов: CSV для сеток, JSON для вердиктов.
Вывод детерминирован: без отметок времени, заголовки несут версию и хеш конфигурации.
"""

import csv
import io
import json
import logging
from typing import Any, Iterable, List, Sequence

from models.run_config import RunConfig
from utils.errors import OutputError
from utils.helpers import to_builtin


class ReportService:
    """Сборка CSV/JSON"""

    FORMATS = ('csv', 'json')

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def csv_text(self, headers: Sequence[str], rows: Iterable[Sequence[Any]], run_config: RunConfig) -> str:
        """
        CSV (RFC 4180, CRLF) с комментариями-заголовками:
        "# tool: ...", "# version: ...", "# config_hash: ...".
        """
        buffer = io.StringIO()
        for key, value in run_config.header().items():
            buffer.write(f"# {key}: {value}\r\n")
        writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator='\r\n')
        writer.writerow(headers)
        count = 0
        for row in rows:
            writer.writerow([self._cell(v) for v in row])
            count += 1
        self.logger.debug(f"CSV: {count} строк, config_hash={run_config.hash}")
        return buffer.getvalue()

    @staticmethod
    def _cell(value: Any) -> Any:
        value = to_builtin(value)
        if isinstance(value, bool):
            return 'true' if value else 'false'
        if value is None:
            return ''
        if isinstance(value, (dict, list)):
            return json.dumps(value, sort_keys=True)
        return value

    def json_text(self, payload: Any, run_config: RunConfig) -> str:
        """JSON с отсортированными ключами и отступом 2"""
        document = {'config': run_config.to_dict(), 'result': to_builtin(payload)}
        return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + '\n'

    def render(self, fmt: str, headers: Sequence[str], rows: List[Sequence[Any]], payload: Any,
               run_config: RunConfig) -> str:
        """CSV из строк или JSON из полезной нагрузки"""
        if fmt not in self.FORMATS:
            raise ValueError(f"Формат должен быть одним из: {self.FORMATS}")
        if fmt == 'csv':
            return self.csv_text(headers, rows, run_config)
        return self.json_text(payload, run_config)

    @staticmethod
    def write(text: str, path: str) -> None:
        """
        Запись артефакта в файл (переводы строк как есть).

        Raises:
            OutputError: Путь не задан или файл нельзя открыть
        """
        if not path:
            raise OutputError(str(path), "путь не задан")
        try:
            with open(path, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
        except OSError as e:
            raise OutputError(path, e.strerror or str(e))
