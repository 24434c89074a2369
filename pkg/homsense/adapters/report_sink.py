"""
Report sinks: write result documents as JSON or CSV to a file or stdout.

Output is deterministic: JSON keeps insertion order with indent 2 and a
trailing newline; CSV rows come from the report's own to_csv_rows().
"""
import csv
import io
import json
import sys
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

from bittensor.utils.btlogging import logging


class IReportSink(ABC):
    """Interface for emitting a finished report."""

    @abstractmethod
    def write(self, document: Dict[str, Any], rows: Optional[List[List[str]]] = None) -> Tuple[bool, str]:
        """
        Emit one report.

        Args:
            document: JSON-ready result document
            rows: Tabular form of the same report, if it has one

        Returns:
            (success, message)
        """
        pass


class _StreamSink(IReportSink):
    def __init__(self, out_path: Optional[str] = None):
        self.out_path = out_path

    def _render(self, document: Dict[str, Any], rows: Optional[List[List[str]]]) -> str:
        raise NotImplementedError

    def write(self, document: Dict[str, Any], rows: Optional[List[List[str]]] = None) -> Tuple[bool, str]:
        try:
            text = self._render(document, rows)
        except (TypeError, ValueError) as e:
            logging.error(f"{type(self).__name__}: cannot render report: {e}")
            return False, f"render failed: {e}"
        if self.out_path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return True, "written to stdout"
        try:
            with open(self.out_path, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        except OSError as e:
            logging.warning(f"{type(self).__name__}: cannot write {self.out_path}: {e}")
            return False, f"cannot write {self.out_path}: {e}"
        return True, f"written to {self.out_path}"


class JsonReportSink(_StreamSink):
    """JSON document, indent 2, keys in insertion order."""

    def _render(self, document, rows):
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


class CsvReportSink(_StreamSink):
    """
    CSV table. Reports without a tabular form fall back to a two-column
    key/value listing of the document's top-level scalars.
    """

    def _render(self, document, rows):
        if rows is None:
            rows = [["field", "value"]] + [
                [key, str(value)] for key, value in document.items() if not isinstance(value, (dict, list))
            ]
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerows(rows)
        return buffer.getvalue()
