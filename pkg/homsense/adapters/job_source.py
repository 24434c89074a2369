"""
Interface and JSON implementation for loading job input documents.

Every document is a JSON object tagged with "schema": "homsense/v1". Field
parsers name the offending field (and cell, for matrices) in their errors.
"""
import json
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Union

from bittensor.utils.btlogging import logging

from homsense.constants import SCHEMA_TAG
from homsense.domain.certificate import SignMode
from homsense.domain.matrix import RationalMatrix, to_fraction
from homsense.domain.permutation import CoordinateProjection, SignedPermutation
from homsense.errors import InputFormatError


class IJobSource(ABC):
    """Interface for loading a job input document."""

    @abstractmethod
    def load(self, path: str) -> Dict[str, Any]:
        """
        Load and validate the document at `path`.

        Args:
            path: Location of the input document

        Returns:
            The decoded document (schema tag already checked)

        Raises:
            InputFormatError: when the document cannot be read or decoded
        """
        pass


class JsonFileJobSource(IJobSource):
    """Reads job documents from JSON files on disk."""

    def __init__(self, encoding: str = "utf-8"):
        self.encoding = encoding

    def load(self, path: str) -> Dict[str, Any]:
        try:
            with open(path, "r", encoding=self.encoding) as handle:
                text = handle.read()
        except OSError as e:
            logging.warning(f"JsonFileJobSource: cannot read {path}: {e}")
            raise InputFormatError(f"cannot read {path}: {e.strerror or e}") from e
        document = decode_document(text, origin=path)
        logging.debug(f"JsonFileJobSource: loaded {path} with fields {sorted(document)}")
        return document


def decode_document(text: str, origin: str = "<input>") -> Dict[str, Any]:
    """Decode a JSON object and check its schema tag."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{origin}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(document, dict):
        raise InputFormatError(f"{origin}: top level must be a JSON object")
    schema = document.get("schema")
    if schema != SCHEMA_TAG:
        raise InputFormatError(f"{origin}: field 'schema' must be {SCHEMA_TAG!r}, got {schema!r}")
    return document


def require(document: Dict[str, Any], field: str) -> Any:
    if field not in document:
        raise InputFormatError(f"missing field '{field}'")
    return document[field]


def parse_count(document: Dict[str, Any], field: str, default: Optional[int] = None) -> int:
    value = document.get(field, default)
    if value is None:
        raise InputFormatError(f"missing field '{field}'")
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise InputFormatError(f"field '{field}' must be a non-negative integer, got {value!r}")
    return value


def parse_matrix_json(doc: Union[str, Dict[str, Any]], field: str = "matrix") -> RationalMatrix:
    """
    Parse {"rows": r, "cols": c, "entries": [[...], ...]}.

    Entries are integers or "p/q" strings; fractions are reduced.

    Raises:
        InputFormatError: for malformed JSON, ragged rows, shape mismatches
            or bad entries (the message names the cell, e.g. "entries[0][1]")
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise InputFormatError(f"{field}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise InputFormatError(f"{field}: expected an object with rows, cols and entries")
    rows = parse_count(doc, "rows")
    cols = parse_count(doc, "cols")
    entries = require(doc, "entries")
    if not isinstance(entries, list) or len(entries) != rows:
        raise InputFormatError(f"{field}.entries: expected {rows} rows")
    values = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise InputFormatError(f"{field}.entries[{i}]: expected {cols} entries (ragged rows)")
        for j, entry in enumerate(row):
            try:
                values.append(to_fraction(entry))
            except InputFormatError as e:
                raise InputFormatError(f"{field}.entries[{i}][{j}]: {e}") from None
    return RationalMatrix(rows, cols, tuple(values))


def parse_permutation(doc: Any, field: str) -> SignedPermutation:
    """{"perm": [...], "signs": [...]} with signs optional."""
    if not isinstance(doc, dict) or not isinstance(doc.get("perm"), list):
        raise InputFormatError(f"{field}: expected an object with a 'perm' list")
    perm = doc["perm"]
    try:
        return SignedPermutation(len(perm), tuple(perm), doc.get("signs"))
    except (InputFormatError, TypeError, ValueError) as e:
        raise InputFormatError(f"{field}: {e}") from None


def parse_projection(doc: Any, field: str, size: int) -> CoordinateProjection:
    """{"kept": [...]} (or null / absent for the identity) on [0, size)."""
    if doc is None:
        return CoordinateProjection.identity(size)
    if not isinstance(doc, dict) or not isinstance(doc.get("kept"), list):
        raise InputFormatError(f"{field}: expected an object with a 'kept' list")
    declared = doc.get("size", size)
    if declared != size:
        raise InputFormatError(f"{field}: size {declared} does not match the permutation size {size}")
    try:
        return CoordinateProjection(size, frozenset(doc["kept"]))
    except (InputFormatError, TypeError, ValueError) as e:
        raise InputFormatError(f"{field}: {e}") from None


def parse_sign_mode(document: Dict[str, Any], default: SignMode = SignMode.PLAIN) -> SignMode:
    value = document.get("sign_mode")
    if value is None:
        return default
    try:
        return SignMode(value)
    except ValueError:
        raise InputFormatError(f"field 'sign_mode' must be 'plain' or 'plus_minus', got {value!r}") from None
