# -*- coding: utf-8 -*-

"""Utility functions."""

import json
import logging
import os
from pathlib import Path
from typing import IO, Any, Optional, Union

LOGGER = logging.getLogger(__name__)

PathLike = Union[str, Path]


class LifestyleError(ValueError):
    """Base error of the lifestyle analyzer."""


class ValidationError(LifestyleError):
    """Invalid input: malformed file, broken invariant or unresolvable reference."""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or ())

    def __str__(self):
        message = super().__str__()
        if not self.violations:
            return message
        return "\n".join([message] + [f"  - {v}" for v in self.violations])


def format_from_path(path):
    """get file extension"""
    try:
        _, ext = os.path.splitext(path)
        return ext.lower()[1:] if ext else None
    except Exception:
        pass
    return None


def load_json(path: PathLike) -> Any:
    """read a JSON file, raising ValidationError for unreadable content"""

    LOGGER.debug("reading JSON from <%s>", path)
    try:
        with open(path, encoding="utf-8") as file:
            return json.load(file)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"<{path}> is not valid JSON: {exc}") from exc


def dumps_json(data: Any) -> str:
    """deterministic JSON body: sorted keys, two space indent, trailing newline"""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dump_json(data: Any, out: Optional[Union[PathLike, IO[str]]] = None) -> str:
    """write JSON to a path or an open file and return the body"""

    body = dumps_json(data)

    if out is None:
        return body

    if isinstance(out, (str, Path)):
        LOGGER.info("writing JSON to <%s>", out)
        with open(out, "w", encoding="utf-8") as file:
            file.write(body)
        return body

    out.write(body)
    return body


def require_mapping(data: Any, what: str) -> dict:
    """make sure a parsed JSON value is an object"""
    if not isinstance(data, dict):
        raise ValidationError(f"{what} must be a JSON object, got {type(data).__name__}")
    return data


def as_float(value: Any, what: str) -> float:
    """convert JSON numbers to float, rejecting booleans and strings"""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{what} must be a number, got <{value!r}>")
    return float(value)
