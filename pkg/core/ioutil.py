import json
import os
from typing import Any

from core.errors import InputError


class ParseError(InputError):
    """A data file could not be decoded.

    Args:
        path: Offending file
        message: What went wrong
        line: 1-based line of the problem, if known
        column: 1-based column of the problem, if known
    """

    def __init__(self, path: str, message: str, line: int = None, column: int = None):
        self.path = path
        self.line = line
        self.column = column
        where = f"{path}:{line}:{column}" if line is not None else path
        super().__init__(f"{where}: {message}")


def read_file(path):
    """Read entire file content."""
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def write_file(path, content):
    """Write content to file, creating parent directories."""
    parent = os.path.dirname(path)
    if parent:
        ensure_dir(parent)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(content)


def ensure_dir(path):
    """Create directory if it doesn't exist."""
    if not os.path.exists(path):
        os.makedirs(path)


def file_exists(path):
    """Check if file exists."""
    return os.path.isfile(path)


def loads_json(text: str, path: str = "<string>") -> Any:
    """Decode JSON text, turning decoder errors into ParseError with line and column."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(path, e.msg, e.lineno, e.colno) from e


def read_json(path: str) -> Any:
    """Read and decode a JSON data file."""
    try:
        text = read_file(path)
    except OSError as e:
        raise ParseError(path, e.strerror or str(e)) from e
    return loads_json(text, path)


def dumps_json(data: Any, indent: int = None) -> str:
    """Canonical JSON: sorted keys, stable separators."""
    if indent is None:
        return json.dumps(data, sort_keys=True, separators=(',', ':'))
    return json.dumps(data, sort_keys=True, indent=indent)


def write_json(path: str, data: Any, indent: int = 2):
    """Write data as canonical JSON."""
    write_file(path, dumps_json(data, indent) + "\n")


"""
from core import ioutil

data = ioutil.read_json("data/z2.json")       # ParseError carries line/column
ioutil.write_json("out/report.json", data)    # sorted keys, reproducible bytes
"""
