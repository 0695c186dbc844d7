"""Strict ``name: value`` text files.

Layout: UTF-8, one ``name: value`` per line in a fixed order, first line
``format: <tag>``, mandatory trailing newline, no other whitespace.
Values are decimals, comma lists of decimals, lowercase hex or member ids.
Parsing rejects anything that would not re-serialize to the same bytes.
"""

import os
import re
import tempfile
from pathlib import Path

from .errors import FormatError

_DEC = re.compile(r"0|[1-9][0-9]*")
_HEX = re.compile(r"(?:[0-9a-f]{2})*")


def fmt_int(v: int) -> str:
    return str(int(v))


def fmt_ints(vs) -> str:
    return ",".join(str(int(v)) for v in vs)


def parse_int(s: str) -> int:
    if not _DEC.fullmatch(s):
        raise FormatError(f"not a canonical decimal: {s!r}")
    return int(s)


def parse_ints(s: str) -> tuple[int, ...]:
    if s == "":
        raise FormatError("empty integer list")
    return tuple(parse_int(p) for p in s.split(","))


def parse_hex(s: str) -> bytes:
    if not _HEX.fullmatch(s):
        raise FormatError(f"not canonical lowercase hex: {s!r}")
    return bytes.fromhex(s)


def dump(fmt: str, fields) -> str:
    lines = [f"format: {fmt}"]
    lines += [f"{name}: {value}" for name, value in fields]
    return "\n".join(lines) + "\n"


def split_lines(text: str) -> list[str]:
    if not text.endswith("\n"):
        raise FormatError("missing trailing newline")
    lines = text[:-1].split("\n")
    for line in lines:
        if any(ch.isspace() and ch != " " for ch in line) or line != line.strip():
            raise FormatError(f"stray whitespace in line {line!r}")
    return lines


def parse(text: str, fmt: str, names) -> dict[str, str]:
    lines = split_lines(text)
    expected = ["format", *names]
    if len(lines) != len(expected):
        raise FormatError(f"expected {len(expected)} lines, got {len(lines)}")
    out = {}
    for line, name in zip(lines, expected):
        key, sep, value = line.partition(": ")
        if not sep or key != name or " " in value:
            raise FormatError(f"expected field {name!r}, got line {line!r}")
        out[key] = value
    if out.pop("format") != fmt:
        raise FormatError(f"not a {fmt} file")
    return out


def peek_format(text: str) -> str:
    first = text.split("\n", 1)[0]
    key, sep, value = first.partition(": ")
    if key != "format" or not sep:
        raise FormatError("missing format header")
    return value


def read_text(path) -> str:
    try:
        return Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not UTF-8") from exc


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(text.encode("utf-8"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
