"""Instance files: a strict ``key = value`` text format.

Example::

    # four groups, common between-group correlation
    sizes = 2, 4, 3, 6
    b = -0.1, 0.4, 0.7, 0.8
    c = 0.3

Keys are ``sizes``, ``b`` and exactly one of ``c`` (scalar) or ``c_table``
(row-major upper triangle ``c_12, c_13, ..., c_{p-1,p}``). List items are
separated by commas and/or whitespace. ``#`` starts a comment. Unknown or
repeated keys are errors.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from typing import Optional, Union

from .blockmodel import BlockCorrParams, GroupStructure, IsoCorrParams

__all__ = ["InstanceError", "InstanceFile", "parse_instance", "load_instance", "dump_instance"]

KEYS = ("sizes", "b", "c", "c_table")
_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


class InstanceError(ValueError):
    """Malformed instance; ``str()`` reads ``source:line: message``."""

    def __init__(self, source: str, line: Optional[int], message: str):
        self.source = source
        self.line = line
        self.message = message
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class InstanceFile:
    sizes: tuple[int, ...]
    b: tuple[float, ...]
    c: Optional[float] = None
    c_table: Optional[tuple[float, ...]] = None

    @property
    def is_iso(self) -> bool:
        return self.c is not None

    def to_params(self, c_override: Optional[float] = None) -> Union[IsoCorrParams, BlockCorrParams]:
        groups = GroupStructure(self.sizes)
        if c_override is not None:
            return IsoCorrParams(groups, self.b, c_override)
        if self.c is not None:
            return IsoCorrParams(groups, self.b, self.c)
        return BlockCorrParams.from_upper(groups, self.b, self.c_table)


def _numbers(text: str, kind, source: str, line: int, key: str):
    items = [x for x in re.split(r"[,\s]+", text) if x]
    if not items:
        raise InstanceError(source, line, f"'{key}' has no value")
    out = []
    for item in items:
        try:
            if kind is int:
                val = int(item)
            else:
                val = float(item)
                if not math.isfinite(val):
                    raise ValueError
        except ValueError:
            raise InstanceError(source, line, f"'{key}': cannot read {item!r} as {kind.__name__}") from None
        out.append(val)
    return out


def parse_instance(text: str, source: str = "<instance>") -> InstanceFile:
    values: dict[str, list] = {}
    where: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            raise InstanceError(source, lineno, "expected 'key = value'")
        key, val = m.group(1), m.group(2)
        if key not in KEYS:
            raise InstanceError(source, lineno, f"unknown key '{key}' (allowed: {', '.join(KEYS)})")
        if key in values:
            raise InstanceError(source, lineno, f"duplicate key '{key}' (first on line {where[key]})")
        values[key] = _numbers(val, int if key == "sizes" else float, source, lineno, key)
        where[key] = lineno

    for key in ("sizes", "b"):
        if key not in values:
            raise InstanceError(source, None, f"missing required key '{key}'")
    if ("c" in values) == ("c_table" in values):
        line = where.get("c_table") if "c" in values else None
        raise InstanceError(source, line, "exactly one of 'c' or 'c_table' must be given")

    sizes = values["sizes"]
    if any(s < 1 for s in sizes):
        raise InstanceError(source, where["sizes"], "group sizes must be >= 1")
    p = len(sizes)
    b = values["b"]
    if len(b) != p:
        raise InstanceError(source, where["b"], f"'b' has {len(b)} values, expected {p}")
    for k, (nk, bk) in enumerate(zip(sizes, b)):
        if not -1.0 < bk < 1.0:
            raise InstanceError(source, where["b"], f"b[{k + 1}] = {bk!r} outside ]-1, 1[")
        if nk == 1 and bk != 0.0:
            raise InstanceError(source, where["b"], f"b[{k + 1}] must be 0 for a group of size 1")

    c = c_table = None
    if "c" in values:
        if len(values["c"]) != 1:
            raise InstanceError(source, where["c"], "'c' must be a single number")
        c = values["c"][0]
        if not -1.0 < c < 1.0:
            raise InstanceError(source, where["c"], f"c = {c!r} outside ]-1, 1[")
    else:
        c_table = tuple(values["c_table"])
        if len(c_table) != p * (p - 1) // 2:
            raise InstanceError(source, where["c_table"],
                                f"'c_table' has {len(c_table)} values, expected {p * (p - 1) // 2}")
        for i, v in enumerate(c_table):
            if not -1.0 < v < 1.0:
                raise InstanceError(source, where["c_table"], f"c_table[{i + 1}] = {v!r} outside ]-1, 1[")
    return InstanceFile(tuple(sizes), tuple(b), c, c_table)


def load_instance(path: Union[str, os.PathLike]) -> InstanceFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InstanceError(str(path), None, f"cannot read file: {exc.strerror}") from None
    return parse_instance(text, str(path))


def dump_instance(params: Union[IsoCorrParams, BlockCorrParams]) -> str:
    """Serialize parameters in the instance format, floats at full precision."""
    lines = [
        "sizes = " + ", ".join(str(s) for s in params.groups.sizes),
        "b = " + ", ".join(repr(float(x)) for x in params.b),
    ]
    if isinstance(params, IsoCorrParams):
        lines.append(f"c = {float(params.c)!r}")
    else:
        p = params.groups.p
        upper = [repr(float(params.c[k, l])) for k in range(p) for l in range(k + 1, p)]
        lines.append("c_table = " + ", ".join(upper))
    return "\n".join(lines) + "\n"
