"""Deterministic file formats.

JSON floats use Python's shortest round-trip ``repr``; CSV traces use 9
significant digits.  Every write goes to a temporary file in the target
directory and is moved into place with ``os.replace``.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any, Iterable

import numpy as np

__all__ = ["dumps", "write_text", "write_json", "read_json_arg", "trace_csv", "geometry_csv"]


def _clean(obj: Any):
    """Plain JSON types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj: Any) -> None:
    write_text(path, dumps(obj))


def read_json_arg(value: str):
    """Parse ``value`` as inline JSON when it starts with ``[`` or ``{``, else as a file path.

    Raises ``OSError`` for unreadable files and ``json.JSONDecodeError`` for bad JSON.
    """
    if value.lstrip()[:1] in ("[", "{"):
        return json.loads(value)
    with open(value) as fh:
        return json.load(fh)


def _g9(x: float) -> str:
    s = f"{x:.9g}"
    return "0" if s == "-0" else s


def trace_csv(zs: Iterable[float], field: np.ndarray) -> str:
    """Rows ``z,site,re,im,prob`` for ``field[k, n] = E_n(zs[k])``."""
    lines = ["z,site,re,im,prob"]
    for z, row in zip(zs, field):
        for n, e in enumerate(row):
            lines.append(f"{_g9(z)},{n},{_g9(e.real)},{_g9(e.imag)},{_g9(abs(e) ** 2)}")
    return "\n".join(lines) + "\n"


def geometry_csv(distances: Iterable[float]) -> str:
    lines = ["pair,distance"]
    for k, d in enumerate(distances):
        lines.append(f"{k}-{k + 1},{_g9(float(d))}")
    return "\n".join(lines) + "\n"
