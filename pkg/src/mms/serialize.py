"""Canonical serialization used by every file-producing entry point.

All JSON and CSV emitted by the toolkit goes through these helpers so
that identical inputs produce byte-identical outputs: keys are sorted,
floats are written in shortest round-trip decimal form, CSV uses ``.``
as the decimal separator regardless of locale, and files are written
atomically (temp file in the target directory, then ``os.replace``).
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from typing import Any, Iterable, Mapping, Sequence

SCHEMA = "mms/1"

# Environment variable capping internal parallelism.  The current
# implementation runs every stage sequentially (a cap of one is always
# honoured); the value is still parsed and echoed into output headers so
# configurations are reproducible from the artifacts alone.
THREADS_ENV = "MMS_THREADS"


def worker_cap() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def canonical_json(obj: Any) -> str:
    """Serialize ``obj`` deterministically, with a trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def csv_table(rows: Iterable[Sequence[Any]], header: Sequence[str],
              config: Mapping[str, Any] | None = None) -> str:
    """Render a CSV table with a header row and optional config echo.

    ``config`` entries become ``# key=value`` comment lines before the
    header, recording every resolved setting of the run that produced
    the table.
    """
    lines = []
    if config:
        for key in sorted(config):
            lines.append(f"# {key}={_format_cell(config[key])}")
    lines.append(",".join(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError("row width does not match header")
        lines.append(",".join(_format_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def atomic_write(path: str, text: str) -> None:
    """Write ``text`` to ``path`` atomically; ``-`` targets stdout."""
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mms-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path: str) -> Any:
    """Load a JSON document from ``path`` (or stdin for ``-``).

    Raises ``ValueError`` with line/column context on malformed input,
    so CLI layers can map it to a usage error.
    """
    if path == "-":
        raw = sys.stdin.read()
        name = "<stdin>"
    else:
        with open(path, "r", encoding="utf-8") as handle:
            raw = handle.read()
        name = path
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(
            f"{name}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
