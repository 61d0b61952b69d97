import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

from ..core.errors import OutputError
from ..settings import SCHEMA_VERSION

logger = logging.getLogger(__name__)


def json_safe(value):
    """Converts numpy scalars and arrays to plain Python; infinities become "inf" / "-inf"."""
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    if hasattr(value, "tolist"):
        return json_safe(value.tolist())
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def atomic_write(path, text):
    """
    Writes ``text`` to ``path`` through a temporary file in the same directory.

    The target either keeps its old content or receives the complete new content.

    Raises:
        OutputError: the directory is missing or not writable.
    """
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    except OSError as exc:
        raise OutputError(f"Cannot write {path}: {exc.strerror or exc}") from exc
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except OSError as exc:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise OutputError(f"Cannot write {path}: {exc.strerror or exc}") from exc
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.info("Wrote %s", path)


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def write_json(payload, path=None):
    document = {"schema": SCHEMA_VERSION, **json_safe(payload)}
    _emit(json.dumps(document, indent=2) + "\n", path)


def write_csv(header, rows, path=None):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    _emit(buffer.getvalue(), path)
