"""Small file helpers: atomic writes, canonical CSV/JSON formatting."""

from __future__ import annotations

import json
import os
from pathlib import Path

#: numeric CSV cells use 9 significant digits
_NUM_FMT = ".9g"


def fmt_num(x) -> str:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), _NUM_FMT)


def write_text_atomic(path, text: str) -> None:
    """Write via a sibling temp file + rename so readers never see partial output."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_rows(path, rows) -> None:
    """CSV with 9-significant-digit numbers, '.' decimal separator, LF endings."""
    lines = []
    for row in rows:
        cells = [cell if isinstance(cell, str) else fmt_num(cell) for cell in row]
        lines.append(",".join(cells))
    write_text_atomic(path, "\n".join(lines) + "\n")


def write_json(path, doc) -> None:
    write_text_atomic(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_csv_columns(path) -> dict[str, list[str]]:
    """Read a simple header + rows CSV into per-column string lists."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return {}
    header = [h.strip() for h in lines[0].split(",")]
    cols: dict[str, list[str]] = {h: [] for h in header}
    for ln in lines[1:]:
        cells = ln.split(",")
        for h, c in zip(header, cells):
            cols[h].append(c.strip())
    return cols
