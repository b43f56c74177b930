"""CSV, JSON and SVG emission.

Every file carries the run configuration, seed and package version so that
the run can be reconstructed from any single output.  Reals are written
with 17 significant digits and a ``.`` decimal point regardless of locale.
"""
from __future__ import annotations

import json
import math
import os
from importlib import metadata
from xml.sax.saxutils import escape

import numpy as np

PACKAGE = "artifact"


def package_version() -> str:
    try:
        return metadata.version(PACKAGE)
    except metadata.PackageNotFoundError:
        return "0+unknown"


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    return obj


def metadata_block(config: dict) -> dict:
    return {"package": PACKAGE, "version": package_version(),
            "seed": config.get("seed"), "config": config}


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _write(path: str, text: str) -> str:
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def csv_text(columns, rows, config: dict) -> str:
    meta = metadata_block(config)
    lines = [
        f"# {meta['package']} {meta['version']}",
        f"# seed {format_value(meta['seed'])}",
        "# config " + json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":")),
        ",".join(columns),
    ]
    for row in rows:
        get = row.get if isinstance(row, dict) else (lambda c, r=row: getattr(r, c))
        lines.append(",".join(format_value(get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def write_csv(path: str, columns, rows, config: dict) -> str:
    """Rows may be dicts or objects with the column names as attributes."""
    return _write(path, csv_text(columns, rows, config))


def read_csv(path: str) -> tuple[list[str], list[dict]]:
    """Inverse of :func:`write_csv` (values left as strings)."""
    with open(path, encoding="utf-8") as fh:
        body = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    columns = body[0].split(",")
    return columns, [dict(zip(columns, ln.split(","))) for ln in body[1:] if ln]


def write_json(path: str, payload: dict, config: dict) -> str:
    return _write(path, dumps_json({"meta": metadata_block(config), **payload}))


def svg_loglog(path: str, series: dict, config: dict, *, title: str = "",
               width: int = 640, height: int = 420) -> str:
    """Log-log polyline plot; ``series`` maps a label to ``(xs, ys)``.

    Non-positive values are dropped.
    """
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
    clean = {}
    for label, (xs, ys) in series.items():
        pts = [(float(x), float(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
        if pts:
            clean[label] = pts
    allx = [math.log10(x) for pts in clean.values() for x, _ in pts] or [0.0, 1.0]
    ally = [math.log10(y) for pts in clean.values() for _, y in pts] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0
    left, right, top, bottom = 70, 160, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def px(lx):
        return left + (lx - x0) / (x1 - x0) * pw

    def py(ly):
        return top + (y1 - ly) / (y1 - y0) * ph

    meta = json.dumps(_jsonable(metadata_block(config)), sort_keys=True,
                      separators=(",", ":")).replace("--", "- -")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f"<!-- {meta} -->",
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left}" y="{top - 12}" font-size="14">{escape(title)}</text>',
        f'<text x="{left}" y="{height - 12}" font-size="12">'
        f"log10 n: {x0:.2f} .. {x1:.2f}; log10 value: {y0:.2f} .. {y1:.2f}</text>",
    ]
    for i, (label, pts) in enumerate(clean.items()):
        color = colors[i % len(colors)]
        coords = " ".join(f"{px(math.log10(x)):.2f},{py(math.log10(y)):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = top + 16 * (i + 1)
        out.append(f'<line x1="{width - right + 10}" y1="{ly}" x2="{width - right + 30}" '
                   f'y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{width - right + 34}" y="{ly + 4}" font-size="12">{escape(label)}</text>')
    out.append("</svg>")
    return _write(path, "\n".join(out) + "\n")
