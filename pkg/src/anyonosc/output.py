"""Serialization: RFC-4180 CSV, JSON metadata sidecars and self-contained SVG
heatmaps with overlay polylines."""

from __future__ import annotations

import datetime as _dt
import json

import numpy as np

from . import __version__

METADATA_REQUIRED_KEYS = ("artifact", "version", "created", "config_sha256",
                          "conventions", "columns", "units", "generator")


def format_number(value) -> str:
    """Decimal serialization at 17 significant digits (round-trips doubles)."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def _csv_field(text: str) -> str:
    if any(ch in text for ch in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def csv_text(result) -> str:
    """CSV body with a header naming columns and units, RFC-4180, LF endings."""
    header = [f"{c} [{u}]" for c, u in zip(result.columns, result.units)]
    lines = [",".join(_csv_field(h) for h in header)]
    for row in result.rows:
        lines.append(",".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(result, path: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(result))
    return path


def read_csv(path: str):
    """Parse a CSV written by write_csv back into (columns, units, rows)."""
    import csv

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [tuple(float(x) for x in row) for row in reader if row]
    columns, units = [], []
    for cell in header:
        name, _, unit = cell.partition(" [")
        columns.append(name)
        units.append(unit.rstrip("]"))
    return tuple(columns), tuple(units), rows


def metadata_document(result, config, timestamp: str | None = None) -> dict:
    """Sidecar document: config echo, conventions, version, ISO-8601 timestamp."""
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return {
        "artifact": "anyonosc",
        "version": __version__,
        "created": timestamp,
        "generator": result.metadata.get("generator", "unknown"),
        "config_sha256": result.metadata.get("config_sha256",
                                             config.sha256() if config is not None else ""),
        "conventions": result.metadata.get("conventions", {}),
        "columns": list(result.columns),
        "units": list(result.units),
        "config": config.as_dict() if config is not None else {},
    }


def validate_metadata(doc: dict):
    """Check a sidecar against the documented schema; raises ValueError."""
    for key in METADATA_REQUIRED_KEYS:
        if key not in doc:
            raise ValueError(f"metadata missing required key {key!r}")
    if not isinstance(doc["columns"], list) or not isinstance(doc["units"], list):
        raise ValueError("metadata columns/units must be lists")
    if len(doc["columns"]) != len(doc["units"]):
        raise ValueError("metadata columns/units length mismatch")
    conv = doc["conventions"]
    for key in ("frequency", "conjugation", "jump_basis", "stat_dephasing"):
        if key not in conv:
            raise ValueError(f"metadata conventions missing {key!r}")
    return doc


def write_metadata(result, config, path: str, timestamp: str | None = None):
    doc = metadata_document(result, config, timestamp)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_outputs(result, config, path: str, timestamp: str | None = None):
    """CSV plus its metadata sidecar (<path>.meta.json); returns written paths.

    2D grids go through write_grid_csv / write_grid_svg instead.
    """
    return [write_csv(result, path),
            write_metadata(result, config, path + ".meta.json", timestamp)]


def write_grid_csv(grid, path: str, config=None, timestamp: str | None = None):
    """Long-format CSV of a 2D spectrum grid plus its metadata sidecar."""
    from .sweeps import SweepResult  # local import to avoid a cycle

    rows = []
    for i, wt in enumerate(grid.omega_tau_axis):
        for j, wv in enumerate(grid.omega_t_axis):
            v = grid.values[i, j]
            rows.append((float(wt), float(wv), float(v.real), float(v.imag)))
    res = SweepResult(columns=("omega_tau", "omega_t", "re", "im"),
                      units=("omega", "omega", "arb", "arb"),
                      rows=rows,
                      metadata={"generator": "spectrum-grid",
                                "conventions": {
                                    "frequency": "appendix",
                                    "conjugation": grid.metadata.get("conjugation", ""),
                                    "jump_basis": grid.metadata.get("jump_basis", ""),
                                    "stat_dephasing": False},
                                "config_sha256": ""})
    write_csv(res, path)
    doc = metadata_document(res, config, timestamp)
    doc["grid"] = grid.metadata
    with open(path + ".meta.json", "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# SVG heatmap emitter (no external assets)

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 90, 40, 55


def _diverging_palette(levels: int):
    # blue -> white -> red, linear in each channel
    colors = []
    for k in range(levels):
        t = k / (levels - 1)
        if t < 0.5:
            u = t / 0.5
            r, g, b = int(40 + 215 * u), int(60 + 195 * u), 255
        else:
            u = (t - 0.5) / 0.5
            r, g, b = 255, int(255 - 195 * u), int(255 - 215 * u)
        colors.append(f"#{r:02x}{g:02x}{b:02x}")
    return colors


def _ticks(lo: float, hi: float, n: int = 5):
    return np.linspace(lo, hi, n)


def svg_heatmap(x_axis, y_axis, z, title: str = "", xlabel: str = "omega_tau [omega]",
                ylabel: str = "omega_t [omega]", overlays=None,
                width: int = 760, height: int = 640, levels: int = 64) -> str:
    """Self-contained SVG heatmap of a real-valued grid.

    Linear diverging color map symmetric about zero; horizontal runs of equal
    quantized color are merged into single rects to keep files small. Overlay
    polylines are drawn dashed on top. z is indexed (x_index, y_index)
    following the spectrum grid convention (values[i, j] = (x_i, y_j)).
    """
    x_axis = np.asarray(x_axis, float)
    y_axis = np.asarray(y_axis, float)
    z = np.asarray(z, float)
    nx, ny = z.shape
    if nx != x_axis.size or ny != y_axis.size:
        raise ValueError("heatmap axes do not match grid shape")
    vmax = float(np.max(np.abs(z))) or 1.0
    palette = _diverging_palette(levels)
    quant = np.clip(((z / vmax) * 0.5 + 0.5) * (levels - 1), 0, levels - 1).round().astype(int)

    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B
    cell_w = plot_w / nx
    cell_h = plot_h / ny

    def px(i):  # x pixel of column i (x axis = grid first index)
        return _MARGIN_L + i * cell_w

    def py(j):  # y pixel of row j, origin bottom-left
        return _MARGIN_T + plot_h - (j + 1) * cell_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]
    # heatmap cells, run-length merged along x for each y row
    for j in range(ny):
        i = 0
        while i < nx:
            k = i + 1
            q = quant[i, j]
            while k < nx and quant[k, j] == q:
                k += 1
            parts.append(
                f'<rect x="{px(i):.2f}" y="{py(j):.2f}" width="{(k - i) * cell_w + 0.5:.2f}" '
                f'height="{cell_h + 0.5:.2f}" fill="{palette[q]}"/>'
            )
            i = k
    # frame
    parts.append(f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
                 'fill="none" stroke="black" stroke-width="1"/>')
    # ticks and labels
    for tv in _ticks(x_axis[0], x_axis[-1]):
        frac = (tv - x_axis[0]) / (x_axis[-1] - x_axis[0])
        xpix = _MARGIN_L + frac * plot_w
        parts.append(f'<line x1="{xpix:.1f}" y1="{_MARGIN_T + plot_h}" x2="{xpix:.1f}" '
                     f'y2="{_MARGIN_T + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{xpix:.1f}" y="{_MARGIN_T + plot_h + 19}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{tv:.3g}</text>')
    for tv in _ticks(y_axis[0], y_axis[-1]):
        frac = (tv - y_axis[0]) / (y_axis[-1] - y_axis[0])
        ypix = _MARGIN_T + plot_h - frac * plot_h
        parts.append(f'<line x1="{_MARGIN_L - 5}" y1="{ypix:.1f}" x2="{_MARGIN_L}" '
                     f'y2="{ypix:.1f}" stroke="black"/>')
        parts.append(f'<text x="{_MARGIN_L - 8}" y="{ypix + 4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{tv:.3g}</text>')
    parts.append(f'<text x="{_MARGIN_L + plot_w / 2:.0f}" y="{height - 14}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{xlabel}</text>')
    parts.append(f'<text x="20" y="{_MARGIN_T + plot_h / 2:.0f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 20 {_MARGIN_T + plot_h / 2:.0f})">{ylabel}</text>')
    # overlay polylines (dashed)
    if overlays:
        for xs, ys in overlays:
            pts = []
            for xv, yv in zip(xs, ys):
                if not (x_axis[0] <= xv <= x_axis[-1] and y_axis[0] <= yv <= y_axis[-1]):
                    continue
                fx = (xv - x_axis[0]) / (x_axis[-1] - x_axis[0])
                fy = (yv - y_axis[0]) / (y_axis[-1] - y_axis[0])
                pts.append(f"{_MARGIN_L + fx * plot_w:.1f},{_MARGIN_T + plot_h - fy * plot_h:.1f}")
            if pts:
                parts.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="black" '
                             'stroke-width="1.5" stroke-dasharray="6,4"/>')
    # color scale bar
    bar_x = width - _MARGIN_R + 20
    bar_h = plot_h
    seg = bar_h / levels
    for k in range(levels):
        parts.append(f'<rect x="{bar_x}" y="{_MARGIN_T + bar_h - (k + 1) * seg:.2f}" width="14" '
                     f'height="{seg + 0.5:.2f}" fill="{palette[k]}"/>')
    parts.append(f'<text x="{bar_x + 18}" y="{_MARGIN_T + 8}" font-family="sans-serif" '
                 f'font-size="11">{vmax:.3g}</text>')
    parts.append(f'<text x="{bar_x + 18}" y="{_MARGIN_T + bar_h}" font-family="sans-serif" '
                 f'font-size="11">{-vmax:.3g}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_grid_svg(grid, path: str, title: str = "", overlays=None):
    """Render Re(values) of a spectrum grid to a standalone SVG file."""
    svg = svg_heatmap(grid.omega_tau_axis, grid.omega_t_axis, grid.values.real,
                      title=title, overlays=overlays)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg)
    return path
