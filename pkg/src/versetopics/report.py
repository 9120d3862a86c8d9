"""Deterministic artifact emitters: SVG heatmaps/scatters, CSV, JSON.

Everything written here is byte-deterministic given identical inputs: no
timestamps, fixed float formatting, fixed palettes, insertion-ordered
JSON.  SVG was chosen over raster output so the files stay diffable in
tests and need no imaging dependency.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from jsonschema import validate as _validate_schema

from .reduce import ReducedMatrix


class ReportError(ValueError):
    """Raised for invalid report inputs or IO failures."""


# Categorical palette for scatter labels (cycled when labels exceed it).
PALETTE = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
]
NOISE_COLOR = "#999999"

_HEAT_LOW = (247, 251, 255)
_HEAT_HIGH = (8, 48, 107)


def _heat_color(value: float) -> str:
    v = min(max(value, 0.0), 1.0)
    channels = (round(lo + (hi - lo) * v) for lo, hi in zip(_HEAT_LOW, _HEAT_HIGH))
    return "#" + "".join(f"{c:02x}" for c in channels)


def heatmap_svg(
    matrix: np.ndarray,
    row_labels: list[str],
    col_labels: list[str],
    path: str | Path,
    title: str = "",
) -> None:
    """Write a cell-per-entry heatmap with scores printed at 2 decimals.

    Scores are clamped to [0, 1] for the color ramp only; the printed
    value is the true one.

    Raises:
        ReportError: empty matrix or label/shape mismatch.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        raise ReportError("heatmap matrix is empty")
    rows, cols = matrix.shape
    if len(row_labels) != rows or len(col_labels) != cols:
        raise ReportError("heatmap labels do not match matrix shape")

    cell, left, top = 46, 80, 50
    width, height = left + cols * cell + 20, top + rows * cell + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
    ]
    if title:
        parts.append(f'<text x="{left}" y="20" font-size="14">{_escape(title)}</text>')
    for j, label in enumerate(col_labels):
        x = left + j * cell + cell // 2
        parts.append(f'<text x="{x}" y="{top - 8}" text-anchor="middle">{_escape(label)}</text>')
    for i, label in enumerate(row_labels):
        y = top + i * cell + cell // 2 + 4
        parts.append(f'<text x="{left - 8}" y="{y}" text-anchor="end">{_escape(label)}</text>')
    for i in range(rows):
        for j in range(cols):
            value = float(matrix[i, j])
            x, y = left + j * cell, top + i * cell
            clamped = min(max(value, 0.0), 1.0)
            text_fill = "#ffffff" if clamped > 0.55 else "#000000"
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{_heat_color(value)}" stroke="#ffffff"/>'
            )
            parts.append(
                f'<text x="{x + cell // 2}" y="{y + cell // 2 + 4}" text-anchor="middle" '
                f'fill="{text_fill}">{value:.2f}</text>'
            )
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")


def scatter_svg(
    proj: ReducedMatrix,
    labels: list[str],
    path: str | Path,
    title: str = "",
) -> None:
    """Write a 2-D scatter with one color per label and a legend.

    Raises:
        ReportError: projection not 2-D, empty labels, or length mismatch.
    """
    if proj.dim != 2:
        raise ReportError(f"scatter needs a 2-D projection, got dim={proj.dim}")
    if not labels or len(labels) != len(proj.item_ids):
        raise ReportError("labels must be nonempty and match the projection length")

    unique: list[str] = []
    for label in labels:
        if label not in unique:
            unique.append(label)
    color_of = {}
    palette_pos = 0
    for label in unique:
        if label in ("-1", "noise"):
            color_of[label] = NOISE_COLOR
        else:
            color_of[label] = PALETTE[palette_pos % len(PALETTE)]
            palette_pos += 1

    width, height, margin = 640, 480, 40
    xs, ys = proj.rows[:, 0], proj.rows[:, 1]
    x_span = float(xs.max() - xs.min()) or 1.0
    y_span = float(ys.max() - ys.min()) or 1.0

    def sx(v: float) -> float:
        return margin + (v - float(xs.min())) / x_span * (width - 2 * margin)

    def sy(v: float) -> float:
        return height - margin - (v - float(ys.min())) / y_span * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width + 220}" height="{height}" '
        f'viewBox="0 0 {width + 220} {height}" font-family="sans-serif" font-size="11">',
    ]
    if title:
        parts.append(f'<text x="{margin}" y="20" font-size="14">{_escape(title)}</text>')
    for i in range(len(proj.item_ids)):
        parts.append(
            f'<circle cx="{sx(float(xs[i])):.3f}" cy="{sy(float(ys[i])):.3f}" r="3" '
            f'fill="{color_of[labels[i]]}" fill-opacity="0.8"/>'
        )
    for pos, label in enumerate(unique):
        y = 40 + pos * 18
        parts.append(f'<rect x="{width + 10}" y="{y - 9}" width="12" height="12" fill="{color_of[label]}"/>')
        parts.append(f'<text x="{width + 28}" y="{y}">{_escape(label)}</text>')
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _write_text(path: str | Path, content: str) -> None:
    try:
        Path(path).write_text(content, encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc


# --------------------------------------------------------------------------
# CSV emitters and their readers (round-trip partners)
# --------------------------------------------------------------------------

def write_matrix_csv(
    matrix: np.ndarray, row_labels: list[str], col_labels: list[str], path: str | Path
) -> None:
    lines = ["," + ",".join(col_labels)]
    for label, row in zip(row_labels, np.asarray(matrix, dtype=np.float64)):
        lines.append(label + "," + ",".join(repr(float(v)) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def read_matrix_csv(path: str | Path) -> tuple[np.ndarray, list[str], list[str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    col_labels = lines[0].split(",")[1:]
    row_labels, rows = [], []
    for line in lines[1:]:
        cells = line.split(",")
        row_labels.append(cells[0])
        rows.append([float(v) for v in cells[1:]])
    return np.array(rows), row_labels, col_labels


def write_projection_csv(proj: ReducedMatrix, labels: list[str], path: str | Path) -> None:
    if len(labels) != len(proj.item_ids):
        raise ReportError("labels must match the projection length")
    lines = ["id,x,y,label"]
    for item_id, row, label in zip(proj.item_ids, proj.rows, labels):
        lines.append(f"{item_id},{float(row[0])!r},{float(row[1])!r},{label}")
    _write_text(path, "\n".join(lines) + "\n")


def read_projection_csv(path: str | Path) -> tuple[list[str], np.ndarray, list[str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()[1:]
    ids, coords, labels = [], [], []
    for line in lines:
        item_id, x, y, label = line.split(",")
        ids.append(item_id)
        coords.append((float(x), float(y)))
        labels.append(label)
    return ids, np.array(coords), labels


def write_assignment_csv(item_ids: list[str], labels: np.ndarray, path: str | Path) -> None:
    lines = ["id,label"]
    for item_id, label in zip(item_ids, labels):
        lines.append(f"{item_id},{int(label)}")
    _write_text(path, "\n".join(lines) + "\n")


def read_assignment_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()[1:]
    ids, labels = [], []
    for line in lines:
        item_id, label = line.split(",")
        ids.append(item_id)
        labels.append(int(label))
    return ids, np.array(labels, dtype=np.int64)


# --------------------------------------------------------------------------
# Schema-validated JSON
# --------------------------------------------------------------------------

def _schema(name: str) -> dict:
    from importlib import resources

    text = resources.files("versetopics.assets.schemas").joinpath(f"{name}.schema.json").read_text(
        encoding="utf-8"
    )
    return json.loads(text)


def write_json(payload: dict, path: str | Path, schema_name: str | None = None) -> None:
    """Write pretty JSON; validates against a shipped schema when named."""
    if schema_name is not None:
        _validate_schema(payload, _schema(schema_name))
    _write_text(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def validate_json(payload: dict, schema_name: str) -> None:
    _validate_schema(payload, _schema(schema_name))
