"""Static SVG plots of region CSV files, written without any plotting backend.

Output depends only on the input points and labels, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

from .fileio import read_region_csv

SIZE = 520
MARGIN = 60
PALETTE = ["#000000", "#1f5fbf", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#7f8c8d"]
AXIS_LABELS = {"prep": ("H(A|rho)", "H(B|rho)"), "nn": ("N(M,A)", "N(M,B)"), "nd": ("N(M,A)", "D(M,B)")}


def _sx(x: float) -> float:
    return MARGIN + x * (SIZE - 2 * MARGIN)


def _sy(y: float) -> float:
    return SIZE - MARGIN - y * (SIZE - 2 * MARGIN)


def _series(points, label: str):
    groups: dict[tuple[str, str], list] = {}
    for p in points:
        role = "boundary" if p.meta.startswith("boundary") else "sample"
        groups.setdefault((p.kind, role), []).append(p)
    return [(f"{label}: {kind} {role}", role, pts) for (kind, role), pts in groups.items()]


def render_svg(series) -> str:
    """``series`` is a list of ``(label, role, points)``; role is ``boundary`` or ``sample``."""
    kinds = sorted({p.kind for _, _, pts in series for p in pts})
    xl, yl = AXIS_LABELS.get(kinds[0], ("x", "y")) if len(kinds) == 1 else ("x", "y")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE - 2 * MARGIN}" '
        f'height="{SIZE - 2 * MARGIN}" fill="none" stroke="#000000" stroke-width="1"/>',
    ]
    for i in range(5):
        t = i / 4
        out.append(
            f'<line x1="{_sx(t):.3f}" y1="{_sy(0):.3f}" x2="{_sx(t):.3f}" y2="{_sy(0) + 5:.3f}" stroke="#000000"/>'
        )
        out.append(
            f'<text x="{_sx(t):.3f}" y="{_sy(0) + 18:.3f}" font-size="11" text-anchor="middle">{t:.2f}</text>'
        )
        out.append(
            f'<line x1="{_sx(0) - 5:.3f}" y1="{_sy(t):.3f}" x2="{_sx(0):.3f}" y2="{_sy(t):.3f}" stroke="#000000"/>'
        )
        out.append(
            f'<text x="{_sx(0) - 8:.3f}" y="{_sy(t) + 4:.3f}" font-size="11" text-anchor="end">{t:.2f}</text>'
        )
    out.append(
        f'<text x="{SIZE / 2:.3f}" y="{SIZE - 15}" font-size="13" text-anchor="middle">{escape(xl)}</text>'
    )
    out.append(
        f'<text x="15" y="{SIZE / 2:.3f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 15 {SIZE / 2:.3f})">{escape(yl)}</text>'
    )
    for i, (label, role, pts) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        if role == "boundary":
            coords = " ".join(f"{_sx(p.x):.3f},{_sy(p.y):.3f}" for p in pts)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        else:
            out.append(f'<g fill="{color}" fill-opacity="0.6">')
            out.extend(f'<circle cx="{_sx(p.x):.3f}" cy="{_sy(p.y):.3f}" r="1.2"/>' for p in pts)
            out.append("</g>")
        ly = MARGIN + 14 + 16 * i
        out.append(
            f'<rect x="{SIZE - MARGIN - 170}" y="{ly - 9}" width="10" height="10" fill="{color}"/>'
        )
        out.append(
            f'<text x="{SIZE - MARGIN - 155}" y="{ly}" font-size="11">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_csvs(csv_paths, out_svg) -> None:
    if not csv_paths:
        raise ValueError("no CSV files given")
    series = []
    for path in csv_paths:
        series.extend(_series(read_region_csv(path), Path(path).stem))
    Path(out_svg).write_text(render_svg(series), encoding="utf-8")
