"""Minimal dependency-free SVG line charts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

PANEL_W, PANEL_H = 420, 300
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 45
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float | None]


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series]
    log_y: bool = False


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.3g}"


def _linear_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _points(s: Series, log_y: bool) -> list[tuple[float, float]]:
    pts = []
    for x, y in zip(s.x, s.y):
        if y is None or not math.isfinite(y):
            continue
        if log_y:
            if y <= 0:
                continue
            y = math.log10(y)
        pts.append((float(x), float(y)))
    return pts


def _panel(panel: Panel, ox: float) -> list[str]:
    all_pts = [_points(s, panel.log_y) for s in panel.series]
    flat = [p for pts in all_pts for p in pts]
    if flat:
        x_lo, x_hi = min(p[0] for p in flat), max(p[0] for p in flat)
        y_lo, y_hi = min(p[1] for p in flat), max(p[1] for p in flat)
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    if panel.log_y:
        y_lo, y_hi = math.floor(y_lo), math.ceil(y_hi)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    if not panel.log_y:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    left, top = ox + MARGIN_L, MARGIN_T
    width, height = PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * width

    def sy(y: float) -> float:
        return top + (y_hi - y) / (y_hi - y_lo) * height

    out = [
        f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(width)}" height="{_fmt(height)}" '
        'fill="none" stroke="black"/>',
        f'<text x="{_fmt(left + width / 2)}" y="{_fmt(top - 10)}" text-anchor="middle">{escape(panel.title)}</text>',
        f'<text x="{_fmt(left + width / 2)}" y="{_fmt(top + height + 35)}" text-anchor="middle">'
        f"{escape(panel.xlabel)}</text>",
        f'<text transform="translate({_fmt(ox + 15)},{_fmt(top + height / 2)}) rotate(-90)" '
        f'text-anchor="middle">{escape(panel.ylabel)}</text>',
    ]
    for t in _linear_ticks(x_lo, x_hi):
        x = sx(t)
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(top + height)}" x2="{_fmt(x)}" y2="{_fmt(top + height + 4)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(top + height + 16)}" text-anchor="middle" font-size="10">{_tick_label(t)}</text>')
    if panel.log_y:
        step = max(1, math.ceil((y_hi - y_lo) / 8))
        y_ticks = [float(e) for e in range(int(y_lo), int(y_hi) + 1, step)]
        labels = [f"1e{int(e)}" for e in y_ticks]
    else:
        y_ticks = _linear_ticks(y_lo, y_hi)
        labels = [_tick_label(t) for t in y_ticks]
    for t, lab in zip(y_ticks, labels):
        y = sy(t)
        out.append(f'<line x1="{_fmt(left - 4)}" y1="{_fmt(y)}" x2="{_fmt(left)}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(left - 6)}" y="{_fmt(y + 3)}" text-anchor="end" font-size="10">{lab}</text>')
    for i, (s, pts) in enumerate(zip(panel.series, all_pts)):
        color = COLORS[i % len(COLORS)]
        if pts:
            coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = top + 14 + 14 * i
        out.append(f'<text x="{_fmt(left + width - 6)}" y="{_fmt(ly)}" text-anchor="end" font-size="10" '
                   f'fill="{color}">{escape(s.label)}</text>')
    return out


def render(panels: Sequence[Panel]) -> str:
    """Panels side by side in a single SVG document."""
    total_w = PANEL_W * len(panels)
    body = []
    for i, panel in enumerate(panels):
        body.extend(_panel(panel, i * PANEL_W))
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{PANEL_H}" '
        f'viewBox="0 0 {total_w} {PANEL_H}" font-family="sans-serif" font-size="12">'
    )
    return "\n".join([head, f'<rect width="{total_w}" height="{PANEL_H}" fill="white"/>', *body, "</svg>"]) + "\n"
