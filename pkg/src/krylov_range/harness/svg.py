"""Minimal SVG line and polygon plots built from polylines."""

from __future__ import annotations

import math
from datetime import datetime, timezone
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_plot", "polygon_plot"]

_W, _H = 640, 420
_L, _R, _T, _B = 70, 150, 40, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        a, b = math.floor(lo), math.ceil(hi)
        return [float(k) for k in range(a, b + 1)]
    if hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / 4))
    for mult in (1, 2, 5, 10):
        if (hi - lo) / (step * mult) <= 6:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + step / 2, step)]


def _frame(title: str, xlabel: str, ylabel: str, timestamp: bool) -> list[str]:
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">']
    if timestamp:
        out.append(f"<!-- generated {datetime.now(timezone.utc).isoformat(timespec='seconds')} -->")
    out.append(f'<rect width="{_W}" height="{_H}" fill="white"/>')
    out.append(f'<text x="{_L + (_W - _L - _R) / 2}" y="22" text-anchor="middle" '
               f'font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{_L + (_W - _L - _R) / 2}" y="{_H - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{_T + (_H - _T - _B) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {_T + (_H - _T - _B) / 2})">{escape(ylabel)}</text>')
    return out


def _axes(xr, yr, logx, logy, out):
    x0, x1 = xr
    y0, y1 = yr
    pw, ph = _W - _L - _R, _H - _T - _B

    def sx(x):
        return _L + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return _T + ph - (y - y0) / (y1 - y0) * ph

    out.append(f'<rect x="{_L}" y="{_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1, logx):
        if x0 - 1e-12 <= t <= x1 + 1e-12:
            lab = f"1e{int(t)}" if logx else _fmt(t)
            out.append(f'<line x1="{sx(t):.2f}" y1="{_T + ph}" x2="{sx(t):.2f}" y2="{_T + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{sx(t):.2f}" y="{_T + ph + 18}" text-anchor="middle">{lab}</text>')
    for t in _ticks(y0, y1, logy):
        if y0 - 1e-12 <= t <= y1 + 1e-12:
            lab = f"1e{int(t)}" if logy else _fmt(t)
            out.append(f'<line x1="{_L - 5}" y1="{sy(t):.2f}" x2="{_L}" y2="{sy(t):.2f}" stroke="black"/>')
            out.append(f'<text x="{_L - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{lab}</text>')
    return sx, sy


def _range(vals: list[np.ndarray], pad: float) -> tuple[float, float]:
    v = np.concatenate([np.asarray(a, float).ravel() for a in vals]) if vals else np.zeros(1)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        lo, hi = lo - 0.5, hi + 0.5
    d = (hi - lo) * pad
    return lo - d, hi + d


def _legend(labels, out):
    for i, lab in enumerate(labels):
        y = _T + 14 + 18 * i
        c = _COLORS[i % len(_COLORS)]
        out.append(f'<line x1="{_W - _R + 10}" y1="{y}" x2="{_W - _R + 30}" y2="{y}" stroke="{c}" stroke-width="2"/>')
        out.append(f'<text x="{_W - _R + 35}" y="{y + 4}">{escape(str(lab))}</text>')


def line_plot(series: dict, title: str = "", xlabel: str = "", ylabel: str = "",
              logx: bool = False, logy: bool = False, timestamp: bool = False) -> str:
    """SVG line plot of ``{label: (x, y)}``; non-positive values are dropped on log axes."""
    clean = {}
    for lab, (x, y) in series.items():
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        ok = np.isfinite(x) & np.isfinite(y)
        if logx:
            ok &= x > 0
        if logy:
            ok &= y > 0
        x, y = x[ok], y[ok]
        clean[lab] = (np.log10(x) if logx else x, np.log10(y) if logy else y)
    out = _frame(title, xlabel, ylabel, timestamp)
    xr = _range([c[0] for c in clean.values()], 0.02)
    yr = _range([c[1] for c in clean.values()], 0.05)
    sx, sy = _axes(xr, yr, logx, logy, out)
    for i, (x, y) in enumerate(clean.values()):
        if x.size == 0:
            continue
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{_COLORS[i % len(_COLORS)]}" stroke-width="1.5"/>')
    _legend(list(clean), out)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def polygon_plot(polygons: dict, points: dict | None = None, title: str = "",
                 timestamp: bool = False) -> str:
    """SVG of closed polygons ``{label: complex vertices}`` and point sets, equal aspect."""
    points = points or {}
    allv = [np.asarray(v, complex) for v in list(polygons.values()) + list(points.values())]
    out = _frame(title, "Re", "Im", timestamp)
    xr = _range([v.real for v in allv], 0.05)
    yr = _range([v.imag for v in allv], 0.05)
    # equal aspect: widen the smaller data range to the panel ratio
    pw, ph = _W - _L - _R, _H - _T - _B
    sxr, syr = (xr[1] - xr[0]) / pw, (yr[1] - yr[0]) / ph
    s = max(sxr, syr)
    cx, cy = sum(xr) / 2, sum(yr) / 2
    xr = (cx - s * pw / 2, cx + s * pw / 2)
    yr = (cy - s * ph / 2, cy + s * ph / 2)
    sx, sy = _axes(xr, yr, False, False, out)
    labels = []
    for i, (lab, v) in enumerate(polygons.items()):
        v = np.asarray(v, complex)
        pts = " ".join(f"{sx(z.real):.2f},{sy(z.imag):.2f}" for z in v)
        out.append(f'<polygon points="{pts}" fill="none" stroke="{_COLORS[i % len(_COLORS)]}" stroke-width="1.5"/>')
        labels.append(lab)
    k = len(labels)
    for j, (lab, v) in enumerate(points.items()):
        c = _COLORS[(k + j) % len(_COLORS)]
        for z in np.asarray(v, complex):
            out.append(f'<circle cx="{sx(z.real):.2f}" cy="{sy(z.imag):.2f}" r="1.5" fill="{c}"/>')
        labels.append(lab)
    _legend(labels, out)
    out.append("</svg>")
    return "\n".join(out) + "\n"
