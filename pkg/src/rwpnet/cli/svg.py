"""Minimal standalone SVG output: line charts and heatmaps."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
           "#bcbd22", "#17becf"]
WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 55


def _n(v):
    return f"{v:.2f}"


def _ticks(lo, hi, log=False, count=5):
    if log:
        a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        return [10.0**e for e in range(a, b + 1) if lo * (1 - 1e-9) <= 10.0**e <= hi * (1 + 1e-9)]
    if hi == lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    first = math.ceil(lo / step - 1e-9) * step
    return [first + i * step for i in range(int((hi - first) / step + 1e-9) + 1)]


def _label(v):
    return f"{v:.4g}"


class _Axes:
    def __init__(self, xlo, xhi, ylo, yhi, logx=False, logy=False, width=WIDTH, height=HEIGHT, right=RIGHT):
        self.logx, self.logy = logx, logy
        self.x0, self.x1 = LEFT, width - right
        self.y0, self.y1 = height - BOTTOM, TOP
        self.tx = (math.log10 if logx else float)
        self.ty = (math.log10 if logy else float)
        self.xlo, self.xhi = self.tx(xlo), self.tx(xhi)
        self.ylo, self.yhi = self.ty(ylo), self.ty(yhi)
        if self.xhi == self.xlo:
            self.xhi = self.xlo + 1
        if self.yhi == self.ylo:
            self.yhi = self.ylo + 1
        self.raw = (xlo, xhi, ylo, yhi)

    def px(self, x):
        return self.x0 + (self.tx(x) - self.xlo) / (self.xhi - self.xlo) * (self.x1 - self.x0)

    def py(self, y):
        return self.y0 + (self.ty(y) - self.ylo) / (self.yhi - self.ylo) * (self.y1 - self.y0)

    def frame(self, xlabel, ylabel, title):
        xlo, xhi, ylo, yhi = self.raw
        out = [f'<rect x="{self.x0}" y="{self.y1}" width="{self.x1 - self.x0}" height="{self.y0 - self.y1}" '
               'fill="none" stroke="#333"/>']
        for t in _ticks(xlo, xhi, self.logx):
            x = self.px(t)
            out.append(f'<line x1="{_n(x)}" y1="{self.y0}" x2="{_n(x)}" y2="{self.y0 + 5}" stroke="#333"/>')
            out.append(f'<text x="{_n(x)}" y="{self.y0 + 18}" text-anchor="middle">{_label(t)}</text>')
        for t in _ticks(ylo, yhi, self.logy):
            y = self.py(t)
            out.append(f'<line x1="{self.x0 - 5}" y1="{_n(y)}" x2="{self.x0}" y2="{_n(y)}" stroke="#333"/>')
            out.append(f'<text x="{self.x0 - 8}" y="{_n(y + 4)}" text-anchor="end">{_label(t)}</text>')
        cx = (self.x0 + self.x1) / 2
        out.append(f'<text x="{_n(cx)}" y="{self.y0 + 40}" text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text transform="translate(18,{_n((self.y0 + self.y1) / 2)}) rotate(-90)" '
                   f'text-anchor="middle">{escape(ylabel)}</text>')
        out.append(f'<text x="{_n(cx)}" y="22" text-anchor="middle" font-weight="bold">{escape(title)}</text>')
        return out


def _document(body, width=WIDTH, height=HEIGHT):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>"]) + "\n"


def line_chart(path, x, series, xlabel="", ylabel="", title="", logx=False, logy=False, step=False):
    """``series`` is a list of ``(label, y)``; non-finite points break the line."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for _, y in series]
    finite = np.concatenate([y[np.isfinite(y) & ((y > 0) if logy else True)] for y in ys]) if ys else np.empty(0)
    ylo, yhi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if not logy:
        pad = 0.05 * (yhi - ylo or 1.0)
        ylo, yhi = ylo - pad, yhi + pad
    ax = _Axes(float(x.min()), float(x.max()), ylo, yhi, logx, logy)
    body = ax.frame(xlabel, ylabel, title)
    for i, ((label, _), y) in enumerate(zip(series, ys)):
        colour = PALETTE[i % len(PALETTE)]
        pieces, current = [], []
        for xi, yi in zip(x, y):
            if np.isfinite(yi) and (yi > 0 or not logy):
                if step and current:
                    current.append((ax.px(xi), float(current[-1][1])))
                current.append((ax.px(xi), ax.py(yi)))
            elif current:
                pieces.append(current)
                current = []
        if current:
            pieces.append(current)
        for piece in pieces:
            pts = " ".join(f"{_n(px)},{_n(py)}" for px, py in piece)
            body.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.6"/>')
        ly = TOP + 14 + 16 * i
        body.append(f'<line x1="{ax.x1 + 10}" y1="{ly}" x2="{ax.x1 + 30}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        body.append(f'<text x="{ax.x1 + 35}" y="{ly + 4}">{escape(label)}</text>')
    Path(path).write_text(_document(body))
    return Path(path)


def _colour(t, diverging):
    t = min(max(t, 0.0), 1.0)
    if diverging:
        # blue - white - red
        if t < 0.5:
            s = t / 0.5
            r, g, b = 0.23 + 0.77 * s, 0.30 + 0.70 * s, 0.75 + 0.25 * s
        else:
            s = (t - 0.5) / 0.5
            r, g, b = 1.0 - 0.29 * s, 1.0 - 0.98 * s, 1.0 - 0.85 * s
    else:
        # dark blue - teal - yellow
        stops = [(0.0, (0.27, 0.00, 0.33)), (0.5, (0.13, 0.57, 0.55)), (1.0, (0.99, 0.91, 0.14))]
        for (t0, c0), (t1, c1) in zip(stops, stops[1:]):
            if t <= t1:
                s = (t - t0) / (t1 - t0)
                r, g, b = (c0[i] + s * (c1[i] - c0[i]) for i in range(3))
                break
    return f"#{int(round(255 * r)):02x}{int(round(255 * g)):02x}{int(round(255 * b)):02x}"


def heatmap(path, xs, ys, z, xlabel="x", ylabel="y", title="", diverging=False):
    """``z[i, j]`` is the value at ``(xs[i], ys[j])``; cells are centred on the grid points."""
    xs, ys, z = np.asarray(xs, float), np.asarray(ys, float), np.asarray(z, float)
    fin = z[np.isfinite(z)]
    lo, hi = (float(fin.min()), float(fin.max())) if fin.size else (0.0, 1.0)
    if diverging:
        m = max(abs(lo), abs(hi)) or 1.0
        lo, hi = -m, m
    span = hi - lo or 1.0

    def edges(v):
        mid = 0.5 * (v[1:] + v[:-1])
        return np.concatenate([[v[0] - (mid[0] - v[0])], mid, [v[-1] + (v[-1] - mid[-1])]])

    ex, ey = edges(xs), edges(ys)
    ax = _Axes(ex[0], ex[-1], ey[0], ey[-1], right=120)
    body = []
    for i in range(xs.size):
        for j in range(ys.size):
            if not np.isfinite(z[i, j]):
                continue
            x0, x1 = ax.px(ex[i]), ax.px(ex[i + 1])
            y0, y1 = ax.py(ey[j + 1]), ax.py(ey[j])
            body.append(f'<rect x="{_n(x0)}" y="{_n(y0)}" width="{_n(x1 - x0 + 0.3)}" height="{_n(y1 - y0 + 0.3)}" '
                        f'fill="{_colour((z[i, j] - lo) / span, diverging)}"/>')
    body += ax.frame(xlabel, ylabel, title)
    bx = ax.x1 + 20
    for k in range(50):
        t0 = k / 50
        y = ax.y0 - (k + 1) / 50 * (ax.y0 - ax.y1)
        body.append(f'<rect x="{bx}" y="{_n(y)}" width="16" height="{_n((ax.y0 - ax.y1) / 50 + 0.3)}" '
                    f'fill="{_colour(t0 + 0.01, diverging)}"/>')
    for t in (0.0, 0.5, 1.0):
        y = ax.y0 - t * (ax.y0 - ax.y1)
        body.append(f'<text x="{bx + 22}" y="{_n(y + 4)}">{_label(lo + t * span)}</text>')
    Path(path).write_text(_document(body))
    return Path(path)
