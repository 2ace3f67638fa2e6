"""Minimal deterministic SVG renderer for the three figure analogues."""

import math
from typing import Optional, Sequence

import numpy as np

W, H, PAD = 480, 320, 40


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _frame(title: str, body: list) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">')
    axes = (f'<rect x="{PAD}" y="{PAD}" width="{W - 2 * PAD}" height="{H - 2 * PAD}" '
            f'fill="none" stroke="black"/>')
    label = f'<text x="{W // 2}" y="{PAD // 2}" text-anchor="middle" font-size="12">{title}</text>'
    return "\n".join([head, axes, label] + body + ["</svg>"]) + "\n"


class _Scale:
    def __init__(self, lo, hi, a, b):
        if hi <= lo:
            hi = lo + 1.0
        self.lo, self.hi, self.a, self.b = lo, hi, a, b

    def __call__(self, v):
        return self.a + (v - self.lo) / (self.hi - self.lo) * (self.b - self.a)


def histogram_svg(counts: Sequence[int], edges: Sequence[float], sigma2: Optional[float] = None,
                  title: str = "histogram") -> str:
    """Density histogram (in-range bins only) with an optional N(0, sigma2) overlay."""
    counts = np.asarray(counts, dtype=np.float64)
    edges = np.asarray(edges, dtype=np.float64)
    total = counts.sum()
    width = np.diff(edges)
    dens = counts / (total * width) if total > 0 else np.zeros_like(counts)
    ymax = float(dens.max()) if dens.size else 1.0
    if sigma2:
        ymax = max(ymax, 1.0 / math.sqrt(2 * math.pi * sigma2))
    sx = _Scale(edges[0], edges[-1], PAD, W - PAD)
    sy = _Scale(0.0, ymax * 1.05, H - PAD, PAD)
    body = []
    for i, v in enumerate(dens):
        x0, x1 = sx(edges[i]), sx(edges[i + 1])
        y = sy(v)
        body.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y)}" width="{_fmt(x1 - x0)}" '
                    f'height="{_fmt(H - PAD - y)}" fill="#9ecae1" stroke="none"/>')
    if sigma2:
        xs = np.linspace(edges[0], edges[-1], 201)
        ys = np.exp(-xs ** 2 / (2 * sigma2)) / math.sqrt(2 * math.pi * sigma2)
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys))
        body.append(f'<polyline points="{pts}" fill="none" stroke="black"/>')
    return _frame(title, body)


def scatter_svg(values: Sequence[float], title: str = "scatter") -> str:
    """Values against their index."""
    v = np.asarray(values, dtype=np.float64)
    lo, hi = (float(v.min()), float(v.max())) if v.size else (0.0, 1.0)
    sx = _Scale(0, max(len(v) - 1, 1), PAD, W - PAD)
    sy = _Scale(lo, hi, H - PAD, PAD)
    body = [f'<circle cx="{_fmt(sx(i))}" cy="{_fmt(sy(y))}" r="1" fill="black"/>'
            for i, y in enumerate(v)]
    return _frame(title, body)


def loglog_svg(ns: Sequence[float], values: Sequence[float], slope: Optional[float] = None,
               title: str = "log-log") -> str:
    """Points on log-log axes with an optional reference line through the last point."""
    lx = np.log(np.asarray(ns, dtype=np.float64))
    ly = np.log(np.asarray(values, dtype=np.float64))
    sx = _Scale(float(lx.min()), float(lx.max()), PAD, W - PAD)
    lo, hi = float(ly.min()), float(ly.max())
    if slope is not None:
        ref = ly[-1] + slope * (lx - lx[-1])
        lo, hi = min(lo, float(ref.min())), max(hi, float(ref.max()))
    sy = _Scale(lo, hi, H - PAD, PAD)
    body = [f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="2" fill="black"/>'
            for x, y in zip(lx, ly)]
    if slope is not None:
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(lx, ref))
        body.append(f'<polyline points="{pts}" fill="none" stroke="red"/>')
    return _frame(title, body)
