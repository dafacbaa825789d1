"""Minimal self-contained SVG line plots.

Masked samples (diverged points) break their polyline and are shaded.
Explicit ``windows`` replace the mask-derived shading, which lets callers
shade analytically known intervals rather than grid-resolved ones. Shaded
rectangles are at least one pixel wide, so each also carries its exact
data-space bounds in ``data-lo`` and ``data-hi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union
from xml.sax.saxutils import escape

__all__ = ["Series", "EmptySeriesError", "emit_plot", "masked_intervals"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


class EmptySeriesError(ValueError):
    pass


@dataclass(frozen=True)
class Series:
    x: Sequence[float]
    y: Sequence[float]
    mask: Optional[Sequence[bool]] = None
    label: str = ""


SeriesLike = Union[Series, tuple]


def _as_series(item: SeriesLike, idx: int) -> Series:
    if isinstance(item, Series):
        s = item
    else:
        s = Series(*item)
    mask = list(s.mask) if s.mask is not None else [False] * len(s.x)
    if not (len(s.x) == len(s.y) == len(mask)):
        raise ValueError("x, y and mask must have equal lengths")
    return Series(list(s.x), list(s.y), mask, s.label or f"series {idx + 1}")


def masked_intervals(x: Sequence[float], mask: Sequence[bool]) -> list[tuple[float, float]]:
    """Contiguous masked runs, widened halfway to the neighbouring samples."""
    out = []
    n = len(x)
    i = 0
    while i < n:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and mask[j + 1]:
            j += 1
        lo = 0.5 * (x[i - 1] + x[i]) if i > 0 else x[i]
        hi = 0.5 * (x[j] + x[j + 1]) if j + 1 < n else x[j]
        out.append((lo, hi))
        i = j + 1
    return out


def _merge(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    merged: list[tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return merged


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-9 * span:
        out.append(0.0 if abs(v) < 1e-12 * span else v)
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def emit_plot(
    series: Sequence[SeriesLike],
    *,
    windows: Optional[Sequence[tuple[float, float]]] = None,
    width: int = 640,
    height: int = 400,
    x_label: str = "ct/d",
    y_label: str = "E/eps0, F d/eps0",
    title: str = "",
) -> str:
    """Render line series as an SVG document string."""
    if not series:
        raise EmptySeriesError("nothing to plot")
    items = [_as_series(s, i) for i, s in enumerate(series)]
    if any(len(s.x) == 0 for s in items):
        raise EmptySeriesError("a series has no samples")

    xs = [x for s in items for x in s.x]
    ys = []
    for s in items:
        for y, m in zip(s.y, s.mask):
            if m:
                continue
            if not math.isfinite(y):
                raise ValueError("non-finite value outside a masked region")
            ys.append(y)
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = min(ys + [0.0]), max(ys + [0.0])
    if y_hi == y_lo:
        y_lo, y_hi = -1.0, 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, right, top, bottom = 70, 20, 30 if title else 15, 45
    pw, ph = width - left - right, height - top - bottom

    def px(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y: float) -> float:
        return top + (y_hi - y) / (y_hi - y_lo) * ph

    if windows is None:
        shade = _merge([iv for s in items for iv in masked_intervals(s.x, s.mask)])
    else:
        shade = [(max(lo, x_lo), min(hi, x_hi)) for lo, hi in windows if hi >= x_lo and lo <= x_hi]

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="18" text-anchor="middle">{escape(title)}</text>')
    for lo, hi in shade:
        out.append(
            f'<rect class="masked" x="{_fmt(px(lo))}" y="{top}" width="{_fmt(max(px(hi) - px(lo), 1.0))}" '
            f'height="{ph}" fill="#cccccc" fill-opacity="0.6" data-lo="{lo!r}" data-hi="{hi!r}"/>'
        )
    # axes
    out.append(
        f'<line class="axis" x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>'
    )
    out.append(f'<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>')
    for v in _ticks(x_lo, x_hi):
        out.append(
            f'<text x="{_fmt(px(v))}" y="{top + ph + 15}" font-size="10" text-anchor="middle">{v:g}</text>'
        )
    for v in _ticks(y_lo, y_hi):
        out.append(
            f'<text x="{left - 5}" y="{_fmt(py(v) + 3)}" font-size="10" text-anchor="end">{v:.3g}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.2f}" y="{height - 8}" text-anchor="middle">{escape(x_label)}</text>'
    )
    out.append(
        f'<text x="15" y="{top + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {top + ph / 2:.2f})">{escape(y_label)}</text>'
    )
    out.append(
        f'<line class="zero" x1="{left}" y1="{_fmt(py(0.0))}" x2="{left + pw}" y2="{_fmt(py(0.0))}" '
        f'stroke="gray" stroke-dasharray="4 3"/>'
    )
    for i, s in enumerate(items):
        color = _COLORS[i % len(_COLORS)]
        run: list[str] = []
        runs = []
        for x, y, m in zip(s.x, s.y, s.mask):
            if m:
                if run:
                    runs.append(run)
                run = []
                continue
            run.append(f"{_fmt(px(x))},{_fmt(py(y))}")
        if run:
            runs.append(run)
        for r in runs:
            out.append(
                f'<polyline class="series" points="{" ".join(r)}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
    if len(items) > 1:
        out.append('<g class="legend">')
        for i, s in enumerate(items):
            y = top + 12 + 16 * i
            color = _COLORS[i % len(_COLORS)]
            out.append(
                f'<line x1="{left + pw - 110}" y1="{y}" x2="{left + pw - 90}" y2="{y}" stroke="{color}" stroke-width="2"/>'
            )
            out.append(f'<text x="{left + pw - 85}" y="{y + 4}" font-size="11">{escape(s.label)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
