"""Deterministic SVG charts (no timestamps, no randomness, fixed canvas)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .errors import PM25Error

WIDTH, HEIGHT = 960, 540
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 190, 50, 110
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

Kind = Literal["line", "bar", "scatter", "heatmap", "elbow"]
Point = tuple[float, "float | None"]


@dataclass(frozen=True)
class ChartSpec:
    """What to draw.

    ``series`` is a sequence of ``(label, points)``; a point whose y is None
    is a gap. For ``bar`` and ``heatmap`` the x of each point indexes into
    ``categories``; heatmap rows are the series. ``marker_x`` highlights one
    x position (the knee on an elbow plot).
    """

    kind: Kind
    title: str
    x_label: str
    y_label: str
    series: tuple[tuple[str, tuple[Point, ...]], ...]
    categories: tuple[str, ...] = ()
    marker_x: float | None = None

    def __post_init__(self):
        if self.kind not in ("line", "bar", "scatter", "heatmap", "elbow"):
            raise PM25Error(f"unknown chart kind {self.kind!r}")
        series = tuple((str(label), tuple((float(x), None if y is None else float(y)) for x, y in pts))
                       for label, pts in self.series)
        for label, pts in series:
            for x, y in pts:
                if not math.isfinite(x) or (y is not None and not math.isfinite(y)):
                    raise PM25Error(f"series {label!r}: non-finite coordinate ({x}, {y})")
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "categories", tuple(self.categories))


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    ticks, t = [], start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    if ticks[-1] < hi:
        ticks.append(round(t, 10))
    return ticks


def _tick_label(v: float) -> str:
    return str(int(round(v))) if abs(v - round(v)) < 1e-9 else f"{v:g}"


class _Canvas:
    def __init__(self, spec: ChartSpec):
        self.spec = spec
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
            f"<title>{_esc(spec.title)}</title>",
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.0f}" y="28" text-anchor="middle" font-size="18">{_esc(spec.title)}</text>',
        ]
        self.x0, self.x1 = MARGIN_L, WIDTH - MARGIN_R
        self.y0, self.y1 = HEIGHT - MARGIN_B, MARGIN_T

    def add(self, s: str) -> None:
        self.parts.append(s)

    def set_ranges(self, xlo, xhi, ylo, yhi):
        if xhi == xlo:
            xlo, xhi = xlo - 0.5, xhi + 0.5
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def px(self, x: float) -> float:
        return self.x0 + (x - self.xlo) / (self.xhi - self.xlo) * (self.x1 - self.x0)

    def py(self, y: float) -> float:
        return self.y0 - (y - self.ylo) / (self.yhi - self.ylo) * (self.y0 - self.y1)

    def axes(self, xticks: Sequence[tuple[float, str]], yticks: Sequence[float], rotate: bool = False):
        self.add(f'<g class="axes" stroke="#333" stroke-width="1">'
                 f'<line x1="{self.x0}" y1="{self.y0}" x2="{self.x1}" y2="{self.y0}"/>'
                 f'<line x1="{self.x0}" y1="{self.y0}" x2="{self.x0}" y2="{self.y1}"/></g>')
        for t in yticks:
            y = _f(self.py(t))
            self.add(f'<line x1="{self.x0}" y1="{y}" x2="{self.x1}" y2="{y}" stroke="#e5e5e5"/>'
                     f'<text x="{self.x0 - 8}" y="{y}" text-anchor="end" dominant-baseline="middle" '
                     f'font-size="12">{_tick_label(t)}</text>')
        for x, label in xticks:
            if rotate:
                px, py = _f(self.px(x)), self.y0 + 12
                self.add(f'<text x="{px}" y="{py}" text-anchor="end" font-size="10" '
                         f'transform="rotate(-45 {px} {py})">{_esc(label)}</text>')
            else:
                self.add(f'<text x="{_f(self.px(x))}" y="{self.y0 + 20}" text-anchor="middle" '
                         f'font-size="12">{_esc(label)}</text>')
        s = self.spec
        self.add(f'<text x="{(self.x0 + self.x1) / 2:.0f}" y="{HEIGHT - 20}" text-anchor="middle" '
                 f'font-size="14">{_esc(s.x_label)}</text>')
        self.add(f'<text x="20" y="{(self.y0 + self.y1) / 2:.0f}" text-anchor="middle" font-size="14" '
                 f'transform="rotate(-90 20 {(self.y0 + self.y1) / 2:.0f})">{_esc(s.y_label)}</text>')

    def legend(self, labels: Sequence[str]):
        x = WIDTH - MARGIN_R + 20
        for i, label in enumerate(labels):
            y = MARGIN_T + 10 + 20 * i
            self.add(f'<rect x="{x}" y="{y - 6}" width="12" height="12" fill="{PALETTE[i % len(PALETTE)]}"/>'
                     f'<text x="{x + 18}" y="{y}" dominant-baseline="middle" font-size="12">{_esc(label)}</text>')

    def svg(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _y_range(spec: ChartSpec) -> tuple[float, float]:
    ys = [y for _, pts in spec.series for _, y in pts if y is not None]
    lo, hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    lo = min(0.0, lo)
    if hi == lo:
        hi = lo + 1.0
    return lo, hi


def _x_ticks(xs: Sequence[float]) -> list[tuple[float, str]]:
    xs = sorted(set(xs))
    if len(xs) > 12:
        xs = _nice_ticks(xs[0], xs[-1], 6)
    return [(x, _tick_label(x)) for x in xs]


def _segments(points: Sequence[Point]) -> list[list[tuple[float, float]]]:
    segs, cur = [], []
    for x, y in points:
        if y is None:
            if cur:
                segs.append(cur)
            cur = []
        else:
            cur.append((x, y))
    if cur:
        segs.append(cur)
    return segs


def _render_xy(spec: ChartSpec, c: _Canvas) -> None:
    xs = [x for _, pts in spec.series for x, _ in pts]
    lo, hi = _y_range(spec)
    yticks = _nice_ticks(lo, hi)
    c.set_ranges(min(xs), max(xs), yticks[0], yticks[-1])
    c.axes(_x_ticks(xs), yticks)
    for i, (label, pts) in enumerate(spec.series):
        color = PALETTE[i % len(PALETTE)]
        c.add(f'<g class="series" data-label="{_esc(label)}">')
        if spec.kind in ("line", "elbow"):
            for seg in _segments(pts):
                if len(seg) == 1:
                    continue
                coords = " ".join(f"{_f(c.px(x))},{_f(c.py(y))}" for x, y in seg)
                c.add(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        for x, y in pts:
            if y is not None:
                c.add(f'<circle cx="{_f(c.px(x))}" cy="{_f(c.py(y))}" r="4" fill="{color}"/>')
        c.add("</g>")
    if spec.marker_x is not None:
        x = _f(c.px(spec.marker_x))
        c.add(f'<line class="marker" x1="{x}" y1="{c.y0}" x2="{x}" y2="{c.y1}" stroke="#d62728" '
              f'stroke-dasharray="6 4"/>')
    if spec.kind != "elbow" or len(spec.series) > 1:
        c.legend([label for label, _ in spec.series])


def _render_bar(spec: ChartSpec, c: _Canvas) -> None:
    cats = spec.categories or tuple(_tick_label(x) for x in sorted({x for _, p in spec.series for x, _ in p}))
    lo, hi = _y_range(spec)
    yticks = _nice_ticks(lo, hi)
    c.set_ranges(-0.5, len(cats) - 0.5, yticks[0], yticks[-1])
    c.axes([(i, cat) for i, cat in enumerate(cats)], yticks, rotate=len(cats) > 8)
    n = len(spec.series)
    slot = (c.x1 - c.x0) / len(cats)
    width = 0.8 * slot / n
    for i, (label, pts) in enumerate(spec.series):
        color = PALETTE[i % len(PALETTE)]
        c.add(f'<g class="series" data-label="{_esc(label)}">')
        for x, y in pts:
            if y is None:
                continue
            left = c.px(x) - 0.4 * slot + i * width
            top, base = c.py(max(y, 0.0)), c.py(min(y, 0.0))
            c.add(f'<rect x="{_f(left)}" y="{_f(top)}" width="{_f(width)}" height="{_f(base - top)}" '
                  f'fill="{color}"/>')
        c.add("</g>")
    c.legend([label for label, _ in spec.series])


def _heat_color(v: float) -> str:
    """Diverging blue-white-red over [-1, 1]."""
    t = max(-1.0, min(1.0, v))
    if t >= 0:
        r, g, b = 255, round(255 * (1 - t)), round(255 * (1 - t))
    else:
        r, g, b = round(255 * (1 + t)), round(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def _render_heatmap(spec: ChartSpec, c: _Canvas) -> None:
    rows = len(spec.series)
    cols = len(spec.categories) or max(int(x) for _, p in spec.series for x, _ in p) + 1
    size = min((c.x1 - c.x0) / cols, (c.y0 - c.y1) / rows)
    for i, (label, pts) in enumerate(spec.series):
        y = c.y1 + i * size
        c.add(f'<text x="{c.x0 - 8}" y="{_f(y + size / 2)}" text-anchor="end" dominant-baseline="middle" '
              f'font-size="12">{_esc(label)}</text>')
        for x, v in pts:
            left = c.x0 + int(x) * size
            if v is None:
                continue
            c.add(f'<rect class="cell" x="{_f(left)}" y="{_f(y)}" width="{_f(size)}" height="{_f(size)}" '
                  f'fill="{_heat_color(v)}" stroke="white"/>'
                  f'<text x="{_f(left + size / 2)}" y="{_f(y + size / 2)}" text-anchor="middle" '
                  f'dominant-baseline="middle" font-size="14">{v:.2f}</text>')
    for j, cat in enumerate(spec.categories):
        c.add(f'<text x="{_f(c.x0 + (j + 0.5) * size)}" y="{_f(c.y1 + rows * size + 20)}" '
              f'text-anchor="middle" font-size="12">{_esc(cat)}</text>')


def render_chart(spec: ChartSpec) -> str:
    if not spec.series:
        raise PM25Error("render_chart: no series to draw")
    c = _Canvas(spec)
    if spec.kind == "bar":
        _render_bar(spec, c)
    elif spec.kind == "heatmap":
        _render_heatmap(spec, c)
    else:
        _render_xy(spec, c)
    return c.svg()


def year_series(values: dict[int, float], years: Sequence[int]) -> tuple[Point, ...]:
    """Points for ``years`` with None for missing years (drawn as gaps)."""
    return tuple((float(y), values.get(y)) for y in years)
