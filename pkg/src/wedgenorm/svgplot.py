"""A small self-contained SVG line/scatter plot writer (no external assets)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

PALETTE = ("#1f3b99", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085")


@dataclass
class Series:
    label: str
    x: list[float]
    y: list[float]
    style: str = "line"  # "line", "scatter" or "both"


@dataclass
class Figure:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    width: int = 640
    height: int = 420
    series: list[Series] = field(default_factory=list)
    hlines: list[tuple[str, float]] = field(default_factory=list)

    def add(self, label, x, y, style="line"):
        self.series.append(Series(label, [float(v) for v in x], [float(v) for v in y], style))
        return self

    def hline(self, label, y):
        self.hlines.append((label, float(y)))
        return self

    def _limits(self):
        xs = [v for s in self.series for v in s.x if math.isfinite(v)]
        ys = [v for s in self.series for v in s.y if math.isfinite(v)] + [y for _, y in self.hlines]
        if not xs:
            xs = [0.0, 1.0]
        if not ys:
            ys = [0.0, 1.0]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        if x1 == x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        pad = 0.05 * (y1 - y0) if y1 > y0 else 0.5
        return x0, x1, y0 - pad, y1 + pad

    def render(self) -> str:
        W, H = self.width, self.height
        left, right, top, bottom = 70, 20, 40, 55
        x0, x1, y0, y1 = self._limits()

        def sx(v):
            return left + (v - x0) / (x1 - x0) * (W - left - right)

        def sy(v):
            return H - bottom - (v - y0) / (y1 - y0) * (H - top - bottom)

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
               f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
               f'<rect width="{W}" height="{H}" fill="white"/>']
        # axes and ticks
        out.append(f'<line x1="{left}" y1="{H - bottom}" x2="{W - right}" y2="{H - bottom}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{H - bottom}" stroke="black"/>')
        for k in range(6):
            xv = x0 + k * (x1 - x0) / 5
            yv = y0 + k * (y1 - y0) / 5
            out.append(f'<text x="{sx(xv):.1f}" y="{H - bottom + 16}" text-anchor="middle">{xv:.4g}</text>')
            out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.4g}</text>')
        out.append(f'<text x="{(left + W - right) / 2}" y="{H - 12}" text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="16" y="{(top + H - bottom) / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {(top + H - bottom) / 2})">{escape(self.ylabel)}</text>')
        out.append(f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(self.title)}</text>')

        legend = []
        for label, y in self.hlines:
            out.append(f'<line x1="{left}" y1="{sy(y):.1f}" x2="{W - right}" y2="{sy(y):.1f}" '
                       f'stroke="#2e86de" stroke-dasharray="6,4"/>')
            legend.append((label, "#2e86de"))
        for i, s in enumerate(self.series):
            color = PALETTE[i % len(PALETTE)]
            pts = [(sx(a), sy(b)) for a, b in zip(s.x, s.y) if math.isfinite(a) and math.isfinite(b)]
            if s.style in ("line", "both") and len(pts) > 1:
                path = " ".join(f"{a:.1f},{b:.1f}" for a, b in pts)
                out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            if s.style in ("scatter", "both"):
                out.extend(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="3" fill="{color}"/>' for a, b in pts)
            legend.append((s.label, color))
        for k, (label, color) in enumerate(legend):
            y = top + 6 + 16 * k
            out.append(f'<rect x="{W - right - 170}" y="{y - 8}" width="10" height="10" fill="{color}"/>')
            out.append(f'<text x="{W - right - 155}" y="{y + 1}">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.render())
