"""Adams charts: stem d-m horizontally, filtration m vertically.

Text output is a fixed-width grid (``.`` empty, digit = number of classes,
``o`` after the digit when the bidegree is a d2 source or target) followed by
the list of arrows. SVG output draws one dot per class, side by side for
multiplicity, and a segment per d2 arrow. Both are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .resolution import Generator, Resolution
from .secondary import D2Map


@dataclass
class ChartSpec:
    max_stem: int = 40
    max_filt: int = 15
    dots: dict = field(default_factory=dict)  # (stem, m) -> count
    arrows: list = field(default_factory=list)  # [(source Generator, target Generator)]
    format: str = "text"

    @classmethod
    def from_resolution(cls, res: Resolution, d2: D2Map | None = None, **kw) -> "ChartSpec":
        spec = cls(**kw)
        for g in res.all_generators():
            key = (g.stem, g.m)
            spec.dots[key] = spec.dots.get(key, 0) + 1
        if d2 is not None:
            spec.arrows = d2.sorted_arrows()
        return spec

    def visible(self, stem: int, m: int) -> bool:
        return 0 <= stem <= self.max_stem and 0 <= m <= self.max_filt


def render_text(spec: ChartSpec) -> str:
    lines = [f"# chart stems 0..{spec.max_stem} filtrations 0..{spec.max_filt}"]
    dots = {k: v for k, v in spec.dots.items() if v and spec.visible(*k)}
    if not dots:
        return lines[0] + "\n"
    marked = set()
    for s, t in spec.arrows:
        marked.add((s.stem, s.m))
        marked.add((t.stem, t.m))
    for m in range(spec.max_filt, -1, -1):
        cells = []
        for stem in range(spec.max_stem + 1):
            n = dots.get((stem, m), 0)
            ch = "." if n == 0 else (str(n) if n < 10 else "+")
            cells.append(ch + ("o" if (stem, m) in marked and n else " "))
        lines.append(f"{m:>3} " + " ".join(cells).rstrip())
    axis = " ".join(f"{s % 10} " for s in range(spec.max_stem + 1)).rstrip()
    lines.append("    " + axis)
    for s, t in spec.arrows:
        lines.append(f"d2 ({s.stem},{s.m}) o- ({t.stem},{t.m})  {s} -> {t}")
    return "\n".join(lines) + "\n"


_CELL = 24
_MARGIN = 30


def _dot_xy(spec: ChartSpec, g: Generator) -> tuple[float, float]:
    n = spec.dots.get((g.stem, g.m), 1)
    x = _MARGIN + g.stem * _CELL + _CELL / 2 + (g.q - (n - 1) / 2) * 6
    y = _MARGIN + (spec.max_filt - g.m) * _CELL + _CELL / 2
    return x, y


def _fmt(v: float) -> str:
    return f"{v:.1f}"


def render_svg(spec: ChartSpec) -> str:
    width = 2 * _MARGIN + (spec.max_stem + 1) * _CELL
    height = 2 * _MARGIN + (spec.max_filt + 1) * _CELL
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        '<g stroke="#ddd" stroke-width="0.5">',
    ]
    for s in range(spec.max_stem + 2):
        x = _MARGIN + s * _CELL
        out.append(f'<line x1="{x}" y1="{_MARGIN}" x2="{x}" y2="{height - _MARGIN}"/>')
    for m in range(spec.max_filt + 2):
        y = _MARGIN + m * _CELL
        out.append(f'<line x1="{_MARGIN}" y1="{y}" x2="{width - _MARGIN}" y2="{y}"/>')
    out.append("</g>")
    out.append('<g font-family="monospace" font-size="9" fill="#444">')
    for s in range(0, spec.max_stem + 1, 2):
        x = _MARGIN + s * _CELL + _CELL / 2
        out.append(f'<text x="{_fmt(x)}" y="{height - _MARGIN + 12}" text-anchor="middle">{s}</text>')
    for m in range(spec.max_filt + 1):
        y = _MARGIN + (spec.max_filt - m) * _CELL + _CELL / 2 + 3
        out.append(f'<text x="{_MARGIN - 6}" y="{_fmt(y)}" text-anchor="end">{m}</text>')
    out.append(f'<text x="{width // 2}" y="{height - 4}" text-anchor="middle">d-m</text>')
    out.append(f'<text x="8" y="{height // 2}">m</text>')
    out.append("</g>")
    out.append('<g fill="black">')
    for (stem, m), n in sorted(spec.dots.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if not spec.visible(stem, m):
            continue
        for q in range(n):
            x, y = _dot_xy(spec, Generator(m, stem + m, q))
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5"/>')
    out.append("</g>")
    out.append('<g stroke="black" stroke-width="1" fill="none">')
    for s, t in spec.arrows:
        if not (spec.visible(s.stem, s.m) and spec.visible(t.stem, t.m)):
            continue
        x1, y1 = _dot_xy(spec, s)
        x2, y2 = _dot_xy(spec, t)
        out.append(f'<line class="d2" x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}"/>')
        out.append(f'<circle cx="{_fmt(x1)}" cy="{_fmt(y1)}" r="4.5"/>')
        out.append(f'<circle cx="{_fmt(x2)}" cy="{_fmt(y2)}" r="4.5"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_chart(spec: ChartSpec) -> str:
    if spec.format == "svg":
        return render_svg(spec)
    if spec.format != "text":
        raise ValueError(f"unknown chart format {spec.format!r}")
    return render_text(spec)
