"""Deterministic SVG rendering of a concretization and its ribbon ends."""

from __future__ import annotations

from fractions import Fraction

from .core import GeometricType, require_valid
from .oracle import ribbons

_SQUARE = 180
_GAP = 40
_MARGIN = 30

_GEN_COLORS = ("#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_svg(T: GeometricType, m: int | None = None) -> str:
    """One square per rectangle with its bands and sign arrows; with ``m``,
    ribbon end intervals for every generation up to ``m``."""
    require_valid(T)
    width = _MARGIN * 2 + T.n * _SQUARE + (T.n - 1) * _GAP
    height = _MARGIN * 2 + _SQUARE + 40
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]

    def origin(k: int) -> tuple[float, float]:
        return _MARGIN + (k - 1) * (_SQUARE + _GAP), _MARGIN + 20

    for k in range(1, T.n + 1):
        x0, y0 = origin(k)
        out.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_SQUARE}" height="{_SQUARE}" '
            'fill="none" stroke="black" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{_fmt(x0 + _SQUARE / 2)}" y="{_fmt(y0 - 6)}" font-size="13" '
            f'text-anchor="middle" font-family="monospace">R{k}</text>'
        )
        hk = T.h[k - 1]
        for j in range(1, hk):
            y = y0 + _SQUARE - j * _SQUARE / hk
            out.append(
                f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x0 + _SQUARE)}" '
                f'y2="{_fmt(y)}" stroke="#2980b9" stroke-width="0.8" stroke-dasharray="4,3"/>'
            )
        vk = T.v[k - 1]
        for l in range(1, vk):
            x = x0 + l * _SQUARE / vk
            out.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(y0)}" x2="{_fmt(x)}" '
                f'y2="{_fmt(y0 + _SQUARE)}" stroke="#c0392b" stroke-width="0.8" stroke-dasharray="4,3"/>'
            )

    # Sign arrows: one per map line, drawn inside the image band.
    for (i, j), (k, l), s in T.maps:
        x0, y0 = origin(k)
        vk = T.v[k - 1]
        cx = x0 + (l - Fraction(1, 2)) * _SQUARE / vk
        y_top, y_bot = y0 + 18, y0 + _SQUARE - 18
        if s == 1:
            y1, y2 = y_bot, y_top
        else:
            y1, y2 = y_top, y_bot
        out.append(
            f'<line x1="{_fmt(cx)}" y1="{_fmt(y1)}" x2="{_fmt(cx)}" y2="{_fmt(y2)}" '
            'stroke="#555555" stroke-width="1.0" marker-end="url(#arrow)"/>'
        )
        out.append(
            f'<text x="{_fmt(cx + 3)}" y="{_fmt((y_top + y_bot) / 2)}" font-size="9" '
            f'font-family="monospace" fill="#555555">{i},{j}</text>'
        )

    if m is not None and m >= 1:
        for r in ribbons(T, m):
            color = _GEN_COLORS[(r.generation - 1) % len(_GEN_COLORS)]
            for end in r.ends:
                x0, y0 = origin(end.square)
                y = y0 if end.side == 1 else y0 + _SQUARE
                y += (-4 - 2 * r.generation) if end.side == 1 else (4 + 2 * r.generation)
                xa = x0 + float(end.lo) * _SQUARE
                xb = x0 + float(end.hi) * _SQUARE
                out.append(
                    f'<line x1="{_fmt(xa)}" y1="{_fmt(y)}" x2="{_fmt(xb)}" y2="{_fmt(y)}" '
                    f'stroke="{color}" stroke-width="2.4"/>'
                )

    out.insert(
        3,
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="8" refY="5" '
        'markerWidth="5" markerHeight="5" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#555555"/></marker></defs>',
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
