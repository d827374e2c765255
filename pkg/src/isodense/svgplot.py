"""Minimal deterministic SVG output for shot curves.

Hand-rolled so that identical inputs produce byte-identical files: no
timestamps, no library version strings, fixed number formatting.
"""

from __future__ import annotations

__all__ = ["curve_svg"]

_W, _H, _PAD = 640, 480, 40


def _fmt(v: float) -> str:
    return "%.6g" % v


class _Frame:
    def __init__(self, xs, ys):
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(min(ys), 0.0), max(ys)
        span = max(x_hi - x_lo, y_hi - y_lo, 1e-9)
        self.scale = (min(_W, _H) - 2 * _PAD) / span
        self.x_lo, self.y_hi = x_lo, y_hi

    def map(self, x, y):
        return (_PAD + (x - self.x_lo) * self.scale,
                _PAD + (self.y_hi - y) * self.scale)


def curve_svg(curve) -> str:
    """Render a shot curve: axis, polyline, event markers, summary label."""
    from .shooting import classify

    frame = _Frame(curve.x, curve.y)
    cls = classify(curve)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    ax0 = frame.map(curve.x.min(), 0.0)
    ax1 = frame.map(curve.x.max(), 0.0)
    parts.append(f'<line x1="{_fmt(ax0[0])}" y1="{_fmt(ax0[1])}" '
                 f'x2="{_fmt(ax1[0])}" y2="{_fmt(ax1[1])}" '
                 f'stroke="#888" stroke-width="1"/>')
    org = frame.map(0.0, 0.0)
    parts.append(f'<circle cx="{_fmt(org[0])}" cy="{_fmt(org[1])}" r="3" '
                 f'fill="none" stroke="#888"/>')
    step = max(1, len(curve.s) // 1500)
    pts = " ".join(f"{_fmt(px)},{_fmt(py)}"
                   for px, py in (frame.map(x, y)
                                  for x, y in zip(curve.x[::step],
                                                  curve.y[::step])))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1a56a0" '
                 f'stroke-width="1.5"/>')

    def marker(s_val, color, label):
        if s_val is None:
            return
        st = curve.state_at(s_val)
        mx, my = frame.map(st[0], st[1])
        parts.append(f'<circle cx="{_fmt(mx)}" cy="{_fmt(my)}" r="4" '
                     f'fill="{color}"/>')
        parts.append(f'<text x="{_fmt(mx + 6)}" y="{_fmt(my - 6)}" '
                     f'font-size="12" font-family="monospace">{label}</text>')

    ev = curve.events
    marker(ev.delta, "#c43c3c", "delta")
    marker(ev.eta, "#3c9a3c", "eta")
    marker(ev.beta_s, "#7a3cc4", "beta")
    cfg = curve.config
    label = (f"n={cfg.n} p={_fmt(cfg.density.p)} kappa0={_fmt(cfg.kappa0)} "
             f"outcome={cls.label}")
    parts.append(f'<text x="{_PAD}" y="{_H - 12}" font-size="13" '
                 f'font-family="monospace">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
