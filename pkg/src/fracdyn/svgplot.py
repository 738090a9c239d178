"""Single-series SVG line charts with no plotting dependency.

The output is a pure function of the data: no timestamps, random ids or
locale-dependent formatting, so identical inputs give identical bytes.
"""

__all__ = ["line_chart"]


def _ticks(lo, hi, count=5):
    if count < 2:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_chart(values, y_label, x_label="n", title=None, width=720, height=480):
    """SVG text for a line chart of values against their index."""
    values = [float(v) for v in values]
    if not values:
        raise ValueError("cannot plot an empty series")
    margin = 64.0
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin

    lo, hi = min(values), max(values)
    if hi - lo == 0.0:
        pad = 0.5 * max(1.0, abs(hi))
    else:
        pad = 0.05 * (hi - lo)
    lo -= pad
    hi += pad
    last = max(len(values) - 1, 1)

    def px(i):
        return margin + plot_w * (i / last)

    def py(v):
        return height - margin - plot_h * ((v - lo) / (hi - lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{width / 2:.2f}" y="24" text-anchor="middle" '
            f'font-family="monospace" font-size="14">{title}</text>'
        )

    # axes
    x0, y0 = margin, height - margin
    out.append(
        f'<path d="M{x0:.2f} {margin:.2f}L{x0:.2f} {y0:.2f}L{width - margin:.2f} {y0:.2f}" '
        f'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    for v in _ticks(lo, hi):
        y = py(v)
        out.append(
            f'<line x1="{x0 - 4:.2f}" y1="{y:.2f}" x2="{x0:.2f}" y2="{y:.2f}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x0 - 8:.2f}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="monospace" font-size="11">{v:.6g}</text>'
        )
    for i in _ticks(0, len(values) - 1):
        idx = int(round(i))
        x = px(idx)
        out.append(
            f'<line x1="{x:.2f}" y1="{y0:.2f}" x2="{x:.2f}" y2="{y0 + 4:.2f}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{y0 + 18:.2f}" text-anchor="middle" '
            f'font-family="monospace" font-size="11">{idx}</text>'
        )

    out.append(
        f'<text x="{width / 2:.2f}" y="{height - 16:.2f}" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{x_label}</text>'
    )
    out.append(
        f'<text x="{x0:.2f}" y="{margin - 12:.2f}" text-anchor="start" '
        f'font-family="monospace" font-size="13">{y_label}</text>'
    )

    points = " ".join(f"{px(i):.2f},{py(v):.2f}" for i, v in enumerate(values))
    out.append(
        f'<polyline points="{points}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
