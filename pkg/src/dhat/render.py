"""Static SVG picture of a two-process PV model.

Process 1 runs left to right, process 2 bottom to top.  Removed squares are
filled; edges and vertices of the model are drawn on top.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .pvlang import PVError, PVModel, analyze


def render_svg(model: PVModel, scale: int = 60) -> str:
    if len(model.lengths) != 2:
        raise PVError(f"render needs exactly 2 processes, got {len(model.lengths)}")
    L1, L2 = model.lengths
    m = scale
    width, height = (L1 + 2) * m, (L2 + 2) * m

    def xy(p):
        return (p[0] + 1) * m, (L2 + 1 - p[1]) * m

    report = analyze(model)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<style>.grid{stroke:#ccc;stroke-width:1}.edge{stroke:#333;stroke-width:2}"
        ".forbidden{fill:#888;fill-opacity:0.6}.label{font:12px sans-serif}</style>",
    ]
    for i in range(L1 + 1):
        x, _ = xy((i, 0))
        out.append(f'<line class="grid" x1="{x}" y1="{m}" x2="{x}" y2="{(L2 + 1) * m}"/>')
    for j in range(L2 + 1):
        _, y = xy((0, j))
        out.append(f'<line class="grid" x1="{m}" y1="{y}" x2="{(L1 + 1) * m}" y2="{y}"/>')
    for corner in model.forbidden_cells():
        x, y = xy((corner[0], corner[1] + 1))
        out.append(f'<rect class="forbidden" x="{x}" y="{y}" width="{m}" height="{m}"/>')
    for e in model.complex.edges:
        a = model.coordinates[model.complex.source(e)]
        b = model.coordinates[model.complex.target(e)]
        (x1, y1), (x2, y2) = xy(a), xy(b)
        out.append(f'<line class="edge" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    for p in sorted(model.coordinates.values()):
        x, y = xy(p)
        out.append(f'<circle class="vertex" cx="{x}" cy="{y}" r="3" fill="#333"/>')
    for p in report.unsafe:
        x, y = xy(p)
        out.append(f'<circle class="unsafe" cx="{x}" cy="{y}" r="9" fill="none" stroke="#e69f00" stroke-width="2"/>')
    for p in report.unreachable:
        x, y = xy(p)
        out.append(f'<rect class="unreachable" x="{x - 6}" y="{y - 6}" width="12" height="12" fill="#56b4e9"/>')
    for p in report.deadlocks:
        x, y = xy(p)
        d = 7
        out.append(
            f'<path class="deadlock" d="M{x - d},{y - d}L{x + d},{y + d}M{x - d},{y + d}L{x + d},{y - d}" '
            'stroke="#d00" stroke-width="3"/>'
        )
    for name, p in (("init", model.coordinates[model.init]), ("final", model.coordinates[model.final])):
        x, y = xy(p)
        out.append(f'<text class="label" x="{x + 6}" y="{y - 6}">{name}</text>')
    for axis, proc in enumerate(model.program.processes):
        for k, a in enumerate(proc):
            if axis == 0:
                x, y = xy((k + 0.5, 0))
                y += 18
            else:
                x, y = xy((0, k + 0.5))
                x -= 30
            out.append(f'<text class="label" x="{x:g}" y="{y:g}">{escape(str(a))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
