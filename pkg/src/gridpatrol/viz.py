"""State-transition diagrams over (vertex, memory) configurations.

Two renderings of the same arrow map:

* DOT, one node per configuration. Recurrent configurations (those on a
  cycle of the transition function) are drawn solid, transient ones dashed.
* SVG for grids with ``d <= 4``: one panel per 2-floor, panels laid out by
  ``x3`` (columns) and ``x4`` (rows). Each arrow's body takes the colour of
  the memory before the step and its head the colour after; arrows of
  different memory states are offset sideways so they do not overlap.
  Moves along axes 3 and 4 leave the panel and are drawn as short diagonal
  stubs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .grid import GridDims, Position, as_grid
from .policies import Policy
from .simulator import TransitionTable, _coerce_env

PALETTE = ["#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f"]


def mem_color(index: int) -> str:
    return PALETTE[index % len(PALETTE)]


@dataclass
class ArrowDiagram:
    """The policy's transition function restricted to one environment."""

    env: object
    mems: list
    arrows: dict[tuple, tuple]
    recurrent: set[tuple]
    errors: dict[tuple, str] = field(default_factory=dict)
    title: str = ""

    def configs(self) -> list[tuple]:
        return [(p, m) for p in sorted(self.env.vertices()) for m in self.mems]

    def is_transient(self, cfg) -> bool:
        return cfg not in self.recurrent

    def problems(self) -> list[str]:
        """Structural defects: recurrent configurations without an arrow, or
        arrows leaving the recurrent set."""
        out = []
        for cfg in sorted(self.recurrent):
            if cfg not in self.arrows:
                out.append(f"recurrent {cfg} has no outgoing arrow")
            elif self.arrows[cfg] not in self.recurrent:
                out.append(f"recurrent {cfg} leads to transient {self.arrows[cfg]}")
        return out

    def to_dot(self, transient: bool = True) -> str:
        return render_dot(self, transient)

    def to_svg(self, transient: bool = True) -> str:
        return render_svg(self, transient)


def arrow_diagram(env, policy: Policy, mems=None, title: str = "") -> ArrowDiagram:
    env = _coerce_env(env)
    mems = list(policy.initial_mems() if mems is None else mems)
    table = TransitionTable.build(env, policy, mems)
    M = len(mems)

    def cfg(cid):
        return table.vertices[cid // M], mems[cid % M]

    recurrent = {cfg(c) for c in table.recurrent()}
    errors = {cfg(c): msg for c, msg in table.errors.items()}
    return ArrowDiagram(env, mems, table.arrows(), recurrent, errors,
                        title or f"{policy.kind} on {env}")


def _node_id(p: Position, m) -> str:
    return f'"{",".join(map(str, p))}|{m}"'


def render_dot(diagram: ArrowDiagram, transient: bool = True) -> str:
    mindex = {m: i for i, m in enumerate(diagram.mems)}
    lines = ["digraph patrol {",
             f'  label="{escape(diagram.title)}";',
             '  node [shape=box, fontsize=10];']
    shown = [c for c in diagram.configs() if transient or c in diagram.recurrent]
    for p, m in shown:
        style = "solid" if (p, m) in diagram.recurrent else "dashed"
        label = f"({','.join(map(str, p))})|{m}"
        lines.append(f'  {_node_id(p, m)} [label="{label}", style={style}, '
                     f'color="{mem_color(mindex[m])}"];')
    keep = set(shown)
    for (p, m), (q, m2) in sorted(diagram.arrows.items()):
        if (p, m) not in keep or (q, m2) not in keep:
            continue
        style = "solid" if (p, m) in diagram.recurrent else "dashed"
        color = f"{mem_color(mindex[m])};0.5:{mem_color(mindex[m2])}"
        lines.append(f'  {_node_id(p, m)} -> {_node_id(q, m2)} [color="{color}", style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


CELL = 40
MARGIN = 20
PANEL_GAP = 30


def _panel_layout(grid: GridDims):
    dims = grid.dims + (1,) * (4 - grid.d)
    n1, n2, n3, n4 = dims
    pw, ph = n1 * CELL, n2 * CELL
    width = MARGIN * 2 + n3 * pw + (n3 - 1) * PANEL_GAP
    height = MARGIN * 2 + n4 * ph + (n4 - 1) * PANEL_GAP + 16

    def center(p):
        x = tuple(p) + (1,) * (4 - len(p))
        ox = MARGIN + (x[2] - 1) * (pw + PANEL_GAP)
        oy = MARGIN + 16 + (n4 - x[3]) * (ph + PANEL_GAP)
        return ox + (x[0] - 0.5) * CELL, oy + (n2 - x[1] + 0.5) * CELL

    return dims, width, height, center, (pw, ph)


def _arrow(x0, y0, x1, y1, body, head, dashed):
    dx, dy = x1 - x0, y1 - y0
    length = max((dx * dx + dy * dy) ** 0.5, 1e-9)
    ux, uy = dx / length, dy / length
    bx, by = x1 - ux * 7, y1 - uy * 7
    dash = ' stroke-dasharray="3,2" opacity="0.5"' if dashed else ""
    pts = f"{x1:.1f},{y1:.1f} {bx - uy * 3.5:.1f},{by + ux * 3.5:.1f} {bx + uy * 3.5:.1f},{by - ux * 3.5:.1f}"
    return (f'<line x1="{x0:.1f}" y1="{y0:.1f}" x2="{bx:.1f}" y2="{by:.1f}" '
            f'stroke="{body}" stroke-width="1.5"{dash}/>'
            f'<polygon points="{pts}" fill="{head}"{dash}/>')


_STUB = {(3, 1): (1, -1), (3, -1): (-1, 1), (4, 1): (-1, -1), (4, -1): (1, 1)}


def render_svg(diagram: ArrowDiagram, transient: bool = True) -> str:
    grid = as_grid(diagram.env)
    if grid.d > 4:
        raise ValueError("SVG rendering supports d <= 4")
    dims, width, height, center, (pw, ph) = _panel_layout(grid)
    M = len(diagram.mems)
    mindex = {m: i for i, m in enumerate(diagram.mems)}
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">',
           f'<text x="{MARGIN}" y="14">{escape(diagram.title)}</text>']
    for x4 in range(1, dims[3] + 1):
        for x3 in range(1, dims[2] + 1):
            cx, cy = center((1, dims[1], x3, x4)[:4])
            ox, oy = cx - CELL / 2, cy - CELL / 2
            out.append(f'<rect x="{ox:.1f}" y="{oy:.1f}" width="{pw}" height="{ph}" '
                       f'fill="none" stroke="#bbb"/>')
    for p in sorted(grid.vertices()):
        x, y = center(p)
        out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2" fill="#444"/>')
    for (p, m), (q, m2) in sorted(diagram.arrows.items()):
        rec = (p, m) in diagram.recurrent
        if not (rec or transient):
            continue
        shift = (mindex[m] - (M - 1) / 2) * 5
        x0, y0 = center(p)
        diff = [i for i in range(grid.d) if p[i] != q[i]]
        body, head = mem_color(mindex[m]), mem_color(mindex[m2])
        if not diff:
            out.append(f'<circle cx="{x0 + shift:.1f}" cy="{y0 - 8:.1f}" r="4" fill="none" '
                       f'stroke="{body}"/>')
            continue
        axis = diff[0] + 1
        if axis <= 2:
            x1, y1 = center(q)
            # perpendicular offset per memory state
            px, py = (0, shift) if axis == 1 else (shift, 0)
            x0, y0, x1, y1 = x0 + px, y0 + py, x1 + px, y1 + py
            x0, y0 = x0 + (x1 - x0) * 0.2, y0 + (y1 - y0) * 0.2
            x1, y1 = x0 + (x1 - x0) * 0.7, y0 + (y1 - y0) * 0.7
        else:
            sx, sy = _STUB[(axis, q[axis - 1] - p[axis - 1])]
            x0, y0 = x0 + shift, y0 + shift * sx * sy
            x1, y1 = x0 + sx * 14, y0 + sy * 14
        out.append(_arrow(x0, y0, x1, y1, body, head, not rec))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(env, policy: Policy, fmt: str = "dot", transient: bool = True,
           title: str = "") -> str:
    diagram = arrow_diagram(env, policy, title=title)
    if fmt == "dot":
        return diagram.to_dot(transient)
    if fmt == "svg":
        return diagram.to_svg(transient)
    raise ValueError(f"unknown format {fmt!r}")
