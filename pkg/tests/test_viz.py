import os
from pathlib import Path

import pytest

from gridpatrol.policies import make_policy
from gridpatrol.viz import arrow_diagram, mem_color, render

from oracles import parse_dot

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("GRIDPATROL_REGEN_GOLDEN") == "1"

CASES = [
    ("sweep_v1_5x3x3x2", (5, 3, 3, 2), "memoryless-v1", 1),
    ("sweep_v2_7x5x5x2", (7, 5, 5, 2), "memoryless-vgt1", 2),
    ("makemove_5x3", (5, 3), "makemove", 1),
    ("makemove_3x3x3", (3, 3, 3), "makemove", 1),
]


def _render(dims, name, V, fmt):
    return render(dims, make_policy(name, dims, V), fmt)


@pytest.mark.parametrize("label, dims, name, V", CASES)
def test_dot_structure(label, dims, name, V):
    nodes, edges = parse_dot(_render(dims, name, V, "dot"))
    mems = 2 if name == "makemove" else 1
    n = 1
    for x in dims:
        n *= x
    assert len(nodes) == n * mems
    out = {}
    for src, dst in edges:
        out.setdefault(src, []).append(dst)
    # functional: no configuration has two arrows
    assert all(len(v) == 1 for v in out.values())
    recurrent = [k for k, style in nodes.items() if style == "solid"]
    assert recurrent
    for k in recurrent:
        assert len(out.get(k, [])) == 1
        assert nodes[out[k][0]] == "solid"


@pytest.mark.parametrize("label, dims, name, V", CASES)
def test_recurrent_set_of_memoryless_is_everything(label, dims, name, V):
    d = arrow_diagram(dims, make_policy(name, dims, V))
    assert d.problems() == []
    if name != "makemove":
        assert len(d.recurrent) == len(d.arrows)


@pytest.mark.parametrize("label, dims, name, V", CASES)
@pytest.mark.parametrize("fmt", ["dot", "svg"])
def test_golden(label, dims, name, V, fmt):
    text = _render(dims, name, V, fmt)
    path = GOLDEN / f"{label}.{fmt}"
    if REGEN or not path.exists():
        path.write_text(text)
    assert text == path.read_text()


def test_svg_colour_convention():
    svg = _render((3, 3), "makemove", 1, "svg")
    assert mem_color(0) == "#d62728" and mem_color(1) == "#2ca02c"
    # an arrow that flips memory 0 -> 1 has a red body and a green head
    assert f'stroke="{mem_color(0)}"' in svg and f'fill="{mem_color(1)}"' in svg
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_hide_transient():
    dot = render((3, 3), make_policy("makemove"), "dot", transient=False)
    nodes, _ = parse_dot(dot)
    assert nodes and all(style == "solid" for style in nodes.values())


def test_svg_rejects_high_dimension():
    with pytest.raises(ValueError):
        _render((2, 2, 2, 2, 2), "makemove", 1, "svg")
    with pytest.raises(ValueError):
        _render((2, 2), "makemove", 1, "png")
