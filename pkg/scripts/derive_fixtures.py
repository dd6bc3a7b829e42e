"""Write the multi-state table policies shipped in ``gridpatrol/data``.

Both policies are boustrophedon sweeps written as rules over the legal moves
(sensing range 1), then tabulated over every sensing key of the target
environment and checked by the simulator from every (vertex, state).

    python3 scripts/derive_fixtures.py
"""
from __future__ import annotations

from pathlib import Path

from gridpatrol.environment import grid_with_hole, l_shape
from gridpatrol.grid import Step
from gridpatrol.policies import TablePolicy
from gridpatrol.simulator import verify_patrols

X_DOWN, X_UP, Y_DOWN, Y_UP = Step(1, -1), Step(1, 1), Step(2, -1), Step(2, 1)

# holed grid: rows are swept upward (EAST, WEST), then columns leftward (SOUTH, NORTH)
EAST, WEST, SOUTH, NORTH = range(4)


def hole_rule(s, mem):
    ok = s.can_move
    if mem == EAST:
        if ok(X_UP):
            return X_UP, EAST
        if ok(Y_UP):
            return Y_UP, WEST
        return Y_DOWN, SOUTH
    if mem == WEST:
        if ok(X_DOWN):
            return X_DOWN, WEST
        if ok(Y_UP):
            return Y_UP, EAST
        return Y_DOWN, SOUTH
    if mem == SOUTH:
        if ok(Y_DOWN):
            return Y_DOWN, SOUTH
        if ok(X_DOWN):
            return X_DOWN, NORTH
        return X_UP, EAST
    if ok(Y_UP):
        return Y_UP, NORTH
    if ok(X_DOWN):
        return X_DOWN, SOUTH
    return Y_DOWN, SOUTH


# L-shape: rows swept upward, then a single descent back to the bottom row
L_EAST, L_WEST, L_SOUTH = range(3)


def lshape_rule(s, mem):
    ok = s.can_move
    if mem == L_EAST:
        if ok(X_UP):
            return X_UP, L_EAST
        if ok(Y_UP):
            return Y_UP, L_WEST
        return X_DOWN, L_WEST
    if mem == L_WEST:
        if ok(X_DOWN):
            return X_DOWN, L_WEST
        if ok(Y_UP):
            return Y_UP, L_EAST
        return Y_DOWN, L_SOUTH
    if ok(Y_DOWN):
        return Y_DOWN, L_SOUTH
    if ok(X_UP):
        return X_UP, L_EAST
    return X_DOWN, L_WEST


def tabulate(env, rule, n_states):
    keys = sorted({env.boundary_distances(p, 1) for p in env.vertices()}, key=lambda s: s.pairs)
    return TablePolicy.from_function(rule, keys, range(n_states), V=1, n_states=n_states)


def main(out_dir: Path):
    jobs = [("hole5_4state.table", grid_with_hole(), hole_rule, 4),
            ("lshape_3state.table", l_shape(), lshape_rule, 3)]
    for name, env, rule, k in jobs:
        pol = tabulate(env, rule, k)
        rep = verify_patrols(env, pol)
        assert rep.passed, (name, rep.verdict)
        header = (f"# {env.name}: {k}-state boustrophedon patrol, V=1\n"
                  f"# written by scripts/derive_fixtures.py; verified from every (vertex, state)\n")
        (out_dir / name).write_text(header + pol.to_text())
        print(name, len(pol.table), "rules, worst cover", rep.worst_cover_time)


if __name__ == "__main__":
    main(Path(__file__).resolve().parents[1] / "src" / "gridpatrol" / "data")
