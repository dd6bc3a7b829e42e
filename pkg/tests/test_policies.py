import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gridpatrol.grid import GridDims, SenseData, Step, boundary_distances
from gridpatrol.policies import (MakeMove, MakeMoveKD, MemorylessV1, MemorylessVgt1,
                                 PolicyConfigError, PolicyUndefinedError, TablePolicy,
                                 fired_guards_2d, make_move_1d, make_move_2d,
                                 make_move_3d, make_move_all, make_move_kd,
                                 make_move_noninductive, make_policy, memoryless_v1,
                                 memoryless_vgt1, parity, table_policy_eval)

from oracles import orbit_is_hamiltonian, walk

READINGS = [(0, 1), (1, 0), (1, 1)]  # every per-axis reading a V=1 grid produces


def S(*pairs, V=1):
    return SenseData(tuple(pairs), V)


def grid_sense(dims, p, V=1):
    return boundary_distances(dims, p, V)


@pytest.mark.parametrize("V, n, l, r, expected", [
    (1, 5, 0, 1, 0),
    (1, 5, 1, 0, 0),
    (2, 5, 1, 2, 1),
])
def test_parity_examples(V, n, l, r, expected):
    assert parity(V, n, l, r) == expected


@given(st.integers(1, 4), st.data())
def test_parity_is_coordinate_parity(V, data):
    # (l, r) pins down x only on axes of length <= 2V+1; the sweeps use parity
    # only there (the one long axis is axis 1, whose parity is never read)
    n = data.draw(st.integers(2, 2 * V + 1))
    x = data.draw(st.integers(1, n))
    l, r = min(x - 1, V), min(n - x, V)
    assert parity(V, n, l, r) == (x - 1) % 2


# -- memoryless sweeps ------------------------------------------------------

def test_sweep_v1_first_move_at_corner():
    dims = (5, 3, 3, 2)
    assert memoryless_v1(dims, grid_sense(dims, (1, 1, 1, 1))) == Step.up(1)


def test_sweep_v1_fallback_moves_down_last_axis():
    assert memoryless_v1((2,), grid_sense((2,), (2,))) == Step.down(1)


def test_sweep_v1_orbit_on_2x2():
    pol = MemorylessV1((2, 2))
    ps = [p for p, _ in walk((2, 2), pol, (1, 1), 0, 4)]
    assert ps == [(1, 1), (2, 1), (2, 2), (1, 2), (1, 1)]


def test_sweep_vgt1_strip_branch_moves_down_axis2():
    dims = (7, 5, 5, 2)
    s = grid_sense(dims, (1, 3, 1, 1), 2)
    assert s.l(1) == 0 and s.l(2) > 0
    assert memoryless_vgt1(dims, s) == Step.down(2)


def test_sweep_vgt1_skips_the_strip():
    dims = (7, 5, 5, 2)
    s = grid_sense(dims, (2, 2, 1, 1), 2)
    assert s.l(1) == 1
    # down = 1 on axis 1 would step onto x_1 = 1; the rule moves along axis 2 instead
    assert memoryless_vgt1(dims, s) == Step.up(2)


@pytest.mark.parametrize("dims, V, cls", [
    ((5, 3, 3, 2), 1, MemorylessV1),
    ((2, 2, 2, 2), 1, MemorylessV1),
    ((2, 3), 1, MemorylessV1),
    ((3, 2), 1, MemorylessV1),
    ((7, 5, 5, 2), 2, MemorylessVgt1),
    ((2, 5, 5, 7), 2, MemorylessVgt1),
    ((6, 4), 2, MemorylessVgt1),
])
def test_memoryless_orbit_is_hamiltonian(dims, V, cls):
    assert orbit_is_hamiltonian(dims, cls(dims, V), (1,) * len(dims))


def test_memoryless_axis_relabelling_matches_sorted_grid():
    # the wrapper sorts axes by length; on an already sorted grid it is the bare rule
    dims = (5, 3, 3, 2)
    pol = MemorylessV1(dims)
    for p in GridDims(dims).vertices():
        s = grid_sense(dims, p)
        assert pol(s, 0) == (memoryless_v1(dims, s), 0)


def test_memoryless_range_checks():
    with pytest.raises(PolicyConfigError):
        MemorylessV1((3, 3), 2)
    with pytest.raises(PolicyConfigError):
        MemorylessVgt1((3, 3), 1)


# -- one-bit rules ----------------------------------------------------------

@pytest.mark.parametrize("pairs, mem, step, new", [
    (((1, 1),), 0, Step.up(1), 0),
    (((1, 0),), 0, Step.down(1), 1),
    (((0, 1),), 1, Step.up(1), 0),
])
def test_one_axis_rule_examples(pairs, mem, step, new):
    assert make_move_1d(S(*pairs), mem) == (step, new)


@pytest.mark.parametrize("pairs, mem, step, new", [
    (((1, 1), (1, 1)), 0, Step.up(1), 0),
    (((1, 0), (1, 1)), 0, Step.down(1), 1),
    (((0, 1), (1, 0)), 1, Step.up(1), 0),
])
def test_two_axis_rule_examples(pairs, mem, step, new):
    assert make_move_2d(S(*pairs), mem) == (step, new)


@pytest.mark.parametrize("a, b", list(itertools.product(READINGS, repeat=2)))
@pytest.mark.parametrize("mem", [0, 1])
def test_two_axis_rule_fires_exactly_one_guard(a, b, mem):
    assert len(fired_guards_2d(S(a, b), mem)) == 1


def test_two_axis_rule_undefined_on_impossible_reading():
    with pytest.raises(PolicyUndefinedError):
        make_move_2d(S((0, 0), (0, 0)), 0)
    with pytest.raises(PolicyUndefinedError):
        make_move_2d(S((1, 1)), 0)


def test_three_axis_rule_examples():
    assert make_move_3d(S((0, 1), (1, 0), (1, 1)), 0) == (Step.up(3), 1)
    assert make_move_3d(S((0, 1), (1, 0), (1, 0)), 0) == (Step.up(1), 1)
    assert make_move_3d(S((1, 1), (1, 0), (1, 1)), 1) == (Step.down(3), 1)


def test_inductive_rule_examples():
    k = 4
    base = [(0, 1), (0, 1), (0, 1), (1, 0)]  # r_1 != 0, l_2 = l_3 = 0, r_4 = 0
    up = S((1, 0), *base[1:], (0, 1))
    assert make_move_kd(up, 1, k) == (Step.up(5), 0)
    top = S((1, 0), *base[1:], (1, 0))
    assert make_move_kd(top, 1, k) == (Step.down(1), 1)
    down = S((0, 1), *base[1:], (1, 1))
    assert make_move_kd(down, 1, k) == (Step.down(5), 1)


def test_inductive_rule_needs_k_at_least_3():
    with pytest.raises(PolicyConfigError):
        make_move_kd(S(*[(1, 1)] * 4), 0, 2)
    with pytest.raises(PolicyConfigError):
        MakeMoveKD(2)


def test_noninductive_rule_examples():
    assert make_move_noninductive(S((0, 1), (1, 0), (1, 1)), 0) == (Step.up(3), 1)
    # mem=1, r_1 != 0, l_2 = 0, k = 3 < d, r_3 = 0, l_4 != 0
    s = S((0, 1), (0, 1), (1, 0), (1, 1))
    assert make_move_noninductive(s, 1) == (Step.down(4), 1)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_noninductive_equals_recursive_on_all_readings(d):
    for pairs in itertools.product(READINGS, repeat=d):
        s = S(*pairs)
        for mem in (0, 1):
            try:
                expected = make_move_all(s, mem)
            except PolicyUndefinedError:
                with pytest.raises(PolicyUndefinedError):
                    make_move_noninductive(s, mem)
                continue
            assert make_move_noninductive(s, mem) == expected


def test_make_move_all_dispatch():
    for a in READINGS:
        for mem in (0, 1):
            assert make_move_all(S(a), mem) == make_move_1d(S(a), mem)
    dims = (3, 3, 3)
    assert walk(dims, MakeMove(), (1, 1, 1), 0, 60) == walk(
        dims, make_policy("makemove-3d"), (1, 1, 1), 0, 60)


@pytest.mark.parametrize("d, k", [(3, 2), (4, 2), (4, 3), (5, 3), (5, 4)])
def test_floor_locality(d, k):
    # with interior readings above axis k the d-axis rule acts like the k-axis
    # rule, except where it deliberately leaves the floor along axis k+1
    for head in itertools.product(READINGS, repeat=k):
        s = S(*head, *[(1, 1)] * (d - k))
        for mem in (0, 1):
            full = make_move_all(s, mem)
            if full[0].axis <= k:
                assert full == make_move_all(s.truncated(k), mem)
            else:
                assert full[0].axis == k + 1


@given(st.lists(st.sampled_from(READINGS), min_size=1, max_size=6), st.integers(0, 1))
def test_one_bit_memory_discipline(pairs, mem):
    s = S(*pairs)
    try:
        step, new = make_move_all(s, mem)
    except PolicyUndefinedError:
        return
    assert new in (0, 1)
    assert step.axis != 0 and abs(step.sign) == 1
    assert s.can_move(step)
    assert make_move_all(s, mem) == (step, new)


@given(st.lists(st.integers(2, 5), min_size=1, max_size=4), st.data())
def test_memoryless_never_changes_memory(dims, data):
    p = tuple(data.draw(st.integers(1, n)) for n in dims)
    pol = MemorylessV1(dims)
    step, mem = pol(grid_sense(dims, p), 0)
    assert mem == 0 and pol(grid_sense(dims, p), 0) == (step, mem)


# -- tables -----------------------------------------------------------------

def test_empty_table_is_undefined():
    with pytest.raises(PolicyUndefinedError):
        table_policy_eval({}, S((1, 1)), 0)


def test_table_from_sweep_reproduces_orbit():
    dims = (2, 2)
    keys = {grid_sense(dims, p) for p in GridDims(dims).vertices()}
    pol = MemorylessV1(dims)
    table = TablePolicy.from_function(pol, keys)
    assert walk(dims, table, (1, 1), 0, 8) == walk(dims, pol, (1, 1), 0, 8)


def test_table_text_round_trip(tmp_path):
    keys = [S(*pairs) for pairs in itertools.product(READINGS, repeat=2)]
    table = TablePolicy.from_function(make_move_2d, keys, mems=(0, 1), n_states=2)
    text = table.to_text()
    again = TablePolicy.from_text(text)
    assert again == table
    assert again.to_text() == text
    table.save(tmp_path / "t.table")
    assert TablePolicy.load(tmp_path / "t.table") == table
    assert table.bits == 1


def test_table_zero_step_and_directives():
    t = TablePolicy.from_text("# stay\n@V 2\n@states 3\n1,1 ; 0 -> 0 0 ; 2\n")
    assert t.V == 2 and t.n_states == 3 and t.bits == 2 and t.may_stay
    assert t(S((1, 1), V=2), 0) == (Step(0, 0), 2)
    assert "0 0" in t.to_text()


@pytest.mark.parametrize("text", [
    "1,1 ; 0 -> 1 +1",
    "1,1 ; 0 -> 1 2 ; 0",
    "1,1 ; 0 -> 0 1 ; 0",
    "1,1 ; 0 -> 1 +1 ; 0\n1,1 ; 0 -> 1 -1 ; 0",
    "@bogus 1",
])
def test_table_parse_errors(text):
    with pytest.raises(PolicyConfigError):
        TablePolicy.from_text(text)


# -- selectors --------------------------------------------------------------

def test_make_policy_selectors():
    assert isinstance(make_policy("memoryless", (2, 2), 1), MemorylessV1)
    assert isinstance(make_policy("memoryless-vgt1", (7, 5), 2), MemorylessVgt1)
    assert make_policy("makemove-kd:4").describe()["k"] == 4
    with pytest.raises(PolicyConfigError):
        make_policy("memoryless", (5, 3, 3, 2), 2)
    with pytest.raises(PolicyConfigError):
        make_policy("makemove", None, 2)
    with pytest.raises(PolicyConfigError):
        make_policy("memoryless")
    with pytest.raises(PolicyConfigError):
        make_policy("nope")
