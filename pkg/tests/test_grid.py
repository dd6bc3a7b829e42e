import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gridpatrol.grid import (FloorSpec, GridDims, GridError, SenseData, Step,
                             boundary_distances, floor_of, format_key, neighbors_of,
                             parse_key, region_dims, sense_set, sensing_regions)

from oracles import boundary_from_offsets, grid_points, offsets_in_grid


@pytest.mark.parametrize("dims, p, V, expected", [
    ((5, 5), (1, 3), 2, ((0, 2), (2, 2))),
    ((5, 5), (3, 3), 1, ((1, 1), (1, 1))),
    ((5, 3, 3, 2), (5, 3, 1, 2), 1, ((1, 0), (1, 0), (0, 1), (1, 0))),
])
def test_boundary_distances_examples(dims, p, V, expected):
    assert boundary_distances(dims, p, V).pairs == expected


def test_boundary_distances_rejects_outside_position():
    with pytest.raises(GridError):
        boundary_distances((5, 5), (6, 1), 1)
    with pytest.raises(GridError):
        boundary_distances((5, 5), (0, 1), 1)


def test_boundary_distances_rejects_bad_range():
    with pytest.raises(GridError):
        boundary_distances((3,), (1,), 0)


@pytest.mark.parametrize("dims, p, V, expected", [
    ((5, 5), (3, 3), 1, {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}),
    ((5, 5), (1, 1), 1, {(0, 0), (1, 0), (0, 1)}),
    ((2,), (1,), 3, {(0,), (1,)}),
])
def test_sense_set_examples(dims, p, V, expected):
    assert sense_set(dims, p, V) == expected


grids = st.lists(st.integers(2, 6), min_size=1, max_size=3)


@given(grids, st.integers(1, 3), st.data())
def test_sense_set_matches_box_scan_and_boundaries(dims, V, data):
    p = tuple(data.draw(st.integers(1, n)) for n in dims)
    offs = sense_set(dims, p, V)
    assert offs == offsets_in_grid(dims, p, V)
    assert boundary_from_offsets(offs, len(dims)) == boundary_distances(dims, p, V).pairs


@given(grids, st.integers(1, 3))
def test_region_iff_same_sense_set(dims, V):
    pts = grid_points(dims)
    by_key = {p: boundary_distances(dims, p, V).pairs for p in pts}
    by_set = {p: frozenset(sense_set(dims, p, V)) for p in pts}
    for p, q in itertools.combinations(pts, 2):
        assert (by_key[p] == by_key[q]) == (by_set[p] == by_set[q])


@pytest.mark.parametrize("dims, V, count, iso", [
    ((10, 10), 1, 9, (3, 3)),
    ((7, 5, 5, 2), 2, 250, (5, 5, 5, 2)),
    ((2, 2), 1, 4, (2, 2)),
])
def test_sensing_region_examples(dims, V, count, iso):
    g = sensing_regions(dims, V)
    assert len(g.regions) == count
    assert g.iso_dims == iso
    assert g.verify_isomorphism()


def test_two_by_two_regions_are_singletons():
    g = sensing_regions((2, 2), 1)
    assert all(len(r.members) == 1 for r in g.regions)


@given(st.lists(st.integers(2, 9), min_size=1, max_size=3), st.integers(1, 3))
def test_regions_partition_and_isomorphism(dims, V):
    g = sensing_regions(dims, V)
    members = [p for r in g.regions for p in r.members]
    assert len(members) == len(set(members)) == math.prod(dims)
    assert len(g.regions) == math.prod(region_dims(dims, V))
    assert g.verify_isomorphism()


def test_isomorphism_check_detects_broken_witness():
    g = sensing_regions((3, 3), 1)
    g.witness[0], g.witness[1] = g.witness[1], g.witness[0]
    assert not g.verify_isomorphism()


def test_interior_vertices_share_one_region():
    g = sensing_regions((9, 9), 2)
    interior = [(x, y) for x in range(3, 8) for y in range(3, 8)]
    assert len({g.region_of(p) for p in interior}) == 1


def test_region_graph_dot_lists_every_region():
    dot = sensing_regions((3, 2), 1).to_dot()
    assert dot.count("[label=") == 6
    assert dot.startswith("graph regions {")


@pytest.mark.parametrize("dims, p, k, fixed, size", [
    ((5, 3, 3, 2), (2, 1, 3, 2), 2, (3, 2), 15),
    ((4, 4, 4), (1, 1, 1), 1, (1, 1), 4),
    ((4, 4, 4), (2, 3, 1), 3, (), 64),
])
def test_floor_of_examples(dims, p, k, fixed, size):
    f = floor_of(dims, p, k)
    assert f.fixed == fixed
    assert f.size(dims) == size
    assert len(list(f.vertices(dims))) == size
    assert all(f.contains(q) for q in f.vertices(dims))
    assert p in f


@pytest.mark.parametrize("k", [0, 4])
def test_floor_of_rejects_bad_order(k):
    with pytest.raises(GridError):
        floor_of((3, 3, 3), (1, 1, 1), k)


def test_floor_membership():
    f = FloorSpec(1, (2, 1))
    assert (3, 2, 1) in f
    assert (3, 2, 2) not in f


@pytest.mark.parametrize("dims", [(), (1, 3), (2, 0)])
def test_griddims_validation(dims):
    with pytest.raises(GridError):
        GridDims(dims)


def test_griddims_parse_and_size():
    g = GridDims.parse("5,3,3,2")
    assert g.dims == (5, 3, 3, 2) and g.size == 90 and g.d == 4
    assert str(g) == "5x3x3x2"
    assert [g.index(p) for p in g.vertices()] == list(range(90))
    with pytest.raises(GridError):
        GridDims.parse("5,a")


def test_step_helpers():
    s = Step.up(2)
    assert s.apply((1, 1, 1)) == (1, 2, 1)
    assert s.reverse() == Step.down(2)
    assert str(s) == "+x2" and str(Step(0, 0)) == "0"
    assert Step(0, 0).apply((4,)) == (4,)


def test_sense_key_round_trip():
    pairs = ((0, 1), (1, 1), (1, 0))
    assert parse_key(format_key(pairs)) == pairs
    with pytest.raises(GridError):
        parse_key("1,1|x")
    with pytest.raises(GridError):
        parse_key("-1,1")


def test_sensedata_moves():
    s = SenseData(((0, 1), (1, 0)), 1)
    assert s.can_move(Step.up(1)) and not s.can_move(Step.down(1))
    assert s.can_move(Step.down(2)) and not s.can_move(Step.up(2))
    assert not s.can_move(Step.up(3))
    assert s.truncated(1).pairs == ((0, 1),)


def test_neighbors_of_matches_grid_neighbors():
    g = GridDims((3, 4))
    adj = neighbors_of(g.vertices())
    for p in g.vertices():
        assert sorted(adj[p]) == sorted(g.neighbors(p))
