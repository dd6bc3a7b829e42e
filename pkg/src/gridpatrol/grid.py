"""Grid-graph geometry: positions, sensing, boundary distances, sensing regions
and k-floors.

Coordinates are 1-based everywhere, so a grid ``[n_1] x ... x [n_d]`` has
vertices ``(x_1, ..., x_d)`` with ``1 <= x_i <= n_i``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

Position = tuple[int, ...]


class GridError(ValueError):
    """Raised for malformed dimensions, positions or floor requests."""


class Step(NamedTuple):
    """A unit move along one axis.

    ``axis`` is 1-based; ``Step(0, 0)`` is the zero step (no move).
    """

    axis: int
    sign: int

    @classmethod
    def up(cls, axis: int) -> "Step":
        return cls(axis, 1)

    @classmethod
    def down(cls, axis: int) -> "Step":
        return cls(axis, -1)

    @property
    def is_zero(self) -> bool:
        return self.axis == 0

    def apply(self, p: Position) -> Position:
        if self.axis == 0:
            return p
        i = self.axis - 1
        return p[:i] + (p[i] + self.sign,) + p[i + 1:]

    def reverse(self) -> "Step":
        return Step(self.axis, -self.sign)

    def __str__(self) -> str:
        if self.axis == 0:
            return "0"
        return f"{'+' if self.sign > 0 else '-'}x{self.axis}"


ZERO_STEP = Step(0, 0)


@dataclass(frozen=True, slots=True)
class SenseData:
    """Per-axis boundary distances ``(l_i, r_i)`` truncated at ``V``.

    This is everything a distance-sensing policy gets to see.
    """

    pairs: tuple[tuple[int, int], ...]
    V: int = 1

    @property
    def d(self) -> int:
        return len(self.pairs)

    def l(self, i: int) -> int:
        return self.pairs[i - 1][0]

    def r(self, i: int) -> int:
        return self.pairs[i - 1][1]

    def truncated(self, k: int) -> "SenseData":
        """Readings of the first ``k`` axes only."""
        return SenseData(self.pairs[:k], self.V)

    def can_move(self, step: Step) -> bool:
        if step.axis == 0 or step.axis > self.d:
            return False
        l, r = self.pairs[step.axis - 1]
        return (r if step.sign > 0 else l) > 0

    def __str__(self) -> str:
        return format_key(self.pairs)


def format_key(pairs: Sequence[tuple[int, int]]) -> str:
    """Canonical text form ``l1,r1|l2,r2|...`` of a boundary-distance list."""
    return "|".join(f"{l},{r}" for l, r in pairs)


def parse_key(text: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for chunk in text.strip().split("|"):
        try:
            l, r = (int(v) for v in chunk.split(","))
        except ValueError:
            raise GridError(f"bad sensing key {text!r}") from None
        if l < 0 or r < 0:
            raise GridError(f"negative boundary distance in {text!r}")
        pairs.append((l, r))
    return tuple(pairs)


@dataclass(frozen=True)
class GridDims:
    """The grid graph ``[n_1] x ... x [n_d]``; every ``n_i >= 2``."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims:
            raise GridError("a grid needs at least one axis")
        if any(n < 2 for n in dims):
            raise GridError(f"every axis length must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def parse(cls, text: str) -> "GridDims":
        try:
            return cls(tuple(int(v) for v in text.split(",") if v.strip()))
        except ValueError:
            raise GridError(f"malformed dims {text!r}") from None

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return self.size

    def __str__(self) -> str:
        return "x".join(map(str, self.dims))

    def vertices(self) -> Iterator[Position]:
        """All vertices, last axis varying fastest."""
        return itertools.product(*(range(1, n + 1) for n in self.dims))

    def __contains__(self, p) -> bool:
        return len(p) == self.d and all(1 <= x <= n for x, n in zip(p, self.dims))

    def check(self, p: Sequence[int]) -> Position:
        p = tuple(int(x) for x in p)
        if p not in self:
            raise GridError(f"position {p} outside grid {self}")
        return p

    def neighbors(self, p: Position) -> Iterator[Position]:
        for i, n in enumerate(self.dims):
            if p[i] > 1:
                yield p[:i] + (p[i] - 1,) + p[i + 1:]
            if p[i] < n:
                yield p[:i] + (p[i] + 1,) + p[i + 1:]

    def boundary_distances(self, p: Position, V: int) -> SenseData:
        return boundary_distances(self, p, V)

    def sense_key(self, p: Position, V: int) -> frozenset:
        return frozenset(sense_set(self, p, V))

    def index(self, p: Position) -> int:
        """Row-major 0-based index of ``p`` (matches :meth:`vertices` order)."""
        idx = 0
        for x, n in zip(p, self.dims):
            idx = idx * n + (x - 1)
        return idx


def as_grid(dims) -> GridDims:
    if isinstance(dims, GridDims):
        return dims
    if isinstance(dims, str):
        return GridDims.parse(dims)
    return GridDims(tuple(dims))


def boundary_distances(dims, p: Sequence[int], V: int) -> SenseData:
    """Steps available below and above ``p`` on each axis, capped at ``V``."""
    grid = as_grid(dims)
    if V < 1:
        raise GridError("sensing range must be >= 1")
    p = grid.check(p)
    return SenseData(
        tuple((min(x - 1, V), min(n - x, V)) for x, n in zip(p, grid.dims)), V
    )


def _offsets_within(d: int, V: int) -> Iterator[tuple[int, ...]]:
    for off in itertools.product(range(-V, V + 1), repeat=d):
        if sum(map(abs, off)) <= V:
            yield off


def sense_set(dims, p: Sequence[int], V: int) -> set[tuple[int, ...]]:
    """Offsets ``p' - p`` of all grid vertices within Manhattan distance ``V``."""
    grid = as_grid(dims)
    p = grid.check(p)
    out = set()
    for off in _offsets_within(grid.d, V):
        q = tuple(x + o for x, o in zip(p, off))
        if q in grid:
            out.add(off)
    return out


def region_dims(dims: Sequence[int], V: int) -> tuple[int, ...]:
    """``m_i = min(n_i, 2V + 1)``: the shape of the sensing-region graph."""
    return tuple(min(n, 2 * V + 1) for n in dims)


def _axis_region_index(l: int, r: int, m: int, V: int) -> int:
    # Reading (l, r) on an axis -> 1-based coordinate in [m].
    if l < V:
        return l + 1
    if r < V:
        return m - r
    return V + 1


@dataclass
class SensingRegion:
    key: tuple[tuple[int, int], ...]
    members: frozenset


@dataclass
class RegionGraph:
    """Sensing regions of a grid together with their adjacency.

    ``witness`` maps each region index to a vertex of the grid ``iso_dims``;
    :meth:`verify_isomorphism` checks that this map is a graph isomorphism.
    """

    grid: GridDims
    V: int
    regions: list[SensingRegion]
    adjacency: set[tuple[int, int]]
    iso_dims: tuple[int, ...]
    witness: dict[int, Position] = field(default_factory=dict)

    def region_of(self, p: Position) -> int:
        return self._lookup[boundary_distances(self.grid, p, self.V).pairs]

    def __post_init__(self):
        self._lookup = {reg.key: i for i, reg in enumerate(self.regions)}

    def verify_isomorphism(self) -> bool:
        images = list(self.witness.values())
        if len(images) != len(self.regions) or len(set(images)) != len(images):
            return False
        target = GridDims(self.iso_dims) if self.iso_dims else None
        if target is None or set(images) != set(target.vertices()):
            return False
        expected = set()
        for i, j in itertools.combinations(range(len(self.regions)), 2):
            a, b = self.witness[i], self.witness[j]
            if sum(abs(x - y) for x, y in zip(a, b)) == 1:
                expected.add((i, j))
        return expected == self.adjacency

    def to_dot(self) -> str:
        lines = ["graph regions {", "  node [shape=box];"]
        for i, reg in enumerate(self.regions):
            label = f"{format_key(reg.key)}\\n|{len(reg.members)}|"
            lines.append(f'  r{i} [label="{label}"];')
        for i, j in sorted(self.adjacency):
            lines.append(f"  r{i} -- r{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def sensing_regions(dims, V: int) -> RegionGraph:
    """Partition the grid into sensing regions and build the region graph.

    Adjacency is derived from grid edges between members, never from the
    expected shape, so the isomorphism to ``[m_1] x ... x [m_d]`` is checked
    rather than assumed.
    """
    grid = as_grid(dims)
    groups: dict[tuple, list[Position]] = {}
    for p in grid.vertices():
        groups.setdefault(boundary_distances(grid, p, V).pairs, []).append(p)
    keys = sorted(groups)
    index = {k: i for i, k in enumerate(keys)}
    regions = [SensingRegion(k, frozenset(groups[k])) for k in keys]

    adjacency = set()
    for p in grid.vertices():
        a = index[boundary_distances(grid, p, V).pairs]
        for q in grid.neighbors(p):
            b = index[boundary_distances(grid, q, V).pairs]
            if a != b:
                adjacency.add((min(a, b), max(a, b)))

    iso = region_dims(grid.dims, V)
    witness = {
        index[k]: tuple(
            _axis_region_index(l, r, m, V) for (l, r), m in zip(k, iso)
        )
        for k in keys
    }
    return RegionGraph(grid, V, regions, adjacency, iso, witness)


@dataclass(frozen=True)
class FloorSpec:
    """The k-floor obtained by freezing axes ``k+1..d`` at ``fixed``."""

    k: int
    fixed: tuple[int, ...]

    def contains(self, p: Sequence[int]) -> bool:
        return tuple(p[self.k:]) == self.fixed

    __contains__ = contains

    def vertices(self, dims) -> Iterator[Position]:
        grid = as_grid(dims)
        for head in itertools.product(*(range(1, n + 1) for n in grid.dims[: self.k])):
            yield head + self.fixed

    def size(self, dims) -> int:
        return math.prod(as_grid(dims).dims[: self.k])


def floor_of(dims, p: Sequence[int], k: int) -> FloorSpec:
    grid = as_grid(dims)
    p = grid.check(p)
    if not 1 <= k <= grid.d:
        raise GridError(f"floor order k={k} outside 1..{grid.d}")
    return FloorSpec(k, p[k:])


def neighbors_of(vertices: Iterable[Position]) -> dict[Position, list[Position]]:
    """Unit-step adjacency lists of an arbitrary finite vertex set."""
    vs = set(vertices)
    adj = {}
    for p in vs:
        out = []
        for i in range(len(p)):
            for s in (-1, 1):
                q = p[:i] + (p[i] + s,) + p[i + 1:]
                if q in vs:
                    out.append(q)
        adj[p] = out
    return adj
