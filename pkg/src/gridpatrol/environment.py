"""Patrolling finite connected subgraphs of Z^d.

Environments are explicit vertex sets with unit-step adjacency. Besides
loading and measuring them, this module provides two patrollers that work on
any environment: the direction-sequence patroller (sensing range 1, memory
growing with the diameter) and the full-visibility Hamiltonian patroller
(no memory, sensing range equal to the diameter).
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .feasibility import hamiltonian_cycle
from .grid import GridDims, SenseData, Step, ZERO_STEP, neighbors_of
from .policies import Policy, PolicyUndefinedError, TablePolicy


class EnvError(ValueError):
    """Malformed, empty or disconnected environment description."""


@dataclass(frozen=True, eq=False)
class Environment:
    points: frozenset
    d: int
    name: str = ""

    def __post_init__(self):
        if not self.points:
            raise EnvError("environment is empty")
        if any(len(p) != self.d for p in self.points):
            raise EnvError("coordinates of mixed dimension")
        if not self.is_connected():
            raise EnvError("environment is disconnected")

    def __eq__(self, other):
        return isinstance(other, Environment) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __len__(self):
        return len(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.points

    def vertices(self):
        return iter(sorted(self.points))

    @cached_property
    def adjacency(self) -> dict:
        return neighbors_of(self.points)

    def neighbors(self, p):
        return self.adjacency[tuple(p)]

    def is_connected(self) -> bool:
        adj = neighbors_of(self.points)
        start = next(iter(self.points))
        return len(_bfs(adj, start)) == len(self.points)

    def boundary_distances(self, p, V: int) -> SenseData:
        """Per-axis counts of sensed vertices below and above ``p``.

        Identical to the grid definition on grids; with ``V = 1`` it is
        exactly the set of legal unit moves.
        """
        p = tuple(p)
        pairs = []
        for i in range(self.d):
            below = sum(1 for s in range(1, V + 1)
                        if p[:i] + (p[i] - s,) + p[i + 1:] in self.points)
            above = sum(1 for s in range(1, V + 1)
                        if p[:i] + (p[i] + s,) + p[i + 1:] in self.points)
            pairs.append((below, above))
        return SenseData(tuple(pairs), V)

    def sense_key(self, p, V: int) -> frozenset:
        return env_sense(self, p, V)

    @cached_property
    def diameter(self) -> int:
        return env_diameter(self)

    def to_text(self) -> str:
        lines = [f"# {self.name}"] if self.name else []
        lines += [",".join(map(str, p)) for p in sorted(self.points)]
        return "\n".join(lines) + "\n"


def _bfs(adj, start) -> dict:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def from_points(points: Iterable[Sequence[int]], name: str = "") -> Environment:
    pts = [tuple(int(x) for x in p) for p in points]
    if not pts:
        raise EnvError("environment is empty")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise EnvError("coordinates of mixed dimension")
    return Environment(frozenset(pts), d, name)


def parse_env_text(text: str, name: str = "") -> Environment:
    """One comma-separated coordinate tuple per line; ``#`` starts a comment."""
    pts = []
    d = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            p = tuple(int(v) for v in line.split(","))
        except ValueError:
            raise EnvError(f"line {lineno}: not a coordinate tuple: {raw!r}") from None
        if d is None:
            d = len(p)
        elif len(p) != d:
            raise EnvError(f"line {lineno}: expected {d} coordinates, got {len(p)}")
        pts.append(p)
    return from_points(pts, name)


def grid_env(dims) -> Environment:
    grid = dims if isinstance(dims, GridDims) else GridDims(tuple(dims))
    return from_points(grid.vertices(), f"grid {grid}")


def grid_with_hole(n: int = 5, hole: int = 1) -> Environment:
    """``n x n`` grid minus a centred ``hole x hole`` block."""
    if (n - hole) % 2 or hole < 1 or n - hole < 2:
        raise EnvError("hole must be centred and leave a ring of width >= 1")
    lo = (n - hole) // 2 + 1
    hi = lo + hole - 1
    pts = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)
           if not (lo <= x <= hi and lo <= y <= hi)]
    return from_points(pts, f"{n}x{n} grid with {hole}x{hole} hole")


def l_shape(long: int = 4, wide: int = 2) -> Environment:
    """``[long] x [wide]`` union ``[wide] x [long]``, sharing a ``wide x wide`` corner."""
    pts = {(x, y) for x in range(1, long + 1) for y in range(1, wide + 1)}
    pts |= {(x, y) for x in range(1, wide + 1) for y in range(1, long + 1)}
    return from_points(pts, f"L-shape {long}x{wide}")


def path_env(n: int) -> Environment:
    return from_points([(x,) for x in range(1, n + 1)], f"path of {n}")


GENERATORS = {
    "grid-with-hole": grid_with_hole,
    "l-shape": l_shape,
    "path": path_env,
}


def env_load(description) -> Environment:
    """Build an environment from a file path, coordinate text, a generator
    spec such as ``grid-with-hole`` or ``l-shape:4,2``, or an iterable of
    coordinate tuples."""
    if isinstance(description, Environment):
        return description
    if isinstance(description, GridDims):
        return grid_env(description)
    if isinstance(description, Path):
        return parse_env_text(description.read_text(), description.stem)
    if isinstance(description, str):
        name, _, args = description.partition(":")
        if name in GENERATORS:
            params = [int(a) for a in args.split(",") if a] if args else []
            return GENERATORS[name](*params)
        if name == "grid":
            return grid_env(GridDims.parse(args))
        if "\n" not in description and Path(description).exists():
            return parse_env_text(Path(description).read_text(), Path(description).stem)
        if "\n" in description or "," in description:
            return parse_env_text(description)
        raise EnvError(f"cannot load environment from {description!r}")
    return from_points(description)


def fixture_path(name: str) -> Path:
    """Path of a data file shipped with the package (environments, tables)."""
    return Path(str(resources.files("gridpatrol") / "data" / name))


def env_diameter(env: Environment) -> int:
    """Largest shortest-path distance, by BFS from every vertex."""
    adj = env.adjacency
    return max(max(_bfs(adj, s).values()) for s in adj)


def env_sense(env: Environment, p, V: int) -> frozenset:
    """Offsets of all environment vertices within Manhattan distance ``V`` of ``p``."""
    p = tuple(p)
    if p not in env:
        raise EnvError(f"{p} is not in the environment")
    out = set()
    for off in itertools.product(range(-V, V + 1), repeat=env.d):
        if sum(map(abs, off)) <= V and tuple(x + o for x, o in zip(p, off)) in env.points:
            out.add(off)
    return frozenset(out)


def format_offsets(key: Iterable[Sequence[int]]) -> str:
    return ";".join(",".join(map(str, o)) for o in sorted(key))


# --------------------------------------------------------------------------
# direction-sequence patroller


@dataclass(frozen=True)
class DirSeqState:
    """Memory of the direction-sequence patroller.

    ``seq`` is the current direction sequence (indices into the 2d
    directions), ``ok`` records which of its moves succeeded, and ``phase``
    is the position within the sequence (``< D``) or within the backtrack
    (``>= D``).
    """

    seq: tuple[int, ...]
    ok: tuple[bool, ...]
    phase: int


def _direction(index: int) -> Step:
    # axis ascending, -1 before +1
    return Step(index // 2 + 1, -1 if index % 2 == 0 else 1)


def dirseq_memory_bits(diam: int, d: int) -> int:
    """Bits to store a :class:`DirSeqState`: sequence digits, success flags, phase."""
    if diam == 0:
        return 0
    return (diam * math.ceil(math.log2(2 * d)) + diam
            + math.ceil(math.log2(2 * diam)))


class DirSeqPatroller(Policy):
    """Try every direction sequence of length ``diam``, undoing each one.

    Moves that would leave the environment are skipped by staying put (this
    takes a time step). After each sequence the successful moves are
    reversed, so the agent is back at its starting vertex before the next
    sequence begins; sequences advance in lexicographic order.
    """

    kind = "dirseq"
    V = 1
    may_stay = True

    def __init__(self, diam: int, d: int):
        self.diam = diam
        self.d = d
        self.bits = dirseq_memory_bits(diam, d)

    @classmethod
    def for_env(cls, env: Environment) -> "DirSeqPatroller":
        return cls(env.diameter, env.d)

    def initial_state(self) -> DirSeqState:
        return DirSeqState((0,) * self.diam, (False,) * self.diam, 0)

    def initial_mems(self):
        return [self.initial_state()]

    def step_bound(self) -> int:
        """Steps within which every vertex is visited from any anchor."""
        return (2 * self.d) ** self.diam * 2 * self.diam

    def encode_mem(self, mem: DirSeqState) -> int:
        """Pack the state into ``self.bits`` bits."""
        if self.diam == 0:
            return 0
        width = math.ceil(math.log2(2 * self.d))
        code = 0
        for digit in mem.seq:
            code = (code << width) | digit
        for flag in mem.ok:
            code = (code << 1) | int(flag)
        code = (code << math.ceil(math.log2(2 * self.diam))) | mem.phase
        return code

    def _next_sequence(self, seq):
        digits = list(seq)
        for i in range(len(digits) - 1, -1, -1):
            digits[i] += 1
            if digits[i] < 2 * self.d:
                break
            digits[i] = 0
        return DirSeqState(tuple(digits), (False,) * self.diam, 0)

    def __call__(self, sense: SenseData, mem: DirSeqState):
        D = self.diam
        if D == 0:
            return ZERO_STEP, mem
        seq, ok, phase = mem.seq, mem.ok, mem.phase
        if phase < D:
            step = _direction(seq[phase])
            moved = sense.can_move(step)
            ok = ok[:phase] + (moved,) + ok[phase + 1:]
            return (step if moved else ZERO_STEP), DirSeqState(seq, ok, phase + 1)
        # undo the latest successful move not yet undone
        last = 2 * D - 1 - phase
        i = next((j for j in range(last, -1, -1) if ok[j]), None)
        if i is None:
            nxt = self._next_sequence(seq)
            return self(sense, nxt)
        back = _direction(seq[i]).reverse()
        if any(ok[:i]):
            return back, DirSeqState(seq, ok, 2 * D - i)
        return back, self._next_sequence(seq)

    def describe(self):
        return {**super().describe(), "diam": self.diam, "d": self.d}


def dirseq_patroller(env: Environment) -> DirSeqPatroller:
    return DirSeqPatroller.for_env(env)


# --------------------------------------------------------------------------
# full visibility


class OffsetTablePolicy(Policy):
    """Memoryless policy keyed by the full set of sensed offsets."""

    kind = "offset-table"
    sensor = "offsets"

    def __init__(self, table: dict, V: int):
        self.table = dict(table)
        self.V = V
        self.may_stay = any(s.is_zero for s in self.table.values())

    def __call__(self, sense: frozenset, mem=0):
        try:
            return self.table[sense], mem
        except KeyError:
            raise PolicyUndefinedError("no rule for this view") from None


def env_hamiltonian_search(env: Environment, cap: int = 24) -> list | None:
    return hamiltonian_cycle(env.adjacency, cap)


def full_visibility_hamiltonian(env: Environment, cap: int = 24) -> OffsetTablePolicy | None:
    """A memoryless policy with sensing range ``diam`` following a Hamiltonian cycle.

    At that range the agent sees the whole environment, whose offset set
    differs at every vertex, so each vertex gets its own rule.
    """
    cycle = env_hamiltonian_search(env, cap)
    if cycle is None:
        return None
    V = max(env.diameter, 1)
    table = {}
    n = len(cycle)
    for i, p in enumerate(cycle):
        q = cycle[(i + 1) % n]
        diff = [j for j in range(env.d) if p[j] != q[j]]
        step = ZERO_STEP if not diff else Step(diff[0] + 1, q[diff[0]] - p[diff[0]])
        key = env_sense(env, p, V)
        if key in table:
            raise AssertionError("two vertices share a full view")
        table[key] = step
    return OffsetTablePolicy(table, V)


def load_table_fixture(name: str) -> TablePolicy:
    return TablePolicy.load(fixture_path(name))
