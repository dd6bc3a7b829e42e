"""When can a grid be patrolled without memory?

:func:`theorem1_check` is the closed-form characterization. The other
functions are independent oracles for it: a bipartite parity count, a
backtracking Hamiltonian-cycle search, and an exhaustive search over
memoryless policies (one direction per sensing region).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .grid import GridDims, Step, as_grid, boundary_distances, neighbors_of, region_dims
from .policies import TablePolicy
from .simulator import verify_patrols


class SearchCapExceeded(RuntimeError):
    """An exhaustive search would exceed its configured resource cap."""


@dataclass
class FeasibilityVerdict:
    dims: tuple[int, ...]
    V: int
    condition1_holds: bool
    condition2_holds: bool
    region_dims: tuple[int, ...]
    witness: str | None = None
    reason: str = ""
    caveats: list[str] = field(default_factory=list)

    @property
    def patrollable_0bit(self) -> bool:
        return self.condition1_holds and self.condition2_holds

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "V": self.V,
            "patrollable_0bit": self.patrollable_0bit,
            "condition1_holds": self.condition1_holds,
            "condition2_holds": self.condition2_holds,
            "region_dims": list(self.region_dims),
            "region_count": math.prod(self.region_dims),
            "witness": self.witness,
            "reason": self.reason,
            "caveats": self.caveats,
        }


def theorem1_check(dims: Sequence[int], V: int) -> FeasibilityVerdict:
    """Memoryless patrollability with sensing range ``V``.

    Patrollable iff (1) at most one axis is longer than ``2V + 1`` and
    (2) the number of sensing regions, prod ``min(n_i, 2V + 1)``, is even or 1.
    An empty ``dims`` stands for the single-vertex grid.
    """
    if V < 1:
        raise ValueError("V must be >= 1")
    dims = tuple(int(n) for n in dims)
    if dims:
        GridDims(dims)  # validates n_i >= 2
    m = region_dims(dims, V)
    long_axes = [i + 1 for i, n in enumerate(dims) if n > 2 * V + 1]
    c1 = len(long_axes) <= 1
    count = math.prod(m)
    c2 = count % 2 == 0 or count == 1
    verdict = FeasibilityVerdict(dims, V, c1, c2, m)
    if not c1:
        verdict.reason = f"axes {long_axes} are both longer than 2V+1={2 * V + 1}"
    elif not c2:
        verdict.reason = f"odd number of sensing regions ({count})"
    elif not dims:
        verdict.witness = "single-vertex"
    else:
        verdict.witness = "memoryless-v1" if V == 1 else "memoryless-vgt1"
    if verdict.patrollable_0bit and len(dims) == 1 and dims[0] > 2:
        verdict.caveats.append(
            "a path with more than two vertices has no closed walk visiting each "
            "vertex once; exhaustive search finds no memoryless policy here"
        )
    return verdict


def hamiltonicity_parity(dims: Sequence[int]) -> dict:
    """Necessary condition for a Hamiltonian cycle from the 2-colouring.

    Colour a vertex by the parity of its coordinate sum. Every edge joins the
    two colours, so a closed walk through every vertex once needs equally
    many of each. Counts are combined axis by axis rather than enumerated.
    """
    dims = tuple(int(n) for n in dims)
    even, odd = 1, 0  # colour counts of the empty product
    for n in dims:
        e_axis = n // 2          # x in 1..n with x even
        o_axis = n - e_axis
        even, odd = even * e_axis + odd * o_axis, even * o_axis + odd * e_axis
    total = even + odd
    # coordinate sums are shifted by d, which swaps names but not the balance
    possible = total == 1 or even == odd
    return {"possible": possible, "red": even, "blue": odd, "vertices": total}


def hamiltonian_cycle(adjacency: Mapping[Hashable, Sequence[Hashable]],
                      cap: int = 24, start=None) -> list | None:
    """Backtracking search for a Hamiltonian cycle of an undirected graph.

    Returns the cycle as a vertex list (closing edge implied) or ``None``.
    Two adjacent vertices count as a cycle (the walk ``a b a``), matching the
    closed patrol walk of a two-vertex grid. Refuses graphs above ``cap``.
    """
    vertices = sorted(adjacency)
    n = len(vertices)
    if n > cap:
        raise SearchCapExceeded(f"{n} vertices exceeds Hamiltonian search cap {cap}")
    if n == 0:
        return None
    if n == 1:
        return [vertices[0]]
    if start is None:
        start = min(vertices, key=lambda v: (len(adjacency[v]), v))
    if n == 2:
        a, b = vertices
        return [start, b if start == a else a] if b in adjacency[a] else None
    if any(len(adjacency[v]) < 2 for v in vertices):
        return None

    adj = {v: list(adjacency[v]) for v in vertices}
    path = [start]
    on_path = {start}

    def free_degree_ok(cur) -> bool:
        # every unvisited vertex still needs two usable neighbours
        for v in vertices:
            if v in on_path:
                continue
            usable = 0
            for w in adj[v]:
                if w not in on_path or w == cur or w == start:
                    usable += 1
                    if usable == 2:
                        break
            if usable < 2:
                return False
        return True

    def extend(cur) -> bool:
        if len(path) == n:
            return start in adj[cur]
        for w in adj[cur]:
            if w in on_path:
                continue
            path.append(w)
            on_path.add(w)
            if free_degree_ok(w) and extend(w):
                return True
            path.pop()
            on_path.discard(w)
        return False

    return list(path) if extend(start) else None


def hamiltonian_search(dims, cap: int = 24) -> list | None:
    grid = as_grid(dims)
    if grid.size > cap:
        raise SearchCapExceeded(f"grid {grid} has {grid.size} vertices, cap is {cap}")
    return hamiltonian_cycle(neighbors_of(grid.vertices()), cap)


# --------------------------------------------------------------------------
# exhaustive memoryless search


@dataclass
class _Problem:
    vertices: list
    region: list[int]             # vertex -> region id
    keys: list                    # region id -> boundary-distance key
    members: list[list[int]]      # region id -> vertices
    moves: list[list[tuple[Step, int]]]  # region id -> [(step, 0)] in enumeration order
    target: list[dict]            # vertex -> {step: neighbour vertex}


def _build_problem(grid: GridDims, V: int) -> _Problem:
    vertices = sorted(grid.vertices())
    vidx = {p: i for i, p in enumerate(vertices)}
    keyid: dict = {}
    region, keys, members = [], [], []
    for i, p in enumerate(vertices):
        k = boundary_distances(grid, p, V).pairs
        if k not in keyid:
            keyid[k] = len(keys)
            keys.append(k)
            members.append([])
        region.append(keyid[k])
        members[keyid[k]].append(i)
    target = []
    for p in vertices:
        out = {}
        for axis in range(1, grid.d + 1):
            for sign in (-1, 1):
                q = Step(axis, sign).apply(p)
                if q in grid:
                    out[Step(axis, sign)] = vidx[q]
        target.append(out)
    # a direction is usable for a region iff it is legal at its members; all
    # members share boundary distances, so checking one member suffices
    moves = []
    for rid, mem in enumerate(members):
        legal = target[mem[0]]
        moves.append([s for axis in range(1, grid.d + 1) for s in (Step(axis, -1), Step(axis, 1))
                      if s in legal])
    return _Problem(vertices, region, keys, members, moves, target)


class _Search:
    """Depth-first search over partial direction assignments.

    The walk from vertex 0 is followed; a region's direction is chosen the
    first time the walk enters it. A branch dies when the walk would revisit
    a vertex before covering everything (a memoryless run is then periodic
    without full coverage), when two vertices would share a successor, or
    when some vertex is left with no possible way in or out.
    """

    def __init__(self, prob: _Problem, cap: int):
        self.p = prob
        self.cap = cap
        self.nodes = 0
        n = len(prob.vertices)
        self.n = n
        self.assign: list[Step | None] = [None] * len(prob.keys)
        self.visited = [False] * n
        self.claimed = [-1] * n  # successor -> vertex pointing at it
        self.nbrs = [sorted(set(prob.target[v].values())) for v in range(n)]

    def _assign(self, rid: int, step: Step) -> list[int] | None:
        done = []
        for v in self.p.members[rid]:
            w = self.p.target[v][step]
            if self.claimed[w] != -1 or (self.visited[w] and w != 0 and not self.visited[v]):
                for u in done:
                    self.claimed[self.p.target[u][step]] = -1
                return None
            self.claimed[w] = v
            done.append(v)
        self.assign[rid] = step
        return done

    def _unassign(self, rid: int, done: list[int]):
        step = self.assign[rid]
        for v in done:
            self.claimed[self.p.target[v][step]] = -1
        self.assign[rid] = None

    def _can_enter(self, u: int, cur: int) -> bool:
        if self.claimed[u] != -1:
            return True
        if self.visited[u] and u != 0:
            return True
        for w in self.nbrs[u]:
            if (not self.visited[w] or w == cur) and self.assign[self.p.region[w]] is None:
                return True
        return False

    def _can_leave(self, u: int) -> bool:
        if self.visited[u] or self.assign[self.p.region[u]] is not None:
            return True
        for w in self.nbrs[u]:
            if self.claimed[w] == -1 and (not self.visited[w] or w == 0):
                return True
        return False

    def _locally_ok(self, cur: int, touched) -> bool:
        # only vertices next to a newly claimed or newly assigned vertex can
        # have lost their last way in or out
        for x in touched:
            for u in self.nbrs[x]:
                if not (self._can_enter(u, cur) and self._can_leave(u)):
                    return False
        return self._can_enter(0, cur)

    def run(self, cur: int = 0, depth: int = 1, first: Sequence[Step] | None = None) -> bool:
        self.visited[cur] = True
        found = self._walk(cur, depth, first)
        if not found:
            self.visited[cur] = False
        return found

    def _walk(self, cur: int, depth: int, first) -> bool:
        rid = self.p.region[cur]
        if self.assign[rid] is not None:
            options = [(self.assign[rid], None)]
        else:
            options = [(s, rid) for s in (first if first is not None else self.p.moves[rid])]
        for step, new_rid in options:
            nxt = self.p.target[cur][step]
            if depth == self.n:
                if nxt != 0:
                    continue
            elif self.visited[nxt]:
                continue
            done = None
            if new_rid is not None:
                self.nodes += 1
                if self.nodes > self.cap:
                    raise SearchCapExceeded(f"search explored more than {self.cap} nodes")
                done = self._assign(new_rid, step)
                if done is None:
                    continue
            if depth == self.n:
                return True
            touched = [nxt]
            if done:
                touched += done
                touched += [self.p.target[v][step] for v in done]
            if self._locally_ok(nxt, touched) and self.run(nxt, depth + 1):
                return True
            if new_rid is not None:
                self._unassign(new_rid, done)
        return False


DEFAULT_SEARCH_CAP = 1 << 23


def _search_branch(args):
    grid, V, cap, step = args
    prob = _build_problem(grid, V)
    s = _Search(prob, cap)
    found = s.run(first=[step])
    return found, (list(s.assign) if found else None), s.nodes


def brute_force_0bit_search(dims, V: int, cap: int = DEFAULT_SEARCH_CAP,
                            max_vertices: int = 256, jobs: int = 1,
                            stats: dict | None = None) -> TablePolicy | None:
    """Exhaustively look for a memoryless policy that patrols the grid.

    Policies assign one direction per sensing region (directions ordered by
    axis, then -1 before +1). Every assignment is covered, either explicitly
    or by a pruned branch that no completion can rescue. The first policy
    found is confirmed from every start with the simulator before being
    returned. ``cap`` bounds the number of search nodes.
    """
    grid = as_grid(dims)
    if grid.size > max_vertices:
        raise SearchCapExceeded(f"grid {grid} has {grid.size} vertices, limit {max_vertices}")
    prob = _build_problem(grid, V)
    # Vertex 0 is the all-ones corner, so every first step is +x_j. Swapping
    # two equally long axes fixes that corner and maps one branch onto the
    # other, so only the first axis of each length needs exploring.
    first_moves, lengths = [], set()
    for s in prob.moves[prob.region[0]]:
        if grid.dims[s.axis - 1] not in lengths:
            lengths.add(grid.dims[s.axis - 1])
            first_moves.append(s)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_search_branch, [(grid, V, cap, s) for s in first_moves]))
    else:
        outcomes = []
        for s in first_moves:
            outcomes.append(_search_branch((grid, V, cap, s)))
            if outcomes[-1][0]:
                break
    if stats is not None:
        stats["nodes"] = sum(o[2] for o in outcomes)
    for found, assign, _ in outcomes:
        if not found:
            continue
        table = {(prob.keys[rid], 0): (step, 0)
                 for rid, step in enumerate(assign) if step is not None}
        policy = TablePolicy(table, V, n_states=1)
        if verify_patrols(grid, policy).passed:
            return policy
        raise AssertionError("search produced a policy the simulator rejects")
    return None
