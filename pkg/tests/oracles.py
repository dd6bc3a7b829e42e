"""Reference implementations used only by the tests.

Each one recomputes a quantity by a different route from the library code:
boundary distances from raw offset sets, walks with a plain loop, Hamiltonian
cycles by permutation enumeration, diameters with networkx, and arrow maps by
parsing emitted DOT text.
"""
from __future__ import annotations

import itertools
import re

import networkx as nx


def grid_points(dims):
    return list(itertools.product(*(range(1, n + 1) for n in dims)))


def offsets_in_grid(dims, p, V):
    """All in-grid offsets within Manhattan distance V, by scanning the box."""
    out = set()
    for q in grid_points(dims):
        off = tuple(b - a for a, b in zip(p, q))
        if sum(map(abs, off)) <= V:
            out.add(off)
    return out


def boundary_from_offsets(offsets, d):
    """Recover (l_i, r_i) from an offset set: the longest ray along each axis."""
    pairs = []
    for i in range(d):
        def ray(sign):
            k = 0
            while tuple(sign * (k + 1) if j == i else 0 for j in range(d)) in offsets:
                k += 1
            return k
        pairs.append((ray(-1), ray(1)))
    return tuple(pairs)


def walk(dims, policy, start, mem, steps):
    """Plain loop: sense, ask the policy, move. Returns visited (position, mem) list."""
    from gridpatrol.grid import SenseData
    V = policy.V
    p, m = tuple(start), mem
    states = [(p, m)]
    for _ in range(steps):
        sense = SenseData(tuple((min(x - 1, V), min(n - x, V)) for x, n in zip(p, dims)), V)
        step, m = policy(sense, m)
        assert step.axis != 0, "zero step"
        i = step.axis - 1
        p = p[:i] + (p[i] + step.sign,) + p[i + 1:]
        assert 1 <= p[i] <= dims[i], "left the grid"
        states.append((p, m))
    return states


def cover_time(states, vertices):
    need = set(vertices)
    for t, (p, _) in enumerate(states):
        need.discard(p)
        if not need:
            return t
    return None


def orbit_is_hamiltonian(dims, policy, start):
    """A memoryless orbit from ``start`` returns after exactly N steps having
    touched every vertex once."""
    n = 1
    for x in dims:
        n *= x
    states = walk(dims, policy, start, 0, n)
    ps = [p for p, _ in states]
    return ps[-1] == ps[0] and len(set(ps[:-1])) == n


def has_hamiltonian_cycle(adjacency) -> bool:
    """Permutation enumeration, fixing the first vertex. Small graphs only."""
    verts = sorted(adjacency)
    if len(verts) == 1:
        return True
    if len(verts) == 2:
        return verts[1] in adjacency[verts[0]]
    first, rest = verts[0], verts[1:]
    adj = {v: set(a) for v, a in adjacency.items()}
    for perm in itertools.permutations(rest):
        if perm[0] > perm[-1]:
            continue
        cyc = (first,) + perm
        if all(cyc[i + 1] in adj[cyc[i]] for i in range(len(cyc) - 1)) and first in adj[cyc[-1]]:
            return True
    return False


def is_cycle(cycle, adjacency) -> bool:
    n = len(cycle)
    if set(cycle) != set(adjacency) or len(set(cycle)) != n:
        return False
    if n == 1:
        return True
    return all(cycle[(i + 1) % n] in adjacency[cycle[i]] for i in range(n))


def nx_diameter(points) -> int:
    g = nx.Graph()
    pts = set(map(tuple, points))
    g.add_nodes_from(pts)
    for p in pts:
        for i in range(len(p)):
            q = p[:i] + (p[i] + 1,) + p[i + 1:]
            if q in pts:
                g.add_edge(p, q)
    return nx.diameter(g)


_NODE = re.compile(r'^\s*"([^"]+)" \[.*style=(\w+)')
_EDGE = re.compile(r'^\s*"([^"]+)" -> "([^"]+)"')


def parse_dot(text):
    """Return ({node: style}, [(src, dst)]) from a diagram's DOT text."""
    nodes, edges = {}, []
    for line in text.splitlines():
        m = _EDGE.match(line)
        if m:
            edges.append((m.group(1), m.group(2)))
            continue
        m = _NODE.match(line)
        if m:
            nodes[m.group(1)] = m.group(2)
    return nodes, edges


def naive_0bit_exists(dims, V=1) -> bool:
    """Enumerate every assignment of one legal direction per sensing key and
    test whether the orbit from the all-ones corner is a Hamiltonian cycle
    (for a memoryless policy that is equivalent to patrolling)."""
    from gridpatrol.grid import Step
    pts = grid_points(dims)
    key_of = {p: tuple((min(x - 1, V), min(n - x, V)) for x, n in zip(p, dims)) for p in pts}
    keys = sorted(set(key_of.values()))
    legal = []
    for key in keys:
        opts = []
        for i, (l, r) in enumerate(key):
            if l:
                opts.append(Step(i + 1, -1))
            if r:
                opts.append(Step(i + 1, 1))
        legal.append(opts)
    n = len(pts)
    start = (1,) * len(dims)
    for choice in itertools.product(*legal):
        rule = dict(zip(keys, choice))
        p, seen = start, set()
        for _ in range(n):
            seen.add(p)
            p = rule[key_of[p]].apply(p)
        if p == start and len(seen) == n:
            return True
    return False
