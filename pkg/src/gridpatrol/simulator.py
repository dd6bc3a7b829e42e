"""Run policies on environments, record traces and check patrolling claims.

An *environment* is anything with ``vertices()``, ``__contains__``,
``boundary_distances(p, V)`` and ``sense_key(p, V)``: a
:class:`~gridpatrol.grid.GridDims` or a
:class:`~gridpatrol.environment.Environment`.

Cover times count steps (edge traversals); the start vertex is visited at
step 0.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .grid import FloorSpec, GridDims, Position, as_grid
from .policies import Policy, PolicyUndefinedError


class SimulationError(Exception):
    """A run was aborted; ``t`` is the step index at which it failed."""

    code = "simulation-error"

    def __init__(self, message, t=None, position=None, mem=None):
        super().__init__(message)
        self.t, self.position, self.mem = t, position, mem


class IllegalStepError(SimulationError):
    code = "illegal-step"


class ZeroStepError(SimulationError):
    code = "zero-step"


class PolicyFailure(SimulationError):
    code = "policy-undefined"


def _coerce_env(env):
    if isinstance(env, (GridDims, str, list, tuple)):
        return as_grid(env)
    return env


def perceive(env, policy: Policy, p: Position):
    if policy.sensor == "offsets":
        return env.sense_key(p, policy.V)
    return env.boundary_distances(p, policy.V)


def target_vertices(env, target) -> frozenset:
    if target is None:
        return frozenset(env.vertices())
    if isinstance(target, FloorSpec):
        return frozenset(target.vertices(env))
    return frozenset(tuple(p) for p in target)


def transition(env, policy: Policy, p: Position, mem, t=None):
    """One step of ``policy`` from ``(p, mem)``: returns ``(p', mem', stayed)``."""
    try:
        step, new_mem = policy(perceive(env, policy, p), mem)
    except PolicyUndefinedError as exc:
        raise PolicyFailure(str(exc), t, p, mem) from exc
    if step.is_zero:
        if not policy.may_stay:
            raise ZeroStepError(f"zero step at {p} mem {mem}", t, p, mem)
        return p, new_mem, True
    q = step.apply(p)
    if q not in env:
        raise IllegalStepError(f"step {step} leaves the environment at {p}", t, p, mem)
    return q, new_mem, False


@dataclass
class Trace:
    """States visited by a run; ``positions[t]``/``mems[t]`` hold the state at step t.

    With ``record=False`` only the first and last states are kept; the verdict
    fields are the same either way.
    """

    positions: list
    mems: list
    stays: list = field(default_factory=list)
    steps: int = 0
    cover_time: int | None = None
    cycle_start: int | None = None
    cycle_len: int | None = None
    target_size: int = 0
    error: SimulationError | None = None
    recorded: bool = True

    @property
    def covered(self) -> bool:
        return self.cover_time is not None

    def to_records(self, encode=lambda m: m) -> list[dict]:
        out = []
        for t, (p, m) in enumerate(zip(self.positions, self.mems)):
            rec = {"t": t, "coords": list(p), "mem": encode(m)}
            if t > 0 and self.stays and self.stays[t - 1]:
                rec["stay"] = True
            out.append(rec)
        return out

    def to_json(self, encode=lambda m: m) -> str:
        return json.dumps(self.to_records(encode))


def run(env, policy: Policy, start: Sequence[int], mem=0, max_steps: int = 1000,
        target=None, record: bool = True, stop: str = "never") -> Trace:
    """Step ``policy`` from ``(start, mem)`` for up to ``max_steps`` steps.

    ``stop`` controls early exit: ``"never"`` runs the full budget,
    ``"covered"`` stops once the target is covered, ``"decided"`` also stops
    when a repeated configuration shows the target will never be covered.
    Illegal and zero steps raise; so does a policy with no applicable rule.
    """
    env = _coerce_env(env)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    p = tuple(start)
    if p not in env:
        raise IllegalStepError(f"start {p} is not in the environment", 0, p, mem)
    goal = target_vertices(env, target)
    remaining = set(goal)
    remaining.discard(p)

    trace = Trace([p], [mem], target_size=len(goal), recorded=record)
    if not remaining:
        trace.cover_time = 0
    seen = {(p, mem): 0}
    for t in range(1, max_steps + 1):
        p, mem, stayed = transition(env, policy, p, mem, t - 1)
        trace.steps = t
        if record:
            trace.positions.append(p)
            trace.mems.append(mem)
            trace.stays.append(stayed)
        else:
            trace.positions[-1:] = [p]
            trace.mems[-1:] = [mem]
        if remaining:
            remaining.discard(p)
            if not remaining:
                trace.cover_time = t
        if trace.cycle_start is None:
            cfg = (p, mem)
            if cfg in seen:
                trace.cycle_start = seen[cfg]
                trace.cycle_len = t - seen[cfg]
            else:
                seen[cfg] = t
        if stop != "never" and trace.cover_time is not None:
            break
        if stop == "decided" and trace.cycle_start is not None:
            break
    return trace


# --------------------------------------------------------------------------
# verification


@dataclass
class StartResult:
    position: Position
    mem: Any
    status: str  # covered | never | budget | error
    cover_time: int | None = None
    detail: str = ""

    def to_dict(self, encode=lambda m: m):
        out = {"coords": list(self.position), "mem": encode(self.mem), "status": self.status}
        if self.cover_time is not None:
            out["cover_time"] = self.cover_time
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerifyReport:
    verdict: str  # PASS | FAIL | INCONCLUSIVE
    budget: int
    worst_cover_time: int | None
    starts: int
    failures: list[StartResult]
    inconclusive: list[StartResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self, encode=lambda m: m) -> dict:
        return {
            "verdict": self.verdict,
            "worst_cover_time": self.worst_cover_time,
            "budget": self.budget,
            "starts": self.starts,
            "failures": [f.to_dict(encode) for f in self.failures],
            "inconclusive": [f.to_dict(encode) for f in self.inconclusive],
        }

    def to_json(self, encode=lambda m: m) -> str:
        return json.dumps(self.to_dict(encode), sort_keys=True)


def default_budget(env, policy: Policy, target=None) -> int:
    """``|vertices| * |memory states|``: enough for any finite-memory run to repeat."""
    env = _coerce_env(env)
    n = sum(1 for _ in env.vertices())
    return n * len(list(policy.initial_mems()))


def _merge(results: list[StartResult], budget: int) -> VerifyReport:
    failures = [r for r in results if r.status in ("never", "error")]
    pending = [r for r in results if r.status == "budget"]
    times = [r.cover_time for r in results if r.cover_time is not None]
    if failures:
        verdict = "FAIL"
    elif pending:
        verdict = "INCONCLUSIVE"
    else:
        verdict = "PASS"
    failures.sort(key=lambda r: (r.position, str(r.mem)))
    pending.sort(key=lambda r: (r.position, str(r.mem)))
    return VerifyReport(verdict, budget, max(times) if times else None,
                        len(results), failures, pending)


def _run_one(env, policy, p, m, budget, target) -> StartResult:
    try:
        tr = run(env, policy, p, m, budget, target, record=False, stop="decided")
    except SimulationError as exc:
        return StartResult(p, m, "error", None, f"{exc.code}: {exc}")
    if tr.covered:
        return StartResult(p, m, "covered", tr.cover_time)
    if tr.cycle_start is not None:
        return StartResult(p, m, "never", None, "configuration repeated before coverage")
    return StartResult(p, m, "budget", None, "budget exhausted")


def _run_chunk(args):
    env, policy, chunk, budget, target = args
    return [_run_one(env, policy, p, m, budget, target) for p, m in chunk]


def _jobs(jobs):
    if jobs is None:
        jobs = int(os.environ.get("GRIDPATROL_JOBS", "1") or 1)
    return max(1, jobs)


def verify_patrols(env, policy: Policy, target=None, budget: int | None = None,
                   mems: Iterable | None = None, jobs: int | None = None,
                   method: str = "auto") -> VerifyReport:
    """Run from every (start vertex in the target, initial memory) pair.

    PASS iff every run covers the target within ``budget`` steps. A run that
    repeats a configuration before covering is a definite FAIL; one that
    simply runs out of budget is INCONCLUSIVE.

    ``method="table"`` tabulates the policy over all configurations once and
    sweeps every start at the same time with numpy; ``"scalar"`` calls
    :func:`run` per start. ``"auto"`` picks the table sweep whenever the
    memory states are a small integer range.
    """
    env = _coerce_env(env)
    budget = default_budget(env, policy, target) if budget is None else budget
    if budget < 1:
        raise ValueError("budget must be >= 1")
    mems = list(policy.initial_mems() if mems is None else mems)
    goal = target_vertices(env, target)
    starts = [(p, m) for p in sorted(goal) for m in mems]

    if method == "auto":
        method = "table" if all(isinstance(m, (int, np.integer)) for m in mems) else "scalar"
    if method == "table":
        table = TransitionTable.build(env, policy, mems)
        return _merge(table.sweep(starts, budget, goal), budget)

    jobs = _jobs(jobs)
    if jobs == 1:
        return _merge(_run_chunk((env, policy, starts, budget, target)), budget)
    chunks = [starts[i::jobs] for i in range(jobs)]
    with ProcessPoolExecutor(jobs) as pool:
        parts = pool.map(_run_chunk, [(env, policy, c, budget, target) for c in chunks])
    return _merge([r for part in parts for r in part], budget)


class TransitionTable:
    """The policy's full transition function over integer configuration ids.

    Configuration ``v * M + m`` is vertex ``v`` with memory index ``m``.
    ``nxt`` holds the successor id, or ``-1`` where the step fails.
    """

    def __init__(self, vertices, mems, nxt, errors):
        self.vertices = vertices
        self.mems = mems
        self.nxt = nxt
        self.errors = errors
        self.vindex = {p: i for i, p in enumerate(vertices)}
        self.mindex = {m: i for i, m in enumerate(mems)}

    @classmethod
    def build(cls, env, policy: Policy, mems) -> "TransitionTable":
        vertices = sorted(env.vertices())
        vindex = {p: i for i, p in enumerate(vertices)}
        mems = list(mems)
        mindex = {m: i for i, m in enumerate(mems)}
        M = len(mems)
        nxt = np.full(len(vertices) * M, -1, dtype=np.int64)
        errors = {}
        for v, p in enumerate(vertices):
            for mi, m in enumerate(mems):
                cid = v * M + mi
                try:
                    q, m2, _ = transition(env, policy, p, m)
                except SimulationError as exc:
                    errors[cid] = f"{exc.code}: {exc}"
                    continue
                if m2 not in mindex:
                    errors[cid] = f"memory state {m2!r} out of range"
                    continue
                nxt[cid] = vindex[q] * M + mindex[m2]
        return cls(vertices, mems, nxt, errors)

    def config(self, p, m) -> int:
        return self.vindex[tuple(p)] * len(self.mems) + self.mindex[m]

    def sweep(self, starts, budget: int, goal, batch: int | None = None) -> list[StartResult]:
        M = len(self.mems)
        N = len(self.vertices)
        goal_idx = np.full(N, -1, dtype=np.int64)
        for gi, p in enumerate(sorted(goal)):
            goal_idx[self.vindex[p]] = gi
        G = len(goal)
        if batch is None:
            batch = max(1, (1 << 24) // max(G, 1))
        results = []
        for lo in range(0, len(starts), batch):
            chunk = starts[lo:lo + batch]
            state = np.array([self.config(p, m) for p, m in chunk], dtype=np.int64)
            results.extend(self._sweep_batch(chunk, state, budget, goal_idx, G, M))
        return results

    def _sweep_batch(self, chunk, state, budget, goal_idx, G, M):
        S = len(chunk)
        rows = np.arange(S)
        visited = np.zeros((S, G), dtype=bool)
        count = np.zeros(S, dtype=np.int64)
        cover = np.full(S, -1, dtype=np.int64)
        failed_at = np.full(S, -1, dtype=np.int64)
        fail_cfg = np.full(S, -1, dtype=np.int64)
        live = np.ones(S, dtype=bool)
        for t in range(budget + 1):
            g = goal_idx[state // M]
            hit = live & (g >= 0)
            fresh = hit.copy()
            fresh[hit] = ~visited[rows[hit], g[hit]]
            visited[rows[fresh], g[fresh]] = True
            count += fresh
            done = live & (count == G)
            cover[done] = t
            live &= ~done
            if t == budget or not live.any():
                break
            nxt = self.nxt[state]
            bad = live & (nxt < 0)
            failed_at[bad] = t
            fail_cfg[bad] = state[bad]
            live &= ~bad
            state = np.where(live, nxt, state)

        out = []
        for i, (p, m) in enumerate(chunk):
            if cover[i] >= 0:
                out.append(StartResult(p, m, "covered", int(cover[i])))
            elif failed_at[i] >= 0:
                out.append(StartResult(p, m, "error", None,
                                       f"t={int(failed_at[i])} {self.errors[int(fail_cfg[i])]}"))
            else:
                closed = self.first_repeat(self.config(p, m))
                if closed is not None and closed <= budget:
                    out.append(StartResult(p, m, "never", None,
                                           "configuration repeated before coverage"))
                else:
                    out.append(StartResult(p, m, "budget", None, "budget exhausted"))
        return out

    def first_repeat(self, cid: int) -> int | None:
        """Step at which the run from ``cid`` first revisits a configuration."""
        seen = {}
        t = 0
        while cid >= 0:
            if cid in seen:
                return t
            seen[cid] = t
            cid = int(self.nxt[cid])
            t += 1
        return None

    def arrows(self) -> dict:
        """``{(p, m): (p', m')}`` for every configuration with a legal step."""
        M = len(self.mems)
        out = {}
        for cid, n in enumerate(self.nxt):
            if n >= 0:
                out[(self.vertices[cid // M], self.mems[cid % M])] = (
                    self.vertices[n // M], self.mems[n % M])
        return out

    def recurrent(self) -> set[int]:
        """Configurations lying on a cycle of the transition function."""
        nxt = self.nxt
        on_cycle = set()
        color = np.zeros(len(nxt), dtype=np.int8)  # 0 new, 1 on stack, 2 done
        for s in range(len(nxt)):
            if color[s]:
                continue
            path = []
            c = s
            while c >= 0 and color[c] == 0:
                color[c] = 1
                path.append(c)
                c = int(nxt[c])
            if c >= 0 and color[c] == 1:
                on_cycle.update(path[path.index(c):])
            for x in path:
                color[x] = 2
        return on_cycle


# --------------------------------------------------------------------------
# trace analyses


@dataclass
class CycleCheck:
    is_hamiltonian_cycle: bool | None
    length: int | None
    tail: int | None = None
    inconclusive: bool = False

    def to_dict(self):
        return {"is_hamiltonian_cycle": self.is_hamiltonian_cycle, "length": self.length,
                "tail": self.tail, "inconclusive": self.inconclusive}


def induced_cycle_check(trace: Trace, env) -> CycleCheck:
    """Does the closed orbit in ``trace`` pass through every vertex exactly once?

    Needs a recorded trace long enough for a configuration to repeat;
    otherwise the result is explicitly inconclusive.
    """
    env = _coerce_env(env)
    if trace.cycle_start is None or not trace.recorded:
        return CycleCheck(None, None, None, inconclusive=True)
    cyc = trace.positions[trace.cycle_start: trace.cycle_start + trace.cycle_len]
    vertices = set(env.vertices())
    ok = len(cyc) == len(vertices) and set(cyc) == vertices
    return CycleCheck(ok, trace.cycle_len, trace.cycle_start)


@dataclass
class FloorEntry:
    t: int
    position: Position
    mem: Any
    fixed: tuple
    direction: str  # up | down | start
    axis: int | None
    fully_covered: bool
    left_at: int | None


def floor_entry_audit(trace: Trace, dims, k: int) -> list[FloorEntry]:
    """Split a grid trace into stays on k-floors.

    For each stay (beginning with the start floor), report how the floor was
    entered and whether every floor vertex was visited before the agent
    left it. A stay cut off by the end of the trace has ``left_at=None``.
    """
    grid = as_grid(dims)
    if not 1 <= k < grid.d:
        raise ValueError(f"floor audit needs 1 <= k < d, got k={k}, d={grid.d}")
    if not trace.recorded:
        raise ValueError("floor audit needs a recorded trace")
    floor_size = grid.size // int(np.prod(grid.dims[k:]))
    pos = trace.positions
    entries = []
    t0 = 0
    direction, axis = "start", None
    visited = {pos[0][:k]}
    for t in range(1, len(pos) + 1):
        if t < len(pos) and pos[t][k:] == pos[t - 1][k:]:
            visited.add(pos[t][:k])
            continue
        left = t if t < len(pos) else None
        entries.append(FloorEntry(t0, pos[t0], trace.mems[t0], pos[t0][k:], direction,
                                  axis, len(visited) == floor_size, left))
        if t < len(pos):
            diff = [i for i in range(k, grid.d) if pos[t][i] != pos[t - 1][i]]
            axis = diff[0] + 1
            direction = "up" if pos[t][diff[0]] > pos[t - 1][diff[0]] else "down"
            t0 = t
            visited = {pos[t][:k]}
    return entries
