"""Patrolling policies: deterministic maps ``(sense, mem) -> (step, mem')``.

Policies never see absolute positions. Distance-sensing policies receive a
:class:`~gridpatrol.grid.SenseData`; the full-visibility policies in
:mod:`gridpatrol.environment` receive offset sets instead (``sensor``).

The module-level functions are the algorithms themselves; the classes wrap
them with the metadata the simulator needs (memory width, sensing range).
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

from .grid import GridDims, SenseData, Step, as_grid, format_key, parse_key


class PolicyError(Exception):
    """Base class for policy failures."""


class PolicyUndefinedError(PolicyError):
    """The policy has no rule for this (sense, mem) input."""


class PolicyConfigError(PolicyError, ValueError):
    """A policy was constructed with an incompatible sensing range or memory."""


# --------------------------------------------------------------------------
# memoryless policies


def parity(V: int, n: int, l: int, r: int) -> int:
    """Parity of ``x - 1`` on an axis of length ``n``, recovered from ``(l, r)``."""
    if l < V:
        return l % 2
    return (n - r + 1) % 2


def _down_bits(dims: Sequence[int], s: SenseData) -> list[int]:
    # down[j] = sum_{i>j} parity_i mod 2, for j = 1..d (index 0 unused)
    d = len(dims)
    out = [0] * (d + 1)
    acc = 0
    for j in range(d, 0, -1):
        out[j] = acc % 2
        l, r = s.pairs[j - 1]
        acc += parity(s.V, dims[j - 1], l, r)
    return out


def memoryless_v1(dims, s: SenseData) -> Step:
    """Zig-zag sweep with sensing range 1 and no memory.

    ``dims`` must already be in the policy's axis order (largest axis first);
    :class:`MemorylessV1` takes care of that.
    """
    dims = as_grid(dims).dims
    down = _down_bits(dims, s)
    for j in range(1, len(dims) + 1):
        if down[j] == 0 and s.r(j) > 0:
            return Step.up(j)
        if down[j] == 1 and s.l(j) > 0:
            return Step.down(j)
    return Step.down(len(dims))


def memoryless_vgt1(dims, s: SenseData) -> Step:
    """Sweep ``x_1 > 1`` in a zig-zag, then return along the ``x_1 = 1`` strip."""
    dims = as_grid(dims).dims
    d = len(dims)
    down = _down_bits(dims, s)
    if s.l(1) == 0:
        for j in range(2, d + 1):
            if down[j] == 0 and s.l(j) > 0:
                return Step.down(j)
            if down[j] == 1 and s.r(j) > 0:
                return Step.up(j)
        return Step.up(1)
    for j in range(1, d + 1):
        if down[j] == 0 and s.r(j) > 0:
            return Step.up(j)
        if down[j] == 1 and s.l(j) > 0:
            if j == 1 and s.l(1) == 1:
                continue  # never step onto the x_1 = 1 strip from the zig-zag
            return Step.down(j)
    return Step.down(1)


# --------------------------------------------------------------------------
# one-bit policies (V = 1)


def make_move_1d(s: SenseData, mem: int) -> tuple[Step, int]:
    if mem == 0:
        if s.r(1) != 0:
            return Step.up(1), 0
        return Step.down(1), 1
    if s.l(1) != 0:
        return Step.down(1), 1
    return Step.up(1), 0


# (mem, guard, step, mem') in pseudocode order; guards read (l1, r1, l2, r2).
_GUARDS_2D = (
    (0, lambda l1, r1, l2, r2: r1 != 0 and l2 != 0, Step.up(1), 0),
    (0, lambda l1, r1, l2, r2: l1 != 0 and l2 == 0, Step.down(1), 0),
    (0, lambda l1, r1, l2, r2: l1 == 0 and l2 == 0, Step.up(2), 0),
    (0, lambda l1, r1, l2, r2: r1 == 0 and l2 * r2 != 0, Step.down(1), 1),
    (0, lambda l1, r1, l2, r2: r1 == 0 and r2 == 0, Step.down(2), 1),
    (1, lambda l1, r1, l2, r2: l1 == 0 and r2 != 0, Step.up(2), 0),
    (1, lambda l1, r1, l2, r2: l1 == 0 and r2 == 0, Step.up(1), 0),
    (1, lambda l1, r1, l2, r2: l1 * r1 != 0 and r2 != 0, Step.down(1), 1),
    (1, lambda l1, r1, l2, r2: l1 * r1 != 0 and r2 == 0, Step.up(1), 1),
    (1, lambda l1, r1, l2, r2: r1 == 0 and l2 == 0, Step.down(1), 0),
    (1, lambda l1, r1, l2, r2: r1 == 0 and l2 != 0, Step.down(2), 1),
)


def fired_guards_2d(s: SenseData, mem: int) -> list[int]:
    """Indices (0..10) of the two-dimensional guards that hold for this input."""
    (l1, r1), (l2, r2) = s.pairs[0], s.pairs[1]
    return [
        i
        for i, (m, guard, _, _) in enumerate(_GUARDS_2D)
        if m == mem and guard(l1, r1, l2, r2)
    ]


def make_move_2d(s: SenseData, mem: int) -> tuple[Step, int]:
    if s.d < 2:
        raise PolicyUndefinedError("make_move_2d needs at least two axes")
    fired = fired_guards_2d(s, mem)
    if len(fired) != 1:
        # only possible for readings no grid with n_i >= 2 produces
        raise PolicyUndefinedError(
            f"{len(fired)} guards hold for sense {s} mem {mem}"
        )
    _, _, step, new_mem = _GUARDS_2D[fired[0]]
    return step, new_mem


def make_move_3d(s: SenseData, mem: int) -> tuple[Step, int]:
    if s.l(1) == 0 and s.r(2) == 0 and mem == 0:
        if s.r(3) == 0:
            return Step.up(1), 1
        return Step.up(3), 1
    if s.l(1) != 0 and s.l(3) != 0 and s.r(2) == 0 and mem == 1:
        return Step.down(3), mem
    return make_move_2d(s, mem)


def make_move_kd(s: SenseData, mem: int, k: int) -> tuple[Step, int]:
    """The ``(k+1)``-axis inductive rule, ``k >= 3``.

    Reads axes ``1..k+1`` and delegates to the ``k``-axis rule (the 3-axis
    rule when ``k == 3``) outside its designated states.
    """
    if k < 3:
        raise PolicyConfigError("make_move_kd is defined for k >= 3")
    if s.d < k + 1:
        raise PolicyUndefinedError(f"need {k + 1} axes, sense has {s.d}")
    if all(s.l(j) == 0 for j in range(2, k)) and s.r(k) == 0 and mem == 1:
        if s.r(1) == 0:
            if s.r(k + 1) == 0:
                return Step.down(1), mem
            return Step.up(k + 1), 0
        if s.l(k + 1) != 0:
            return Step.down(k + 1), mem
    if k == 3:
        return make_move_3d(s, mem)
    return make_move_kd(s, mem, k - 1)


def make_move_all(s: SenseData, mem: int) -> tuple[Step, int]:
    """One-bit patrol of any grid; the dimension is read off the sense data."""
    d = s.d
    if d == 1:
        return make_move_1d(s, mem)
    if d == 2:
        return make_move_2d(s, mem)
    if d == 3:
        return make_move_3d(s, mem)
    return make_move_kd(s, mem, d - 1)


def make_move_noninductive(s: SenseData, mem: int) -> tuple[Step, int]:
    """Flat form of :func:`make_move_all` with no recursive calls.

    The flat rule references axis 3, so one- and two-axis inputs go to the
    dedicated low-dimensional rules.
    """
    d = s.d
    if d == 1:
        return make_move_1d(s, mem)
    if d == 2:
        return make_move_2d(s, mem)

    if mem == 0 and s.l(1) == 0 and s.r(2) == 0:
        if s.r(3) == 0:
            return Step.up(1), 1
        return Step.up(3), 1

    if mem == 1:
        # first axis above 2 whose coordinate exceeds 1
        k = next((j for j in range(3, d + 1) if s.l(j) > 0), None)
        move_up = s.r(1) == 0 and s.l(2) == 0
        if move_up and k is not None and k < d and s.r(k) == 0:
            if s.r(k + 1) == 0:
                return Step.down(1), mem
            return Step.up(k + 1), 0
        if s.l(1) != 0 and s.r(2) == 0:
            if s.l(3) != 0:
                return Step.down(3), mem
            return make_move_2d(s, mem)
        move_down = s.r(1) != 0 and s.l(2) == 0
        if move_down and k is not None and k < d and s.r(k) == 0:
            if s.l(k + 1) != 0:
                return Step.down(k + 1), mem
            return make_move_2d(s, mem)
    return make_move_2d(s, mem)


# --------------------------------------------------------------------------
# policy objects


class Policy:
    """A deterministic patrolling policy.

    Subclasses implement :meth:`__call__`. ``bits`` is the memory width;
    ``sensor`` tells the simulator which percept to compute ("distances" for
    :class:`SenseData`, "offsets" for full offset sets).
    """

    kind = "abstract"
    bits = 0
    V = 1
    sensor = "distances"
    may_stay = False

    def __call__(self, sense, mem):
        raise NotImplementedError

    def initial_mems(self) -> Iterable:
        return range(2 ** self.bits)

    def encode_mem(self, mem):
        return mem

    def describe(self) -> dict:
        return {"kind": self.kind, "V": self.V, "bits": self.bits}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(V={self.V}, bits={self.bits})"


class _AxisOrderedMemoryless(Policy):
    # The zig-zag constructions assume n_1 >= n_2 >= ... >= n_d, so the
    # policy relabels axes internally (stable sort, largest first).

    def __init__(self, dims, V: int):
        self.grid = as_grid(dims)
        self.V = V
        self.order = sorted(range(self.grid.d), key=lambda i: -self.grid.dims[i])
        self.sorted_dims = GridDims(tuple(self.grid.dims[i] for i in self.order))

    def _rule(self, dims, s):
        raise NotImplementedError

    def __call__(self, sense: SenseData, mem=0):
        if sense.d != self.grid.d:
            raise PolicyUndefinedError(
                f"policy built for {self.grid.d} axes, got {sense.d}"
            )
        s = SenseData(tuple(sense.pairs[i] for i in self.order), sense.V)
        step = self._rule(self.sorted_dims, s)
        return Step(self.order[step.axis - 1] + 1, step.sign), mem

    def describe(self):
        return {**super().describe(), "dims": list(self.grid.dims)}


class MemorylessV1(_AxisOrderedMemoryless):
    kind = "memoryless-v1"

    def __init__(self, dims, V: int = 1):
        if V != 1:
            raise PolicyConfigError("memoryless-v1 requires V = 1")
        super().__init__(dims, 1)

    def _rule(self, dims, s):
        return memoryless_v1(dims, s)


class MemorylessVgt1(_AxisOrderedMemoryless):
    kind = "memoryless-vgt1"

    def __init__(self, dims, V: int = 2):
        if V < 2:
            raise PolicyConfigError("memoryless-vgt1 requires V >= 2")
        super().__init__(dims, V)

    def _rule(self, dims, s):
        return memoryless_vgt1(dims, s)


class _OneBit(Policy):
    bits = 1

    def __init__(self, V: int = 1):
        if V != 1:
            raise PolicyConfigError(f"{self.kind} requires V = 1")


class MakeMove1D(_OneBit):
    kind = "makemove-1d"

    def __call__(self, sense, mem):
        return make_move_1d(sense, mem)


class MakeMove2D(_OneBit):
    kind = "makemove-2d"

    def __call__(self, sense, mem):
        return make_move_2d(sense, mem)


class MakeMove3D(_OneBit):
    kind = "makemove-3d"

    def __call__(self, sense, mem):
        return make_move_3d(sense, mem)


class MakeMoveKD(_OneBit):
    """Inductive rule patrolling ``k + 1`` axes (``k >= 3``)."""

    kind = "makemove-kd"

    def __init__(self, k: int, V: int = 1):
        super().__init__(V)
        if k < 3:
            raise PolicyConfigError("MakeMoveKD needs k >= 3")
        self.k = k

    def __call__(self, sense, mem):
        return make_move_kd(sense, mem, self.k)

    def describe(self):
        return {**super().describe(), "k": self.k}


class MakeMove(_OneBit):
    kind = "makemove"

    def __call__(self, sense, mem):
        return make_move_all(sense, mem)


class MakeMoveNoninductive(_OneBit):
    kind = "makemove-noninductive"

    def __call__(self, sense, mem):
        return make_move_noninductive(sense, mem)


# --------------------------------------------------------------------------
# table-driven policies

TableKey = tuple[tuple[tuple[int, int], ...], int]


class TablePolicy(Policy):
    """Lookup-table policy keyed by ``(boundary distances, mem)``.

    Text format, one rule per line::

        @V 1
        0,1|0,1 ; 0 -> 1 +1 ; 0

    ``#`` starts a comment. The ``@V`` directive is optional (default 1).
    A step of ``0 0`` means "stay".
    """

    kind = "table"

    def __init__(self, table: dict[TableKey, tuple[Step, int]], V: int = 1,
                 n_states: int | None = None):
        self.table = dict(table)
        self.V = V
        seen = [m for _, m in self.table] + [m for _, m in self.table.values()]
        self.n_states = n_states if n_states is not None else (max(seen) + 1 if seen else 1)
        self.bits = math.ceil(math.log2(self.n_states)) if self.n_states > 1 else 0
        self.may_stay = any(step.is_zero for step, _ in self.table.values())

    def initial_mems(self):
        return range(self.n_states)

    def __call__(self, sense: SenseData, mem: int):
        return table_policy_eval(self.table, sense, mem)

    def __eq__(self, other):
        return (isinstance(other, TablePolicy) and self.table == other.table
                and self.V == other.V and self.n_states == other.n_states)

    def describe(self):
        return {**super().describe(), "states": self.n_states, "rules": len(self.table)}

    @classmethod
    def from_function(cls, fn, keys: Iterable, mems: Iterable[int] = (0,), V: int = 1,
                      n_states: int | None = None) -> "TablePolicy":
        """Tabulate ``fn(sense, mem)`` over the given sensing keys."""
        table = {}
        for key in keys:
            s = key if isinstance(key, SenseData) else SenseData(tuple(key), V)
            for m in mems:
                step, new = fn(s, m)
                table[(s.pairs, m)] = (step, new)
        return cls(table, V, n_states)

    @classmethod
    def from_text(cls, text: str) -> "TablePolicy":
        table: dict[TableKey, tuple[Step, int]] = {}
        V = 1
        n_states = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("@"):
                name, _, value = line[1:].partition(" ")
                if name == "V":
                    V = int(value)
                elif name == "states":
                    n_states = int(value)
                else:
                    raise PolicyConfigError(f"line {lineno}: unknown directive @{name}")
                continue
            try:
                lhs, rhs = line.split("->")
                key_text, mem_text = lhs.split(";")
                step_text, new_text = rhs.split(";")
                axis_text, sign_text = step_text.split()
                key = parse_key(key_text)
                step = Step(int(axis_text), int(sign_text))
                mem, new = int(mem_text), int(new_text)
            except ValueError as exc:
                raise PolicyConfigError(f"line {lineno}: cannot parse {raw!r}") from exc
            if step.axis < 0 or (step.axis == 0) != (step.sign == 0) or abs(step.sign) > 1:
                raise PolicyConfigError(f"line {lineno}: bad step {step_text!r}")
            if (key, mem) in table:
                raise PolicyConfigError(f"line {lineno}: duplicate rule for {key_text.strip()} ; {mem}")
            table[(key, mem)] = (step, new)
        return cls(table, V, n_states)

    def to_text(self) -> str:
        lines = [f"@V {self.V}", f"@states {self.n_states}"]
        for (key, mem), (step, new) in sorted(self.table.items()):
            sign = f"{step.sign:+d}" if step.axis else "0"
            lines.append(f"{format_key(key)} ; {mem} -> {step.axis} {sign} ; {new}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, path) -> "TablePolicy":
        return cls.from_text(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


def table_policy_eval(table, sense: SenseData, mem: int) -> tuple[Step, int]:
    try:
        return table[(sense.pairs, mem)]
    except KeyError:
        raise PolicyUndefinedError(f"no rule for sense {sense} mem {mem}") from None


# --------------------------------------------------------------------------

POLICY_NAMES = (
    "memoryless", "memoryless-v1", "memoryless-vgt1", "makemove",
    "makemove-1d", "makemove-2d", "makemove-3d", "makemove-noninductive",
)


def make_policy(name: str, dims=None, V: int = 1) -> Policy:
    """Build a policy from a selector such as ``makemove`` or ``table:FILE``.

    ``memoryless`` is shorthand for ``memoryless-v1``; the V >= 2 variant must
    be asked for by name.
    """
    if name.startswith("table:"):
        policy = TablePolicy.load(name[len("table:"):])
        return policy
    if name in ("memoryless", "memoryless-v1"):
        if V != 1:
            raise PolicyConfigError(
                "memoryless-v1 requires V = 1; use memoryless-vgt1 for V >= 2"
            )
        return MemorylessV1(_need_dims(name, dims))
    if name == "memoryless-vgt1":
        return MemorylessVgt1(_need_dims(name, dims), V)
    classes = {
        "makemove": MakeMove, "makemove-1d": MakeMove1D, "makemove-2d": MakeMove2D,
        "makemove-3d": MakeMove3D, "makemove-noninductive": MakeMoveNoninductive,
    }
    if name in classes:
        return classes[name](V)
    if name.startswith("makemove-kd:"):
        return MakeMoveKD(int(name.split(":", 1)[1]), V)
    raise PolicyConfigError(f"unknown policy {name!r}")


def _need_dims(name, dims):
    if dims is None:
        raise PolicyConfigError(f"{name} must be built for specific grid dimensions")
    return dims
