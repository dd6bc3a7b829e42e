"""Command-line entry point: ``gridpatrol <command> ...``.

Machine output (JSON, table files, diagrams) goes to standard output or to
``--output``; a one-line human summary goes to standard error.

Exit status: 0 on PASS or success, 1 on a FAIL, INCONCLUSIVE or negative
verdict, 2 on usage or runtime errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .environment import (EnvError, dirseq_patroller, env_hamiltonian_search,
                          env_load, full_visibility_hamiltonian)
from .feasibility import (DEFAULT_SEARCH_CAP, SearchCapExceeded,
                          brute_force_0bit_search, hamiltonian_search,
                          hamiltonicity_parity, theorem1_check)
from .grid import FloorSpec, GridDims, GridError, format_key, sensing_regions
from .policies import POLICY_NAMES, PolicyConfigError, PolicyError, make_policy
from .simulator import SimulationError, run, verify_patrols
from .viz import arrow_diagram

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

CONFIG_KEYS = {"budget", "max_steps", "search_cap", "hamiltonian_cap", "jobs",
               "max_vertices"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    dims: GridDims | None = None
    env_file: str | None = None
    V: int = 1
    policy: str | None = None
    start: tuple | None = None
    mem: int = 0
    budget: int | None = None
    max_steps: int = 1000
    stop: str = "never"
    floor: FloorSpec | None = None
    search_cap: int = DEFAULT_SEARCH_CAP
    hamiltonian_cap: int = 24
    max_vertices: int = 256
    jobs: int = 1
    fmt: str = "dot"
    transient: bool = True
    output: str | None = None


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file presetting caps and budgets")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $GRIDPATROL_JOBS or 1)")
    p.add_argument("-o", "--output", help="write machine output here instead of stdout")


def _add_grid(p, policy=False, v_default=1):
    p.add_argument("--dims", required=True, help="comma-separated axis lengths, e.g. 5,3,3,2")
    p.add_argument("-V", type=int, default=v_default, help="sensing range")
    if policy:
        p.add_argument("--policy", required=True,
                       help=f"one of {', '.join(POLICY_NAMES)}, makemove-kd:K or table:PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridpatrol",
                                     description="Patrolling grid graphs with tiny memory.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="0-bit patrollability verdict")
    _add_grid(p)
    _add_common(p)

    p = sub.add_parser("simulate", help="run one policy from one start")
    _add_grid(p, policy=True)
    p.add_argument("--start", help="start vertex, e.g. 1,1 (default: all ones)")
    p.add_argument("--mem", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--stop", choices=["never", "covered", "decided"], default="never")
    _add_common(p)

    p = sub.add_parser("verify", help="check patrolling from every (vertex, mem)")
    _add_grid(p, policy=True)
    p.add_argument("--budget", type=int, default=None, help="steps per start")
    p.add_argument("--floor", help="restrict the target to a floor: k=K[;q=x_{K+1},...,x_d]")
    _add_common(p)

    p = sub.add_parser("search0", help="exhaustive search for a 0-bit patrolling policy")
    _add_grid(p)
    p.add_argument("--cap", type=int, default=None, help="search-node cap")
    _add_common(p)

    p = sub.add_parser("regions", help="sensing regions and the region graph")
    _add_grid(p)
    p.add_argument("--format", dest="fmt", choices=["json", "dot"], default="json")
    _add_common(p)

    p = sub.add_parser("hamiltonian", help="Hamiltonian cycle search on a grid")
    p.add_argument("--dims", required=True)
    p.add_argument("--cap", type=int, default=None, help="vertex cap")
    _add_common(p)

    p = sub.add_parser("viz", help="arrow diagram over (vertex, mem)")
    _add_grid(p, policy=True)
    p.add_argument("--format", dest="fmt", choices=["dot", "svg"], default="dot")
    p.add_argument("--no-transient", action="store_true", help="hide transient configurations")
    _add_common(p)

    env = sub.add_parser("env", help="general environments")
    esub = env.add_subparsers(dest="env_command", required=True)
    for name, text in [("check", "connectivity and diameter"),
                       ("patrol", "verify a patroller on the environment"),
                       ("hamiltonian", "full-visibility Hamiltonian patroller")]:
        p = esub.add_parser(name, help=text)
        p.add_argument("--file", required=True,
                       help="coordinate file or generator (grid-with-hole, l-shape[:L,W], path:N)")
        if name == "patrol":
            p.add_argument("--policy", default="dirseq", help="dirseq or table:PATH")
            p.add_argument("--start", help="simulate from this vertex only and print the trace")
            p.add_argument("--mem", type=int, default=0)
            p.add_argument("--budget", type=int, default=None)
        if name == "hamiltonian":
            p.add_argument("--cap", type=int, default=None, help="vertex cap")
        _add_common(p)
    return parser


def _parse_point(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"malformed coordinates {text!r}") from None


def parse_floor(text: str, d: int) -> FloorSpec:
    fields = dict(part.split("=", 1) for part in text.split(";") if "=" in part)
    if "k" not in fields:
        raise UsageError(f"--floor needs k=K, got {text!r}")
    k = int(fields["k"])
    if not 1 <= k < d:
        raise UsageError(f"floor order k={k} must satisfy 1 <= k < d={d}")
    fixed = _parse_point(fields["q"]) if "q" in fields else (1,) * (d - k)
    if len(fixed) != d - k:
        raise UsageError(f"q must give {d - k} coordinates")
    return FloorSpec(k, fixed)


def parse_args(argv=None) -> RunConfig:
    """Parse and validate; raises ``UsageError`` (or exits, for argparse errors)."""
    ns = build_parser().parse_args(argv)
    command = ns.command if ns.command != "env" else f"env-{ns.env_command}"
    cfg = RunConfig(command)

    preset = {}
    if getattr(ns, "config", None):
        try:
            preset = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        unknown = set(preset) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for key, value in preset.items():
            setattr(cfg, key, value)

    # precedence: --jobs, then the config file, then $GRIDPATROL_JOBS
    if ns.jobs is not None:
        cfg.jobs = ns.jobs
    elif "jobs" not in preset and os.environ.get("GRIDPATROL_JOBS"):
        cfg.jobs = int(os.environ["GRIDPATROL_JOBS"])
    cfg.output = ns.output

    if hasattr(ns, "dims"):
        try:
            cfg.dims = GridDims.parse(ns.dims)
        except GridError as exc:
            raise UsageError(str(exc)) from None
    if hasattr(ns, "file"):
        cfg.env_file = ns.file
    if hasattr(ns, "V"):
        if ns.V < 1:
            raise UsageError("-V must be >= 1")
        cfg.V = ns.V
    if getattr(ns, "policy", None):
        cfg.policy = ns.policy
        if command != "env-patrol":
            try:
                make_policy(ns.policy, cfg.dims, cfg.V)
            except (PolicyConfigError, OSError) as exc:
                raise UsageError(str(exc)) from None
    if getattr(ns, "start", None):
        cfg.start = _parse_point(ns.start)
    if hasattr(ns, "mem"):
        cfg.mem = ns.mem
    if getattr(ns, "budget", None) is not None:
        cfg.budget = ns.budget
    if getattr(ns, "max_steps", None) is not None:
        cfg.max_steps = ns.max_steps
    if hasattr(ns, "stop"):
        cfg.stop = ns.stop
    if getattr(ns, "floor", None):
        cfg.floor = parse_floor(ns.floor, cfg.dims.d)
    if getattr(ns, "cap", None) is not None:
        if command == "search0":
            cfg.search_cap = ns.cap
        else:
            cfg.hamiltonian_cap = ns.cap
    if hasattr(ns, "fmt"):
        cfg.fmt = ns.fmt
    cfg.transient = not getattr(ns, "no_transient", False)
    return cfg


# --------------------------------------------------------------------------
# commands; each returns (exit status, machine output, human summary)


def _cmd_check(cfg):
    verdict = theorem1_check(cfg.dims.dims, cfg.V)
    out = verdict.to_dict()
    ok = verdict.patrollable_0bit
    summary = f"{cfg.dims} V={cfg.V}: {'0-bit patrollable' if ok else 'not 0-bit patrollable'}"
    return (EXIT_OK if ok else EXIT_FAIL), out, summary


def _cmd_simulate(cfg):
    policy = make_policy(cfg.policy, cfg.dims, cfg.V)
    start = cfg.start or (1,) * cfg.dims.d
    trace = run(cfg.dims, policy, start, cfg.mem, cfg.max_steps, stop=cfg.stop)
    out = {"dims": list(cfg.dims.dims), "policy": policy.describe(),
           "cover_time": trace.cover_time, "cycle_start": trace.cycle_start,
           "cycle_len": trace.cycle_len, "steps": trace.steps,
           "trace": trace.to_records(policy.encode_mem)}
    summary = f"{trace.steps} steps, cover_time={trace.cover_time}, cycle_len={trace.cycle_len}"
    return EXIT_OK, out, summary


def _cmd_verify(cfg):
    policy = make_policy(cfg.policy, cfg.dims, cfg.V)
    report = verify_patrols(cfg.dims, policy, target=cfg.floor, budget=cfg.budget,
                            jobs=cfg.jobs)
    out = report.to_dict(policy.encode_mem)
    out["dims"] = list(cfg.dims.dims)
    out["policy"] = policy.describe()
    if cfg.floor is not None:
        out["floor"] = {"k": cfg.floor.k, "fixed": list(cfg.floor.fixed)}
    summary = (f"{report.verdict}: {report.starts} starts, "
               f"worst cover {report.worst_cover_time} / budget {report.budget}")
    return (EXIT_OK if report.passed else EXIT_FAIL), out, summary


def _cmd_search0(cfg):
    stats = {}
    policy = brute_force_0bit_search(cfg.dims.dims, cfg.V, cap=cfg.search_cap,
                                     max_vertices=cfg.max_vertices, jobs=cfg.jobs,
                                     stats=stats)
    if policy is None:
        text = f"# no 0-bit patrolling policy for {cfg.dims} with V={cfg.V}\n"
        return EXIT_FAIL, text, f"none found ({stats.get('nodes', 0)} search nodes)"
    text = f"# 0-bit patrolling policy for {cfg.dims} with V={cfg.V}\n" + policy.to_text()
    return EXIT_OK, text, f"found ({stats.get('nodes', 0)} search nodes)"


def _cmd_regions(cfg):
    graph = sensing_regions(cfg.dims, cfg.V)
    iso = graph.verify_isomorphism()
    if cfg.fmt == "dot":
        return EXIT_OK, graph.to_dot(), f"{len(graph.regions)} regions"
    out = {"dims": list(cfg.dims.dims), "V": cfg.V, "iso_dims": list(graph.iso_dims),
           "isomorphic": iso,
           "regions": [{"key": format_key(r.key), "size": len(r.members),
                        "witness": list(graph.witness[i])}
                       for i, r in enumerate(graph.regions)],
           "edges": [list(e) for e in sorted(graph.adjacency)]}
    return (EXIT_OK if iso else EXIT_FAIL), out, f"{len(graph.regions)} regions, isomorphic={iso}"


def _cmd_hamiltonian(cfg):
    parity = hamiltonicity_parity(cfg.dims.dims)
    cycle = hamiltonian_search(cfg.dims, cfg.hamiltonian_cap)
    out = {"dims": list(cfg.dims.dims), "parity": parity, "found": cycle is not None,
           "cycle": [list(p) for p in cycle] if cycle else None}
    return (EXIT_OK if cycle else EXIT_FAIL), out, f"hamiltonian={cycle is not None}"


def _cmd_viz(cfg):
    policy = make_policy(cfg.policy, cfg.dims, cfg.V)
    diagram = arrow_diagram(cfg.dims, policy)
    text = diagram.to_svg(cfg.transient) if cfg.fmt == "svg" else diagram.to_dot(cfg.transient)
    return EXIT_OK, text, f"{len(diagram.arrows)} arrows, {len(diagram.recurrent)} recurrent"


def _cmd_env_check(cfg):
    env = env_load(cfg.env_file)
    out = {"name": env.name, "d": env.d, "vertices": len(env), "connected": True,
           "diameter": env.diameter}
    return EXIT_OK, out, f"{len(env)} vertices, diameter {env.diameter}"


def _env_policy(cfg, env):
    if cfg.policy == "dirseq":
        return dirseq_patroller(env)
    if cfg.policy.startswith("table:"):
        return make_policy(cfg.policy, None, 1)
    raise UsageError(f"env patrol supports dirseq or table:PATH, got {cfg.policy!r}")


def _cmd_env_patrol(cfg):
    env = env_load(cfg.env_file)
    policy = _env_policy(cfg, env)
    budget = cfg.budget
    if budget is None and cfg.policy == "dirseq":
        budget = policy.step_bound()
    if cfg.start is not None:
        mem = policy.initial_state() if cfg.policy == "dirseq" else cfg.mem
        trace = run(env, policy, cfg.start, mem, budget or cfg.max_steps, stop="covered")
        out = {"policy": policy.describe(), "cover_time": trace.cover_time,
               "steps": trace.steps, "trace": trace.to_records(policy.encode_mem)}
        ok = trace.covered
        return (EXIT_OK if ok else EXIT_FAIL), out, f"cover_time={trace.cover_time}"
    report = verify_patrols(env, policy, budget=budget, jobs=cfg.jobs)
    out = report.to_dict(policy.encode_mem)
    out["policy"] = policy.describe()
    summary = f"{report.verdict}: worst cover {report.worst_cover_time} / budget {report.budget}"
    return (EXIT_OK if report.passed else EXIT_FAIL), out, summary


def _cmd_env_hamiltonian(cfg):
    env = env_load(cfg.env_file)
    cycle = env_hamiltonian_search(env, cfg.hamiltonian_cap)
    policy = full_visibility_hamiltonian(env, cfg.hamiltonian_cap) if cycle else None
    out = {"name": env.name, "vertices": len(env), "found": cycle is not None,
           "cycle": [list(p) for p in cycle] if cycle else None}
    if policy is not None:
        report = verify_patrols(env, policy)
        out["policy"] = {"V": policy.V, "rules": len(policy.table), "verdict": report.verdict}
    return (EXIT_OK if cycle else EXIT_FAIL), out, f"hamiltonian={cycle is not None}"


COMMANDS = {
    "check": _cmd_check, "simulate": _cmd_simulate, "verify": _cmd_verify,
    "search0": _cmd_search0, "regions": _cmd_regions, "hamiltonian": _cmd_hamiltonian,
    "viz": _cmd_viz, "env-check": _cmd_env_check, "env-patrol": _cmd_env_patrol,
    "env-hamiltonian": _cmd_env_hamiltonian,
}


def _emit(cfg, payload):
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _error(code: str, message: str, cfg=None) -> int:
    payload = {"error": code, "message": message}
    if cfg is not None:
        _emit(cfg, payload)
    else:
        sys.stdout.write(json.dumps(payload) + "\n")
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def dispatch(cfg: RunConfig) -> int:
    try:
        status, payload, summary = COMMANDS[cfg.command](cfg)
    except SimulationError as exc:
        return _error(exc.code, str(exc), cfg)
    except SearchCapExceeded as exc:
        return _error("cap-exceeded", str(exc), cfg)
    except (PolicyError, GridError, EnvError, UsageError, ValueError, OSError) as exc:
        return _error("invalid-input", str(exc), cfg)
    _emit(cfg, payload)
    print(summary, file=sys.stderr)
    return status


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage
        return EXIT_ERROR if exc.code else EXIT_OK
    except (UsageError, ValueError) as exc:
        return _error("usage", str(exc))
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
