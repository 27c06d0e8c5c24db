"""Command-line driver: ``solve``, ``grow``, ``sample`` and ``check``.

Exit status is 0 on success, 2 for invalid input or configuration (and for
a solution that fails ``check``), and 3 when an iterative solve stops at its
iteration limit; its outputs are still written with ``converged`` false.

``--config FILE`` loads a JSON object whose keys are option names with
dashes replaced by underscores (``{"iterations": 500000, "tol": 1e-4}``).
Flags given on the command line override it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import MinmaxAttachError
from .fitness import LognormalSpec, nodes_from_fitness, sample_lognormal
from .growth import MODELS, GrowthConfig, TieredGrowthConfig, degree_distribution, grow_homogeneous, grow_tiered
from .homogeneous import MinmaxSolution, closed_form_solution, msa_a0, verify_kkt
from .tiered import TieredPopulation, TieredSolution, closed_form_tiered, msa_a1, sample_tiered, verify_kkt_tiered

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3


class _Invalid(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minmax-attach", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    parser.commands = {}

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON file of option defaults")
        parser.commands[name] = p
        return p

    p = add("solve", "compute minimax attachment probabilities for a node table")
    p.add_argument("--mode", choices=["homogeneous", "tiered"])
    p.add_argument("--algorithm", choices=["closed-form", "msa"], default="closed-form")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--iterations", type=int, default=1_000_000)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--trace", help="bounds trace CSV (msa only)")
    p.add_argument("--trace-stride", type=int, default=0)

    p = add("grow", "grow a homogeneous or tiered network")
    p.add_argument("--model", choices=MODELS, default="fitness-proportional")
    p.add_argument("--nodes", type=int, help="total nodes, or nodes per tier when --tiers > 1")
    p.add_argument("--links", type=int, default=1)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, action="append", help="repeat once per tier")
    p.add_argument("--tiers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edges")
    p.add_argument("--nodes-out")
    p.add_argument("--degrees")

    p = add("sample", "draw log-normal fitness values into a node table")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, action="append", help="repeat once per tier")
    p.add_argument("--count", type=int, help="nodes, or nodes per tier with several --sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")

    p = add("check", "verify a solution table against the optimality conditions")
    p.add_argument("--input")
    p.add_argument("--solution")
    p.add_argument("--tol", type=float, default=1e-9)
    return parser


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                defaults = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise _Invalid(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(defaults, dict):
            raise _Invalid("config file must hold a JSON object")
        sub = parser.commands[args.command]
        known = set(vars(sub.parse_args([])))
        unknown = set(defaults) - known
        if unknown:
            raise _Invalid(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise _Invalid(f"--{name.replace('_', '-')} is required")


def _summary_path(output) -> Path:
    return Path(output).with_suffix(".json")


def _cmd_solve(args):
    _require(args, "input", "output")
    pop = io.parse_node_table(args.input)
    tiered = isinstance(pop, TieredPopulation)
    mode = args.mode or ("tiered" if tiered else "homogeneous")
    if mode == "tiered" and not tiered:
        raise _Invalid("--mode tiered needs a node table with a tier column")
    if mode == "homogeneous" and tiered:
        raise _Invalid("--mode homogeneous needs a node table with a blank tier column")
    if args.algorithm == "msa" and (args.iterations < 1 or not args.tol > 0):
        raise _Invalid("msa needs --iterations >= 1 and --tol > 0")
    if args.trace and args.algorithm != "msa":
        raise _Invalid("--trace is only produced by --algorithm msa")

    out = io.ensure_parent(args.output)
    summary = {"mode": mode, "algorithm": args.algorithm}
    if not tiered:
        if args.algorithm == "closed-form":
            sol = closed_form_solution(pop)
            summary.update(value=sol.value, iterations=0, converged=True, gap=0.0)
        else:
            sol, trace = msa_a0(pop, args.iterations, args.tol, args.trace_stride)
            summary.update(value=sol.value, iterations=trace.final_iteration,
                           converged=trace.converged, gap=trace.final_gap)
            if args.trace:
                io.write_trace(io.ensure_parent(args.trace), trace)
        summary["lambda"] = sol.lam
        io.write_solution(out, pop, sol)
        line = f"value={sol.value!r}"
    else:
        if args.algorithm == "closed-form":
            sol = closed_form_tiered(pop)
            summary.update(value=list(sol.values), iterations=0, converged=True,
                           gap=[0.0] * len(pop))
        else:
            sol, traces, paths = msa_a1(pop, args.iterations, args.tol, args.trace_stride)
            summary.update(value=list(sol.values), iterations=traces[0].final_iteration,
                           converged=traces[0].converged, gap=[t.final_gap for t in traces],
                           paths=len(paths))
            if args.trace:
                io.write_tiered_trace(io.ensure_parent(args.trace), traces)
            io.write_paths(out.with_suffix(".paths.tsv"), paths)
        summary["lambda"] = list(sol.lambdas)
        io.write_solution(out, pop, sol)
        line = "values=[" + ",".join(repr(v) for v in sol.values) + "]"
    io.write_summary(_summary_path(out), summary)
    gap = summary["gap"]
    gap_txt = repr(gap) if not isinstance(gap, list) else "[" + ",".join(repr(g) for g in gap) + "]"
    print(f"{mode} {args.algorithm}: {line} gap={gap_txt} iterations={summary['iterations']} "
          f"converged={str(summary['converged']).lower()}")
    return EXIT_OK if summary["converged"] else EXIT_NOT_CONVERGED


def _sigmas(args, tiers):
    sig = args.sigma or [1.0]
    if len(sig) == 1:
        sig = sig * tiers
    if len(sig) != tiers:
        raise _Invalid(f"give one --sigma or one per tier ({tiers}), got {len(sig)}")
    return [LognormalSpec(args.mu, s) for s in sig]


def _cmd_grow(args):
    _require(args, "nodes")
    if args.tiers < 1:
        raise _Invalid("--tiers must be at least 1")
    specs = _sigmas(args, args.tiers)
    if args.tiers == 1:
        graph = grow_homogeneous(GrowthConfig(model=args.model, nodes=args.nodes, links=args.links,
                                              fitness=specs[0], seed=args.seed))
    else:
        if args.model not in ("fitness-proportional", "minmax-derived"):
            raise _Invalid("tiered growth attaches by per-tier fitness; use fitness-proportional "
                           "or minmax-derived")
        graph = grow_tiered(TieredGrowthConfig(specs, [args.nodes] * args.tiers, args.seed))
    dist = degree_distribution(graph)
    if args.edges:
        io.write_edges(io.ensure_parent(args.edges), graph)
    if args.nodes_out:
        io.write_graph_nodes(io.ensure_parent(args.nodes_out), graph)
    if args.degrees:
        io.write_degrees(io.ensure_parent(args.degrees), dist)
    print(f"grew {graph.node_count} nodes, {len(graph.edges)} edges, max degree {max(dist.counts)}")
    return EXIT_OK


def _cmd_sample(args):
    _require(args, "count", "output")
    specs = _sigmas(args, len(args.sigma or [1.0]))
    if len(specs) == 1:
        pop = nodes_from_fitness(sample_lognormal(specs[0], args.count, args.seed))
    else:
        pop = sample_tiered(specs, [args.count] * len(specs), args.seed)
    io.write_node_table(io.ensure_parent(args.output), pop)
    n = len(pop) if not isinstance(pop, TieredPopulation) else sum(pop.sizes)
    print(f"sampled {n} fitness values to {args.output}")
    return EXIT_OK


def _candidate(p, q, U):
    V = float(np.max(p * U))
    return MinmaxSolution(p=p, q=q, value=V, lam=V)


def _cmd_check(args):
    _require(args, "input", "solution")
    pop = io.parse_node_table(args.input)
    table = io.read_solution(args.solution)
    if isinstance(pop, TieredPopulation):
        if table["tier"] is None:
            raise _Invalid("tiered node table needs a solution with a tier column")
        cands = []
        for k, tier in enumerate(pop.tiers):
            rows = {int(i): n for n, i in enumerate(table["id"]) if table["tier"][n] == k}
            p, q = _align(tier, rows, table, f"tier {k} ")
            cands.append(_candidate(p, q, pop.unfitness(k)))
        reports = verify_kkt_tiered(pop, TieredSolution.from_tiers(cands), args.tol)
    else:
        if table["tier"] is not None:
            raise _Invalid("homogeneous node table needs a solution without a tier column")
        rows = {int(i): n for n, i in enumerate(table["id"])}
        p, q = _align(pop, rows, table, "")
        U = np.array([r.unfitness for r in pop])
        reports = [verify_kkt([r.fitness for r in pop], _candidate(p, q, U), args.tol)]
    ok = True
    for k, rep in enumerate(reports):
        prefix = f"tier {k}: " if isinstance(pop, TieredPopulation) else ""
        for line in str(rep).splitlines():
            print(prefix + line)
        ok &= rep.passed
    print("KKT check " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_INVALID


def _align(nodes, rows, table, where):
    if len(rows) != len(nodes):
        raise _Invalid(f"{where}solution has {len(rows)} rows for {len(nodes)} nodes")
    try:
        idx = [rows[r.id] for r in nodes]
    except KeyError as exc:
        raise _Invalid(f"{where}solution has no row for node {exc.args[0]}") from None
    return table["p"][idx], table["q"][idx]


_COMMANDS = {"solve": _cmd_solve, "grow": _cmd_grow, "sample": _cmd_sample, "check": _cmd_check}


def run(argv=None) -> int:
    """Run one command and return its exit status."""
    try:
        args = _parse(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    except (_Invalid, MinmaxAttachError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
