"""Readers and writers for node tables, solutions, traces and graphs.

All text files are UTF-8 with LF line endings. Floats are written with
``repr``, the shortest decimal that parses back to the same double.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InvalidFitnessError, InvalidInputError, ParseError
from .fitness import NodeRecord
from .tiered import TieredPopulation

__all__ = [
    "NODE_HEADER",
    "fmt",
    "parse_node_table",
    "write_node_table",
    "write_solution",
    "read_solution",
    "write_trace",
    "write_tiered_trace",
    "write_summary",
    "write_paths",
    "write_edges",
    "write_graph_nodes",
    "write_degrees",
]

NODE_HEADER = ["id", "tier", "fitness"]


def fmt(x) -> str:
    return repr(float(x))


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _open_w(path):
    return open(path, "w", encoding="utf-8", newline="")


def parse_node_table(path):
    """Read an ``id,tier,fitness`` table.

    Returns a list of ``NodeRecord`` when the tier column is blank on every
    row, otherwise a ``TieredPopulation`` (tiers must be 0-based and
    contiguous). Errors name the offending line.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != NODE_HEADER:
        raise ParseError(f"header must be exactly {','.join(NODE_HEADER)}", line=1)
    records, tiers = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
        raw_id, raw_tier, raw_phi = (c.strip() for c in row)
        try:
            node_id = int(raw_id)
        except ValueError:
            raise ParseError(f"node id {raw_id!r} is not an integer", line=lineno) from None
        if raw_tier == "":
            tier = None
        else:
            try:
                tier = int(raw_tier)
            except ValueError:
                raise ParseError(f"tier {raw_tier!r} is not an integer", line=lineno) from None
            if tier < 0:
                raise ParseError(f"tier {tier} is negative", line=lineno)
        try:
            phi = float(raw_phi)
        except ValueError:
            raise ParseError(f"fitness {raw_phi!r} is not a number", line=lineno) from None
        try:
            records.append(NodeRecord(node_id, phi))
        except InvalidFitnessError as exc:
            raise ParseError(f"{exc}; fitness must be positive (positivity of every p_j relies on it)",
                             line=lineno) from None
        except InvalidInputError as exc:
            raise ParseError(str(exc), line=lineno) from None
        tiers.append((tier, lineno))
    if not records:
        raise InvalidInputError(f"{path}: node table holds no nodes")

    blank = [t is None for t, _ in tiers]
    if all(blank):
        seen = {}
        for rec, (_, lineno) in zip(records, tiers):
            if rec.id in seen:
                raise ParseError(f"duplicate node id {rec.id} (first on line {seen[rec.id]})", line=lineno)
            seen[rec.id] = lineno
        return records
    if any(blank):
        lineno = tiers[blank.index(True)][1]
        raise ParseError("tier column is blank on some rows but not others", line=lineno)

    n_tiers = max(t for t, _ in tiers) + 1
    grouped = [[] for _ in range(n_tiers)]
    seen = [{} for _ in range(n_tiers)]
    for rec, (t, lineno) in zip(records, tiers):
        if rec.id in seen[t]:
            raise ParseError(f"duplicate node id {rec.id} in tier {t} (first on line {seen[t][rec.id]})",
                             line=lineno)
        seen[t][rec.id] = lineno
        grouped[t].append(rec)
    missing = [k for k, g in enumerate(grouped) if not g]
    if missing:
        raise ParseError(f"tier indices must be contiguous from 0; tier {missing[0]} has no nodes")
    return TieredPopulation(tuple(tuple(g) for g in grouped))


def write_node_table(path, population) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(NODE_HEADER)
        if isinstance(population, TieredPopulation):
            for k, tier in enumerate(population.tiers):
                for rec in tier:
                    w.writerow([rec.id, k, fmt(rec.fitness)])
        else:
            for rec in population:
                w.writerow([rec.id, "", fmt(rec.fitness)])


def write_solution(path, population, solution) -> None:
    """``id,p,q,pU`` for a homogeneous solution, ``id,tier,p,q,pU`` for a tiered one."""
    with _open_w(path) as fh:
        w = _writer(fh)
        if isinstance(population, TieredPopulation):
            w.writerow(["id", "tier", "p", "q", "pU"])
            for k, tier in enumerate(population.tiers):
                for j, rec in enumerate(tier):
                    p, q = solution.p[k][j], solution.q[k][j]
                    w.writerow([rec.id, k, fmt(p), fmt(q), fmt(p * rec.unfitness)])
        else:
            w.writerow(["id", "p", "q", "pU"])
            for j, rec in enumerate(population):
                p, q = solution.p[j], solution.q[j]
                w.writerow([rec.id, fmt(p), fmt(q), fmt(p * rec.unfitness)])


def read_solution(path):
    """Parse a solution table into ``{"id", "tier", "p", "q"}`` arrays; ``tier`` is None if absent."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("solution file is empty", line=1)
    header = [c.strip() for c in rows[0]]
    if header not in (["id", "p", "q", "pU"], ["id", "tier", "p", "q", "pU"]):
        raise ParseError("header must be id,p,q,pU or id,tier,p,q,pU", line=1)
    tiered = "tier" in header
    ids, tiers, ps, qs = [], [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=lineno)
        rec = dict(zip(header, (c.strip() for c in row)))
        try:
            ids.append(int(rec["id"]))
            if tiered:
                tiers.append(int(rec["tier"]))
            ps.append(float(rec["p"]))
            qs.append(float(rec["q"]))
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    return {
        "id": np.array(ids, dtype=np.int64),
        "tier": np.array(tiers, dtype=np.int64) if tiered else None,
        "p": np.array(ps, dtype=np.float64),
        "q": np.array(qs, dtype=np.float64),
    }


def write_trace(path, trace) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["iteration", "upper", "lower", "gap"])
        for m, up, lo, gap in trace.records():
            w.writerow([m, fmt(up), fmt(lo), fmt(gap)])


def write_tiered_trace(path, traces) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["iteration", "tier", "upper", "lower", "gap"])
        rows = [(m, k, up, lo, gap) for k, tr in enumerate(traces) for m, up, lo, gap in tr.records()]
        for m, k, up, lo, gap in sorted(rows, key=lambda r: (r[0], r[1])):
            w.writerow([m, k, fmt(up), fmt(lo), fmt(gap)])


def write_summary(path, summary: dict) -> None:
    with _open_w(path) as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_paths(path, paths) -> None:
    """One path per line, node ids tab-separated in tier order, sorted."""
    with _open_w(path) as fh:
        for sel in sorted(paths, key=lambda s: s.choice):
            fh.write("\t".join(str(c) for c in sel.choice) + "\n")


def write_edges(path, graph) -> None:
    with _open_w(path) as fh:
        for s, t in graph.edges:
            fh.write(f"{int(s)}\t{int(t)}\n")


def write_graph_nodes(path, graph) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["id", "tier", "fitness", "degree"])
        for i in range(graph.node_count):
            tier = "" if graph.tier[i] < 0 else int(graph.tier[i])
            w.writerow([i, tier, fmt(graph.fitness[i]), int(graph.degree[i])])


def write_degrees(path, dist) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["degree", "count", "ccdf"])
        for d, frac in dist.ccdf:
            w.writerow([d, dist.counts[d], fmt(frac)])


def ensure_parent(path) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path
