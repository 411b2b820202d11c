"""Command-line front end: ``analyze``, ``reduce``, ``verify`` and ``export-dot``.

Exit status 0 means the command produced its answer (true or false).
``verify`` exits 1 when the harness finds a disagreement.  Usage, parse
and I/O errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .brm import BrmError, format_brm, parse_brm, sat_to_brm
from .cfg import CfgError, emit_dot, parse_cfg
from .cnf import DimacsError, format_dimacs, parse_dimacs
from .oracles import KINDS, MUTATIONS, crosscheck
from .policies import CacheConfig, Policy, access, render
from .reach import InitialMode, Problem, ProblemKind, decide
from .reductions import (ReductionOutput, brm_to_fifo, brm_to_nmru, brm_to_plru,
                         fifo_to_prr, format_reduction, ham_to_lru_miss,
                         limit_literal_occurrences, lru_fresh_prologue, lru_loader_gadget,
                         occurrence_audit, parse_header, parse_reduction, sat_to_lru_hit)
from .ugraph import GraphFormatError, parse_graph

EXIT_OK, EXIT_DISAGREE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


# ------------------------------------------------------------------ analyze

def _analyze_settings(args, text: str):
    header = parse_header(text)

    def pick(flag, key, convert=str):
        value = getattr(args, flag)
        if value is not None:
            return value
        if key in header:
            return convert(header[key])
        return None

    policy = pick("policy", "policy")
    ways = pick("ways", "ways", int)
    problem = pick("problem", "problem")
    query = pick("query", "query")
    missing = [name for name, v in (("--policy", policy), ("--ways", ways),
                                    ("--problem", problem), ("--query", query)) if v is None]
    if missing:
        raise UsageError(f"missing {', '.join(missing)} (no reduction header supplies them)")
    sets = pick("sets", "sets", int) or 1
    initial = pick("initial", "initial") or "empty"
    config = CacheConfig(Policy(policy), ways, sets)
    return config, Problem(ProblemKind(problem), query, InitialMode(initial))


def cmd_analyze(args) -> int:
    text = _read(args.graph)
    cfg = parse_cfg(text)
    config, problem = _analyze_settings(args, text)
    verdict = decide(cfg, config, problem)
    notes = []
    if config.policy is Policy.NMRU and problem.initial is InitialMode.ARBITRARY:
        notes.append("arbitrary start decided by direct enumeration of initial states; "
                     "no gadget transform to an empty start exists for NMRU")
    steps = []
    if verdict.answer and args.witness:
        state = verdict.initial_state
        for e in verdict.witness:
            if e.label is None:
                outcome = None
            else:
                state, outcome = access(config, state, e.label)
                outcome = outcome.value
            steps.append({"edge": [e.src, e.dst, e.label], "outcome": outcome,
                          "cache": render(state)})
    stats = vars(verdict.stats)
    if args.format == "json":
        out = {"answer": verdict.answer,
               "witness": [[e.src, e.dst, e.label] for e in verdict.witness or ()],
               "stats": stats}
        if verdict.answer and problem.initial is InitialMode.ARBITRARY:
            out["initial_state"] = render(verdict.initial_state)
        if args.witness:
            out["steps"] = steps
        if notes:
            out["notes"] = notes
        print(json.dumps(out, indent=2))
        return EXIT_OK
    print(f"answer: {'true' if verdict.answer else 'false'}")
    print(f"problem: {problem.kind.value} query={problem.query} initial={problem.initial.value} "
          f"policy={config.policy.value} ways={config.ways}"
          + (f" sets={config.sets}" if config.policy is Policy.PRR else ""))
    if verdict.answer:
        if problem.initial is InitialMode.ARBITRARY:
            print(f"initial state: {render(verdict.initial_state)}")
        if args.witness:
            print(f"witness ({len(verdict.witness)} edges):")
            print(f"  start {cfg.start}: {render(verdict.initial_state)}")
            for s in steps:
                src, dst, label = s["edge"]
                shown = "eps" if label is None else label
                tag = "" if s["outcome"] is None else f" {s['outcome']}"
                print(f"  {src} -> {dst} [{shown}]{tag}: {s['cache']}")
    for n in notes:
        print(f"note: {n}")
    print("stats: " + " ".join(f"{k}={v}" for k, v in stats.items()))
    return EXIT_OK


# ------------------------------------------------------------------- reduce

def _need_cache_instance(text: str) -> ReductionOutput:
    try:
        return parse_reduction(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _reduce(kind: str, text: str, args) -> str:
    problem = ProblemKind.MISS if kind.endswith("-miss") else ProblemKind.HIT
    if kind == "sat-lru-hit":
        return format_reduction(sat_to_lru_hit(parse_dimacs(text)))
    if kind == "cnf-limit":
        out = limit_literal_occurrences(parse_dimacs(text))
        audit = occurrence_audit(out)
        return format_dimacs(out, tuple(f"{k}: {v}" for k, v in audit.items()))
    if kind == "ham-lru-miss":
        return format_reduction(ham_to_lru_miss(parse_graph(text)))
    if kind == "sat-brm":
        return format_brm(sat_to_brm(parse_dimacs(text)))
    if kind.startswith("brm-fifo-"):
        return format_reduction(brm_to_fifo(parse_brm(text), problem, args.even_ways))
    if kind.startswith("brm-plru-"):
        return format_reduction(brm_to_plru(parse_brm(text), problem))
    if kind.startswith("brm-nmru-"):
        return format_reduction(brm_to_nmru(parse_brm(text), problem))
    red = _need_cache_instance(text)
    if kind == "fifo-prr":
        if red.policy is not Policy.FIFO:
            raise UsageError("fifo-prr expects a FIFO instance")
        return format_reduction(fifo_to_prr(red, args.sets))
    if red.policy is not Policy.LRU:
        raise UsageError(f"{kind} expects an LRU instance")
    if kind == "lru-fresh-prologue":
        return format_reduction(lru_fresh_prologue(red))
    return format_reduction(lru_loader_gadget(red.with_(initial=InitialMode.ARBITRARY)))


REDUCE_KINDS = ("sat-lru-hit", "cnf-limit", "ham-lru-miss", "sat-brm", "brm-fifo-hit",
                "brm-fifo-miss", "brm-plru-hit", "brm-plru-miss", "brm-nmru-hit",
                "brm-nmru-miss", "fifo-prr", "lru-fresh-prologue", "lru-loader")


def cmd_reduce(args) -> int:
    out = _reduce(args.kind, _read(args.input), args)
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


# ------------------------------------------------------------------- verify

def parse_seed_range(spec: str) -> range:
    """``a..b`` (half-open) or a single count ``n`` meaning ``0..n``."""
    try:
        if ".." in spec:
            lo, hi = spec.split("..", 1)
            return range(int(lo), int(hi))
        return range(int(spec))
    except ValueError as exc:
        raise UsageError(f"bad seed range {spec!r}; expected a..b") from exc


def cmd_verify(args) -> int:
    report = crosscheck(args.kind, parse_seed_range(args.seeds), mutate=args.mutate)
    print(report.dumps())
    print(f"{report.agreements}/{report.instances} agree", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_DISAGREE


def cmd_export_dot(args) -> int:
    sys.stdout.write(emit_dot(parse_cfg(_read(args.input))))
    return EXIT_OK


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cachereach",
                                description="Exact cache analysis and hardness reductions.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="decide exist-hit / exist-miss on a CFG")
    a.add_argument("graph", help="CFG file ('-' for stdin)")
    a.add_argument("--policy", choices=[x.value for x in Policy])
    a.add_argument("--ways", type=int, help="associativity (default: from header)")
    a.add_argument("--sets", type=int, help="cache sets (pseudo-RR only)")
    a.add_argument("--problem", choices=[x.value for x in ProblemKind])
    a.add_argument("--query", help="block whose presence at the final node is asked")
    a.add_argument("--initial", choices=[x.value for x in InitialMode])
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--witness", action="store_true", help="print the witness path step by step")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("reduce", help="build a cache instance from a source instance")
    r.add_argument("kind", choices=REDUCE_KINDS)
    r.add_argument("input", help="DIMACS, graph, BRM or CFG file ('-' for stdin)")
    r.add_argument("--even-ways", action="store_true", help="FIFO: padded even associativity")
    r.add_argument("--sets", type=int, default=1, help="fifo-prr: number of cache sets")
    r.add_argument("-o", "--output", help="write to this file instead of stdout")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="cross-check a reduction against a brute-force oracle")
    v.add_argument("kind", choices=KINDS)
    v.add_argument("--seeds", default="0..100", help="seed range a..b (half-open)")
    v.add_argument("--mutate", choices=sorted(MUTATIONS),
                   help="corrupt each reduction first (the harness should then fail)")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("export-dot", help="print a CFG as GraphViz DOT")
    d.add_argument("input", help="CFG file ('-' for stdin)")
    d.set_defaults(func=cmd_export_dot)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CfgError, DimacsError, BrmError, GraphFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
