"""Command-line front end: polynomials, reductions, minors, structure checks, batch scans."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from . import __version__
from .graphcore import GraphError, LabeledGraph, from_json, parse_dsl
from .minors import (ROOTED_FAMILIES, MinorError, certify_forbidden, forbidden_minor_scan, has_minor,
                     has_rooted_minor)
from .poly import PolyError, Poly, parse, to_str
from .reduce import ReductionError, ReductionTimeout, parse_order, reduce
from .structure import (StructureError, cycle_through_roots, find_obstruction, is_3_constructable_with_last,
                        vertex_width)
from .symanzik import SymanzikError, phi, psi

EXIT_YES, EXIT_NO, EXIT_ERROR, EXIT_TIMEOUT = 0, 1, 2, 3
ALGORITHMS = ("simple", "fubini", "brown", "panzer")
PLAIN_PATTERNS = ("k34", "k33", "k5", "k6", "v8e")
INPUT_ERRORS = (GraphError, PolyError, ReductionError, MinorError, StructureError, SymanzikError, OSError)


class CliError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def read_graph(path: str) -> LabeledGraph:
    with open(path) as fh:
        text = fh.read()
    return from_json(text) if text.lstrip().startswith("{") else parse_dsl(text)


def graph_polys(g: LabeledGraph, which: str) -> List[Poly]:
    if which == "psi":
        return [psi(g)]
    if which == "phi":
        return [phi(g)]
    return [psi(g), phi(g)]


def verdict_name(reducible: Optional[bool]) -> str:
    return "timeout" if reducible is None else ("reducible" if reducible else "not-reducible")


# ---------------------------------------------------------------- commands

def cmd_poly(args) -> int:
    g = read_graph(args.graph)
    names = ["psi", "phi"] if args.which == "both" else [args.which]
    out = {n: to_str(p) for n, p in zip(names, graph_polys(g, args.which))}
    if args.json:
        print(dumps(out))
    else:
        for n in names:
            print(f"{n} = {out[n]}")
    return EXIT_YES


def _reduce_inputs(args) -> List[Poly]:
    if args.poly:
        return [parse(t) for t in args.poly]
    if not args.graph:
        raise CliError("give --graph or at least one --poly")
    return graph_polys(read_graph(args.graph), args.polys)


def cmd_reduce(args) -> int:
    polys = _reduce_inputs(args)
    order = parse_order(args.order) if args.order else None
    start = time.monotonic()
    try:
        v = reduce(polys, args.algo, order, args.timeout)
        reducible: Optional[bool] = v.reducible
    except ReductionTimeout:
        v, reducible = None, None
    wall = time.monotonic() - start
    report = {
        "algorithm": args.algo,
        "verdict": verdict_name(reducible),
        "order": None if v is None or v.order is None else [x.name for x in v.order],
        "trace": None if v is None or v.trace is None else v.trace.as_dict(args.verbose)["steps"],
        "wall_ms": int(wall * 1000),
    }
    if args.json:
        print(dumps(report))
    else:
        print(f"{report['verdict']} ({args.algo})")
        if report["order"]:
            print("order: " + ",".join(report["order"]))
        for st in report["trace"] or []:
            print(f"  {st['variable']}: {st['input_size']} -> {st['output_size']}"
                  f" (s1={st['s1']} s2={st['s2']} s3={st['s3']})")
            if args.verbose and st.get("output"):
                for p in st["output"]:
                    print(f"    {p}")
    return {True: EXIT_YES, False: EXIT_NO, None: EXIT_TIMEOUT}[reducible]


def cmd_minor(args) -> int:
    g = read_graph(args.graph)
    if args.pattern in ROOTED_FAMILIES:
        model = has_rooted_minor(g, ROOTED_FAMILIES[args.pattern]())
    else:
        model = has_minor(g, args.pattern)
    if args.json:
        print(dumps({"pattern": args.pattern, "found": model is not None,
                     "model": None if model is None else model.as_dict()}))
    elif model is None:
        print(f"no {args.pattern} minor")
    else:
        print(f"{args.pattern} minor found")
        for label, vs in sorted(model.as_dict()["branch"].items()):
            print(f"  {label}: {{{', '.join(vs)}}}")
    return EXIT_YES if model is not None else EXIT_NO


def _vertex_list(g: LabeledGraph, text: str, n: int, what: str) -> List:
    by_name = {str(v): v for v in g.vertices}
    items = [t.strip() for t in text.split(",") if t.strip()]
    if len(items) != n:
        raise CliError(f"{what}: expected {n} vertices")
    missing = [t for t in items if t not in by_name]
    if missing:
        raise CliError(f"{what}: unknown vertices {', '.join(missing)}")
    return [by_name[t] for t in items]


def cmd_structure(args) -> int:
    g = read_graph(args.graph)
    roots = dict(zip("abcd", _vertex_list(g, args.roots, 4, "--roots"))) if args.roots else None
    if args.check == "width":
        w = vertex_width(g, args.cap)
        print(dumps({"vertex_width": w}) if args.json else f"vertex width {w}")
        return EXIT_YES
    if args.check == "constructable":
        if not args.last:
            raise CliError("--check constructable needs --last v1,v2,v3")
        ok = is_3_constructable_with_last(g, _vertex_list(g, args.last, 3, "--last"), args.cap)
        print(dumps({"constructable": ok}) if args.json else ("3-constructable" if ok else "not 3-constructable"))
        return EXIT_YES if ok else EXIT_NO
    cyc = cycle_through_roots(g, roots)
    obs = None if cyc is None else find_obstruction(g, cyc, roots)
    if args.json:
        print(dumps({"cycle": None if cyc is None else [str(v) for v in cyc],
                     "obstruction": None if obs is None else obs.as_dict()}))
    elif cyc is None:
        print("no cycle through the roots")
    elif obs is None:
        print("no obstruction on cycle " + " ".join(map(str, cyc)))
    else:
        print(f"{obs.kind} obstruction on cycle " + " ".join(map(str, cyc)))
        for s in obs.as_dict()["separations"]:
            print(f"  boundary {{{', '.join(s['boundary'])}}}")
    return EXIT_YES if obs is not None else EXIT_NO


def _reducer(algo: str, timeout: Optional[float]):
    def run(polys: List[Poly]) -> Optional[bool]:
        try:
            return reduce(polys, algo, None, timeout).reducible
        except ReductionTimeout:
            return None
    return run


def cmd_certify(args) -> int:
    g = read_graph(args.graph)
    report = certify_forbidden(g, _reducer(args.algo, args.timeout), args.polys)
    if args.json:
        print(dumps(report.as_dict()))
    else:
        print(f"itself: {report.itself}")
        for e in report.entries:
            print(f"  {e.operation} {e.edge}: {e.verdict}")
        print("forbidden: " + {True: "yes", False: "no", None: "undecided (timeout)"}[report.forbidden])
    return {True: EXIT_YES, False: EXIT_NO, None: EXIT_TIMEOUT}[report.forbidden]


# -------------------------------------------------------------------- scan

@dataclass
class FileResult:
    name: str
    digest: str
    verdict: str
    witness: Optional[dict] = None
    error: Optional[str] = None
    wall_ms: int = 0

    def as_dict(self) -> dict:
        return {"file": self.name, "digest": self.digest, "verdict": self.verdict,
                "witness": self.witness, "error": self.error}


@dataclass
class RunManifest:
    command: List[str]
    results: List[FileResult] = field(default_factory=list)
    version: str = __version__

    def as_dict(self) -> dict:
        return {"tool": "symred", "version": self.version, "command": self.command,
                "results": [r.as_dict() for r in self.results]}

    def timings(self) -> dict:
        return {r.name: r.wall_ms for r in self.results}


def scan_file(path: str, mode: str, algo: str, timeout: Optional[float], prescreen: bool = True) -> FileResult:
    name = os.path.basename(path)
    start = time.monotonic()
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        return FileResult(name, "", "error", error=str(exc))
    res = FileResult(name, hashlib.sha256(raw).hexdigest(), "error")
    try:
        g = read_graph(path)
        if mode == "psi":
            g = g.without_terminals()
        elif sorted(g.terminal_map()) != list("abcd"):
            raise CliError("psiphi mode needs the four terminals a, b, c, d")
        if prescreen and not g.massive:
            hits = forbidden_minor_scan(g).hits
            if hits:
                res.verdict = "not-reducible"
                res.witness = {"forbidden_minor": hits[0].as_dict()}
                return res
        polys = graph_polys(g, "psi" if mode == "psi" else "both")
        try:
            v = reduce(polys, algo, None, timeout)
        except ReductionTimeout:
            res.verdict = "timeout"
            return res
        res.verdict = verdict_name(v.reducible)
        if v.reducible:
            res.witness = {"order": [x.name for x in v.order]}
    except (CliError, *INPUT_ERRORS) as exc:
        res.error = str(exc)
    finally:
        res.wall_ms = int((time.monotonic() - start) * 1000)
    return res


def run_scan(directory: str, mode: str, algo: str, timeout: Optional[float], threads: int = 1,
             prescreen: bool = True, command: Optional[Sequence[str]] = None) -> RunManifest:
    files = sorted(f for f in os.listdir(directory) if f.endswith((".json", ".txt")))
    paths = [os.path.join(directory, f) for f in files]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(lambda p: scan_file(p, mode, algo, timeout, prescreen), paths))
    return RunManifest(list(command or []), results)


def cmd_scan(args) -> int:
    if not os.path.isdir(args.directory):
        raise CliError(f"{args.directory} is not a directory")
    command = ["scan", "--mode", args.mode, "--algo", args.algo]
    if args.timeout is not None:
        command += ["--timeout", str(args.timeout)]
    if args.no_prescreen:
        command.append("--no-prescreen")
    manifest = run_scan(args.directory, args.mode, args.algo, args.timeout, args.threads,
                        not args.no_prescreen, command)
    text = dumps(manifest.as_dict()) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        with open(args.out + ".times", "w") as fh:
            fh.write(dumps(manifest.timings()) + "\n")
    if args.json or not args.out:
        sys.stdout.write(text)
    else:
        for r in manifest.results:
            print(f"{r.name}: {r.verdict}" + (f" ({r.error})" if r.error else ""))
    return EXIT_ERROR if any(r.verdict == "error" for r in manifest.results) else EXIT_YES


# ------------------------------------------------------------------ parser

def _global_flags(parser: argparse.ArgumentParser, top: bool) -> None:
    # subcommands repeat the flags without defaults so they do not mask the top-level values
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    parser.add_argument("--timeout", type=float, default=d(None), help="seconds per reduction")
    parser.add_argument("--threads", type=int, default=d(1))
    parser.add_argument("--seed", type=int, default=d(None))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, top=False)

    p = argparse.ArgumentParser(prog="symred", description=__doc__)
    _global_flags(p, top=True)
    p.add_argument("--version", action="version", version=f"symred {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("poly", parents=[common], help="print Symanzik polynomials")
    s.add_argument("graph")
    s.add_argument("--which", choices=("psi", "phi", "both"), default="both")
    s.set_defaults(func=cmd_poly)

    s = sub.add_parser("reduce", parents=[common], help="run a reduction algorithm")
    s.add_argument("--graph")
    s.add_argument("--poly", action="append", help="polynomial text, repeatable")
    s.add_argument("--algo", choices=ALGORITHMS, default="brown")
    s.add_argument("--order", help="variable order such as x1,x2,x3")
    s.add_argument("--polys", choices=("psi", "phi", "both"), default="both")
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("minor", parents=[common], help="search for a (rooted) minor")
    s.add_argument("--pattern", required=True, choices=sorted(ROOTED_FAMILIES) + list(PLAIN_PATTERNS))
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_minor)

    s = sub.add_parser("structure", parents=[common], help="obstructions, vertex width, constructability")
    s.add_argument("--graph", required=True)
    s.add_argument("--check", choices=("obstructions", "width", "constructable"), required=True)
    s.add_argument("--roots", help="vertices for a,b,c,d")
    s.add_argument("--last", help="three vertices added last")
    s.add_argument("--cap", type=int, default=20, help="largest edge count for width searches")
    s.set_defaults(func=cmd_structure)

    s = sub.add_parser("scan", parents=[common], help="batch reducibility scan writing a manifest")
    s.add_argument("directory")
    s.add_argument("--mode", choices=("psi", "psiphi"), default="psi")
    s.add_argument("--algo", choices=ALGORITHMS, default="brown")
    s.add_argument("--out", help="manifest path")
    s.add_argument("--no-prescreen", action="store_true", help="skip the forbidden-minor pre-screen")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("certify", parents=[common], help="check minor-minimal non-reducibility")
    s.add_argument("--graph", required=True)
    s.add_argument("--algo", choices=ALGORITHMS, default="brown")
    s.add_argument("--polys", choices=("psi", "phi", "both"), default="both")
    s.set_defaults(func=cmd_certify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None:
        random.seed(args.seed)
    try:
        return args.func(args)
    except (CliError, *INPUT_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
