"""Command-line interface.

Exit codes: 0 satisfiable, 1 unsatisfiable, 2 undecided, 64 usage or
input error.  Machine-readable reports are ``key=value`` lines under a
versioned ``# trichrome-report v1`` header.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from typing import Mapping, Sequence

import numpy as np

from . import cspsolver, generators, randsolver
from .cspcore import (ContractViolation, CspFormatError, CspInstance, brute_force_solve,
                      format_csp, from_graph_coloring, parse_csp)
from .edgecolor import EdgeProblem, EdgeStats, brute_force_edge_coloring, solve_3edge
from .graphkit import Graph, GraphFormatError, format_dimacs_graph, parse_dimacs_graph
from .satfront import (CnfFormatError, CnfFormula, brute_force_sat, format_dimacs_cnf,
                       format_model, parse_dimacs_cnf, solve_3sat, translate_3sat)
from .vertexcolor import brute_force_coloring, solve_3coloring, solve_list_coloring
from .workfactor import EPSILON, LAMBDA, InvalidQuery, optimize_epsilon, paper_constants, work_factor

EXIT_SAT, EXIT_UNSAT, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64
REPORT_HEADER = "# trichrome-report v1"
KINDS = ("csp", "color", "listcolor", "edgecolor", "sat")


class UsageError(Exception):
    pass


# -- reports ------------------------------------------------------------------------

def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if "\n" in text:
        raise ValueError("report values must fit on one line")
    return text


def format_report(fields: Mapping[str, object]) -> str:
    lines = [REPORT_HEADER]
    for key, value in fields.items():
        if not key or "=" in key or any(ch.isspace() for ch in key):
            raise ValueError(f"bad report key {key!r}")
        lines.append(f"{key}={_format_value(value)}")
    return "\n".join(lines) + "\n"


def _parse_value(text: str):
    if text in ("true", "false"):
        return text == "true"
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def parse_report(text: str) -> dict:
    lines = text.splitlines()
    if not lines or lines[0].strip() != REPORT_HEADER:
        raise ValueError(f"line 1: expected {REPORT_HEADER!r}")
    out: dict = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep or not key:
            raise ValueError(f"line {lineno}: expected key=value")
        if key in out:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        out[key] = _parse_value(value)
    return out


# -- input formats -------------------------------------------------------------------

def parse_list_coloring(text: str) -> tuple[Graph, dict[int, set[int]]]:
    """DIMACS graph plus ``l <vertex> <c1> ... <ck>`` lines (missing lines mean {1,2,3})."""
    raw: list[tuple[list[str], int]] = []
    graph = parse_dimacs_graph(text, {"l": lambda toks, ln: raw.append((toks, ln))})
    lists = {v: {1, 2, 3} for v in graph.vertices}
    seen = set()
    for toks, ln in raw:
        try:
            nums = [int(t) for t in toks[1:]]
        except ValueError:
            raise GraphFormatError("expected integers on list line", ln) from None
        if len(nums) < 1 or not 1 <= nums[0] <= len(graph):
            raise GraphFormatError("expected 'l <vertex> <colors...>'", ln)
        v = nums[0] - 1
        if v in seen:
            raise GraphFormatError(f"vertex {nums[0]} has two list lines", ln)
        if any(not 1 <= c <= 3 for c in nums[1:]) or len(set(nums[1:])) != len(nums) - 1:
            raise GraphFormatError("list colors must be distinct values in 1..3", ln)
        seen.add(v)
        lists[v] = set(nums[1:])
    return graph, lists


def format_list_coloring(graph: Graph, lists: Mapping[int, set[int]]) -> str:
    lines = [format_dimacs_graph(graph).rstrip("\n")]
    for v in graph.vertices:
        if set(lists[v]) != {1, 2, 3}:
            lines.append(" ".join(["l", str(v + 1)] + [str(c) for c in sorted(lists[v])]))
    return "\n".join(lines) + "\n"


def parse_edge_problem(text: str) -> tuple[Graph, list[tuple[int, int]], list[tuple[int, int]]]:
    """DIMACS graph plus ``d <e1u> <e1v> <e2u> <e2v>`` difference lines.

    Returns the graph, its edge list (index = edge id) and constraints on edge ids.
    """
    raw: list[tuple[list[str], int]] = []
    graph = parse_dimacs_graph(text, {"d": lambda toks, ln: raw.append((toks, ln))})
    edges = graph.edges()
    index = {e: i for i, e in enumerate(edges)}
    cons = []
    for toks, ln in raw:
        try:
            nums = [int(t) - 1 for t in toks[1:]]
        except ValueError:
            raise GraphFormatError("expected integers on difference line", ln) from None
        if len(nums) != 4:
            raise GraphFormatError("expected 'd <e1u> <e1v> <e2u> <e2v>'", ln)
        pair = []
        for u, v in (nums[:2], nums[2:]):
            key = (min(u, v), max(u, v))
            if key not in index:
                raise GraphFormatError(f"no edge {u + 1} {v + 1}", ln)
            pair.append(index[key])
        if pair[0] == pair[1]:
            raise GraphFormatError("an edge cannot differ from itself", ln)
        cons.append(tuple(pair))
    return graph, edges, cons


def format_edge_problem(graph: Graph, edges: Sequence[tuple[int, int]],
                        cons: Sequence[tuple[int, int]]) -> str:
    lines = [format_dimacs_graph(graph).rstrip("\n")]
    for e, f in cons:
        (a, b), (c, d) = edges[e], edges[f]
        lines.append(f"d {a + 1} {b + 1} {c + 1} {d + 1}")
    return "\n".join(lines) + "\n"


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load(kind: str, text: str):
    if kind == "csp":
        return parse_csp(text)
    if kind == "color":
        return parse_dimacs_graph(text)
    if kind == "listcolor":
        return parse_list_coloring(text)
    if kind == "edgecolor":
        return parse_edge_problem(text)
    if kind == "sat":
        return parse_dimacs_cnf(text)
    raise UsageError(f"unknown problem kind {kind!r}")


# -- solving ----------------------------------------------------------------------

def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TRICHROME_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"TRICHROME_SEED must be an integer, got {env!r}") from None


def _effective(calls: int, size: float) -> float:
    return calls ** (1 / size) if size > 0 and calls > 0 else 1.0


def solve_problem(kind: str, problem, args) -> tuple[str, list[str], dict]:
    """Returns ``(verdict, output lines, report fields)``."""
    fields: dict = {"kind": kind}
    if kind == "csp":
        inst: CspInstance = problem
        fields.update(variables=len(inst), constraints=inst.num_constraints())
        if args.randomized:
            policy = randsolver.TrialPolicy(args.max_trials, _seed(args))
            fn = (randsolver.solve_random_restrict4 if args.randomized == "restrict4"
                  else randsolver.solve_random_pairs)
            res = fn(inst, policy, parallel=args.parallel)
            fields.update(randomized=args.randomized, seed=policy.seed, trials=res.trials,
                          success_probability=res.success_probability, residual=res.residual)
            verdict = {"SAT": "SAT", "UNSAT": "UNSAT"}.get(res.status, "UNKNOWN")
            fields["status"] = res.status
            lines = [f"{v} {c}" for v, c in sorted((res.assignment or {}).items())]
            return verdict, lines, fields
        sol, stats = cspsolver.solve(inst, parallel=args.parallel)
        fields.update(stats.as_dict())
        fields.update(predicted_work_factor=LAMBDA)
        if sol is None:
            return "UNSAT", [], fields
        return "SAT", [f"{v} {c}" for v, c in sorted(sol.items())], fields
    if kind == "color":
        res = solve_3coloring(problem)
        fields.update(vertices=len(problem), edges=problem.num_edges(), **res.stats.as_dict())
        fields.update(predicted_work_factor=paper_constants()["vertex_coloring_base"])
        if res.coloring is None:
            return "UNSAT", [], fields
        return "SAT", [f"{v + 1} {c}" for v, c in sorted(res.coloring.items())], fields
    if kind == "listcolor":
        graph, lists = problem
        sol = solve_list_coloring(graph, lists)
        fields.update(vertices=len(graph), edges=graph.num_edges())
        if sol is None:
            return "UNSAT", [], fields
        return "SAT", [f"{v + 1} {c}" for v, c in sorted(sol.items())], fields
    if kind == "edgecolor":
        graph, edges, cons = problem
        st = EdgeStats()
        sol = solve_3edge(edges, cons, st)
        fields.update(vertices=len(graph), edges=len(edges), constraints=len(cons), **st.as_dict())
        fields.update(predicted_work_factor=math.sqrt(2))
        if sol is None:
            return "UNSAT", [], fields
        return "SAT", [f"{edges[e][0] + 1} {edges[e][1] + 1} {c}" for e, c in sorted(sol.items())], fields
    if kind == "sat":
        formula: CnfFormula = problem
        res = solve_3sat(formula)
        fields.update(variables=formula.num_vars, clauses=len(formula.clauses), t=res.t)
        if res.stats is not None:
            fields.update(res.stats.as_dict())
        fields.update(predicted_work_factor=LAMBDA)
        if res.model is None:
            return "UNSAT", [], fields
        return "SAT", [format_model(res.model)], fields
    raise UsageError(f"unknown problem kind {kind!r}")


def oracle_problem(kind: str, problem) -> tuple[str, list[str]]:
    if kind == "csp":
        sol = brute_force_solve(problem)
        lines = [f"{v} {c}" for v, c in sorted((sol or {}).items())]
    elif kind == "color":
        sol = brute_force_coloring(problem)
        lines = [f"{v + 1} {c}" for v, c in sorted((sol or {}).items())]
    elif kind == "listcolor":
        sol = brute_force_coloring(*problem)
        lines = [f"{v + 1} {c}" for v, c in sorted((sol or {}).items())]
    elif kind == "edgecolor":
        _, edges, cons = problem
        sol = brute_force_edge_coloring(edges, cons)
        lines = [f"{edges[e][0] + 1} {edges[e][1] + 1} {c}" for e, c in sorted((sol or {}).items())]
    elif kind == "sat":
        sol = brute_force_sat(problem)
        lines = [format_model(sol)] if sol is not None else []
    else:
        raise UsageError(f"unknown problem kind {kind!r}")
    return ("SAT" if sol is not None else "UNSAT"), lines


def translate_problem(kind: str, problem) -> CspInstance:
    if kind == "csp":
        return problem
    if kind == "color":
        return from_graph_coloring(problem)
    if kind == "listcolor":
        return from_graph_coloring(*problem)
    if kind == "edgecolor":
        _, edges, cons = problem
        g, _ = EdgeProblem.build(edges, cons).conflict_graph()
        return from_graph_coloring(g)
    if kind == "sat":
        return translate_3sat(problem)
    raise UsageError(f"unknown problem kind {kind!r}")


# -- generate and bench ------------------------------------------------------------------

def generate_instance(kind: str, args) -> str:
    seed = _seed(args)
    try:
        if kind == "csp":
            inst = generators.random_csp(args.n, args.density, seed, args.four_fraction, args.colors)
            return format_csp(inst)
        if kind == "graph":
            return format_dimacs_graph(generators.random_graph(args.n, args.p, seed))
        if kind == "regular":
            return format_dimacs_graph(generators.random_regular_graph(args.n, args.k, seed))
        if kind == "subcubic":
            return format_dimacs_graph(generators.random_subcubic_graph(args.n, args.p, seed))
        if kind == "cnf":
            return format_dimacs_cnf(generators.random_3cnf(args.n, args.t, seed, args.two, args.units))
    except (ValueError, RuntimeError) as exc:
        raise UsageError(str(exc)) from None
    raise UsageError(f"unknown generator {kind!r}")


def _median(values: list[float]) -> float:
    return float(np.median(values)) if values else float("nan")


def bench(kind: str, n: int, count: int, seed: int, density: float = 2.0, p: float = 0.3,
          t: int | None = None, four_fraction: float = 0.0, oracle_limit: int = 12) -> dict:
    """Solve a generated corpus; compare with the oracle when n <= oracle_limit."""
    fields: dict = {"kind": kind, "n": n, "count": count, "seed": seed}
    agree = checked = sat = 0
    factors: list[float] = []
    rule_totals: dict[str, int] = {}
    start = time.perf_counter()
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        if kind == "csp":
            inst = generators.random_csp(n, density, rng, four_fraction)
            sol, stats = cspsolver.solve(inst)
            verdict = sol is not None
            factors.append(stats.effective_work_factor())
            for r, c in stats.rule_counts.items():
                rule_totals[r] = rule_totals.get(r, 0) + c
            oracle = (lambda: brute_force_solve(inst) is not None)
        elif kind == "color":
            g = generators.random_graph(n, p, rng)
            res = solve_3coloring(g)
            verdict = res.coloring is not None
            work = res.stats.enumerations + res.stats.csp_calls
            factors.append(_effective(work, n))
            oracle = (lambda: brute_force_coloring(g) is not None)
        elif kind == "edgecolor":
            g = generators.random_subcubic_graph(n, max(p, 0.5), rng)
            st = EdgeStats()
            verdict = solve_3edge(g.edges(), (), st) is not None
            factors.append(_effective(st.children + st.vertex.csp_calls, n))
            oracle = (lambda: brute_force_edge_coloring(g.edges()) is not None)
        elif kind == "sat":
            formula = generators.random_3cnf(n, t if t is not None else 4 * n, rng)
            res = solve_3sat(formula)
            verdict = res.model is not None
            calls = res.stats.calls if res.stats is not None else 1
            factors.append(_effective(calls, res.t))
            oracle = (lambda: brute_force_sat(formula) is not None)
        else:
            raise UsageError(f"unknown bench kind {kind!r}")
        sat += verdict
        if n <= oracle_limit:
            checked += 1
            agree += oracle() == verdict
    fields.update(sat=sat, oracle_checked=checked, oracle_agree=agree,
                  agreement=(agree / checked if checked else 1.0),
                  effective_work_factor_median=_median(factors),
                  effective_work_factor_max=max(factors, default=float("nan")),
                  elapsed_s=round(time.perf_counter() - start, 6))
    target = {"csp": LAMBDA, "sat": LAMBDA, "color": paper_constants()["vertex_coloring_base"],
              "edgecolor": math.sqrt(2)}[kind]
    fields["target_work_factor"] = target
    for r in sorted(rule_totals):
        fields[f"rule.{r}.triggers"] = rule_totals[r]
    return fields


# -- argument parsing --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (default: $TRICHROME_SEED, else 0)")

    parser = _Parser(prog="trichrome", description="Exact solvers for 3-coloring, 3-SAT and (3,2)-CSP.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", parents=[common], help="solve a problem file")
    sp.add_argument("kind", choices=KINDS)
    sp.add_argument("file")
    sp.add_argument("--stats", metavar="FILE", help="write a run report to FILE")
    sp.add_argument("--parallel", action="store_true")
    sp.add_argument("--max-trials", type=int, default=1000)
    sp.add_argument("--randomized", choices=("restrict4", "pairs"))

    op = sub.add_parser("oracle", help="brute-force solve a problem file")
    op.add_argument("kind", choices=KINDS)
    op.add_argument("file")

    tp = sub.add_parser("translate", help="print the CSP form of a problem file")
    tp.add_argument("kind", choices=KINDS)
    tp.add_argument("file")

    wp = sub.add_parser("workfactor", help="largest root of 1 - sum x^-r")
    wp.add_argument("reductions", nargs="+", type=float)

    sub.add_parser("epsilon", help="the balancing epsilon and the resulting constants")

    bp = sub.add_parser("bench", parents=[common], help="solve a generated corpus")
    bp.add_argument("kind", choices=("csp", "color", "edgecolor", "sat"))
    bp.add_argument("--n", type=int, default=8)
    bp.add_argument("--count", type=int, default=20)
    bp.add_argument("--density", type=float, default=2.0)
    bp.add_argument("--p", type=float, default=0.3)
    bp.add_argument("--t", type=int, default=None)
    bp.add_argument("--four-fraction", type=float, default=0.0)
    bp.add_argument("--oracle-limit", type=int, default=12)
    bp.add_argument("--out", metavar="FILE")

    gp = sub.add_parser("generate", parents=[common], help="write a random instance")
    gp.add_argument("kind", choices=("csp", "graph", "regular", "subcubic", "cnf"))
    gp.add_argument("--n", type=int, default=10)
    gp.add_argument("--density", type=float, default=2.0)
    gp.add_argument("--four-fraction", type=float, default=0.0)
    gp.add_argument("--colors", type=int, default=3)
    gp.add_argument("--p", type=float, default=0.3)
    gp.add_argument("--k", type=int, default=3)
    gp.add_argument("--t", type=int, default=10)
    gp.add_argument("--two", type=int, default=0)
    gp.add_argument("--units", type=int, default=0)
    gp.add_argument("--out", metavar="FILE")
    return parser


def _write(path: str | None, text: str, out) -> None:
    if path is None:
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args, out)
    except UsageError as exc:
        err.write(f"trichrome: {exc}\n")
    except (CspFormatError, GraphFormatError, CnfFormatError) as exc:
        err.write(f"trichrome: parse error: {exc}\n")
    except (ContractViolation, InvalidQuery, ValueError) as exc:
        err.write(f"trichrome: {exc}\n")
    return EXIT_USAGE


def _dispatch(args, out) -> int:
    cmd = args.command
    if cmd == "workfactor":
        out.write(f"{work_factor(args.reductions):.10f}\n")
        return 0
    if cmd == "epsilon":
        eps, lam = optimize_epsilon()
        out.write(format_report({"epsilon": eps, "lambda": lam, "Lambda": LAMBDA,
                                 "Lambda^(2-epsilon)": LAMBDA ** (2 - EPSILON)}))
        return 0
    if cmd == "generate":
        _write(args.out, generate_instance(args.kind, args), out)
        return 0
    if cmd == "bench":
        fields = bench(args.kind, args.n, args.count, _seed(args), args.density, args.p,
                       args.t, args.four_fraction, args.oracle_limit)
        _write(args.out, format_report(fields), out)
        return 0
    problem = load(args.kind, _read(args.file))
    if cmd == "translate":
        out.write(format_csp(translate_problem(args.kind, problem)))
        return 0
    if cmd == "oracle":
        verdict, lines = oracle_problem(args.kind, problem)
        out.write(f"s {verdict}\n" + "".join(l + "\n" for l in lines))
        return EXIT_SAT if verdict == "SAT" else EXIT_UNSAT
    if args.randomized and args.kind != "csp":
        raise UsageError("--randomized applies to csp files only")
    if args.max_trials < 1:
        raise UsageError("--max-trials must be at least 1")
    start = time.perf_counter()
    verdict, lines, fields = solve_problem(args.kind, problem, args)
    fields = {"file": args.file, "verdict": verdict, **fields,
              "wall_s": round(time.perf_counter() - start, 6)}
    out.write(f"s {verdict}\n" + "".join(l + "\n" for l in lines))
    if args.stats:
        _write(args.stats, format_report(fields), out)
    return {"SAT": EXIT_SAT, "UNSAT": EXIT_UNSAT}.get(verdict, EXIT_UNKNOWN)


def main() -> None:
    sys.exit(run())
