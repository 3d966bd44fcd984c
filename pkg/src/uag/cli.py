"""Command-line front end.

Exit codes: 0 success, 1 negative verdict, 2 usage or validation error,
3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Sequence

from . import gn
from .algebra import FiniteAlgebra
from .dsl import Problem, parse_equation, parse_problem
from .errors import ConsistencyError, UagError
from .geometry import (AlgebraicSet, closure_of, coordinate_algebra, decompose, in_radical,
                       is_algebraic, is_irreducible, point_set, radical_up_to_depth, solve,
                       subdirect_check, zariski_closure)
from .homs import find_embedding, is_discriminated_finite, is_separated
from .lab import DisequationTask, check_qS_compact_instance, check_uS_compact_instance
from .report import RunReport, digest, points_json
from .terms import EquationSystem

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_CONSISTENCY = 0, 1, 2, 3

DEFAULT_DEPTH = 2
DEFAULT_BUDGET = 20


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _plural(n: int, word: str) -> str:
    return f"{n} {word}" + ("" if n == 1 else "s")


def _common(depth: int) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--timing", action="store_true", help="record wall time in the report")
    common.add_argument("--max-states", type=int, default=None,
                        help="bound on assignments and search states (default: per-operation)")
    common.add_argument("--depth", type=int, default=depth,
                        help="term depth for radical windows (default %(default)s)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="finite-subset budget for compactness checks (default %(default)s)")
    return common


def build_parser() -> argparse.ArgumentParser:

    p = _Parser(prog="uag", description="Algebraic sets over finite algebras and the (N, g_n) example.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def problem_cmd(name: str, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[_common(DEFAULT_DEPTH)], help=help)
        sp.add_argument("problem", help="problem file (.prob)")
        return sp

    problem_cmd("solve", "solution set of the system")
    r = problem_cmd("radical", "radical membership or the radical up to a depth")
    r.add_argument("--query", action="append", default=[], help="equation 'l = r' (repeatable)")
    problem_cmd("closure", "Zariski closure of the points block (or of V(S))")
    problem_cmd("coordalg", "coordinate algebra of the solution set")
    i = problem_cmd("irreducible", "irreducibility verdict")
    i.add_argument("--method", choices=("point-closure", "embedding", "both"), default="both")
    problem_cmd("decompose", "irreducible components and the subdirect check")
    c = problem_cmd("classify", "membership of the coordinate algebra in Ucl, Qvar and Dis of a target")
    c.add_argument("--target", help="problem file whose algebra is the target (default: the same algebra)")
    problem_cmd("lab", "compactness verdict for the disequation task")
    cs = sub.add_parser("casestudy", parents=[_common(3)], help="built-in case study")
    cs.add_argument("name", choices=("example5",))
    return p


# -- helpers --------------------------------------------------------------------------

def _finite(problem: Problem) -> FiniteAlgebra:
    if isinstance(problem.algebra, FiniteAlgebra):
        return problem.algebra
    raise UagError("this command needs a finite algebra block")


def _ms(args) -> dict:
    return {} if args.max_states is None else {"max_states": args.max_states}


def _target_set(problem: Problem, args) -> AlgebraicSet:
    """The points block if present (must be algebraic), else V(S)."""
    B = _finite(problem)
    if problem.points:
        Y = point_set(B, problem.variables, problem.points)
        if not is_algebraic(Y):
            raise UagError("the points block is not an algebraic set; use 'closure'")
        return Y
    return solve(problem.system, B, problem.variables, **_ms(args))


def _set_json(Y: AlgebraicSet) -> dict:
    return {"variables": list(Y.variables.names), "points": points_json(Y.points), "size": len(Y)}


# -- commands ------------------------------------------------------------------------

def cmd_solve(problem: Problem, args) -> tuple[dict, str, int]:
    if isinstance(problem.algebra, gn.GnAlgebra):
        s = gn.solve_symbolic(problem.system, problem.variables.names)
        return ({"variables": list(problem.variables.names), "symbolic": s.describe(), "exact": True},
                "symbolic solution set", EXIT_OK)
    Y = solve(problem.system, _finite(problem), problem.variables, **_ms(args))
    return _set_json(Y), _plural(len(Y), "point"), EXIT_OK


def cmd_radical(problem: Problem, args) -> tuple[dict, str, int]:
    queries = list(problem.query) + [parse_equation(q, problem.signature, problem.variables)
                                     for q in args.query]
    if isinstance(problem.algebra, gn.GnAlgebra):
        s = gn.solve_symbolic(problem.system, problem.variables.names)
        if not s.finite:
            raise UagError("radical membership over A needs a finite solution set")
        pts = list(s.points) if isinstance(s, gn.Graph2) else [(a,) for a in s.members]
        if not queries:
            return {"symbolic": s.describe()}, "no queries given", EXIT_OK
        rows = []
        for q in queries:
            ok = all(gn.contains(gn.solve_symbolic(EquationSystem.of(q), problem.variables.names), p)
                     for p in pts)
            rows.append({"equation": str(q), "member": ok})
        negative = any(not r["member"] for r in rows)
        return ({"queries": rows}, "not in radical" if negative else "in radical",
                EXIT_NEGATIVE if negative else EXIT_OK)
    Y = solve(problem.system, _finite(problem), problem.variables, **_ms(args))
    if queries:
        rows = [{"equation": str(q), "member": in_radical(Y, q)} for q in queries]
        negative = any(not r["member"] for r in rows)
        return ({"solution_set": _set_json(Y), "queries": rows},
                "not in radical" if negative else "in radical", EXIT_NEGATIVE if negative else EXIT_OK)
    eqs = radical_up_to_depth(Y, args.depth, include_trivial=False)
    return ({"solution_set": _set_json(Y), "depth": args.depth, "equations": [str(e) for e in eqs]},
            f"{_plural(len(eqs), 'nontrivial equation')} up to depth {args.depth}", EXIT_OK)


def cmd_closure(problem: Problem, args) -> tuple[dict, str, int]:
    B = _finite(problem)
    if problem.points:
        cl = zariski_closure(problem.points, B, problem.variables)
        given = point_set(B, problem.variables, problem.points)
        closed = cl == given
        return ({"points": points_json(given.points), "closure": _set_json(cl), "algebraic": closed},
                "algebraic" if closed else f"closure adds {len(cl) - len(given)} points", EXIT_OK)
    Y = solve(problem.system, B, problem.variables, **_ms(args))
    cl = closure_of(Y)
    if cl != Y:
        raise ConsistencyError("a solution set is not closed")
    return {"closure": _set_json(cl), "algebraic": True}, "algebraic", EXIT_OK


def cmd_coordalg(problem: Problem, args) -> tuple[dict, str, int]:
    Y = _target_set(problem, args)
    ca = coordinate_algebra(Y)
    A = ca.algebra
    tables = {n: A.tables[n].tolist() for n in sorted(A.tables)}
    fams = {f"{f}[{k}]": t.tolist() for f in sorted(A.family_tables)
            for k, t in sorted(A.family_tables[f].items())}
    res = {"solution_set": _set_json(Y), "size": ca.size,
           "generators": {v: g for v, g in zip(Y.variables.names, ca.generators)},
           "terms": [str(t) for t in ca.terms],
           "functions": ca.tuples.tolist(), "tables": tables, "family_tables": fams}
    return res, f"coordinate algebra with {_plural(ca.size, 'element')}", EXIT_OK


def cmd_irreducible(problem: Problem, args) -> tuple[dict, str, int]:
    Y = _target_set(problem, args)
    if len(Y) == 0:
        return {"solution_set": _set_json(Y), "irreducible": False}, "empty set", EXIT_NEGATIVE
    v = is_irreducible(Y, args.method, **_ms(args))
    res = {"solution_set": _set_json(Y), "irreducible": v.irreducible, "method": v.method,
           "point_closure": v.point_closure, "embedding": v.by_embedding,
           "generic_point": None if v.generic_point is None else list(v.generic_point),
           "embedding_map": None if v.embedding is None else list(v.embedding.map),
           "trivial_element": v.trivial_element}
    if v.irreducible:
        return res, "irreducible", EXIT_OK
    dec = decompose(Y)
    res["hint"] = {"components": [points_json(c.points) for c in dec.components]}
    return res, f"reducible: {_plural(len(dec.components), 'component')} (see 'decompose')", EXIT_NEGATIVE


def cmd_decompose(problem: Problem, args) -> tuple[dict, str, int]:
    Y = _target_set(problem, args)
    dec = decompose(Y)
    rec = subdirect_check(Y, dec)
    res = {"solution_set": _set_json(Y),
           "components": [points_json(c.points) for c in dec.components],
           "generic_points": points_json(dec.generic_points),
           "subdirect": {"passed": rec.passed, "injective": rec.injective,
                         "surjective": list(rec.surjective), "homomorphic": list(rec.homomorphic),
                         "restriction_maps": [list(m) for m in rec.restriction_maps]}}
    return res, _plural(len(dec.components), "component"), EXIT_OK


def cmd_classify(problem: Problem, args) -> tuple[dict, str, int]:
    Y = _target_set(problem, args)
    B = _finite(problem)
    if args.target:
        B = _finite(parse_problem(Path(args.target).read_text(encoding="utf-8")))
    C = coordinate_algebra(Y).algebra
    emb = find_embedding(C, B, **_ms(args))
    sep = is_separated(C, B, **_ms(args))
    dis = is_discriminated_finite(C, B, **_ms(args))
    res = {"solution_set": _set_json(Y), "coordinate_algebra_size": C.size,
           "ucl": emb is not None, "qvar": sep.separated, "dis": dis.discriminated,
           "embedding": None if emb is None else list(emb.map)}
    if (emb is not None) != dis.discriminated:
        raise ConsistencyError("Ucl and Dis membership disagree over a finite algebra")
    classes = [k for k in ("ucl", "qvar", "dis") if res[k]]
    return res, "member of " + ", ".join(classes) if classes else "in none of the classes", EXIT_OK


def cmd_lab(problem: Problem, args) -> tuple[dict, str, int]:
    if not problem.diseqs:
        raise UagError("lab needs a diseqs block")
    task = DisequationTask(problem.system, problem.diseqs, problem.algebra, problem.variables)
    u = check_uS_compact_instance(task, args.budget)
    res = {"u": u.to_dict()}
    if len(problem.diseqs) == 1:
        res["q"] = check_qS_compact_instance(task, args.budget).to_dict()
    return res, u.status, EXIT_OK


COMMANDS = {
    "solve": cmd_solve, "radical": cmd_radical, "closure": cmd_closure, "coordalg": cmd_coordalg,
    "irreducible": cmd_irreducible, "decompose": cmd_decompose, "classify": cmd_classify,
    "lab": cmd_lab,
}


def run(argv: Sequence[str]) -> tuple[int, RunReport]:
    argv = list(argv)
    args = build_parser().parse_args(argv)
    return execute(args, argv)


def execute(args: argparse.Namespace, argv: Sequence[str]) -> tuple[int, RunReport]:
    report = RunReport(command=list(argv))
    start = time.perf_counter()
    try:
        if args.command == "casestudy":
            from .casestudy import example5_report

            report.input_digest = digest(f"builtin:{args.name}")
            res = example5_report(args.depth, args.budget)
            code = EXIT_OK if res["passed"] else EXIT_NEGATIVE
            report.result = res
            report.verdict = "all checks pass" if res["passed"] else "some checks fail"
        else:
            data = Path(args.problem).read_bytes()
            report.input_digest = digest(data)
            problem = parse_problem(data.decode("utf-8"))
            report.result, report.verdict, code = COMMANDS[args.command](problem, args)
    except ConsistencyError as exc:
        report.result, report.verdict, code = {"error": str(exc)}, "consistency failure", EXIT_CONSISTENCY
    except (UagError, OSError, UnicodeDecodeError) as exc:
        report.result, report.verdict, code = {"error": str(exc)}, "error", EXIT_USAGE
    if args.timing:
        report.wall_time = round(time.perf_counter() - start, 6)
    return code, report


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    code, report = execute(args, argv)
    structured = args.format == "structured"
    sys.stdout.write(report.to_json() if structured else report.to_text())
    if code == EXIT_USAGE and not structured:
        sys.stderr.write(f"uag: {report.result.get('error', '')}\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
