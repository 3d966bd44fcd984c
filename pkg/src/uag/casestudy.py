"""The (N, g_n) case study: every claim checked from the symbolic normal form."""

from __future__ import annotations

import itertools
from typing import Any, Sequence

from . import gn
from .congruence import CongruenceClosure
from .homs import find_embedding
from .lab import DisequationTask, check_uS_compact_instance, is_E_compact
from .sentences import UniversalSentence, holds_universal
from .terms import Equation, EquationSystem, Generator, IndexSpec, TermTemplate, VariableSet, var

X = VariableSet(("x", "y"))
V_EXPECTED = ((0, 0), (0, 1), (1, 0), (1, 1))


def _fixed_family(v: str, start: int = 1) -> Generator:
    t = TermTemplate(v, None, (), True)
    return Generator(TermTemplate(gn.FAMILY, IndexSpec(0, True), (t,)), t, start, None)


def example_system() -> EquationSystem:
    """S'(x) together with S'(y): g_n(v) = v for every n >= 1."""
    return EquationSystem((), (_fixed_family("x"), _fixed_family("y")))


def cover_equations() -> tuple[Equation, Equation]:
    x, y = var("x"), var("y")
    return Equation(x, y), Equation(x, gn.chain_term("y", [0]))


def _holds(e: Equation, p: Sequence[int]) -> bool:
    asg = dict(zip(X.names, p))
    v1, c1 = gn.chain_of(e.left)
    v2, c2 = gn.chain_of(e.right)
    return gn.eval_chain(c1, asg[v1]) == gn.eval_chain(c2, asg[v2])


def _chains(indices: Sequence[int], depth: int):
    for k in range(depth + 1):
        yield from itertools.product(indices, repeat=k)


def _displayed(e: Equation) -> bool:
    """Membership in the radical as displayed for this example: one side a bare
    variable, the other a chain on x or y, with no index 0 when both sides use
    the same variable."""
    for a, b in ((e.left, e.right), (e.right, e.left)):
        if b.is_var:
            va, ca = gn.chain_of(a)
            if not ca:
                continue
            if va != b.name:
                return True
            return all(n != 0 for n in ca)
    return False


def radical_probe(depth: int, indices: Sequence[int] | None = None) -> dict:
    """Decide every chain equation of depth <= ``depth`` against V(S) = {0,1}^2
    and compare with the displayed description."""
    indices = list(range(depth + 1)) if indices is None else list(indices)
    terms = [gn.chain_term(v, c) for v in X.names for c in _chains(indices, depth)]
    members, displayed_only, members_only, cross_members = [], [], [], []
    for i, t in enumerate(terms):
        for s in terms[i + 1:]:
            e = Equation(t, s)
            member = all(_holds(e, p) for p in V_EXPECTED)
            shown = _displayed(e)
            cross = gn.chain_of(e.left)[0] != gn.chain_of(e.right)[0]
            if member:
                members.append(e)
                if cross:
                    cross_members.append(e)
            if shown and not member:
                displayed_only.append(e)
            elif member and not shown:
                members_only.append(e)
    # which of the undisplayed members follow from the displayed ones by congruence
    cc = CongruenceClosure()
    for e in members:
        if _displayed(e):
            cc.add_equation(e)
    derivable = [e for e in members_only if cc.equal(e.left, e.right)]
    underivable = [e for e in members_only if not cc.equal(e.left, e.right)]
    return {
        "depth": depth,
        "indices": indices,
        "equations_checked": len(terms) * (len(terms) - 1) // 2,
        "radical_members": len(members),
        "cross_variable_members": len(cross_members),
        "displayed_but_not_in_radical": len(displayed_only),
        "displayed_but_not_in_radical_examples": [str(e) for e in displayed_only[:5]],
        "in_radical_not_displayed": len(members_only),
        "of_which_congruence_derivable": len(derivable),
        "not_derivable_examples": [str(e) for e in underivable[:5]],
        "discrepancy": bool(displayed_only or underivable),
    }


def _reachable_parity_sets(indices: Sequence[int], depth: int) -> set[frozenset[int]]:
    level = {frozenset()}
    seen = set(level)
    for _ in range(depth):
        nxt = set()
        for K in level:
            for n in indices:
                L = K ^ {n}
                if L not in seen:
                    nxt.add(L)
        seen |= nxt
        level = {K ^ {n} for K in level for n in indices}
    return seen


def covering_argument(support_bound: int, depth: int, budget: int) -> dict:
    """Every finite S0 inside the depth-``depth`` radical window with supports
    <= M misses the cover V(x=y) u V(x=g_0(y)).

    A one-variable chain equation c1(v) = c2(v) has solution set
    {a : a//2 not in K1 ^ K2} (K = odd-multiplicity indices), so it is in the
    radical iff 0 is not in K1 ^ K2, and the window's solution set is cut out
    by g_k(v) = v for k in U, the union of the admissible K1 ^ K2. Grouping
    chains by whether 0 is in K, U is the union over groups of (union minus
    intersection). No cross-variable equation lies in the radical (chains are
    bijections and V(S) contains (0,0) and (0,1)), so the window is a product.
    Every S0 inside the window has V(S0) containing V(window).
    """
    M = support_bound
    top = (M - 1) // 2
    indices = list(range(top + 1))
    sets = _reachable_parity_sets(indices, depth)
    U: set[int] = set()
    for flag in (True, False):
        group = [K for K in sets if (0 in K) == flag]
        if len(group) > 1:
            U |= set().union(*group) - frozenset.intersection(*group)
    reduced = []
    for v in X.names:
        for k in sorted(U):
            e = Equation(gn.chain_term(v, [k]), var(v))
            if not all(_holds(e, p) for p in V_EXPECTED):
                return {"support_bound": M, "passed": False, "reason": f"{e} is not a radical member"}
            reduced.append(e)
    V = gn.solve_symbolic(EquationSystem(tuple(reduced)), X.names)
    covers = [gn.solve_symbolic(EquationSystem.of(c), X.names) for c in cover_equations()]
    is_covered, found = gn.covered(V, covers, 2)
    escape = (M + 2, 0)
    escape_ok = gn.contains(V, escape) and not any(gn.contains(c, escape) for c in covers)
    # direct check of the escaping point on the first ``budget`` window members
    members = []
    terms = [gn.chain_term(v, c) for v in X.names for c in _chains(indices[:4], depth)]
    for i, t in enumerate(terms):
        for s in terms[i + 1:]:
            e = Equation(t, s)
            if all(_holds(e, p) for p in V_EXPECTED):
                members.append(e)
            if len(members) >= budget:
                break
        if len(members) >= budget:
            break
    direct = all(_holds(e, escape) for e in members)
    checked = len(members)
    return {
        "support_bound": M,
        "indices": [0, top],
        "parity_sets": len(sets),
        "pairs_cut_out": sorted(U),
        "window_solution_set": V.describe(),
        "covered": is_covered,
        "grid_escape": None if found is None else list(found),
        "escaping_point": list(escape),
        "escaping_point_ok": escape_ok,
        "direct_members_checked": checked,
        "direct_check_ok": direct,
        "passed": (not is_covered) and escape_ok and direct,
    }


def subalgebra_probes() -> dict:
    A = gn.GnAlgebra()
    out = {}
    C1, tuples1 = gn.GnPower(2).generated_subalgebra([(0, 1)])
    r1 = max(c // 2 for t in tuples1 for c in t)
    emb1 = find_embedding(C1, A.window(r1 + 1))
    out["seed_0_1"] = {"elements": [list(t) for t in tuples1],
                       "embeds_into_A": emb1 is not None,
                       "embedding": None if emb1 is None else list(emb1.map)}
    C2, tuples2 = gn.GnPower(2).generated_subalgebra([(0, 2)])
    r2 = max(c // 2 for t in tuples2 for c in t)
    emb2 = find_embedding(C2, A.window(r2 + 1))
    x = var("x")
    sentence = UniversalSentence(("x",), (), (Equation(gn.chain_term("x", [0]), x),
                                              Equation(gn.chain_term("x", [1]), x)))
    in_A, _, cert = gn.holds_universal_gn(sentence)
    in_C = holds_universal(C2, sentence)
    out["seed_0_2"] = {"elements": [list(t) for t in tuples2],
                       "sentence": str(sentence),
                       "holds_in_A": in_A,
                       "holds_in_subalgebra": in_C.holds,
                       "countermodel": None if in_C.countermodel is None
                       else list(tuples2[in_C.countermodel[0]]),
                       "embeds_into_A": emb2 is not None,
                       "in_Ucl_A": False if not in_C.holds else None}
    passed = (len(tuples1) == 2 and emb1 is not None and
              sorted(tuples2) == [(0, 2), (0, 3), (1, 2), (1, 3)] and
              in_A and not in_C.holds and emb2 is None)
    return {"passed": passed, **out}


def example5_report(depth: int = 3, budget: int = 20,
                    lab_bounds: Sequence[int] = (10, 50, 200),
                    radical_bounds: Sequence[int] = (10, 50)) -> dict:
    S = example_system()
    checks: dict[str, Any] = {}

    V = gn.solve_symbolic(S, X.names)
    pts = tuple(map(tuple, V.points)) if isinstance(V, gn.Graph2) else None
    checks["a"] = {"title": "solution set of S", "passed": pts == V_EXPECTED and not V.tail,
                   "solution_set": V.describe(),
                   "certificate": "exact: generators solved in chain normal form, no truncation"}

    covers = [gn.solve_symbolic(EquationSystem.of(c), X.names) for c in cover_equations()]
    both, _ = gn.covered(V, covers, 2)
    only_first, w1 = gn.covered(V, covers[:1], 2)
    only_second, w2 = gn.covered(V, covers[1:], 2)
    checks["b"] = {"title": "covering by V(x=y) and V(x=g0(y))",
                   "passed": both and not only_first and not only_second,
                   "contained_in_union": both,
                   "contained_in_first": only_first, "witness_first": w1 and list(w1),
                   "contained_in_second": only_second, "witness_second": w2 and list(w2)}

    ec = is_E_compact(gn.GnAlgebra(), budget)
    checks["c"] = {"title": "E-compactness", "passed": not ec.compact,
                   "e_compact": ec.compact,
                   "finite_subset_witnesses": [[k, a] for k, a in ec.witnesses],
                   "total_obstruction": ec.sentence,
                   "obstruction_checked_below": ec.obstruction_checked_below}

    task = DisequationTask(S, cover_equations(), gn.GnAlgebra(), X)
    verdict = check_uS_compact_instance(task, budget, lab_bounds)
    got = {m for m, _ in verdict.escaping_points}
    checks["d"] = {"title": "u_S-compactness instance", "verdict": verdict.to_dict(),
                   "passed": verdict.status == "violation" and got == set(lab_bounds)}

    probe = radical_probe(depth)
    checks["e"] = {"title": "radical probe", "passed": probe["cross_variable_members"] == 0, **probe}

    cov = [covering_argument(M, depth, budget) for M in radical_bounds]
    checks["f"] = {"title": "no finite radical subsystem covers", "passed": all(c["passed"] for c in cov),
                   "bounds": cov}

    checks["g"] = {"title": "generated subalgebras of A^2", **subalgebra_probes()}

    return {
        "algebra": "example5",
        "depth": depth,
        "budget": budget,
        "checks": checks,
        "discrepancies": [
            "the displayed radical lists cross-variable equations x = chain(y); none is a "
            "consequence since no chain maps 0 to both 0 and 1"
        ] if probe["displayed_but_not_in_radical"] else [],
        "passed": all(c["passed"] for c in checks.values()),
    }
