"""Compactness and Noetherian checks on concrete instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, has_trivial_subalgebra
from .errors import BoundExceeded, ConsistencyError, OutsideFragment, UagError, UncertifiedTruncation
from .geometry import (AlgebraicSet, closure_of, coordinate_algebra, equation_holds, exact_truncation,
                       is_irreducible, radical_up_to_depth, solve)
from .homs import enumerate_homomorphisms, find_embedding, is_separated
from .sentences import UniversalSentence, holds_universal
from .terms import Equation, EquationSystem, VariableSet, app, evaluate, var

DEFAULT_GAMMA_CAP = 1024


def equivalent_over(s1: EquationSystem, s2: EquationSystem, B: FiniteAlgebra, X: VariableSet) -> bool:
    return solve(s1, B, X).points == solve(s2, B, X).points


@dataclass(frozen=True)
class Subsystem:
    system: EquationSystem
    labels: tuple[tuple, ...]
    killed: tuple[tuple[tuple[int, ...], tuple], ...]  # (point, label of the equation killing it)


def _greedy_subsystem(labelled: Sequence[tuple[tuple, Equation]], target: AlgebraicSet,
                      ambient: Iterable[tuple[int, ...]]) -> Subsystem | None:
    """For each point outside ``target`` (lexicographic), not yet excluded, pick
    the first equation of ``labelled`` violated there."""
    B, X = target.algebra, target.variables
    chosen: list[tuple[tuple, Equation]] = []
    killed = []
    for q in ambient:
        if q in target:
            continue
        asg = dict(zip(X.names, q))
        if any(evaluate(e.left, B, asg) != evaluate(e.right, B, asg) for _, e in chosen):
            continue
        pick = next(((lab, e) for lab, e in labelled
                     if evaluate(e.left, B, asg) != evaluate(e.right, B, asg)), None)
        if pick is None:
            return None
        chosen.append(pick)
        killed.append((q, pick[0]))
    return Subsystem(EquationSystem(tuple(e for _, e in chosen)), tuple(l for l, _ in chosen), tuple(killed))


def _ambient(B: FiniteAlgebra, n: int):
    return itertools.product(range(B.size), repeat=n)


def find_finite_equivalent_subsystem(S: EquationSystem, B: FiniteAlgebra, X: VariableSet) -> Subsystem:
    """A finite S0 contained in S with V(S0) = V(S); |S0| <= |B^n minus V(S)|."""
    labelled = exact_truncation(S, B)
    V = solve(S, B, X)
    sub = _greedy_subsystem(labelled, V, _ambient(B, len(X)))
    if sub is None:
        raise ConsistencyError("a point outside V(S) satisfies every equation of S")
    if solve(sub.system, B, X).points != V.points:
        raise ConsistencyError("greedy subsystem is not equivalent to S")
    return sub


# -- compactness verdicts ---------------------------------------------------------------

@dataclass(frozen=True)
class DisequationTask:
    system: EquationSystem
    disequations: tuple[Equation, ...]
    algebra: Any
    variables: VariableSet

    def __post_init__(self) -> None:
        if not self.disequations:
            raise UagError("a disequation task needs at least one disequation")


@dataclass(frozen=True)
class CompactnessVerdict:
    status: str  # "not-finitely-satisfiable" | "satisfiable" | "violation"
    witness: tuple[int, ...] | None = None
    unsat_subset: tuple[tuple, ...] | None = None
    certificate: dict = field(default_factory=dict)
    evidence: tuple[tuple[int, tuple[int, ...]], ...] = ()
    escaping_points: tuple[tuple[int, tuple[int, ...]], ...] = ()
    budget: int = 0
    method: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": None if self.witness is None else list(self.witness),
            "unsat_subset": None if self.unsat_subset is None else [list(map(_jsonable, l)) for l in self.unsat_subset],
            "certificate": self.certificate,
            "evidence": [[k, list(p)] for k, p in self.evidence],
            "escaping_points": [[m, list(p)] for m, p in self.escaping_points],
            "budget": self.budget,
            "method": self.method,
        }


def _jsonable(x: Any) -> Any:
    return x if isinstance(x, (int, str)) else str(x)


def _finite_verdict(task: DisequationTask, budget: int) -> CompactnessVerdict:
    """Over a finite algebra T is (equivalent to) a finite set, so finite
    satisfiability and satisfiability coincide; only two statuses occur."""
    B, X = task.algebra, task.variables
    labelled = exact_truncation(task.system, B)
    V = solve(task.system, B, X)
    ok = np.ones(len(V), dtype=bool)
    for d in task.disequations:
        ok &= ~equation_holds(V, d)
    hits = np.flatnonzero(ok)
    if len(hits):
        return CompactnessVerdict("satisfiable", V.points[hits[0]], budget=budget, method="exact")
    labels = tuple(l for l, _ in labelled) + tuple(("diseq", i) for i in range(len(task.disequations)))
    cert = {"solution_set": [list(p) for p in V.points],
            "covered_by": [str(d) for d in task.disequations]}
    return CompactnessVerdict("not-finitely-satisfiable", None, labels, cert, budget=budget, method="exact")


def _gn_escape_pattern(task: DisequationTask, bounds: Sequence[int]) -> tuple[tuple[int, tuple[int, ...]], ...] | None:
    """Witness family p(M) for the truncation of S to supports <= M: one
    coordinate M+2 (above every support) and the others small."""
    from . import gn

    n = len(task.variables)
    smalls = range(4)
    for pos in range(n):
        for rest in itertools.product(smalls, repeat=n - 1):
            found = []
            for M in bounds:
                p = list(rest)
                p.insert(pos, M + 2)
                p = tuple(p)
                trunc = _gn_truncation(task.system, M)
                V = gn.solve_symbolic(trunc, task.variables.names)
                if gn.contains(V, p) and not any(_gn_holds(d, task.variables, p) for d in task.disequations):
                    found.append((M, p))
                else:
                    break
            if len(found) == len(bounds):
                return tuple(found)
    return None


def _gn_holds(e: Equation, X: VariableSet, p: Sequence[int]) -> bool:
    from . import gn

    asg = dict(zip(X.names, p))
    v1, c1 = gn.chain_of(e.left)
    v2, c2 = gn.chain_of(e.right)
    return gn.eval_chain(c1, asg[v1]) == gn.eval_chain(c2, asg[v2])


def _gn_truncation(S: EquationSystem, support_bound: int) -> EquationSystem:
    """Explicit part plus the generator instances all of whose family indices
    k have their pair {2k, 2k+1} inside [0, support_bound]."""
    out = list(S.explicit)
    for g in S.generators:
        n = g.start
        while g.contains(n):
            idx = [s.at(n) for s in g.specs()]
            if all(2 * k + 1 <= support_bound for k in idx):
                out.append(g.instance(n))
            shifted = [s.at(n) for s in g.specs() if s.shifted]
            if not shifted or 2 * min(shifted) + 1 > support_bound:
                break  # later instances repeat this one or only grow
            n += 1
    return EquationSystem(tuple(out))


def _gn_verdict(task: DisequationTask, budget: int, bounds: Sequence[int]) -> CompactnessVerdict:
    from . import gn

    X = task.variables
    names = X.names
    V = gn.solve_symbolic(task.system, names)
    covers = [gn.solve_symbolic(EquationSystem.of(d), names) for d in task.disequations]
    is_covered, escape = gn.covered(V, covers, len(names))
    if not is_covered:
        return CompactnessVerdict("satisfiable", escape, budget=budget, method="exact-symbolic")
    # T is unsatisfiable; look for a finite unsatisfiable subset first
    subsets: list[tuple[tuple, EquationSystem]] = [
        ((), EquationSystem()),
        (("explicit",), EquationSystem(task.system.explicit)),
    ]
    for k in range(budget + 1):
        subsets.append((("support-bound", k), _gn_truncation(task.system, k)))
    evidence = []
    for label, sub in subsets:
        Vs = gn.solve_symbolic(sub, names)
        ok, p = gn.covered(Vs, covers, len(names))
        if ok:
            cert = {"solution_set": Vs.describe(), "covered_by": [str(d) for d in task.disequations]}
            return CompactnessVerdict("not-finitely-satisfiable", None, (label,), cert, tuple(evidence),
                                      budget=budget, method="exact-symbolic")
        if label and label[0] == "support-bound":
            evidence.append((label[1], p))
    escapes = _gn_escape_pattern(task, list(bounds) + list(range(budget + 1)))
    cert = {"solution_set": V.describe(), "covered_by": [str(d) for d in task.disequations],
            "finite_satisfiability": "analytic" if escapes else "empirical",
            "pattern": None if escapes is None else "one coordinate M+2 above every support, others fixed"}
    return CompactnessVerdict("violation", None, None, cert, tuple(evidence),
                              tuple(sorted({e for e in (escapes or ()) if e[0] in bounds})),
                              budget=budget, method="exact-symbolic")


def check_uS_compact_instance(task: DisequationTask, budget: int = 20,
                              support_bounds: Sequence[int] = (10, 50, 200)) -> CompactnessVerdict:
    from .gn import GnAlgebra

    if isinstance(task.algebra, GnAlgebra):
        return _gn_verdict(task, budget, support_bounds)
    if isinstance(task.algebra, FiniteAlgebra):
        return _finite_verdict(task, budget)
    raise OutsideFragment("unsupported algebra kind")


def check_qS_compact_instance(task: DisequationTask, budget: int = 20,
                              support_bounds: Sequence[int] = (10, 50, 200)) -> CompactnessVerdict:
    if len(task.disequations) != 1:
        raise UagError("the q-case takes exactly one disequation")
    return check_uS_compact_instance(task, budget, support_bounds)


# -- E-compactness ---------------------------------------------------------------------

@dataclass(frozen=True)
class ECompactness:
    compact: bool
    kind: str
    trivial_element: int | None = None
    subsystem: tuple[Equation, ...] = ()
    sentence: str = ""
    witnesses: tuple[tuple[int, int], ...] = ()
    obstruction_checked_below: int = 0

    def __bool__(self) -> bool:
        return self.compact


def _one_variable_atoms(B: FiniteAlgebra) -> list[Equation]:
    x = var("x")
    atoms = []
    for name, index, arity in B.operations():
        if arity == 0:
            atoms.append(Equation(app(name), x))
        else:
            atoms.append(Equation(app(name, *([x] * arity), index=index), x))
    return atoms


def is_E_compact(B: Any, budget: int = 20, window: int = 1000) -> ECompactness:
    """Finite algebras (finite effective language) are always E-compact; the
    certificate is either a trivial-subalgebra element or a finite S0 with
    forall x not(and S0) true in B."""
    from . import gn

    if isinstance(B, FiniteAlgebra):
        b = has_trivial_subalgebra(B)
        if b is not None:
            return ECompactness(True, "trivial-subalgebra", b)
        atoms = _one_variable_atoms(B)
        sentence = UniversalSentence(("x",), tuple(atoms), ())
        if not holds_universal(B, sentence):
            raise ConsistencyError("no trivial subalgebra, yet the atoms are jointly satisfiable")
        kind = "constant-symbol" if B.signature.constants else "finite-language"
        return ECompactness(True, kind, None, tuple(atoms), str(sentence))
    if isinstance(B, gn.GnAlgebra):
        # finite subsets {g_0(x)=x, ..., g_K(x)=x} hold at 2K+2
        witnesses = []
        for K in range(budget + 1):
            a = 2 * K + 2
            if any(gn.g(n, a) != a for n in range(K + 1)):
                raise ConsistencyError("support-bound witness fails")
            witnesses.append((K, a))
        # the whole set fails everywhere: a is moved by g_{a//2}
        if any(gn.g(a // 2, a) == a for a in range(window)):
            raise ConsistencyError("total obstruction fails")
        return ECompactness(False, "symbolic-dual", None, (), "forall x (g[x//2](x) != x)",
                            tuple(witnesses), window)
    raise OutsideFragment("unsupported algebra kind")


# -- class membership for finite algebras ---------------------------------------------

def ucl_member(C: FiniteAlgebra, B: FiniteAlgebra) -> bool:
    """C in Ucl(B) for finite B: the ultrapowers of B are isomorphic to B, so
    this is embeddability of C into B."""
    return find_embedding(C, B) is not None


def qvar_member(C: FiniteAlgebra, B: FiniteAlgebra) -> bool:
    """For finite C this is separation of C by B; E always belongs."""
    return bool(is_separated(C, B))


@dataclass(frozen=True)
class TheoremInstance:
    which: str
    rows: tuple[tuple[str, Any], ...]
    agreement: bool

    def to_dict(self) -> dict:
        return {"which": self.which, "rows": [[k, v] for k, v in self.rows], "agreement": self.agreement}


def verify_theorem_instance(B: FiniteAlgebra, Y: AlgebraicSet, which: str) -> TheoremInstance:
    gamma = coordinate_algebra(Y)
    if which == "A":
        emb = find_embedding(gamma.algebra, B) is not None
        irr = bool(is_irreducible(Y, "point-closure")) if len(Y) else False
        rows = (("items 1-4: Gamma(Y) embeds into B", emb),
                ("item 5: limit algebras", "out of scope"),
                ("item 6: complete atomic types", "out of scope"),
                ("item 7: Y irreducible", irr))
        return TheoremInstance("A", rows, emb == irr)
    if which == "C":
        sep = bool(is_separated(gamma.algebra, B))
        alg = closure_of(Y) == Y
        rows = (("items 1-4: Gamma(Y) separated by B", sep),
                ("item 5: limit algebras", "out of scope"),
                ("item 6: complete atomic types", "out of scope"),
                ("item 7: Y algebraic", alg))
        return TheoremInstance("C", rows, sep == alg)
    raise UagError(f"unknown theorem {which!r}")


# -- the five-condition lemma ----------------------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    conditions: tuple[bool, bool, bool, bool, bool]
    agree: bool
    method5: str

    def to_dict(self) -> dict:
        return {"conditions": list(self.conditions), "agree": self.agree, "method5": self.method5}


def check_lemma_equivalences(B: FiniteAlgebra, S: EquationSystem, diseqs: Sequence[Equation],
                             X: VariableSet, gamma_cap: int = DEFAULT_GAMMA_CAP,
                             strict: bool = False) -> LemmaReport:
    """Evaluate the five conditions independently.

    (1) V(S) covered by the union of V(t_i = s_i)
    (2) at every point of V(S) some t_i = s_i holds (pointwise re-check)
    (3) forall x (and S -> or t_i = s_i) holds in B
    (4) S with every t_i != s_i has no solution (direct search)
    (5) no homomorphism <X|S> -> B separates every pair (t_i, s_i)
    """
    eqs = [e for _, e in exact_truncation(S, B)]
    V = solve(S, B, X)
    # (1)
    union: set = set()
    for d in diseqs:
        union |= set(solve(EquationSystem.of(d), B, X).points)
    c1 = set(V.points) <= union
    # (2)
    c2 = True
    for p in V.points:
        asg = dict(zip(X.names, p))
        if not any(evaluate(d.left, B, asg) == evaluate(d.right, B, asg) for d in diseqs):
            c2 = False
            break
    # (3)
    c3 = holds_universal(B, UniversalSentence(X.names, tuple(eqs), tuple(diseqs))).holds
    # (4)
    c4 = True
    for p in _ambient(B, len(X)):
        asg = dict(zip(X.names, p))
        memo: dict = {}
        if all(evaluate(e.left, B, asg, memo) == evaluate(e.right, B, asg, memo) for e in eqs) and \
                all(evaluate(d.left, B, asg, memo) != evaluate(d.right, B, asg, memo) for d in diseqs):
            c4 = False
            break
    # (5) homomorphisms <X|S> -> B factor through Gamma(V(S)) and correspond to its points
    method = "homomorphisms-from-coordinate-algebra"
    try:
        gamma = coordinate_algebra(V, gamma_cap)
        pairs = [(gamma.element_of(d.left), gamma.element_of(d.right)) for d in diseqs]
        c5 = next(enumerate_homomorphisms(gamma.algebra, B, must_differ=pairs), None) is None
    except BoundExceeded:
        method = "assignments-in-solution-set"
        c5 = True
        for p in V.points:
            asg = dict(zip(X.names, p))
            if all(evaluate(d.left, B, asg) != evaluate(d.right, B, asg) for d in diseqs):
                c5 = False
                break
    conds = (c1, c2, c3, c4, c5)
    agree = len(set(conds)) == 1
    if strict and not agree:
        raise ConsistencyError(f"five-condition lemma disagreement: {conds}")
    return LemmaReport(conds, agree, method)


# -- weak Noetherian cross-check ------------------------------------------------------------

@dataclass(frozen=True)
class WeakNoetherianReport:
    depth: int
    from_radical: EquationSystem
    subsystem: EquationSystem
    subsystem_labels: tuple[tuple, ...]
    equivalent: bool


def weak_noetherian_cross_check(B: FiniteAlgebra, S: EquationSystem, X: VariableSet,
                                depth: int = 2) -> WeakNoetherianReport:
    """Find a finite S0 inside a radical window with V(S0) = V(S), then for each
    equation of S0 a finite part of S implying it over B (the q-compactness
    step); the union is a finite subsystem of S equivalent to S."""
    V = solve(S, B, X)
    window = [e for e in radical_up_to_depth(V, depth) if not e.is_trivial]
    s0 = _greedy_subsystem([(("radical", i), e) for i, e in enumerate(window)], V, _ambient(B, len(X)))
    if s0 is None:
        raise UagError(f"radical window of depth {depth} is too small to cut out V(S)")
    labelled = exact_truncation(S, B)
    chosen: dict[tuple, Equation] = {}
    for e in s0.system.explicit:
        Ve = solve(EquationSystem.of(e), B, X)
        part = _greedy_subsystem(labelled, Ve, _ambient(B, len(X)))
        if part is None:
            raise ConsistencyError(f"{e} lies in the radical but no part of S implies it")
        for lab, eq in zip(part.labels, part.system.explicit):
            chosen.setdefault(lab, eq)
    labels = tuple(sorted(chosen, key=repr))
    sub = EquationSystem(tuple(chosen[l] for l in labels))
    equivalent = (solve(s0.system, B, X).points == V.points == solve(sub, B, X).points)
    if not equivalent:
        raise ConsistencyError("reconstructed systems are not equivalent to S")
    return WeakNoetherianReport(depth, s0.system, sub, labels, equivalent)
