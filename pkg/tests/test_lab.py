from __future__ import annotations

import itertools
import random

import pytest

from uag import gn
from uag.algebra import direct_product, trivial_algebra
from uag.casestudy import cover_equations, example_system
from uag.corpus import BINARY, c3, generated_instances, random_algebras, sl2
from uag.geometry import algebraic_sets, coordinate_algebra, is_irreducible, point_set, solve
from uag.lab import (DisequationTask, check_lemma_equivalences, check_qS_compact_instance,
                     check_uS_compact_instance, equivalent_over, find_finite_equivalent_subsystem,
                     is_E_compact, qvar_member, ucl_member, verify_theorem_instance,
                     weak_noetherian_cross_check)
from uag.terms import (Equation, EquationSystem, Generator, IndexSpec, TermTemplate, VariableSet,
                       app, enumerate_terms, var)

X = VariableSet(("x", "y"))
X1 = VariableSet(("x",))
x, y = var("x"), var("y")
m = lambda a, b: app("m", a, b)
SL2SQ = direct_product([sl2(), sl2()])[0]


def _fixed(v, start):
    t = TermTemplate(v, None, (), True)
    return Generator(TermTemplate("g", IndexSpec(0, True), (t,)), t, start)


def test_equivalence_examples():
    B = sl2()
    assert equivalent_over(EquationSystem.of(Equation(m(x, y), x)), EquationSystem.of(Equation(m(y, x), x)), B, X)
    assert not equivalent_over(EquationSystem(), EquationSystem.of(Equation(x, y)), B, X)


def test_subsystem_of_redundant_variants():
    variants = (Equation(m(x, y), x), Equation(m(y, x), x), Equation(m(m(x, y), x), x),
                Equation(m(x, m(x, y)), x))
    sub = find_finite_equivalent_subsystem(EquationSystem(variants), sl2(), X)
    assert len(sub.system) == 1
    assert sub.killed == (((1, 0), ("explicit", 0)),)


def test_subsystem_of_trivial_system_is_empty():
    sub = find_finite_equivalent_subsystem(EquationSystem.of(Equation(m(x, x), x)), sl2(), X)
    assert len(sub.system) == 0


@pytest.mark.parametrize("inst", generated_instances(), ids=lambda i: i.name)
def test_subsystem_of_generated_systems(inst):
    sub = find_finite_equivalent_subsystem(inst.system, inst.algebra, inst.variables)
    assert solve(sub.system, inst.algebra, inst.variables) == solve(inst.system, inst.algebra, inst.variables)
    for label in sub.labels:
        if label[0] == "generator":
            assert inst.system.generators[label[1]].contains(label[2])


def test_kotov_instances_present():
    sizes = [len(solve(i.system, i.algebra, i.variables)) for i in generated_instances()]
    assert 0 in sizes and 1 in sizes


def test_subsystem_is_part_of_s():
    rng = random.Random(2)
    B = sl2()
    pool = list(enumerate_terms(BINARY, X, 2))
    for _ in range(40):
        S = EquationSystem(tuple(Equation(rng.choice(pool), rng.choice(pool)) for _ in range(4)))
        sub = find_finite_equivalent_subsystem(S, B, X)
        assert set(sub.system.explicit) <= set(S.explicit)
        assert equivalent_over(sub.system, S, B, X)


def test_u_compactness_examples():
    task = DisequationTask(example_system(), cover_equations(), gn.GnAlgebra(), X)
    v = check_uS_compact_instance(task, 20, (10, 50, 200))
    assert v.status == "violation"
    assert v.escaping_points == ((10, (12, 0)), (50, (52, 0)), (200, (202, 0)))
    assert v.certificate["finite_satisfiability"] == "analytic"
    one = DisequationTask(EquationSystem((), (_fixed("x", 1),)),
                          (Equation(x, gn.chain_term("x", (0,))),), gn.GnAlgebra(), X1)
    v = check_uS_compact_instance(one)
    assert v.status == "satisfiable" and v.witness == (0,)


def test_finite_algebras_never_violate():
    rng = random.Random(9)
    pool = list(enumerate_terms(BINARY, X, 1))
    for _ in range(50):
        S = EquationSystem(tuple(Equation(rng.choice(pool), rng.choice(pool)) for _ in range(2)))
        d = tuple(Equation(rng.choice(pool), rng.choice(pool)) for _ in range(2))
        v = check_uS_compact_instance(DisequationTask(S, d, sl2(), X))
        assert v.status in ("satisfiable", "not-finitely-satisfiable")


def test_q_compactness_examples():
    A = gn.GnAlgebra()
    allg = EquationSystem((), (_fixed("x", 0),))
    v = check_qS_compact_instance(DisequationTask(allg, (Equation(x, x),), A, X1))
    assert v.status == "not-finitely-satisfiable"
    v = check_qS_compact_instance(DisequationTask(EquationSystem((), (_fixed("x", 1),)),
                                                  (Equation(gn.chain_term("x", (0,)), x),), A, X1))
    assert v.status == "satisfiable" and v.witness == (0,)
    v = check_qS_compact_instance(DisequationTask(EquationSystem.of(Equation(m(x, y), x)),
                                                  (Equation(x, y),), sl2(), X))
    assert v.status == "satisfiable" and v.witness == (0, 1)


def test_monotone_budget():
    task = DisequationTask(example_system(), cover_equations(), gn.GnAlgebra(), X)
    statuses = [check_uS_compact_instance(task, n, (10,)).status for n in (0, 1, 5, 20, 40)]
    assert statuses == ["violation"] * 5
    pts = {check_uS_compact_instance(task, n, (10, 50)).escaping_points for n in (3, 20)}
    assert len(pts) == 1


def test_e_compactness():
    r = is_E_compact(sl2())
    assert r.compact and r.trivial_element == 0
    r = is_E_compact(c3())
    assert r.compact and [str(e) for e in r.subsystem] == ["f(x) = x"]
    r = is_E_compact(gn.GnAlgebra(), budget=20)
    assert not r.compact
    assert r.witnesses[3] == (3, 8)


def test_class_membership_examples():
    E = trivial_algebra(BINARY)
    assert ucl_member(sl2(), SL2SQ)
    assert not ucl_member(SL2SQ, sl2())
    assert ucl_member(E, sl2())
    assert qvar_member(SL2SQ, sl2())
    assert qvar_member(trivial_algebra(c3().signature), c3())


def test_theorem_instances():
    B = sl2()
    leq = point_set(B, X, ((0, 0), (0, 1), (1, 1)))
    full = point_set(B, X, list(itertools.product(range(2), repeat=2)))
    a = verify_theorem_instance(B, leq, "A")
    assert a.agreement and dict(a.rows)["items 1-4: Gamma(Y) embeds into B"] is True
    a = verify_theorem_instance(B, full, "A")
    assert a.agreement and dict(a.rows)["item 7: Y irreducible"] is False
    c = verify_theorem_instance(B, full, "C")
    assert c.agreement and dict(c.rows)["item 5: limit algebras"] == "out of scope"


def test_lemma_examples():
    B = sl2()
    r = check_lemma_equivalences(B, EquationSystem.of(Equation(m(x, y), x)),
                                 [Equation(x, y), Equation(m(x, x), y)], X)
    assert r.agree
    empty = EquationSystem.of(Equation(app("f", x), x))
    r = check_lemma_equivalences(c3(), empty, [Equation(x, y)], X)
    assert r.agree and all(r.conditions)
    r = check_lemma_equivalences(B, EquationSystem(), [Equation(x, x)], X)
    assert r.agree and all(r.conditions)


@pytest.mark.parametrize("B", [sl2(), c3()] + random_algebras(2), ids=lambda B: B.name)
def test_class_laws_on_algebraic_sets(B):
    for Y in algebraic_sets(B, X):
        if not len(Y):
            continue
        G = coordinate_algebra(Y).algebra
        assert ucl_member(G, B) == bool(is_irreducible(Y))
        assert qvar_member(G, B)


def test_weak_noetherian_examples():
    B = sl2()
    variants = EquationSystem((Equation(m(x, y), x), Equation(m(y, x), x), Equation(m(m(x, y), y), x)))
    r = weak_noetherian_cross_check(B, variants, X)
    assert len(r.from_radical) == 1 and r.equivalent
    assert set(r.subsystem.explicit) <= set(variants.explicit)
    r = weak_noetherian_cross_check(B, EquationSystem.of(Equation(m(x, x), x)), X)
    assert len(r.from_radical) == 0 and len(r.subsystem) == 0
    inst = generated_instances()[0]
    r = weak_noetherian_cross_check(inst.algebra, inst.system, inst.variables)
    assert r.equivalent
