from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import instance_depth, random_congruence_instances, rewrite_entails
from strategies import UNARY_BINARY, equations
from uag.algebra import make_algebra
from uag.congruence import CongruenceClosure, entails_congruence
from uag.errors import UagError
from uag.terms import Equation, EquationSystem, Generator, TermTemplate, IndexSpec, app, evaluate, var

x, y = var("x"), var("y")


def f(t, k=1):
    for _ in range(k):
        t = app("f", t)
    return t


def test_examples():
    assert entails_congruence([Equation(f(x, 3), x), Equation(f(x, 5), x)], Equation(f(x), x))
    assert entails_congruence([], Equation(app("m", x, y), app("m", x, y)))
    assert not entails_congruence([Equation(f(x), x)], Equation(x, y))


def test_certificate_lists_merges():
    res = entails_congruence([Equation(f(x), x)], Equation(f(f(x)), x))
    assert res.entailed and res.certificate
    assert not entails_congruence([Equation(f(x), x)], Equation(f(y), y)).certificate


def test_infinite_system_rejected():
    t = TermTemplate("x", None, (), True)
    S = EquationSystem((), (Generator(TermTemplate("g", IndexSpec(0, True), (t,)), t, 0),))
    with pytest.raises(UagError):
        entails_congruence(S, Equation(x, y))


def test_incremental_engine():
    cc = CongruenceClosure()
    cc.add_equation(Equation(x, y))
    assert cc.equal(app("m", x, x), app("m", y, x))
    assert not cc.equal(f(x), x)


def _algebras(size):
    rng = np.random.default_rng(size)
    for _ in range(4):
        yield make_algebra(UNARY_BINARY, size, {"f": rng.integers(0, size, size),
                                                 "g": rng.integers(0, size, size),
                                                 "m": rng.integers(0, size, (size, size))})


ALGEBRAS = [A for k in (1, 2, 3) for A in _algebras(k)]


@settings(max_examples=120, deadline=None)
@given(st.lists(equations(UNARY_BINARY, ("x", "y"), 3), min_size=1, max_size=3),
       equations(UNARY_BINARY, ("x", "y"), 3))
def test_soundness_over_small_algebras(S, q):
    if not entails_congruence(S, q):
        return
    for A in ALGEBRAS:
        for a, b in itertools.product(range(A.size), repeat=2):
            asg = {"x": a, "y": b}
            if all(evaluate(e.left, A, asg) == evaluate(e.right, A, asg) for e in S):
                assert evaluate(q.left, A, asg) == evaluate(q.right, A, asg)


@settings(max_examples=60, deadline=None)
@given(st.lists(equations(UNARY_BINARY, ("x", "y"), 3), min_size=1, max_size=3),
       st.lists(equations(UNARY_BINARY, ("x", "y"), 3), min_size=1, max_size=3))
def test_closure_laws(S, extra):
    # [S] contains S, adding consequences changes nothing, and [S] is monotone
    for e in S:
        assert entails_congruence(S, e)
    consequences = [q for q in extra if entails_congruence(S, q)]
    for q in extra + S:
        assert bool(entails_congruence(S + consequences, q)) == bool(entails_congruence(S, q))
        if entails_congruence(S, q):
            assert entails_congruence(S + extra, q)


def test_matches_rewriting_oracle_sample():
    inst = random_congruence_instances(60, seed=3)
    positives = 0
    for S, q in inst:
        got = bool(entails_congruence(S, q))
        ref = rewrite_entails(S, q, instance_depth(S, q) + 1)
        assert ref is not None and got == ref, ([str(e) for e in S], str(q))
        positives += got
    assert positives >= 10
