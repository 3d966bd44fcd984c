from __future__ import annotations

import itertools
import random

import pytest

from oracles import gn_member
from uag import gn
from uag.corpus import corpus_files, load
from uag.errors import OutsideFragment
from uag.sentences import UniversalSentence
from uag.terms import Equation, EquationSystem, Generator, IndexSpec, TermTemplate, app, var

x, y = var("x"), var("y")
XY = ("x", "y")


def fixed_from(v: str, start: int, stop=None) -> Generator:
    t = TermTemplate(v, None, (), True)
    return Generator(TermTemplate("g", IndexSpec(0, True), (t,)), t, start, stop)


def test_evaluation_examples():
    assert gn.g(2, 5) == 4
    assert gn.eval_chain((1, 1), 3) == 3
    assert gn.eval_chain((1, 3), 7) == 6


def test_support_examples():
    assert gn.term_support((1,)) == {2, 3}
    assert gn.term_support((1, 3)) <= {2, 3, 6, 7}
    assert gn.term_support(()) == frozenset()
    for a in range(20):
        if a not in gn.term_support((1, 3)):
            assert gn.eval_chain((1, 3), a) == a


def test_chain_roundtrip():
    t = gn.chain_term("x", (1, 3))
    assert str(t) == "g[1](g[3](x))"
    assert gn.chain_of(t) == ("x", (1, 3))
    with pytest.raises(OutsideFragment):
        gn.chain_of(app("m", x, x))


def test_solve_examples():
    s = gn.solve_symbolic(EquationSystem((), (fixed_from("x", 1),)), ("x",))
    assert isinstance(s, gn.Set1) and s.members == (0, 1) and not s.tail
    s = gn.solve_symbolic(EquationSystem.of(Equation(gn.chain_term("x", (0,)), x)), ("x",))
    assert s.members == () and s.threshold == 2 and s.tail
    s = gn.solve_symbolic(EquationSystem((), (fixed_from("x", 1), fixed_from("y", 1))), XY)
    assert isinstance(s, gn.Graph2)
    assert s.points == ((0, 0), (0, 1), (1, 0), (1, 1)) and not s.tail


def test_sentence_examples():
    def fixed(n):
        return Equation(gn.chain_term("x", (n,)), x)
    ok, cm, cert = gn.holds_universal_gn(UniversalSentence(("x",), (), (fixed(1), fixed(2))))
    assert ok and cm is None and cert["common_moved"] == []
    ok, cm, _ = gn.holds_universal_gn(UniversalSentence(("x",), (), (fixed(1),)))
    assert not ok and cm == (2,)
    ok, cm, _ = gn.holds_universal_gn(UniversalSentence(("x",), (), (fixed(0), fixed(0))))
    assert not ok and cm == (0,)


def test_involution():
    for n in range(51):
        for a in range(201):
            assert gn.eval_chain((n, n), a) == a


def test_disjoint_supports():
    for n, m in itertools.combinations(range(40), 2):
        assert not gn.term_support((n,)) & gn.term_support((m,))


# -- exactness against brute force ----------------------------------------------------

def _random_template(rng, v, shifted):
    t = TermTemplate(v, None, (), True)
    for _ in range(rng.randint(0, 2)):
        if shifted and rng.random() < 0.7:
            spec = IndexSpec(rng.randint(0, 2), True)
        else:
            spec = IndexSpec(rng.randint(0, 3), False)
        t = TermTemplate("g", spec, (t,))
    return t


def random_system(rng, names):
    explicit = []
    for _ in range(rng.randint(0, 2)):
        l = gn.chain_term(rng.choice(names), [rng.randint(0, 3) for _ in range(rng.randint(0, 2))])
        r = gn.chain_term(rng.choice(names), [rng.randint(0, 3) for _ in range(rng.randint(0, 2))])
        explicit.append(Equation(l, r))
    gens = []
    for _ in range(rng.randint(0, 2)):
        for _ in range(20):
            L = _random_template(rng, rng.choice(names), True)
            R = _random_template(rng, rng.choice(names), True)
            start = rng.randint(0, 3)
            stop = None if rng.random() < 0.6 else start + rng.randint(0, 3)
            gen = Generator(L, R, start, stop)
            if gen.offsets:
                gens.append(gen)
                break
    return EquationSystem(tuple(explicit), tuple(gens))


def _systems():
    rng = random.Random(17)
    out = []
    for path in corpus_files():
        p = load(path)
        if isinstance(p.algebra, gn.GnAlgebra):
            out.append((p.system, p.variables.names))
    out.append((EquationSystem((), (fixed_from("x", 0, 3),)), ("x",)))
    for _ in range(250):
        names = XY if rng.random() < 0.6 else ("x",)
        out.append((random_system(rng, names), names))
    return out


SYSTEMS = _systems()


def test_exactness_against_brute_force():
    for S, names in SYSTEMS:
        s = gn.solve_symbolic(S, names)
        hi = gn.set_bound(s) + 5
        for p in itertools.product(range(hi + 1), repeat=len(names)):
            assert gn.contains(s, p) == gn_member(S, names, p), (str(list(S.explicit)), S.generators, p)


def test_tail_points():
    for S, names in SYSTEMS:
        s = gn.solve_symbolic(S, names)
        if isinstance(s, gn.Set1):
            for a in (s.threshold, s.threshold + 1, s.threshold + 7):
                assert (a in s) == s.tail == gn_member(S, names, (a,))
        elif isinstance(s, gn.Graph2):
            t = s.threshold if s.tail else s.bound
            for a in (t, t + 1, t + 7):
                assert ((a, a) in s) == s.tail == gn_member(S, names, (a, a))
        else:
            for t in (s.x.threshold, s.y.threshold):
                for a in (t, t + 1, t + 7):
                    assert gn.contains(s, (a, a)) == gn_member(S, names, (a, a))


def test_canonical_form_is_order_independent():
    rng = random.Random(3)
    for S, names in SYSTEMS:
        expl, gens = list(S.explicit), list(S.generators)
        rng.shuffle(expl)
        rng.shuffle(gens)
        assert gn.solve_symbolic(EquationSystem(tuple(expl), tuple(gens)), names) == gn.solve_symbolic(S, names)


def test_sentences_match_window_brute_force():
    rng = random.Random(8)
    for _ in range(150):
        names = ("x",) if rng.random() < 0.5 else XY

        def eq():
            return Equation(gn.chain_term(rng.choice(names), [rng.randint(0, 3) for _ in range(rng.randint(0, 2))]),
                            gn.chain_term(rng.choice(names), [rng.randint(0, 3) for _ in range(rng.randint(0, 2))]))
        s = UniversalSentence(names, tuple(eq() for _ in range(rng.randint(0, 2))),
                              tuple(eq() for _ in range(rng.randint(0, 2))))
        ok, cm, _ = gn.holds_universal_gn(s)
        brute = None
        for p in itertools.product(range(14), repeat=len(names)):
            asg = dict(zip(names, p))
            sat = lambda e: gn.eval_chain(gn.chain_of(e.left)[1], asg[gn.chain_of(e.left)[0]]) == \
                gn.eval_chain(gn.chain_of(e.right)[1], asg[gn.chain_of(e.right)[0]])
            if all(map(sat, s.premises)) and not any(map(sat, s.conclusions)):
                brute = p
                break
        assert ok == (brute is None), str(s)
        if not ok:
            assert cm == brute


def test_covered_returns_escaping_point():
    s = gn.solve_symbolic(EquationSystem((), (fixed_from("x", 1), fixed_from("y", 1))), XY)
    diag = gn.solve_symbolic(EquationSystem.of(Equation(x, y)), XY)
    ok, p = gn.covered(s, [diag], 2)
    assert not ok and p in s and p not in diag
