from __future__ import annotations

import itertools

import pytest

from oracles import gn_eval
from uag import gn
from uag.casestudy import (V_EXPECTED, covering_argument, example5_report, radical_probe,
                           subalgebra_probes)
from uag.terms import Equation


@pytest.fixture(scope="module")
def report():
    return example5_report(3, 20)


def test_all_checks_pass(report):
    assert report["passed"]
    assert sorted(report["checks"]) == list("abcdefg")
    for c in report["checks"].values():
        assert c["passed"], c["title"]


def test_solution_set_is_exact(report):
    a = report["checks"]["a"]
    assert a["solution_set"] == {"points": [[0, 0], [0, 1], [1, 0], [1, 1]], "diagonal_tail": False,
                                 "threshold": 0}


def test_covering_witnesses(report):
    b = report["checks"]["b"]
    assert b["contained_in_union"]
    assert b["witness_first"] in ([0, 1], [1, 0])
    assert b["witness_second"] in ([0, 0], [1, 1])


def test_discrepancy_recorded(report):
    e = report["checks"]["e"]
    assert e["cross_variable_members"] == 0
    assert e["displayed_but_not_in_radical"] > 0
    assert report["discrepancies"]


def test_depth_zero_still_passes_first_four():
    r = example5_report(0, 20)
    for k in "abcd":
        assert r["checks"][k]["passed"]
    assert r["checks"]["e"]["radical_members"] == 0


def _holds(e, p):
    asg = dict(zip("xy", p))
    return gn_eval(e.left, asg) == gn_eval(e.right, asg)


@pytest.mark.parametrize("M,depth", [(10, 2), (6, 3), (10, 3)])
def test_covering_argument_against_brute_force(M, depth):
    top = (M - 1) // 2
    chains = [c for k in range(depth + 1) for c in itertools.product(range(top + 1), repeat=k)]
    terms = [gn.chain_term(v, c) for v in "xy" for c in chains]
    members = [Equation(t, s) for t, s in itertools.combinations(terms, 2)
               if all(_holds(Equation(t, s), p) for p in V_EXPECTED)]
    grid = range(M + 6)
    brute = {p for p in itertools.product(grid, repeat=2) if all(_holds(e, p) for e in members)}
    r = covering_argument(M, depth, 20)
    U = set(r["pairs_cut_out"])
    symbolic = {p for p in itertools.product(grid, repeat=2)
                if all(a // 2 not in U for a in p)}
    assert brute == symbolic
    assert (M + 2, 0) in brute and r["escaping_point"] == [M + 2, 0]
    assert not r["covered"]


def test_escaping_point_arithmetic():
    for M in (10, 50, 200):
        assert M + 2 != 0 and M + 2 != gn.g(0, 0)


def test_subalgebra_probes():
    r = subalgebra_probes()
    assert r["passed"]
    assert r["seed_0_2"]["countermodel"] in ([0, 2], [0, 3], [1, 2], [1, 3])
    assert r["seed_0_1"]["embeds_into_A"]


def test_probe_examples_are_members():
    r = radical_probe(2)
    from uag.dsl import parse_equation
    from uag.terms import VariableSet
    for text in r["not_derivable_examples"]:
        e = parse_equation(text, gn.SIGNATURE, VariableSet(("x", "y")))
        assert all(_holds(e, p) for p in V_EXPECTED)
    for text in r["displayed_but_not_in_radical_examples"]:
        e = parse_equation(text, gn.SIGNATURE, VariableSet(("x", "y")))
        assert not all(_holds(e, p) for p in V_EXPECTED)
