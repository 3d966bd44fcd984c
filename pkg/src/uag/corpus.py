"""Standard algebras and generated problem instances."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import FiniteAlgebra, make_algebra, trivial_algebra
from .dsl import Problem, parse_problem
from .errors import BoundExceeded
from .terms import (Equation, EquationSystem, Generator, IndexSpec, Signature, TermTemplate,
                    VariableSet, app, var)

BINARY = Signature((("m", 2),))
UNARY = Signature((("f", 1),))
UNARY_BINARY = Signature((("f", 1), ("g", 1), ("m", 2)))


def sl2() -> FiniteAlgebra:
    """The two-element meet semilattice, m = min."""
    return make_algebra(BINARY, 2, {"m": [[0, 0], [0, 1]]}, name="SL2")


def c3() -> FiniteAlgebra:
    """The cyclic unary algebra f(x) = x + 1 mod 3."""
    return make_algebra(UNARY, 3, {"f": [1, 2, 0]}, name="C3")


def trivial(signature: Signature = BINARY) -> FiniteAlgebra:
    return trivial_algebra(signature)


def two_element_binary(code: int) -> FiniteAlgebra:
    """Binary operation whose table is the bits of ``code`` (m(a,b) is bit 2a+b)."""
    if not 0 <= code < 16:
        raise ValueError("code must be in 0..15")
    table = [[(code >> (2 * a + b)) & 1 for b in range(2)] for a in range(2)]
    return make_algebra(BINARY, 2, {"m": table}, name=f"B2#{code}")


def two_element_binary_algebras() -> list[FiniteAlgebra]:
    return [two_element_binary(c) for c in range(16)]


def random_algebra(seed: int, size: int = 3, signature: Signature = BINARY,
                   max_gamma: int | None = 256, max_tries: int = 1000) -> FiniteAlgebra:
    """Uniform random tables; with ``max_gamma`` set, redraw until the algebra
    of binary term functions has at most that many elements."""
    from .geometry import term_functions

    rng = random.Random(seed)
    X = VariableSet(("x", "y"))
    for attempt in range(max_tries):
        tables = {s: np.array([rng.randrange(size) for _ in range(size ** a)]).reshape((size,) * a)
                  for s, a in signature.symbols}
        B = make_algebra(signature, size, tables, name=f"R{size}#{seed}.{attempt}")
        if max_gamma is None:
            return B
        try:
            term_functions(B, X, max_elements=max_gamma)
        except BoundExceeded:
            continue
        return B
    raise RuntimeError(f"no algebra with at most {max_gamma} binary term functions after {max_tries} tries")


def random_algebras(count: int = 5, size: int = 3, seed: int = 2024) -> list[FiniteAlgebra]:
    return [random_algebra(seed + i, size) for i in range(count)]


def mixed_algebras() -> list[FiniteAlgebra]:
    """Small algebras with two unary and one binary operation."""
    out = [trivial(UNARY_BINARY),
           make_algebra(UNARY_BINARY, 2, {"f": [1, 0], "g": [0, 0], "m": [[0, 1], [1, 0]]}, name="Z2+"),
           make_algebra(UNARY_BINARY, 3, {"f": [1, 2, 0], "g": [0, 0, 2],
                                          "m": [[0, 0, 0], [0, 1, 1], [0, 1, 2]]}, name="C3min")]
    out += [random_algebra(seed, 3, UNARY_BINARY, max_gamma=None) for seed in (31, 32, 33)]
    return out


def finite_corpus() -> list[FiniteAlgebra]:
    return ([sl2(), c3(), trivial()] + two_element_binary_algebras() + random_algebras()
            + mixed_algebras())


# -- generated systems over finite algebras --------------------------------------

FAMILY_SIG = Signature((), ("g",))
MIXED_SIG = Signature((("m", 2),), ("h",))


def _t(name: str, shift: int, arg: TermTemplate) -> TermTemplate:
    return TermTemplate(name, IndexSpec(shift, True), (arg,))


def _v(name: str) -> TermTemplate:
    return TermTemplate(name, None, (), True)


@dataclass(frozen=True)
class Instance:
    name: str
    algebra: FiniteAlgebra
    variables: VariableSet
    system: EquationSystem


def generated_instances() -> list[Instance]:
    """Systems with index generators over finite algebras, including ones
    whose solution set has at most one point."""
    from .gn import GnAlgebra

    out = []
    A3 = GnAlgebra().window(3)
    x, y = _v("x"), _v("y")
    X1, X2 = VariableSet(("x",)), VariableSet(("x", "y"))
    out.append(Instance("window3-fixed-from-1", A3, X2, EquationSystem((), (
        Generator(_t("g", 0, x), x, 1), Generator(_t("g", 0, y), y, 1)))))
    out.append(Instance("window3-shift", A3, X2, EquationSystem((), (
        Generator(_t("g", 0, x), _t("g", 1, y), 0),))))
    out.append(Instance("window3-range", A3, X1, EquationSystem((), (
        Generator(_t("g", 0, _t("g", 1, x)), x, 0, 2),))))
    # cases with at most one solution
    out.append(Instance("window3-all-fixed", A3, X1, EquationSystem((), (
        Generator(_t("g", 0, x), x, 0),))))
    out.append(Instance("window3-all-fixed-pair", A3, X2, EquationSystem((Equation(var("x"), var("y")),), (
        Generator(_t("g", 0, x), x, 0),))))
    H = make_algebra(MIXED_SIG, 3, {"m": [[0, 0, 0], [0, 1, 1], [0, 1, 2]]},
                     {"h": {0: [0, 0, 0], 1: [0, 1, 0], 3: [1, 0, 2]}}, name="H3")
    out.append(Instance("h3-fixed", H, X1, EquationSystem((), (Generator(_t("h", 0, x), x, 0),))))
    out.append(Instance("h3-fixed-pair", H, X2, EquationSystem(
        (Equation(app("m", var("x"), var("y")), var("y")),),
        (Generator(_t("h", 0, x), _t("h", 0, y), 1),))))
    out.append(Instance("h3-tail", H, X2, EquationSystem((), (
        Generator(_t("h", 1, x), _t("h", 0, y), 2),))))
    return out


# -- corpus files -------------------------------------------------------------------

def corpus_dir() -> Path:
    return Path(__file__).resolve().parents[2] / "corpus"


def load(path: str | Path) -> Problem:
    return parse_problem(Path(path).read_text(encoding="utf-8"))


def corpus_files(directory: str | Path | None = None) -> list[Path]:
    d = Path(directory) if directory is not None else corpus_dir()
    return sorted(d.glob("*.prob"))


def binary_points(size: int, n: int):
    return itertools.product(range(size), repeat=n)
