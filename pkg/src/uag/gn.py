"""The infinite unary algebra (N, g_n) with g_n swapping 2n and 2n+1.

Every term is a chain g_{n1}(g_{n2}(...g_{nk}(v))) on one variable. The g_n
commute and are involutions on disjoint pairs, so a chain acts as
a -> a xor [a // 2 in K] where K holds the indices used an odd number of
times. All solution sets below are computed from this normal form, never by
truncating the universe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import FiniteAlgebra
from .errors import OutsideFragment, UagError, ValidationError
from .terms import Equation, EquationSystem, Generator, Signature, Term, TermTemplate, app, var

FAMILY = "g"
SIGNATURE = Signature((), (FAMILY,))


def g(n: int, a: int) -> int:
    if a // 2 == n:
        return a ^ 1
    return a


def eval_chain(chain: Sequence[int], a: int) -> int:
    """Apply g_{chain[0]}(g_{chain[1]}(...(a))), innermost first."""
    for n in reversed(chain):
        a = g(n, a)
    return a


def parity_set(chain: Iterable[int]) -> frozenset[int]:
    odd: set[int] = set()
    for n in chain:
        odd ^= {n}
    return frozenset(odd)


def term_support(chain: Sequence[int]) -> frozenset[int]:
    """Least set outside of which the chain is the identity. Only points of
    the pairs {2n, 2n+1} can move, so those are the only candidates."""
    candidates = {a for n in chain for a in (2 * n, 2 * n + 1)}
    return frozenset(a for a in candidates if eval_chain(chain, a) != a)


def chain_of(t: Term) -> tuple[str, tuple[int, ...]]:
    """(variable, index chain) of a term in the all-unary family language."""
    chain: list[int] = []
    while not t.is_var:
        if t.name != FAMILY or t.index is None or len(t.args) != 1:
            raise OutsideFragment(f"{t} is not a chain term")
        chain.append(t.index)
        t = t.args[0]
    return t.name, tuple(chain)


def chain_term(variable: str, chain: Sequence[int]) -> Term:
    t = var(variable)
    for n in reversed(chain):
        t = app(FAMILY, t, index=n)
    return t


class GnAlgebra:
    """The algebra itself; elements are Python ints (arbitrary size)."""

    name = "example5"
    signature = SIGNATURE
    size = None

    def apply(self, name: str, index: int | None, args: Sequence[int]) -> int:
        if name != FAMILY or index is None or len(args) != 1:
            raise UagError(f"symbol {name!r} is not interpreted")
        if args[0] < 0:
            raise ValidationError("elements are natural numbers")
        return g(index, int(args[0]))

    def window(self, pairs: int) -> FiniteAlgebra:
        """The subalgebra on [0, 2*pairs): closed because each g_n maps the
        pair {2n, 2n+1} onto itself and fixes everything else."""
        if pairs < 1:
            raise ValidationError("a window needs at least one pair")
        size = 2 * pairs
        fams = {FAMILY: {n: [g(n, a) for a in range(size)] for n in range(pairs)}}
        return FiniteAlgebra(SIGNATURE, size, {}, fams, f"example5[0,{size})")

    def generated_subalgebra(self, seeds: Sequence[int], window: int | None = None):
        return GnPower(1).generated_subalgebra([(s,) for s in seeds], window)

    def __repr__(self) -> str:
        return "<example5 algebra (N, g_n)>"


@dataclass(frozen=True)
class GnPower:
    """A^k, used for subalgebras generated by finitely many tuples."""

    k: int

    def generated_subalgebra(self, seeds: Sequence[Sequence[int]], window: int | None = None):
        """Finite subalgebra generated by ``seeds`` and the sorted list of its tuples.

        Only g_n with n = c // 2 for some coordinate c can move a tuple, and
        each g_n keeps coordinates inside their pairs, so the closure under the
        finitely many relevant indices is the closure under all of them.
        """
        seeds = [tuple(int(c) for c in s) for s in seeds]
        if not seeds:
            raise ValidationError("seed set must be nonempty")
        for s in seeds:
            if len(s) != self.k:
                raise ValidationError(f"seed {s} has the wrong length")
            if window is not None and any(c >= 2 * window for c in s):
                raise UagError(f"closure escapes the window of {window} pairs at {s}")
        relevant = sorted({c // 2 for s in seeds for c in s})
        elems = set(seeds)
        frontier = list(seeds)
        while frontier:
            nxt = []
            for t in frontier:
                for n in relevant:
                    u = tuple(g(n, c) for c in t)
                    if u not in elems:
                        elems.add(u)
                        nxt.append(u)
            frontier = nxt
        tuples = sorted(elems)
        pos = {t: i for i, t in enumerate(tuples)}
        fams = {FAMILY: {n: [pos[tuple(g(n, c) for c in t)] for t in tuples] for n in relevant}}
        sub = FiniteAlgebra(SIGNATURE, len(tuples), {}, fams, f"<{','.join(map(str, seeds))}>")
        return sub, tuples


# -- symbolic solution sets ----------------------------------------------------

@dataclass(frozen=True)
class Set1:
    """Subset of N: ``members`` below ``threshold``, and everything at or
    above it iff ``tail``. The threshold is minimal."""

    members: tuple[int, ...]
    threshold: int
    tail: bool

    @classmethod
    def build(cls, below: Iterable[int], threshold: int, tail: bool) -> "Set1":
        ms = sorted(set(a for a in below if a < threshold))
        t = threshold
        if tail:
            while t > 0 and (t - 1) in ms:
                t -= 1
                ms.pop()
        else:
            t = ms[-1] + 1 if ms else 0
        return cls(tuple(ms), t, tail)

    @classmethod
    def everything(cls) -> "Set1":
        return cls((), 0, True)

    @classmethod
    def from_moved_pairs(cls, moved: Iterable[int], tail_moved: bool, threshold_pair: int) -> "Set1":
        """{a : pair a//2 is not moved}; pairs at or beyond ``threshold_pair``
        behave like ``tail_moved``."""
        moved = set(moved)
        top = 2 * threshold_pair
        below = [a for a in range(top) if a // 2 not in moved]
        return cls.build(below, top, not tail_moved)

    def __contains__(self, a: object) -> bool:
        assert isinstance(a, int)
        return self.tail if a >= self.threshold else a in self.members

    @property
    def finite(self) -> bool:
        return not self.tail

    def intersect(self, other: "Set1") -> "Set1":
        top = max(self.threshold, other.threshold)
        return Set1.build([a for a in range(top) if a in self and a in other], top, self.tail and other.tail)

    def describe(self) -> dict:
        return {"members_below": list(self.members), "threshold": self.threshold, "tail": self.tail}


@dataclass(frozen=True)
class Graph2:
    """Subset of N^2: explicit ``points`` plus, iff ``tail``, every (a, a) with
    a >= threshold. Points are disjoint from the tail; threshold is minimal."""

    points: tuple[tuple[int, int], ...]
    threshold: int
    tail: bool

    @classmethod
    def build(cls, points: Iterable[tuple[int, int]], threshold: int, tail: bool) -> "Graph2":
        pts = set(points)
        t = threshold
        if tail:
            pts = {p for p in pts if not (p[0] == p[1] and p[0] >= t)}
            while t > 0 and (t - 1, t - 1) in pts:
                t -= 1
                pts.discard((t, t))
        else:
            t = 0
        return cls(tuple(sorted(pts)), t, tail)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_lookup", frozenset(self.points))

    def __contains__(self, p: object) -> bool:
        a, b = p  # type: ignore[misc]
        if self.tail and a == b and a >= self.threshold:
            return True
        return (a, b) in self._lookup  # type: ignore[attr-defined]

    @property
    def finite(self) -> bool:
        return not self.tail

    @property
    def bound(self) -> int:
        top = max((max(p) for p in self.points), default=-1) + 1
        return max(top, self.threshold)

    def describe(self) -> dict:
        return {"points": [list(p) for p in self.points], "diagonal_tail": self.tail,
                "threshold": self.threshold}


@dataclass(frozen=True)
class Product2:
    """Sx x Sy for infinite products; finite products are stored as Graph2."""

    x: Set1
    y: Set1

    def __contains__(self, p: object) -> bool:
        a, b = p  # type: ignore[misc]
        return a in self.x and b in self.y

    @property
    def finite(self) -> bool:
        return False

    @property
    def bound(self) -> int:
        return max(self.x.threshold, self.y.threshold)

    def describe(self) -> dict:
        return {"product": [self.x.describe(), self.y.describe()]}


SymbolicSet = Set1 | Graph2 | Product2


def set_bound(s) -> int:
    if isinstance(s, Set1):
        return s.threshold
    return s.bound


def _product(x: Set1, y: Set1):
    if x.finite and y.finite:
        return Graph2.build([(a, b) for a in x.members for b in y.members], 0, False)
    if (x.finite and not x.members) or (y.finite and not y.members):
        return Graph2((), 0, False)
    return Product2(x, y)


# -- solving ----------------------------------------------------------------------

@dataclass(frozen=True)
class _Constraint:
    """One equation normalised: either a 1-variable condition on ``var0`` or
    a 2-variable graph b = a xor [a//2 in D] between ``var0`` and ``var1``.

    ``moved(k)`` reports whether pair k lies in D; beyond ``threshold``
    every pair behaves like pair ``threshold``.
    """

    var0: str
    var1: str | None
    moved: frozenset[int]
    threshold: int
    tail_moved: bool
    # for 2-variable generators some pairs admit no consistent image
    blocked: frozenset[int] = frozenset()
    tail_blocked: bool = False

    def status(self, k: int) -> str:
        if k >= self.threshold:
            if self.tail_blocked:
                return "blocked"
            return "moved" if self.tail_moved else "fixed"
        if k in self.blocked:
            return "blocked"
        return "moved" if k in self.moved else "fixed"


def _check_vars(names: Iterable[str], variables: Sequence[str]) -> None:
    for v in names:
        if v not in variables:
            raise ValidationError(f"undeclared variable {v!r}")


def _explicit_constraint(e: Equation, variables: Sequence[str]) -> _Constraint:
    v1, c1 = chain_of(e.left)
    v2, c2 = chain_of(e.right)
    _check_vars((v1, v2), variables)
    d = parity_set(c1) ^ parity_set(c2)
    top = max(d, default=-1) + 1
    if v1 == v2:
        return _Constraint(v1, None, d, top, False)
    a, b = sorted((v1, v2), key=variables.index)
    return _Constraint(a, b, d, top, False)


def _template_chain(t: TermTemplate) -> tuple[str, list]:
    specs = []
    while not t.is_var:
        if t.name != FAMILY or t.index is None or len(t.args) != 1:
            raise OutsideFragment(f"{t} is not a chain template")
        specs.append(t.index)
        t = t.args[0]
    return t.name, specs


def _generator_constraint(gen: Generator, variables: Sequence[str]) -> _Constraint:
    v1, s1 = _template_chain(gen.left)
    v2, s2 = _template_chain(gen.right)
    _check_vars((v1, v2), variables)
    specs = s1 + s2
    offs = [s.offset for s in specs if s.shifted]
    consts = [s.offset for s in specs if not s.shifted]
    max_c = max(consts, default=-1)
    lo, hi = gen.start, gen.stop
    if hi is None:
        top = 1 + max(max_c, lo + max(offs, default=0))
    else:
        top = 1 + max(max_c, hi + max(offs, default=0))

    def statuses(k: int) -> set[bool]:
        # whether pair k is moved, over every instance n that can matter for k
        cands = {k - o for o in offs}
        ns = [n for n in cands if gen.contains(n)]
        n = lo
        while n in cands:
            n += 1
        if gen.contains(n):
            ns.append(n)
        out = set()
        for n in ns:
            inst = gen.instance(n)
            _, c1 = chain_of(inst.left)
            _, c2 = chain_of(inst.right)
            out.add(k in (parity_set(c1) ^ parity_set(c2)))
        return out

    if v1 == v2:
        moved = frozenset(k for k in range(top) if True in statuses(k))
        return _Constraint(v1, None, moved, top, True in statuses(top))
    moved_set, blocked = set(), set()
    for k in range(top):
        st = statuses(k)
        if len(st) > 1:
            blocked.add(k)
        elif st == {True}:
            moved_set.add(k)
    tail = statuses(top)
    if tail == {True}:
        raise OutsideFragment(f"generator {gen} has no diagonal tail")
    a, b = sorted((v1, v2), key=variables.index)
    return _Constraint(a, b, frozenset(moved_set), top, False, frozenset(blocked), len(tail) > 1)


def solve_symbolic(system: EquationSystem, variables: Sequence[str]):
    """Exact solution set in A^n (n = 1 or 2) as a canonical symbolic set."""
    variables = list(variables)
    if not 1 <= len(variables) <= 2:
        raise OutsideFragment("the symbolic solver handles one or two variables")
    constraints = [_explicit_constraint(e, variables) for e in system.explicit]
    constraints += [_generator_constraint(gn, variables) for gn in system.generators]
    ones = {v: Set1.everything() for v in variables}
    graphs = []
    for c in constraints:
        if c.var1 is None:
            s = Set1.from_moved_pairs(c.moved, c.tail_moved, c.threshold)
            ones[c.var0] = ones[c.var0].intersect(s)
        else:
            graphs.append(c)
    if len(variables) == 1:
        return ones[variables[0]]
    sx, sy = ones[variables[0]], ones[variables[1]]
    if not graphs:
        return _product(sx, sy)
    top = max(max(c.threshold for c in graphs), sx.threshold, sy.threshold) + 1
    pts = []
    for a in range(2 * top):
        k = a // 2
        images = set()
        ok = True
        for c in graphs:
            st = c.status(k)
            if st == "blocked":
                ok = False
                break
            images.add(a ^ 1 if st == "moved" else a)
        if ok and len(images) == 1:
            b = images.pop()
            if a in sx and b in sy:
                pts.append((a, b))
    # beyond 2*top every graph is the diagonal; the 1-variable sets are uniform
    tail = sx.tail and sy.tail and not any(c.tail_blocked for c in graphs)
    return Graph2.build(pts, 2 * top, tail)


def contains(s, point: Sequence[int]) -> bool:
    if isinstance(s, Set1):
        return point[0] in s
    return tuple(point) in s


def probe_points(bound: int, n: int) -> list[tuple[int, ...]]:
    """Grid [0, bound) plus the representatives bound, bound+1 per coordinate.

    For sets whose irregularities all lie below ``bound`` every region of
    N^n (small, large-on-diagonal, large-off-diagonal) meets this grid.
    """
    axis = list(range(bound)) + [bound, bound + 1]
    return list(itertools.product(axis, repeat=n))


def covered(s, covers: Sequence, n: int) -> tuple[bool, tuple[int, ...] | None]:
    """Decide s subset-of union(covers); return an escaping point if not."""
    bound = max([set_bound(s)] + [set_bound(c) for c in covers]) + 1
    for p in probe_points(bound, n):
        if contains(s, p) and not any(contains(c, p) for c in covers):
            return False, p
    return True, None


# -- sentences -----------------------------------------------------------------------

def _sentence_bound(equations: Iterable[Equation]) -> int:
    top = 0
    for e in equations:
        for side in (e.left, e.right):
            _, ch = chain_of(side)
            top = max([top] + [2 * n + 2 for n in ch])
    return top


def holds_universal_gn(sentence) -> tuple[bool, tuple[int, ...] | None, dict]:
    """Decide forall x (and premises -> or conclusions) over A for chain
    equations on at most two variables, with a certificate."""
    eqs = list(sentence.premises) + list(sentence.conclusions)
    if not 1 <= len(sentence.variables) <= 2:
        raise OutsideFragment("at most two variables")
    for e in eqs:
        for side in (e.left, e.right):
            v, _ = chain_of(side)
            if v not in sentence.variables:
                raise ValidationError(f"undeclared variable {v!r}")
    bound = _sentence_bound(eqs)
    cert: dict = {"method": "support-grid", "bound": bound}
    fixed_point_form = not sentence.premises and len(sentence.variables) == 1 and all(
        chain_of(e.right) == (sentence.variables[0], ()) and len(chain_of(e.left)[1]) == 1
        for e in sentence.conclusions)
    if fixed_point_form:
        moved = [set(term_support(chain_of(e.left)[1])) for e in sentence.conclusions]
        common = set.intersection(*moved) if moved else None
        cert["moved_sets"] = [sorted(m) for m in moved]
        cert["common_moved"] = None if common is None else sorted(common)
    for p in probe_points(bound, len(sentence.variables)):
        asg = dict(zip(sentence.variables, p))

        def sat(e: Equation) -> bool:
            v1, c1 = chain_of(e.left)
            v2, c2 = chain_of(e.right)
            return eval_chain(c1, asg[v1]) == eval_chain(c2, asg[v2])

        if all(sat(e) for e in sentence.premises) and not any(sat(e) for e in sentence.conclusions):
            return False, p, cert
    return True, None, cert
