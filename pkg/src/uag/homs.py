"""Homomorphism search between finite algebras.

The search fixes a generating set of the source (hinted generators first,
then the smallest missing element), assigns images to generators in order
and propagates each assignment through the subalgebra it generates. Consistency is checked on
every operation tuple that touches a newly mapped element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .algebra import FiniteAlgebra, check_same_signature
from .errors import BoundExceeded

DEFAULT_MAX_STATES = 10**7


@dataclass(frozen=True, eq=False)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.map[a]

    @property
    def injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    def check(self) -> bool:
        """Exhaustive commutation test over every operation table."""
        if len(self.map) != self.source.size:
            return False
        h = np.array(self.map, dtype=np.int64)
        if h.size and (h.min() < 0 or h.max() >= self.target.size):
            return False
        for name, index, arity in self.source.operations(self.target):
            s = self.source.full_table(name, index)
            t = self.target.full_table(name, index)
            if arity == 0:
                if h[int(s)] != int(t):
                    return False
                continue
            grids = np.meshgrid(*([np.arange(self.source.size)] * arity), indexing="ij")
            if not np.array_equal(h[s], t[tuple(h[g] for g in grids)]):
                return False
        return True

    def __repr__(self) -> str:
        return f"Homomorphism({list(self.map)})"


@dataclass(frozen=True)
class _Plan:
    generators: tuple[int, ...]
    # levels[i] lists the elements first generated once generators[:i] are fixed,
    # in discovery order; parents give (op position, argument elements)
    levels: tuple[tuple[int, ...], ...]
    parents: Mapping[int, tuple[int, tuple[int, ...]]]


def _plan(C: FiniteAlgebra, ops: list) -> _Plan:
    tables = [C.full_table(n, k) for n, k, _ in ops]
    mapped: list[int] = []
    seen = np.zeros(C.size, dtype=bool)
    parents: dict[int, tuple[int, tuple[int, ...]]] = {}

    def grow(frontier: list[int]) -> list[int]:
        found = list(frontier)
        new = list(frontier)
        while new:
            nxt: list[int] = []
            pool = np.array(mapped + found, dtype=np.int64)
            isnew = np.zeros(C.size, dtype=bool)
            isnew[new] = True
            for oi, (name, index, arity) in enumerate(ops):
                if arity == 0:
                    continue
                idx = np.indices((len(pool),) * arity).reshape(arity, -1)
                args = pool[idx]
                touch = isnew[args].any(axis=0)
                args = args[:, touch]
                res = tables[oi][tuple(args)]
                vals, first = np.unique(res, return_index=True)
                for j in np.argsort(first, kind="stable"):
                    r = int(vals[j])
                    if not seen[r]:
                        seen[r] = True
                        parents[r] = (oi, tuple(int(a) for a in args[:, first[j]]))
                        nxt.append(r)
            found.extend(nxt)
            new = nxt
        return found

    levels: list[tuple[int, ...]] = []
    start: list[int] = []
    for oi, (name, index, arity) in enumerate(ops):
        if arity == 0:
            c = int(tables[oi])
            if not seen[c]:
                seen[c] = True
                parents[c] = (oi, ())
                start.append(c)
    level0 = grow(start)
    mapped.extend(level0)
    levels.append(tuple(level0))
    order = list(C.generators) + list(range(C.size))
    gens: list[int] = []
    for g in order:
        if seen.all():
            break
        if seen[g]:
            continue
        gens.append(g)
        seen[g] = True
        lev = grow([g])
        mapped.extend(lev)
        levels.append(tuple(lev))
    return _Plan(tuple(gens), tuple(levels), parents)


def enumerate_homomorphisms(C: FiniteAlgebra, B: FiniteAlgebra,
                            must_differ: Sequence[tuple[int, int]] = (),
                            forced: Mapping[int, int] | None = None,
                            injective: bool = False,
                            max_states: int = DEFAULT_MAX_STATES) -> Iterator[Homomorphism]:
    """All homomorphisms C -> B meeting the constraints, in lexicographic
    order of generator images."""
    check_same_signature(C, B)
    forced = dict(forced or {})
    if any(a == b for a, b in must_differ):
        return
    if injective and C.size > B.size:
        return
    ops = C.operations(B)
    plan = _plan(C, ops)
    ctab = [C.full_table(n, k) for n, k, _ in ops]
    btab = [B.full_table(n, k) for n, k, _ in ops]
    h = np.full(C.size, -1, dtype=np.int64)
    states = 0

    def extend(level: tuple[int, ...]) -> bool:
        for e in level:
            if h[e] >= 0:
                continue
            oi, args = plan.parents[e]
            h[e] = int(btab[oi]) if not args else int(btab[oi][tuple(h[a] for a in args)])
        return consistent(level)

    def consistent(level: tuple[int, ...]) -> bool:
        if not level:
            return True
        lev = np.array(level, dtype=np.int64)
        for e, v in forced.items():
            if h[e] >= 0 and h[e] != v:
                return False
        for a, b in must_differ:
            if h[a] >= 0 and h[b] >= 0 and h[a] == h[b]:
                return False
        dom = np.flatnonzero(h >= 0)
        if injective and len(np.unique(h[dom])) != len(dom):
            return False
        isnew = np.zeros(C.size, dtype=bool)
        isnew[lev] = True
        for oi, (name, index, arity) in enumerate(ops):
            if arity == 0:
                if h[int(ctab[oi])] != int(btab[oi]):
                    return False
                continue
            grid = np.ix_(*([dom] * arity))
            touch = np.zeros((len(dom),) * arity, dtype=bool)
            for ax in range(arity):
                shape = [1] * arity
                shape[ax] = len(dom)
                touch = touch | isnew[dom].reshape(shape)
            lhs = h[ctab[oi][grid]]
            rhs = btab[oi][tuple(h[dom].reshape([len(dom) if i == ax else 1 for i in range(arity)])
                                 for ax in range(arity))]
            if np.any((lhs != rhs) & touch):
                return False
        return True

    if not extend(plan.levels[0]):
        return

    def search(i: int) -> Iterator[Homomorphism]:
        nonlocal states
        if i == len(plan.generators):
            yield Homomorphism(C, B, tuple(int(v) for v in h))
            return
        g = plan.generators[i]
        level = plan.levels[i + 1]
        choices = [forced[g]] if g in forced else range(B.size)
        for v in choices:
            states += 1
            if states > max_states:
                raise BoundExceeded(f"homomorphism search exceeded {max_states} states")
            h[g] = v
            if extend(level):
                yield from search(i + 1)
            h[list(level)] = -1
            h[g] = -1
        return

    yield from search(0)


def first_homomorphism(C: FiniteAlgebra, B: FiniteAlgebra, **kwargs) -> Homomorphism | None:
    return next(enumerate_homomorphisms(C, B, **kwargs), None)


def find_embedding(C: FiniteAlgebra, B: FiniteAlgebra,
                   max_states: int = DEFAULT_MAX_STATES) -> Homomorphism | None:
    check_same_signature(C, B)
    if C.size > B.size:
        return None
    return first_homomorphism(C, B, injective=True, max_states=max_states)


@dataclass(frozen=True)
class Separation:
    separated: bool
    witnesses: Mapping[tuple[int, int], Homomorphism]
    failing_pair: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.separated


def is_separated(C: FiniteAlgebra, B: FiniteAlgebra, max_states: int = DEFAULT_MAX_STATES) -> Separation:
    """Every pair of distinct elements of C is split by some homomorphism to B.
    The one-element algebra is separated by any B."""
    check_same_signature(C, B)
    found: list[Homomorphism] = []
    witnesses: dict[tuple[int, int], Homomorphism] = {}
    for a in range(C.size):
        for b in range(a + 1, C.size):
            w = next((f for f in found if f.map[a] != f.map[b]), None)
            if w is None:
                w = first_homomorphism(C, B, must_differ=[(a, b)], max_states=max_states)
                if w is None:
                    return Separation(False, witnesses, (a, b))
                found.append(w)
            witnesses[(a, b)] = w
    return Separation(True, witnesses)


@dataclass(frozen=True)
class Discrimination:
    discriminated: bool
    embedding: Homomorphism | None = None
    trivial_element: int | None = None

    def __bool__(self) -> bool:
        return self.discriminated


def is_discriminated_finite(C: FiniteAlgebra, B: FiniteAlgebra,
                            max_states: int = DEFAULT_MAX_STATES) -> Discrimination:
    """For finite C discrimination is the same as embeddability (take W = C).
    The one-element algebra is discriminated iff B has a trivial subalgebra."""
    from .algebra import has_trivial_subalgebra

    check_same_signature(C, B)
    if C.size == 1:
        b = has_trivial_subalgebra(B)
        return Discrimination(b is not None, None, b)
    emb = find_embedding(C, B, max_states)
    return Discrimination(emb is not None, emb)
