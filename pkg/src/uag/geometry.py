"""Algebraic sets over a finite algebra: solving, radicals, Zariski closure,
coordinate algebras, irreducibility and decomposition.

Facts used throughout (B finite, Y a subset of B^n):

* Term functions on Y are the closure of the projection tuples under the
  pointwise operations; two terms are equal in Gamma(Y) iff their tuples agree,
  which is exactly the radical congruence.
* q is in cl(P) = V(Rad(P)) iff every pair of term functions agreeing on P
  also agrees at q. Computing the term functions on all of B^n once answers
  this for every P and q.
* cl is a closure operator on a finite set, so an algebraic set is irreducible
  iff it is the closure of one of its points (a generic point): if Y is not a
  point closure, Y is the finite union of the proper sets cl({p}), p in Y.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, has_trivial_subalgebra
from .errors import BoundExceeded, ConsistencyError, NotAlgebraic, UagError, UncertifiedTruncation
from .homs import DEFAULT_MAX_STATES, Homomorphism, is_discriminated_finite
from .sentences import DEFAULT_MAX_ASSIGNMENTS, assignment_grid
from .terms import (Equation, EquationSystem, Term, VariableSet, app, enumerate_terms, evaluate_many,
                    var)

DEFAULT_MAX_ELEMENTS = 1 << 12
Point = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class AlgebraicSet:
    """A subset of B^n given by its sorted list of points. ``system`` records
    the defining system when built by ``solve``."""

    algebra: FiniteAlgebra
    variables: VariableSet
    points: tuple[Point, ...]
    system: EquationSystem | None = None
    approximate: bool = False

    def __post_init__(self) -> None:
        pts = sorted(set(tuple(int(c) for c in p) for p in self.points))
        n = len(self.variables)
        for p in pts:
            if len(p) != n or any(not 0 <= c < self.algebra.size for c in p):
                raise UagError(f"point {p} does not lie in B^{n}")
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "_lookup", frozenset(pts))

    def __contains__(self, p: object) -> bool:
        return tuple(p) in self._lookup  # type: ignore[attr-defined, arg-type]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraicSet):
            return NotImplemented
        return self.points == other.points and self.variables == other.variables

    def __hash__(self) -> int:
        return hash(self.points)

    def issubset(self, other: "AlgebraicSet") -> bool:
        return self._lookup <= other._lookup  # type: ignore[attr-defined]

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(len(self.points), len(self.variables))

    def with_points(self, points: Iterable[Point]) -> "AlgebraicSet":
        return AlgebraicSet(self.algebra, self.variables, tuple(points))


def point_set(algebra: FiniteAlgebra, variables: VariableSet, points: Iterable[Point]) -> AlgebraicSet:
    return AlgebraicSet(algebra, variables, tuple(points))


def exact_truncation(system: EquationSystem, algebra: FiniteAlgebra) -> list[tuple[tuple, Equation]]:
    """Labelled equations whose solution set equals that of the whole system.

    Over a finite algebra whose families act as the identity outside finitely
    many indices, instances beyond ``truncation_index`` repeat an earlier
    instance semantically, so stopping there is exact.
    """
    if not hasattr(algebra, "truncation_index"):
        raise UncertifiedTruncation("no exactness certificate for this algebra")
    out = [(("explicit", i), e) for i, e in enumerate(system.explicit)]
    bounds = [algebra.truncation_index(g) for g in system.generators]
    for label, e in system.labeled():
        if label[0] != "generator":
            continue
        _, gi, n = label
        if n <= bounds[gi]:
            out.append((label, e))
        elif all(n > b for b in bounds):
            break
    return out


def _columns(variables: VariableSet, grid: np.ndarray) -> dict[str, np.ndarray]:
    return {v: grid[i] for i, v in enumerate(variables.names)}


def solve(system: EquationSystem, algebra: FiniteAlgebra, variables: VariableSet,
          max_states: int = DEFAULT_MAX_ASSIGNMENTS) -> AlgebraicSet:
    """V_B(S) by filtering the assignments equation by equation."""
    system.check(algebra.signature, variables)
    equations = [e for _, e in exact_truncation(system, algebra)]
    grid = assignment_grid(algebra.size, len(variables), max_states)
    alive = np.arange(grid.shape[1])
    for e in equations:
        if len(alive) == 0:
            break
        cols = _columns(variables, grid[:, alive])
        memo: dict = {}
        ok = evaluate_many(e.left, algebra, cols, memo) == evaluate_many(e.right, algebra, cols, memo)
        alive = alive[ok]
    return AlgebraicSet(algebra, variables, tuple(map(tuple, grid[:, alive].T)), system)


def equation_holds(Y: AlgebraicSet, e: Equation) -> np.ndarray:
    """Per-point truth of ``e`` on Y."""
    if len(Y) == 0:
        return np.zeros(0, dtype=bool)
    cols = _columns(Y.variables, Y.array().T)
    memo: dict = {}
    return evaluate_many(e.left, Y.algebra, cols, memo) == evaluate_many(e.right, Y.algebra, cols, memo)


def in_radical(Y: AlgebraicSet, q: Equation) -> bool:
    """q in Rad(Y); Rad of the empty set is every equation."""
    return bool(np.all(equation_holds(Y, q)))


# -- term functions ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoordinateAlgebra:
    """Gamma(Y) realised as term functions Y -> B.

    ``tuples[i]`` is element i evaluated at Y's points (sorted rows), ``terms[i]``
    a minimal-depth representative, ``generators[j]`` the element of variable j.
    ``parents[i]`` is how element i was first produced: ("var", j),
    ("const", name) or (name, index, argument elements).
    """

    base: AlgebraicSet
    algebra: FiniteAlgebra
    tuples: np.ndarray
    terms: tuple[Term, ...]
    generators: tuple[int, ...]
    parents: tuple[tuple, ...]

    @property
    def size(self) -> int:
        return self.algebra.size

    def element_of(self, t: Term) -> int:
        """The element a term denotes (evaluation at Y's points)."""
        Y = self.base
        if len(Y) == 0:
            return 0
        cols = _columns(Y.variables, Y.array().T)
        vec = evaluate_many(t, Y.algebra, cols)
        hits = np.flatnonzero(np.all(self.tuples == vec, axis=1))
        if len(hits) != 1:
            raise ConsistencyError(f"term {t} has no unique element in the coordinate algebra")
        return int(hits[0])


def _encode(rows: np.ndarray, base: int) -> np.ndarray | None:
    m = rows.shape[1]
    if m == 0:
        return np.zeros(rows.shape[0], dtype=np.int64)
    if base**m >= 2**62:
        return None
    weights = base ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return rows @ weights


class _RowIndex:
    """Hashable keys for rows of a small-integer matrix."""

    def __init__(self, base: int) -> None:
        self.base = base

    def keys(self, rows: np.ndarray) -> list:
        enc = _encode(rows, self.base)
        if enc is not None:
            return enc.tolist()
        return [r.tobytes() for r in rows]


_CHUNK = 1 << 19


def _combos(total: int, arity: int):
    """All argument tuples over range(total), lexicographic, in chunks."""
    count = total**arity
    for start in range(0, count, _CHUNK):
        flat = np.arange(start, min(count, start + _CHUNK), dtype=np.int64)
        yield np.array(np.unravel_index(flat, (total,) * arity), dtype=np.int64).reshape(arity, -1)


def coordinate_algebra(Y: AlgebraicSet, max_elements: int = DEFAULT_MAX_ELEMENTS) -> CoordinateAlgebra:
    """Close the projection tuples under pointwise operations, round by round.

    An element first met in round d gets a representative of depth d. Elements
    are finally sorted lexicographically by tuple.
    """
    B = Y.algebra
    sig = B.signature
    n = len(Y.variables)
    ops = B.operations()
    if len(Y) == 0:
        if not n and not sig.constants:
            raise UagError("no variables and no constants: the term algebra is empty")
        t0 = var(Y.variables.names[0]) if n else app(sig.constants[0])
        tables = {name: np.zeros((1,) * a, dtype=np.int64) for name, a in sig.symbols}
        E = FiniteAlgebra(sig, 1, tables, {}, "Gamma(empty)")
        return CoordinateAlgebra(Y, E, np.zeros((1, 0), dtype=np.int64), (t0,), (0,) * n,
                                 (("var", 0),) if n else (("const", sig.constants[0]),))
    pts = Y.array()
    m = len(Y)
    index = _RowIndex(B.size)
    rows: list[np.ndarray] = []
    terms: list[Term] = []
    parents: list[tuple] = []
    seen: dict = {}

    def admit(cands: np.ndarray, make_term, make_parent) -> list[int]:
        added = []
        keys = index.keys(cands)
        enc = _encode(cands, B.size)
        if enc is not None:
            _, first = np.unique(enc, return_index=True)
            positions = np.sort(first).tolist()
        else:
            positions = range(len(keys))
        for i in positions:
            key = keys[i]
            if key in seen:
                continue
            if len(rows) >= max_elements:
                raise BoundExceeded(f"coordinate algebra has more than {max_elements} elements")
            seen[key] = len(rows)
            rows.append(cands[i])
            terms.append(make_term(i))
            parents.append(make_parent(i))
            added.append(len(rows) - 1)
        return added

    gens = []
    for j, v in enumerate(Y.variables.names):
        key = index.keys(pts[:, j:j + 1].T)[0]
        if key not in seen:
            admit(pts[:, j:j + 1].T, lambda i, v=v: var(v), lambda i, j=j: ("var", j))
        gens.append(seen[key])
    frontier = list(range(len(rows)))
    for name, idx, arity in ops:
        if arity == 0:
            c = np.full((1, m), int(B.tables[name]), dtype=np.int64)
            frontier += admit(c, lambda i, name=name: app(name), lambda i, name=name: ("const", name))
    while frontier:
        mat = np.array(rows, dtype=np.int64)
        total = len(rows)
        isnew = np.zeros(total, dtype=bool)
        isnew[frontier] = True
        new: list[int] = []
        for name, idx, arity in ops:
            if arity == 0:
                continue
            table = B.full_table(name, idx)
            for combos in _combos(total, arity):
                combos = combos[:, isnew[combos].any(axis=0)]
                if combos.shape[1] == 0:
                    continue
                vals = table[tuple(mat[c] for c in combos)]

                def mk_term(i, combos=combos, name=name, idx=idx):
                    return Term(name, idx, tuple(terms[int(a)] for a in combos[:, i]), False)

                def mk_parent(i, combos=combos, name=name, idx=idx):
                    return (name, idx, tuple(int(a) for a in combos[:, i]))

                new += admit(vals, mk_term, mk_parent)
        frontier = new
    # sort elements lexicographically by tuple
    mat = np.array(rows, dtype=np.int64)
    order = np.lexsort(mat.T[::-1])
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    mat = mat[order]
    terms = [terms[i] for i in order]
    parents = [_renumber(parents[i], rank) for i in order]
    gens = [int(rank[g]) for g in gens]
    gamma = replace(_tables_from_rows(B, mat, ops), generators=tuple(dict.fromkeys(gens)))
    return CoordinateAlgebra(Y, gamma, mat, tuple(terms), tuple(gens), tuple(parents))


def _renumber(parent: tuple, rank: np.ndarray) -> tuple:
    if parent[0] in ("var", "const"):
        return parent
    name, idx, args = parent
    return (name, idx, tuple(int(rank[a]) for a in args))


def _tables_from_rows(B: FiniteAlgebra, mat: np.ndarray, ops) -> FiniteAlgebra:
    N, m = mat.shape
    enc = _encode(mat, B.size)
    if enc is not None:
        order = np.argsort(enc)
        sorted_enc = enc[order]

        def lookup(vals: np.ndarray) -> np.ndarray:
            e = _encode(vals, B.size)
            pos = np.searchsorted(sorted_enc, e)
            return order[pos]
    else:
        where = {r.tobytes(): i for i, r in enumerate(mat)}

        def lookup(vals: np.ndarray) -> np.ndarray:
            return np.array([where[r.tobytes()] for r in vals], dtype=np.int64)

    tables: dict[str, np.ndarray] = {}
    fams: dict[str, dict[int, np.ndarray]] = {f: {} for f in B.signature.families}
    for name, idx, arity in ops:
        table = B.full_table(name, idx)
        if arity == 0:
            res = lookup(np.full((1, m), int(table), dtype=np.int64))[0]
        else:
            parts = [lookup(table[tuple(mat[c] for c in combos)]) for combos in _combos(N, arity)]
            res = np.concatenate(parts).reshape((N,) * arity)
        if idx is None:
            tables[name] = res
        else:
            fams[name][idx] = res
    return FiniteAlgebra(B.signature, N, tables, fams, "Gamma")


_FREE_CACHE: dict[tuple[str, int], CoordinateAlgebra] = {}


def term_functions(algebra: FiniteAlgebra, variables: VariableSet,
                   max_elements: int = DEFAULT_MAX_ELEMENTS) -> CoordinateAlgebra:
    """Gamma(B^n): all n-ary term functions of B (cached)."""
    key = (algebra.fingerprint(), len(variables))
    hit = _FREE_CACHE.get(key)
    if hit is not None and hit.base.variables == variables:
        return hit
    grid = assignment_grid(algebra.size, len(variables))
    full = AlgebraicSet(algebra, variables, tuple(map(tuple, grid.T)))
    ca = coordinate_algebra(full, max_elements)
    _FREE_CACHE[key] = ca
    return ca


def _point_index(algebra: FiniteAlgebra, n: int, points: Iterable[Point]) -> list[int]:
    out = []
    for p in points:
        code = 0
        for c in p:
            code = code * algebra.size + c
        out.append(code)
    return out


def zariski_closure(P: Iterable[Point], algebra: FiniteAlgebra, variables: VariableSet,
                    max_elements: int = DEFAULT_MAX_ELEMENTS) -> AlgebraicSet:
    """cl(P) = V(Rad(P)): the points q at which all term functions that agree
    on P still agree. For P empty this is V(At), the diagonal points (b,..,b)
    with b generating a trivial subalgebra."""
    free = term_functions(algebra, variables, max_elements)
    F = free.tuples  # elements x all points of B^n, lexicographic columns
    cols = _point_index(algebra, len(variables), P)
    if cols:
        _, group = np.unique(F[:, sorted(set(cols))], axis=0, return_inverse=True)
        group = group.reshape(-1)
    else:
        group = np.zeros(F.shape[0], dtype=np.int64)
    order = np.argsort(group, kind="stable")
    g_sorted = group[order]
    starts = np.flatnonzero(np.r_[True, g_sorted[1:] != g_sorted[:-1]])
    Fs = F[order]
    lo = np.minimum.reduceat(Fs, starts, axis=0)
    hi = np.maximum.reduceat(Fs, starts, axis=0)
    good = np.all(lo == hi, axis=0)
    grid = assignment_grid(algebra.size, len(variables))
    pts = tuple(map(tuple, grid[:, good].T))
    return AlgebraicSet(algebra, variables, pts)


def closure_of(Y: AlgebraicSet) -> AlgebraicSet:
    return zariski_closure(Y.points, Y.algebra, Y.variables)


def is_algebraic(Y: AlgebraicSet) -> bool:
    return closure_of(Y) == Y


def algebraic_sets(algebra: FiniteAlgebra, variables: VariableSet) -> list[AlgebraicSet]:
    """Every algebraic subset of B^n, reached from cl(empty) by adding points."""
    start = zariski_closure((), algebra, variables)
    grid = assignment_grid(algebra.size, len(variables))
    everything = [tuple(int(c) for c in col) for col in grid.T]
    found = {start.points: start}
    queue = [start]
    while queue:
        C = queue.pop()
        for q in everything:
            if q in C:
                continue
            D = zariski_closure(C.points + (q,), algebra, variables)
            if D.points not in found:
                found[D.points] = D
                queue.append(D)
    return sorted(found.values(), key=lambda s: (len(s), s.points))


# -- radical windows ----------------------------------------------------------------

def radical_up_to_depth(Y: AlgebraicSet, depth: int, max_terms: int = 20000,
                        include_trivial: bool = True) -> list[Equation]:
    """Every equation with both sides of depth <= ``depth`` in Rad(Y).

    Terms are grouped by their term function on Y; each group contributes all
    of its pairs. Family symbols range over the algebra's exceptional indices.
    """
    B = Y.algebra
    fam_idx = {f: B.exceptional(f) for f in B.signature.families}
    terms = list(enumerate_terms(B.signature, Y.variables, depth, fam_idx, max_terms))
    if len(Y) == 0:
        keys = [0] * len(terms)
    else:
        cols = _columns(Y.variables, Y.array().T)
        memo: dict = {}
        keys = [evaluate_many(t, B, cols, memo).tobytes() for t in terms]
    groups: dict = {}
    for t, k in zip(terms, keys):
        groups.setdefault(k, []).append(t)
    out: list[Equation] = []
    for members in groups.values():
        for i, t in enumerate(members):
            for s in members[i if include_trivial else i + 1:]:
                out.append(Equation(t, s))
    out.sort(key=lambda e: e.key)
    return out


# -- irreducibility ------------------------------------------------------------------

@dataclass(frozen=True)
class Irreducibility:
    irreducible: bool
    method: str
    generic_point: Point | None = None
    embedding: Homomorphism | None = None
    trivial_element: int | None = None
    point_closure: bool | None = None
    by_embedding: bool | None = None

    def __bool__(self) -> bool:
        return self.irreducible


def _require_algebraic(Y: AlgebraicSet) -> None:
    if not is_algebraic(Y):
        raise NotAlgebraic("the point set is not Zariski-closed")


def generic_point(Y: AlgebraicSet) -> Point | None:
    """Lexicographically least p in Y with cl({p}) = Y."""
    for p in Y.points:
        if zariski_closure([p], Y.algebra, Y.variables) == Y:
            return p
    return None


def is_irreducible(Y: AlgebraicSet, method: str = "both",
                   max_states: int = DEFAULT_MAX_STATES) -> Irreducibility:
    if method not in ("point-closure", "embedding", "both"):
        raise UagError(f"unknown method {method!r}")
    _require_algebraic(Y)
    pc = emb = None
    gp = None
    witness = None
    trivial = None
    if method in ("point-closure", "both"):
        gp = generic_point(Y) if len(Y) else None
        pc = gp is not None
    if method in ("embedding", "both"):
        if len(Y) == 0:
            emb = False
        else:
            gamma = coordinate_algebra(Y)
            d = is_discriminated_finite(gamma.algebra, Y.algebra, max_states)
            emb, witness, trivial = d.discriminated, d.embedding, d.trivial_element
    if method == "both" and pc != emb:
        raise ConsistencyError(f"irreducibility criteria disagree on {list(Y.points)}: "
                               f"point-closure={pc}, embedding={emb}")
    verdict = pc if pc is not None else emb
    return Irreducibility(bool(verdict), method, gp, witness, trivial, pc, emb)


@dataclass(frozen=True)
class Decomposition:
    components: tuple[AlgebraicSet, ...]
    generic_points: tuple[Point, ...]


def decompose(Y: AlgebraicSet) -> Decomposition:
    """Maximal point closures, ordered by their least point."""
    if len(Y) == 0:
        raise UagError("the empty set has no irreducible components")
    _require_algebraic(Y)
    closures: dict[tuple, tuple[AlgebraicSet, Point]] = {}
    for p in Y.points:
        c = zariski_closure([p], Y.algebra, Y.variables)
        closures.setdefault(c.points, (c, p))
    cands = list(closures.values())
    maximal = [(c, p) for c, p in cands
               if not any(c != d and c.issubset(d) for d, _ in cands)]
    maximal.sort(key=lambda cp: cp[0].points[0])
    return Decomposition(tuple(c for c, _ in maximal), tuple(p for _, p in maximal))


@dataclass(frozen=True)
class SubdirectRecord:
    passed: bool
    restriction_maps: tuple[tuple[int, ...], ...]
    injective: bool
    surjective: tuple[bool, ...]
    homomorphic: tuple[bool, ...]


def subdirect_check(Y: AlgebraicSet, decomposition: Decomposition | None = None) -> SubdirectRecord:
    """Gamma(Y) -> prod Gamma(Y_i) by restriction: injective, and each
    coordinate a surjective homomorphism."""
    dec = decomposition or decompose(Y)
    gamma = coordinate_algebra(Y)
    pos = {p: i for i, p in enumerate(Y.points)}
    maps, surj, homs = [], [], []
    for comp in dec.components:
        sub = coordinate_algebra(comp)
        cols = [pos[p] for p in comp.points]
        restricted = gamma.tuples[:, cols]
        lookup = {r.tobytes(): i for i, r in enumerate(sub.tuples)}
        try:
            img = tuple(lookup[r.tobytes()] for r in restricted)
        except KeyError:
            raise ConsistencyError("a restricted term function is missing from the component's algebra")
        h = Homomorphism(gamma.algebra, sub.algebra, img)
        maps.append(img)
        surj.append(h.surjective)
        homs.append(h.check())
    joint = {tuple(m[i] for m in maps) for i in range(gamma.size)}
    injective = len(joint) == gamma.size
    passed = injective and all(surj) and all(homs)
    record = SubdirectRecord(passed, tuple(maps), injective, tuple(surj), tuple(homs))
    if not passed:
        raise ConsistencyError(f"subdirect decomposition check failed: {record}")
    return record
