"""Finite L-algebras stored as numpy operation tables.

Elements of an algebra of size k are the integers 0..k-1. Family symbols
(unary, indexed by naturals) carry explicit tables for finitely many
exceptional indices and act as the identity everywhere else.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import BoundExceeded, SignatureMismatch, UagError, UndeclaredError, ValidationError
from .terms import Generator, Signature

DEFAULT_MAX_SIZE = 1 << 20


def _frozen(a: Any, dtype=np.int64) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    signature: Signature
    size: int
    tables: Mapping[str, np.ndarray]
    family_tables: Mapping[str, Mapping[int, np.ndarray]] = field(default_factory=dict)
    name: str = ""
    # optional hint: elements known to generate the algebra (speeds up homomorphism search)
    generators: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValidationError("an algebra needs at least one element")
        tables = {}
        for sym, arity in self.signature.symbols:
            if sym not in self.tables:
                raise UndeclaredError(f"symbol {sym!r} is not interpreted")
            t = _frozen(self.tables[sym])
            if t.shape != (self.size,) * arity:
                raise ValidationError(f"table for {sym} has shape {t.shape}, expected {(self.size,) * arity}")
            if t.size and (t.min() < 0 or t.max() >= self.size):
                raise ValidationError(f"table for {sym} leaves the universe 0..{self.size - 1}")
            tables[sym] = t
        extra = set(self.tables) - {s for s, _ in self.signature.symbols}
        if extra:
            raise UndeclaredError(f"tables for undeclared symbols {sorted(extra)}")
        families: dict[str, dict[int, np.ndarray]] = {}
        for fam in self.signature.families:
            members = {}
            for k, t in sorted(dict(self.family_tables.get(fam, {})).items()):
                if k < 0:
                    raise ValidationError(f"negative family index {fam}[{k}]")
                arr = _frozen(t)
                if arr.shape != (self.size,) or arr.min() < 0 or arr.max() >= self.size:
                    raise ValidationError(f"bad table for {fam}[{k}]")
                if not np.array_equal(arr, np.arange(self.size)):
                    members[k] = arr
            families[fam] = members
        extra = set(self.family_tables) - set(self.signature.families)
        if extra:
            raise UndeclaredError(f"tables for undeclared families {sorted(extra)}")
        object.__setattr__(self, "tables", tables)
        object.__setattr__(self, "family_tables", families)

    # -- interpretation ----------------------------------------------------

    def table(self, name: str, index: int | None = None) -> np.ndarray | None:
        """The table of a symbol; ``None`` for a family member acting as the identity."""
        if index is None:
            if name not in self.tables:
                raise UndeclaredError(f"symbol {name!r} is not interpreted")
            return self.tables[name]
        if name not in self.family_tables:
            raise UndeclaredError(f"family {name!r} is not interpreted")
        return self.family_tables[name].get(index)

    def full_table(self, name: str, index: int | None = None) -> np.ndarray:
        t = self.table(name, index)
        return np.arange(self.size) if t is None else t

    def apply(self, name: str, index: int | None, args: Sequence[int]) -> int:
        t = self.table(name, index)
        if t is None:
            return int(args[0])
        return int(t[tuple(args)]) if args else int(t)

    def exceptional(self, family: str) -> tuple[int, ...]:
        return tuple(self.family_tables.get(family, {}))

    def operations(self, other: "FiniteAlgebra | None" = None) -> list[tuple[str, int | None, int]]:
        """Symbols that can act non-trivially: all plain symbols plus exceptional
        family members (of this algebra and, if given, of ``other``)."""
        ops: list[tuple[str, int | None, int]] = [(n, None, a) for n, a in self.signature.symbols]
        for fam in self.signature.families:
            idx = set(self.exceptional(fam))
            if other is not None:
                idx |= set(other.exceptional(fam))
            ops.extend((fam, k, 1) for k in sorted(idx))
        return ops

    def truncation_index(self, gen: Generator) -> int:
        """Largest index n that must be instantiated: beyond it every shifted
        family member in ``gen`` acts as the identity, so all later instances
        are semantically the same equation."""
        offsets = gen.offsets
        if not offsets:
            return gen.start
        exc = [k for fam in self.signature.families for k in self.exceptional(fam)]
        top = max(exc, default=-1)
        n = max(gen.start, top + 1 - min(offsets))
        return n if gen.stop is None else min(n, gen.stop)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.signature, self.size)).encode())
        for name in sorted(self.tables):
            h.update(name.encode())
            h.update(self.tables[name].tobytes())
        for fam in sorted(self.family_tables):
            for k, t in self.family_tables[fam].items():
                h.update(f"{fam}[{k}]".encode())
                h.update(t.tobytes())
        return h.hexdigest()

    def same_structure(self, other: "FiniteAlgebra") -> bool:
        return self.fingerprint() == other.fingerprint()

    def __repr__(self) -> str:
        label = self.name or "FiniteAlgebra"
        return f"<{label} size={self.size}>"


def make_algebra(signature: Signature, size: int, tables: Mapping[str, Any],
                 families: Mapping[str, Mapping[int, Any]] | None = None, name: str = "") -> FiniteAlgebra:
    return FiniteAlgebra(signature, size, dict(tables), dict(families or {}), name)


def trivial_algebra(signature: Signature) -> FiniteAlgebra:
    tables = {n: np.zeros((1,) * a, dtype=np.int64) for n, a in signature.symbols}
    return FiniteAlgebra(signature, 1, tables, {}, "E")


def check_same_signature(*algebras: Any) -> Signature:
    sigs = {a.signature for a in algebras}
    if len(sigs) > 1:
        raise SignatureMismatch("algebras do not share a signature")
    return algebras[0].signature


def direct_product(factors: Sequence[FiniteAlgebra], signature: Signature | None = None,
                   max_size: int = DEFAULT_MAX_SIZE) -> tuple[FiniteAlgebra, list]:
    """Product with coordinate projections. Element encoding is mixed radix with
    the first factor most significant, so element order is lexicographic."""
    from .homs import Homomorphism

    if not factors:
        if signature is None:
            raise UagError("the empty product needs an explicit signature")
        return trivial_algebra(signature), []
    sig = check_same_signature(*factors)
    if signature is not None and signature != sig:
        raise SignatureMismatch("factor signature differs from the requested one")
    sizes = [f.size for f in factors]
    total = int(np.prod(sizes, dtype=object))
    if total > max_size:
        raise BoundExceeded(f"product size {total} exceeds {max_size}")
    strides = [int(np.prod(sizes[i + 1:], dtype=np.int64)) for i in range(len(sizes))]
    elems = np.arange(total)
    coords = [(elems // s) % k for s, k in zip(strides, sizes)]

    def combine(get_table, arity: int) -> np.ndarray:
        out = np.zeros((total,) * arity, dtype=np.int64)
        for j, f in enumerate(factors):
            t = get_table(f)
            if arity == 0:
                out = out + strides[j] * int(t)
            else:
                out = out + strides[j] * t[np.ix_(*([coords[j]] * arity))]
        return out

    tables = {n: combine(lambda f, n=n: f.tables[n], a) for n, a in sig.symbols}
    fams: dict[str, dict[int, np.ndarray]] = {}
    for fam in sig.families:
        idx = sorted({k for f in factors for k in f.exceptional(fam)})
        fams[fam] = {k: combine(lambda f, k=k: f.full_table(fam, k), 1) for k in idx}
    name = "x".join(f.name or "?" for f in factors)
    prod = FiniteAlgebra(sig, total, tables, fams, name)
    projections = [Homomorphism(prod, f, tuple(int(v) for v in coords[j])) for j, f in enumerate(factors)]
    return prod, projections


def power(algebra: FiniteAlgebra, n: int, max_size: int = DEFAULT_MAX_SIZE) -> FiniteAlgebra:
    return direct_product([algebra] * n, algebra.signature, max_size)[0]


def closure(algebra: FiniteAlgebra, seeds: Sequence[int]) -> list[int]:
    """Least subuniverse containing ``seeds`` (and all constants), sorted."""
    ops = algebra.operations()
    members = np.zeros(algebra.size, dtype=bool)
    for s in seeds:
        if not 0 <= s < algebra.size:
            raise ValidationError(f"seed {s} outside the universe")
        members[s] = True
    for name, index, arity in ops:
        if arity == 0:
            members[int(algebra.tables[name])] = True
    while True:
        cur = np.flatnonzero(members)
        before = members.sum()
        for name, index, arity in ops:
            if arity == 0:
                continue
            t = algebra.full_table(name, index)
            members[np.unique(t[np.ix_(*([cur] * arity))])] = True
        if members.sum() == before:
            return [int(v) for v in np.flatnonzero(members)]


def induced_subalgebra(algebra: FiniteAlgebra, elements: Sequence[int], name: str = "") -> FiniteAlgebra:
    """Restriction to a subuniverse, renumbered in increasing order."""
    elements = sorted(elements)
    lookup = np.full(algebra.size, -1, dtype=np.int64)
    lookup[elements] = np.arange(len(elements))
    el = np.array(elements, dtype=np.int64)

    def restrict(t: np.ndarray, arity: int) -> np.ndarray:
        if arity == 0:
            r = lookup[int(t)]
        else:
            r = lookup[t[np.ix_(*([el] * arity))]]
        if np.any(r < 0):
            raise ValidationError("element set is not closed under the operations")
        return r

    sig = algebra.signature
    tables = {n: restrict(algebra.tables[n], a) for n, a in sig.symbols}
    fams = {f: {k: restrict(t, 1) for k, t in algebra.family_tables[f].items()} for f in sig.families}
    return FiniteAlgebra(sig, len(elements), tables, fams, name or f"sub({algebra.name})")


def generated_subalgebra(algebra: Any, seeds: Sequence[Any], **kwargs: Any) -> tuple[FiniteAlgebra, Any]:
    """Subalgebra generated by ``seeds`` with its inclusion.

    For a finite algebra the inclusion is a Homomorphism; symbolic algebras
    provide their own method and return the list of included elements.
    """
    from .homs import Homomorphism

    if hasattr(algebra, "generated_subalgebra"):
        return algebra.generated_subalgebra(seeds, **kwargs)
    if not seeds and not algebra.signature.constants:
        raise ValidationError("empty seed set generates the empty set")
    elems = closure(algebra, list(seeds))
    sub = induced_subalgebra(algebra, elems)
    return sub, Homomorphism(sub, algebra, tuple(elems))


def quotient(algebra: FiniteAlgebra, labels: Sequence[int]) -> tuple[FiniteAlgebra, Any]:
    """Quotient by the partition ``labels`` (which must be a congruence)."""
    from .homs import Homomorphism

    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (algebra.size,):
        raise ValidationError("one label per element required")
    _, first, cls = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    cls = rank[cls]
    reps = np.array(sorted(first), dtype=np.int64)
    k = len(reps)

    def project(t: np.ndarray, arity: int) -> np.ndarray:
        if arity == 0:
            return np.array(cls[int(t)])
        full = cls[t]
        grids = np.meshgrid(*([np.arange(algebra.size)] * arity), indexing="ij")
        out = np.full((k,) * arity, -1, dtype=np.int64)
        keys = tuple(cls[g] for g in grids)
        out[keys] = full
        if np.any(out[keys] != full):
            raise ValidationError("partition is not a congruence")
        return out

    sig = algebra.signature
    tables = {n: project(algebra.tables[n], a) for n, a in sig.symbols}
    fams = {f: {j: project(t, 1) for j, t in algebra.family_tables[f].items()} for f in sig.families}
    q = FiniteAlgebra(sig, k, tables, fams, f"{algebra.name}/~")
    return q, Homomorphism(algebra, q, tuple(int(c) for c in cls))


def has_trivial_subalgebra(algebra: FiniteAlgebra) -> int | None:
    """Least b with F(b,...,b) = b for every operation and every constant equal to b."""
    ok = np.ones(algebra.size, dtype=bool)
    diag = np.arange(algebra.size)
    for name, index, arity in algebra.operations():
        t = algebra.full_table(name, index)
        if arity == 0:
            keep = np.zeros_like(ok)
            keep[int(t)] = True
            ok &= keep
        else:
            ok &= t[(diag,) * arity] == diag
    hits = np.flatnonzero(ok)
    return int(hits[0]) if len(hits) else None
