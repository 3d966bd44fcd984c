"""Signatures, variables, hash-consed terms, equations and equation systems.

Terms are interned: building the same tree twice returns the same object, so
``is`` comparison, hashing and memoisation all work on a shared DAG.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ArityError, BoundExceeded, UagError, UndeclaredError, ValidationError

MAX_VARIABLES = 8


@dataclass(frozen=True)
class Signature:
    """A functional language: plain symbols with arities plus unary indexed families."""

    symbols: tuple[tuple[str, int], ...] = ()
    families: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = [n for n, _ in self.symbols] + list(self.families)
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate symbol names in signature: {names}")
        for name, arity in self.symbols:
            if arity < 0:
                raise ValidationError(f"negative arity for {name}")

    def arity(self, name: str) -> int:
        if name in self.families:
            return 1
        for n, a in self.symbols:
            if n == name:
                return a
        raise UndeclaredError(f"undeclared symbol {name!r}")

    def has(self, name: str) -> bool:
        return name in self.families or any(n == name for n, _ in self.symbols)

    def is_family(self, name: str) -> bool:
        return name in self.families

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(n for n, a in self.symbols if a == 0)

    def rank(self, name: str) -> int:
        for i, (n, _) in enumerate(self.symbols):
            if n == name:
                return i
        return len(self.symbols) + self.families.index(name)


@dataclass(frozen=True)
class VariableSet:
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValidationError(f"duplicate variables: {self.names}")
        if len(self.names) > MAX_VARIABLES:
            raise ValidationError(f"at most {MAX_VARIABLES} variables are supported")

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def index(self, name: str) -> int:
        return self.names.index(name)

    def terms(self) -> tuple["Term", ...]:
        return tuple(var(n) for n in self.names)


class Term:
    """A variable or an application node. Instances are interned."""

    __slots__ = ("name", "index", "args", "is_var", "depth", "_hash", "_key", "__weakref__")
    _table: dict[tuple, "Term"] = {}

    def __new__(cls, name: str, index: int | None = None, args: tuple["Term", ...] = (),
                is_var: bool = False) -> "Term":
        key = (is_var, name, index, args)
        found = cls._table.get(key)
        if found is not None:
            return found
        t = object.__new__(cls)
        object.__setattr__(t, "name", name)
        object.__setattr__(t, "index", index)
        object.__setattr__(t, "args", args)
        object.__setattr__(t, "is_var", is_var)
        object.__setattr__(t, "depth", 0 if is_var else 1 + max((a.depth for a in args), default=0))
        object.__setattr__(t, "_hash", hash(key))
        object.__setattr__(t, "_key", None)
        return cls._table.setdefault(key, t)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("terms are immutable")

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self):
        return (Term, (self.name, self.index, self.args, self.is_var))

    @property
    def key(self) -> tuple:
        """Total-order key: depth, then kind, symbol, index, then arguments."""
        k = self._key
        if k is None:
            k = (self.depth, 0 if self.is_var else 1, self.name,
                 -1 if self.index is None else self.index, tuple(a.key for a in self.args))
            object.__setattr__(self, "_key", k)
        return k

    def __lt__(self, other: "Term") -> bool:
        return self.key < other.key

    @property
    def symbol(self) -> str:
        return self.name if self.index is None else f"{self.name}[{self.index}]"

    def subterms(self) -> list["Term"]:
        """All distinct subterms, children before parents."""
        seen: dict[Term, None] = {}
        stack: list[tuple[Term, bool]] = [(self, False)]
        while stack:
            t, done = stack.pop()
            if t in seen:
                continue
            if done or not t.args:
                seen[t] = None
                continue
            stack.append((t, True))
            for a in reversed(t.args):
                if a not in seen:
                    stack.append((a, False))
        return list(seen)

    def variables(self) -> set[str]:
        return {s.name for s in self.subterms() if s.is_var}

    def __str__(self) -> str:
        if self.is_var:
            return self.name
        if not self.args:
            return self.symbol
        return f"{self.symbol}({','.join(str(a) for a in self.args)})"

    def __repr__(self) -> str:
        return f"Term({self})"


def var(name: str) -> Term:
    return Term(name, None, (), True)


def app(name: str, *args: Term, index: int | None = None) -> Term:
    return Term(name, index, tuple(args), False)


def check_term(t: Term, signature: Signature, variables: VariableSet) -> None:
    for s in t.subterms():
        if s.is_var:
            if s.name not in variables:
                raise UndeclaredError(f"undeclared variable {s.name!r}")
            continue
        if not signature.has(s.name):
            raise UndeclaredError(f"undeclared symbol {s.name!r}")
        if signature.is_family(s.name) != (s.index is not None):
            raise ValidationError(f"family index misuse at {s.symbol}")
        if len(s.args) != signature.arity(s.name):
            raise ArityError(f"{s.name} expects {signature.arity(s.name)} arguments, got {len(s.args)}")


@dataclass(frozen=True)
class Equation:
    """An unordered pair of terms stored in canonical orientation."""

    left: Term
    right: Term

    def __post_init__(self) -> None:
        t, s = self.left, self.right
        swap = s.depth > t.depth or (s.depth == t.depth and s.key < t.key)
        if swap:
            object.__setattr__(self, "left", s)
            object.__setattr__(self, "right", t)

    @property
    def is_trivial(self) -> bool:
        return self.left is self.right

    def variables(self) -> set[str]:
        return self.left.variables() | self.right.variables()

    @property
    def key(self) -> tuple:
        return (self.left.key, self.right.key)

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


# -- generated (infinite) systems ---------------------------------------------

@dataclass(frozen=True)
class IndexSpec:
    """A family index inside a template: ``n + offset`` when shifted, else the literal offset."""

    offset: int
    shifted: bool

    def at(self, n: int) -> int:
        return n + self.offset if self.shifted else self.offset

    def __str__(self) -> str:
        if not self.shifted:
            return str(self.offset)
        if self.offset == 0:
            return "n"
        return f"n{self.offset:+d}"


@dataclass(frozen=True)
class TermTemplate:
    name: str
    index: IndexSpec | None = None
    args: tuple["TermTemplate", ...] = ()
    is_var: bool = False

    def instantiate(self, n: int) -> Term:
        if self.is_var:
            return var(self.name)
        idx = None if self.index is None else self.index.at(n)
        return Term(self.name, idx, tuple(a.instantiate(n) for a in self.args), False)

    def specs(self) -> Iterator[IndexSpec]:
        if self.index is not None:
            yield self.index
        for a in self.args:
            yield from a.specs()

    @classmethod
    def from_term(cls, t: Term) -> "TermTemplate":
        idx = None if t.index is None else IndexSpec(t.index, False)
        return cls(t.name, idx, tuple(cls.from_term(a) for a in t.args), t.is_var)

    def __str__(self) -> str:
        if self.is_var:
            return self.name
        sym = self.name if self.index is None else f"{self.name}[{self.index}]"
        if not self.args:
            return sym
        return f"{sym}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Generator:
    """``left = right for n in start..stop`` (stop inclusive, ``None`` = unbounded)."""

    left: TermTemplate
    right: TermTemplate
    start: int = 0
    stop: int | None = None

    def __post_init__(self) -> None:
        if self.start < 0 or (self.stop is not None and self.stop < self.start):
            raise ValidationError(f"malformed index range {self.start}..{self.stop}")
        for spec in self.specs():
            if spec.at(self.start) < 0:
                raise ValidationError(f"family index {spec} is negative at n={self.start}")

    def specs(self) -> list[IndexSpec]:
        return list(self.left.specs()) + list(self.right.specs())

    @property
    def offsets(self) -> list[int]:
        return [s.offset for s in self.specs() if s.shifted]

    @property
    def constant_indices(self) -> list[int]:
        return [s.offset for s in self.specs() if not s.shifted]

    def instance(self, n: int) -> Equation:
        return Equation(self.left.instantiate(n), self.right.instantiate(n))

    def contains(self, n: int) -> bool:
        return n >= self.start and (self.stop is None or n <= self.stop)

    def __str__(self) -> str:
        stop = "" if self.stop is None else str(self.stop)
        return f"{self.left} = {self.right} for n in {self.start}..{stop}"


Label = tuple  # ("explicit", i) or ("generator", g, n)


@dataclass(frozen=True)
class EquationSystem:
    explicit: tuple[Equation, ...] = ()
    generators: tuple[Generator, ...] = ()

    def __post_init__(self) -> None:
        seen: dict[Equation, None] = {}
        for e in self.explicit:
            seen.setdefault(e, None)
        object.__setattr__(self, "explicit", tuple(seen))
        object.__setattr__(self, "generators", tuple(self.generators))

    @classmethod
    def of(cls, *equations: Equation) -> "EquationSystem":
        return cls(tuple(equations))

    @property
    def is_finite(self) -> bool:
        return all(g.stop is not None for g in self.generators)

    def labeled(self, max_index: int | None = None) -> Iterator[tuple[Label, Equation]]:
        """Deterministic enumeration: explicit part, then instances by increasing index."""
        for i, e in enumerate(self.explicit):
            yield ("explicit", i), e
        if not self.generators:
            return
        n = min(g.start for g in self.generators)
        last = None if not self.is_finite else max(g.stop for g in self.generators)  # type: ignore[type-var]
        while (max_index is None or n <= max_index) and (last is None or n <= last):
            for gi, g in enumerate(self.generators):
                if g.contains(n):
                    yield ("generator", gi, n), g.instance(n)
            n += 1

    def __iter__(self) -> Iterator[Equation]:
        for _, e in self.labeled():
            yield e

    def truncate(self, max_index: int) -> "EquationSystem":
        return EquationSystem(tuple(e for _, e in self.labeled(max_index)))

    def union(self, other: "EquationSystem") -> "EquationSystem":
        return EquationSystem(self.explicit + other.explicit, self.generators + other.generators)

    def check(self, signature: Signature, variables: VariableSet) -> None:
        for e in self.explicit:
            check_term(e.left, signature, variables)
            check_term(e.right, signature, variables)
        for g in self.generators:
            inst = g.instance(g.start)
            check_term(inst.left, signature, variables)
            check_term(inst.right, signature, variables)

    def __len__(self) -> int:
        if not self.is_finite:
            raise UagError("generated system is infinite")
        return sum(1 for _ in self.labeled())


# -- evaluation ----------------------------------------------------------------

def evaluate(t: Term, algebra: Any, assignment: Mapping[str, Any],
             memo: dict[Term, Any] | None = None) -> Any:
    """Value of ``t`` under ``assignment``; each shared subterm is evaluated once."""
    memo = {} if memo is None else memo
    for s in t.subterms():
        if s in memo:
            continue
        if s.is_var:
            if s.name not in assignment:
                raise UagError(f"assignment misses variable {s.name!r}")
            memo[s] = assignment[s.name]
        else:
            memo[s] = algebra.apply(s.name, s.index, tuple(memo[a] for a in s.args))
    return memo[t]


def evaluate_many(t: Term, algebra: Any, columns: Mapping[str, np.ndarray],
                  memo: dict[Term, np.ndarray] | None = None) -> np.ndarray:
    """Vectorised evaluation over many assignments at once (finite algebras)."""
    memo = {} if memo is None else memo
    length = len(next(iter(columns.values()))) if columns else 0
    for s in t.subterms():
        if s in memo:
            continue
        if s.is_var:
            if s.name not in columns:
                raise UagError(f"assignment misses variable {s.name!r}")
            memo[s] = np.asarray(columns[s.name])
            continue
        table = algebra.table(s.name, s.index)
        if table is None:  # identity member of a family
            memo[s] = memo[s.args[0]]
        elif not s.args:
            memo[s] = np.full(length, int(table), dtype=np.int64)
        else:
            memo[s] = table[tuple(memo[a] for a in s.args)]
    return memo[t]


def holds_at(e: Equation, algebra: Any, assignment: Mapping[str, Any],
             memo: dict[Term, Any] | None = None) -> bool:
    memo = {} if memo is None else memo
    return evaluate(e.left, algebra, assignment, memo) == evaluate(e.right, algebra, assignment, memo)


# -- enumeration ---------------------------------------------------------------

def enumerate_terms(signature: Signature, variables: VariableSet, depth: int,
                    family_indices: Mapping[str, Sequence[int]] | None = None,
                    max_terms: int | None = None) -> Iterator[Term]:
    """Every term of depth <= ``depth`` exactly once, depth-major then lexicographic.

    ``family_indices`` restricts each family to the listed indices (families
    without an entry are skipped).
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    ops: list[tuple[str, int | None, int]] = [(n, None, a) for n, a in signature.symbols]
    for fam in signature.families:
        for k in sorted((family_indices or {}).get(fam, ())):
            ops.append((fam, k, 1))
    terms: list[Term] = []

    def emit(t: Term) -> Term:
        terms.append(t)
        if max_terms is not None and len(terms) > max_terms:
            raise BoundExceeded(f"more than {max_terms} terms up to depth {depth}")
        return t

    for v in variables:
        yield emit(var(v))
    prev_start, prev_end = 0, len(terms)
    for d in range(1, depth + 1):
        level: list[Term] = []
        for name, index, arity in ops:
            if arity == 0:
                if d == 1:
                    level.append(Term(name, index, (), False))
                continue
            for combo in itertools.product(range(prev_end), repeat=arity):
                if max(combo) < prev_start:
                    continue
                level.append(Term(name, index, tuple(terms[i] for i in combo), False))
        prev_start = len(terms)
        for t in level:
            yield emit(t)
        prev_end = len(terms)
