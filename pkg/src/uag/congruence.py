"""Congruence closure: decide membership in the congruent closure [S].

Variables are free generators (uninterpreted constants). The closure works on
the joint subterm DAG of S and the query with a union-find plus a signature
table; merges are recorded so a positive answer carries a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import UagError
from .terms import Equation, EquationSystem, Term


@dataclass(frozen=True)
class Merge:
    reason: str  # "axiom" or "congruence"
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{self.reason}: {self.left} ~ {self.right}"


@dataclass(frozen=True)
class Entailment:
    entailed: bool
    certificate: tuple[Merge, ...] = ()

    def __bool__(self) -> bool:
        return self.entailed


class CongruenceClosure:
    """Single-use engine; build, add equations, then query."""

    def __init__(self) -> None:
        self.ids: dict[Term, int] = {}
        self.terms: list[Term] = []
        self.parent: list[int] = []
        self.members: list[list[int]] = []
        self.uses: list[list[int]] = []
        self.table: dict[tuple, int] = {}
        self.merges: list[Merge] = []
        self._pending: list[tuple[int, int, str]] = []

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def _signature(self, i: int) -> tuple:
        t = self.terms[i]
        return (t.name, t.index, tuple(self.find(self.ids[a]) for a in t.args))

    def add_term(self, t: Term) -> int:
        for s in t.subterms():
            if s in self.ids:
                continue
            i = len(self.terms)
            self.ids[s] = i
            self.terms.append(s)
            self.parent.append(i)
            self.members.append([i])
            self.uses.append([])
            if s.is_var:
                continue
            for a in s.args:
                self.uses[self.find(self.ids[a])].append(i)
            sig = self._signature(i)
            other = self.table.get(sig)
            if other is None:
                self.table[sig] = i
            else:
                self._pending.append((i, other, "congruence"))
        self._propagate()
        return self.ids[t]

    def add_equation(self, e: Equation) -> None:
        a = self.add_term(e.left)
        b = self.add_term(e.right)
        self._pending.append((a, b, "axiom"))
        self._propagate()

    def _propagate(self) -> None:
        while self._pending:
            a, b, reason = self._pending.pop(0)
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            self.merges.append(Merge(reason, self.terms[a], self.terms[b]))
            if len(self.members[ra]) < len(self.members[rb]):
                ra, rb = rb, ra
            # rb joins ra; re-sign every application that used rb
            self.parent[rb] = ra
            self.members[ra].extend(self.members[rb])
            moved = self.uses[rb]
            self.uses[rb] = []
            for u in moved:
                sig = self._signature(u)
                other = self.table.get(sig)
                if other is None:
                    self.table[sig] = u
                elif self.find(other) != self.find(u):
                    self._pending.append((u, other, "congruence"))
            self.uses[ra].extend(moved)

    def equal(self, t: Term, s: Term) -> bool:
        i, j = self.add_term(t), self.add_term(s)
        return self.find(i) == self.find(j)


def entails_congruence(system: Iterable[Equation], query: Equation) -> Entailment:
    """True iff ``query`` lies in the congruent closure of the finite ``system``."""
    if isinstance(system, EquationSystem) and not system.is_finite:
        raise UagError("congruence closure needs a finite system; truncate it first")
    cc = CongruenceClosure()
    cc.add_term(query.left)
    cc.add_term(query.right)
    for e in system:
        cc.add_equation(e)
    if cc.equal(query.left, query.right):
        return Entailment(True, tuple(cc.merges))
    return Entailment(False)
