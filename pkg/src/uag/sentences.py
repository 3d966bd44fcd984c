"""Universal sentences of the shape  forall x (and premises -> or conclusions)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundExceeded
from .terms import Equation, evaluate_many

DEFAULT_MAX_ASSIGNMENTS = 10**7


@dataclass(frozen=True)
class UniversalSentence:
    """An empty premise list is the empty conjunction (true); an empty
    conclusion list is the empty disjunction (false)."""

    variables: tuple[str, ...]
    premises: tuple[Equation, ...] = ()
    conclusions: tuple[Equation, ...] = ()

    def __str__(self) -> str:
        lhs = " & ".join(str(e) for e in self.premises)
        rhs = " | ".join(str(e) for e in self.conclusions) or "false"
        body = f"{lhs} -> {rhs}" if self.premises else rhs
        return f"forall {','.join(self.variables)} ({body})"


@dataclass(frozen=True)
class SentenceCheck:
    holds: bool
    countermodel: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.holds


def assignment_grid(size: int, n: int, max_assignments: int = DEFAULT_MAX_ASSIGNMENTS) -> np.ndarray:
    """All of size**n assignments as columns, lexicographic order."""
    total = size**n
    if total > max_assignments:
        raise BoundExceeded(f"{total} assignments exceed the bound {max_assignments}")
    if n == 0:
        return np.zeros((0, 1), dtype=np.int64)
    return np.indices((size,) * n).reshape(n, -1).astype(np.int64)


def holds_universal(B, sentence: UniversalSentence,
                    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS) -> SentenceCheck:
    grid = assignment_grid(B.size, len(sentence.variables), max_assignments)
    cols = {v: grid[i] for i, v in enumerate(sentence.variables)}
    width = grid.shape[1]
    memo: dict = {}
    premise = np.ones(width, dtype=bool)
    for e in sentence.premises:
        premise &= evaluate_many(e.left, B, cols, memo) == evaluate_many(e.right, B, cols, memo)
    concl = np.zeros(width, dtype=bool)
    for e in sentence.conclusions:
        concl |= evaluate_many(e.left, B, cols, memo) == evaluate_many(e.right, B, cols, memo)
    bad = np.flatnonzero(premise & ~concl)
    if len(bad) == 0:
        return SentenceCheck(True)
    return SentenceCheck(False, tuple(int(v) for v in grid[:, bad[0]]))
