"""Problem-file parser and printer.

Grammar (``#`` starts a comment, whitespace is free)::

    problem   := language vars [algebra] block*
    language  := 'language' '{' [sym (',' sym)*] [';' 'family' fam (',' fam)*] '}'
    sym       := IDENT '/' INT
    fam       := IDENT '[' IDENT ']' '/' '1'
    vars      := 'vars' '(' [IDENT (',' IDENT)*] ')'
    algebra   := 'algebra' 'builtin' STRING
               | 'algebra' 'finite' INT '{' (assign ';')* '}'
    assign    := IDENT '=' table | IDENT '[' INT ']' '=' table | IDENT '[' '*' ']' '=' 'identity'
    table     := INT | '[' table (',' table)* ']'
    block     := 'system' '{' (gen_eq ';')* '}' | 'query' '{' (eq ';')* '}'
               | 'diseqs' '{' (term '!=' term ';')* '}' | 'points' '{' (tuple ';')* '}'
    gen_eq    := term '=' term ['for' IDENT 'in' INT '..' [INT]]
    term      := IDENT ['[' index ']'] ['(' term (',' term)* ')']
    index     := INT | IDENT [('+' | '-') INT]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import FiniteAlgebra
from .errors import ArityError, ParseError, UndeclaredError, ValidationError
from .terms import (Equation, EquationSystem, Generator, IndexSpec, Signature, Term, TermTemplate,
                    VariableSet, check_term)

BUILTINS = ("example5",)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<str>"[^"\n]*")
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>\.\.|!=|[{}()\[\],;=/+*\-])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


@dataclass(frozen=True)
class Problem:
    signature: Signature
    variables: VariableSet
    algebra: Any = None
    system: EquationSystem = field(default_factory=EquationSystem)
    query: tuple[Equation, ...] = ()
    diseqs: tuple[Equation, ...] = ()
    points: tuple[tuple[int, ...], ...] = ()
    builtin: str | None = None


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = tokenize(text)
        self.i = 0
        self.signature = Signature()
        self.variables = VariableSet(())

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, message: str, expected: str | None = None, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        return ParseError(message, t.line, t.column, expected)

    def accept(self, text: str) -> Token | None:
        if self.tok.text == text and self.tok.kind in ("op", "ident"):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            raise self.fail(f"unexpected {found!r}", repr(text))
        return t

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.fail(f"unexpected {found!r}", what)
        t = self.tok
        self.i += 1
        return t

    def integer(self) -> int:
        return int(self.expect_kind("int", "integer").text)

    # -- sections ---------------------------------------------------------------

    def problem(self) -> Problem:
        self.expect("language")
        self.signature = self.language()
        self.expect("vars")
        self.variables = self.vars()
        algebra, builtin = None, None
        if self.accept("algebra"):
            algebra, builtin = self.algebra()
        explicit: list[Equation] = []
        gens: list[Generator] = []
        query: list[Equation] = []
        diseqs: list[Equation] = []
        points: list[tuple[int, ...]] = []
        while self.tok.kind != "eof":
            if self.accept("system"):
                self.block(lambda: self.system_entry(explicit, gens))
            elif self.accept("query"):
                self.block(lambda: query.append(self.equation("=")))
            elif self.accept("diseqs"):
                self.block(lambda: diseqs.append(self.equation("!=")))
            elif self.accept("points"):
                self.block(lambda: points.append(self.point()))
            else:
                raise self.fail(f"unexpected {self.tok.text!r}", "'system', 'query', 'diseqs' or 'points'")
        system = EquationSystem(tuple(explicit), tuple(gens))
        return Problem(self.signature, self.variables, algebra, system, tuple(query), tuple(diseqs),
                       tuple(points), builtin)

    def block(self, entry) -> None:
        self.expect("{")
        while not self.accept("}"):
            entry()
            self.expect(";")

    def language(self) -> Signature:
        self.expect("{")
        symbols: list[tuple[str, int]] = []
        families: list[str] = []
        if self.tok.text not in ("}", ";"):
            while True:
                name = self.expect_kind("ident", "symbol name").text
                self.expect("/")
                symbols.append((name, self.integer()))
                if not self.accept(","):
                    break
        if self.accept(";"):
            self.expect("family")
            while True:
                name = self.expect_kind("ident", "family name").text
                self.expect("[")
                self.expect_kind("ident", "index parameter")
                self.expect("]")
                self.expect("/")
                at = self.tok
                if self.integer() != 1:
                    raise ArityError(f"{at.line}:{at.column}: families are unary")
                families.append(name)
                if not self.accept(","):
                    break
        self.expect("}")
        try:
            return Signature(tuple(symbols), tuple(families))
        except ValidationError as exc:
            raise ValidationError(f"language: {exc}") from None

    def vars(self) -> VariableSet:
        self.expect("(")
        names: list[str] = []
        if not self.accept(")"):
            while True:
                at = self.tok
                name = self.expect_kind("ident", "variable name").text
                if self.signature.has(name):
                    raise ValidationError(f"{at.line}:{at.column}: variable {name!r} clashes with a symbol")
                names.append(name)
                if not self.accept(","):
                    break
            self.expect(")")
        return VariableSet(tuple(names))

    def algebra(self) -> tuple[Any, str | None]:
        if self.accept("builtin"):
            at = self.tok
            name = self.expect_kind("str", "builtin name").text.strip('"')
            if name not in BUILTINS:
                raise ValidationError(f"{at.line}:{at.column}: unknown builtin algebra {name!r}")
            from .gn import SIGNATURE, GnAlgebra
            if self.signature != SIGNATURE:
                raise ValidationError("builtin example5 needs the language { ; family g[n]/1 }")
            return GnAlgebra(), name
        self.expect("finite")
        size = self.integer()
        tables: dict[str, Any] = {}
        families: dict[str, dict[int, Any]] = {f: {} for f in self.signature.families}
        self.expect("{")
        while not self.accept("}"):
            at = self.tok
            name = self.expect_kind("ident", "symbol name").text
            if not self.signature.has(name):
                raise UndeclaredError(f"{at.line}:{at.column}: undeclared symbol {name!r}")
            if self.signature.is_family(name):
                self.expect("[")
                if self.accept("*"):
                    self.expect("]")
                    self.expect("=")
                    self.expect("identity")
                else:
                    k = self.integer()
                    self.expect("]")
                    self.expect("=")
                    families[name][k] = self.table()
            else:
                self.expect("=")
                tables[name] = self.table()
            self.expect(";")
        return FiniteAlgebra(self.signature, size, tables, families), None

    def table(self) -> Any:
        if self.tok.kind == "int":
            return self.integer()
        self.expect("[")
        items = [self.table()]
        while self.accept(","):
            items.append(self.table())
        self.expect("]")
        return items

    def point(self) -> tuple[int, ...]:
        self.expect("(")
        coords = [self.integer()]
        while self.accept(","):
            coords.append(self.integer())
        self.expect(")")
        if len(coords) != len(self.variables):
            raise ValidationError(f"point {tuple(coords)} has {len(coords)} coordinates, "
                                  f"expected {len(self.variables)}")
        return tuple(coords)

    # -- terms ------------------------------------------------------------------

    def template(self, param: list[str]) -> TermTemplate:
        at = self.tok
        name = self.expect_kind("ident", "term").text
        if name in self.variables:
            return TermTemplate(name, None, (), True)
        if not self.signature.has(name):
            raise UndeclaredError(f"{at.line}:{at.column}: undeclared variable or symbol {name!r}")
        index = None
        if self.signature.is_family(name):
            self.expect("[")
            index = self.index_spec(param)
            self.expect("]")
        args: list[TermTemplate] = []
        if self.accept("("):
            args.append(self.template(param))
            while self.accept(","):
                args.append(self.template(param))
            self.expect(")")
        arity = self.signature.arity(name)
        if len(args) != arity:
            raise ArityError(f"{at.line}:{at.column}: {name} expects {arity} argument(s), got {len(args)}")
        return TermTemplate(name, index, tuple(args), False)

    def index_spec(self, param: list[str]) -> IndexSpec:
        if self.tok.kind == "int":
            return IndexSpec(self.integer(), False)
        name = self.expect_kind("ident", "index").text
        if param and param[0] != name:
            raise ValidationError(f"index parameters {param[0]!r} and {name!r} differ")
        if not param:
            param.append(name)
        offset = 0
        if self.accept("+"):
            offset = self.integer()
        elif self.accept("-"):
            offset = -self.integer()
        return IndexSpec(offset, True)

    def term(self) -> Term:
        at = self.tok
        param: list[str] = []
        t = self.template(param)
        if param:
            raise ValidationError(f"{at.line}:{at.column}: index parameter {param[0]!r} outside a template")
        return t.instantiate(0)

    def equation(self, sep: str) -> Equation:
        left = self.term()
        self.expect(sep)
        return Equation(left, self.term())

    def system_entry(self, explicit: list[Equation], gens: list[Generator]) -> None:
        at = self.tok
        param: list[str] = []
        left = self.template(param)
        self.expect("=")
        right = self.template(param)
        if self.accept("for"):
            name = self.expect_kind("ident", "index parameter").text
            if param and param[0] != name:
                raise ValidationError(f"{at.line}:{at.column}: template uses {param[0]!r} but ranges over {name!r}")
            self.expect("in")
            start = self.integer()
            self.expect("..")
            stop = self.integer() if self.tok.kind == "int" else None
            try:
                gens.append(Generator(left, right, start, stop))
            except ValidationError as exc:
                raise ValidationError(f"{at.line}:{at.column}: {exc}") from None
            return
        if param:
            raise ValidationError(f"{at.line}:{at.column}: index parameter {param[0]!r} without a 'for' range")
        explicit.append(Equation(left.instantiate(0), right.instantiate(0)))


def parse_problem(text: str) -> Problem:
    p = _Parser(text)
    problem = p.problem()
    problem.system.check(problem.signature, problem.variables)
    return problem


def parse_term(text: str, signature: Signature, variables: VariableSet) -> Term:
    p = _Parser(text)
    p.signature, p.variables = signature, variables
    t = p.term()
    p.expect_kind("eof", "end of term")
    check_term(t, signature, variables)
    return t


def parse_equation(text: str, signature: Signature, variables: VariableSet) -> Equation:
    p = _Parser(text)
    p.signature, p.variables = signature, variables
    e = p.equation("=")
    p.expect_kind("eof", "end of equation")
    return e


# -- printer ---------------------------------------------------------------------

def format_term(t: Term) -> str:
    return str(t)


def _table_text(a: np.ndarray) -> str:
    if a.ndim == 0:
        return str(int(a))
    return "[" + ", ".join(_table_text(x) for x in a) + "]"


def print_problem(p: Problem) -> str:
    sig = p.signature
    syms = ", ".join(f"{n}/{a}" for n, a in sig.symbols)
    fams = ", ".join(f"{f}[n]/1" for f in sig.families)
    body = " ; ".join(part for part in (syms, f"family {fams}" if fams else "") if part)
    if fams and not syms:
        body = "; " + body
    lines = ["language { " + body + " }",
             "vars (" + ", ".join(p.variables.names) + ")"]
    if p.builtin is not None:
        lines.append(f'algebra builtin "{p.builtin}"')
    elif p.algebra is not None:
        A = p.algebra
        lines.append(f"algebra finite {A.size} {{")
        for n, _ in sig.symbols:
            lines.append(f"  {n} = {_table_text(A.tables[n])};")
        for f in sig.families:
            for k, t in A.family_tables[f].items():
                lines.append(f"  {f}[{k}] = {_table_text(t)};")
            lines.append(f"  {f}[*] = identity;")
        lines.append("}")
    if p.system.explicit or p.system.generators:
        lines.append("system {")
        lines.extend(f"  {e};" for e in p.system.explicit)
        for g in p.system.generators:
            stop = "" if g.stop is None else str(g.stop)
            lines.append(f"  {g.left} = {g.right} for n in {g.start}..{stop};")
        lines.append("}")
    if p.query:
        lines.append("query {")
        lines.extend(f"  {e};" for e in p.query)
        lines.append("}")
    if p.diseqs:
        lines.append("diseqs {")
        lines.extend(f"  {e.left} != {e.right};" for e in p.diseqs)
        lines.append("}")
    if p.points:
        lines.append("points {")
        lines.extend("  (" + ", ".join(map(str, q)) + ");" for q in p.points)
        lines.append("}")
    return "\n".join(lines) + "\n"
