"""Formula language for the bundled knowledge-wh operators.

Grammar (ASCII, whitespace-insensitive between tokens):

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?            right-associative
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "[K]" unary | "<K>" unary | "[B]" unary
             | "wh[" TAG VAR "]" unary | atom
    atom    := PRED "(" (VAR ("," VAR)*)? ")" | VAR "=" VAR | "(" formula ")"
    TAG     := "tB_MS" | "tB_MS_FS" | "K_MS" | "K_MS_FS"

Variables are lowercase-initial identifiers, predicates uppercase-initial.
Derived connectives are rewritten away while parsing: the AST only ever
contains atoms, identity, negation, conjunction, the knowledge box and the
four wh binders.  In particular "<K>p" is stored as ~[K]~p and "[B]p" as
~[K]~[K]p, so evaluation of belief never needs a primitive operator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from itertools import count
from string import ascii_lowercase
from typing import Iterator, Mapping


class FormulaError(Exception):
    """Base class for errors raised by this module."""


class ParseError(FormulaError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class ArityError(ParseError):
    """Predicate used with an argument count that conflicts with its arity."""


class LanguageError(ParseError):
    """Construct not permitted by the active language profile."""


class SubstitutionError(FormulaError):
    """The substituted variable would be captured by a wh binder."""


class WhTag(Enum):
    """The four bundled operators, named by the grammar tokens."""

    TB_MS = "tB_MS"
    TB_MS_FS = "tB_MS_FS"
    K_MS = "K_MS"
    K_MS_FS = "K_MS_FS"

    def __str__(self) -> str:
        return self.value


ALL_TAGS: tuple[WhTag, ...] = tuple(WhTag)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


class Formula:
    """Base class for AST nodes; subclasses are frozen dataclasses."""

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[Var, ...]


@dataclass(frozen=True)
class Ident(Formula):
    left: Var
    right: Var


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class BoxK(Formula):
    sub: Formula


@dataclass(frozen=True)
class Wh(Formula):
    tag: WhTag
    var: Var
    body: Formula


# Derived connectives, expanded to primitive nodes.

def or_(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def dia_k(a: Formula) -> Formula:
    return Not(BoxK(Not(a)))


def box_b(a: Formula) -> Formula:
    return Not(BoxK(Not(BoxK(a))))


def dia_b(a: Formula) -> Formula:
    return Not(box_b(Not(a)))


# Pattern recognizers used by the printer and the belief-relation evaluator.

def as_box_b(f: Formula) -> Formula | None:
    if (isinstance(f, Not) and isinstance(f.sub, BoxK)
            and isinstance(f.sub.sub, Not) and isinstance(f.sub.sub.sub, BoxK)):
        return f.sub.sub.sub.sub
    return None


def as_dia_k(f: Formula) -> Formula | None:
    if isinstance(f, Not) and isinstance(f.sub, BoxK) and isinstance(f.sub.sub, Not):
        return f.sub.sub.sub
    return None


def as_or(f: Formula) -> tuple[Formula, Formula] | None:
    if (isinstance(f, Not) and isinstance(f.sub, And)
            and isinstance(f.sub.left, Not) and isinstance(f.sub.right, Not)):
        return f.sub.left.sub, f.sub.right.sub
    return None


def as_implies(f: Formula) -> tuple[Formula, Formula] | None:
    if isinstance(f, Not) and isinstance(f.sub, And) and isinstance(f.sub.right, Not):
        return f.sub.left, f.sub.right.sub
    return None


def as_iff(f: Formula) -> tuple[Formula, Formula] | None:
    if isinstance(f, And):
        fwd = as_implies(f.left)
        bwd = as_implies(f.right)
        if fwd and bwd and fwd[0] == bwd[1] and fwd[1] == bwd[0]:
            return fwd
    return None


@dataclass(frozen=True)
class LanguageProfile:
    """Which wh tags, identity and predicates a formula may use.

    ``signature`` maps predicate names to arities; ``None`` leaves the
    signature open, with arities inferred and checked for consistency
    within each parse.
    """

    tags: frozenset[WhTag]
    identity: bool
    signature: tuple[tuple[str, int], ...] | None = None

    @classmethod
    def full(cls) -> "LanguageProfile":
        return cls(tags=frozenset(ALL_TAGS), identity=True, signature=None)

    @classmethod
    def single(cls, tag: WhTag, identity: bool = False,
               signature: Mapping[str, int] | None = None) -> "LanguageProfile":
        sig = tuple(sorted(signature.items())) if signature is not None else None
        return cls(tags=frozenset([tag]), identity=identity, signature=sig)

    def arity_of(self, pred: str) -> int | None:
        if self.signature is None:
            return None
        for name, arity in self.signature:
            if name == pred:
                return arity
        return -1  # sentinel: unknown predicate in a closed signature


_TOKEN_RE = re.compile(
    r"wh\[|\[K\]|\[B\]|<K>|<->|->|\?[A-Za-z][A-Za-z0-9_]*|[A-Za-z][A-Za-z0-9_]*|[~&|(),=\]]"
)

_TAG_BY_NAME = {t.value: t for t in WhTag}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        tokens.append((m.group(0), i))
        i = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, profile: LanguageProfile, allow_metavars: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.profile = profile
        self.allow_metavars = allow_metavars
        self.seen_arities: dict[str, int] = {}

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def here(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return len(self.text)

    def take(self, expected: str | None = None) -> str:
        if self.pos >= len(self.tokens):
            raise ParseError("unexpected end of input", len(self.text))
        tok, at = self.tokens[self.pos]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", at)
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.formula()
        if self.pos < len(self.tokens):
            raise ParseError(f"trailing input {self.peek()!r}", self.here())
        return f

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek() == "<->":
            self.take()
            f = iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.or_()
        if self.peek() == "->":
            self.take()
            return implies(f, self.imp())
        return f

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek() == "|":
            self.take()
            f = or_(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "[K]":
            self.take()
            return BoxK(self.unary())
        if tok == "<K>":
            self.take()
            return dia_k(self.unary())
        if tok == "[B]":
            self.take()
            return box_b(self.unary())
        if tok == "wh[":
            at = self.here()
            self.take()
            tag_tok = self.take()
            tag = _TAG_BY_NAME.get(tag_tok)
            if tag is None and not (self.allow_metavars and tag_tok.startswith("?")):
                raise ParseError(f"unknown wh tag {tag_tok!r}", at)
            if tag is not None and tag not in self.profile.tags:
                raise LanguageError(f"wh tag {tag_tok} not permitted by profile", at)
            var = self.variable()
            self.take("]")
            body = self.unary()
            if tag is None:
                return Wh(_TagHole(tag_tok[1:]), var, body)  # type: ignore[arg-type]
            return Wh(tag, var, body)
        return self.atom()

    def variable(self) -> Var:
        at = self.here()
        tok = self.take()
        if self.allow_metavars and tok.startswith("?"):
            return VarHole(tok[1:])
        if not tok[0].islower() or tok in _TAG_BY_NAME:
            raise ParseError(f"expected a variable, found {tok!r}", at)
        return Var(tok)

    def atom(self) -> Formula:
        tok = self.peek()
        at = self.here()
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok is None:
            raise ParseError("unexpected end of input", at)
        if self.allow_metavars and tok.startswith("?"):
            self.take()
            return FormulaHole(tok[1:])
        if tok[0].isupper():
            return self.predicate_atom()
        if tok[0].islower():
            x = self.variable()
            self.take("=")
            if not self.profile.identity:
                raise LanguageError("identity not permitted by profile", at)
            y = self.variable()
            return Ident(x, y)
        raise ParseError(f"unexpected token {tok!r}", at)

    def predicate_atom(self) -> Formula:
        at = self.here()
        name = self.take()
        self.take("(")
        args: list[Var] = []
        if self.peek() != ")":
            args.append(self.variable())
            while self.peek() == ",":
                self.take()
                args.append(self.variable())
        self.take(")")
        declared = self.profile.arity_of(name)
        if declared == -1:
            raise LanguageError(f"predicate {name} not in signature", at)
        if declared is not None and declared != len(args):
            raise ArityError(
                f"predicate {name} has arity {declared}, used with {len(args)} arguments", at)
        seen = self.seen_arities.setdefault(name, len(args))
        if seen != len(args):
            raise ArityError(
                f"predicate {name} used with arities {seen} and {len(args)}", at)
        return Atom(name, tuple(args))


def parse(text: str, profile: LanguageProfile | None = None) -> Formula:
    """Parse ``text`` into an AST, expanding all derived connectives."""
    return _Parser(text, profile or LanguageProfile.full(), allow_metavars=False).parse()


# Schema template support: a template is an ordinary AST in which formula,
# variable or tag positions may be holes to be filled at instantiation time.

@dataclass(frozen=True)
class FormulaHole(Formula):
    hole: str


@dataclass(frozen=True)
class VarHole(Var):
    def __init__(self, hole: str):
        object.__setattr__(self, "name", "?" + hole)

    @property
    def hole(self) -> str:
        return self.name[1:]


class _TagHole:
    def __init__(self, hole: str):
        self.hole = hole

    def __str__(self) -> str:
        return "?" + self.hole

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _TagHole) and other.hole == self.hole

    def __hash__(self) -> int:
        return hash(("?tag", self.hole))


def parse_template(text: str, profile: LanguageProfile | None = None) -> Formula:
    """Parse a schema template; ?name marks a metavariable position."""
    return _Parser(text, profile or LanguageProfile.full(), allow_metavars=True).parse()


def pretty(f: Formula) -> str:
    """Render ``f`` in the concrete grammar, fully parenthesized.

    Derived forms are printed back as sugar where the AST matches their
    expansion, so parse(pretty(f)) always returns f itself.
    """
    both = as_iff(f)
    if both:
        return f"({pretty(both[0])} <-> {pretty(both[1])})"
    if isinstance(f, And):
        return f"({pretty(f.left)} & {pretty(f.right)})"
    if isinstance(f, Not):
        inner = as_box_b(f)
        if inner is not None:
            return "[B]" + pretty(inner)
        disj = as_or(f)
        if disj:
            return f"({pretty(disj[0])} | {pretty(disj[1])})"
        imp = as_implies(f)
        if imp:
            return f"({pretty(imp[0])} -> {pretty(imp[1])})"
        dia = as_dia_k(f)
        if dia is not None:
            return "<K>" + pretty(dia)
        return "~" + pretty(f.sub)
    if isinstance(f, BoxK):
        return "[K]" + pretty(f.sub)
    if isinstance(f, Wh):
        return f"wh[{f.tag} {f.var}]" + pretty(f.body)
    if isinstance(f, Atom):
        return f"{f.pred}({','.join(a.name for a in f.args)})"
    if isinstance(f, Ident):
        return f"({f.left} = {f.right})"
    if isinstance(f, FormulaHole):
        return "?" + f.hole
    raise TypeError(f"not a formula: {f!r}")


def free_vars(f: Formula) -> frozenset[Var]:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Ident):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, And):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, BoxK):
        return free_vars(f.sub)
    if isinstance(f, Wh):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def substitute(f: Formula, y: Var, x: Var) -> Formula:
    """Replace every free occurrence of ``x`` in ``f`` by ``y``.

    No bound variables are renamed.  Raises SubstitutionError when a free
    occurrence of x sits inside a wh binder on y, because the substituted
    y would be captured there.
    """
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(y if a == x else a for a in f.args))
    if isinstance(f, Ident):
        return Ident(y if f.left == x else f.left, y if f.right == x else f.right)
    if isinstance(f, Not):
        return Not(substitute(f.sub, y, x))
    if isinstance(f, And):
        return And(substitute(f.left, y, x), substitute(f.right, y, x))
    if isinstance(f, BoxK):
        return BoxK(substitute(f.sub, y, x))
    if isinstance(f, Wh):
        if f.var == x:
            return f
        if f.var == y and x in free_vars(f.body):
            raise SubstitutionError(
                f"{y} is not admissible for {x} in {pretty(f)}: "
                f"free {x} occurs under the binder wh[{f.tag} {y}]")
        return Wh(f.tag, f.var, substitute(f.body, y, x))
    raise TypeError(f"not a formula: {f!r}")


def syntactic_equal(f: Formula, g: Formula) -> bool:
    """Exact node-by-node equality; alpha-variants are distinct."""
    return f == g


def predicates(f: Formula) -> dict[str, int]:
    """Predicate names used in ``f`` with their arities."""
    sig: dict[str, int] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            seen = sig.setdefault(g.pred, len(g.args))
            if seen != len(g.args):
                raise ArityError(f"predicate {g.pred} used with arities {seen} and {len(g.args)}")
        elif isinstance(g, Not):
            walk(g.sub)
        elif isinstance(g, And):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, BoxK):
            walk(g.sub)
        elif isinstance(g, Wh):
            walk(g.body)

    walk(f)
    return sig


def tags_used(f: Formula) -> frozenset[WhTag]:
    if isinstance(f, (Atom, Ident)):
        return frozenset()
    if isinstance(f, (Not, BoxK)):
        return tags_used(f.sub)
    if isinstance(f, And):
        return tags_used(f.left) | tags_used(f.right)
    if isinstance(f, Wh):
        return tags_used(f.body) | {f.tag}
    raise TypeError(f"not a formula: {f!r}")


def uses_identity(f: Formula) -> bool:
    if isinstance(f, Ident):
        return True
    if isinstance(f, Atom):
        return False
    if isinstance(f, (Not, BoxK)):
        return uses_identity(f.sub)
    if isinstance(f, And):
        return uses_identity(f.left) or uses_identity(f.right)
    if isinstance(f, Wh):
        return uses_identity(f.body)
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f: Formula) -> frozenset[Var]:
    """Every variable occurring in ``f``, free or bound."""
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Ident):
        return frozenset((f.left, f.right))
    if isinstance(f, (Not, BoxK)):
        return all_vars(f.sub)
    if isinstance(f, And):
        return all_vars(f.left) | all_vars(f.right)
    if isinstance(f, Wh):
        return all_vars(f.body) | {f.var}
    raise TypeError(f"not a formula: {f!r}")


def _name_stream() -> Iterator[str]:
    for n in count():
        for c in ascii_lowercase:
            yield c if n == 0 else f"{c}{n}"


def fresh_var(avoid: frozenset[Var] | set[Var]) -> Var:
    """First unused name in the fixed stream a, b, ..., z, a1, b1, ..."""
    taken = {v.name for v in avoid}
    for name in _name_stream():
        if name not in taken:
            return Var(name)
    raise AssertionError("unreachable")
