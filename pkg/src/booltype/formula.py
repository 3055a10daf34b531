"""First-order formulas over finite relational structures.

Grammar (loosest binding first)::

    formula  := disj ( '->' formula )?
    disj     := conj ( '|' conj )*
    conj     := unary ( '&' unary )*
    unary    := '!' unary | ('E' | 'A') VAR '.' formula | '(' formula ')' | atom
    atom     := SYM '(' term (',' term)* ')' | term '=' term | term OP term
    term     := VAR | 'c' DIGITS

``OP`` is an infix relation symbol such as ``<``.  Quantifier bodies extend
as far right as possible.  Evaluation builds one boolean tensor axis per free
variable and per quantifier occurrence, so a truth set is a numpy array.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from . import guards
from .errors import BooltypeError, FormulaSyntaxError, SignatureError


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    index: int


Term = Union[Var, Const]


@dataclass(frozen=True)
class Rel:
    symbol: str
    terms: tuple


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Rel, Eq, Not, And, Or, Implies, Exists, Forall]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CONST = re.compile(r"c(\d+)")
_INFIX_CHARS = "<>~+*/%^"

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<infix>[<>~+*/%^]+)|(?P<punct>[()!&|=.,]))"
)


def conj(parts: Sequence[Formula]) -> Formula:
    """Left-nested conjunction of a nonempty sequence."""
    if not parts:
        raise BooltypeError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Sequence[Formula]) -> Formula:
    if not parts:
        raise BooltypeError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def exists_many(variables: Sequence[str], body: Formula) -> Formula:
    for v in reversed(variables):
        body = Exists(v, body)
    return body


TOP = Eq(Var("x0"), Var("x0"))


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        value = match.group(kind)
        start = match.start(kind)
        tokens.append((kind, value, start))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, signature: Mapping[str, int] | None, universe_size: int | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.signature = signature
        self.universe_size = universe_size

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise FormulaSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Formula:
        f = self.formula()
        kind, val, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected {val!r}", pos)
        return f

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "arrow":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek()[1] == "&":
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "!":
            self.take()
            return Not(self.unary())
        if kind == "ident" and val in ("E", "A") and self.peek(1)[0] == "ident":
            self.take()
            _, var, vpos = self.take()
            if _CONST.fullmatch(var):
                raise FormulaSyntaxError(f"cannot quantify over parameter {var}", vpos)
            self.expect(".")
            body = self.formula()
            return Exists(var, body) if val == "E" else Forall(var, body)
        if val == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def term(self) -> Term:
        kind, val, pos = self.take()
        if kind != "ident":
            raise FormulaSyntaxError(f"expected a term, found {val or 'end of input'!r}", pos)
        m = _CONST.fullmatch(val)
        if m:
            idx = int(m.group(1))
            if self.universe_size is not None and idx >= self.universe_size:
                raise SignatureError(f"parameter {val} is outside the universe of size {self.universe_size}")
            return Const(idx)
        return Var(val)

    def check_symbol(self, symbol: str, arity: int, pos: int) -> None:
        if self.signature is None:
            return
        if symbol not in self.signature:
            raise SignatureError(f"unknown relation symbol {symbol!r} at position {pos}")
        if self.signature[symbol] != arity:
            raise SignatureError(
                f"relation {symbol} has arity {self.signature[symbol]}, used with {arity} arguments at position {pos}"
            )

    def atom(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "ident" and self.peek(1)[1] == "(" and not _CONST.fullmatch(val):
            self.take()
            self.take()
            terms = [self.term()]
            while self.peek()[1] == ",":
                self.take()
                terms.append(self.term())
            self.expect(")")
            self.check_symbol(val, len(terms), pos)
            return Rel(val, tuple(terms))
        left = self.term()
        kind, op, opos = self.take()
        if op == "=":
            return Eq(left, self.term())
        if kind == "infix":
            right = self.term()
            self.check_symbol(op, 2, opos)
            return Rel(op, (left, right))
        raise FormulaSyntaxError(f"expected '=' or a relation after term, found {op or 'end of input'!r}", opos)


def signature_of(structure) -> dict[str, int]:
    return {rel.symbol: rel.arity for rel in structure.relations}


def parse(text: str, structure=None) -> Formula:
    """Parse a formula; with a structure, symbols, arities and parameters are checked."""
    signature = signature_of(structure) if structure is not None else None
    m = structure.universe_size if structure is not None else None
    return _Parser(text, signature, m).parse()


# --- printing ---------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3}


def _term(t: Term) -> str:
    return t.name if isinstance(t, Var) else f"c{t.index}"


def to_text(f: Formula) -> str:
    """Canonical printer; ``parse(to_text(f)) == f``."""
    if isinstance(f, Rel):
        if not _IDENT.fullmatch(f.symbol) and len(f.terms) == 2:
            return f"{_term(f.terms[0])} {f.symbol} {_term(f.terms[1])}"
        return f"{f.symbol}(" + ", ".join(_term(t) for t in f.terms) + ")"
    if isinstance(f, Eq):
        return f"{_term(f.left)} = {_term(f.right)}"
    if isinstance(f, Not):
        if isinstance(f.body, Not) or (isinstance(f.body, Rel) and _IDENT.fullmatch(f.body.symbol)):
            return "!" + to_text(f.body)
        return "!(" + to_text(f.body) + ")"
    if isinstance(f, (Exists, Forall)):
        q = "E" if isinstance(f, Exists) else "A"
        return f"{q} {f.var} . {to_text(f.body)}"
    prec = _PREC[type(f)]
    op = {And: "&", Or: "|", Implies: "->"}[type(f)]
    left_assoc = not isinstance(f, Implies)
    return f"{_operand(f.left, prec, left_assoc)} {op} {_operand(f.right, prec, not left_assoc)}"


def _operand(g: Formula, prec: int, same_ok: bool) -> str:
    text = to_text(g)
    if isinstance(g, (Exists, Forall)):
        return f"({text})"
    if type(g) in _PREC:
        p = _PREC[type(g)]
        if p < prec or (p == prec and not same_ok):
            return f"({text})"
    return text


def _formula_str(self):
    return to_text(self)


for _cls in (Rel, Eq, Not, And, Or, Implies, Exists, Forall):
    _cls.__str__ = _formula_str


# --- syntax utilities -------------------------------------------------------

def free_variables(f: Formula) -> set[str]:
    if isinstance(f, Rel):
        return {t.name for t in f.terms if isinstance(t, Var)}
    if isinstance(f, Eq):
        return {t.name for t in (f.left, f.right) if isinstance(t, Var)}
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or, Implies)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def parameters(f: Formula) -> set[int]:
    if isinstance(f, Rel):
        return {t.index for t in f.terms if isinstance(t, Const)}
    if isinstance(f, Eq):
        return {t.index for t in (f.left, f.right) if isinstance(t, Const)}
    if isinstance(f, Not):
        return parameters(f.body)
    if isinstance(f, (And, Or, Implies)):
        return parameters(f.left) | parameters(f.right)
    if isinstance(f, (Exists, Forall)):
        return parameters(f.body)
    raise TypeError(f"not a formula: {f!r}")


def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Replace free variables by terms (no capture handling: targets must be fresh)."""

    def sub_term(t: Term) -> Term:
        if isinstance(t, Var) and t.name in mapping:
            return mapping[t.name]
        return t

    if isinstance(f, Rel):
        return Rel(f.symbol, tuple(sub_term(t) for t in f.terms))
    if isinstance(f, Eq):
        return Eq(sub_term(f.left), sub_term(f.right))
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return type(f)(f.var, substitute(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def _depth(f: Formula) -> int:
    if isinstance(f, (Rel, Eq)):
        return 0
    if isinstance(f, Not):
        return _depth(f.body)
    if isinstance(f, (And, Or, Implies)):
        return max(_depth(f.left), _depth(f.right))
    return 1 + _depth(f.body)


def _count_quantifiers(f: Formula) -> int:
    if isinstance(f, (Rel, Eq)):
        return 0
    if isinstance(f, Not):
        return _count_quantifiers(f.body)
    if isinstance(f, (And, Or, Implies)):
        return _count_quantifiers(f.left) + _count_quantifiers(f.right)
    return 1 + _count_quantifiers(f.body)


# --- evaluation -------------------------------------------------------------

def truth_array(f: Formula, structure, variables: Sequence[str]) -> np.ndarray:
    """Truth table of ``f`` as a boolean array of shape ``(m,) * len(variables)``."""
    variables = list(variables)
    if len(set(variables)) != len(variables):
        raise BooltypeError("variable tuple has repeated names")
    unbound = free_variables(f) - set(variables)
    if unbound:
        raise BooltypeError(f"unbound variable(s): {', '.join(sorted(unbound))}")
    m = structure.universe_size
    bad = [c for c in parameters(f) if c >= m]
    if bad:
        raise SignatureError(f"parameter c{bad[0]} is outside the universe of size {m}")
    n = len(variables)
    live = n + _depth(f)
    guards.check("tensor", m ** live, "evaluation tensor size")
    ndim = n + _count_quantifiers(f)
    if ndim == 0:
        ndim = 1
    shapes = {}

    def index(axis: int) -> np.ndarray:
        if axis not in shapes:
            shape = [1] * ndim
            shape[axis] = m
            shapes[axis] = np.arange(m).reshape(shape)
        return shapes[axis]

    counter = [n]

    def term(t: Term, env):
        if isinstance(t, Const):
            return t.index
        return index(env[t.name])

    def scalar(v) -> np.ndarray:
        return np.asarray(bool(v)).reshape((1,) * ndim)

    def ev(g: Formula, env) -> np.ndarray:
        if isinstance(g, Rel):
            try:
                table = structure.table(g.symbol)
            except KeyError:
                raise SignatureError(f"unknown relation symbol {g.symbol!r}") from None
            if table.ndim != len(g.terms):
                raise SignatureError(f"relation {g.symbol} has arity {table.ndim}, used with {len(g.terms)} arguments")
            idx = tuple(term(t, env) for t in g.terms)
            out = table[idx]
            return scalar(out) if np.ndim(out) == 0 else out
        if isinstance(g, Eq):
            out = np.equal(term(g.left, env), term(g.right, env))
            return scalar(out) if np.ndim(out) == 0 else out
        if isinstance(g, Not):
            return ~ev(g.body, env)
        if isinstance(g, And):
            return ev(g.left, env) & ev(g.right, env)
        if isinstance(g, Or):
            return ev(g.left, env) | ev(g.right, env)
        if isinstance(g, Implies):
            return ~ev(g.left, env) | ev(g.right, env)
        if isinstance(g, (Exists, Forall)):
            axis = counter[0]
            counter[0] += 1
            inner = dict(env)
            inner[g.var] = axis
            body = ev(g.body, inner)
            if body.shape[axis] == 1:
                # variable unused in the body; the universe is nonempty
                return body
            return body.any(axis=axis, keepdims=True) if isinstance(g, Exists) else body.all(axis=axis, keepdims=True)
        raise TypeError(f"not a formula: {g!r}")

    env = {v: i for i, v in enumerate(variables)}
    res = ev(f, env)
    full = [m if i < n else 1 for i in range(ndim)]
    res = np.broadcast_to(res, full)
    return np.array(res.reshape((m,) * n))


def default_variables(k: int) -> list[str]:
    return [f"x{i}" for i in range(k)]


def evaluate(f: Formula, structure, k: int) -> frozenset[tuple[int, ...]]:
    """Truth set of ``f`` in ``M^k`` with free variables among ``x0..x(k-1)``."""
    arr = truth_array(f, structure, default_variables(k))
    return frozenset(tuple(int(v) for v in t) for t in np.argwhere(arr))
