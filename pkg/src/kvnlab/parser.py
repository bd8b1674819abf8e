"""Recursive-descent parser for Hamiltonians, observables and states.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | atom ('^' uint)?
    atom   := rational | 'i' | symbol | '(' expr ')'
    rational := uint ('/' uint)?

Symbols are ``q_k``, ``p_k``, ``lam_q_k``, ``lam_p_k``, ``c_q_k``, ``c_p_k``,
``cbar_q_k``, ``cbar_p_k``, ``theta`` and ``thetabar`` with ``1 <= k <= dof``.
Literals are exact rationals so the symbolic pipeline never sees a float.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, TypeVar, Union

from .errors import ParseError, UnsupportedInputError
from .poly import Poly
from .scalar import Scalar
from .superops import OperatorSum
from .superspace import Fields, SuperspaceExpression

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    field: str  # phi, lam, c, cbar, theta, thetabar
    index: int | None  # 0-based phase-space index

    @property
    def grassmann(self) -> bool:
        return self.field in ("c", "cbar", "theta", "thetabar")


@dataclass(frozen=True)
class Add:
    first: "Node"
    rest: tuple[tuple[str, "Node"], ...]


@dataclass(frozen=True)
class Mul:
    factors: tuple["Node", ...]


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"


Node = Union[Num, Imag, Symbol, Add, Mul, Pow, Neg]

_SYMBOL = re.compile(r"^(lam_|cbar_|c_)?([qp])_([1-9][0-9]*)$")


def resolve_symbol(name: str, dof: int) -> Symbol | None:
    if name in ("theta", "thetabar"):
        return Symbol(name, name, None)
    m = _SYMBOL.match(name)
    if not m:
        return None
    prefix, qp, k = m.groups()
    k = int(k)
    if k > dof:
        return None
    field = {None: "phi", "lam_": "lam", "c_": "c", "cbar_": "cbar"}[prefix]
    return Symbol(name, field, 2 * (k - 1) + (qp == "p"))


def contains_grassmann(node: Node) -> bool:
    if isinstance(node, Symbol):
        return node.grassmann
    if isinstance(node, Add):
        return contains_grassmann(node.first) or any(contains_grassmann(t) for _, t in node.rest)
    if isinstance(node, Mul):
        return any(contains_grassmann(f) for f in node.factors)
    if isinstance(node, (Pow,)):
        return contains_grassmann(node.base)
    if isinstance(node, Neg):
        return contains_grassmann(node.operand)
    return False


def symbols(node: Node) -> set[Symbol]:
    if isinstance(node, Symbol):
        return {node}
    if isinstance(node, Add):
        return symbols(node.first).union(*(symbols(t) for _, t in node.rest))
    if isinstance(node, Mul):
        return set().union(*(symbols(f) for f in node.factors))
    if isinstance(node, Pow):
        return symbols(node.base)
    if isinstance(node, Neg):
        return symbols(node.operand)
    return set()


# ---------------------------------------------------------------------------
# lexer and parser

@dataclass(frozen=True)
class _Tok:
    kind: str  # int, name, op, end
    text: str
    line: int
    col: int


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")


def _tokenize(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, col = 0, 1, 1
    while pos < len(source):
        ch = source[pos]
        if ch == "\n":
            pos, line, col = pos + 1, line + 1, 1
            continue
        if ch.isspace():
            pos, col = pos + 1, col + 1
            continue
        m = _INT.match(source, pos) or _NAME.match(source, pos)
        if m:
            text = m.group()
            toks.append(_Tok("int" if text[0].isdigit() else "name", text, line, col))
        elif ch in "+-*/^()":
            text = ch
            toks.append(_Tok("op", ch, line, col))
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        pos += len(text)
        col += len(text)
    toks.append(_Tok("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, source: str, dof: int):
        self.toks = _tokenize(source)
        self.i = 0
        self.dof = dof

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        return ParseError(f"{msg}, found {found}", tok.line, tok.col)

    def _accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self._error("expected an operator or end of input")
        return node

    def expr(self) -> Node:
        first = self.term()
        rest = []
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            rest.append((op, self.term()))
        return Add(first, tuple(rest)) if rest else first

    def term(self) -> Node:
        factors = [self.factor()]
        while self._accept("*"):
            factors.append(self.factor())
        return Mul(tuple(factors)) if len(factors) > 1 else factors[0]

    def factor(self) -> Node:
        if self._accept("-"):
            return Neg(self.factor())
        start = self.tok
        base = self.atom()
        if self._accept("^"):
            tok = self.tok
            if tok.kind != "int":
                raise self._error("expected a nonnegative integer exponent")
            self.i += 1
            k = int(tok.text)
            if k > 1 and contains_grassmann(base):
                raise ParseError("Grassmann variable raised to a power above 1", start.line, start.col)
            return Pow(base, k)
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            num = int(tok.text)
            if self._accept("/"):
                den_tok = self.tok
                if den_tok.kind != "int":
                    raise self._error("expected a denominator")
                self.i += 1
                den = int(den_tok.text)
                if den == 0:
                    raise ParseError("zero denominator", den_tok.line, den_tok.col)
                return Num(Fraction(num, den))
            return Num(Fraction(num))
        if tok.kind == "name":
            self.i += 1
            if tok.text == "i":
                return Imag()
            sym = resolve_symbol(tok.text, self.dof)
            if sym is None:
                raise ParseError(f"unknown symbol {tok.text!r} for dof = {self.dof}", tok.line, tok.col)
            return sym
        if self._accept("("):
            node = self.expr()
            if not self._accept(")"):
                raise self._error("expected ')'")
            return node
        raise self._error("expected a number, 'i', a symbol or '('")


def parse(source: str, dof: int = 1) -> Node:
    """Parse ``source`` into an AST; raises ParseError with a 1-based location."""
    if dof < 1:
        raise ParseError(f"dof must be at least 1, got {dof}", 1, 1)
    return _Parser(source, dof).parse()


# ---------------------------------------------------------------------------
# printing


def _wrap(node: Node, when: tuple[type, ...]) -> str:
    s = pretty(node)
    return f"({s})" if isinstance(node, when) else s


def pretty(node: Node) -> str:
    """Canonical text; ``parse(pretty(ast)) == ast``."""
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Symbol):
        return node.name
    if isinstance(node, Add):
        out = _wrap(node.first, (Add,))
        for op, t in node.rest:
            out += f" {op} " + _wrap(t, (Add,))
        return out
    if isinstance(node, Mul):
        return "*".join(_wrap(f, (Add, Mul)) for f in node.factors)
    if isinstance(node, Pow):
        return _wrap(node.base, (Add, Mul, Neg, Pow)) + f"^{node.exponent}"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, (Add, Mul))
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# evaluation into the algebraic layers

T = TypeVar("T")


def fold(node: Node, leaf: Callable[[Symbol], T], const: Callable[[Scalar], T]) -> T:
    """Evaluate the AST with user-supplied leaves; products keep their
    written order, which matters for operators and Grassmann variables."""
    if isinstance(node, Num):
        return const(Scalar(node.value))
    if isinstance(node, Imag):
        return const(Scalar(0, 1))
    if isinstance(node, Symbol):
        return leaf(node)
    if isinstance(node, Add):
        out = fold(node.first, leaf, const)
        for op, t in node.rest:
            v = fold(t, leaf, const)
            out = out + v if op == "+" else out - v
        return out
    if isinstance(node, Mul):
        out = fold(node.factors[0], leaf, const)
        for f in node.factors[1:]:
            out = out * fold(f, leaf, const)
        return out
    if isinstance(node, Pow):
        return fold(node.base, leaf, const) ** node.exponent
    if isinstance(node, Neg):
        return -fold(node.operand, leaf, const)
    raise TypeError(f"not an AST node: {node!r}")


def to_poly(node: Node, dof: int) -> Poly:
    """Polynomial in (q_1, p_1, ..., q_n, p_n)."""
    nv = 2 * dof

    def leaf(s: Symbol) -> Poly:
        if s.field != "phi":
            raise UnsupportedInputError(f"{s.name} cannot appear in a phase-space polynomial")
        return Poly.var(nv, s.index)

    return fold(node, leaf, lambda c: Poly.const(nv, c))


def to_operator(node: Node, dof: int) -> OperatorSum:
    """Normal-ordered operator; products are composed left to right."""
    dim = 2 * dof

    def leaf(s: Symbol) -> OperatorSum:
        if s.field in ("theta", "thetabar"):
            raise UnsupportedInputError(f"{s.name} is not an operator")
        return getattr(OperatorSum, s.field)(dim, s.index)

    return fold(node, leaf, lambda c: OperatorSum.scalar(dim, c))


def to_superspace(node: Node, dof: int, fields: Fields | None = None) -> SuperspaceExpression:
    """Classical superspace expression over the jet fields."""
    f = fields or Fields(dof)

    def leaf(s: Symbol) -> SuperspaceExpression:
        if s.field in ("theta", "thetabar"):
            return getattr(f, s.field)
        return getattr(f, s.field)(s.index)

    return fold(node, leaf, f.const)


def parse_poly(source: str, dof: int = 1) -> Poly:
    return to_poly(parse(source, dof), dof)
