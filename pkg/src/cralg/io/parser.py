"""Reader and printer for ``.crm`` problem files and series files.

A file is a sequence of statements ``name = expr;`` with ``#`` line
comments.  Expressions are parsed to a small syntax tree first and then
evaluated in one of three modes: polynomial (defining functions),
rational (map components) or truncated series (``f = ...`` in series
files, where rational powers and ``exp`` are allowed).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from gmpy2 import mpq

from ..core.numbers import I, ZERO, GaussianRational
from ..core.polynomial import MultiPolynomial, VariableTable, conjugate_swap
from ..core.rational import RationalFunction
from ..errors import CRAlgError, ParseError

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()=;,]))")

INT_OPTIONS = ("order", "qmax", "kmax", "degree", "samples", "margin")
TEXT_OPTIONS = ("families", "theta_grid", "var")


# --- syntax tree --------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: GaussianRational
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Name:
    name: str
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Neg:
    arg: "Node"
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Tuple:
    items: tuple
    pos: tuple = field(default=(0, 0), compare=False)


Node = Union[Num, Name, BinOp, Neg, Call, Tuple]
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def to_text(node: Node, parent: int = 0) -> str:
    """Print a syntax tree with the parentheses it needs."""
    if isinstance(node, Num):
        v = node.value
        if v.im and v.re:
            return f"({v.re} + {v.im}*i)" if v.im > 0 else f"({v.re} - {-v.im}*i)"
        if v.im:
            s = "i" if v.im == 1 else f"{v.im}*i"
            return f"({s})" if v.im < 0 or v.im.denominator != 1 else s
        s = str(v.re)
        return f"({s})" if v.re < 0 or "/" in s else s
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Neg):
        s = "-" + to_text(node.arg, 3)
        return f"({s})" if parent else s
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Tuple):
        return "(" + ", ".join(to_text(x) for x in node.items) + ")"
    p = _PREC[node.op]
    if node.op == "^":
        s = f"{to_text(node.left, 4)}^{to_text(node.right, 4)}"
    else:
        s = f"{to_text(node.left, p)} {node.op} {to_text(node.right, p + 1)}"
    return f"({s})" if p < parent else s


# --- tokenizer and recursive descent --------------------------------------

@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[_Tok]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos:].strip() == "":
                break
            m = _TOKEN.match(line, pos)
            if m is None or m.end() == pos:
                col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
                raise ParseError(f"unexpected character {line[col - 1]!r}", lineno, col)
            kind = m.lastgroup
            col = m.start(kind) + 1
            out.append(_Tok(kind, m.group(kind), lineno, col))
            pos = m.end()
    lines = text.splitlines() or [""]
    out.append(_Tok("eof", "", len(lines), len(lines[-1].rstrip()) + 1))
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message, tok=None):
        tok = tok or self.cur
        raise ParseError(message, tok.line, tok.col)

    def take(self, text=None, kind=None) -> _Tok:
        tok = self.cur
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = repr(text) if text is not None else kind
            got = repr(tok.text) if tok.kind != "eof" else "end of input"
            self.error(f"expected {want}, found {got}")
        self.i += 1
        return tok

    def statements(self):
        while self.cur.kind != "eof":
            name = self.take(kind="name")
            self.take("=")
            expr = self.expr()
            self.take(";")
            yield name, expr

    def expr(self) -> Node:
        node = self.term()
        while self.cur.text in ("+", "-") and self.cur.kind == "op":
            tok = self.take()
            node = BinOp(tok.text, node, self.term(), (tok.line, tok.col))
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.cur.text in ("*", "/") and self.cur.kind == "op":
            tok = self.take()
            node = BinOp(tok.text, node, self.unary(), (tok.line, tok.col))
        return node

    def unary(self) -> Node:
        if self.cur.text in ("-", "+") and self.cur.kind == "op":
            tok = self.take()
            arg = self.unary()
            return Neg(arg, (tok.line, tok.col)) if tok.text == "-" else arg
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.cur.text == "^":
            tok = self.take()
            # right associative; a signed exponent is allowed
            return BinOp("^", base, self.unary(), (tok.line, tok.col))
        return base

    def atom(self) -> Node:
        tok = self.cur
        pos = (tok.line, tok.col)
        if tok.kind == "num":
            self.take()
            return Num(GaussianRational(int(tok.text)), pos)
        if tok.kind == "name":
            self.take()
            if tok.text == "i":
                return Num(I, pos)
            if self.cur.text == "(":
                self.take("(")
                arg = self.expr()
                self.take(")")
                if tok.text not in ("conj", "exp"):
                    self.error(f"unknown function {tok.text!r}", tok)
                return Call(tok.text, arg, pos)
            return Name(tok.text, pos)
        if tok.text == "(":
            self.take()
            first = self.expr()
            if self.cur.text == ",":
                items = [first]
                while self.cur.text == ",":
                    self.take()
                    items.append(self.expr())
                self.take(")")
                return Tuple(tuple(items), pos)
            self.take(")")
            return first
        got = repr(tok.text) if tok.kind != "eof" else "end of input"
        self.error(f"expected an expression, found {got}")


def parse_expression(text: str) -> Node:
    p = _Parser(tokenize(text))
    node = p.expr()
    p.take(kind="eof")
    return node


def parse_statements(text: str) -> list[tuple[str, Node, tuple]]:
    return [(tok.text, expr, (tok.line, tok.col)) for tok, expr in _Parser(tokenize(text)).statements()]


# --- evaluation ------------------------------------------------------------

def _fail(message: str, node) -> None:
    raise ParseError(message, *node.pos) if node.pos != (0, 0) else ParseError(message)


def constant_value(node: Node) -> GaussianRational:
    """Evaluate an expression without variables."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg):
        return -constant_value(node.arg)
    if isinstance(node, BinOp):
        a, b = constant_value(node.left), constant_value(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if not b:
                _fail("division by zero", node)
            return a / b
        return a ** _int_exponent(node.right)
    _fail("expected a constant", node)


def _rational_exponent(node: Node) -> mpq:
    v = constant_value(node)
    if v.im:
        _fail("exponents must be rational", node)
    return v.re


def _int_exponent(node: Node) -> int:
    v = _rational_exponent(node)
    if v.denominator != 1:
        _fail(f"exponent {v} is not an integer; fractional powers only work in series files", node)
    return int(v)


class _Evaluator:
    """Evaluate a tree to polynomials, rational functions or series.

    ``allowed`` is the set of declared variable names; ``mode`` is one of
    ``"poly"``, ``"rational"``, ``"series"``.
    """

    def __init__(self, table: VariableTable, mode: str, order: int | None = None):
        self.table = table
        self.mode = mode
        self.order = order

    def lift(self, c: GaussianRational):
        p = MultiPolynomial.constant(c, self.table)
        if self.mode == "series":
            return p.truncate(self.order)
        if self.mode == "rational":
            return RationalFunction(p)
        return p

    def __call__(self, node: Node):
        if isinstance(node, Num):
            return self.lift(node.value)
        if isinstance(node, Name):
            if node.name not in self.table:
                _fail(f"undeclared variable {node.name!r}", node)
            p = MultiPolynomial.variable(node.name, self.table)
            if self.mode == "series":
                return p.truncate(self.order)
            return RationalFunction(p) if self.mode == "rational" else p
        if isinstance(node, Neg):
            return -self(node.arg)
        if isinstance(node, Tuple):
            _fail("a tuple is not allowed here", node)
        if isinstance(node, Call):
            arg = self(node.arg)
            if node.func == "conj":
                return arg.conjugate_swap() if not isinstance(arg, MultiPolynomial) else conjugate_swap(arg)
            if self.mode != "series":
                _fail("exp() is only available in series files", node)
            try:
                return arg.exp()
            except CRAlgError as exc:
                _fail(str(exc), node)
        op = node.op
        if op == "^":
            base = self(node.left)
            if self.mode == "series":
                e = _rational_exponent(node.right)
                try:
                    return base.power(e)
                except (CRAlgError, ZeroDivisionError) as exc:
                    _fail(f"cannot raise to {e}: {exc}", node)
            k = _int_exponent(node.right)
            if k < 0 and self.mode != "rational":
                _fail("negative exponent in a polynomial", node)
            return base ** k
        a, b = self(node.left), self(node.right)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if self.mode == "poly":
            if not b.is_constant() or not b.constant_term():
                _fail("division is only allowed by a nonzero constant here", node)
            return a.scale(b.constant_term().inverse())
        try:
            return a / b
        except ZeroDivisionError as exc:
            _fail(f"division failed: {exc}", node)


# --- problem files ---------------------------------------------------------

@dataclass
class ProblemFile:
    """Everything a ``.crm`` file can declare; absent entries stay empty."""

    n: int | None = None
    n_prime: int | None = None
    rho: list = field(default_factory=list)
    rho_prime: list = field(default_factory=list)
    F: list = field(default_factory=list)
    p: tuple | None = None
    f: Node | None = None
    options: dict = field(default_factory=dict)

    def source_table(self) -> VariableTable:
        return VariableTable.complex(self.n or 0)

    def target_table(self) -> VariableTable:
        return VariableTable.complex(self.n_prime or 0)

    def basepoint(self) -> tuple:
        return self.p if self.p is not None else tuple([ZERO] * (self.n or 0))

    def option(self, name, default=None):
        return self.options.get(name, default)


def _indexed(name: str, prefix: str) -> int | None:
    m = re.fullmatch(prefix + r"(\d+)", name)
    return int(m.group(1)) if m else None


def _check_real(name: str, poly: MultiPolynomial, pos) -> None:
    diff = poly - conjugate_swap(poly)
    if not diff.is_zero():
        raise ParseError(f"{name} is not real: {name} - conj({name}) = {diff.to_expr()}", *pos)


def _collect(stmts, prefix):
    found = {}
    for name, expr, pos in stmts:
        k = _indexed(name, prefix)
        if k is not None:
            found[k] = (expr, pos)
    if found and sorted(found) != list(range(1, len(found) + 1)):
        raise ParseError(f"{prefix} definitions must be numbered 1..{len(found)}, got {sorted(found)}")
    return [found[k] for k in sorted(found)]


def parse_input(text: str) -> ProblemFile:
    """Parse a problem file.  Raises ParseError with line and column."""
    stmts = parse_statements(text)
    seen = {}
    for name, expr, pos in stmts:
        if name in seen:
            raise ParseError(f"{name!r} is defined twice", *pos)
        seen[name] = expr
    known = re.compile(r"^(n|np|p|f|rho\d+|rhop\d+|F\d+)$")
    for name, expr, pos in stmts:
        if not known.match(name) and name not in INT_OPTIONS + TEXT_OPTIONS:
            raise ParseError(f"unknown statement {name!r}", *pos)

    pf = ProblemFile()
    for name, expr, pos in stmts:
        if name in INT_OPTIONS or name in ("n", "np"):
            v = constant_value(expr)
            if v.im or v.re.denominator != 1 or v.re < 0:
                raise ParseError(f"{name} must be a nonnegative integer", *pos)
            if name == "n":
                pf.n = int(v.re)
            elif name == "np":
                pf.n_prime = int(v.re)
            else:
                pf.options[name] = int(v.re)
        elif name in TEXT_OPTIONS:
            if not isinstance(expr, Name):
                raise ParseError(f"{name} must be a bare word", *pos)
            pf.options[name] = expr.name

    rhos, rhops, maps = _collect(stmts, "rho"), _collect(stmts, "rhop"), _collect(stmts, "F")
    if (rhos or maps or "p" in seen) and pf.n is None:
        raise ParseError("the source dimension n must be declared")
    if rhops and pf.n_prime is None:
        pf.n_prime = pf.n
    if maps and pf.n_prime is None:
        pf.n_prime = len(maps)

    poly_src = _Evaluator(pf.source_table(), "poly")
    for k, (expr, pos) in enumerate(rhos, start=1):
        r = poly_src(expr)
        _check_real(f"rho{k}", r, pos)
        pf.rho.append(r)
    poly_tgt = _Evaluator(pf.target_table(), "poly")
    for k, (expr, pos) in enumerate(rhops, start=1):
        r = poly_tgt(expr)
        _check_real(f"rhop{k}", r, pos)
        pf.rho_prime.append(r)
    if maps and len(maps) != pf.n_prime:
        raise ParseError(f"expected {pf.n_prime} map components F1..F{pf.n_prime}, got {len(maps)}")
    rat = _Evaluator(pf.source_table(), "rational")
    for expr, pos in maps:
        c = rat(expr)
        if any(v.startswith("zb") for v in c.num.used_variables() + c.den.used_variables()):
            raise ParseError("map components must be holomorphic (no zb variables)", *pos)
        pf.F.append(c)

    if "p" in seen:
        expr = seen["p"]
        items = expr.items if isinstance(expr, Tuple) else (expr,)
        pf.p = tuple(constant_value(x) for x in items)
        if len(pf.p) != pf.n:
            raise ParseError(f"basepoint has {len(pf.p)} coordinates, expected {pf.n}", *expr.pos)
        for k, c in enumerate(pf.F, start=1):
            if not c.den.evaluate(dict(zip([f"z{j}" for j in range(1, pf.n + 1)], pf.p))):
                raise ParseError(f"the denominator of F{k} vanishes at the basepoint")
    if "f" in seen:
        pf.f = seen["f"]
        series_variables(pf)  # validates names early
    return pf


def series_variables(pf: ProblemFile) -> list[str]:
    """Free variables of ``f``: t by default, or z1..zn when n is declared."""
    names = set()

    def walk(node):
        if isinstance(node, Name):
            names.add(node)
        for child in ("left", "right", "arg"):
            if hasattr(node, child):
                walk(getattr(node, child))

    walk(pf.f)
    if pf.n is not None:
        allowed = [f"z{j}" for j in range(1, pf.n + 1)]
    else:
        allowed = [pf.options.get("var", "t")]
    for node in sorted(names, key=lambda x: x.pos):
        if node.name not in allowed:
            _fail(f"undeclared variable {node.name!r} (allowed: {', '.join(allowed)})", node)
    return allowed


def evaluate_series(pf: ProblemFile, order: int) -> MultiPolynomial:
    """``f`` as an exact polynomial if possible, else as a series to ``order``."""
    names = series_variables(pf)
    table = VariableTable.from_names(names, with_partners=False)
    try:
        return _Evaluator(table, "poly")(pf.f)
    except ParseError:
        pass
    return _Evaluator(table, "series", order)(pf.f)


def evaluate_rational(pf: ProblemFile) -> RationalFunction | None:
    """``f`` as a rational function of z when it is one; otherwise None."""
    names = series_variables(pf)
    table = VariableTable.from_names(names, with_partners=False)
    try:
        return _Evaluator(table, "rational")(pf.f)
    except ParseError:
        return None


def load(path: str) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_input(fh.read())


# --- printing --------------------------------------------------------------

def format_problem(pf: ProblemFile) -> str:
    """Text that :func:`parse_input` reads back to an equal ProblemFile."""
    lines = []
    if pf.n is not None:
        lines.append(f"n = {pf.n};")
    if pf.n_prime is not None:
        lines.append(f"np = {pf.n_prime};")
    lines += [f"rho{k} = {r.to_expr()};" for k, r in enumerate(pf.rho, start=1)]
    lines += [f"rhop{k} = {r.to_expr()};" for k, r in enumerate(pf.rho_prime, start=1)]
    for k, c in enumerate(pf.F, start=1):
        if c.is_polynomial():
            lines.append(f"F{k} = {c.num.to_expr()};")
        else:
            lines.append(f"F{k} = ({c.num.to_expr()})/({c.den.to_expr()});")
    if pf.p is not None:
        lines.append("p = (" + ", ".join(_gr_expr(c) for c in pf.p) + ");")
    if pf.f is not None:
        lines.append(f"f = {to_text(pf.f)};")
    for key in sorted(pf.options):
        lines.append(f"{key} = {pf.options[key]};")
    return "\n".join(lines) + "\n"


def _gr_expr(c: GaussianRational) -> str:
    return to_text(Num(c)) if c != ZERO else "0"
