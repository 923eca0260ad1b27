"""Small expression language for kernels and matrix entries.

Grammar (EBNF, also documented in the README):

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = "-" , unary | power ;
    power    = atom , [ "^" , unary ] ;
    atom     = number | "nrm" , "(" , "y" , ")" | variable
             | "exp" | "abs" , "(" , expr , ")"
             | "min" | "max" , "(" , expr , "," , expr , ")"
             | "chi" , "(" , bound , "," , bound , ")" , "(" , expr , ")"
             | "(" , expr , ")" ;
    bound    = [ "-" ] , ( number | "inf" ) ;
    variable = "y1" | "y2" | ... ;

"^" binds tighter than unary minus, which binds tighter than "*" and "/",
which bind tighter than "+" and "-".  "^" is right associative.
chi(a,b) is the indicator of the open interval (a,b) applied to a scalar
argument; the upper bound may be the token inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import HauscertError

__all__ = [
    "Expr",
    "ExprSyntaxError",
    "UnknownIdentifier",
    "ArityError",
    "DomainError",
    "parse_expr",
    "eval_expr",
]


class ExprSyntaxError(HauscertError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class UnknownIdentifier(HauscertError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} (byte offset {offset})")
        self.name = name
        self.offset = offset


class ArityError(HauscertError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class DomainError(HauscertError):
    """Evaluation hit a singular point; carries the offending subexpression."""

    def __init__(self, message, subexpr):
        super().__init__(f"{message} in {subexpr!r}")
        self.subexpr = subexpr


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based; prints as y{index+1}


@dataclass(frozen=True)
class Nrm:
    pass


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str  # exp, abs, min, max
    args: tuple


@dataclass(frozen=True)
class Chi:
    lo: float
    hi: float
    arg: object


_FUNCTIONS = {"exp": 1, "abs": 1, "min": 2, "max": 2}


@dataclass(frozen=True)
class Expr:
    """Parsed expression over y1..y_dim and nrm(y)."""

    root: object
    dim: int
    source: str

    def __call__(self, y):
        return eval_expr(self, y)

    def __str__(self):
        return _to_str(self.root, 0)

    def uses_only_norm(self):
        """True when no bare coordinate y_i appears (radial expression)."""
        return not _uses_var(self.root)


def _uses_var(node):
    if isinstance(node, Var):
        return True
    if isinstance(node, Neg):
        return _uses_var(node.arg)
    if isinstance(node, BinOp):
        return _uses_var(node.left) or _uses_var(node.right)
    if isinstance(node, Call):
        return any(_uses_var(a) for a in node.args)
    if isinstance(node, Chi):
        return _uses_var(node.arg)
    return False


# ---------------------------------------------------------------------------
# Tokenizer

_SINGLE = set("+-*/^(),")


def _byte_offset(text, pos):
    return len(text[:pos].encode("utf-8", errors="replace"))


def _tokenize(text):
    tokens = []  # (kind, value, char_pos)
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _SINGLE:
            tokens.append((c, c, i))
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            try:
                value = float(text[i:j])
            except ValueError:
                raise ExprSyntaxError("malformed number", _byte_offset(text, i))
            tokens.append(("num", value, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", _byte_offset(text, i))
    tokens.append(("eof", None, n))
    return tokens


# ---------------------------------------------------------------------------
# Recursive-descent parser


class _Parser:
    def __init__(self, text, dim):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise self.error(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def error(self, message, char_pos):
        return ExprSyntaxError(message, _byte_offset(self.text, char_pos))

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "eof":
            raise self.error(f"trailing input {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[0] == "^":
            self.next()
            node = BinOp("^", node, self.unary())
        return node

    def bound(self):
        sign = 1.0
        if self.peek()[0] == "-":
            self.next()
            sign = -1.0
        tok = self.next()
        if tok[0] == "num":
            return sign * tok[1]
        if tok[0] == "ident" and tok[1] == "inf":
            return sign * math.inf
        raise self.error("chi bound must be a number or inf", tok[2])

    def atom(self):
        tok = self.next()
        kind, value, pos = tok
        if kind == "num":
            return Num(value)
        if kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            if value == "nrm":
                self.expect("(")
                inner = self.next()
                if inner[0] != "ident" or inner[1] != "y":
                    raise self.error("nrm takes the bare vector y", inner[2])
                self.expect(")")
                return Nrm()
            if value == "chi":
                self.expect("(")
                lo = self.bound()
                self.expect(",")
                hi = self.bound()
                self.expect(")")
                if self.peek()[0] != "(":
                    raise ArityError(
                        "chi(a,b) must be applied to a scalar argument",
                        _byte_offset(self.text, self.peek()[2]),
                    )
                self.next()
                arg = self.expr()
                self.expect(")")
                return Chi(lo, hi, arg)
            if value in _FUNCTIONS:
                arity = _FUNCTIONS[value]
                self.expect("(")
                args = [self.expr()]
                while self.peek()[0] == ",":
                    self.next()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != arity:
                    raise ArityError(
                        f"{value} takes {arity} argument(s), got {len(args)}",
                        _byte_offset(self.text, pos),
                    )
                return Call(value, tuple(args))
            if len(value) >= 2 and value[0] == "y" and value[1:].isdigit():
                index = int(value[1:])
                if 1 <= index <= self.dim:
                    return Var(index - 1)
                raise UnknownIdentifier(value, _byte_offset(self.text, pos))
            raise UnknownIdentifier(value, _byte_offset(self.text, pos))
        raise self.error(f"unexpected token {value!r}", pos)


def parse_expr(text, dim):
    """Parse ``text`` into an Expr over y1..y_dim."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    root = _Parser(text, dim).parse()
    return Expr(root, dim, text)


# ---------------------------------------------------------------------------
# Evaluation


def eval_expr(e, y):
    """Evaluate at a point of R^dim (a scalar is accepted when dim == 1)."""
    try:
        point = tuple(float(v) for v in y)
    except TypeError:
        point = (float(y),)
    if len(point) != e.dim:
        raise ValueError(f"point has dimension {len(point)}, expected {e.dim}")
    return _eval(e.root, point)


def _eval(node, y):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return y[node.index]
    if isinstance(node, Nrm):
        return math.sqrt(math.fsum(v * v for v in y))
    if isinstance(node, Neg):
        return -_eval(node.arg, y)
    if isinstance(node, BinOp):
        a = _eval(node.left, y)
        b = _eval(node.right, y)
        try:
            if node.op == "+":
                r = a + b
            elif node.op == "-":
                r = a - b
            elif node.op == "*":
                r = a * b
            elif node.op == "/":
                r = a / b
            else:
                r = a ** b
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise DomainError(str(exc), _to_str(node, 0)) from None
        if isinstance(r, complex) or not math.isfinite(r):
            raise DomainError("non-finite result", _to_str(node, 0))
        return r
    if isinstance(node, Call):
        args = [_eval(a, y) for a in node.args]
        try:
            if node.name == "exp":
                return math.exp(args[0])
            if node.name == "abs":
                return abs(args[0])
            if node.name == "min":
                return min(args)
            return max(args)
        except OverflowError:
            raise DomainError("overflow", _to_str(node, 0)) from None
    if isinstance(node, Chi):
        s = _eval(node.arg, y)
        return 1.0 if node.lo < s < node.hi else 0.0
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Pretty printer (round-trips through parse_expr)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _fmt_num(v):
    if v == math.inf:
        return "inf"
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _to_str(node, parent_prec):
    if isinstance(node, Num):
        s = _fmt_num(node.value)
        if node.value < 0 and parent_prec > 0:
            return f"({s})"
        return s
    if isinstance(node, Var):
        return f"y{node.index + 1}"
    if isinstance(node, Nrm):
        return "nrm(y)"
    if isinstance(node, Neg):
        s = "-" + _to_str(node.arg, _PREC["neg"])
        return f"({s})" if parent_prec > _PREC["neg"] else s
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        # left operand at this level, right one step tighter (left assoc);
        # for ^ it is the other way round (right assoc).
        if node.op == "^":
            s = f"{_to_str(node.left, prec + 1)}^{_to_str(node.right, prec)}"
        else:
            s = f"{_to_str(node.left, prec)}{node.op}{_to_str(node.right, prec + 1)}"
        return f"({s})" if parent_prec > prec else s
    if isinstance(node, Call):
        inner = ",".join(_to_str(a, 0) for a in node.args)
        return f"{node.name}({inner})"
    if isinstance(node, Chi):
        return f"chi({_fmt_num(node.lo)},{_fmt_num(node.hi)})({_to_str(node.arg, 0)})"
    raise TypeError(f"unknown node {node!r}")
