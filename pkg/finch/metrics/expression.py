"""
Metric expression language

A small recursive-descent parser over the grammar

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | factor
    factor   := base ('^' exponent)?
    base     := number | var | func '(' args ')' | '(' expr ')'
    var      := 'x'k | 'y'k                    (1 <= k <= dim)
    func     := sqrt | exp | log | dot | norm2
    exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'

``dot`` and ``norm2`` take the bare vector names ``x`` and ``y``. The parse
tree evaluates on floats or on jets, so one expression drives both plain
kernel evaluation and derivative tables.
"""
import functools
import logging
import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from ..errors import ArityError, DomainError, ParseError
from ..jets import jet as jetmath

logger = logging.getLogger(__name__)

FUNCTIONS = ("sqrt", "exp", "log", "dot", "norm2")
_SCALAR_FUNCTIONS = {"sqrt": jetmath.sqrt, "exp": jetmath.exp, "log": jetmath.log}
_VECTOR_FUNCTIONS = {"dot": 2, "norm2": 1}

_TOKEN_REGEXP = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)
_VARIABLE_REGEXP = re.compile(r"^([xy])(\d+)$")

_OPERAND_START = {"number", "variable", "function", "'('", "'-'"}


@dataclass(frozen=True)
class Token:
    kind: str       # number, name, op, end
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    """Split expression text into tokens; whitespace is dropped"""
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _TOKEN_REGEXP.match(text, position)
        if match is None or match.end() == position:
            start = position + len(text[position:]) - len(text[position:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, _OPERAND_START)
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind)))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# ── parse tree ───────────────────────────────────────────────────────────────


class Node:
    """Base class of parse tree nodes"""

    def evaluate(self, xs: Sequence, ys: Sequence):
        raise NotImplementedError


@dataclass(frozen=True)
class Number(Node):
    value: float

    def evaluate(self, xs, ys):
        return self.value


@dataclass(frozen=True)
class Var(Node):
    name: str       # "x" or "y"
    index: int      # 0-based

    def evaluate(self, xs, ys):
        return (xs if self.name == "x" else ys)[self.index]


@dataclass(frozen=True)
class Vector(Node):
    """A bare vector name, only valid as an argument of dot/norm2"""

    name: str

    def components(self, xs, ys):
        return xs if self.name == "x" else ys

    def evaluate(self, xs, ys):
        raise ArityError(f"vector {self.name} used as a scalar")


def _divide(left, right):
    try:
        return left / right
    except ZeroDivisionError:
        raise DomainError("division by zero")


_OPERATORS = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": _divide}


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, xs, ys):
        return _OPERATORS[self.op](self.left.evaluate(xs, ys), self.right.evaluate(xs, ys))


@dataclass(frozen=True)
class Neg(Node):
    operand: Node

    def evaluate(self, xs, ys):
        return -self.operand.evaluate(xs, ys)


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: Fraction

    def evaluate(self, xs, ys):
        try:
            return jetmath.power(self.base.evaluate(xs, ys), self.exponent)
        except ZeroDivisionError:
            raise DomainError(f"negative power {self.exponent} of zero")


@dataclass(frozen=True)
class Call(Node):
    func: str
    args: Tuple[Node, ...]

    def evaluate(self, xs, ys):
        if self.func in _SCALAR_FUNCTIONS:
            return _SCALAR_FUNCTIONS[self.func](self.args[0].evaluate(xs, ys))
        vectors = [arg.components(xs, ys) for arg in self.args]
        if self.func == "dot":
            terms = [a * b for a, b in zip(*vectors)]
        else:
            terms = [v * v for v in vectors[0]]
        return functools.reduce(operator.add, terms)


# ── parser ───────────────────────────────────────────────────────────────────


class Parser:
    """Recursive-descent parser producing a Node tree"""

    def __init__(self, text: str, dim: int, allow_fibre: bool = True):
        if dim < 1:
            raise ArityError(f"dimension must be positive, got {dim}")
        self.text = text
        self.dim = dim
        self.allow_fibre = allow_fibre
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def _fail(self, expected, message: Optional[str] = None):
        token = self.current
        if message is None:
            message = "unexpected end of input" if token.kind == "end" else f"unexpected {token.text!r}"
        raise ParseError(message, token.position, expected)

    def _accept(self, op: str) -> bool:
        if self.current.kind == "op" and self.current.text == op:
            self.pos += 1
            return True
        return False

    def _expect(self, op: str):
        if not self._accept(op):
            self._fail({f"'{op}'"})

    def parse(self) -> Node:
        node = self.expr()
        if self.current.kind != "end":
            self._fail({"end of input", "'+'", "'-'", "'*'", "'/'", "'^'"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self._advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self._accept("-"):
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> Node:
        node = self.base()
        if self._accept("^"):
            node = Pow(node, self.exponent())
        return node

    def _integer(self) -> int:
        token = self.current
        if token.kind != "number" or not token.text.isdigit():
            self._fail({"integer"})
        self.pos += 1
        return int(token.text)

    def exponent(self) -> Fraction:
        if self._accept("("):
            sign = -1 if self._accept("-") else 1
            numerator = self._integer()
            denominator = 1
            if self._accept("/"):
                position = self.current.position
                denominator = self._integer()
                if denominator == 0:
                    raise ParseError("zero denominator in exponent", position, {"positive integer"})
            self._expect(")")
            return Fraction(sign * numerator, denominator)
        sign = -1 if self._accept("-") else 1
        if self.current.kind != "number" or not self.current.text.isdigit():
            self._fail({"integer", "'('", "'-'"})
        return Fraction(sign * self._integer())

    def base(self) -> Node:
        token = self.current
        if token.kind == "number":
            self.pos += 1
            return Number(float(token.text))
        if token.kind == "name":
            return self._name()
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        self._fail(_OPERAND_START)

    def _variable(self, token: Token) -> Node:
        match = _VARIABLE_REGEXP.match(token.text)
        name, index = match.group(1), int(match.group(2))
        if name == "y" and not self.allow_fibre:
            raise ParseError(f"fibre variable {token.text} in an x-only expression", token.position, {"x1..x%d" % self.dim})
        if not 1 <= index <= self.dim:
            raise ArityError(
                f"variable {token.text} at position {token.position} is out of range for dimension {self.dim}"
            )
        return Var(name, index - 1)

    def _name(self) -> Node:
        token = self._advance()
        if _VARIABLE_REGEXP.match(token.text):
            return self._variable(token)
        if token.text in FUNCTIONS:
            self._expect("(")
            args = self._arguments(token)
            self._expect(")")
            return Call(token.text, tuple(args))
        if token.text in ("x", "y"):
            raise ParseError(f"vector {token.text} is only valid inside dot() or norm2()", token.position,
                             {"variable", "function"})
        raise ParseError(f"unknown identifier {token.text!r}", token.position, {"variable", "function", "number"})

    def _arguments(self, func: Token) -> List[Node]:
        args = []
        if func.text in _VECTOR_FUNCTIONS:
            while True:
                args.append(self._vector())
                if not self._accept(","):
                    break
            arity = _VECTOR_FUNCTIONS[func.text]
        else:
            args.append(self.expr())
            while self._accept(","):
                args.append(self.expr())
            arity = 1
        if len(args) != arity:
            raise ArityError(f"{func.text}() at position {func.position} takes {arity} argument(s), got {len(args)}")
        return args

    def _vector(self) -> Vector:
        token = self.current
        if token.kind != "name" or token.text not in ("x", "y"):
            self._fail({"x", "y"})
        if token.text == "y" and not self.allow_fibre:
            raise ParseError("fibre vector y in an x-only expression", token.position, {"x"})
        self.pos += 1
        return Vector(token.text)


def parse_expression(text: str, dim: int, allow_fibre: bool = True) -> Node:
    """
    Parse expression text into a tree.

    Raises:
        ParseError: malformed text, with the 0-based position and the expected tokens
        ArityError: variable index outside 1..dim, or a wrong argument count
    """
    return Parser(text, dim, allow_fibre).parse()


# ── pretty printer ───────────────────────────────────────────────────────────


def _format_exponent(exponent: Fraction) -> str:
    if exponent.denominator == 1 and exponent >= 0:
        return str(exponent.numerator)
    if exponent.denominator == 1:
        return f"({exponent.numerator})"
    return f"({exponent.numerator}/{exponent.denominator})"


def format_expression(node: Node) -> str:
    """Fully parenthesised text that parses back to the same tree"""
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Var):
        return f"{node.name}{node.index + 1}"
    if isinstance(node, Vector):
        return node.name
    if isinstance(node, Neg):
        return f"(-{format_expression(node.operand)})"
    if isinstance(node, BinOp):
        return f"({format_expression(node.left)} {node.op} {format_expression(node.right)})"
    if isinstance(node, Pow):
        return f"({format_expression(node.base)}^{_format_exponent(node.exponent)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(format_expression(arg) for arg in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


ExpressionLike = Union[str, int, float, Node]


def coefficient_node(value: ExpressionLike, dim: int) -> Node:
    """A number or an x-only expression as a tree (used for builtin parameters)"""
    if isinstance(value, Node):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, float)):
        return Number(float(value))
    return parse_expression(str(value), dim, allow_fibre=False)
