"""
Operator Parser
Reads operator expressions in x and Dx into DiffOp and prints them back.
"""

import re
from typing import List, NamedTuple

from core.diffop import DiffOp, op_mul
from core.exact_arith import K, X
from core.exceptions import OperatorParseError
from utils.logger import setup_logger

logger = setup_logger(__name__)

MAX_ORDER = 2

TOKEN_PATTERN = re.compile(r"\s*(?:(?P<number>\d+)|(?P<name>Dx|x)|(?P<op>\*\*|[-+*/^()]))")


class Token(NamedTuple):
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    """
    Split an operator expression into tokens.

    Raises:
        OperatorParseError: unknown character, with its position
    """
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = TOKEN_PATTERN.match(text, pos)
        if not match:
            raise OperatorParseError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        value = match.group(kind)
        start = match.start(kind)
        tokens.append(Token(kind, "^" if value == "**" else value, start))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    """
    Recursive descent over

        expr   := term (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*
        factor := ('+'|'-') factor | base ('^' uint)?
        base   := 'x' | 'Dx' | integer | '(' expr ')'

    Products are Ore products (Dx*x = x*Dx + 1); a divisor must be free of Dx.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text: str) -> Token:
        if self.current.text != text:
            found = self.current.text or "end of input"
            raise OperatorParseError(f"expected {text!r}, found {found!r}", self.current.position)
        return self.advance()

    def parse(self) -> DiffOp:
        if self.current.kind == "end":
            raise OperatorParseError("empty operator expression", 0)
        result = self.expr()
        if self.current.kind != "end":
            raise OperatorParseError(f"unexpected {self.current.text!r}", self.current.position)
        return result

    def expr(self) -> DiffOp:
        result = self.term()
        while self.current.text in ("+", "-"):
            sign = self.advance().text
            right = self.term()
            result = result + right if sign == "+" else result - right
        return result

    def term(self) -> DiffOp:
        result = self.factor()
        while self.current.text in ("*", "/"):
            op = self.advance()
            right_start = self.current.position
            right = self.factor()
            if op.text == "*":
                result = op_mul(result, right)
                continue
            if right.order > 0:
                raise OperatorParseError("Dx may not appear in a denominator", right_start)
            if right.is_zero():
                raise OperatorParseError("division by zero", right_start)
            result = result.scale(1 / right.coefficient(0))
        return result

    def factor(self) -> DiffOp:
        if self.current.text in ("+", "-"):
            sign = self.advance().text
            value = self.factor()
            return -value if sign == "-" else value
        base = self.base()
        if self.current.text == "^":
            self.advance()
            token = self.current
            if token.kind != "number":
                raise OperatorParseError("exponent must be a nonnegative integer", token.position)
            self.advance()
            exponent = int(token.text)
            result = DiffOp((K.one,))
            for _ in range(exponent):
                result = op_mul(result, base)
            return result
        return base

    def base(self) -> DiffOp:
        token = self.current
        if token.kind == "number":
            self.advance()
            return DiffOp((K(int(token.text)),))
        if token.kind == "name":
            self.advance()
            return DiffOp((K.zero, K.one)) if token.text == "Dx" else DiffOp((X,))
        if token.text == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        found = token.text or "end of input"
        raise OperatorParseError(f"unexpected {found!r}", token.position)


def parse_operator(text: str) -> DiffOp:
    """
    Parse an operator expression such as "x*(1-x)*Dx^2 + (1-2*x)*Dx - 1/4".

    Args:
        text: Expression in x and Dx

    Returns:
        DiffOp: normalized operator (polynomial coefficients, content 1)

    Raises:
        OperatorParseError: syntax error, Dx in a denominator, order above 2
            or the zero operator
    """
    op = _Parser(text).parse()
    if op.is_zero():
        raise OperatorParseError("operator is zero")
    if op.order > MAX_ORDER:
        raise OperatorParseError(f"operator order {op.order} exceeds {MAX_ORDER}")
    result = op.normalized()
    logger.debug(f"parsed operator of order {result.order}: {render_operator(result)}")
    return result


def _coefficient_text(c) -> str:
    return str(c.as_expr().expand()).replace("**", "^")


def render_operator(op: DiffOp) -> str:
    """
    Canonical text of an operator, readable by parse_operator.

    Coefficients of the normalized operator are printed expanded, highest
    order first.
    """
    op = op.normalized()
    parts = []
    for i in range(op.order, -1, -1):
        c = op.coefficient(i)
        if not c:
            continue
        text = _coefficient_text(c)
        if i == 0:
            parts.append(f"({text})")
            continue
        power = "Dx" if i == 1 else f"Dx^{i}"
        parts.append(power if text == "1" else f"({text})*{power}")
    return " + ".join(parts) if parts else "0"
