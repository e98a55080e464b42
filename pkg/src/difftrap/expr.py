"""Textual expression syntax shared by the element API and the scenario DSL.

Grammar (precedence climbing, ^ binds tightest and takes an integer
exponent, possibly negative):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-'* power
    power  := atom ('^' ('-')? INT)?
    atom   := INT | IDENT | '(' expr ')'

Integer literals are reduced mod p.  Positions are tracked for error
reporting; offsets let the scenario parser point at the right column of a
larger line.
"""

import re

from .errors import ScenarioError, UnknownVariableError
from .rational import RationalElement

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*/^])")


def tokenize(text, line=None, col_offset=0):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ScenarioError(
                "unexpected character in expression",
                line=line,
                column=col_offset + pos,
                token=text[pos],
            )
        number, ident, op = m.group(1), m.group(2), m.group(3)
        col = col_offset + pos
        if number is not None:
            out.append(("int", int(number), col))
        elif ident is not None:
            out.append(("ident", ident, col))
        else:
            out.append(("op", op, col))
        pos = m.end()
    return out


class _ExprParser:
    def __init__(self, tokens, p, allowed_vars, line):
        self.tokens = tokens
        self.i = 0
        self.p = p
        self.allowed = allowed_vars
        self.line = line

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        t = self.peek()
        if t is None:
            raise ScenarioError("unexpected end of expression", line=self.line)
        self.i += 1
        return t

    def expect_op(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ScenarioError(
                f"expected {op!r}", line=self.line, column=t[2], token=str(t[1])
            )

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t is not None:
            raise ScenarioError(
                "trailing input after expression",
                line=self.line,
                column=t[2],
                token=str(t[1]),
            )
        return e

    def expr(self):
        e = self.term()
        while True:
            t = self.peek()
            if t and t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                e = e + rhs if t[1] == "+" else e - rhs
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            t = self.peek()
            if t and t[0] == "op" and t[1] in "*/":
                self.take()
                rhs = self.unary()
                if t[1] == "*":
                    e = e * rhs
                else:
                    if rhs.is_zero():
                        raise ScenarioError(
                            "division by zero in expression", line=self.line, column=t[2]
                        )
                    e = e / rhs
            else:
                return e

    def unary(self):
        t = self.peek()
        if t and t[0] == "op" and t[1] == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t and t[0] == "op" and t[1] == "^":
            self.take()
            sign = 1
            t2 = self.peek()
            if t2 and t2[0] == "op" and t2[1] == "-":
                self.take()
                sign = -1
            elif t2 and t2[0] == "op" and t2[1] == "(":
                # allow ^(-2)
                self.take()
                inner_sign = 1
                t3 = self.peek()
                if t3 and t3[0] == "op" and t3[1] == "-":
                    self.take()
                    inner_sign = -1
                t4 = self.take()
                if t4[0] != "int":
                    raise ScenarioError(
                        "exponent must be an integer literal",
                        line=self.line,
                        column=t4[2],
                        token=str(t4[1]),
                    )
                self.expect_op(")")
                return self._pow(base, inner_sign * t4[1], t[2])
            t3 = self.take()
            if t3[0] != "int":
                raise ScenarioError(
                    "exponent must be an integer literal",
                    line=self.line,
                    column=t3[2],
                    token=str(t3[1]),
                )
            return self._pow(base, sign * t3[1], t[2])
        return base

    def _pow(self, base, n, col):
        if n < 0 and base.is_zero():
            raise ScenarioError(
                "negative power of zero", line=self.line, column=col
            )
        return base**n

    def atom(self):
        t = self.take()
        kind, val, col = t
        if kind == "int":
            return RationalElement.from_int(self.p, val)
        if kind == "ident":
            if self.allowed is not None and val not in self.allowed:
                raise UnknownVariableError(
                    f"unknown variable {val!r}"
                    + (f" at line {self.line}" if self.line else "")
                )
            return RationalElement.var(self.p, val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ScenarioError(
            "expected a value", line=self.line, column=col, token=str(val)
        )


def parse_expr(text, p, allowed_vars=None, line=None, col_offset=0):
    """Parse an expression into a canonical RationalElement over F_p."""
    tokens = tokenize(text, line=line, col_offset=col_offset)
    if not tokens:
        raise ScenarioError("empty expression", line=line, column=col_offset)
    return _ExprParser(tokens, p, allowed_vars, line).parse()
