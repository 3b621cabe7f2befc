"""Expression parser for rational maps in the variable z.

Grammar (precedence low to high):

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*  with implicit '*' before '(' / names
    factor  := ('+' | '-') factor | atom ('^' nonneg-integer)?
    atom    := 'z' | number | 'i' | parameter name | '(' expr ')'

Numbers are decimal literals, optionally followed by 'i' for a pure
imaginary part (so ``1+2i`` parses as a sum).  Parameter values are bound
at parse time from a name -> complex mapping.  Syntax errors carry the
0-based character position.
"""

from __future__ import annotations

import re


class ParseError(ValueError):
    """Syntax or binding error, with the character position in the source."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
  | (?P<ws>\s+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)


def tokenize(text):
    """List of (kind, value, position); kinds: num, name, op."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group()!r}", m.start())
        out.append((kind, m.group(), m.start()))
    return out


class ExprParser:
    """Recursive-descent evaluator producing complex-coefficient fractions.

    Values are pairs (num, den) in an arbitrary fraction arithmetic
    supplied by the ``field`` adapter, which must provide: const(c),
    var(), add, sub, mul, div, pow, neg.  The adapter for rational maps
    lives in ratmap; a plain-complex adapter is used for testing.
    """

    def __init__(self, text, params, field):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.params = dict(params or {})
        self.field = field

    def _peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return ("eof", "", len(self.text))

    def _next(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def parse(self):
        val = self.expr()
        kind, text, at = self._peek()
        if kind != "eof":
            raise ParseError(f"unexpected {text!r}", at)
        return val

    def expr(self):
        val = self.term()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "+-":
                self._next()
                rhs = self.term()
                val = self.field.add(val, rhs) if text == "+" else self.field.sub(val, rhs)
            else:
                return val

    def term(self):
        val = self.factor()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "*/":
                self._next()
                rhs = self.factor()
                val = self.field.mul(val, rhs) if text == "*" else self.field.div(val, rhs)
            elif kind == "name" or (kind == "op" and text == "("):
                # implicit multiplication: 2z, 3(z+1), z(z-1)
                rhs = self.factor()
                val = self.field.mul(val, rhs)
            else:
                return val

    def factor(self):
        kind, text, at = self._peek()
        if kind == "op" and text in "+-":
            self._next()
            val = self.factor()
            return val if text == "+" else self.field.neg(val)
        val = self.atom()
        kind, text, at = self._peek()
        if kind == "op" and text == "^":
            self._next()
            k2, t2, a2 = self._next()
            neg = False
            if k2 == "op" and t2 == "-":
                raise ParseError("exponent must be a nonnegative integer", a2)
            if k2 != "num" or "." in t2:
                raise ParseError("exponent must be a nonnegative integer", a2)
            val = self.field.pow(val, int(t2))
        return val

    def atom(self):
        kind, text, at = self._next()
        if kind == "num":
            nxt = self._peek()
            if nxt[0] == "name" and nxt[1] == "i":
                self._next()
                return self.field.const(complex(0, float(text)))
            return self.field.const(complex(float(text)))
        if kind == "name":
            if text == "z":
                return self.field.var()
            if text == "i":
                return self.field.const(1j)
            if text in self.params:
                return self.field.const(complex(self.params[text]))
            raise ParseError(f"unbound parameter {text!r}", at)
        if kind == "op" and text == "(":
            val = self.expr()
            k2, t2, a2 = self._next()
            if not (k2 == "op" and t2 == ")"):
                raise ParseError("expected ')'", a2)
            return val
        raise ParseError(f"unexpected {text or 'end of input'!r}", at)


class ComplexField:
    """Adapter evaluating expressions to a plain complex number (no z allowed)."""

    @staticmethod
    def const(c):
        return complex(c)

    @staticmethod
    def var():
        raise ParseError("variable z not allowed in a scalar expression", 0)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in scalar expression")
        return a / b

    @staticmethod
    def pow(a, k):
        return a**k

    @staticmethod
    def neg(a):
        return -a


def parse_scalar(text, params=None):
    """Evaluate a z-free expression to a complex number."""
    return ExprParser(text, params, ComplexField).parse()
