"""Free polynomials over non-commuting variables z1..zd.

A small recursive-descent front end with the grammar

    expr   := sign? term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := primary ('^' uint)*
    primary:= complex-literal | var | '(' expr ')'
    var    := 'z' uint

'^' binds tighter than '*', and '*' is non-commutative concatenation.
Parsed expressions are normalized to an expanded sum of coefficient
times word, ordered graded-lexicographically.
"""

import re
from dataclasses import dataclass

from .errors import PolySyntaxError, UnknownVariable
from .ncspace import FreeWord, word_apply

__all__ = ["FreePolyAst", "parse_poly", "eval_poly", "format_poly"]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?[ij]?)"
    r"|(?P<var>z\d+)"
    r"|(?P<op>[-+*^()]))"
)


def _grading_key(word):
    return (len(word.letters), word.letters)


@dataclass(frozen=True)
class FreePolyAst:
    """Normal form: graded-lex-sorted terms (FreeWord, complex coefficient)."""

    terms: tuple

    def __post_init__(self):
        cleaned = tuple(
            (w, complex(c)) for w, c in sorted(self.terms, key=lambda t: _grading_key(t[0]))
        )
        object.__setattr__(self, "terms", cleaned)

    @property
    def max_var(self):
        return max((max(w.letters) for w, _ in self.terms if w.letters), default=0)


def _combine(terms_a, terms_b, sign=1):
    out = dict(terms_a)
    for w, c in terms_b.items():
        out[w] = out.get(w, 0j) + sign * c
    return out


def _multiply(terms_a, terms_b):
    out = {}
    for wa, ca in terms_a.items():
        for wb, cb in terms_b.items():
            w = wa * wb
            out[w] = out.get(w, 0j) + ca * cb
    return out


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == match.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            offset = pos + len(text[pos:]) - len(stripped)
            raise PolySyntaxError("unexpected character %r" % stripped[0], offset)
        tokens.append(
            (match.lastgroup, match.group(match.lastgroup), match.start(match.lastgroup))
        )
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens, length):
        self.tokens = tokens
        self.pos = 0
        self.length = length

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, self.length)

    def _take(self, kind=None, value=None):
        tok = self._peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise PolySyntaxError("expected %s" % (value or kind or "token"), tok[2])
        self.pos += 1
        return tok

    def parse(self):
        terms = self.expr()
        tok = self._peek()
        if tok[0] is not None:
            raise PolySyntaxError("trailing input %r" % tok[1], tok[2])
        return terms

    def expr(self):
        sign = 1
        tok = self._peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.pos += 1
            sign = -1 if tok[1] == "-" else 1
        out = {w: sign * c for w, c in self.term().items()}
        while True:
            tok = self._peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.pos += 1
                out = _combine(out, self.term(), sign=-1 if tok[1] == "-" else 1)
            else:
                return out

    def term(self):
        out = self.factor()
        while True:
            tok = self._peek()
            if tok[0] == "op" and tok[1] == "*":
                self.pos += 1
                out = _multiply(out, self.factor())
            else:
                return out

    def factor(self):
        out = self.primary()
        while True:
            tok = self._peek()
            if tok[0] == "op" and tok[1] == "^":
                self.pos += 1
                num = self._take("num")
                if not num[1].isdigit():
                    raise PolySyntaxError("exponent must be a nonnegative integer", num[2])
                power = int(num[1])
                acc = {FreeWord(()): 1 + 0j}
                for _ in range(power):
                    acc = _multiply(acc, out)
                out = acc
            else:
                return out

    def primary(self):
        tok = self._peek()
        if tok[0] == "num":
            self.pos += 1
            text = tok[1]
            if text[-1] in "ij":
                return {FreeWord(()): complex(0.0, float(text[:-1]))}
            return {FreeWord(()): complex(float(text))}
        if tok[0] == "var":
            self.pos += 1
            index = int(tok[1][1:])
            if index < 1:
                raise PolySyntaxError("variable indices start at z1", tok[2])
            return {FreeWord((index,)): 1 + 0j}
        if tok[0] == "op" and tok[1] == "(":
            self.pos += 1
            out = self.expr()
            self._take("op", ")")
            return out
        raise PolySyntaxError("expected a literal, variable, or '('", tok[2])


def parse_poly(text):
    """Parse a free-polynomial expression into graded-lex normal form."""
    terms = _Parser(_tokenize(text), len(text)).parse()
    nonzero = tuple((w, c) for w, c in terms.items() if c != 0)
    return FreePolyAst(terms=nonzero)


def eval_poly(ast, Z):
    """Evaluate the polynomial at a matrix tuple."""
    if ast.max_var > Z.d:
        raise UnknownVariable("polynomial uses z%d but the point has d=%d" % (ast.max_var, Z.d))
    import numpy as np

    out = np.zeros((Z.n, Z.n), dtype=complex)
    for w, c in ast.terms:
        out += c * word_apply(Z.coords, w)
    return out


def _format_coeff(c):
    if c.imag == 0.0:
        if c.real >= 0:
            return repr(c.real)
        return "(-%s)" % repr(-c.real)
    re_part = repr(c.real)
    im_part = repr(abs(c.imag))
    sign = "+" if c.imag >= 0 else "-"
    return "(%s%s%s*1i)" % (re_part, sign, im_part)


def format_poly(ast):
    """Deterministic text form; parse_poly(format_poly(ast)) == ast."""
    if not ast.terms:
        return "0.0"
    pieces = []
    for w, c in ast.terms:
        body = "*".join("z%d" % i for i in w.letters)
        coeff = _format_coeff(c)
        pieces.append(coeff if not body else "%s*%s" % (coeff, body))
    return " + ".join(pieces)
