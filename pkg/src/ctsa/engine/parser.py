"""Recursive-descent parser for analytics expressions.

Grammar (``Ar`` is scalar, ``TSE`` is a series)::

    Ar   := Ar ('+'|'-') Ar | Ar ('*'|'/') Ar | '-' Ar | NUMBER | '(' Ar ')'
          | 'sqrt' '(' Ar ')' | 'Sum' '(' TSE [',' INT ',' INT] ')' | STAT
    TSE  := TSE ('+'|'-') TSE | TSE '*' TSE | NAME | '(' TSE ')'
          | 'Constant' '(' NUMBER ',' INT ',' INT ')' | 'Shift' '(' TSE ',' INT ')'
    STAT := 'Mu' '(' TSE ')' | 'Sigma' '(' TSE ')' | 'Corr' '(' TSE ',' TSE ')'
          | 'CCorr' '(' TSE ',' TSE ',' INT ')' | 'ACorr' '(' TSE ',' INT ')'

Statistics are expanded into plain sums at parse time.
"""
from __future__ import annotations

import re

from ..errors import ParseError
from . import ast as A

KEYWORDS = {"Sum", "Constant", "Shift", "sqrt", "Mu", "Sigma", "Corr", "CCorr", "ACorr"}
STATS = {"Mu": 1, "Sigma": 1, "Corr": 2, "CCorr": 2, "ACorr": 1}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/(),×−]))"
)


class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind, self.text, self.pos = kind, text, pos

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.pos}"


def tokenize(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(src)
    while True:
        while pos < n and src[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        text = m.group(kind)
        if kind == "op":
            text = {"×": "*", "−": "-"}.get(text, text)
        toks.append(_Tok(kind, text, m.start(kind)))
        pos = m.end()
    toks.append(_Tok("eof", "", n))
    return toks


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def cur(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, what, tok=None):
        tok = tok or self.cur
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"expected {what}, found {found}", tok.pos)

    def expect(self, text):
        if self.cur.text != text or self.cur.kind not in ("op", "name"):
            self.fail(repr(text))
        return self.advance()

    def accept(self, text):
        if self.cur.kind in ("op", "name") and self.cur.text == text:
            return self.advance()
        return None

    # scalars

    def parse(self):
        node = self.ar()
        if self.cur.kind != "eof":
            self.fail("an operator or end of input")
        return node

    def ar(self):
        node = self.ar_term()
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self.advance().text
            node = A.Bin(op, node, self.ar_term())
        return node

    def ar_term(self):
        node = self.ar_unary()
        while self.cur.kind == "op" and self.cur.text in "*/":
            op = self.advance().text
            node = A.Bin(op, node, self.ar_unary())
        return node

    def ar_unary(self):
        if self.accept("-"):
            arg = self.ar_unary()
            if isinstance(arg, A.Num):
                return A.Num(-arg.value)
            return A.Neg(arg)
        if self.accept("+"):
            return self.ar_unary()
        return self.ar_atom()

    def ar_atom(self):
        tok = self.cur
        if tok.kind == "num":
            self.advance()
            return A.Num(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.ar()
            self.expect(")")
            return node
        if tok.kind == "name":
            if tok.text == "sqrt":
                self.advance()
                self.expect("(")
                node = self.ar()
                self.expect(")")
                return A.Sqrt(node)
            if tok.text == "Sum":
                return self.sum_call()
            if tok.text in STATS:
                return self.stat_call()
            if tok.text in KEYWORDS:
                self.fail("a scalar expression", tok)
            raise ParseError(
                f"series {tok.text!r} used as a scalar; wrap it in Sum(...)", tok.pos
            )
        self.fail("a scalar expression")

    def sum_call(self):
        self.advance()
        self.expect("(")
        arg = self.tse()
        a = b = None
        if self.accept(","):
            a = self.integer()
            self.expect(",")
            b = self.integer()
            if a > b:
                raise ParseError(f"empty range [{a}, {b}]", self.toks[self.i - 1].pos)
        self.expect(")")
        return A.Sum(arg, a, b)

    def stat_call(self):
        kind = self.advance().text
        self.expect("(")
        args = [self.tse()]
        for _ in range(STATS[kind] - 1):
            self.expect(",")
            args.append(self.tse())
        lag = None
        if kind in ("CCorr", "ACorr"):
            self.expect(",")
            lag = self.integer()
        self.expect(")")
        return A.Stat(kind, tuple(args), lag, expand_stat(kind, args, lag))

    # series

    def tse(self):
        node = self.tse_term()
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self.advance().text
            node = A.TBin(op, node, self.tse_term())
        return node

    def tse_term(self):
        node = self.tse_atom()
        while self.cur.kind == "op" and self.cur.text in "*/":
            if self.cur.text == "/":
                raise ParseError("division of series is not supported", self.cur.pos)
            self.advance()
            node = A.TBin("*", node, self.tse_atom())
        return node

    def tse_atom(self):
        tok = self.cur
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.tse()
            self.expect(")")
            return node
        if tok.kind == "name":
            if tok.text == "Constant":
                self.advance()
                self.expect("(")
                v = self.number()
                self.expect(",")
                a = self.integer()
                self.expect(",")
                b = self.integer()
                if a > b:
                    raise ParseError(f"empty range [{a}, {b}]", self.toks[self.i - 1].pos)
                self.expect(")")
                return A.Const(v, a, b)
            if tok.text == "Shift":
                self.advance()
                self.expect("(")
                arg = self.tse()
                self.expect(",")
                k = self.integer()
                self.expect(")")
                return A.Shift(arg, k)
            if tok.text in KEYWORDS:
                self.fail("a series expression", tok)
            self.advance()
            return A.Ref(tok.text)
        if tok.kind == "num":
            raise ParseError("a number is not a series; use Constant(v, a, b)", tok.pos)
        self.fail("a series expression")

    def number(self):
        sign = -1.0 if self.accept("-") else 1.0
        if self.cur.kind != "num":
            self.fail("a number")
        return sign * float(self.advance().text)

    def integer(self):
        sign = -1 if self.accept("-") else 1
        tok = self.cur
        if tok.kind != "num" or not tok.text.isdigit():
            self.fail("an integer")
        self.advance()
        return sign * int(tok.text)


def parse(src: str) -> A.Node:
    """Parse an analytics expression into an AST."""
    return _Parser(src).parse()


# ---------------------------------------------------------------------------
# Statistics sugar


def _mu(t):
    return A.Bin("/", A.Sum(t), A.Count(t))


def _sigma(t):
    mu = _mu(t)
    return A.Sqrt(A.Bin("-", A.Bin("/", A.Sum(A.TBin("*", t, t)), A.Count(t)), A.Bin("*", mu, mu)))


def _corr(t1, t2, denom):
    # sum over the overlap of (t1 - mu1)(t2 - mu2), expanded so that only sums
    # of raw series (and their product) appear
    prod = A.TBin("*", t1, t2)
    mu1, mu2 = _mu(t1), _mu(t2)
    n = A.Count(prod)
    num = A.Bin(
        "+",
        A.Bin(
            "-",
            A.Bin("-", A.Sum(prod), A.Bin("*", mu2, A.Sum(t1, over=t2))),
            A.Bin("*", mu1, A.Sum(t2, over=t1)),
        ),
        A.Bin("*", A.Bin("*", n, mu1), mu2),
    )
    return A.Bin("/", num, A.Bin("*", n, denom))


def expand_stat(kind: str, args, lag=None) -> A.Node:
    if kind == "Mu":
        return _mu(args[0])
    if kind == "Sigma":
        return _sigma(args[0])
    if kind == "Corr":
        t1, t2 = args
        return _corr(t1, t2, A.Bin("*", _sigma(t1), _sigma(t2)))
    if kind == "CCorr":
        t1, t2 = args
        t2s = A.Shift(t2, lag)
        return _corr(t1, t2s, A.Bin("*", _sigma(t1), _sigma(t2)))
    if kind == "ACorr":
        (t,) = args
        s = _sigma(t)
        return _corr(t, A.Shift(t, lag), A.Bin("*", s, s))
    raise ValueError(f"unknown statistic {kind!r}")
