"""A small expression language for forms on a model.

Grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := unary (('^'|'*') unary)*
    unary  := '-' unary | atom ['**' int]
    atom   := NUMBER ['/' NUMBER] ['i'] [atom] | 'i' | IDENT | IDENT '(' expr ')' | '(' expr ')'

Identifiers are coframe labels (``phi2``), their conjugates (``phibar2`` or
``phi2bar``), character labels (``f``, ``beta1``; ``**k`` raises them to an
integer power and a ``bar`` form inverts them), user macros, and the functions
``conj``/``bar``. ``^`` and ``*`` both mean the wedge product; scalars are
0-forms.
"""

from __future__ import annotations

import re

from .algebra import Element, bar_label, conjugate, wedge
from .model import ManifoldModel
from .scalar import Scalar


class ExprError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^/()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ExprError(f"unexpected character {text[pos]!r} at position {pos}")
        num, ident, op = mt.groups()
        out.append(("num", num) if num else ("id", ident) if ident else ("op", op))
        pos = mt.end()
    return out


class _Parser:
    def __init__(self, m: ManifoldModel, text: str, macros: dict, depth: int):
        self.m = m
        self.toks = _tokenize(text)
        self.i = 0
        self.macros = macros
        self.depth = depth
        self.symbols = _symbols(m)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            want = val or kind or "token"
            raise ExprError(f"expected {want}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Element:
        e = self.expr()
        if self.peek()[0] is not None:
            raise ExprError(f"trailing input at {self.peek()[1]!r}")
        return e

    def expr(self) -> Element:
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term().scale(sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            s = self.take()[1]
            t = self.term()
            acc = acc + t if s == "+" else acc - t
        return acc

    def term(self) -> Element:
        acc = self.unary()
        while self.peek() in (("op", "^"), ("op", "*")):
            self.take()
            acc = wedge(acc, self.unary())
        return acc

    def unary(self) -> Element:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        return self.atom()

    def _int(self) -> int:
        sign = 1
        paren = False
        if self.peek() == ("op", "("):
            self.take()
            paren = True
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        k = int(self.take("num")[1]) * sign
        if paren:
            self.take("op", ")")
        return k

    def atom(self) -> Element:
        m = self.m
        kind, val = self.peek()
        if kind == "num":
            self.take()
            num = int(val)
            den = 1
            if self.peek() == ("op", "/"):
                self.take()
                den = int(self.take("num")[1])
                if den == 0:
                    raise ExprError("division by zero")
            c = Scalar(num) / den
            if self.peek() == ("id", "i"):
                self.take()
                c = c * Scalar(0, 1)
            e = m.one().scale(c)
            if self.peek()[0] == "id" or self.peek() == ("op", "("):
                # scalar prefix: "1/2 phi1" reads as "1/2 * phi1"
                return wedge(e, self.atom())
            return e
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.take("op", ")")
            return self._power(e, None)
        if kind == "id":
            self.take()
            if val in ("conj", "bar") and self.peek() == ("op", "("):
                self.take()
                e = self.expr()
                self.take("op", ")")
                return conjugate(e)
            if val in self.macros:
                if self.depth > 20:
                    raise ExprError("macro expansion too deep")
                e = _Parser(m, self.macros[val], self.macros, self.depth + 1).parse()
                return self._power(e, None)
            sym = self.symbols.get(val)
            if sym is None:
                if val in ("i", "I"):
                    return m.one().scale(Scalar(0, 1))
                raise ExprError(f"unknown symbol {val!r}")
            skind, e = sym
            return self._power(e, skind)
        raise ExprError(f"unexpected {val!r}" if val else "unexpected end of input")

    def _power(self, e: Element, skind):
        if self.peek() != ("op", "**"):
            return e
        self.take()
        k = self._int()
        if skind != "char":
            raise ExprError("'**' applies to characters only")
        chi = next(iter(e.characters()))
        return self.m.one().times_character(tuple(x * k for x in chi))


def _symbols(m: ManifoldModel) -> dict:
    out = {}
    for k, lab in enumerate(m.coframe):
        out[lab] = ("form", m.phi(k + 1))
        bar = m.phibar(k + 1)
        out[bar_label(lab)] = ("form", bar)
        out[lab + "bar"] = ("form", bar)
    for k, c in enumerate(m.characters):
        chi = [0] * m.r
        chi[k] = 1
        out[c.label] = ("char", m.one().times_character(tuple(chi)))
        chi[k] = -1
        inv = ("char", m.one().times_character(tuple(chi)))
        out.setdefault(bar_label(c.label), inv)
        out.setdefault(c.label + "bar", inv)
    return out


def parse_form(m: ManifoldModel, text: str, macros: dict | None = None) -> Element:
    """Parse ``text`` into an Element of ``m``."""
    if not text or not text.strip():
        raise ExprError("empty expression")
    return _Parser(m, text, dict(macros or {}), 0).parse()


def parse_defines(items) -> dict:
    """``["sigma=phi1+phi2", ...]`` -> macro table."""
    out = {}
    for it in items or []:
        if "=" not in it:
            raise ExprError(f"macro definition needs NAME=EXPR, got {it!r}")
        name, body = it.split("=", 1)
        name = name.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise ExprError(f"bad macro name {name!r}")
        out[name] = body
    return out
