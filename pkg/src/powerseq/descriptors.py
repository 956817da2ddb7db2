"""Recursive-descent parser for set and filter descriptors.

    set    := term (op term)*            op ∈ ∪ ∩ ∖ (ASCII: | & \\ -), left-assoc
    term   := "factorial" | "omega" | "ω" | "factshift(" int ["," set] ")"
            | "powers(" int ")" | "mult(" int ")" | "arith(" int "," int ")"
            | "explicit[" [int ("," int)*] "]" | "tail(" set "," int ")"
            | "evenpos(" set ")" | "oddpos(" set ")" | "residues(" int ";" int ("," int)* ")"
            | "(" set ")"
    filter := base "~"*
    base   := "principal(" set ")" | "niceF" | "bohrN"
            | "bohr([" angle ("," angle)* "]," rational ")" | "gen(" set (";" set)* ")"

Printing any parsed object with str() gives text that parses back to an equal object.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union as TUnion

from .circle import CirclePoint
from .filters import BohrBasic, BohrNeighborhoods, FilterSpec, GeneratedBy, NiceF, Principal, tilde_closure
from .omega import (
    OMEGA,
    Arithmetic,
    Difference,
    Explicit,
    Factorial,
    FactorialShift,
    Intersection,
    Multiples,
    OmegaSet,
    Positions,
    Powers,
    Residues,
    TailFrom,
    Union,
)

Descriptor = TUnion[OmegaSet, FilterSpec]

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_ω]+)|(?P<sym>[()\[\],;/~∪∩∖|&\\-]))")
_OPS = {"∪": Union, "|": Union, "∩": Intersection, "&": Intersection, "∖": Difference, "\\": Difference, "-": Difference}
_FILTER_HEADS = {"principal", "niceF", "bohr", "bohrN", "gen"}


class DescriptorError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.text, self.pos = text, pos
        super().__init__(f"{message} at position {pos}\n  {text}\n  {' ' * pos}^")


@dataclass(frozen=True)
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, i = [], 0
    while i < len(text):
        if text[i:].strip() == "":
            break
        m = _TOKEN.match(text, i)
        if not m:
            j = len(text) - len(text[i:].lstrip())
            raise DescriptorError(f"unexpected character {text[j]!r}", text, j)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        i = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.cur
        raise DescriptorError(msg, self.text, tok.pos)

    def eat(self, value: str) -> _Tok:
        t = self.cur
        if t.value != value:
            self.error(f"expected {value!r}, found {t.value or 'end of input'!r}")
        self.i += 1
        return t

    def accept(self, value: str) -> bool:
        if self.cur.value == value:
            self.i += 1
            return True
        return False

    def integer(self) -> int:
        neg = self.accept("-")
        t = self.cur
        if t.kind != "int":
            self.error(f"expected an integer, found {t.value or 'end of input'!r}")
        self.i += 1
        return -int(t.value) if neg else int(t.value)

    def rational(self) -> Fraction:
        num = self.integer()
        if self.accept("/"):
            start = self.cur
            den = self.integer()
            if den == 0:
                self.error("zero denominator", start)
            return Fraction(num, den)
        return Fraction(num)

    def build(self, tok: _Tok, ctor, *args):
        try:
            return ctor(*args)
        except (ValueError, TypeError) as exc:
            self.error(str(exc), tok)

    def set_expr(self) -> OmegaSet:
        left = self.term()
        while self.cur.value in _OPS:
            op = self.cur
            self.i += 1
            left = _OPS[op.value](left, self.term())
        return left

    def term(self) -> OmegaSet:
        t = self.cur
        if self.accept("("):
            inner = self.set_expr()
            self.eat(")")
            return inner
        if t.kind != "name":
            self.error(f"expected a set, found {t.value or 'end of input'!r}")
        self.i += 1
        name = t.value
        if name == "factorial":
            return Factorial()
        if name in ("omega", "ω"):
            return OMEGA
        if name == "explicit":
            self.eat("[")
            vals = []
            if not self.accept("]"):
                vals.append(self.integer())
                while self.accept(","):
                    vals.append(self.integer())
                self.eat("]")
            return self.build(t, Explicit, tuple(vals))
        if name in _FILTER_HEADS:
            self.error(f"{name!r} is a filter, not a set", t)
        self.eat("(")
        if name == "factshift":
            c = self.integer()
            dom = self.set_expr() if self.accept(",") else OMEGA
            out = self.build(t, FactorialShift, c, dom)
        elif name in ("powers", "mult"):
            out = self.build(t, Powers if name == "powers" else Multiples, self.integer())
        elif name == "arith":
            a = self.integer()
            self.eat(",")
            out = self.build(t, Arithmetic, a, self.integer())
        elif name == "tail":
            inner = self.set_expr()
            self.eat(",")
            out = self.build(t, TailFrom, inner, self.integer())
        elif name == "residues":
            m = self.integer()
            self.eat(";")
            rs = [self.integer()]
            while self.accept(","):
                rs.append(self.integer())
            out = self.build(t, Residues, m, tuple(rs))
        elif name in ("evenpos", "oddpos"):
            out = self.build(t, Positions, self.set_expr(), 0 if name == "evenpos" else 1)
        else:
            self.error(f"unknown set constructor {name!r}", t)
        self.eat(")")
        return out

    def filter_expr(self) -> FilterSpec:
        t = self.cur
        if t.kind != "name" or t.value not in _FILTER_HEADS:
            self.error(f"expected a filter, found {t.value or 'end of input'!r}")
        self.i += 1
        if t.value == "niceF":
            f = NiceF()
        elif t.value == "bohrN":
            f = BohrNeighborhoods()
        elif t.value == "principal":
            self.eat("(")
            f = Principal(self.set_expr())
            self.eat(")")
        elif t.value == "gen":
            self.eat("(")
            gens = [self.set_expr()]
            while self.accept(";"):
                gens.append(self.set_expr())
            self.eat(")")
            f = self.build(t, GeneratedBy, tuple(gens))
        else:
            self.eat("(")
            self.eat("[")
            pts = [CirclePoint(self.rational())]
            while self.accept(","):
                pts.append(CirclePoint(self.rational()))
            self.eat("]")
            self.eat(",")
            f = self.build(t, BohrBasic, tuple(pts), self.rational())
            self.eat(")")
        tilde = False
        while self.accept("~"):
            tilde = True
        return tilde_closure(f) if tilde else f

    def finish(self, value):
        if self.cur.kind != "end":
            self.error(f"unexpected trailing input {self.cur.value!r}")
        return value


def parse_set(text: str) -> OmegaSet:
    p = _Parser(text)
    return p.finish(p.set_expr())


def parse_filter(text: str) -> FilterSpec:
    p = _Parser(text)
    return p.finish(p.filter_expr())


def parse_descriptor(text: str) -> Descriptor:
    """A filter if the text starts with a filter keyword, otherwise a set."""
    p = _Parser(text)
    if p.cur.kind == "name" and p.cur.value in _FILTER_HEADS:
        return p.finish(p.filter_expr())
    return p.finish(p.set_expr())


def parse_point(text: str) -> CirclePoint:
    p = _Parser(text)
    return p.finish(CirclePoint(p.rational()))


def parse_rational(text: str) -> Fraction:
    p = _Parser(text)
    return p.finish(p.rational())
