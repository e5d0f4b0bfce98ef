"""Problem-file language: declarations, a Lagrangian, candidate symmetries,
sections and an integration box.

::

    base even t; base odd s;
    fiber even y; fiber odd z;
    L = y[t]^2/2;
    symmetry D = {t: 1, s: 1};
    section sigma = {y: 3*t + 2, z: t*s};
    box = 0, 1;

Jet symbols take a bracket of base names or signed integers; the negative
part is kept in the written order, so ``z[-2,-1] = -z[-1,-2]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .superalg import Chart, Coord, SuperExpr
from .jetcoords import jet_coord

__all__ = ["ProblemError", "Problem", "parse_problem", "render_problem", "Namer"]


class ProblemError(ValueError):
    """Input error with a source location."""

    def __init__(self, kind: str, message: str, line: int, col: int):
        super().__init__(f"{kind} error at {line}:{col}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col

    def as_dict(self) -> dict:
        return {"error": self.kind, "message": self.message, "line": self.line, "column": self.col}


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<num>\d+) | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()\[\]{},;:=])
""", re.X)


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[Tok]:
    toks, pos, line, lstart = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ProblemError("lexical", f"unexpected character {text[pos]!r}", line, pos - lstart + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            lstart = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(Tok(kind, m.group(), line, pos - lstart + 1))
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - lstart + 1))
    return toks


@dataclass
class Problem:
    base_even: list = field(default_factory=list)
    base_odd: list = field(default_factory=list)
    fiber_even: list = field(default_factory=list)
    fiber_odd: list = field(default_factory=list)
    L: SuperExpr | None = None
    symmetries: dict = field(default_factory=dict)  # name -> {Coord: SuperExpr}
    sections: dict = field(default_factory=dict)  # name -> {mu: SuperExpr}
    box: list | None = None

    @property
    def chart(self) -> Chart:
        return Chart(len(self.base_even), len(self.base_odd), len(self.fiber_even), len(self.fiber_odd))

    @property
    def namer(self) -> "Namer":
        return Namer(self)


class Namer:
    """Coordinate <-> DSL name mapping for one problem."""

    def __init__(self, p: Problem):
        self.base = {}
        for k, n in enumerate(p.base_even, 1):
            self.base[n] = k
        for k, n in enumerate(p.base_odd, 1):
            self.base[n] = -k
        self.fiber = {}
        for k, n in enumerate(p.fiber_even, 1):
            self.fiber[n] = k
        for k, n in enumerate(p.fiber_odd, 1):
            self.fiber[n] = -k
        self.base_name = {v: k for k, v in self.base.items()}
        self.fiber_name = {v: k for k, v in self.fiber.items()}

    def __call__(self, c: Coord) -> str:
        if c.kind == "x":
            return self.base_name[c.index]
        s = self.fiber_name[c.index]
        idx = list(c.I) + list(c.A)
        if idx:
            s += "[" + ",".join(self.base_name[i] for i in idx) + "]"
        return s

    def latex(self, c: Coord, contact: bool = False) -> str:
        if c.kind == "x":
            return self.base_name[c.index]
        s = self.fiber_name[c.index]
        idx = list(c.I) + list(c.A)
        if contact:
            sub = ",".join(self.base_name[i] for i in idx)
            return f"\\theta^{{{s}}}" + (f"_{{{sub}}}" if sub else "")
        if idx:
            s += "_{" + ",".join(self.base_name[i] for i in idx) + "}"
        return s


class _Parser:
    def __init__(self, text: str, allow_nilpotent: bool):
        self.toks = _lex(text)
        self.i = 0
        self.allow_nilpotent = allow_nilpotent
        self.p = Problem()
        self._namer = None

    # helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def err(self, msg: str, tok: Tok | None = None, kind: str = "syntax"):
        tok = tok or self.tok
        raise ProblemError(kind, msg, tok.line, tok.col)

    def eat(self, text: str | None = None, kind: str | None = None) -> Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            got = repr(t.text) if t.kind != "eof" else "end of input"
            self.err(f"expected {want}, found {got}")
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "name")

    @property
    def chart(self) -> Chart:
        return self.p.chart

    @property
    def names(self) -> Namer:
        if self._namer is None:
            self._namer = Namer(self.p)
        return self._namer

    # grammar
    def parse(self) -> Problem:
        while self.tok.kind != "eof":
            self.statement()
        if self.p.L is None:
            self.err("missing Lagrangian 'L = ...;'")
        return self.p

    def statement(self):
        t = self.tok
        if t.kind != "name":
            self.err(f"unexpected {t.text!r}")
        if t.text in ("base", "fiber"):
            self.declaration()
        elif t.text == "L":
            self.eat("L")
            self.eat("=")
            start = self.tok
            self.p.L = self.expr()
            if any(c.kind == "y" and c.order > 1 for c in self.p.L.coordinates()):
                self.err("the Lagrangian must be first order", start, "order")
        elif t.text == "symmetry":
            self.eat()
            name = self.eat(kind="name").text
            self.eat("=")
            self.p.symmetries[name] = self.field_map(fiber_only=False)
        elif t.text == "section":
            self.eat()
            name = self.eat(kind="name")
            self.eat("=")
            comps = self.field_map(fiber_only=True)
            self.p.sections[name.text] = comps
        elif t.text == "box":
            self.eat()
            self.eat("=")
            vals = [self.constant()]
            while self.at(","):
                self.eat(",")
                vals.append(self.constant())
            if len(vals) != 2 * self.chart.m:
                self.err(f"box needs {2 * self.chart.m} numbers", t)
            self.p.box = [(vals[2 * k], vals[2 * k + 1]) for k in range(self.chart.m)]
        else:
            self.err(f"unknown statement {t.text!r}")
        self.eat(";")

    def declaration(self):
        where = self.eat().text
        par = self.eat(kind="name")
        if par.text not in ("even", "odd"):
            self.err("expected 'even' or 'odd'", par)
        if self.p.L is not None or self.p.symmetries or self.p.sections:
            self.err("declarations must come first", par)
        while True:
            n = self.eat(kind="name")
            if n.text in self.names.base or n.text in self.names.fiber or n.text == "L":
                self.err(f"name {n.text!r} already used", n, "name")
            getattr(self.p, f"{where}_{par.text}").append(n.text)
            self._namer = None
            if not self.at(","):
                break
            self.eat(",")

    def field_map(self, fiber_only: bool) -> dict:
        self.eat("{")
        out = {}
        while not self.at("}"):
            n = self.eat(kind="name")
            if n.text in self.names.fiber:
                key = self.names.fiber[n.text] if fiber_only else Coord.jet(self.names.fiber[n.text])
            elif n.text in self.names.base and not fiber_only:
                key = Coord.base(self.names.base[n.text])
            else:
                self.err(f"{n.text!r} is not a {'fiber' if fiber_only else 'base or fiber'} coordinate", n, "name")
            self.eat(":")
            start = self.tok
            val = self.expr()
            if fiber_only:
                par = 1 if key < 0 else 0
                for part_par, part in enumerate(val.homogeneous_parts()):
                    if part_par != par and not part.is_zero():
                        self.err(f"component for {n.text!r} has the wrong parity", start, "parity")
                if any(c.kind != "x" for c in val.coordinates()):
                    self.err("section components may only use base coordinates", start, "name")
            out[key] = val
            if not self.at(","):
                break
            self.eat(",")
        self.eat("}")
        return out

    def constant(self) -> Fraction:
        t = self.tok
        e = self.expr()
        if e.coordinates():
            self.err("expected a number", t)
        return e.constant_term()

    # expressions: sum := term (('+'|'-') term)*
    def expr(self) -> SuperExpr:
        sign = 1
        if self.at("-"):
            self.eat()
            sign = -1
        elif self.at("+"):
            self.eat()
        out = self.term() * sign
        while self.at("+") or self.at("-"):
            op = self.eat().text
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self) -> SuperExpr:
        out = self.power()
        while self.at("*") or self.at("/"):
            op = self.eat()
            if op.text == "*":
                out = out * self.power()
            else:
                t = self.tok
                d = self.power()
                if d.coordinates() or d.is_zero():
                    self.err("can only divide by a nonzero number", t)
                out = out * SuperExpr.const(1 / d.constant_term(), self.chart)
        return out

    def power(self) -> SuperExpr:
        t = self.tok
        base = self.atom()
        if self.at("^"):
            self.eat()
            et = self.eat(kind="num")
            e = int(et.text)
            odd = base.homogeneous_parts()[1]
            if e >= 2 and not odd.is_zero() and not self.allow_nilpotent:
                self.err("odd quantity raised to a power >= 2 (use --allow-nilpotent)", t, "parity")
            return base ** e
        return base

    def atom(self) -> SuperExpr:
        t = self.tok
        ch = self.chart
        if t.kind == "num":
            self.eat()
            return SuperExpr.const(int(t.text), ch)
        if self.at("("):
            self.eat("(")
            e = self.expr()
            self.eat(")")
            return e
        if t.kind == "name":
            self.eat()
            if t.text in self.names.base:
                return ch.x(self.names.base[t.text])
            if t.text in self.names.fiber:
                mu = self.names.fiber[t.text]
                if self.at("["):
                    return self.jet(mu)
                return SuperExpr.gen(Coord.jet(mu), ch)
            self.err(f"unknown name {t.text!r}", t, "name")
        self.err(f"unexpected {t.text!r}" if t.kind != "eof" else "unexpected end of input")

    def jet(self, mu: int) -> SuperExpr:
        self.eat("[")
        idx = []
        while True:
            t = self.tok
            neg = False
            if self.at("-"):
                self.eat()
                neg = True
            if self.tok.kind == "num":
                v = int(self.eat().text) * (-1 if neg else 1)
                if v == 0 or not self.chart.has_base(v):
                    self.err(f"no base coordinate with index {v}", t, "name")
            elif self.tok.kind == "name" and not neg:
                n = self.eat()
                if n.text not in self.names.base:
                    self.err(f"{n.text!r} is not a base coordinate", n, "name")
                v = self.names.base[n.text]
            else:
                self.err("expected a base coordinate or index")
            idx.append(v)
            if self.at(","):
                self.eat()
                continue
            break
        self.eat("]")
        I = tuple(v for v in idx if v > 0)
        A = tuple(v for v in idx if v < 0)
        sgn, c = jet_coord(mu, I, A)
        if sgn == 0:
            return SuperExpr.const(0, self.chart)
        return SuperExpr.gen(c, self.chart) * sgn


def parse_problem(text: str, allow_nilpotent: bool = False) -> Problem:
    return _Parser(text, allow_nilpotent).parse()


def _fmt(q: Fraction) -> str:
    return str(q) if q >= 0 else f"-{-q}"


def render_problem(p: Problem) -> str:
    nm = p.namer
    lines = []
    for where in ("base", "fiber"):
        for par in ("even", "odd"):
            names = getattr(p, f"{where}_{par}")
            if names:
                lines.append(f"{where} {par} {', '.join(names)};")
    lines.append(f"L = {p.L.render(nm)};")
    for name, comps in p.symmetries.items():
        items = sorted(comps.items(), key=lambda kv: kv[0].key)
        body = ", ".join(f"{nm(c)}: {v.render(nm)}" for c, v in items)
        lines.append(f"symmetry {name} = {{{body}}};")
    for name, comps in p.sections.items():
        body = ", ".join(f"{nm.fiber_name[mu]}: {v.render(nm)}" for mu, v in sorted(comps.items(), key=lambda kv: (kv[0] < 0, abs(kv[0]))))
        lines.append(f"section {name} = {{{body}}};")
    if p.box:
        lines.append("box = " + ", ".join(f"{_fmt(a)}, {_fmt(b)}" for a, b in p.box) + ";")
    return "\n".join(lines) + "\n"
