"""Berezinian sections in the canonical basis, Berezin integral, divergences.

A section is stored as ``[xi] . f`` where ``[xi]`` is the canonical generator
``[d^G x^1 ^ ... ^ d^G x^m (x) d_{-1} o ... o d_{-n}]`` and ``f`` is the body.
The generator is given parity ``n mod 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .superalg import Chart, Coord, Parity, SuperExpr, VectorField, partial
from .gforms import eta, lie_derive, wedge_words

__all__ = [
    "BerezinSection",
    "generator_parity",
    "apply_top_operator",
    "berezin_integral_body",
    "box_integral",
    "reduce_operator_class",
    "lie_berezin",
    "div_berezin",
    "div_graded",
    "projection",
]


def generator_parity(chart: Chart) -> int:
    return chart.n % 2


@dataclass(frozen=True)
class BerezinSection:
    """``[xi] . body``.  ``order`` is 0 for the base generator, ``k`` for the lifted one."""

    body: SuperExpr
    chart: Chart
    order: int = 0

    def __add__(self, other: "BerezinSection") -> "BerezinSection":
        return BerezinSection(self.body + other.body, self.chart, max(self.order, other.order))

    def times(self, a: SuperExpr) -> "BerezinSection":
        """Right module action ``(xi . f) . a = xi . (f a)``."""
        return BerezinSection(self.body * a, self.chart, self.order)

    @property
    def parity(self):
        from .superalg import parity_of
        p = parity_of(self.body)
        if p == "inhomogeneous":
            return p
        return Parity((int(p) + generator_parity(self.chart)) % 2)


def _odd_base_free(e: SuperExpr) -> SuperExpr:
    """Drop every term containing an odd base coordinate."""
    out = {}
    for mono, c in e.items():
        if any(g.kind == "x" and g.index < 0 for g, _ in mono):
            continue
        out[mono] = c
    return SuperExpr(out, e.chart)


def apply_top_operator(f: SuperExpr, n: int) -> SuperExpr:
    """``d_{-1} o ... o d_{-n} f`` with left partials (``d_{-n}`` acts first)."""
    out = f
    for j in range(n, 0, -1):
        out = partial(out, Coord.base(-j))
    return out


def berezin_integral_body(sec: BerezinSection) -> SuperExpr:
    """Coefficient ``c(x)`` of the reduced integrand ``c . dx^1 ... dx^m``.

    Obtained by applying the top odd operator to the body and restricting to
    the even part of the base.
    """
    for c in sec.body.coordinates():
        if c.kind != "x":
            raise ValueError("body depends on fibre/jet coordinates; pull it back first")
    return _odd_base_free(apply_top_operator(sec.body, sec.chart.n))


def box_integral(coeff: SuperExpr, box: Sequence[tuple], chart: Chart) -> Fraction:
    """Exact integral of a polynomial in ``x^1..x^m`` over an axis-aligned box."""
    if len(box) != chart.m:
        raise ValueError(f"box needs {chart.m} intervals")
    box = [(Fraction(a), Fraction(b)) for a, b in box]
    total = Fraction(0)
    for mono, c in coeff.items():
        exps = [0] * chart.m
        for g, e in mono:
            if g.p or g.kind != "x" or g.index < 0:
                raise ValueError("integrand must be a polynomial in the even base coordinates")
            exps[g.index - 1] = e
        term = c
        for (a, b), e in zip(box, exps):
            term *= (b ** (e + 1) - a ** (e + 1)) / (e + 1)
        total += term
    return total


def _parity(e: SuperExpr) -> int:
    from .superalg import parity_of
    p = parity_of(e)
    if p == "inhomogeneous":
        raise ValueError("homogeneous expression required")
    return int(p)


def projection(X: VectorField) -> VectorField:
    """Base part ``X'`` of a projectable field."""
    comps = {c: v for c, v in X.components.items() if c.kind == "x"}
    for v in comps.values():
        if any(cc.kind != "x" for cc in v.coordinates()):
            raise ValueError("field is not projectable")
    return VectorField(comps, None, X.chart)


def reduce_operator_class(terms: Iterable[tuple[SuperExpr, Coord]], chart: Chart) -> SuperExpr:
    """Body ``b`` with ``[eta (x) P o sum a_c o d_c] = [xi] . b``.

    Integration by parts against the canonical operator:
    ``[eta (x) P o a o d_c] = [xi] . (-(-1)^{|c||a|} d_c a)``.
    """
    out = SuperExpr.const(0, chart)
    for a, c in terms:
        for part in a.homogeneous_parts():
            if part.is_zero():
                continue
            t = partial(part, c)
            if c.q * _parity(part):
                out = out + t
            else:
                out = out - t
    return out


def lie_berezin(X: VectorField, sec: BerezinSection) -> BerezinSection:
    """``L_X [eta (x) P] = (-1)^{|X||eta (x) P| + 1} [eta (x) P o X]`` in the canonical basis.

    ``X`` acts through its projection on the generator; bodies depending on
    jet coordinates are handled with the right Leibniz rule.
    """
    chart = sec.chart
    Xp = projection(X)
    xi = generator_parity(chart)
    body_base = all(c.kind == "x" for c in sec.body.coordinates())
    out = SuperExpr.const(0, chart)
    for part in Xp.homogeneous_parts():
        qx = int(part.parity)
        if body_base:
            for fpart in sec.body.homogeneous_parts():
                if fpart.is_zero():
                    continue
                qf = _parity(fpart)
                red = reduce_operator_class(
                    [(fpart * v, c) for c, v in part.components.items()], chart)
                sign = (qx * (xi + qf) + 1) % 2
                out = out + (-red if sign else red)
        else:
            red = reduce_operator_class([(v, c) for c, v in part.components.items()], chart)
            sign = (qx * xi + 1) % 2
            gen = -red if sign else red
            out = out + gen * sec.body
    if not body_base:
        # (-1)^{|X||xi|} xi . X(f), with the full field acting on the body
        for part in X.homogeneous_parts():
            qx = int(part.parity)
            t = part(sec.body)
            out = out + (-t if (qx * xi) % 2 else t)
    return BerezinSection(out, chart, sec.order)


def div_berezin(X: VectorField, chart: Chart | None = None) -> SuperExpr:
    """``sum d f_i / d x^i + sum (-1)^{|g_j|} d g_j / d x^{-j}`` over the base part."""
    chart = chart or X.chart
    out = SuperExpr.const(0, chart)
    for c, v in X.components.items():
        if c.kind != "x":
            continue
        if c.index > 0:
            out = out + partial(v, c)
        else:
            ev, od = v.homogeneous_parts()
            out = out + partial(ev, c) - partial(od, c)
    return out


def div_graded(X: VectorField, chart: Chart | None = None):
    """``f`` with ``L_{X'} eta = eta . f``, or ``None`` if no such ``f`` exists."""
    chart = chart or X.chart
    Xp = projection(X)
    vol = eta(chart)
    res = lie_derive(Xp, vol)
    words = wedge_words(res)
    key = next(iter(wedge_words(vol)))
    f = SuperExpr.const(0, chart)
    for w, coeff in words.items():
        if w == key:
            f = coeff
        elif not coeff.is_zero():
            return None
    return f
