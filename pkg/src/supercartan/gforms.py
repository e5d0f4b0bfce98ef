"""Graded differential forms: wedge, d^G, insertion, Lie derivative, D/dv split.

Forms live in the same bigraded kernel as superfunctions (see
:mod:`supercartan.superalg`).  ``d^G x^alpha`` has bidegree ``(1, |x^alpha|)``
and the commutation sign of two homogeneous elements is
``(-1)**(p1*p2 + q1*q2)``.  Consequences: ``d^G x^i`` (even coordinate) squares
to zero while ``d^G x^{-j}`` (odd coordinate) does not.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable

from .superalg import (
    Chart,
    Coord,
    Differential,
    SuperExpr,
    VectorField,
    apply_derivation,
    default_name,
)

GradedForm = SuperExpr

__all__ = [
    "GradedForm",
    "dG",
    "wedge",
    "d_graded",
    "insert",
    "lie_derive",
    "eta",
    "form_degree",
    "wedge_words",
    "horizontal_op",
    "horizontal_op_even",
    "horizontal_op_odd",
    "vertical_op",
    "vertical_op_lemma",
    "split_horizontal_vertical",
    "evaluate_form",
    "to_contact_basis",
    "render_form",
    "render_latex",
]


def dG(c) -> SuperExpr:
    """The basis 1-form ``d^G c`` for a coordinate (or coordinate expression)."""
    if isinstance(c, SuperExpr):
        c = next(iter(c.generators()))
    return SuperExpr.gen(c.d)


def wedge(*forms: SuperExpr) -> SuperExpr:
    out = SuperExpr.const(1)
    for f in forms:
        out = out * f
    return out


def d_graded(w: SuperExpr) -> SuperExpr:
    """Graded exterior differential, a derivation of bidegree (1, 0)."""
    return apply_derivation(w, lambda g: None if g.p else SuperExpr.gen(g.d), 1, 0)


def _parts(X: VectorField):
    return [(p, int(p.parity)) for p in X.homogeneous_parts()]


def insert(X: VectorField, w: SuperExpr) -> SuperExpr:
    """Insertion ``iota_X``: derivation of bidegree (-1, |X|), ``iota_X d^G c = X^c``."""
    out = SuperExpr.const(0, w.chart)
    for part, q in _parts(X):
        out = out + apply_derivation(
            w, lambda g: part.component(g.coord) if g.p else None, 1, q)
    return out


def lie_derive(X: VectorField, w: SuperExpr) -> SuperExpr:
    """Graded Lie derivative ``L_X``: derivation of bidegree (0, |X|) commuting with d^G."""
    out = SuperExpr.const(0, w.chart)
    for part, q in _parts(X):
        def image(g, part=part):
            if g.p:
                comp = part.component(g.coord)
                return None if comp is None else d_graded(comp)
            return part.component(g)
        out = out + apply_derivation(w, image, 0, q)
    return out


def eta(chart: Chart) -> SuperExpr:
    """Graded volume ``d^G x^1 ^ ... ^ d^G x^m``."""
    return wedge(*[dG(Coord.base(i)) for i in range(1, chart.m + 1)])


def form_degree(w: SuperExpr):
    """Form degree of a homogeneous form, or ``None`` if mixed (0 for zero)."""
    ds = w.form_degrees()
    if not ds:
        return 0
    return ds.pop() if len(ds) == 1 else None


def wedge_words(w: SuperExpr) -> dict:
    """Group a form as ``sum word * coefficient`` (coefficient on the right)."""
    out: dict = {}
    for mono, c in w.items():
        word = tuple((g, e) for g, e in mono if g.p)
        rest = tuple((g, e) for g, e in mono if not g.p)
        out.setdefault(word, {})
        out[word][rest] = out[word].get(rest, Fraction(0)) + c
    return {k: SuperExpr(v, w.chart) for k, v in out.items()}


# -- horizontal / vertical split ---------------------------------------------

def _horizontal(w: SuperExpr, chart: Chart, alphas: Iterable[int]) -> SuperExpr:
    from .jetcoords import TotalDerivative

    out = SuperExpr.const(0, w.chart)
    for a in alphas:
        out = out + dG(Coord.base(a)) * lie_derive(TotalDerivative(a, chart), w)
    return out


def horizontal_op(w: SuperExpr, chart: Chart) -> SuperExpr:
    """``D = d^G x^alpha ^ L_{d/dx^alpha}`` summed over every base index."""
    return _horizontal(w, chart, chart.base_indices())


def horizontal_op_even(w: SuperExpr, chart: Chart) -> SuperExpr:
    """``D_0``: the part of ``D`` built on even base differentials."""
    return _horizontal(w, chart, range(1, chart.m + 1))


def horizontal_op_odd(w: SuperExpr, chart: Chart) -> SuperExpr:
    """``D_1 = D - D_0``."""
    return _horizontal(w, chart, [-j for j in range(1, chart.n + 1)])


def vertical_op(w: SuperExpr, chart: Chart) -> SuperExpr:
    """Vertical differential by subtraction, ``d^G - D``."""
    return d_graded(w) - horizontal_op(w, chart)


def vertical_op_lemma(w: SuperExpr, chart: Chart) -> SuperExpr:
    """Closed first-order formula for the vertical differential.

    ``theta^mu ^ L_{d/dy^mu} + theta^mu_a ^ L_{d/dy^mu_a}
    - d theta^mu ^ iota_{d/dy^mu} - d theta^mu_b ^ iota_{d/dy^mu_b}``.
    Valid for forms on the first jet space.
    """
    from .jetcoords import contact_form
    from .superalg import coordinate_field

    out = SuperExpr.const(0, w.chart)
    for mu in chart.fiber_indices():
        idx = [((), ())] + [((i,), ()) for i in range(1, chart.m + 1)] + \
              [((), (-j,)) for j in range(1, chart.n + 1)]
        for I, A in idx:
            c = Coord.jet(mu, I, A)
            X = coordinate_field(c)
            th = contact_form(mu, I, A, chart)
            out = out + th * lie_derive(X, w)
            out = out - d_graded(th) * insert(X, w)
    return out


def split_horizontal_vertical(w: SuperExpr, chart: Chart) -> dict:
    """Return ``{"D", "D0", "D1", "dv"}`` applied to ``w``."""
    D0 = horizontal_op_even(w, chart)
    D1 = horizontal_op_odd(w, chart)
    return {"D": D0 + D1, "D0": D0, "D1": D1, "dv": d_graded(w) - D0 - D1}


def evaluate_form(w: SuperExpr, fields: list) -> SuperExpr:
    """``w(X_1, ..., X_p) = iota_{X_1}( ... iota_{X_p} w)``."""
    out = w
    for X in reversed(fields):
        out = insert(X, out)
    return out


def to_contact_basis(w: SuperExpr, chart: Chart) -> SuperExpr:
    """Rewrite ``w`` over ``{d^G x, theta}``.

    The result is written with ``d^G y^mu_Q`` standing for ``theta^mu_Q``:
    substituting ``d^G y_Q -> d^G y_Q + D y_Q`` is exactly the change of basis
    ``d^G y_Q = theta_Q + D y_Q``.
    """
    from .jetcoords import horizontal_differential
    from .superalg import substitute

    def image(g):
        if g.p and g.coord.kind == "y":
            return SuperExpr.gen(g) + horizontal_differential(g.coord, chart)
        return None
    return substitute(w, image, w.chart)


# -- rendering -----------------------------------------------------------------

def render_form(w: SuperExpr, name: Callable[[Coord], str] = default_name) -> str:
    """Text rendering with coefficients on the right of wedge words."""
    if w.is_zero():
        return "0"
    parts = []
    for word, coeff in sorted(wedge_words(w).items(), key=lambda kv: tuple(g.key + (e,) for g, e in kv[0])):
        ws = []
        for g, e in word:
            s = "d" + name(g.coord)
            ws.extend([s] * e)
        wtxt = "^".join(ws)
        ctxt = coeff.render(name)
        if not ws:
            parts.append(f"({ctxt})")
        elif ctxt == "1":
            parts.append(wtxt)
        else:
            parts.append(f"{wtxt}*({ctxt})")
    return " + ".join(parts)


def _latex_coord(c: Coord, name) -> str:
    if name is not None:
        return name(c)
    if c.kind == "x":
        return f"x^{{{c.index}}}"
    sub = ",".join(str(i) for i in c.I + c.A)
    return f"y^{{{c.index}}}" + (f"_{{{sub}}}" if sub else "")


def render_latex(w: SuperExpr, name=None, dname=None, eta_glyph: bool = False) -> str:
    """LaTeX rendering using ``d^G`` glyphs; coefficients on the right.

    ``dname`` overrides the glyph of a differential (e.g. to print contact
    forms); with ``eta_glyph`` a leading ``d^G x^1 ^ ... ^ d^G x^m`` prints as
    ``\\eta^G``.
    """
    if w.is_zero():
        return "0"

    def expr(e: SuperExpr) -> str:
        pieces = []
        for mono, c in e.sorted_terms():
            fs = []
            for g, k in mono:
                s = _latex_coord(g, name)
                fs.append(s if k == 1 else f"({s})^{{{k}}}")
            body = " ".join(fs)
            if c.denominator != 1:
                coef = f"\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"
            else:
                coef = str(abs(c)) if (abs(c) != 1 or not fs) else ""
            pieces.append(("-" if c < 0 else "+", (coef + " " + body).strip()))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for s, t in pieces[1:]:
            out += f" {s} {t}"
        return out

    m = w.chart.m if w.chart is not None else 0
    vol = tuple(Coord.base(i).d for i in range(1, m + 1))
    parts = []
    for word, coeff in sorted(wedge_words(w).items(), key=lambda kv: tuple(g.key + (e,) for g, e in kv[0])):
        flat = []
        for g, e in word:
            flat.extend([g] * e)
        ws = []
        if eta_glyph and m and tuple(flat[:m]) == vol:
            ws.append("\\eta^G")
            flat = flat[m:]
        for g in flat:
            ws.append(dname(g.coord) if dname else f"d^G {_latex_coord(g.coord, name)}")
        wtxt = " \\wedge ".join(ws)
        ctxt = expr(coeff)
        if not ws:
            parts.append(f"\\left({ctxt}\\right)")
        elif ctxt == "1":
            parts.append(wtxt)
        else:
            parts.append(f"{wtxt} \\cdot \\left({ctxt}\\right)")
    return " + ".join(parts)
