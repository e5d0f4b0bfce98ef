"""Multi-indices, jet coordinates, total derivatives, contact forms, prolongation.

Negative multi-indices are plain tuples of negative integers. ``None``
stands for the annihilating index (written as an empty-set symbol in the
literature).  Jet coordinates are kept with strictly decreasing negative part,
e.g. ``(-1, -3)``.  A juxtaposition that lands out of order is canonicalised
through :func:`reorder_sign`.

A jet coordinate ``y^mu_{I,A}`` with ``A = (a1, ..., al)`` stands for
``d^I o d_{a1} o ... o d_{al}`` applied to ``y^mu``, composing the odd
partials from left to right.  With this reading
``d/dx^{-j} y_A = y_{(-j) * A}``, matching the total derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, combinations
from typing import Iterable, Mapping

from .superalg import (
    Chart,
    ContextError,
    Coord,
    Parity,
    SuperExpr,
    VectorField,
    coordinate_field,
    partial,
    substitute,
)
from .gforms import d_graded, dG, lie_derive

__all__ = [
    "star",
    "reorder_sign",
    "position",
    "p_index",
    "q_index",
    "remove_index",
    "z2",
    "phi",
    "epsilon",
    "JetContext",
    "jet_coord",
    "jy",
    "TotalDerivative",
    "total_derivative",
    "iterated_odd_derivative",
    "horizontal_differential",
    "contact_form",
    "Section",
    "jet_value",
    "jet_extension",
    "pullback_by_jet",
    "prolong",
    "ProlongationError",
    "transform_jet1",
    "VectorField",
    "coordinate_field",
]


# -- multi-index calculus -------------------------------------------------------

def star(A, B, k: int | None = None):
    """Ordered juxtaposition of negative multi-indices; ``None`` on repeats or overflow."""
    if A is None or B is None:
        return None
    out = tuple(A) + tuple(B)
    if len(set(out)) != len(out):
        return None
    if k is not None and len(out) > k:
        return None
    return out


def reorder_sign(A):
    """Sort ``A`` into strictly decreasing order; return ``(sorted, sign)``.

    ``sign`` is the parity of the sorting permutation, or 0 (with ``None``) if
    ``A`` has a repeated entry.
    """
    if A is None:
        return None, 0
    A = tuple(A)
    if len(set(A)) != len(A):
        return None, 0
    inv = sum(1 for s in range(len(A)) for t in range(s + 1, len(A)) if A[s] < A[t])
    return tuple(sorted(A, reverse=True)), (-1 if inv % 2 else 1)


def position(b: int, B) -> int:
    B = tuple(B)
    if b not in B:
        raise ValueError(f"{b} is not an entry of {B}")
    return B.index(b) + 1


def p_index(b: int, B) -> int:
    return (position(b, B) - 1) % 2


def q_index(b: int, B) -> int:
    return position(b, B) % 2


def remove_index(B, b: int) -> tuple:
    position(b, B)
    return tuple(x for x in B if x != b)


def z2(Z) -> int:
    return len(tuple(Z)) % 2


def phi(Q, B) -> int:
    """``phi(Q, B) = sum_k |i_k| phi_k(b_k)`` with ``phi_k = p`` for odd k, ``q`` for even k.

    Entries of ``Q`` enter through their parity (negative entries are odd)
    and ``b_k`` is the entry of ``B`` matched to ``i_k``.
    """
    Q, B = tuple(Q), tuple(B)
    if not Q:
        return 0
    if len(B) < len(Q):
        raise ValueError("phi needs |B| >= |Q|")
    total = 0
    for k, ik in enumerate(Q, start=1):
        if ik > 0:
            continue
        f = p_index if k % 2 == 1 else q_index
        total += f(ik, B)
    return total


def epsilon(j: int, A) -> int:
    """Sign in front of ``d^G x^{-j} . y_{I,{-j}*A}`` in the contact forms."""
    return reorder_sign(((-j),) + tuple(A))[1]


# -- coordinates ---------------------------------------------------------------

def jet_coord(mu: int, I: Iterable[int] = (), A=()):
    """``(sign, Coord)`` for ``y^mu_{I,A}`` with arbitrary order in ``A``.

    Returns ``(0, None)`` when ``A`` has a repeat.
    """
    sA, s = reorder_sign(A)
    if s == 0:
        return 0, None
    return s, Coord.jet(mu, tuple(sorted(I)), sA)


def jy(mu: int, I: Iterable[int] = (), A=(), chart: Chart | None = None) -> SuperExpr:
    """Signed jet coordinate as an expression (zero for annihilated indices)."""
    s, c = jet_coord(mu, I, A)
    if s == 0:
        return SuperExpr.const(0, chart)
    return SuperExpr.gen(c, chart) * s


def _multi_indices(m: int, n: int, order: int):
    """All (I, A) with |I| + |A| == order, A strictly decreasing."""
    out = []
    for la in range(0, min(n, order) + 1):
        for A in combinations(range(-1, -n - 1, -1), la):
            for I in combinations_with_replacement(range(1, m + 1), order - la):
                out.append((tuple(I), tuple(A)))
    return out


@dataclass(frozen=True)
class JetContext:
    """The chart of ``J^k`` for base (m|n) and fibre (r|s)."""

    m: int
    n: int
    r: int
    s: int
    k: int = 1

    @property
    def chart(self) -> Chart:
        return Chart(self.m, self.n, self.r, self.s)

    def base_coords(self) -> list[Coord]:
        return [Coord.base(a) for a in self.chart.base_indices()]

    def fiber_coords(self) -> list[Coord]:
        return [Coord.jet(mu) for mu in self.chart.fiber_indices()]

    def multi_indices(self, order: int) -> list:
        return _multi_indices(self.m, self.n, order)

    def jet_coords(self, order: int | None = None) -> list[Coord]:
        orders = range(0, self.k + 1) if order is None else [order]
        out = []
        for o in orders:
            for mu in self.chart.fiber_indices():
                for I, A in self.multi_indices(o):
                    out.append(Coord.jet(mu, I, A))
        return out

    @property
    def catalog(self) -> list[Coord]:
        return self.base_coords() + self.jet_coords()

    def dimension(self) -> tuple[int, int]:
        ev = sum(1 for c in self.catalog if c.q == 0)
        return ev, len(self.catalog) - ev

    def promote(self, k: int) -> "JetContext":
        return JetContext(self.m, self.n, self.r, self.s, k)


# -- total derivatives ---------------------------------------------------------

class TotalDerivative(VectorField):
    """The horizontal lift ``d/dx^alpha`` acting on any jet order."""

    def __init__(self, alpha: int, chart: Chart | None = None):
        if alpha == 0:
            raise ValueError("no base index 0")
        super().__init__({}, 1 if alpha < 0 else 0, chart)
        self.alpha = alpha
        self._cache = {}

    def component(self, c):
        if c in self._cache:
            return self._cache[c]
        a = self.alpha
        if c.kind == "x":
            v = SuperExpr.const(1) if c.index == a else None
        elif a > 0:
            v = SuperExpr.gen(Coord.jet(c.index, c.I + (a,), c.A))
        else:
            s, cc = jet_coord(c.index, c.I, (a,) + c.A)
            v = None if s == 0 else SuperExpr.gen(cc) * s
        self._cache[c] = v
        return v

    @property
    def components(self):
        raise TypeError("total derivative has infinitely many components")

    def __repr__(self):
        return f"TotalDerivative({self.alpha})"


@lru_cache(maxsize=None)
def _td(alpha: int) -> TotalDerivative:
    return TotalDerivative(alpha)


def total_derivative(alpha: int, f: SuperExpr) -> SuperExpr:
    """``d f / d x^alpha``; the jet order grows by one."""
    return _td(alpha)(f)


def iterated_odd_derivative(B, f: SuperExpr) -> SuperExpr:
    """``d/dx^{b1} o ... o d/dx^{bl} f`` (the last entry acts first)."""
    if B is None:
        return SuperExpr.const(0, f.chart)
    out = f
    for b in reversed(tuple(B)):
        out = total_derivative(b, out)
    return out


def horizontal_differential(c: Coord, chart: Chart) -> SuperExpr:
    """``D c = sum_alpha d^G x^alpha . (d c / d x^alpha)`` for a coordinate."""
    out = SuperExpr.const(0, chart)
    for a in chart.base_indices():
        comp = _td(a).component(c)
        if comp is not None:
            out = out + dG(Coord.base(a)) * comp
    return out


def contact_form(mu: int, I: Iterable[int] = (), A=(), chart: Chart | None = None) -> SuperExpr:
    """``theta^mu_{I,A} = d^G y^mu_{I,A} - sum_h d^G x^h y_{h+I,A} - sum_j eps(j,A) d^G x^{-j} y_{I,(-j)*A}``."""
    if chart is None:
        raise ContextError("contact_form needs a chart")
    I = tuple(sorted(I))
    A = tuple(A)
    s, c = jet_coord(mu, I, A)
    if s == 0:
        raise ValueError("annihilated multi-index")
    chart.check(c)
    out = SuperExpr.gen(c.d, chart)
    for h in range(1, chart.m + 1):
        out = out - dG(Coord.base(h)) * SuperExpr.gen(Coord.jet(mu, I + (h,), c.A))
    for j in range(1, chart.n + 1):
        e = epsilon(j, c.A)
        if e:
            _, cc = jet_coord(mu, I, (-j,) + c.A)
            out = out - dG(Coord.base(-j)) * SuperExpr.gen(cc) * e
    return out * s


# -- sections and pullbacks ----------------------------------------------------

class Section:
    """Polynomial section ``mu -> sigma^* y^mu`` in base coordinates only."""

    def __init__(self, components: Mapping[int, SuperExpr], chart: Chart):
        comps = {}
        for mu in chart.fiber_indices():
            v = components.get(mu, SuperExpr.const(0, chart))
            if not isinstance(v, SuperExpr):
                v = SuperExpr.const(v, chart)
            for c in v.coordinates():
                if c.kind != "x":
                    raise ContextError("section components may only involve base coordinates")
            par = v.homogeneous_parts()[1 if mu > 0 else 0]
            if not par.is_zero():
                raise ContextError(f"component {mu} has the wrong parity")
            comps[mu] = v
        self.components = comps
        self.chart = chart
        self._cache = {}

    def value(self, c: Coord) -> SuperExpr:
        if c in self._cache:
            return self._cache[c]
        if c.kind == "x":
            v = SuperExpr.gen(c, self.chart)
        else:
            v = self.components[c.index]
            for a in reversed(c.A):
                v = partial(v, Coord.base(a))
            for i in c.I:
                v = partial(v, Coord.base(i))
        self._cache[c] = v
        return v


def jet_value(s: Section, c: Coord) -> SuperExpr:
    return s.value(c)


def jet_extension(s: Section, k: int) -> dict:
    """Values of all jet coordinates of order <= k along ``j^k s``."""
    ctx = JetContext(s.chart.m, s.chart.n, s.chart.r, s.chart.s, k)
    return {c: s.value(c) for c in ctx.jet_coords()}


def pullback_by_jet(s: Section, w: SuperExpr) -> SuperExpr:
    """Pull a function or form back along the jet extension of ``s``."""
    def image(g):
        if g.p:
            if g.coord.kind == "x":
                return None
            return d_graded(s.value(g.coord))
        if g.kind == "x":
            return None
        return s.value(g)
    return substitute(w, image, s.chart)


# -- prolongation --------------------------------------------------------------

class ProlongationError(ValueError):
    pass


class _Prolonged(VectorField):
    def __init__(self, comps, parity, chart, base_part, k):
        super().__init__(comps, parity, chart)
        self.base_part = base_part
        self.order = k


def prolong(X: VectorField, k: int, chart: Chart, check: bool = True) -> VectorField:
    """Contact prolongation ``X_(k)`` of a projectable field.

    The new components are not written down from a closed formula; for each
    ``theta_Q`` of order below ``k`` the horizontal part of ``L_X theta_Q``
    is computed with the order-``|Q|+1`` components set to zero, and the
    components are then read off so that this horizontal part vanishes.
    All ``(alpha, Q)`` routes to the same coordinate must agree.
    """
    ctx = JetContext(chart.m, chart.n, chart.r, chart.s, k)
    for c, v in X.components.items():
        if c.kind == "x":
            if any(cc.kind != "x" for cc in v.coordinates()):
                raise ProlongationError("field is not projectable")
        elif c.order > 0:
            raise ProlongationError("field must live on the total space (no jet components)")
    parts = X.homogeneous_parts()
    if not parts:
        return _Prolonged({}, 0, chart, {}, k)
    out = None
    for part in parts:
        q = int(part.parity)
        comps = {c: v for c, v in part.components.items()}
        for order in range(0, k):
            known = VectorField(dict(comps), q, chart)
            new: dict = {}
            for mu in chart.fiber_indices():
                for I, A in ctx.multi_indices(order):
                    th = contact_form(mu, I, A, chart)
                    lt = lie_derive(known, th)
                    h = _horizontal_part(lt, chart)
                    for a in chart.base_indices():
                        coeff = _dx_coefficient(h, a)
                        if a > 0:
                            sgn, tgt = 1, Coord.jet(mu, I + (a,), A)
                        else:
                            sgn, tgt = jet_coord(mu, I, (a,) + A)
                            if sgn == 0:
                                if check and not coeff.is_zero():
                                    raise ProlongationError("inconsistent contact condition")
                                continue
                        val = coeff * sgn
                        if q and a < 0:
                            val = -val
                        if tgt in new:
                            if check and new[tgt] != val:
                                raise ProlongationError(f"routes disagree for {tgt!r}")
                        else:
                            new[tgt] = val
            comps.update({c: v for c, v in new.items() if not v.is_zero()})
        base = {c: v for c, v in part.components.items() if c.kind == "x"}
        P = _Prolonged(comps, q, chart, base, k)
        out = P if out is None else _merge_prolonged(out, P, chart, k)
    return out


def _merge_prolonged(a, b, chart, k):
    comps = dict(a.components)
    for c, v in b.components.items():
        comps[c] = comps[c] + v if c in comps else v
    base = dict(a.base_part)
    for c, v in b.base_part.items():
        base[c] = base[c] + v if c in base else v
    return _Prolonged(comps, None, chart, base, k)


def _horizontal_part(w: SuperExpr, chart: Chart) -> SuperExpr:
    """Replace every ``d^G y_Q`` by ``D y_Q`` (1-forms only)."""
    def image(g):
        if g.p and g.coord.kind == "y":
            return horizontal_differential(g.coord, chart)
        return None
    return substitute(w, image, chart)


def _dx_coefficient(w: SuperExpr, a: int) -> SuperExpr:
    """Right coefficient of ``d^G x^a`` in a 1-form."""
    g = Coord.base(a).d
    acc = {}
    for mono, c in w.items():
        if mono and mono[0][0] is g and mono[0][1] == 1:
            rest = mono[1:]
            if any(h.p for h, _ in rest):
                continue
            acc[rest] = acc.get(rest, Fraction(0)) + c
    return SuperExpr(acc, w.chart)


# -- coordinate change on J^1 --------------------------------------------------

def transform_jet1(chart: Chart, xbar: Mapping[int, SuperExpr], ybar: Mapping[int, SuperExpr],
                   x_of_xbar: Mapping[int, SuperExpr], signs: str = "covariant") -> dict:
    """First-order jet coordinates in a new fibred chart.

    ``xbar[beta]`` gives the new base coordinates in terms of the old ones,
    ``ybar[nu]`` the new fibre coordinates in terms of ``(x, y)``, and
    ``x_of_xbar[alpha]`` the inverse base map written with the old base
    coordinate symbols standing for the barred ones.  Returns
    ``{(nu, beta): ybar^nu_beta}`` as functions on the old ``J^1``, using
    ``ybar^nu_beta = (-1)^{a(nu+b)} dybar/dx^a dx^a/dxbar^b
    + (-1)^{mu(mu+nu+s+b)} dybar/dy^mu dx^s/dxbar^b y^mu_s``
    with indices standing for parities (``signs="literal"``).  Those factors
    break covariance once the base Jacobian mixes parities; the default
    ``signs="covariant"`` uses the exponents ``(a+b)(nu+a)`` and
    ``(nu+mu)(b+mu)`` that come from the left chain rule
    ``ybar_b = sum_a (dx^a/dxbar^b) d ybar/dx^a``.
    """
    if signs not in ("covariant", "literal"):
        raise ValueError(f"unknown sign convention {signs!r}")
    literal = signs == "literal"
    base = chart.base_indices()
    for b, v in xbar.items():
        if any(c.kind != "x" for c in v.coordinates()):
            raise ValueError("coordinate change is not fibred: xbar depends on fibre coordinates")
    for a, v in x_of_xbar.items():
        if any(c.kind != "x" for c in v.coordinates()):
            raise ValueError("inverse base map must depend on base coordinates only")

    def back(e: SuperExpr) -> SuperExpr:
        # evaluate a function of xbar at xbar(x)
        return substitute(e, lambda g: None if g.p else xbar.get(g.index) if g.kind == "x" else None, chart)

    jac = {}
    for a in base:
        xa = x_of_xbar.get(a, SuperExpr.gen(Coord.base(a), chart))
        for b in base:
            jac[(a, b)] = back(partial(xa, Coord.base(b)))

    def par(i):
        return 1 if i < 0 else 0

    out = {}
    for nu in chart.fiber_indices():
        yb = ybar.get(nu, SuperExpr.gen(Coord.jet(nu), chart))
        for b in base:
            acc = SuperExpr.const(0, chart)
            for a in base:
                t = partial(yb, Coord.base(a)) * jac[(a, b)]
                e = par(a) * (par(nu) + par(b)) if literal else (par(a) + par(b)) * (par(nu) + par(a))
                if e % 2:
                    t = -t
                acc = acc + t
            for mu in chart.fiber_indices():
                dy = partial(yb, Coord.jet(mu))
                if dy.is_zero():
                    continue
                for sgm in base:
                    t = dy * jac[(sgm, b)] * SuperExpr.gen(Coord.jet(mu, (sgm,) if sgm > 0 else (), (sgm,) if sgm < 0 else ()), chart)
                    if literal:
                        e = par(mu) * (par(mu) + par(nu) + par(sgm) + par(b))
                    else:
                        e = (par(nu) + par(mu)) * (par(b) + par(mu))
                    if e % 2:
                        t = -t
                    acc = acc + t
            out[(nu, b)] = acc
    return out
