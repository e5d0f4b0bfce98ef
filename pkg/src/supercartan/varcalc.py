"""Poincare-Cartan forms, Euler-Lagrange operator, critical sections, Noether.

Conventions follow the rest of the package: forms carry their coefficients
on the right, ``T = (-1, ..., -n)`` is the totally odd multi-index and
``d^n L / dx^T = d/dx^{-1}( ... d/dx^{-n} L)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .superalg import (
    Chart,
    Coord,
    Parity,
    SuperExpr,
    VectorField,
    coordinate_field,
    parity_of,
    partial,
)
from .gforms import (
    d_graded,
    dG,
    eta,
    evaluate_form,
    horizontal_op_even,
    horizontal_op_odd,
    insert,
    lie_derive,
    vertical_op,
)
from .jetcoords import (
    JetContext,
    Section,
    TotalDerivative,
    contact_form,
    iterated_odd_derivative,
    jet_coord,
    prolong,
    pullback_by_jet,
    reorder_sign,
    total_derivative,
)
from .berezin import BerezinSection, div_berezin, div_graded, projection

__all__ = [
    "Lagrangian",
    "VectorForm",
    "jk_tensor",
    "apply_vector_form",
    "pc_form_order1",
    "pc_form_order1_via_jk",
    "pc_form_berezinian",
    "pc_form_intrinsic",
    "odd_lie_chain",
    "comparison_density",
    "varpi_form",
    "alpha_form",
    "d_pc_decomposition",
    "euler_lagrange",
    "grouped_el_form",
    "is_critical",
    "critical_audit",
    "NoetherReport",
    "noether_check",
    "pc_form_order_k",
    "functoriality_defect",
    "lemma_vertical",
    "lemma_shift",
    "lemma_first",
    "proposition_sides",
    "reduction_sides",
]


class Lagrangian:
    """A first-order Lagrangian ``L`` on ``J^1`` with its chart."""

    def __init__(self, L: SuperExpr, chart: Chart):
        if not isinstance(L, SuperExpr):
            L = SuperExpr.const(L, chart)
        for c in L.coordinates():
            if c.kind == "y" and c.order > 1:
                raise ValueError("Lagrangian must be first order")
            chart.check(c)
        if not L.is_function():
            raise ValueError("Lagrangian must be a function")
        self.L = L
        self.chart = chart

    @property
    def n(self) -> int:
        return self.chart.n

    @property
    def berezinian(self) -> BerezinSection:
        return BerezinSection(self.L, self.chart, 1)

    def __repr__(self):
        return f"Lagrangian({self.L.render()})"


def _lag(L, chart=None) -> Lagrangian:
    if isinstance(L, Lagrangian):
        return L
    return Lagrangian(L, chart if chart is not None else L.chart)


def _iota_eta(i: int, chart: Chart) -> SuperExpr:
    """``iota_{d/dx^i} eta = (-1)^{i-1} dx^1 ^ .. ^ dx^i-hat ^ .. ^ dx^m``."""
    return insert(coordinate_field(Coord.base(i)), eta(chart))


# -- Jk --------------------------------------------------------------------------

@dataclass
class VectorForm:
    """``sum_t form_t (x) d/dc_t`` with each value a coordinate field."""

    terms: list = field(default_factory=list)  # (form, Coord)

    def evaluate(self, fields: list) -> VectorField:
        comps: dict = {}
        for w, c in self.terms:
            v = evaluate_form(w, fields)
            if v.is_zero():
                continue
            comps[c] = comps[c] + v if c in comps else v
        return VectorField(comps)


def jk_tensor(k: int, chart: Chart) -> VectorForm:
    """``J_k = (-1)^{m-1} iota_{d/dx^i} eta ^ theta^mu_Q (x) d/dy^mu_{i+Q}``, ``|Q| <= k-1``."""
    ctx = JetContext(chart.m, chart.n, chart.r, chart.s, k)
    sgn = -1 if (chart.m - 1) % 2 else 1
    terms = []
    for i in range(1, chart.m + 1):
        ie = _iota_eta(i, chart) * sgn
        for mu in chart.fiber_indices():
            for order in range(0, k):
                for I, A in ctx.multi_indices(order):
                    th = contact_form(mu, I, A, chart)
                    terms.append((ie * th, Coord.jet(mu, I + (i,), A)))
    return VectorForm(terms)


def apply_vector_form(J: VectorForm, f: SuperExpr) -> SuperExpr:
    """``L_J f = iota_J d^G f = sum form_t . (d f / d c_t)``."""
    out = SuperExpr.const(0, f.chart)
    for w, c in J.terms:
        df = partial(f, c)
        if not df.is_zero():
            out = out + w * df
    return out


# -- Poincare-Cartan forms -------------------------------------------------------

def pc_form_order1(L, chart: Chart | None = None) -> SuperExpr:
    """``Theta_0 = sum (-1)^{m+i} dx^1..^i..dx^m ^ theta^mu . dL/dy^mu_i + eta . L``."""
    lag = _lag(L, chart)
    ch = lag.chart
    out = eta(ch) * lag.L
    for i in range(1, ch.m + 1):
        hat = SuperExpr.const(1, ch)
        for h in range(1, ch.m + 1):
            if h != i:
                hat = hat * dG(Coord.base(h))
        sgn = -1 if (ch.m + i) % 2 else 1
        for mu in ch.fiber_indices():
            dl = partial(lag.L, Coord.jet(mu, (i,)))
            if dl.is_zero():
                continue
            out = out + hat * contact_form(mu, (), (), ch) * dl * sgn
    return out


def pc_form_order1_via_jk(L, chart: Chart | None = None) -> SuperExpr:
    lag = _lag(L, chart)
    return apply_vector_form(jk_tensor(1, lag.chart), lag.L) + eta(lag.chart) * lag.L


def odd_lie_chain(w: SuperExpr, chart: Chart, B=None) -> SuperExpr:
    """``L_{d/dx^{b1}} o ... o L_{d/dx^{bl}} w``; default ``B = (-1, ..., -n)``."""
    if B is None:
        B = tuple(-j for j in range(1, chart.n + 1))
    for b in reversed(tuple(B)):
        w = lie_derive(TotalDerivative(b, chart), w)
    return w


def pc_form_berezinian(L, chart: Chart | None = None) -> SuperExpr:
    """``Theta = L_{d/dx^{-1}} o ... o L_{d/dx^{-n}} Theta_0``."""
    lag = _lag(L, chart)
    return odd_lie_chain(pc_form_order1(lag), lag.chart)


def _top(lag: Lagrangian) -> SuperExpr:
    T = tuple(-j for j in range(1, lag.chart.n + 1))
    return iterated_odd_derivative(T, lag.L)


def comparison_density(L, chart: Chart | None = None) -> SuperExpr:
    """``lambda = eta . d^n L / dx^T`` (order ``n+1``)."""
    lag = _lag(L, chart)
    return eta(lag.chart) * _top(lag)


def pc_form_intrinsic(L, chart: Chart | None = None) -> SuperExpr:
    """``L_{J_{n+1}}(d^n L/dx^T) + eta . d^n L/dx^T``."""
    lag = _lag(L, chart)
    F = _top(lag)
    J = jk_tensor(lag.chart.n + 1, lag.chart)
    return apply_vector_form(J, F) + eta(lag.chart) * F


# -- dTheta decomposition, Euler-Lagrange ----------------------------------------

def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


def euler_lagrange(L, chart: Chart | None = None) -> dict:
    """``E(L)_mu = dL/dy^mu - d/dx^i dL/dy^mu_i - (-1)^mu d/dx^{-i} dL/dy^mu_{-i}``."""
    lag = _lag(L, chart)
    ch = lag.chart
    out = {}
    for mu in ch.fiber_indices():
        pm = 1 if mu < 0 else 0
        e = partial(lag.L, Coord.jet(mu))
        for i in range(1, ch.m + 1):
            e = e - total_derivative(i, partial(lag.L, Coord.jet(mu, (i,))))
        for j in range(1, ch.n + 1):
            t = total_derivative(-j, partial(lag.L, Coord.jet(mu, (), (-j,))))
            e = e - t * _sgn(pm)
        out[mu] = e
    return out


def alpha_form(L, chart: Chart | None = None, variant: str = "exact") -> SuperExpr:
    """``(-1)^m eta ^ d^G x^alpha . c_alpha``.

    ``variant="exact"`` uses ``c_alpha = dL/dx^alpha``, which is what the
    identity ``D_0(Theta_0 - eta L) + (-1)^m eta ^ d^G L = varpi + alpha``
    actually requires.  ``variant="doubled"`` gives the printed
    ``2 dL/dx^alpha - partial L/partial x^alpha``, kept for comparison.
    """
    lag = _lag(L, chart)
    ch = lag.chart
    vol = eta(ch)
    out = SuperExpr.const(0, ch)
    for a in ch.base_indices():
        cx = Coord.base(a)
        c = total_derivative(a, lag.L)
        if variant == "doubled":
            c = c * 2 - partial(lag.L, cx)
        elif variant != "exact":
            raise ValueError(f"unknown variant {variant!r}")
        out = out + vol * dG(cx) * c
    return out * _sgn(ch.m)


def varpi_form(L, chart: Chart | None = None) -> SuperExpr:
    """``(-1)^m eta ^ (theta^mu (dL/dy^mu - d/dx^i dL/dy^mu_i) + theta^mu_{-j} dL/dy^mu_{-j})``."""
    lag = _lag(L, chart)
    ch = lag.chart
    inner = SuperExpr.const(0, ch)
    for mu in ch.fiber_indices():
        om = partial(lag.L, Coord.jet(mu))
        for i in range(1, ch.m + 1):
            om = om - total_derivative(i, partial(lag.L, Coord.jet(mu, (i,))))
        inner = inner + contact_form(mu, (), (), ch) * om
        for j in range(1, ch.n + 1):
            inner = inner + contact_form(mu, (), (-j,), ch) * partial(lag.L, Coord.jet(mu, (), (-j,)))
    return eta(ch) * inner * _sgn(ch.m)


def d_pc_decomposition(L, chart: Chart | None = None) -> dict:
    """The four summands whose odd Lie chain gives ``d^G Theta``.

    Keys: ``varpi``, ``alpha``, ``D1``, ``dv`` (vertical part), plus ``total``
    = odd Lie chain of their sum.
    """
    lag = _lag(L, chart)
    ch = lag.chart
    vol = eta(ch)
    varpi = varpi_form(lag)
    alpha = alpha_form(lag)
    rest = pc_form_order1(lag) - vol * lag.L
    D1 = horizontal_op_odd(rest, ch)
    dv = vertical_op(rest, ch)
    total = odd_lie_chain(varpi + alpha + D1 + dv, ch)
    return {"varpi": varpi, "alpha": alpha, "D1": D1, "dv": dv, "total": total}


def grouped_el_form(L, chart: Chart | None = None, mu_list=None) -> SuperExpr:
    """Signed sum over splittings of ``T``: ``(-1)^{|s2| mu + tau} theta_{s1} . d^{s2} E(L)``.

    Without the ``(-1)^m eta ^`` prefactor.
    """
    lag = _lag(L, chart)
    ch = lag.chart
    T = tuple(-j for j in range(1, ch.n + 1))
    E = euler_lagrange(lag)
    out = SuperExpr.const(0, ch)
    for mu in (mu_list or ch.fiber_indices()):
        pm = 1 if mu < 0 else 0
        for r in range(0, ch.n + 1):
            for s1 in combinations(T, r):
                s2 = tuple(b for b in T if b not in s1)
                _, tau_sign = reorder_sign(s1 + s2)
                th = contact_form(mu, (), s1, ch)
                term = th * iterated_odd_derivative(s2, E[mu]) * tau_sign
                out = out + term * _sgn(len(s2) * pm)
    return out


# -- critical sections -----------------------------------------------------------

def is_critical(s: Section, L, chart: Chart | None = None):
    """``(True, None)`` if every pulled-back ``E(L)_mu`` vanishes, else ``(False, witness)``."""
    lag = _lag(L, chart)
    for mu, e in euler_lagrange(lag).items():
        v = pullback_by_jet(s, e)
        if not v.is_zero():
            return False, {"mu": mu, "value": v}
    return True, None


def critical_audit(s: Section, L, chart: Chart | None = None, dtheta: SuperExpr | None = None):
    """Critical-section test through ``(j s)^* iota_X d^G Theta = 0`` for vertical basis fields."""
    lag = _lag(L, chart)
    ch = lag.chart
    if dtheta is None:
        dtheta = d_graded(pc_form_berezinian(lag))
    ctx = JetContext(ch.m, ch.n, ch.r, ch.s, ch.n + 1)
    for c in ctx.jet_coords():
        w = insert(coordinate_field(c), dtheta)
        if w.is_zero():
            continue
        v = pullback_by_jet(s, w)
        if not v.is_zero():
            return False, {"field": c, "value": v}
    return True, None


# -- Noether ---------------------------------------------------------------------

@dataclass
class NoetherReport:
    is_supersymmetry: bool
    has_divergence: bool
    divergences_agree: bool
    is_noether: bool
    div_berezin: SuperExpr
    div_graded: SuperExpr | None
    defect: SuperExpr
    current: SuperExpr | None
    prolonged: VectorField


def noether_check(X: VectorField, L, chart: Chart | None = None) -> NoetherReport:
    """Supersymmetry, Noether conditions (1)-(2), and the supercurrent ``iota_{X_(n+1)} Theta``."""
    lag = _lag(L, chart)
    ch = lag.chart
    Xp = prolong(X, ch.n + 1, ch)
    base = projection(Xp)
    dB = div_berezin(base, ch)
    defect = dB * lag.L + Xp(lag.L)
    dGr = div_graded(base, ch)
    susy = defect.is_zero()
    has = dGr is not None
    agree = has and (dGr - dB).is_zero()
    current = insert(Xp, pc_form_berezinian(lag))
    return NoetherReport(susy, has, agree, susy and has and agree, dB, dGr, defect, current, Xp)


def pc_form_order_k(F: SuperExpr, k: int, chart: Chart) -> SuperExpr:
    """Order-``k`` form ``L_{J_k}(F) + eta . F`` of an arbitrary Lagrangian ``F``."""
    return apply_vector_form(jk_tensor(k, chart), F) + eta(chart) * F


def functoriality_defect(X: VectorField, L, chart: Chart | None = None,
                         reading: str = "density") -> SuperExpr:
    """``L_{X_(n+1)} Theta^L`` minus the transported form; zero when functoriality holds.

    ``reading`` selects the right-hand side:

    * ``"density"``: ``Theta`` of the graded density ``L_X(eta . F)``,
      ``F = d^n L/dx^T``, i.e. order ``n+1`` Lagrangian ``X(F) + div_G F``.
    * ``"berezinian"``: ``(-1)^{|X| n} Theta^{X(L) + div_B(X') L}``.
    * ``"first_order"``: ``Theta^{X(L) + div_G(X') L}`` read literally.
    """
    lag = _lag(L, chart)
    ch = lag.chart
    Xp = prolong(X, ch.n + 1, ch)
    base = projection(Xp)
    lhs = lie_derive(Xp, pc_form_berezinian(lag))
    if reading == "berezinian":
        out = lhs
        for part in Xp.homogeneous_parts():
            q = int(part.parity)
            Lp = part(lag.L) + div_berezin(projection(part), ch) * lag.L
            out = out - pc_form_berezinian(Lagrangian(Lp, ch)) * _sgn(q * ch.n)
        return out
    dGr = div_graded(base, ch)
    if dGr is None:
        raise ValueError("field has no graded divergence")
    if reading == "density":
        F = _top(lag)
        return lhs - pc_form_order_k(Xp(F) + dGr * F, ch.n + 1, ch)
    if reading == "first_order":
        Lp = Xp(lag.L) + dGr * lag.L
        return lhs - pc_form_berezinian(Lagrangian(Lp, ch))
    raise ValueError(f"unknown reading {reading!r}")


# -- multi-index lemmas ----------------------------------------------------------
# Each returns ``(lhs, rhs)``; the identity holds when they agree.

def _mixed_partial(f: SuperExpr, mu: int, Q) -> SuperExpr:
    """``d f / d y^mu_Q`` for a mixed ordered index ``Q`` (positives commute)."""
    I = tuple(q for q in Q if q > 0)
    A = tuple(q for q in Q if q < 0)
    s, c = jet_coord(mu, I, A)
    if s == 0:
        return SuperExpr.const(0, f.chart)
    return partial(f, c) * s


def _fpar(mu: int) -> int:
    return 1 if mu < 0 else 0


def _jet_parity(mu: int, Q) -> int:
    return (_fpar(mu) + sum(1 for q in Q if q < 0)) % 2


def _commutator(mu: int, Q, B, f: SuperExpr) -> SuperExpr:
    """Graded commutator ``[d/dy^mu_Q, d^{|B|}/dx^B] f``."""
    a = _mixed_partial(iterated_odd_derivative(B, f), mu, Q)
    b = iterated_odd_derivative(B, _mixed_partial(f, mu, Q))
    return a - b * _sgn(_jet_parity(mu, Q) * len(B))


def lemma_vertical(mu: int, B, f: SuperExpr):
    """``[d/dy^mu, d^{|B|}/dx^B] = 0``."""
    return _commutator(mu, (), B, f), SuperExpr.const(0, f.chart)


def lemma_shift(mu: int, i0: int, Q, j: int, f: SuperExpr):
    """``[d/dy^mu_{{i0}*Q}, d/dx^{-j}] = delta_{i0}^{-j} d/dy^mu_Q``.

    Meaningful for ``-j`` not in ``Q``: otherwise ``{i0}*Q`` already carries
    ``-j`` and the commutator has an extra term.
    """
    if -j in tuple(Q):
        raise ValueError("identity requires -j not in Q")
    lhs = _commutator(mu, (i0,) + tuple(Q), (-j,), f)
    rhs = _mixed_partial(f, mu, Q) if i0 == -j else SuperExpr.const(0, f.chart)
    return lhs, rhs


def lemma_first(mu: int, alpha: int, B, f: SuperExpr):
    """``[d/dy^mu_alpha, d^B] = sum_b (-1)^{mu(|B|+1) + alpha p(b)} delta_b^alpha d^{B-b} d/dy^mu``.

    ``mu`` and ``alpha`` enter the sign through their parities.
    """
    from .jetcoords import p_index
    B = tuple(B)
    lhs = _commutator(mu, (alpha,), B, f)
    rhs = SuperExpr.const(0, f.chart)
    if alpha in B:
        e = _fpar(mu) * (len(B) + 1) + (1 if alpha < 0 else 0) * p_index(alpha, B)
        rest = tuple(b for b in B if b != alpha)
        rhs = iterated_odd_derivative(rest, _mixed_partial(f, mu, ())) * _sgn(e)
    return lhs, rhs


def proposition_sides(mu: int, i: int, Q, B, L: SuperExpr, phi_fn=None):
    """``d/dy^mu_{{i}*Q} d^B L = eps . d^{B - Q} dL/dy^mu_i`` for ``Q`` a subsequence of ``B``.

    Indices of ``Q`` not in ``B`` give a zero right-hand side; a ``Q`` taken
    out of ``B``'s order is first brought into order, with the reordering sign.
    ``phi_fn`` replaces the sign function (for testing alternative readings).
    """
    from .jetcoords import phi
    phi_fn = phi_fn or phi
    Q, B = tuple(Q), tuple(B)
    lhs = _mixed_partial(iterated_odd_derivative(B, L), mu, (i,) + Q)
    zero = SuperExpr.const(0, L.chart)
    pos = [B.index(q) if q in B else None for q in Q]
    if None in pos or len(set(pos)) != len(pos):
        return lhs, zero
    inv = sum(1 for a in range(len(pos)) for b in range(a + 1, len(pos)) if pos[a] > pos[b])
    Q = tuple(B[k] for k in sorted(pos))
    e = _fpar(mu) * (len(B) + len(Q)) + phi_fn(Q, B) + inv
    rest = tuple(b for b in B if b not in Q)
    return lhs, iterated_odd_derivative(rest, _mixed_partial(L, mu, (i,))) * _sgn(e)


def reduction_sides(L, chart: Chart | None = None) -> list:
    """The two ``(m|2)`` reduction identities, for every ``mu`` and ``i``.

    ``d/dy^mu_{-1,i} d^2L/dx^{-1}dx^{-2} = (-1)^mu d/dx^{-2} dL/dy^mu_i`` and
    ``d/dy^mu_{-2,i} d^2L/dx^{-1}dx^{-2} = -(-1)^mu d/dx^{-1} dL/dy^mu_i``.
    """
    lag = _lag(L, chart)
    ch = lag.chart
    F = iterated_odd_derivative((-1, -2), lag.L)
    out = []
    for mu in ch.fiber_indices():
        pm = _fpar(mu)
        for i in range(1, ch.m + 1):
            dLi = _mixed_partial(lag.L, mu, (i,))
            out.append((_mixed_partial(F, mu, (i, -1)), total_derivative(-2, dLi) * _sgn(pm)))
            out.append((_mixed_partial(F, mu, (i, -2)), -total_derivative(-1, dLi) * _sgn(pm)))
    return out
