from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from supercartan.superalg import (
    INHOMOGENEOUS,
    Chart,
    Coord,
    ContextError,
    Parity,
    SuperExpr,
    mul,
    parity_of,
    partial,
)
from supercartan.evalor import GrassmannNumber, evaluate, theta

from genutil import exprs, homogeneous_exprs, order1_coords

CH = Chart(2, 3, 1, 1)
x1, x2 = CH.x(1), CH.x(2)
xm1, xm2, xm3 = CH.x(-1), CH.x(-2), CH.x(-3)
GENS = order1_coords(CH)
ODD = [Coord.base(-1), Coord.base(-2), Coord.base(-3), Coord.jet(-1), Coord.jet(1, (), (-1,))]


# -- examples ---------------------------------------------------------------

def test_odd_generators_anticommute():
    assert xm1 * xm2 == SuperExpr.monomial([Coord.base(-1), Coord.base(-2)], chart=CH)
    assert xm2 * xm1 == -(xm1 * xm2)
    assert (xm1 * xm1).is_zero()


def test_mul_expands_and_renormalizes():
    # frozen from expanding by hand
    got = mul(1 + x1 * xm1 * xm2, x1)
    want = x1 + x1 ** 2 * xm1 * xm2
    assert got == want
    assert got.render() == "x1 + x1^2*x-1*x-2"


def test_parity_examples():
    assert parity_of(x1) == Parity.EVEN
    assert parity_of(xm1 * xm2) == Parity.EVEN
    assert parity_of(xm1) == Parity.ODD
    assert parity_of(x1 + xm1) == INHOMOGENEOUS
    assert parity_of(SuperExpr.const(0, CH)) == Parity.EVEN


def test_partial_examples():
    assert partial(xm1 * xm2, Coord.base(-1)) == xm2
    # left derivative: x^-2 has to move past x^-1 first
    assert partial(xm1 * xm2, Coord.base(-2)) == -xm1
    assert partial(x1 ** 2 * xm1, Coord.base(1)) == 2 * x1 * xm1
    assert partial(x1, Coord.base(2)).is_zero()


def test_partial_unknown_coordinate():
    with pytest.raises(ContextError):
        partial(x1, Coord.base(-4))
    with pytest.raises(ContextError):
        CH.x(3)


def test_mismatched_charts():
    with pytest.raises(ContextError):
        Chart(1, 1).x(1) * Chart(1, 2).x(1)


def test_exact_rationals():
    e = x1 / 3 + Fraction(1, 6) * x1
    assert e == x1 * Fraction(1, 2)
    assert e.terms[((Coord.base(1), 1),)] == Fraction(1, 2)


# -- brute-force sign oracle -----------------------------------------------

ORACLE = {c: theta(k) for k, c in enumerate(ODD)}


ORACLE_GENS = [SuperExpr.gen(c, CH) for c in ODD] + [x1, x2]


@settings(max_examples=200, deadline=None)
@given(exprs(CH, ORACLE_GENS), exprs(CH, ORACLE_GENS))
def test_mul_matches_subset_sign_oracle(a, b):
    x = {c: GrassmannNumber.scalar(k + 2) for k, c in enumerate([Coord.base(1), Coord.base(2)])}
    x.update(ORACLE)
    assert evaluate(a * b, x) == evaluate(a, x) * evaluate(b, x)


def test_left_partial_matches_oracle():
    # the oracle's left derivative on a full Grassmann monomial
    w = xm1 * xm2 * xm3
    a = {Coord.base(-1): theta(0), Coord.base(-2): theta(1), Coord.base(-3): theta(2)}
    for k, c in enumerate([Coord.base(-1), Coord.base(-2), Coord.base(-3)]):
        assert evaluate(partial(w, c), a) == evaluate(w, a).left_derivative(k)


# -- properties ------------------------------------------------------------

@settings(max_examples=500, deadline=None)
@given(homogeneous_exprs(CH, GENS), homogeneous_exprs(CH, GENS), st.sampled_from(GENS))
def test_graded_leibniz(a, b, cexpr):
    (c,) = cexpr.generators()
    pa = int(parity_of(a))
    lhs = partial(a * b, c)
    rhs = partial(a, c) * b + a * partial(b, c) * (-1) ** (c.q * pa)
    assert lhs == rhs


@settings(max_examples=200, deadline=None)
@given(homogeneous_exprs(CH, GENS), homogeneous_exprs(CH, GENS))
def test_graded_commutativity(a, b):
    s = (-1) ** (int(parity_of(a)) * int(parity_of(b)))
    assert a * b == b * a * s


@settings(max_examples=200, deadline=None)
@given(exprs(CH, GENS), exprs(CH, GENS), exprs(CH, GENS))
def test_associative_distributive(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


ALL = [g.generators().pop() for g in GENS]


@settings(max_examples=200, deadline=None)
@given(exprs(CH, GENS), st.sampled_from(ALL), st.sampled_from(ALL))
def test_partials_graded_commute(a, c1, c2):
    lhs = partial(partial(a, c2), c1)
    rhs = partial(partial(a, c1), c2)
    if c1.q and c2.q:
        assert lhs == -rhs
        if c1 is c2:
            assert lhs.is_zero()
    else:
        assert lhs == rhs


@settings(max_examples=200, deadline=None)
@given(exprs(CH, GENS))
def test_normal_form_idempotent(a):
    again = SuperExpr(a.terms, a.chart)
    assert again == a
    assert hash(again) == hash(a)
    assert (a + 0) == a and a * 1 == a


@settings(max_examples=200, deadline=None)
@given(exprs(CH, GENS))
def test_homogeneous_split_unique(a):
    ev, od = a.homogeneous_parts()
    assert ev + od == a
    assert parity_of(ev) == Parity.EVEN
    assert od.is_zero() or parity_of(od) == Parity.ODD
