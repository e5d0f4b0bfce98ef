from fractions import Fraction
from math import comb

import pytest

from supercartan.superalg import Chart, Coord, Parity, SuperExpr, VectorField, coordinate_field, partial
from supercartan.berezin import (
    BerezinSection,
    apply_top_operator,
    berezin_integral_body,
    box_integral,
    div_berezin,
    div_graded,
    generator_parity,
    lie_berezin,
    projection,
)
from supercartan.jetcoords import jy

from genutil import Rand, base_coords


def _top(body, n):
    """Coefficient of x^-1 ... x^-n read straight off the normal form."""
    key = tuple(Coord.base(-j) for j in range(1, n + 1))
    return body.grassmann_terms().get(key, SuperExpr.const(0, body.chart))


# -- Berezin integral -------------------------------------------------------

def test_top_monomial_n2():
    ch = Chart(1, 2)
    sec = BerezinSection(ch.x(-1) * ch.x(-2), ch)
    assert berezin_integral_body(sec) == -1


def test_no_top_component():
    ch = Chart(2, 2)
    sec = BerezinSection(ch.x(1) * ch.x(-1) + ch.x(2), ch)
    assert berezin_integral_body(sec).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_integral_sign(n):
    ch = Chart(2, n)
    rnd = Rand(n)
    gens = base_coords(ch)
    for _ in range(25):
        body = rnd.poly(ch, gens, rnd.rng.randint(0, 1), deg=n + 2, terms=6)
        # make sure the top component is present
        top = SuperExpr.const(1, ch)
        for j in range(1, n + 1):
            top = top * ch.x(-j)
        body = body + top * rnd.poly(ch, [ch.x(1), ch.x(2)], 0)
        got = berezin_integral_body(BerezinSection(body, ch))
        assert got == _top(body, n) * (-1) ** comb(n, 2)


def test_integral_needs_pullback():
    ch = Chart(1, 1, 1, 0)
    with pytest.raises(ValueError):
        berezin_integral_body(BerezinSection(jy(1, (), (), ch), ch))


def test_box_integral_exact():
    ch = Chart(2, 1)
    coeff = ch.x(1) ** 2 * ch.x(2) * 3 + Fraction(1, 2)
    # int_0^1 int_1^3 3 x^2 y + 1/2 dy dx = 3 * (1/3) * 4 + 1/2 * 2
    assert box_integral(coeff, [(0, 1), (1, 3)], ch) == Fraction(5)
    with pytest.raises(ValueError):
        box_integral(coeff, [(0, 1)], ch)
    with pytest.raises(ValueError):
        box_integral(ch.x(-1), [(0, 1), (0, 1)], ch)


def test_box_integral_of_berezin_body():
    ch = Chart(1, 2)
    t, s1, s2 = ch.x(1), ch.x(-1), ch.x(-2)
    body = 3 * t ** 2 * s1 * s2 + t + s1
    c = berezin_integral_body(BerezinSection(body, ch))
    assert c == -3 * t ** 2
    assert box_integral(c, [(0, 2)], ch) == -8


# -- Lie derivative ---------------------------------------------------------

CHARTS = [Chart(1, 1), Chart(1, 2), Chart(2, 1), Chart(2, 2), Chart(1, 3)]


def _xi(ch):
    return BerezinSection(SuperExpr.const(1, ch), ch)


def _sign(e):
    return -1 if e % 2 else 1


@pytest.mark.parametrize("ch", CHARTS)
def test_coordinate_fields_annihilate_generator(ch):
    for a in ch.base_indices():
        assert lie_berezin(coordinate_field(Coord.base(a), ch), _xi(ch)).body.is_zero()


@pytest.mark.parametrize("ch", CHARTS)
def test_defining_relation(ch):
    rnd = Rand(20 + ch.m * 10 + ch.n)
    xi = generator_parity(ch)
    for _ in range(20):
        X = rnd.projectable_field(ch, with_fiber=False)
        qx = int(X.parity)
        lhs = lie_berezin(X, _xi(ch)).body
        assert lhs == div_berezin(X, ch) * _sign(qx * xi)


@pytest.mark.parametrize("ch", CHARTS)
def test_right_leibniz(ch):
    rnd = Rand(40 + ch.m * 10 + ch.n)
    xi = generator_parity(ch)
    gens = base_coords(ch)
    for _ in range(20):
        X = rnd.projectable_field(ch, with_fiber=False)
        a = rnd.poly(ch, gens, rnd.rng.randint(0, 1))
        qx = int(X.parity)
        lhs = lie_berezin(X, _xi(ch).times(a)).body
        rhs = lie_berezin(X, _xi(ch)).body * a + X(a) * _sign(qx * xi)
        assert lhs == rhs


@pytest.mark.parametrize("ch", CHARTS)
def test_scaled_field(ch):
    rnd = Rand(60 + ch.m * 10 + ch.n)
    xi = generator_parity(ch)
    gens = base_coords(ch)
    for _ in range(20):
        X = rnd.projectable_field(ch, with_fiber=False)
        pa = rnd.rng.randint(0, 1)
        a = rnd.poly(ch, gens, pa)
        qx = int(X.parity)
        aX = VectorField({c: a * v for c, v in X.components.items()}, (pa + qx) % 2, ch)
        lhs = lie_berezin(aX, _xi(ch)).body
        rhs = lie_berezin(X, _xi(ch).times(a)).body * _sign(pa * (qx + xi))
        assert lhs == rhs


def _div_from_components(X, ch):
    """Berezinian divergence written out from its defining sum."""
    out = SuperExpr.const(0, ch)
    for i in range(1, ch.m + 1):
        f = X.component(Coord.base(i))
        if f is not None:
            out = out + partial(f, Coord.base(i))
    for j in range(1, ch.n + 1):
        g = X.component(Coord.base(-j))
        if g is None:
            continue
        for p, part in enumerate(g.homogeneous_parts()):
            out = out + partial(part, Coord.base(-j)) * _sign(p)
    return out


@pytest.mark.parametrize("ch", CHARTS)
def test_divergence_formula(ch):
    rnd = Rand(80 + ch.m * 10 + ch.n)
    for _ in range(20):
        X = rnd.projectable_field(ch, with_fiber=False)
        assert div_berezin(X, ch) == _div_from_components(X, ch)


def test_divergence_examples():
    ch = Chart(1, 1)
    assert div_berezin(coordinate_field(Coord.base(1), ch), ch).is_zero()
    assert div_berezin(VectorField({Coord.base(1): ch.x(1)}, 0, ch), ch) == 1
    assert div_berezin(VectorField({Coord.base(-1): ch.x(-1)}, 0, ch), ch) == -1


@pytest.mark.parametrize("ch", [Chart(1, 1), Chart(2, 1), Chart(1, 2), Chart(2, 2)])
def test_stokes_on_box(ch):
    # base components vanish on the boundary of [0,1]^m, so the integral is zero
    rnd = Rand(90 + ch.m * 10 + ch.n)
    gens = base_coords(ch)
    for _ in range(15):
        X = rnd.projectable_field(ch, with_fiber=False)
        comps = {}
        for c, v in X.components.items():
            if c.index > 0:
                x = ch.x(c.index)
                v = v * x * (x - 1)
            comps[c] = v
        X = VectorField(comps, X._declared, ch)
        f = rnd.poly(ch, gens, rnd.rng.randint(0, 1), deg=2)
        body = lie_berezin(X, _xi(ch).times(f)).body
        coeff = berezin_integral_body(BerezinSection(body, ch))
        assert box_integral(coeff, [(0, 1)] * ch.m, ch) == 0


def test_lie_berezin_jet_body_right_leibniz():
    ch = Chart(1, 1, 1, 1)
    rnd = Rand(99)
    xi = generator_parity(ch)
    for _ in range(20):
        X = rnd.projectable_field(ch)
        L = rnd.lagrangian(ch)
        qx = int(X.parity)
        got = lie_berezin(X, _xi(ch).times(L)).body
        want = lie_berezin(projection(X), _xi(ch)).body * L + X(L) * _sign(qx * xi)
        assert got == want


def test_lie_berezin_rejects_non_projectable():
    ch = Chart(1, 1, 1, 0)
    X = VectorField({Coord.base(1): jy(1, (), (), ch)}, 0, ch)
    with pytest.raises(ValueError):
        lie_berezin(X, _xi(ch))


def test_generator_parity():
    assert BerezinSection(SuperExpr.const(1, Chart(2, 3)), Chart(2, 3)).parity == Parity.ODD
    assert BerezinSection(Chart(2, 3).x(-1), Chart(2, 3)).parity == Parity.EVEN


# -- graded divergence ------------------------------------------------------

def test_graded_divergence_examples():
    ch = Chart(1, 1)
    t = ch.x(1)
    f = t ** 3 - 2 * t
    assert div_graded(VectorField({Coord.base(1): f}, 0, ch), ch) == partial(f, Coord.base(1))
    assert div_graded(VectorField({Coord.base(1): ch.x(-1)}, 1, ch), ch) is None
    assert div_graded(coordinate_field(Coord.base(-1), ch), ch) == 0


@pytest.mark.parametrize("seed", range(5))
def test_divergences_agree_on_supermechanics_family(seed):
    ch = Chart(1, 1, 1, 1)
    t = ch.x(1)
    rnd = Rand(seed)
    f = rnd.poly(ch, [t], 0, deg=3)
    g = rnd.poly(ch, [t], 0, deg=3)
    X = VectorField({Coord.base(1): f, Coord.base(-1): g}, None, ch)
    df = partial(f, Coord.base(1))
    assert div_graded(X, ch) == df
    assert div_berezin(X, ch) == df


def test_graded_divergence_sees_odd_dependence():
    ch = Chart(1, 1)
    t, s = ch.x(1), ch.x(-1)
    X = VectorField({Coord.base(1): t * t, Coord.base(-1): s * t}, 0, ch)
    assert div_graded(X, ch) == 2 * t
    # the odd component contributes to the Berezinian divergence only
    assert div_berezin(X, ch) == 2 * t - t


def test_top_operator_sign():
    for n in range(1, 5):
        ch = Chart(0, n)
        top = SuperExpr.const(1, ch)
        for j in range(1, n + 1):
            top = top * ch.x(-j)
        assert apply_top_operator(top, n) == (-1) ** comb(n, 2)
