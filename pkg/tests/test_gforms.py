import itertools

import pytest

from supercartan.superalg import Chart, Coord, SuperExpr, VectorField, coordinate_field, parity_of, partial
from supercartan.gforms import (
    d_graded,
    dG,
    eta,
    evaluate_form,
    form_degree,
    horizontal_op,
    horizontal_op_even,
    horizontal_op_odd,
    insert,
    lie_derive,
    render_form,
    render_latex,
    split_horizontal_vertical,
    vertical_op,
    vertical_op_lemma,
    wedge,
    wedge_words,
)
from supercartan.jetcoords import TotalDerivative, contact_form, jy, reorder_sign
from supercartan.varcalc import odd_lie_chain

from genutil import Rand, order1_coords, total_space_coords

CH = Chart(2, 2, 1, 1)
dx1, dx2, dxm1, dxm2 = (dG(Coord.base(a)) for a in (1, 2, -1, -2))


def _fields(ch, rnd, n=3):
    out = [coordinate_field(c.generators().pop(), ch) for c in order1_coords(ch)]
    for _ in range(n):
        out.append(rnd.projectable_field(ch))
    return out


# -- wedge ------------------------------------------------------------------

def test_wedge_signs():
    assert wedge(dx1, dx2) == -wedge(dx2, dx1)
    assert not wedge(dxm1, dxm1).is_zero()
    # Kostant sign (-1)^{p1 p2 + q1 q2}: (1,1) with (1,1) gives +1, (1,0) with (1,1) gives -1
    assert wedge(dxm1, dxm2) == wedge(dxm2, dxm1)
    assert wedge(dx1, dxm1) == -wedge(dxm1, dx1)
    assert wedge(dx1, dx1).is_zero()


def test_volume_absorbs_even_differentials():
    vol = eta(CH)
    for i in (1, 2):
        assert wedge(vol, dG(Coord.base(i))).is_zero()
    assert form_degree(vol) == 2


def test_coefficients_commute_with_sign():
    z = jy(-1, (), (), CH)
    # an odd coordinate passing an odd-parity differential picks up -1
    assert z * dxm1 == -(dxm1 * z)
    assert z * dx1 == dx1 * z


# -- exterior differential --------------------------------------------------

def test_d_of_function_expansion():
    rnd = Rand(1)
    for _ in range(30):
        f = rnd.lagrangian(CH)
        want = SuperExpr.const(0, CH)
        for c in f.coordinates():
            want = want + dG(c) * partial(f, c)
        assert d_graded(f) == want


def test_d_squared_zero():
    rnd = Rand(2)
    gens = order1_coords(CH)
    for _ in range(200):
        f = rnd.poly(CH, gens, rnd.rng.randint(0, 1))
        assert d_graded(d_graded(f)).is_zero()
    for _ in range(50):
        w = rnd.form(CH, gens)
        assert d_graded(d_graded(w)).is_zero()


def test_d_of_contact_form():
    for mu in CH.fiber_indices():
        for I, A in [((), ()), ((1,), ()), ((), (-1,)), ((), (-2,))]:
            th = contact_form(mu, I, A, CH)
            want = SuperExpr.const(0, CH)
            for a in CH.base_indices():
                if a > 0:
                    nxt = jy(mu, tuple(sorted(I + (a,))), A, CH)
                else:
                    nxt = jy(mu, I, (a,) + A, CH)
                if nxt.is_zero():
                    continue
                (g,) = nxt.generators()
                sign = next(iter(nxt.terms.values()))
                want = want + dG(Coord.base(a)) * dG(g) * sign
            assert d_graded(th) == want


# -- insertion --------------------------------------------------------------

def test_insert_into_volume():
    ch = Chart(3, 1, 1, 0)
    vol = eta(ch)
    for j in (1, 2, 3):
        rest = wedge(*[dG(Coord.base(i)) for i in (1, 2, 3) if i != j])
        assert insert(coordinate_field(Coord.base(j), ch), vol) == rest * (-1) ** (j - 1)
    assert insert(coordinate_field(Coord.jet(1), ch), vol).is_zero()


def test_insert_into_contact_forms():
    for mu in CH.fiber_indices():
        th = contact_form(mu, (), (), CH)
        for nu in CH.fiber_indices():
            assert insert(coordinate_field(Coord.jet(nu), CH), th) == (1 if mu == nu else 0)
            for a in CH.base_indices():
                c = Coord.jet(nu, (a,) if a > 0 else (), (a,) if a < 0 else ())
                assert insert(coordinate_field(c, CH), th).is_zero()


def test_insertions_graded_anticommute():
    rnd = Rand(3)
    gens = order1_coords(CH)
    F = _fields(CH, rnd)
    for _ in range(20):
        w = rnd.form(CH, gens, degree=2)
        for X, Y in itertools.combinations(F[-4:], 2):
            qx, qy = int(X.parity), int(Y.parity)
            assert insert(X, insert(Y, w)) == insert(Y, insert(X, w)) * (-(-1) ** (qx * qy))


def test_evaluate_form_order():
    w = wedge(dx1, dx2)
    X1, X2 = coordinate_field(Coord.base(1), CH), coordinate_field(Coord.base(2), CH)
    assert evaluate_form(w, [X1, X2]) == insert(X1, insert(X2, w))
    assert evaluate_form(w, [X1, X2]) == -1


# -- Lie derivative ---------------------------------------------------------

def _bracket(X, Y, ch):
    qx, qy = int(X.parity), int(Y.parity)
    comps = {}
    for c in set(X.components) | set(Y.components):
        yc = Y.component(c) or SuperExpr.const(0, ch)
        xc = X.component(c) or SuperExpr.const(0, ch)
        comps[c] = X(yc) - Y(xc) * (-1) ** (qx * qy)
    return VectorField(comps, (qx + qy) % 2, ch)


@pytest.mark.parametrize("ch", [Chart(1, 1, 1, 1), Chart(1, 2, 1, 1), Chart(2, 1, 1, 1)])
def test_cartan_formula(ch):
    rnd = Rand(4)
    gens = order1_coords(ch)
    for _ in range(100):
        X = rnd.projectable_field(ch)
        w = rnd.form(ch, gens)
        assert lie_derive(X, w) == insert(X, d_graded(w)) + d_graded(insert(X, w))
        assert lie_derive(X, d_graded(w)) == d_graded(lie_derive(X, w))


def test_lie_of_differential():
    rnd = Rand(5)
    for _ in range(100):
        X = rnd.projectable_field(CH)
        f = rnd.lagrangian(CH)
        assert lie_derive(X, d_graded(f)) == d_graded(X(f))


def test_lie_insert_commutator():
    ch = Chart(1, 1, 1, 1)
    rnd = Rand(6)
    gens = total_space_coords(ch)
    for _ in range(30):
        X, Y = rnd.projectable_field(ch), rnd.projectable_field(ch)
        w = rnd.form(ch, gens, degree=2)
        qx, qy = int(X.parity), int(Y.parity)
        lhs = lie_derive(X, insert(Y, w)) - insert(Y, lie_derive(X, w)) * (-1) ** (qx * qy)
        assert lhs == insert(_bracket(X, Y, ch), w)


def test_lie_of_contact_forms():
    th = {mu: contact_form(mu, (), (), CH) for mu in CH.fiber_indices()}
    for mu in CH.fiber_indices():
        for nu in CH.fiber_indices():
            assert lie_derive(coordinate_field(Coord.jet(mu), CH), th[nu]).is_zero()
            for a in CH.base_indices():
                c = Coord.jet(mu, (a,) if a > 0 else (), (a,) if a < 0 else ())
                got = lie_derive(coordinate_field(c, CH), th[nu])
                pa, pm = int(a < 0), int(mu < 0)
                want = -dG(Coord.base(a)) * (-1) ** (pa * (pm + pa)) if mu == nu else 0
                assert got == want


def test_odd_lie_derivative_raises_contact_order():
    # first step of the (m|2) expansion
    for mu in CH.fiber_indices():
        th = contact_form(mu, (), (), CH)
        assert lie_derive(TotalDerivative(-2, CH), th) == contact_form(mu, (), (-2,), CH)
        assert lie_derive(TotalDerivative(1, CH), th) == contact_form(mu, (1,), (), CH)


# -- horizontal / vertical --------------------------------------------------

CHARTS = [Chart(1, 1, 1, 1), Chart(1, 2, 1, 1), Chart(2, 2, 1, 1)]


@pytest.mark.parametrize("ch", CHARTS)
def test_split_identities(ch):
    rnd = Rand(7)
    gens = order1_coords(ch)
    for _ in range(40):
        w = rnd.form(ch, gens)
        dec = split_horizontal_vertical(w, ch)
        D, dv = dec["D"], dec["dv"]
        assert D == horizontal_op(w, ch) == dec["D0"] + dec["D1"]
        assert dv == vertical_op(w, ch)
        assert horizontal_op(D, ch).is_zero()
        assert vertical_op(dv, ch).is_zero()
        assert (horizontal_op(dv, ch) + vertical_op(D, ch)).is_zero()


@pytest.mark.parametrize("ch", CHARTS)
def test_vertical_closed_formula(ch):
    rnd = Rand(8)
    gens = order1_coords(ch)
    for _ in range(100 // len(CHARTS) + 1):
        w = rnd.form(ch, gens)
        assert vertical_op(w, ch) == vertical_op_lemma(w, ch)


@pytest.mark.parametrize("ch", [Chart(1, 1, 1, 1), Chart(1, 2, 1, 1), Chart(1, 3, 1, 0)])
def test_odd_chain_kills_odd_horizontal_part(ch):
    rnd = Rand(9)
    gens = order1_coords(ch)
    for _ in range(10):
        w = rnd.form(ch, gens)
        assert odd_lie_chain(horizontal_op_odd(w, ch), ch).is_zero()


def _shuffles(T, A, B, ch):
    """Signed sum over splits of the odd Lie chain between the two factors."""
    out = SuperExpr.const(0, ch)
    qa = int(parity_of(A))
    for r in range(len(T) + 1):
        for s1 in itertools.combinations(T, r):
            s2 = tuple(b for b in T if b not in s1)
            _, tau = reorder_sign(s1 + s2)
            left = odd_lie_chain(A, ch, s1)
            right = odd_lie_chain(B, ch, s2)
            out = out + left * right * tau * (-1) ** (len(s2) * qa)
    return out


@pytest.mark.parametrize("n", [2, 3])
def test_odd_chain_product_expansion(n):
    ch = Chart(1, n, 1, 1)
    T = tuple(-j for j in range(1, n + 1))
    rnd = Rand(10 + n)
    gens = order1_coords(ch)
    for _ in range(6):
        A = rnd.form(ch, gens, degree=rnd.rng.randint(0, 1), deg=1)
        B = rnd.form(ch, gens, degree=rnd.rng.randint(0, 1), deg=1)
        assert odd_lie_chain(A * B, ch) == _shuffles(T, A, B, ch)


def test_horizontal_split_of_function():
    rnd = Rand(12)
    f = rnd.lagrangian(CH)
    want = sum((dG(Coord.base(a)) * TotalDerivative(a, CH)(f) for a in CH.base_indices()),
               SuperExpr.const(0, CH))
    assert horizontal_op(f, CH) == want
    assert horizontal_op_even(f, CH) + horizontal_op_odd(f, CH) == want


# -- rendering --------------------------------------------------------------

def test_render_text():
    y = jy(1, (), (), CH)
    assert render_form(dx1 * dx2 * y * 3) == "dx1^dx2*(3*y1)"
    assert render_form(SuperExpr.const(0, CH)) == "0"
    assert render_form(dxm1 * dxm1) == "dx-1^dx-1"


def test_render_latex():
    y = jy(1, (), (), CH)
    w = eta(CH) * y / 2 + dx1 * dxm1
    assert render_latex(w, eta_glyph=True) == \
        "\\eta^G \\cdot \\left(\\frac{1}{2} y^{1}\\right) + d^G x^{1} \\wedge d^G x^{-1}"
    assert render_latex(w).startswith("d^G x^{1} \\wedge d^G x^{2} \\cdot")


def test_wedge_words_group_right_coefficients():
    y = jy(1, (), (), CH)
    ww = wedge_words(dx1 * y + dx1 * 2)
    assert ww == {((Coord.base(1).d, 1),): y + 2}
