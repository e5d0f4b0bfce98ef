"""Exact bigraded-commutative algebra of superfunctions and graded forms.

Every generator carries a bidegree ``(p, q)``: ``p`` is the form degree
(0 for coordinates, 1 for coordinate differentials) and ``q`` is the
coordinate parity.  Two homogeneous elements commute up to the sign
``(-1)**(p1*p2 + q1*q2)``.  Restricted to ``p == 0`` this is the usual
supercommutative algebra of a splitting chart, so superfunctions and graded
forms share one kernel.

Monomials are stored in a fixed global order.  Differentials sort before
coordinates, so a stored monomial always reads ``(wedge word) * coefficient``
with the coefficient on the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Callable, Iterable, Mapping

__all__ = [
    "Parity",
    "INHOMOGENEOUS",
    "ContextError",
    "Chart",
    "Gen",
    "Coord",
    "Differential",
    "SuperExpr",
    "VectorField",
    "mul",
    "parity_of",
    "partial",
    "apply_derivation",
    "substitute",
    "const",
    "default_name",
]


class Parity(IntEnum):
    EVEN = 0
    ODD = 1

    def __add__(self, other):  # Z2 sum
        return Parity((int(self) + int(other)) % 2)


INHOMOGENEOUS = "inhomogeneous"


class ContextError(ValueError):
    """Raised when objects from different charts are combined."""


@dataclass(frozen=True)
class Chart:
    """Dimensions of a fibred chart: base (m|n), fibre (r|s)."""

    m: int
    n: int
    r: int = 0
    s: int = 0

    def base_indices(self) -> list[int]:
        return list(range(1, self.m + 1)) + [-j for j in range(1, self.n + 1)]

    def fiber_indices(self) -> list[int]:
        return list(range(1, self.r + 1)) + [-j for j in range(1, self.s + 1)]

    def has_base(self, alpha: int) -> bool:
        return (1 <= alpha <= self.m) or (1 <= -alpha <= self.n)

    def has_fiber(self, mu: int) -> bool:
        return (1 <= mu <= self.r) or (1 <= -mu <= self.s)

    def x(self, alpha: int) -> "SuperExpr":
        if not self.has_base(alpha):
            raise ContextError(f"no base coordinate x^{alpha} in {self}")
        return SuperExpr.gen(Coord.base(alpha), self)

    def y(self, mu: int, I: Iterable[int] = (), A: Iterable[int] = ()) -> "SuperExpr":
        if not self.has_fiber(mu):
            raise ContextError(f"no fibre coordinate y^{mu} in {self}")
        I = tuple(sorted(I))
        A = tuple(A)
        if any(not 1 <= i <= self.m for i in I) or any(not 1 <= -a <= self.n for a in A):
            raise ContextError(f"multi-index out of range for {self}")
        return SuperExpr.gen(Coord.jet(mu, I, A), self)

    def check(self, c: "Gen") -> None:
        if isinstance(c, Differential):
            c = c.coord
        ok = self.has_base(c.index) if c.kind == "x" else (
            self.has_fiber(c.index)
            and all(1 <= i <= self.m for i in c.I)
            and all(1 <= -a <= self.n for a in c.A)
        )
        if not ok:
            raise ContextError(f"coordinate {c!r} not in chart {self}")


# --------------------------------------------------------------------------
# generators


class Gen:
    """A generator of the bigraded algebra.  Instances are interned."""

    __slots__ = ("p", "q", "key", "__weakref__")

    @property
    def parity(self) -> Parity:
        return Parity(self.q)

    @property
    def nilpotent(self) -> bool:
        return (self.p + self.q) % 2 == 1


class Coord(Gen):
    """Coordinate function: base ``x^alpha`` or jet ``y^mu_{I,A}``.

    Base indices: ``alpha > 0`` even, ``alpha < 0`` odd.  Fibre indices
    follow the same rule.  ``I`` is a sorted tuple of positive base indices
    (with multiplicity) and ``A`` a strictly decreasing tuple of negative
    ones, e.g. ``(-1, -3)``.
    """

    __slots__ = ("kind", "index", "I", "A", "_d")
    _pool: dict = {}

    def __new__(cls, kind, index, I=(), A=()):
        k = (kind, index, I, A)
        obj = cls._pool.get(k)
        if obj is not None:
            return obj
        obj = object.__new__(cls)
        obj.kind, obj.index, obj.I, obj.A = kind, index, I, A
        obj.p = 0
        if kind == "x":
            obj.q = 1 if index < 0 else 0
            obj.key = (1, 0, obj.q, abs(index))
        else:
            obj.q = ((1 if index < 0 else 0) + len(A)) % 2
            obj.key = (1, 1, index, I, tuple(-a for a in A))
        obj._d = None
        cls._pool[k] = obj
        return obj

    @classmethod
    def base(cls, alpha: int) -> "Coord":
        if alpha == 0:
            raise ValueError("base index 0 does not exist")
        return cls("x", alpha)

    @classmethod
    def jet(cls, mu: int, I: Iterable[int] = (), A: Iterable[int] = ()) -> "Coord":
        I = tuple(sorted(I))
        A = tuple(A)
        if mu == 0:
            raise ValueError("fibre index 0 does not exist")
        if any(i <= 0 for i in I) or any(a >= 0 for a in A):
            raise ValueError("bad multi-index")
        if any(A[t] <= A[t + 1] for t in range(len(A) - 1)):
            raise ValueError(f"negative multi-index {A} is not strictly decreasing")
        return cls("y", mu, I, A)

    @property
    def order(self) -> int:
        return len(self.I) + len(self.A)

    @property
    def is_base(self) -> bool:
        return self.kind == "x"

    @property
    def d(self) -> "Differential":
        if self._d is None:
            self._d = Differential(self)
        return self._d

    def __reduce__(self):
        return (Coord, (self.kind, self.index, self.I, self.A))

    def __repr__(self):
        return default_name(self)


class Differential(Gen):
    """The graded differential ``d^G c`` of a coordinate, bidegree (1, |c|)."""

    __slots__ = ("coord",)
    _pool: dict = {}

    def __new__(cls, coord: Coord):
        obj = cls._pool.get(coord)
        if obj is not None:
            return obj
        obj = object.__new__(cls)
        obj.coord = coord
        obj.p = 1
        obj.q = coord.q
        obj.key = (0,) + coord.key[1:]
        cls._pool[coord] = obj
        return obj

    def __reduce__(self):
        return (Differential, (self.coord,))

    def __repr__(self):
        return "d" + default_name(self.coord)


def default_name(c: Coord) -> str:
    if c.kind == "x":
        return f"x{c.index}"
    s = f"y{c.index}"
    if c.I or c.A:
        s += "_" + ",".join(str(i) for i in c.I + c.A)
    return s


# --------------------------------------------------------------------------
# monomial arithmetic

_EMPTY: tuple = ()


def _mono_mul(a: tuple, b: tuple):
    """Product of two normal-ordered monomials -> (monomial, sign) or None."""
    if not a:
        return b, 1
    if not b:
        return a, 1
    la = len(a)
    # suffix sums of p- and q-weighted exponents of a
    sp = [0] * (la + 1)
    sq = [0] * (la + 1)
    for t in range(la - 1, -1, -1):
        g, e = a[t]
        sp[t] = sp[t + 1] + e * g.p
        sq[t] = sq[t + 1] + e * g.q
    out = []
    sign = 0
    i = 0
    for h, f in b:
        hk = h.key
        while i < la and a[i][0].key < hk:
            out.append(a[i])
            i += 1
        if i < la and a[i][0] is h:
            if h.nilpotent:
                return None
            sign += f * (h.p * sp[i + 1] + h.q * sq[i + 1])
            out.append((h, a[i][1] + f))
            i += 1
        else:
            sign += f * (h.p * sp[i] + h.q * sq[i])
            out.append((h, f))
    out.extend(a[i:])
    return tuple(out), (-1 if sign & 1 else 1)


def _add_into(acc: dict, mono, c):
    v = acc.get(mono)
    if v is None:
        acc[mono] = c
    else:
        v = v + c
        if v:
            acc[mono] = v
        else:
            del acc[mono]


def _merge_chart(a, b):
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise ContextError(f"chart mismatch: {a} vs {b}")


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class SuperExpr:
    """Normal-form element of the bigraded algebra.

    ``terms`` maps normal-ordered monomials (tuples of ``(Gen, exponent)``) to
    nonzero ``Fraction`` coefficients.  Values are immutable; every operation
    returns a new object.
    """

    __slots__ = ("_t", "chart", "_h")

    def __init__(self, terms: Mapping | None = None, chart: Chart | None = None):
        self._t = {} if terms is None else {k: v for k, v in terms.items() if v}
        self.chart = chart
        self._h = None

    @classmethod
    def _raw(cls, terms: dict, chart):
        obj = object.__new__(cls)
        obj._t = terms
        obj.chart = chart
        obj._h = None
        return obj

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c, chart: Chart | None = None) -> "SuperExpr":
        c = _as_fraction(c)
        return cls._raw({_EMPTY: c} if c else {}, chart)

    @classmethod
    def gen(cls, g: Gen, chart: Chart | None = None) -> "SuperExpr":
        if chart is not None:
            chart.check(g)
        return cls._raw({((g, 1),): Fraction(1)}, chart)

    @classmethod
    def monomial(cls, factors: Iterable, coeff=1, chart: Chart | None = None) -> "SuperExpr":
        """Product of ``factors`` (generators or ``(gen, exp)``) in the given order."""
        out = cls.const(coeff, chart)
        for f in factors:
            g, e = f if isinstance(f, tuple) else (f, 1)
            for _ in range(e):
                out = out * cls.gen(g, chart)
        return out

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def generators(self) -> set:
        out = set()
        for mono in self._t:
            for g, _ in mono:
                out.add(g)
        return out

    def coordinates(self) -> set:
        out = set()
        for g in self.generators():
            out.add(g.coord if isinstance(g, Differential) else g)
        return out

    def form_degrees(self) -> set:
        return {sum(e for g, e in mono if g.p) for mono in self._t}

    def is_function(self) -> bool:
        return all(g.p == 0 for mono in self._t for g, _ in mono)

    def constant_term(self) -> Fraction:
        return self._t.get(_EMPTY, Fraction(0))

    def grassmann_terms(self) -> dict:
        """Group by Grassmann part: odd-coordinate word -> even polynomial.

        Only meaningful for functions (no differentials).
        """
        out: dict = {}
        for mono, c in self._t.items():
            odd = tuple(g for g, _ in mono if g.q)
            even = tuple((g, e) for g, e in mono if not g.q)
            out.setdefault(odd, {})
            _add_into(out[odd], even, c)
        return {k: SuperExpr._raw(v, self.chart) for k, v in out.items() if v}

    def homogeneous_parts(self) -> tuple["SuperExpr", "SuperExpr"]:
        ev, od = {}, {}
        for mono, c in self._t.items():
            q = sum(e * g.q for g, e in mono) & 1
            (od if q else ev)[mono] = c
        return SuperExpr._raw(ev, self.chart), SuperExpr._raw(od, self.chart)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "SuperExpr":
        if isinstance(other, SuperExpr):
            return other
        return SuperExpr.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        chart = _merge_chart(self.chart, other.chart)
        t = dict(self._t)
        for k, v in other._t.items():
            _add_into(t, k, v)
        return SuperExpr._raw(t, chart)

    __radd__ = __add__

    def __neg__(self):
        return SuperExpr._raw({k: -v for k, v in self._t.items()}, self.chart)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SuperExpr):
            c = _as_fraction(other)
            if not c:
                return SuperExpr._raw({}, self.chart)
            return SuperExpr._raw({k: v * c for k, v in self._t.items()}, self.chart)
        chart = _merge_chart(self.chart, other.chart)
        acc: dict = {}
        for ma, ca in self._t.items():
            for mb, cb in other._t.items():
                r = _mono_mul(ma, mb)
                if r is None:
                    continue
                mono, s = r
                _add_into(acc, mono, ca * cb if s > 0 else -(ca * cb))
        return SuperExpr._raw(acc, chart)

    def __rmul__(self, other):
        # scalars are central
        return self * other

    def __truediv__(self, other):
        c = _as_fraction(other)
        return self * (1 / c)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        out = SuperExpr.const(1, self.chart)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SuperExpr):
            try:
                other = SuperExpr.const(other)
            except TypeError:
                return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    # rendering ----------------------------------------------------------
    def sorted_terms(self):
        return sorted(self._t.items(), key=lambda kv: tuple(g.key + (e,) for g, e in kv[0]))

    def render(self, name: Callable[[Coord], str] = default_name) -> str:
        if not self._t:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            fs = []
            for g, e in mono:
                s = ("d" + name(g.coord)) if isinstance(g, Differential) else name(g)
                fs.append(s if e == 1 else f"{s}^{e}")
            body = "*".join(fs)
            if not fs:
                txt = str(abs(c))
            elif abs(c) == 1:
                txt = body
            else:
                txt = f"{abs(c)}*{body}"
            parts.append(("-" if c < 0 else "+", txt))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sgn, txt in parts[1:]:
            out += f" {sgn} {txt}"
        return out

    def __repr__(self):
        return f"SuperExpr({self.render()})"

    __str__ = render


def const(c, chart: Chart | None = None) -> SuperExpr:
    return SuperExpr.const(c, chart)


def mul(a: SuperExpr, b: SuperExpr) -> SuperExpr:
    return a * b


def parity_of(a: SuperExpr):
    """Parity of a homogeneous element, or ``INHOMOGENEOUS``.

    For forms the coordinate parity ``q`` is reported.
    """
    qs = {sum(e * g.q for g, e in mono) & 1 for mono in a._t}
    if len(qs) > 1:
        return INHOMOGENEOUS
    return Parity(qs.pop()) if qs else Parity.EVEN


def _mono_elem(mono, chart):
    return SuperExpr._raw({mono: Fraction(1)}, chart)


def partial(a: SuperExpr, c: Coord) -> SuperExpr:
    """Left partial derivative with respect to a coordinate."""
    if isinstance(c, SuperExpr):
        gens = c.generators()
        if len(gens) != 1 or len(c._t) != 1:
            raise ContextError("partial needs a coordinate")
        c = gens.pop()
    if not isinstance(c, Coord):
        raise ContextError(f"not a coordinate: {c!r}")
    if a.chart is not None:
        a.chart.check(c)
    acc: dict = {}
    cq = c.q
    for mono, coef in a._t.items():
        sgn = 0
        for idx, (g, e) in enumerate(mono):
            if g is c:
                if e == 1:
                    new = mono[:idx] + mono[idx + 1:]
                else:
                    new = mono[:idx] + ((g, e - 1),) + mono[idx + 1:]
                v = coef * e
                _add_into(acc, new, -v if sgn & 1 else v)
                break
            sgn += e * cq * g.q
    return SuperExpr._raw(acc, a.chart)


def apply_derivation(a: SuperExpr, image: Callable[[Gen], SuperExpr | None], P: int, Q: int) -> SuperExpr:
    """Extend ``image`` on generators to a derivation of bidegree (P, Q).

    ``D(uv) = D(u) v + (-1)**(P*p_u + Q*q_u) u D(v)``.  ``image`` returns
    ``None`` for generators sent to zero.
    """
    cache: dict = {}
    acc: dict = {}
    chart = a.chart
    for mono, coef in a._t.items():
        sp = 0
        for idx, (g, e) in enumerate(mono):
            if g in cache:
                img = cache[g]
            else:
                img = image(g)
                if img is not None and not img._t:
                    img = None
                cache[g] = img
            if img is not None:
                chart = _merge_chart(chart, img.chart)
                s = (P * g.p + Q * g.q) & 1
                if e == 1:
                    piece = img
                else:
                    piece = SuperExpr._raw({}, None)
                    for t in range(e):
                        left = _mono_elem(((g, t),), None) if t else None
                        right = _mono_elem(((g, e - 1 - t),), None) if e - 1 - t else None
                        term = img
                        if left is not None:
                            term = left * term
                        if right is not None:
                            term = term * right
                        if s and t % 2:
                            term = -term
                        piece = piece + term
                pre = mono[:idx]
                post = mono[idx + 1:]
                full = piece
                if pre:
                    full = _mono_elem(pre, None) * full
                if post:
                    full = full * _mono_elem(post, None)
                neg = sp & 1
                for m2, c2 in full._t.items():
                    v = coef * c2
                    _add_into(acc, m2, -v if neg else v)
            sp += e * (P * g.p + Q * g.q)
    return SuperExpr._raw(acc, chart)


def substitute(a: SuperExpr, image: Callable[[Gen], SuperExpr | None], chart: Chart | None = None) -> SuperExpr:
    """Algebra morphism defined on generators (``None`` keeps a generator).

    Images must have the bidegree of the generator they replace.
    """
    cache: dict = {}
    acc: dict = {}
    for mono, coef in a._t.items():
        prod = SuperExpr.const(coef)
        for g, e in mono:
            if g not in cache:
                img = image(g)
                cache[g] = _mono_elem(((g, 1),), None) if img is None else img
            img = cache[g]
            for _ in range(e):
                prod = prod * img
                if not prod._t:
                    break
            if not prod._t:
                break
        for m2, c2 in prod._t.items():
            _add_into(acc, m2, c2)
    return SuperExpr._raw(acc, chart if chart is not None else a.chart)


# --------------------------------------------------------------------------
# vector fields


class VectorField:
    """Graded vector field ``X = sum_c X^c d/dc`` (components on the left).

    ``components`` maps coordinates to ``SuperExpr``.  A homogeneous field of
    parity ``|X|`` has ``|X^c| = |X| + |c|``.  Inhomogeneous fields are
    allowed and act as the sum of their homogeneous parts.
    """

    def __init__(self, components: Mapping | None = None, parity: int | None = None, chart: Chart | None = None):
        comps = {}
        for c, v in (components or {}).items():
            if isinstance(c, SuperExpr):
                gs = c.generators()
                c = gs.pop()
            if not isinstance(v, SuperExpr):
                v = SuperExpr.const(v, chart)
            if v._t:
                comps[c] = v
        self._c = comps
        self.chart = chart
        self._declared = parity

    def component(self, c: Coord) -> SuperExpr | None:
        return self._c.get(c)

    @property
    def components(self) -> dict:
        return dict(self._c)

    @property
    def parity(self):
        if self._declared is not None:
            return Parity(self._declared)
        ps = set()
        for c, v in self._c.items():
            for mono in v._t:
                ps.add((sum(e * g.q for g, e in mono) + c.q) & 1)
        if len(ps) > 1:
            return INHOMOGENEOUS
        return Parity(ps.pop()) if ps else Parity.EVEN

    def homogeneous_parts(self) -> list["VectorField"]:
        if self._declared is not None:
            return [self]
        ev, od = {}, {}
        for c, v in self._c.items():
            e, o = v.homogeneous_parts()
            if c.q:
                e, o = o, e
            if e:
                ev[c] = e
            if o:
                od[c] = o
        out = []
        if ev:
            out.append(VectorField(ev, 0, self.chart))
        if od:
            out.append(VectorField(od, 1, self.chart))
        return out

    def __call__(self, f: SuperExpr) -> SuperExpr:
        out = SuperExpr.const(0, f.chart)
        for part in self.homogeneous_parts():
            q = int(part.parity)
            out = out + apply_derivation(
                f, lambda g: part.component(g) if g.p == 0 else None, 0, q)
        return out

    def __add__(self, other: "VectorField") -> "VectorField":
        comps = dict(self._c)
        for c, v in other._c.items():
            comps[c] = comps[c] + v if c in comps else v
        par = self._declared if self._declared == other._declared else None
        return VectorField(comps, par, _merge_chart(self.chart, other.chart))

    def scale(self, a: SuperExpr) -> "VectorField":
        """The field ``a * X`` (``a`` multiplies each component on the left)."""
        par = None
        return VectorField({c: a * v for c, v in self._c.items()}, par, self.chart)

    def __repr__(self):
        inner = " + ".join(f"({v.render()})d/d{c!r}" for c, v in
                           sorted(self._c.items(), key=lambda kv: kv[0].key))
        return f"VectorField({inner or '0'})"


def coordinate_field(c: Coord, chart: Chart | None = None) -> VectorField:
    """Basis field ``d/dc``."""
    return VectorField({c: SuperExpr.const(1, chart)}, c.q, chart)


__all__.append("coordinate_field")
