"""Finite Grassmann algebra oracle.

Elements of ``Lambda_N`` are stored as ``{frozenset(generators): Fraction}``;
the sign of a product is computed by counting inversions of the merged
generator list.  Nothing here touches :mod:`supercartan.superalg` internals
except :func:`evaluate`, which reads the public term map.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .superalg import Coord, SuperExpr

__all__ = [
    "GrassmannNumber",
    "theta",
    "evaluate",
    "ProbeVerdict",
    "identity_probe",
    "structured_probe",
    "random_assignment",
    "brute_force_sign",
]


def brute_force_sign(seq) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    # bubble sort, one transposition at a time
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign


class GrassmannNumber:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        t = {}
        for k, v in (terms or {}).items():
            v = Fraction(v)
            if v:
                t[frozenset(k)] = v
        self.terms = t

    @classmethod
    def scalar(cls, c) -> "GrassmannNumber":
        return cls({frozenset(): c})

    @staticmethod
    def _coerce(x) -> "GrassmannNumber":
        return x if isinstance(x, GrassmannNumber) else GrassmannNumber.scalar(x)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return GrassmannNumber(t)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannNumber({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        t: dict = {}
        for ka, va in self.terms.items():
            la = sorted(ka)
            for kb, vb in other.terms.items():
                if ka & kb:
                    continue
                s = brute_force_sign(la + sorted(kb))
                k = ka | kb
                t[k] = t.get(k, 0) + s * va * vb
        return GrassmannNumber(t)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def __pow__(self, e: int):
        out = GrassmannNumber.scalar(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, GrassmannNumber):
            other = GrassmannNumber.scalar(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def parity(self):
        """0 or 1 for homogeneous elements, ``None`` otherwise (0 for zero)."""
        ps = {len(k) % 2 for k in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def left_derivative(self, g: int) -> "GrassmannNumber":
        """``d/d theta_g`` acting from the left."""
        t = {}
        for k, v in self.terms.items():
            if g not in k:
                continue
            before = sum(1 for h in k if h < g)
            t[k - {g}] = v if before % 2 == 0 else -v
        return GrassmannNumber(t)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda s: (len(s), sorted(s))):
            name = "".join(f"t{g}" for g in sorted(k))
            parts.append(f"{self.terms[k]}{'*' + name if name else ''}")
        return " + ".join(parts)


def theta(g: int) -> GrassmannNumber:
    return GrassmannNumber({frozenset([g]): 1})


def _value(g, assignment):
    if g in assignment:
        return assignment[g]
    raise KeyError(f"no value assigned to {g!r}")


def evaluate(f: SuperExpr, assignment: Mapping) -> GrassmannNumber:
    """Ring morphism defined by ``assignment`` (coordinate -> value), applied to ``f``."""
    for c, v in assignment.items():
        v = GrassmannNumber._coerce(v)
        p = v.parity()
        if p is None or (p != int(c.parity) and not v.is_zero()):
            raise ValueError(f"assignment for {c!r} does not respect parity")
    out = GrassmannNumber()
    for mono, coeff in f.items():
        term = GrassmannNumber.scalar(coeff)
        for g, e in mono:
            if g.p:
                raise ValueError("evaluate works on functions, not forms")
            term = term * (GrassmannNumber._coerce(_value(g, assignment)) ** e)
        out = out + term
    return out


@dataclass
class ProbeVerdict:
    equal: bool
    trials: int
    counterexample: dict | None = None

    def __bool__(self):
        return self.equal


def _coords(*exprs) -> list:
    cs = set()
    for e in exprs:
        cs |= e.coordinates()
    return sorted(cs, key=lambda c: c.key)


def random_assignment(coords, rng: random.Random, n_gen: int | None = None) -> dict:
    """Random parity-respecting values: odd coordinates get odd linear combinations,
    even ones a rational plus an even nilpotent part."""
    odd = [c for c in coords if int(c.parity)]
    N = n_gen if n_gen is not None else max(2, len(odd) + 2)
    val = {}
    for c in coords:
        if int(c.parity):
            v = GrassmannNumber()
            for g in range(N):
                v = v + theta(g) * rng.randint(-3, 3)
            if v.is_zero():
                v = theta(rng.randrange(N))
            val[c] = v
        else:
            v = GrassmannNumber.scalar(Fraction(rng.randint(-9, 9), rng.randint(1, 4)))
            if N >= 2 and rng.random() < 0.5:
                a, b = rng.sample(range(N), 2)
                v = v + theta(a) * theta(b) * rng.randint(-2, 2)
            val[c] = v
    return val


def identity_probe(lhs: SuperExpr, rhs: SuperExpr, trials: int = 20, seed: int = 0) -> ProbeVerdict:
    """Compare both sides at ``trials`` seeded random assignments."""
    rng = random.Random(seed)
    coords = _coords(lhs, rhs)
    for t in range(trials):
        a = random_assignment(coords, rng)
        if evaluate(lhs, a) != evaluate(rhs, a):
            return ProbeVerdict(False, t + 1, a)
    return ProbeVerdict(True, trials)


def _max_degree(e: SuperExpr, c: Coord) -> int:
    return max((dict(m).get(c, 0) for m, _ in e.items()), default=0)


def structured_probe(lhs: SuperExpr, rhs: SuperExpr, limit: int = 200000) -> ProbeVerdict:
    """Complete comparison.

    Each odd coordinate is sent to its own generator, so Grassmann monomials
    stay independent; each even coordinate runs over ``deg + 1`` integer nodes,
    enough to pin a polynomial of that degree.
    """
    coords = _coords(lhs, rhs)
    odd = [c for c in coords if int(c.parity)]
    even = [c for c in coords if not int(c.parity)]
    base = {c: theta(k) for k, c in enumerate(odd)}
    grids = [range(max(_max_degree(lhs, c), _max_degree(rhs, c)) + 1) for c in even]
    size = 1
    for g in grids:
        size *= len(g)
    if size > limit:
        raise ValueError(f"structured probe needs {size} points (limit {limit})")
    n = 0
    for pt in itertools.product(*grids):
        a = dict(base)
        a.update({c: GrassmannNumber.scalar(v) for c, v in zip(even, pt)})
        n += 1
        if evaluate(lhs, a) != evaluate(rhs, a):
            return ProbeVerdict(False, n, a)
    return ProbeVerdict(True, n)
