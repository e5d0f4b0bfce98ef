"""Exact symbolic calculus for first-order Berezinian variational problems.

The kernel (:mod:`supercartan.superalg`) holds superfunctions and graded forms
in one bigraded algebra; the other modules build jet coordinates, Berezin
integration, Poincare-Cartan forms and Noether currents on top of it.
"""

from .superalg import Chart, Coord, Parity, SuperExpr, VectorField, coordinate_field, partial, parity_of, mul
from .gforms import d_graded, dG, eta, insert, lie_derive, render_form, render_latex, wedge
from .jetcoords import (
    JetContext,
    Section,
    contact_form,
    iterated_odd_derivative,
    jet_extension,
    jy,
    prolong,
    pullback_by_jet,
    total_derivative,
)
from .berezin import BerezinSection, berezin_integral_body, div_berezin, div_graded, lie_berezin
from .varcalc import (
    Lagrangian,
    euler_lagrange,
    is_critical,
    noether_check,
    pc_form_berezinian,
    pc_form_intrinsic,
    pc_form_order1,
)
from .dsl import parse_problem, render_problem

__version__ = "0.1.0"
