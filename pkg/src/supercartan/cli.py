"""``supercartan <command> <file>``: run the variational pipeline on a problem file.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .superalg import Coord, SuperExpr, VectorField
from .gforms import (
    d_graded,
    eta,
    horizontal_op,
    horizontal_op_even,
    render_form,
    render_latex,
    to_contact_basis,
    vertical_op,
)
from .jetcoords import Section, iterated_odd_derivative, pullback_by_jet, ProlongationError
from .berezin import BerezinSection, berezin_integral_body, box_integral
from .varcalc import (
    Lagrangian,
    critical_audit,
    d_pc_decomposition,
    euler_lagrange,
    functoriality_defect,
    grouped_el_form,
    is_critical,
    noether_check,
    odd_lie_chain,
    pc_form_berezinian,
    pc_form_intrinsic,
    pc_form_order1,
    pc_form_order1_via_jk,
    reduction_sides,
    varpi_form,
    alpha_form,
)
from .evalor import identity_probe
from .dsl import Problem, ProblemError, parse_problem

SCHEMA = 1
COMMANDS = ("el", "pc", "noether", "berezin", "verify")


class _Out:
    """Renders expressions and forms for one problem in one format."""

    def __init__(self, p: Problem, fmt: str):
        self.p = p
        self.fmt = fmt
        self.nm = p.namer
        self.chart = p.chart

    def expr(self, e: SuperExpr) -> str:
        if self.fmt == "latex":
            return render_latex(e, name=self.nm.latex)
        return e.render(self.nm)

    def form(self, w: SuperExpr) -> str:
        if self.fmt == "latex":
            def dname(c):
                if c.kind == "y":
                    return self.nm.latex(c, contact=True)
                return f"d^G {self.nm.latex(c)}"
            return render_latex(to_contact_basis(w, self.chart), name=self.nm.latex,
                                dname=dname, eta_glyph=True)
        return render_form(w, self.nm)


def _section(p: Problem, comps) -> Section:
    return Section(comps, p.chart)


def _symmetry(p: Problem, comps) -> VectorField:
    return VectorField(comps, None, p.chart)


def cmd_el(p: Problem, out: _Out, args) -> tuple[dict, bool]:
    E = euler_lagrange(Lagrangian(p.L, p.chart))
    return {"euler_lagrange": {out.nm.fiber_name[mu]: out.expr(e) for mu, e in E.items()}}, True


def cmd_pc(p: Problem, out: _Out, args) -> tuple[dict, bool]:
    lag = Lagrangian(p.L, p.chart)
    th0 = pc_form_order1(lag)
    th = pc_form_berezinian(lag)
    tt = pc_form_intrinsic(lag)
    eq = (th - tt).is_zero()
    return {
        "theta0": out.form(th0),
        "theta": out.form(th),
        "theta_tilde": out.form(tt),
        "certificate": {"theta_equals_theta_tilde": eq},
    }, eq


def cmd_noether(p: Problem, out: _Out, args) -> tuple[dict, bool]:
    lag = Lagrangian(p.L, p.chart)
    res = {}
    ok = True
    for name, comps in p.symmetries.items():
        X = _symmetry(p, comps)
        r = noether_check(X, lag)
        entry = {
            "is_supersymmetry": r.is_supersymmetry,
            "has_graded_divergence": r.has_divergence,
            "divergences_agree": r.divergences_agree,
            "is_noether": r.is_noether,
            "div_berezin": out.expr(r.div_berezin),
            "div_graded": None if r.div_graded is None else out.expr(r.div_graded),
            "current": out.form(r.current) if r.is_noether else None,
        }
        cons = {}
        if r.is_noether:
            for sname, scomps in p.sections.items():
                s = _section(p, scomps)
                crit, _ = is_critical(s, lag)
                if not crit:
                    cons[sname] = {"critical": False, "conserved": None}
                    continue
                dj = d_graded(pullback_by_jet(s, r.current))
                cons[sname] = {"critical": True, "conserved": dj.is_zero()}
                ok = ok and dj.is_zero()
        entry["sections"] = cons
        res[name] = entry
    return {"symmetries": res}, ok


def cmd_berezin(p: Problem, out: _Out, args) -> tuple[dict, bool]:
    box = p.box
    if args.box is not None:
        box = args.box
    bodies = {}
    if p.sections:
        for sname, scomps in p.sections.items():
            bodies[sname] = pullback_by_jet(_section(p, scomps), p.L)
    else:
        if any(c.kind != "x" for c in p.L.coordinates()):
            raise ProblemError("input", "the berezin command needs a section when L uses fibre coordinates", 1, 1)
        bodies["L"] = p.L
    res = {}
    for k, body in bodies.items():
        coeff = berezin_integral_body(BerezinSection(body, p.chart))
        entry = {"body": out.expr(body), "integrand": out.expr(coeff)}
        if box is not None:
            if len(box) != p.chart.m:
                raise ProblemError("input", f"box needs {2 * p.chart.m} numbers", 1, 1)
            entry["integral"] = str(box_integral(coeff, box, p.chart))
        res[k] = entry
    return {"integrals": res}, True


def _verify_checks(p: Problem, seed: int):
    ch = p.chart
    lag = Lagrangian(p.L, ch)
    vol = eta(ch)
    checks = []

    def add(name, ok):
        checks.append((name, bool(ok)))

    th0 = pc_form_order1(lag)
    th = pc_form_berezinian(lag)
    add("pc_order1_routes", (th0 - pc_form_order1_via_jk(lag)).is_zero())
    add("theta_equals_theta_tilde", (th - pc_form_intrinsic(lag)).is_zero())
    dec = d_pc_decomposition(lag)
    add("dtheta_decomposition", (d_graded(th) - dec["total"]).is_zero())
    rest = th0 - vol * lag.L
    lhs = horizontal_op_even(rest, ch) + vol * d_graded(lag.L) * (-1) ** ch.m
    add("d0_identity", (lhs - varpi_form(lag) - alpha_form(lag)).is_zero())
    g = grouped_el_form(lag) * (-1) ** ch.m
    add("grouped_euler_lagrange", (odd_lie_chain(dec["varpi"], ch) - vol * g).is_zero())
    D = horizontal_op(th, ch)
    dv = vertical_op(th, ch)
    add("D_squared", horizontal_op(D, ch).is_zero())
    add("dv_squared", vertical_op(dv, ch).is_zero())
    add("D_dv_anticommute", (horizontal_op(dv, ch) + vertical_op(D, ch)).is_zero())
    if ch.n >= 2:
        a = iterated_odd_derivative((-1, -2), lag.L)
        b = iterated_odd_derivative((-2, -1), lag.L)
        add("odd_derivatives_anticommute", identity_probe(a, -b, trials=10, seed=seed).equal)
    if ch.n == 2:
        add("reduction_identities", all((a - b).is_zero() for a, b in reduction_sides(lag)))
    for name, comps in p.symmetries.items():
        X = _symmetry(p, comps)
        r = noether_check(X, lag)
        # the transport identity is only claimed for fields with a graded divergence
        if r.has_divergence:
            add(f"functoriality[{name}]", functoriality_defect(X, lag, reading="berezinian").is_zero())
            add(f"functoriality_density[{name}]", functoriality_defect(X, lag, reading="density").is_zero())
        for sname, scomps in p.sections.items():
            s = _section(p, scomps)
            crit = is_critical(s, lag)[0]
            if r.is_noether and crit:
                add(f"conservation[{name},{sname}]", d_graded(pullback_by_jet(s, r.current)).is_zero())
    dth = d_graded(th)
    for sname, scomps in p.sections.items():
        s = _section(p, scomps)
        add(f"critical_routes[{sname}]", is_critical(s, lag)[0] == critical_audit(s, lag, dtheta=dth)[0])
    return checks


def cmd_verify(p: Problem, out: _Out, args) -> tuple[dict, bool]:
    checks = _verify_checks(p, args.seed)
    ok = all(v for _, v in checks)
    return {"seed": args.seed, "checks": {k: v for k, v in checks}, "ok": ok}, ok


_RUN = {"el": cmd_el, "pc": cmd_pc, "noether": cmd_noether, "berezin": cmd_berezin, "verify": cmd_verify}


def _text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    for k in sorted(obj):
        v = obj[k]
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.extend(_text(v, indent + 1))
        else:
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif v is None:
                v = "-"
            lines.append(f"{pad}{k}: {v}")
    return lines


def _parse_box(s: str):
    try:
        vals = [Fraction(v) for v in s.split(",")]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("box must be comma-separated numbers")
    if len(vals) % 2:
        raise argparse.ArgumentTypeError("box needs pairs of bounds")
    return [(vals[2 * k], vals[2 * k + 1]) for k in range(len(vals) // 2)]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="supercartan", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file")
    ap.add_argument("--format", choices=("text", "latex", "json"), default="text")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--box", type=_parse_box, default=None)
    ap.add_argument("--allow-nilpotent", action="store_true")
    return ap


def _fail(err: dict, code: int = 2) -> int:
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as e:
        return _fail({"error": "io", "message": str(e), "line": 0, "column": 0})
    try:
        p = parse_problem(text, allow_nilpotent=args.allow_nilpotent)
        out = _Out(p, args.format)
        result, ok = _RUN[args.command](p, out, args)
    except ProblemError as e:
        return _fail(e.as_dict())
    except (ValueError, ProlongationError) as e:
        return _fail({"error": "input", "message": str(e), "line": 0, "column": 0})
    doc = {"schema": SCHEMA, "command": args.command, "result": result}
    if args.format == "json":
        sys.stdout.write(json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(_text(result)) + "\n")
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
