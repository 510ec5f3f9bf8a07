"""Command-line front end.

Exit codes: 0 every verdict passed, 1 a mathematical verdict failed,
2 malformed input, 3 a resource cap was hit (see PBWCOBAR_MAX_BASIS).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from pbwcobar import io, kgraphs, pbw
from pbwcobar.complexes import CONVENTIONS, ALL_ODD, exterior_cobar, filtration_graded_check, truncated_cohomology
from pbwcobar.errors import PBWError, PreconditionError, ResourceError
from pbwcobar.polyvec import is_poisson, koszul_dual, maurer_cartan_check

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

DEFAULT_N, DEFAULT_M, DEFAULT_WEIGHT = 4, 3, 4


def _q(x) -> str:
    return str(Fraction(x))


def _poly_str(poly: dict, names) -> str:
    from pbwcobar.algebra import monomial_str

    if not poly:
        return "0"
    return " + ".join(f"({_q(c)})*{monomial_str(e, names)}" for e, c in poly.items())


def _element_str(e) -> str:
    return repr(e)


def _load_lie(arg: str) -> pbw.LieAlgebra:
    if arg in pbw.BUILTIN_LIE:
        return pbw.BUILTIN_LIE[arg]
    spec = io.load_input(arg)
    if spec.kind != "lie":
        raise io.InputError(f"{arg}: expected a lie input")
    return spec.lie


class Report:
    def __init__(self, command: list[str], params: dict):
        self.data = {"command": command, "parameters": params, "verdicts": {}, "results": {}, "witnesses": {}}
        self.lines: list[str] = []
        self._t0 = time.perf_counter()

    def verdict(self, name: str, ok: bool) -> None:
        self.data["verdicts"][name] = "PASS" if ok else "FAIL"
        self.lines.append(f"{name}: {'PASS' if ok else 'FAIL'}")

    def line(self, text: str) -> None:
        self.lines.append(text)

    @property
    def ok(self) -> bool:
        return all(v == "PASS" for v in self.data["verdicts"].values())

    def emit(self, as_json: bool, out) -> None:
        self.data["timing_seconds"] = round(time.perf_counter() - self._t0, 3)
        if as_json:
            out.write(json.dumps(self.data, indent=2, default=str) + "\n")
        else:
            out.write("\n".join(self.lines) + "\n")


# ----------------------------------------------------------------------------
# commands


def cmd_check_jacobi(args, rep: Report) -> None:
    spec = io.load_input(args.input) if args.input not in pbw.BUILTIN_LIE else io.InputSpec(
        "lie", 3, list(pbw.BUILTIN_LIE[args.input].names), lie=pbw.BUILTIN_LIE[args.input]
    )
    alpha = spec.bivector()
    chk = is_poisson(alpha)
    mc = maurer_cartan_check(koszul_dual(alpha))
    rep.line(f"input: {spec.kind}, dimension {spec.dimension}")
    rep.line(f"[alpha, alpha] = {chk.square}")
    rep.data["results"]["schouten_square"] = str(chk.square)
    rep.data["results"]["maurer_cartan_of_K"] = mc.satisfied
    if chk.jacobiator:
        for (i, j, k), poly in chk.jacobiator.items():
            text = _poly_str(poly, spec.variables)
            rep.line(f"jacobiator ({i},{j},{k}): {text}")
            rep.data["witnesses"][f"jacobiator_{i}{j}{k}"] = text
    rep.verdict("poisson", chk.is_poisson)


def _relations_for(spec: io.InputSpec, M: int) -> pbw.RelationSet:
    if spec.kind == "lie":
        return pbw.relations_from_lie(spec.lie, M)
    return pbw.relations_order1(spec.poisson, M)


def _render_pbw(rep: Report, report: pbw.PBWReport) -> None:
    rep.line(f"gr A dimensions (d = 0..{report.N}): {report.dims}")
    rep.line(f"dim S^d(V):                      {report.expected}")
    rep.data["results"]["gr_dims"] = report.dims
    rep.data["results"]["expected_dims"] = report.expected
    rep.data["results"]["hbar_weight"] = None if report.hbar_weight is None else str(report.hbar_weight)
    for note in report.notes:
        rep.line(f"note: {note}")
    for ov in report.overlaps:
        rep.line(f"overlap {ov.triple}: first defect at hbar^{ov.first_order}: {ov.defect}")
        rep.data["witnesses"][f"overlap_{''.join(map(str, ov.triple))}"] = {
            "first_order": ov.first_order,
            "defect": str(ov.defect),
        }
    rep.verdict("confluent", report.confluent)
    rep.verdict("dimensions", report.dims_match)


def cmd_pbw_check(args, rep: Report) -> None:
    spec = io.load_input(args.input)
    M = args.hbar_order
    R = _relations_for(spec, M)
    if args.corrections:
        n, Mc, layers = io.parse_corrections(io.load_json(args.corrections))
        R = io.apply_corrections(R, n, Mc, layers).with_order(M)
    rep.line(f"relations: {R}")
    _render_pbw(rep, pbw.pbw_check(R, args.degree, M))


def cmd_enveloping(args, rep: Report) -> None:
    g = _load_lie(args.input)
    c = pbw.deformed_cobar(g, args.hbar_order)
    sq = pbw.check_square_zero(c, args.weight)
    rep.verdict("square_zero", sq.ok)
    if not sq.ok:
        rep.line(f"(d0 + d1)^2 on {sq.generator}: {sq.value}")
        rep.data["witnesses"]["square"] = {"generator": str(sq.generator), "value": str(sq.value)}
        return
    R, report = pbw.h0_presentation(c, args.degree, args.hbar_order, args.weight)
    for (i, j), e in R.relations.items():
        rep.line(f"x{i} x{j} - x{j} x{i} = {e}")
    rep.data["results"]["relations"] = io.relations_to_json(R, kind="relations")
    _render_pbw(rep, report)


def cmd_cobar(args, rep: Report) -> None:
    if args.deform:
        g = _load_lie(args.deform)
        c = pbw.deformed_cobar(g, max(args.weight, 1))
        sq = pbw.check_square_zero(c, args.weight)
        rep.verdict("square_zero", sq.ok)
        if not sq.ok:
            rep.line(f"(d0 + d1)^2 on {sq.generator}: {sq.value}")
            rep.data["witnesses"]["square"] = {"generator": str(sq.generator), "value": str(sq.value)}
            return
        fr = filtration_graded_check(c, args.i_max, args.weight)
        rep.line(f"signs: {c.convention}; series truncated mod hbar^{c.order + 1}")
        rep.data["results"]["convention"] = c.convention
        rep.data["results"]["truncation"] = f"mod hbar^{c.order + 1}"
        rep.line("weight  i  F_i/F_(i+1)  hbar^i S")
        for row in fr.rows:
            rep.line(f"{row['weight']:>6} {row['i']:>2} {row['graded_dim']:>12} {row['expected']:>9}")
        for row in fr.negative_degrees:
            rep.line(f"H^{row['degree']} weight {row['weight']}: {row['dimension']}")
        rep.data["results"]["filtration"] = fr.rows
        rep.data["results"]["negative_degrees"] = fr.negative_degrees
        rep.verdict("filtration", fr.verdict)
        return
    n = args.dim
    if n is None:
        raise io.InputError("cobar needs --dim or --deform")
    c = exterior_cobar(n, args.convention)
    rep.line(f"signs: {c.convention}")
    rep.data["results"]["convention"] = c.convention
    dims = []
    for w in range(args.weight + 1):
        sl = truncated_cohomology(c, args.degree, w)
        dims.append(sl.dimension)
        rep.line(f"H^{args.degree} weight {w}: {sl.dimension}")
    rep.data["results"]["dimensions"] = dims


def cmd_solve_corrections(args, rep: Report) -> None:
    spec = io.load_input(args.input)
    m = args.order
    R = _relations_for(spec, m + 1)
    deg = spec.bivector().max_degree()
    res = pbw.solve_corrections(R, m, args.max_degree, alpha_degree=deg)
    rep.data["parameters"]["max_degree"] = res.max_degree
    rep.verdict("feasible", res.feasible)
    if not res.feasible:
        rep.line(res.note)
        obstructed = not res.note.startswith("no omega")
        rep.data["results"]["certificate"] = "obstructed" if obstructed else "inconclusive"
        for triple, e in res.residual.items():
            rep.line(f"residual {triple}: {e}")
            rep.data["witnesses"][f"residual_{''.join(map(str, triple))}"] = str(e)
        return
    payload = io.relations_to_json(res.relations, range(m, m + 1))
    rep.data["results"]["corrections"] = payload
    text = json.dumps(payload, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
        rep.line(f"wrote {args.output}")
    else:
        rep.line(text)
    if not res.omega:
        rep.line(f"omega_{m} = 0 suffices")


def cmd_graphs(args, rep: Report) -> None:
    graphs = kgraphs.enumerate_graphs(args.aerial, args.mode, max_aerial=args.max_aerial)
    payload = json.loads(kgraphs.export_json(graphs))
    rep.data["results"]["graphs"] = payload
    if args.output:
        Path(args.output).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        rep.line(f"{len(graphs)} graphs written to {args.output}")
    else:
        rep.line(json.dumps(payload, indent=2))


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pbwcobar", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="emit a machine-readable report")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-jacobi", help="is the bivector Poisson / the Lie bracket Jacobi?")
    s.add_argument("input", help="lie or poisson JSON file, or a builtin Lie algebra name")
    s.set_defaults(func=cmd_check_jacobi)

    s = sub.add_parser("pbw-check", help="overlap confluence and graded dimensions")
    s.add_argument("input")
    s.add_argument("--degree", "-N", type=int, default=DEFAULT_N)
    s.add_argument("--hbar-order", "-M", type=int, default=DEFAULT_M)
    s.add_argument("--corrections", help="corrections JSON overriding hbar layers")
    s.set_defaults(func=cmd_pbw_check)

    s = sub.add_parser("cobar", help="cohomology of the cobar complex of Lambda(V)")
    s.add_argument("--dim", type=int)
    s.add_argument("--weight", type=int, default=DEFAULT_WEIGHT)
    s.add_argument("--degree", type=int, default=0)
    s.add_argument("--convention", choices=CONVENTIONS, default=ALL_ODD)
    s.add_argument("--deform", help="builtin Lie algebra name or lie JSON file")
    s.add_argument("--i-max", type=int, default=2)
    s.set_defaults(func=cmd_cobar)

    s = sub.add_parser("enveloping", help="H^0 of the deformed cobar complex of a Lie algebra")
    s.add_argument("input", help="builtin name (h3, sl2, so3, nonjacobi, abelian) or lie JSON")
    s.add_argument("--degree", "-N", type=int, default=DEFAULT_N)
    s.add_argument("--hbar-order", "-M", type=int, default=DEFAULT_M)
    s.add_argument("--weight", type=int, default=3, help="weight bound for the square-zero check")
    s.set_defaults(func=cmd_enveloping)

    s = sub.add_parser("solve-corrections", help="solve for the hbar^m layer omega_m")
    s.add_argument("input")
    s.add_argument("--order", "-m", type=int, default=2)
    s.add_argument("--max-degree", "-D", type=int)
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_solve_corrections)

    s = sub.add_parser("graphs", help="enumerate admissible graphs")
    s.add_argument("--aerial", "-m", type=int, default=1)
    s.add_argument("--mode", choices=kgraphs.MODES, default=kgraphs.OUT2)
    s.add_argument("--max-aerial", type=int, default=kgraphs.DEFAULT_MAX_AERIAL)
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_graphs)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    params = {k: v for k, v in vars(args).items() if k not in ("func", "json", "command")}
    rep = Report(argv, params)
    try:
        args.func(args, rep)
    except io.InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except PreconditionError as e:
        rep.line(f"precondition failed: {e}")
        rep.verdict("precondition", False)
    except (PBWError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    rep.emit(args.json, out)
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
