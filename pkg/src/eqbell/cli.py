"""Command-line front end: ``eqbell <subcommand> ...``.

Exit codes: 0 success, 1 computational failure (including resource caps and
failed verification), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from fractions import Fraction

import numpy as np

from eqbell.config import ResourceError, caps, load_caps_file
from eqbell.functional import InequalityFunctional, format_facet_line, format_ineq, format_rational, parse_ineq
from eqbell.scenario import Scenario


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _scenario(text: str) -> Scenario:
    try:
        return Scenario.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad scenario {text!r}: {exc}") from exc


def _load(path: str) -> InequalityFunctional:
    """A .ineq file, ``-`` for stdin, or the name of a catalog entry."""
    if path == "-":
        return parse_ineq(sys.stdin.read())
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            ineq = parse_ineq(fh.read())
        ineq.name = ineq.name or os.path.splitext(os.path.basename(path))[0]
        return ineq
    from eqbell.catalog import catalog_get

    try:
        return catalog_get(path).ineq
    except KeyError as exc:
        raise UsageError(f"no such file or catalog entry: {path}") from exc


def vertices_csv(sc: Scenario, V) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([sc.coord_label(i) for i in range(sc.dim)])
    for row in V:
        w.writerow([int(v) for v in row])
    return buf.getvalue()


def parse_vertices_csv(text: str, sc: Scenario) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    header = [sc.coord_label(i) for i in range(sc.dim)]
    if rows[0] != header:
        raise ValueError("vertex header does not match the scenario")
    return np.array([[int(v) for v in r] for r in rows[1:]], dtype=np.int64).reshape(-1, sc.dim)


def vertex_text(sc: Scenario, row) -> str:
    ones = [sc.coord_label(i) for i, v in enumerate(row) if v]
    return " ".join(ones) if ones else "(all-different)"


def facet_lines(sc: Scenario, hrep) -> list[str]:
    out = sorted(format_facet_line(InequalityFunctional.from_vector(sc, list(a), b)) for a, b in hrep.facets)
    for a, b in hrep.equations:
        f = InequalityFunctional.from_vector(sc, list(a), None)
        out.append(f"eq: {format_facet_line(f)} == {format_rational(Fraction(b))}")
    return out


def _print_rows(rows, fmt, header):
    if fmt == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        for r in rows:
            print("  ".join(str(v) for v in r))


# ---------------------------------------------------------------- subcommands

def cmd_kstar(args):
    from eqbell.strategies import k_star, k_star_unanimous

    if args.unanimous:
        print(k_star_unanimous((args.inputs,) * args.parties))
    else:
        print(k_star(args.parties, args.inputs))
    return 0


def cmd_vertices(args):
    from eqbell.strategies import vertex_array

    sc = _scenario(args.scenario)
    V = vertex_array(sc, cap_k_at_saturation=not args.uncapped)
    if args.format == "csv":
        sys.stdout.write(vertices_csv(sc, V))
    else:
        for row in V:
            print(vertex_text(sc, row))
    print(f"# {len(V)} vertices", file=sys.stderr)
    return 0


def cmd_counts(args):
    from eqbell.strategies import count_vertices_formula, vertex_array

    sc = _scenario(args.scenario)
    brute = len(vertex_array(sc))
    try:
        formula = count_vertices_formula(sc, include_empty_term=args.empty_term)
    except ValueError as exc:
        formula = f"n/a ({exc})"
    if args.format == "csv":
        _print_rows([[str(sc), formula, brute]], "csv", ["scenario", "formula", "brute_force"])
    else:
        print(f"{sc}  formula={formula}  brute_force={brute}")
    return 0


def cmd_facets(args):
    from eqbell.geometry import facet_enumeration
    from eqbell.strategies import vertex_array

    sc = _scenario(args.scenario)
    hrep = facet_enumeration(vertex_array(sc))
    for line in facet_lines(sc, hrep):
        print(line)
    print(f"# {len(hrep.facets)} facets, {len(hrep.equations)} equations", file=sys.stderr)
    return 0


def cmd_classify(args):
    from eqbell.geometry import facet_enumeration
    from eqbell.geometry.standard import standard_facetness
    from eqbell.symmetry import classify, class_hash, geometry_for, save_class

    sc = _scenario(args.scenario)
    geo = geometry_for(sc)
    hrep = facet_enumeration(geo.vertices)
    classes = classify(hrep, sc, geo, include_positivity=args.include_positivity, positivity=args.positivity)
    rows = []
    for c in classes:
        rep = c["representative"]
        num, den = standard_facetness(rep) if args.standard else (None, None)
        meta = {"size": c["size"], "ppi": int(c["ppi"]), "positivity": int(c["positivity"])}
        if num is not None:
            meta.update({"standard_facetness": f"{num}/{den}", "l_facet": int(num == den)})
        if args.save:
            save_class(rep, meta, args.repo)
        rows.append([class_hash(rep), c["size"], int(c["ppi"]), int(c["positivity"]),
                     "" if num is None else f"{num}/{den}", format_facet_line(rep)])
    rows.sort(key=lambda r: r[-1])
    _print_rows(rows, args.format, ["hash", "size", "ppi", "positivity", "standard_facetness", "facet"])
    print(f"# {len(classes)} classes from {len(hrep.facets)} facets", file=sys.stderr)
    return 0


def cmd_bound(args):
    from eqbell import bounds

    ineq = _load(args.file)
    k = args.k
    if args.type == "local":
        res = bounds.local_bound(ineq, k, with_witness=True)
        sc = ineq.scenario if k is None else ineq.scenario.with_k(k)
        print(format_rational(res.value))
        print(f"witness: {vertex_text(sc, res.witness)}")
    elif args.type == "signaling":
        print(format_rational(bounds.signaling_bound(ineq, k)))
    elif args.type == "ns":
        res = bounds.ns_bound(ineq, k, with_witness=True)
        print(format_rational(res.value))
        _print_full_behavior(res.witness)
    else:
        res = bounds.bilocal_ns_bound(ineq, k, with_witness=True)
        G, H = res.detail["split"]
        print(format_rational(res.value))
        print(f"witness split: {''.join(map(str, G))}|{''.join(map(str, H))}")
    return 0


def _print_full_behavior(p):
    n = p.ndim // 2
    for idx in np.ndindex(p.shape):
        v = p[idx]
        if v:
            x, a = idx[:n], idx[n:]
            print(f"p({''.join(map(str, a))}|{''.join(map(str, x))}) = {format_rational(Fraction(v))}")


def cmd_game(args):
    from eqbell.games import classical_game_value, unanimous_to_game

    ineq = _load(args.file)
    g = unanimous_to_game(ineq)
    print(f"scale {format_rational(g.scale)} shift {format_rational(g.shift)}")
    print("prior")
    for x in sorted(g.prior):
        print(f"  {''.join(map(str, x))} {format_rational(g.prior[x])}")
    print("winning-set " + " ".join("".join(map(str, x)) for x in sorted(g.winning_set)))
    if g.local_value is not None:
        print(f"transformed-bound {format_rational(g.local_value)}")
    if args.classical:
        print(f"classical-value {format_rational(classical_game_value(g, args.k))}")
    return 0


def cmd_family(args):
    from eqbell.games import family_f_n2

    if args.name != "f-n2":
        raise UsageError(f"unknown family {args.name!r} (known: f-n2)")
    ineq = family_f_n2(args.parties, args.k)
    sys.stdout.write(format_ineq(ineq, header=[f"parity family, {args.parties} parties"]))
    return 0


def cmd_catalog(args):
    from eqbell.catalog import catalog_get, catalog_names, verify_entry

    if not args.names:
        for name in catalog_names():
            print(name)
        return 0
    status = 0
    for name in args.names:
        try:
            entry = catalog_get(name)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from exc
        if not args.verify:
            sys.stdout.write(format_ineq(entry.ineq, header=[name, entry.description]))
            continue
        tiers = ("gate", "best-effort", "slow") if args.slow else ("gate", "best-effort")
        rep = verify_entry(entry, restarts=args.restarts, seed=args.seed, timeout=args.timeout, tiers=tiers)
        for line in rep.lines():
            print(line)
        status |= 0 if rep.ok else 1
    return status


def _read_matrix(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                rows.append([complex(float(t.split(",")[0]), float(t.split(",")[1])) for t in line.split()])
    return np.array(rows)


def cmd_seesaw(args):
    from eqbell import quantum

    ineq = _load(args.file)
    if args.state:
        rho = _read_matrix(args.state)
        res = quantum.seesaw_fixed_state(ineq, rho, args.restarts, args.seed, k=args.k)
        print(f"value {res.value!r}")
        return 0
    res = quantum.seesaw(ineq, args.dim, args.restarts, args.seed, k=args.k)
    print(f"value {res.value!r}")
    print(f"converged {res.converged}")
    text = quantum.format_strategy(res.strategy)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_quantum(args):
    from eqbell import quantum

    if args.strategy:
        with open(args.strategy, encoding="utf-8") as fh:
            qs = quantum.parse_strategy(fh.read())
        mode = "smells"
        ineq = None
        if args.file:
            ineq = _load(args.file)
            mode = ineq.scenario.mode
        qb = quantum.quantum_behavior(qs, mode)
        for i, v in enumerate(qb.coords):
            print(f"{qb.scenario.coord_label(i)} {v!r}")
        if ineq is not None:
            print(f"value {quantum.evaluate(ineq, qb)!r}")
        return 0
    if args.state:
        rho = _read_matrix(args.state)
    else:
        from eqbell.catalog import _angle

        rho = quantum.rho_p_theta(args.p, _angle(args.theta))
    print(f"concurrence {quantum.concurrence(rho)!r}")
    print(f"horodecki {quantum.horodecki_chsh(rho)!r}")
    return 0


def cmd_verify(args):
    if args.suite == "catalog":
        from eqbell.catalog import catalog_all, verify_entry

        ok = True
        for entry in catalog_all():
            rep = verify_entry(entry, restarts=args.restarts, seed=args.seed, timeout=args.timeout)
            for line in rep.lines():
                print(line)
            ok &= rep.ok
        return 0 if ok else 1
    from eqbell.suite import compute_row, rows_up_to

    ok = True
    for row in rows_up_to(args.max_scenario):
        try:
            res = compute_row(row, positivity=args.positivity)
        except ResourceError as exc:
            print(f"({row.scenario}) skipped: {exc}")
            continue
        for name, want, got, good in res.checks():
            print(f"({row.scenario}) {name}: expected {want} got {got} [{'pass' if good else 'FAIL'}]")
        ok &= res.ok
    return 0 if ok else 1


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed for randomized steps")
    common.add_argument("--threads", type=int, default=1, help="worker cap (computations are sequential)")
    common.add_argument("--config", help="INI file with a [caps] section")
    common.add_argument("--cap", action="append", default=[], metavar="NAME=VALUE", help="override a resource cap")
    common.add_argument("--format", choices=("text", "csv"), default="text")

    p = argparse.ArgumentParser(prog="eqbell", description="Equality-pattern Bell polytopes")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("kstar", cmd_kstar, "saturating number of outcomes")
    sp.add_argument("--parties", type=int, required=True)
    sp.add_argument("--inputs", type=int, required=True)
    sp.add_argument("--unanimous", action="store_true")

    sp = add("vertices", cmd_vertices, "list local deterministic points")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--uncapped", action="store_true", help="do not cap k at saturation")

    sp = add("counts", cmd_counts, "vertex-count formula vs brute force")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--empty-term", action="store_true", help="include the all-different vertex term")

    sp = add("facets", cmd_facets, "facet enumeration")
    sp.add_argument("--scenario", required=True)

    sp = add("classify", cmd_classify, "facet classes up to symmetry")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--positivity", choices=("literal", "exact"), default="literal")
    sp.add_argument("--include-positivity", action="store_true")
    sp.add_argument("--standard", action="store_true", help="also compute standard-scenario facetness")
    sp.add_argument("--save", action="store_true", help="write classes to the repository")
    sp.add_argument("--repo", help="repository root (default $EQBELL_REPO or ./eqbell-repo)")

    sp = add("bound", cmd_bound, "exact bounds of an inequality")
    sp.add_argument("--type", choices=("local", "signaling", "ns", "bilocal-ns"), default="local")
    sp.add_argument("--k", type=int)
    sp.add_argument("file")

    sp = add("game", cmd_game, "unanimous inequality as a nonlocal game")
    sp.add_argument("--transform", dest="file", required=True, metavar="FILE")
    sp.add_argument("--classical", action="store_true", help="also compute the classical value")
    sp.add_argument("--k", type=int)

    sp = add("family", cmd_family, "emit a family member as .ineq")
    sp.add_argument("--name", required=True)
    sp.add_argument("--parties", type=int, required=True)
    sp.add_argument("--k", type=int, default=3)

    sp = add("catalog", cmd_catalog, "list, show or verify catalog entries")
    sp.add_argument("names", nargs="*")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--slow", action="store_true", help="include slow checks")
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--timeout", type=float, help="seconds per check")

    sp = add("seesaw", cmd_seesaw, "quantum lower bound by seesaw")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--k", type=int)
    sp.add_argument("--state", help="fixed density matrix file (rows of re,im pairs)")
    sp.add_argument("--output", help="write the strategy here instead of stdout")
    sp.add_argument("file")

    sp = add("quantum", cmd_quantum, "two-qubit diagnostics or strategy evaluation")
    sp.add_argument("--state", help="density matrix file")
    sp.add_argument("--p", type=float, default=0.955)
    sp.add_argument("--theta", default="pi/14")
    sp.add_argument("--strategy", help="strategy file to evaluate")
    sp.add_argument("file", nargs="?")

    sp = add("verify", cmd_verify, "recompute published tables or the catalog")
    sp.add_argument("--suite", choices=("tables", "paper-tables", "catalog"), default="tables")
    sp.add_argument("--max-scenario", choices=("small", "medium", "large"), default="small")
    sp.add_argument("--positivity", choices=("literal", "exact"), default="literal")
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--timeout", type=float)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    saved = dict(vars(caps))
    try:
        if args.config:
            load_caps_file(args.config)
        for item in args.cap:
            name, _, value = item.partition("=")
            caps.update(**{name: value})
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"usage error: {exc.args[0]}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        # caps set on the command line apply to this invocation only
        caps.update(**saved)


if __name__ == "__main__":
    sys.exit(main())
