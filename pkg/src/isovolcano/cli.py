"""Command-line interface: ``isovolcano <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 resource cap, 4 internal failure.
"""

import argparse
import json
import random
import sys
from pathlib import Path

from .arith import factor, is_prime
from .census import run_census, run_trace_census
from .classgroup import class_number, minimal_generator_norm, optimal_presentation
from .curve import CurveModel, point_count, solve_norm_equation
from .endo import SmoothRelation, endo_ring_full
from .errors import AmbiguityError, InternalError, InvalidArgument, ResourceError, VolcanoError
from .ff_poly import PrimeField, field as make_field
from .hilbert import hilbert_class_polynomial
from .library import DEFAULT_ELLS, build_phi, load_phis
from .modpoly import cache_path, default_cache_dir, dumps
from .volcano import find_floor, is_supersingular, level_of, map_volcano, shortest_path_to_floor

EXIT_INVALID, EXIT_RESOURCE, EXIT_INTERNAL = 2, 3, 4


def export_chart(chart, fmt, path):
    """Write a VolcanoChart as JSON or DOT."""
    if fmt == "json":
        text = chart.to_json()
    elif fmt == "dot":
        text = chart.to_dot()
    else:
        raise InvalidArgument(f"unknown chart format {fmt!r}")
    try:
        Path(path).write_text(text, encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


# ---------------------------------------------------------------------------
# helpers

def _prime(p):
    if not is_prime(p) or p < 5:
        raise InvalidArgument(f"p={p} must be a prime >= 5")
    return p


def _ell(ell, p=None):
    if not is_prime(ell):
        raise InvalidArgument(f"ell={ell} is not prime")
    if p is not None and ell == p:
        raise InvalidArgument("ell must differ from p")
    return ell


def _phi(args, ell):
    return build_phi(ell, args.cache_dir)


def _emit(args, data, lines):
    if args.json:
        print(json.dumps(data, indent=1, sort_keys=True))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------------------
# commands

def cmd_census(args):
    p, ell = _prime(args.p), _ell(args.ell, args.p)
    data, lines = {"census": None, "traces": []}, []
    if not args.class_only:
        phi2 = _phi(args, 2) if not args.no_ss_check else None
        report = run_census(p, _phi(args, ell), threads=args.threads, seed=args.seed, phi2=phi2)
        data["census"] = report.as_dict()
        lines += report.summary_lines(traces=args.trace or [])
    ells = sorted(set(DEFAULT_ELLS) | {ell})
    phis = load_phis(ells, args.cache_dir) if args.trace else {}
    for t in args.trace or []:
        sub = run_trace_census(p, ell, t, phis, seed=args.seed)
        data["traces"].append(sub.as_dict())
        lines += sub.summary_lines()
    if args.class_only and not args.trace:
        raise InvalidArgument("--class-only needs at least one --trace")
    _emit(args, data, lines)


def cmd_floor(args):
    p, ell = _prime(args.p), _ell(args.ell, args.p)
    ctx = PrimeField(p)
    rng = random.Random(args.seed)
    phi = _phi(args, ell)
    path = (shortest_path_to_floor if args.shortest else find_floor)(phi, ctx, args.j % p, rng)
    _emit(args, {"path": path.vertices, "length": path.delta},
          [" -> ".join(map(str, path.vertices)), f"length {path.delta}"])


def cmd_level(args):
    p, ell = _prime(args.p), _ell(args.ell, args.p)
    ctx = PrimeField(p)
    rng = random.Random(args.seed)
    phi = _phi(args, ell)
    depth = args.depth
    if depth is None:
        depth = map_volcano(phi, ctx, args.j % p, rng).depth
    lv = level_of(phi, ctx, args.j % p, depth, rng)
    _emit(args, {"j": args.j % p, "level": lv, "depth": depth}, [f"level {lv} of depth {depth}"])


def cmd_map(args):
    p, ell = _prime(args.p), _ell(args.ell, args.p)
    ctx = PrimeField(p)
    chart = map_volcano(_phi(args, ell), ctx, args.j % p, random.Random(args.seed))
    if args.output:
        export_chart(chart, args.format, args.output)
    text = chart.to_json() if args.format == "json" else chart.to_dot()
    if args.json or not args.output:
        sys.stdout.write(text)
    else:
        print(f"{len(chart.levels)} vertices, depth {chart.depth}, "
              f"|V0| = {chart.surface_size}; written to {args.output}")


def _parse_fp2(text, p):
    parts = text.split(",")
    if len(parts) == 1:
        return (int(parts[0]) % p, 0)
    if len(parts) == 2:
        return (int(parts[0]) % p, int(parts[1]) % p)
    raise InvalidArgument(f"bad F_p^2 element {text!r}; use a or a,b")


def cmd_ss_test(args):
    p = _prime(args.p)
    ctx2 = make_field(p, 2)
    j = _parse_fp2(args.j, p)
    ss = is_supersingular(_phi(args, 2), ctx2, j, random.Random(args.seed))
    _emit(args, {"p": p, "j": list(j), "supersingular": ss, "nonresidue": ctx2.nonresidue},
          ["supersingular" if ss else "ordinary"])


def cmd_hilbert(args):
    D = args.D
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidArgument(f"{D} is not a negative discriminant")
    phis = load_phis(DEFAULT_ELLS, args.cache_dir)
    res = hilbert_class_polynomial(D, phis, rng=random.Random(args.seed))
    if args.mod:
        res = res.reduce(_prime(args.mod))
    data = {"D": D, "degree": res.degree, "coefficients": res.coefficients, "modulus": res.modulus}
    lines = [f"H_{{{D}}} has degree {res.degree}"]
    lines += [f"  X^{i}: {c}" for i, c in enumerate(res.coefficients)]
    _emit(args, data, lines)


def cmd_modpoly(args):
    ell = _ell(args.ell)
    phi = _phi(args, ell)
    if args.output:
        Path(args.output).write_text(dumps(phi), encoding="ascii")
    bits = max(abs(c) for c in phi.coefficients.values()).bit_length()
    path = cache_path(args.cache_dir or default_cache_dir(), ell)
    _emit(args, {"ell": ell, "terms": len(phi.coefficients), "max_bits": bits, "cache": str(path)},
          [f"Phi_{ell}: {len(phi.coefficients)} stored coefficients, largest {bits} bits",
           f"cached at {path}"])


def _assign_relations(relations, ne, unresolved):
    """Match each unresolved prime with a relation that discriminates it."""
    out = {}
    for ell in unresolved:
        small = ell * ell * ne.D_K
        big = (ne.v // ell) ** 2 * ne.D_K
        for rel in relations:
            try:
                if rel.holds_in(big) and not any(r.holds_in(small)
                                                 for r in rel.conjugate_variants()):
                    out[ell] = rel
                    break
            except InvalidArgument:
                continue
    return out


def cmd_endoring(args):
    p = _prime(args.p)
    ctx = PrimeField(p)
    rng = random.Random(args.seed)
    E = CurveModel(ctx, ctx(args.a), ctx(args.b))
    t = p + 1 - point_count(E, rng)
    if t % p == 0:
        raise InvalidArgument("the curve is supersingular")
    ne = solve_norm_equation(p, t)
    small = sorted(factor(ne.v)) if ne.v > 1 else []
    relations = []
    if args.relations:
        try:
            text = Path(args.relations).read_text(encoding="ascii")
        except OSError as exc:
            raise InvalidArgument(f"cannot read {args.relations}: {exc.strerror}") from exc
        relations = [SmoothRelation.parse(line, ne.D_K) for line in text.splitlines()
                     if line.strip() and not line.lstrip().startswith("#")]
    needed = {q for q in small if q <= args.budget}
    needed |= {q for rel in relations for q in rel.primes}
    phis = {q: _phi(args, q) for q in sorted(needed)}
    large = [q for q in small if q > args.budget]
    assigned = _assign_relations(relations, ne, large)
    res = endo_ring_full(phis, ctx, E.j, ne, assigned, budget=args.budget, rng=rng)
    data = {"p": p, "t": t, "v": ne.v, "D_K": ne.D_K, "u": res.u, "D_end": res.D_end,
            "levels": {str(k): v for k, v in res.levels.items()},
            "unresolved": list(res.unresolved)}
    lines = [f"j = {E.j}, t = {t}, 4p = t^2 - {ne.v}^2 * ({ne.D_K})",
             f"u = {res.u}, End(E) has discriminant {res.D_end}"]
    if res.unresolved:
        lines.append("unresolved primes (no relation): " + " ".join(map(str, res.unresolved)))
    _emit(args, data, lines)


def cmd_classgroup(args):
    D = args.D
    h = class_number(D)
    pres = optimal_presentation(D)
    gen = minimal_generator_norm(D)
    rels = [list(r) for r in pres.power_relations]
    data = {"D": D, "h": h, "norms": pres.norms, "relative_orders": pres.relative_orders,
            "power_relations": rels, "minimal_generator_norm": gen}
    lines = [f"h({D}) = {h}",
             f"generator norms  {pres.norms}",
             f"relative orders  {pres.relative_orders}"]
    for i, (ell, r, rel) in enumerate(zip(pres.norms, pres.relative_orders, rels)):
        rhs = " ".join(f"[l_{pres.norms[k]}]^{e}" for k, e in enumerate(rel) if e) or "1"
        lines.append(f"  [l_{ell}]^{r} = {rhs}")
    lines.append("cyclic with minimal generator norm "
                 f"{gen}" if gen else "no single prime generator found")
    _emit(args, data, lines)


# ---------------------------------------------------------------------------
# parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for censuses")
    common.add_argument("--cache-dir", default=None,
                        help="modular polynomial cache (default $ISOVOLCANO_CACHE or "
                             "~/.cache/isovolcano)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="isovolcano", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("census", cmd_census, "component census of G_ell(F_p)")
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-l", "--ell", type=int, required=True)
    sp.add_argument("--trace", type=int, action="append",
                    help="also inventory the isogeny class of this trace (repeatable)")
    sp.add_argument("--class-only", action="store_true",
                    help="skip the full sweep and only inventory the --trace classes")
    sp.add_argument("--no-ss-check", action="store_true",
                    help="do not confirm trace-0 components over F_p^2")

    for name, func, text in (("floor", cmd_floor, "walk from j to the floor"),
                             ("level", cmd_level, "level of j in its volcano"),
                             ("map", cmd_map, "map the volcano containing j")):
        sp = add(name, func, text)
        sp.add_argument("-p", type=int, required=True)
        sp.add_argument("-l", "--ell", type=int, required=True)
        sp.add_argument("-j", type=int, required=True)
        if name == "floor":
            sp.add_argument("--shortest", action="store_true", help="shortest path (3 walks)")
        elif name == "level":
            sp.add_argument("--depth", type=int, help="volcano depth (mapped when omitted)")
        else:
            sp.add_argument("--format", choices=("json", "dot"), default="json")
            sp.add_argument("-o", "--output", help="write the chart to this file")

    sp = add("ss-test", cmd_ss_test, "supersingularity test over F_p^2")
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-j", required=True, help="a (in F_p) or a,b meaning a + b*s, s^2 = nonresidue")

    sp = add("hilbert", cmd_hilbert, "Hilbert class polynomial H_D")
    sp.add_argument("-D", type=int, required=True)
    sp.add_argument("--mod", type=int, help="reduce the coefficients mod this prime")

    sp = add("modpoly", cmd_modpoly, "classical modular polynomial Phi_ell")
    sp.add_argument("-l", "--ell", type=int, required=True)
    sp.add_argument("-o", "--output", help="also write the polynomial to this file")

    sp = add("endoring", cmd_endoring, "endomorphism ring of y^2 = x^3 + a x + b")
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-a", type=int, required=True)
    sp.add_argument("-b", type=int, required=True)
    sp.add_argument("--relations", help="file of smooth relations, one per line")
    sp.add_argument("--budget", type=int, default=60,
                    help="largest prime handled by volcano climbing (default 60)")

    sp = add("classgroup", cmd_classgroup, "class group of discriminant D")
    sp.add_argument("-D", type=int, required=True)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    try:
        args.func(args)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InternalError, AmbiguityError, VolcanoError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())
