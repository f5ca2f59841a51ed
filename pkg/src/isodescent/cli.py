"""Command-line front end.

Every subcommand prints one report.  JSON reports are a single line, so a
sequence of invocations forms a newline-delimited stream.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import cohomgrowth, descent, localfield, twistlab
from .arith import fundamental_discriminant
from .errors import ConditionFailure, InconsistentResult, InvalidInput, SearchExhausted, UndecidedError
from .report import RunConfig, build_report, canonical_json, to_csv

EXIT_OK, EXIT_INVALID, EXIT_UNDECIDED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message)


@dataclass
class Outcome:
    report: dict
    columns: list[str] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    text: list[str] = field(default_factory=list)


def _rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational number: {s!r}") from exc


def _place(s: str) -> localfield.Place:
    try:
        return localfield.Place.parse(s)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc


def _conditional(rank, finite: bool) -> list[str]:
    out = []
    if rank is not None:
        out.append("rank")
    if finite:
        out.append("finiteness")
    return out


def _report(cfg: RunConfig, command: str, inputs: dict, results, certs=None, conditional_on=(), notes=()) -> dict:
    return build_report(command, inputs, results, certs, conditional_on, notes, include_certs=cfg.certificates)


# --------------------------------------------------------------------------
# subcommands


def cmd_hilbert(args, cfg: RunConfig) -> Outcome:
    a, b, v = _rational(args.a), _rational(args.b), _place(args.v)
    if a == 0 or b == 0:
        raise InvalidInput("Hilbert symbol arguments must be nonzero")
    s = localfield.hilbert_symbol(a, b, v)
    inputs = {"a": str(a), "b": str(b), "place": str(v)}
    rep = _report(cfg, "hilbert", inputs, {"symbol": s})
    row = {**inputs, "symbol": s}
    return Outcome(rep, ["a", "b", "place", "symbol"], [row], [f"({a},{b})_{v} = {s:+d}"])


def cmd_local_solve(args, cfg: RunConfig) -> Outcome:
    T = localfield.QuarticTorsor(args.d, args.e) if args.d and args.e else None
    if T is None:
        raise InvalidInput("d and e must be nonzero")
    if args.unramified_2ext is not None:
        cert = localfield.torsor_solvable_unramified_2ext(T, args.unramified_2ext, cfg.depth_cap)
        place = f"2 in Q2(sqrt {args.unramified_2ext})"
    else:
        v = _place(args.v)
        cert = localfield.solve_with_retry(T, v, cfg.depth_cap, cfg.max_depth_cap)
        place = str(v)
    inputs = {"d": args.d, "e": args.e, "place": place, "depth_cap": cfg.depth_cap}
    results = {"verdict": cert.verdict, "evidence": cert.kind, "revalidated": localfield.revalidate(cert)}
    rep = _report(cfg, "local-solve", inputs, results, [cert.to_dict()])
    row = {"d": args.d, "e": args.e, "place": place, **results}
    out = Outcome(rep, ["d", "e", "place", "verdict", "evidence", "revalidated"], [row], [f"{T} at {place}: {cert.verdict} ({cert.kind})"])
    if not cert.decided:
        raise UndecidedError(f"{T} undecided at {place} up to depth {cert.depth_used}", cert)
    return out


def _selmer_payload(sel: descent.SelmerReport) -> dict:
    return {
        "side": sel.side,
        "torsor_e": sel.curve.torsor_coefficient(sel.side),
        "ambient_order": sel.ambient.order,
        "ambient_generators": [int(g) for g in sel.ambient.generators],
        "members": [int(d) for d in sel.members],
        "dimension": sel.dimension,
        "excluded_at": {str(v): [int(d) for d in sel.excluded_at(v)] for v in sel.places},
    }


def _selmer_certs(sel: descent.SelmerReport) -> list[dict]:
    return [
        {"side": sel.side, "d": str(int(d)), **sel.certificate(d, v).to_dict()}
        for d in sel.ambient.elements
        for v in sel.places
    ]


def _rank_for(cfg: RunConfig, tag: str, flag):
    return flag if flag is not None else cfg.ranks.get(tag)


def cmd_descend(args, cfg: RunConfig) -> Outcome:
    base = descent.MonicIsogenyCurve(args.a)
    if args.twist is not None:
        twistlab.TwistParameter(args.twist)
        curve = base.twist(args.twist)
    else:
        curve = base
    rank = _rank_for(cfg, "curve", args.rank)
    finite = cfg.assume_finiteness
    res = descent.descend(curve, rank, finite, cfg.depth_cap, None, cfg.parallelism)
    notes = []
    if args.order4:
        notes.append(twistlab.order4_obstruction_note(True, args.a, res.bound))
    inputs = {"a": args.a, "twist": args.twist, "curve_a": curve.a, "rank": rank, "assume_finiteness": finite, "depth_cap": cfg.depth_cap}
    results = {
        "places": res.phi.places.labels(),
        "phi": _selmer_payload(res.phi),
        "phihat": _selmer_payload(res.phihat),
        "sha2_bound": res.bound.to_dict(),
    }
    rep = _report(cfg, "descend", inputs, results, _selmer_certs(res.phi) + _selmer_certs(res.phihat), res.bound.conditional_on, notes)
    b = res.bound
    row = {
        "curve_a": curve.a, "e": b.e, "f": b.f, "upper_dim_raw": b.upper_dim_raw,
        "upper_dim_parity": "" if b.upper_dim_parity is None else b.upper_dim_parity, "order_bound": b.order_bound,
    }
    text = [
        f"y^2 = x^3 + {curve.a}x over Q, places {', '.join(res.phi.places.labels())}",
        f"Sel^phi: dim {b.e}, members {[int(d) for d in res.phi.members]}",
        f"Sel^phihat: dim {b.f}, members {[int(d) for d in res.phihat.members]}",
        f"dim Sha[2] <= {b.best_dim}" + (f" (conditional on {', '.join(b.conditional_on)})" if b.conditional_on else ""),
    ] + notes
    return Outcome(rep, list(row), [row], text)


def cmd_twist_search(args, cfg: RunConfig) -> Outcome:
    found = twistlab.search_twists(args.p, args.variant, args.count, cfg.search_bound)
    inputs = {"p": args.p, "variant": args.variant, "count": args.count, "bound": cfg.search_bound}
    results = {"twists": [{"D": tp.D, "l": tp.l, "trace": tr.to_dict()} for tp, tr in found]}
    rep = _report(cfg, "twist-search", inputs, results)
    rows = [{"p": args.p, "variant": args.variant, "D": tp.D, "l": tp.l} for tp, _ in found]
    text = [f"{args.variant} p={args.p}: D = {tp.D}" for tp, _ in found]
    return Outcome(rep, ["p", "variant", "D", "l"], rows, text)


def cmd_verify(args, cfg: RunConfig) -> Outcome:
    rank = _rank_for(cfg, "curve", args.rank)
    res = twistlab.verify_twist_vanishing(args.p, args.D, rank, cfg.depth_cap, args.variant, cfg.parallelism)
    notes = []
    if args.order4:
        notes.append(twistlab.order4_obstruction_note(True, args.p))
    inputs = {"p": args.p, "D": args.D, "variant": res.trace.variant, "rank": rank, "depth_cap": cfg.depth_cap}
    results = {
        "trace": res.trace.to_dict(),
        "phi": _selmer_payload(res.phi),
        "phihat": _selmer_payload(res.phihat),
        "sha2_bound": res.bound.to_dict(),
        "sha2_vanishes": res.bound.best_dim == 0,
    }
    rep = _report(cfg, "verify", inputs, results, _selmer_certs(res.phi) + _selmer_certs(res.phihat), res.bound.conditional_on, notes)
    row = {"p": args.p, "D": args.D, "e": res.bound.e, "f": res.bound.f, "bound": res.bound.best_dim}
    return Outcome(rep, list(row), [row], [f"p={args.p}, D={args.D}: e={row['e']}, f={row['f']}, dim Sha[2] = 0"] + notes)


def cmd_genus(args, cfg: RunConfig) -> Outcome:
    n = twistlab.genus_two_torsion(args.D)
    disc = fundamental_discriminant(args.D)
    rep = _report(cfg, "genus", {"D": args.D}, {"fundamental_discriminant": disc, "class_group_2_torsion": n})
    return Outcome(rep, ["D", "disc", "cl_2"], [{"D": args.D, "disc": disc, "cl_2": n}], [f"#Cl[2] of Q(sqrt {args.D}) = {n}"])


def cmd_imquad(args, cfg: RunConfig) -> Outcome:
    res = twistlab.imquad_sha_bound(args.p, args.D, cfg.depth_cap)
    cert = res.two_adic_certificate
    results = {
        "field_selmer": res.order_report.to_dict(),
        "two_adic_class_2": {"verdict": cert.verdict, "revalidated": localfield.revalidate(cert)},
        "sha2_bound": res.bound.to_dict(),
    }
    rep = _report(cfg, "imquad", {"p": args.p, "D": args.D, "depth_cap": cfg.depth_cap}, results, [cert.to_dict()], res.bound.conditional_on)
    row = {"p": args.p, "D": args.D, "field_selmer_order": res.order_report.total_order, "order_bound": res.order_bound}
    text = [f"K = Q(sqrt {args.D}): #K(S,2) = {row['field_selmer_order']}, #Sha(E/K)[2] <= {res.order_bound}"]
    return Outcome(rep, list(row), [row], text)


def cmd_growth(args, cfg: RunConfig) -> Outcome:
    curve = cohomgrowth.GeneralCurve(args.a2, args.a)
    split = None
    if args.D is None:
        if not args.split:
            raise InvalidInput("give D or --split N")
        split = cohomgrowth.split_prime_search(curve, args.split, cfg.search_bound, cfg.strict_hcf)
        D = 1
        for q in split:
            D *= q
    else:
        D = args.D
    rank_twist = _rank_for(cfg, "twist", args.rank)
    if rank_twist is None:
        raise InvalidInput("growth needs the twist rank (--rank)")
    rank_base = _rank_for(cfg, "base", args.base_rank)
    g = cohomgrowth.g_lower_bound(curve, D, rank_twist, rank_base)
    inputs = {"a2": args.a2, "a4": args.a, "D": D, "rank_twist": rank_twist, "rank_base": rank_base}
    if split is not None:
        inputs.update(split=args.split, strict_hcf=cfg.strict_hcf, bound=cfg.search_bound)
    results = {"growth": g.to_dict(), "split_primes": split}
    rep = _report(cfg, "growth", inputs, results, conditional_on=["rank"])
    rows = [{"D": D, "prime": q, "local_order": k} for q, k in g.ramified_good_factors]
    text = [f"D = {D}: numerator {g.numerator}, g(D) >= {g.g_lower}, Sha growth >= {g.sha_growth_lower}"]
    return Outcome(rep, ["D", "prime", "local_order"], rows, text)


def cmd_cor_search(args, cfg: RunConfig) -> Outcome:
    curve = cohomgrowth.GeneralCurve(args.a, args.b)
    found = cohomgrowth.cor_prime_search(curve, args.count, cfg.search_bound)
    D = 1
    for tf in found:
        D *= tf.prime
    rank = _rank_for(cfg, "twist", args.rank)
    results = {"primes": [tf.to_dict() for tf in found], "D": D, "h": str(cohomgrowth.tamagawa_h(curve, D))}
    if rank is not None:
        results["sha2_order_lower"] = str(cohomgrowth.tamagawa_lower_bound(curve, D, rank))
    inputs = {"a": args.a, "b": args.b, "count": args.count, "bound": cfg.search_bound, "rank": rank}
    rep = _report(cfg, "cor-search", inputs, results, conditional_on=_conditional(rank, False))
    rows = [{"prime": tf.prime, "quotient": tf.quotient, "factor": str(tf.factor)} for tf in found]
    text = [f"primes {[tf.prime for tf in found]}, D = {D}, h(D) = {results['h']}"]
    if rank is not None:
        text.append(f"#Sha(E_D)[2] >= {results['sha2_order_lower']}")
    return Outcome(rep, ["prime", "quotient", "factor"], rows, text)


# --------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--depth-cap", type=int)
    p.add_argument("--bound", type=int, help="search bound")
    p.add_argument("--finite", action="store_true", default=None, help="assume Sha is finite")
    p.add_argument("--output", choices=("json", "csv", "text"))
    p.add_argument("--no-certs", action="store_true", default=None)
    p.add_argument("--jobs", type=int)
    p.add_argument("--strict-hcf", action="store_true", default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="isodescent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("hilbert", cmd_hilbert, "Hilbert symbol (a,b)_v")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("v", help="prime or inf")

    sp = add("local-solve", cmd_local_solve, "local solvability of d y^2 = d^2 + e x^4")
    sp.add_argument("d", type=int)
    sp.add_argument("e", type=int)
    sp.add_argument("v", nargs="?", default="2")
    sp.add_argument("--unramified-2ext", type=int, metavar="D", help="solve over Q2(sqrt D), D = 5 mod 8")

    sp = add("descend", cmd_descend, "2-isogeny descent on y^2 = x^3 + a x")
    sp.add_argument("a", type=int)
    sp.add_argument("--twist", type=int)
    sp.add_argument("--rank", type=int)
    sp.add_argument("--order4", action="store_true", help="assert an order-4 element of Sha(E/Q)")

    sp = add("twist-search", cmd_twist_search, "twists passing a gate")
    sp.add_argument("p", type=int)
    sp.add_argument("variant", choices=twistlab.VARIANTS)
    sp.add_argument("count", type=int)

    sp = add("verify", cmd_verify, "confirm Sha(E_D)[2] = 0 for a gated twist")
    sp.add_argument("p", type=int)
    sp.add_argument("D", type=int)
    sp.add_argument("--variant", choices=(twistlab.MAINLEMMA_1, twistlab.MAINLEMMA_2))
    sp.add_argument("--rank", type=int)
    sp.add_argument("--order4", action="store_true")

    sp = add("genus", cmd_genus, "#Cl[2] by genus theory")
    sp.add_argument("D", type=int)

    sp = add("imquad", cmd_imquad, "Sha[2] bound over Q(sqrt D)")
    sp.add_argument("p", type=int)
    sp.add_argument("D", type=int)

    sp = add("growth", cmd_growth, "cohomology growth lower bounds")
    sp.add_argument("a", type=int, help="coefficient of x")
    sp.add_argument("D", type=int, nargs="?")
    sp.add_argument("--a2", type=int, default=0, help="coefficient of x^2")
    sp.add_argument("--rank", type=int, help="rank of the twist")
    sp.add_argument("--base-rank", type=int)
    sp.add_argument("--split", type=int, metavar="N", help="build D from N split primes")

    sp = add("cor-search", cmd_cor_search, "primes with local quotient 4 and h(D)")
    sp.add_argument("a", type=int)
    sp.add_argument("b", type=int)
    sp.add_argument("count", type=int)
    sp.add_argument("--rank", type=int)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {
        "depth_cap": args.depth_cap,
        "search_bound": args.bound,
        "assume_finiteness": args.finite,
        "output": args.output,
        "parallelism": args.jobs,
        "certificates": None if args.no_certs is None else not args.no_certs,
        "strict_hcf": args.strict_hcf,
    }
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})


def render(out: Outcome, fmt: str) -> str:
    if fmt == "json":
        return canonical_json(out.report) + "\n"
    if fmt == "csv":
        return to_csv(out.columns, out.rows)
    return "\n".join(out.text) + "\n"


def run(argv=None) -> tuple[int, str, str]:
    """Execute a command; returns (exit code, stdout, stderr)."""
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        out = args.fn(args, cfg)
        return EXIT_OK, render(out, cfg.output), ""
    except ConditionFailure as exc:
        detail = canonical_json(exc.trace.to_dict()) if exc.trace is not None else ""
        return EXIT_INVALID, "", f"invalid input: {exc}\n{detail}\n"
    except UndecidedError as exc:
        return EXIT_UNDECIDED, "", f"undecided: {exc}\n"
    except (SearchExhausted, InconsistentResult) as exc:
        return EXIT_UNDECIDED, "", f"{type(exc).__name__}: {exc}\n"
    except ValueError as exc:
        return EXIT_INVALID, "", f"invalid input: {exc}\n"


def main(argv=None) -> int:
    code, stdout, stderr = run(argv)
    sys.stdout.write(stdout)
    sys.stderr.write(stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
