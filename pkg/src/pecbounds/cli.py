"""Command-line front end with reproducible JSON output.

Subcommands: bound, inner, gap, member, reduce, simulate. Every report
carries a manifest (command, input hashes, seed, mode, version); identical
manifests yield byte-identical output. Exit codes: 0 success, 2 input
error, 3 model restriction, 4 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import __version__
from .bounds import (DEFAULT_TUPLE_CAP, inner_bound_system, inner_max_weighted,
                     outer_bound_systems, outer_max_weighted, outer_membership,
                     sum_rate_gap)
from .channels import DEFAULT_K_CAP, MultiInputPEC
from .errors import CapExceededError, InputError, ModelRestrictionError
from .jsonio import canonical_json, sha256_hex
from .rational import fmt_rational, parse_probability, parse_rational
from .reduction import CutSpec, RelayGraph, reduce_cut
from .scheme import (SchemeConfig, closed_form_rates, repair_fraction,
                     run_trials, two_subchannel_channel)


def _load_json(path: str):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return obj, sha256_hex(data)


def _load_channel(path: str, k_cap: int) -> tuple[MultiInputPEC, str]:
    obj, digest = _load_json(path)
    if isinstance(obj, dict) and "channel" in obj and "k" not in obj:
        obj = obj["channel"]             # accept reduce output directly
        if obj is None:
            raise InputError(f"{path}: reduced channel is empty, no bound to compute")
    try:
        return MultiInputPEC.from_obj(obj, k_cap=k_cap), digest
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _value(x, mode: str):
    if mode == "exact":
        return {"exact": fmt_rational(x), "decimal": float(x)}
    return {"exact": None, "decimal": float(x)}


def _rates_obj(rates: dict, mode: str):
    return {name: _value(val, mode) for name, val in sorted(rates.items())}


def _parse_list(text: str, what: str) -> list[Fraction]:
    try:
        return [parse_rational(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InputError(f"bad {what} list {text!r}: {exc}") from exc


def _manifest(args, inputs: dict) -> dict:
    return {
        "command": args.command,
        "inputs": inputs,
        "seed": args.seed,
        "mode": args.mode,
        "version": __version__,
    }


def _mixed_pair_params(channel: MultiInputPEC):
    """Recognize the two-subchannel mixed pair to report its repair fraction."""
    if channel.k != 2 or channel.m != 2:
        return None
    first, second = channel.subchannels
    if first.kind != "independent" or second.kind != "identical":
        return None
    if first.eps[0] != first.eps[1]:
        return None
    return first.eps[0], second.eps_all


def _repair_fraction_or_none(channel: MultiInputPEC, mode: str):
    params = _mixed_pair_params(channel)
    if params is None:
        return None
    try:
        return _value(repair_fraction(*params), mode)
    except ModelRestrictionError:
        return None


def cmd_bound(args) -> dict:
    channel, digest = _load_channel(args.channel, args.k_cap)
    mu = _parse_list(args.mu, "weight") if args.mu else [1] * channel.k
    result = outer_max_weighted(channel, mu, tuple_cap=args.tuple_cap, mode=args.mode)
    payload = {
        "objective": "weighted" if args.mu else "sum",
        "mu": [fmt_rational(parse_rational(x)) for x in mu],
        "value": _value(result.value, args.mode),
        "witness": _rates_obj(result.rates, args.mode),
        "tuples_evaluated": result.tuples_evaluated,
        "manifest": _manifest(args, {"channel": digest}),
    }
    if args.emit_lp:
        payload["systems"] = [s.to_obj() for s in
                              outer_bound_systems(channel, tuple_cap=args.tuple_cap)]
    return payload


def cmd_inner(args) -> dict:
    channel, digest = _load_channel(args.channel, args.k_cap)
    kind = "timeshare" if args.timeshare else "capacity"
    mu = _parse_list(args.mu, "weight") if args.mu else [1] * channel.k
    result = inner_max_weighted(channel, mu, kind=kind, mode=args.mode)
    payload = {
        "bound": "time-sharing" if args.timeshare else "capacity-sum",
        "objective": "weighted" if args.mu else "sum",
        "value": _value(result.value, args.mode),
        "witness": _rates_obj(result.rates, args.mode),
        "manifest": _manifest(args, {"channel": digest}),
    }
    if args.emit_lp:
        payload["system"] = inner_bound_system(channel, kind=kind).to_obj()
    return payload


def _gap_row(channel: MultiInputPEC, args) -> dict:
    result = sum_rate_gap(channel, tuple_cap=args.tuple_cap, mode=args.mode)
    return {
        "outer": _value(result.outer, args.mode),
        "inner": _value(result.inner, args.mode),
        "gap": _value(result.gap, args.mode),
        "repair_fraction": _repair_fraction_or_none(channel, args.mode),
    }


def cmd_gap(args):
    if args.sweep:
        if not (args.eps1 and args.eps2):
            raise InputError("--sweep needs --eps1 and --eps2 value lists")
        eps1 = [parse_probability(x) for x in _parse_list(args.eps1, "eps1")]
        eps2 = [parse_probability(x) for x in _parse_list(args.eps2, "eps2")]
        rows = []
        for e1 in eps1:
            for e2 in eps2:
                row = _gap_row(two_subchannel_channel(e1, e2), args)
                row["eps1"] = fmt_rational(e1)
                row["eps2"] = fmt_rational(e2)
                rows.append(row)
        if args.format == "csv":
            out = io.StringIO()
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["eps1", "eps2", "outer", "inner", "gap", "repair_fraction"])
            for row in rows:
                rf = row["repair_fraction"]
                writer.writerow([
                    row["eps1"], row["eps2"], row["outer"]["exact"],
                    row["inner"]["exact"], row["gap"]["exact"],
                    rf["exact"] if rf else "",
                ])
            return out.getvalue()
        return {"sweep": rows, "manifest": _manifest(args, {})}
    if not args.channel:
        raise InputError("gap needs a channel file (or --sweep)")
    channel, digest = _load_channel(args.channel, args.k_cap)
    payload = _gap_row(channel, args)
    payload["manifest"] = _manifest(args, {"channel": digest})
    if args.emit_lp:
        payload["outer_systems"] = [s.to_obj() for s in
                                    outer_bound_systems(channel, tuple_cap=args.tuple_cap)]
        payload["inner_system"] = inner_bound_system(channel).to_obj()
    return payload


def cmd_member(args) -> dict:
    channel, digest = _load_channel(args.channel, args.k_cap)
    rates = _parse_list(args.rates, "rate")
    systems = outer_bound_systems(channel, tuple_cap=args.tuple_cap)
    inside = outer_membership(channel, rates, tuple_cap=args.tuple_cap, mode=args.mode)
    payload = {
        "member": inside,
        "rates": [fmt_rational(parse_rational(r)) for r in rates],
        "tuples_evaluated": len(systems),
        "manifest": _manifest(args, {"channel": digest}),
    }
    if args.emit_lp:
        payload["systems"] = [s.to_obj() for s in systems]
    return payload


def cmd_reduce(args) -> dict:
    graph_obj, graph_digest = _load_json(args.graph)
    cut_obj, cut_digest = _load_json(args.cut)
    graph = RelayGraph.from_obj(graph_obj)
    cut = CutSpec.from_obj(cut_obj)
    result = reduce_cut(graph, cut)
    payload = result.to_obj()
    payload["manifest"] = _manifest(args, {"graph": graph_digest, "cut": cut_digest})
    return payload


def cmd_simulate(args) -> dict:
    config = SchemeConfig(
        eps1=parse_probability(args.eps1), eps2=parse_probability(args.eps2),
        n=args.n, q=args.q, seed=args.seed, trials=args.trials,
        rank_margin=args.margin, decode=args.decode)
    summary = run_trials(config, baseline=args.baseline)
    closed = closed_form_rates(config.eps1, config.eps2)
    target = closed.inner if args.baseline else closed.outer
    try:
        rf = fmt_rational(repair_fraction(config.eps1, config.eps2))
    except ModelRestrictionError:
        rf = None
    return {
        "scheme": "baseline" if args.baseline else "two-phase",
        "params": {"eps1": fmt_rational(config.eps1), "eps2": fmt_rational(config.eps2),
                   "n": config.n, "q": config.q, "trials": config.trials,
                   "rank_margin": config.rank_margin, "decode": config.decode},
        "mean_rate": summary.mean_rate,
        "stderr": summary.stderr,
        "closed_form": {"inner": fmt_rational(closed.inner),
                        "outer": fmt_rational(closed.outer),
                        "gap": fmt_rational(closed.gap),
                        "repair_fraction": rf},
        "relative_error": (abs(summary.mean_rate - float(target)) / float(target)
                           if target else None),
        "decode_failures": summary.decode_failures,
        "trials": [
            {"trial": r.trial, "slots": r.slots, "repair_slots": r.repair_slots,
             "p1": r.p1_size, "p2": r.p2_size, "decoded": list(r.decoded),
             "decode_ok": list(r.decode_ok), "sum_rate": float(r.sum_rate),
             "backend": r.backend}
            for r in summary.reports
        ],
        "manifest": _manifest(args, {}),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pecbounds",
        description="Rate-region bounds, cut reductions, and scheme simulation "
                    "for broadcast packet erasure channels with feedback")
    parser.add_argument("--mode", choices=["exact", "float"], default="exact",
                        help="arithmetic mode for bound computations")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--tuple-cap", type=int, default=DEFAULT_TUPLE_CAP,
                        help="max permutation tuples to enumerate")
    parser.add_argument("--k-cap", type=int, default=DEFAULT_K_CAP,
                        help="max destination count accepted in channel specs")
    parser.add_argument("--emit-lp", action="store_true",
                        help="include constraint systems in the output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="outer-bound weighted-rate optimum")
    p.add_argument("channel", help="channel spec JSON")
    p.add_argument("--mu", help="comma-separated weights (default: sum rate)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("inner", help="inner-bound weighted-rate optimum")
    p.add_argument("channel")
    p.add_argument("--mu")
    p.add_argument("--timeshare", action="store_true",
                   help="use the time-sharing inner bound (any K)")
    p.set_defaults(func=cmd_inner)

    p = sub.add_parser("gap", help="sum-rate outer/inner bounds and their gap")
    p.add_argument("channel", nargs="?")
    p.add_argument("--sweep", action="store_true",
                   help="sweep the two-subchannel mixed pair over eps grids")
    p.add_argument("--eps1", help="comma list of eps1 values for --sweep")
    p.add_argument("--eps2", help="comma list of eps2 values for --sweep")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("member", help="outer-bound membership of a rate tuple")
    p.add_argument("channel")
    p.add_argument("rates", help="comma-separated rate tuple")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("reduce", help="reduce a relay graph and cut to a channel")
    p.add_argument("graph", help="graph spec JSON")
    p.add_argument("cut", help="cut spec JSON")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("simulate", help="Monte-Carlo run of the repair scheme")
    p.add_argument("--eps1", required=True)
    p.add_argument("--eps2", required=True)
    p.add_argument("--n", type=int, required=True, help="direct-phase length in slots")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="random seed (equivalent to the global --seed)")
    p.add_argument("--q", type=int, default=256, help="field size")
    p.add_argument("--margin", type=int, default=8, help="extra combinations per destination")
    p.add_argument("--decode", choices=["auto", "matrix", "chain"], default="auto")
    p.add_argument("--baseline", action="store_true",
                   help="no coding across subchannels")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ModelRestrictionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(payload, str):
        sys.stdout.write(payload)
    else:
        sys.stdout.write(canonical_json(payload))
    return 0


if __name__ == "__main__":
    sys.exit(main())
