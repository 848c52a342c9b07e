"""Command-line front end.

Exit codes: 0 ok, 1 a checked property failed, 2 validation error,
3 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .analysis import embed_three_player, is_convex, is_superadditive, rpsp_solve
from .core import core_element, flow_from_core, is_core, payment_from_flow
from .errors import RpsError, TooLarge, ValidationError
from .flow import build_profit_sharing_graph, max_flow, min_cut, required_flow_value
from .instance import (
    Coalition,
    GameTable,
    PaymentVector,
    RpsInstance,
    char_value,
    check_enumerable,
    game_table,
    grand_value,
    validate,
)
from .shapley import shapley_closed_form, shapley_oracle

EXIT_OK, EXIT_PROPERTY, EXIT_VALIDATION, EXIT_IO = 0, 1, 2, 3


class ParseError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None


def load_instance(path: str) -> RpsInstance:
    return validate(_load_json(path))


def load_game(path: str):
    """An :class:`RpsInstance` or a :class:`GameTable`, whichever the file holds."""
    raw = _load_json(path)
    if isinstance(raw, dict) and "values" in raw:
        return GameTable.from_dict(raw)
    return validate(raw)


def _parse_coalition(text: str) -> Coalition:
    try:
        return Coalition.parse(text)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ParseError(f"cannot parse coalition {text!r}") from None


class Report:
    def __init__(self, data, text: str, code: int = EXIT_OK):
        self.data = data
        self.text = text
        self.code = code


def _payments_report(p: PaymentVector) -> Report:
    strings = p.to_strings()
    text = "\n".join(f"player {i}: {x}" for i, x in enumerate(strings, start=1))
    return Report({"payments": strings}, text)


def cmd_value(args) -> Report:
    inst = load_instance(args.instance)
    S = _parse_coalition(args.coalition)
    v = char_value(inst, S)
    return Report({"coalition": S.sorted(), "value": v}, str(v))


def cmd_shapley(args) -> Report:
    inst = load_instance(args.instance)
    if args.method == "oracle":
        return _payments_report(shapley_oracle(inst, args.max_n))
    return _payments_report(shapley_closed_form(inst))


def cmd_core(args) -> Report:
    inst = load_instance(args.instance)
    _, net = max_flow(build_profit_sharing_graph(inst))
    if args.dot:
        try:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(net.to_dot())
        except OSError as exc:
            raise ParseError(f"cannot write {args.dot}: {exc.strerror}") from None
    return _payments_report(payment_from_flow(inst, net))


def _check_report(check) -> Report:
    data = check.to_dict()
    if check:
        return Report(data, "in core")
    text = f"violation: {data['property']} at {{{','.join(map(str, data['coalition']))}}}, gap {data['gap']}"
    return Report(data, text, EXIT_PROPERTY)


def cmd_check_core(args) -> Report:
    inst = load_instance(args.instance)
    try:
        p = PaymentVector.parse(args.payment)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None
    return _check_report(is_core(inst, p, args.max_n))


def cmd_solve(args) -> Report:
    inst = load_instance(args.instance)
    S, value = rpsp_solve(inst, args.max_n)
    members = S.sorted()
    return Report({"coalition": list(members), "value": value}, f"{{{','.join(map(str, members))}}} {value}")


def _as_table(game, max_n):
    return game if isinstance(game, GameTable) else game_table(game, max_n)


def cmd_convex(args) -> Report:
    g = _as_table(load_game(args.game), args.max_n)
    convex = is_convex(g, args.max_n)
    superadditive = is_superadditive(g, args.max_n)
    data = {"convex": convex.to_dict(), "superadditive": superadditive.to_dict()}
    lines = []
    for name, check in (("convex", convex), ("superadditive", superadditive)):
        if check:
            lines.append(f"{name}: yes")
        else:
            S, T = check.witness
            lines.append(f"{name}: no, S={{{','.join(map(str, S.sorted()))}}} T={{{','.join(map(str, T.sorted()))}}}")
    return Report(data, "\n".join(lines), EXIT_OK if convex and superadditive else EXIT_PROPERTY)


def cmd_embed3(args) -> Report:
    g = _as_table(load_game(args.game), args.max_n)
    inst = embed_three_player(g, args.max_n)
    data = inst.to_dict()
    return Report(data, json.dumps(data))


def verify_instance(inst: RpsInstance, max_n=None) -> list[tuple[str, bool]]:
    """Run the whole property suite on one instance."""
    check_enumerable(inst.n, max_n)
    results = []
    table = game_table(inst, max_n)
    results.append(("convex", bool(is_convex(table, max_n))))
    results.append(("superadditive", bool(is_superadditive(table, max_n))))

    phi = shapley_closed_form(inst)
    results.append(("shapley closed form equals oracle", phi == shapley_oracle(inst, max_n)))
    results.append(("shapley efficient", phi.total() == grand_value(inst)))
    results.append(("shapley in core", bool(is_core(inst, phi, max_n))))

    value, net = max_flow(build_profit_sharing_graph(inst))
    h = required_flow_value(inst)
    results.append(("max flow equals total weight", value == h and net.finite_edges_saturated()))
    results.append(("min cut equals max flow", min_cut(net).capacity == value))

    p = core_element(inst)
    results.append(("flow payment in core", bool(is_core(inst, p, max_n))))
    try:
        flow_from_core(inst, p, max_n=max_n)
        flow_from_core(inst, phi, max_n=max_n)
        round_trip = True
    except RpsError:
        round_trip = False
    results.append(("core vector to flow round trip", round_trip))

    _, best = rpsp_solve(inst, max_n)
    results.append(("optimizer at least max(0, v(N))", best >= max(0, grand_value(inst))))
    return results


def cmd_verify(args) -> Report:
    inst = load_instance(args.instance)
    results = verify_instance(inst, args.max_n)
    ok = all(passed for _, passed in results)
    data = {"passed": ok, "checks": [{"property": name, "passed": passed} for name, passed in results]}
    text = "\n".join(f"{'PASS' if passed else 'FAIL'}  {name}" for name, passed in results)
    return Report(data, text, EXIT_OK if ok else EXIT_PROPERTY)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument(
        "--max-n", type=int, default=None, help="enumeration limit for 2^n operations (default 20, or RPS_MAX_N)"
    )

    parser = argparse.ArgumentParser(prog="rpsgame", description="Reward-penalty-selection games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("value", parents=[common], help="value of one coalition")
    p.add_argument("instance")
    p.add_argument("--coalition", required=True, help='comma-separated players, "" for the empty coalition')
    p.set_defaults(func=cmd_value)

    p = sub.add_parser("shapley", parents=[common], help="Shapley value")
    p.add_argument("instance")
    p.add_argument("--method", choices=("closed", "oracle"), default="closed")
    p.set_defaults(func=cmd_shapley)

    p = sub.add_parser("core", parents=[common], help="a core element via max flow")
    p.add_argument("instance")
    p.add_argument("--dot", help="also write the solved network in DOT format")
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("check-core", parents=[common], help="test core membership of a payment vector")
    p.add_argument("instance")
    p.add_argument("--payment", required=True, help='comma-separated payments, e.g. "1,-1/2,3/2"')
    p.set_defaults(func=cmd_check_core)

    p = sub.add_parser("solve", parents=[common], help="brute-force best selection")
    p.add_argument("instance")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("convex", parents=[common], help="convexity and superadditivity of an instance or table")
    p.add_argument("game")
    p.set_defaults(func=cmd_convex)

    p = sub.add_parser("embed3", parents=[common], help="RPS instance for a convex 3-player table")
    p.add_argument("game")
    p.set_defaults(func=cmd_embed3)

    p = sub.add_parser("verify", parents=[common], help="run every property check on an instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, TooLarge) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RpsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    if args.format == "json":
        print(json.dumps(report.data))
    else:
        print(report.text)
    return report.code


if __name__ == "__main__":
    sys.exit(main())
