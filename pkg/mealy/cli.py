# mealy/cli.py
# -----------------------------------------------------------------------------
# PURPOSE: Command-line surface. Every subcommand is a thin adapter: resolve
#          inputs, call one library operation, serialise its report.
# CONTRACT:
#   - JSON (sorted keys) on stdout, logs on stderr, DOT / ASCII only to the
#     paths given by --dot / --ascii.
#   - Exit codes: 0 ok (false answers included), 64 usage, 65 input / data,
#     75 budget exhausted, 70 internal.
# -----------------------------------------------------------------------------
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Hashable, Optional, Sequence

from . import __version__
from .config import BUDGET_PROFILES, IS_DEV, MEALY_ENV, Budget, get_budget
from .contracting import (
    NotVerified,
    buchi_language,
    is_self_replicating,
    isolated_point,
    nucleus,
    singular_set,
    stable_automaton,
)
from .core import (
    MealyAutomaton,
    act,
    classify,
    dual,
    enrich,
    inverse,
    minimize,
    parse_letter_word,
    parse_state_word,
    union_identify_sinks,
)
from .corpus_data import TILESETS, corpus_names, resolve_automaton, tileset_path
from .errors import BudgetExhausted, InternalError, MealyError, ParseError, UsageError
from .export_orchestrator import run_export
from .group import (
    act_epw,
    edge_lambda_psi,
    fully_positive,
    is_identity,
    order,
    parse_epw,
    positive_completion,
    positive_relation_search,
    singular_witness,
    ts_condition,
)
from .helix import (
    SHAPE_MODES,
    build_helix,
    cycles_to_pairs,
    helix_shape,
    is_elementary_relation,
    non_elementary_commuting_pair,
    restricted_commuting_pair,
)
from .orbits import LABEL_MODES, orbit_epw, rooted_ball_isomorphic, schreier_level, upsilon
from .tilings import (
    MAXSYNC_VARIANTS,
    REFLECTION_AXES,
    WangTileset,
    automaton_from_tileset,
    can_tile_square,
    determinism,
    load_tileset,
    maxsync,
    periodic_tiling,
    reflection_close,
    synchronizing_word,
    tileset_from,
    tiling_status,
)

logger = logging.getLogger(__name__)

EXIT_CODES: Dict[str, int] = {
    "ok": 0,
    "false_result": 0,
    "usage_error": 64,
    "parse_error": 65,
    "internal_error": 70,
    "budget_exhausted": 75,
}


@dataclass
class CommandResult:
    status: str
    payload: Dict[str, Any]
    artifacts: Dict[str, bytes] = field(default_factory=dict)  # path -> rendered bytes
    output: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def _verdict(holds: bool, payload: Dict[str, Any], artifacts: Optional[Dict[str, bytes]] = None) -> CommandResult:
    return CommandResult("ok" if holds else "false_result", payload, artifacts or {})


def _vertex(v: Hashable) -> str:
    if isinstance(v, tuple) and len(v) == 2 and isinstance(v[0], int):
        return f"{v[0]}:{_vertex(v[1])}"
    if isinstance(v, tuple):
        return "".join(v) if all(len(a) == 1 for a in v) else " ".join(v)
    return str(v)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


# =========================================================
# 1) Handlers
# =========================================================
Handler = Callable[[argparse.Namespace, Budget], CommandResult]


def _automaton(args: argparse.Namespace) -> MealyAutomaton:
    return resolve_automaton(args.automaton)


def _artifact(args: argparse.Namespace, kind: str, value: Any, **kwargs) -> Dict[str, bytes]:
    out: Dict[str, bytes] = {}
    if getattr(args, "dot", None):
        out[args.dot] = run_export("dot", {"kind": kind, "value": value}, **kwargs)
    if getattr(args, "ascii", None):
        out[args.ascii] = run_export("ascii", {"kind": kind, "value": value}, **kwargs)
    return out


def cmd_classify(args, budget):
    M = _automaton(args)
    return CommandResult("ok", classify(M).to_json())


def _transform(fn: Callable[[MealyAutomaton], MealyAutomaton]) -> Handler:
    def handler(args, budget):
        M = fn(_automaton(args))
        return CommandResult("ok", M.to_json(), _artifact(args, "automaton", M))

    return handler


def cmd_act(args, budget):
    M = _automaton(args)
    u = parse_state_word(M, args.u)
    if "|" in args.v:
        xi = parse_epw(M, args.v)
        return CommandResult("ok", {"u": list(u), "point": xi.to_text(), "image": act_epw(M, u, xi).to_text()})
    v = parse_letter_word(M, args.v)
    out, res = act(M, u, v)
    return CommandResult("ok", {"u": list(u), "v": list(v), "output": list(out), "residual": list(res)})


def cmd_identity(args, budget):
    M = _automaton(args)
    u = parse_state_word(M, args.u)
    holds = is_identity(M, u, budget)
    return _verdict(holds, {"u": list(u), "identity": holds})


def cmd_order(args, budget):
    M = _automaton(args)
    u = parse_state_word(M, args.u)
    o = order(M, u, args.cap_order, budget)
    return CommandResult("ok", {"u": list(u), "order": o.to_json()})


def cmd_helix(args, budget):
    M = _automaton(args)
    H = build_helix(M, args.k, args.n, args.signed, letters_signed=args.letters_signed, budget=budget)
    payload = H.to_json()
    payload["pairs"] = [p.to_json() for p in cycles_to_pairs(H)]
    return CommandResult("ok", payload, _artifact(args, "helix", H))


def cmd_commuting(args, budget):
    M = _automaton(args)
    if args.restrict is not None:
        allowed = parse_state_word(M, args.restrict)
        report = restricted_commuting_pair(M, allowed, budget=budget)
    else:
        report = non_elementary_commuting_pair(M, signed=args.signed, budget=budget)
    return _verdict(report.found, report.to_json())


def cmd_nucleus(args, budget):
    M = _automaton(args)
    N = nucleus(M, budget)
    if isinstance(N, NotVerified):
        return _verdict(False, N.to_json())
    return CommandResult("ok", N.to_json(), _artifact(args, "automaton", N.to_automaton()))


def cmd_stable(args, budget):
    M = _automaton(args)
    N = nucleus(M, budget)
    if isinstance(N, NotVerified):
        return _verdict(False, N.to_json())
    P = stable_automaton(N)
    payload = {"automaton": P.to_json(), **buchi_language(P).to_json()}
    return CommandResult("ok", payload, _artifact(args, "stable", P))


def cmd_singular(args, budget):
    M = _automaton(args)
    return CommandResult("ok", singular_set(M, depth=args.levels, budget=budget).to_json())


def cmd_selfrep(args, budget):
    M = _automaton(args)
    verdict = is_self_replicating(M, args.levels, budget)
    return _verdict(verdict.holds, verdict.to_json())


def cmd_schreier(args, budget):
    M = _automaton(args)
    G = schreier_level(M, args.level, labels=args.labels, skip_sink=args.skip_sink, budget=budget)
    return CommandResult("ok", G.to_json(_vertex), _artifact(args, "graph", G, fmt=_vertex))


def cmd_orbit(args, budget):
    M = _automaton(args)
    xi = parse_epw(M, args.point)
    G = orbit_epw(M, xi, budget.nodes, radius=args.radius, labels=args.labels, skip_sink=args.skip_sink)
    payload = G.to_json(_vertex)
    cycle = G.positive_cycle()
    payload["positive_cycle"] = None if cycle is None else [[_vertex(s), k, _vertex(d)] for s, k, d in cycle]
    return CommandResult("ok", payload, _artifact(args, "graph", G, fmt=_vertex))


def cmd_upsilon(args, budget):
    M = _automaton(args)
    xi = parse_epw(M, args.point)
    ball = orbit_epw(M, xi, budget.nodes, radius=args.radius, labels=args.labels, skip_sink=args.skip_sink)
    U = upsilon(ball, xi, args.label)
    payload = U.to_json(_vertex)
    if args.level is not None:
        if args.vertex is None:
            raise UsageError("--level needs --vertex")
        S = schreier_level(M, args.level, labels=args.labels, skip_sink=args.skip_sink, budget=budget)
        w = parse_letter_word(M, args.vertex)
        radius = args.ball if args.ball is not None else args.radius - 1
        payload["comparison"] = {
            "level": args.level,
            "vertex": list(w),
            "radius": radius,
            "isomorphic": rooted_ball_isomorphic(S, w, U, U.root, radius),
        }
    return CommandResult("ok", payload, _artifact(args, "graph", U, fmt=_vertex))


def cmd_tileset(args, budget):
    M = _automaton(args)
    restrict = None if args.restrict is None else parse_state_word(M, args.restrict)
    T = tileset_from(M, reduced=args.reduced, restrict=restrict)
    if args.reflect:
        T = reflection_close(T, args.reflect)
    return CommandResult("ok", {**T.to_json(), "determinism": determinism(T).to_json()})


def _tiles(args: argparse.Namespace) -> WangTileset:
    arg = args.tiles
    if arg in TILESETS:
        return load_tileset(tileset_path(arg))
    if arg.endswith(".json") and os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as f:
            try:
                doc = json.load(f)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, line=exc.lineno, source=arg) from exc
        if "tiles" in doc:
            return WangTileset.from_json(doc)
    return tileset_from(resolve_automaton(arg), reduced=args.reduced)


def cmd_tile(args, budget):
    if args.periodic:
        w = periodic_tiling(resolve_automaton(args.tiles))
        return CommandResult("ok", w.to_json(), _artifact(args, "tiling", w))
    T = _tiles(args)
    if args.complete:
        M = automaton_from_tileset(T, sink_complete=True)
        return CommandResult("ok", M.to_json(), _artifact(args, "automaton", M))
    if args.m is not None:
        w = can_tile_square(T, args.m, budget)
        return _verdict(bool(w), w.to_json(), _artifact(args, "tiling", w))
    status = tiling_status(T, budget=budget)
    art = _artifact(args, "tiling", status.witness) if status.witness is not None else {}
    return CommandResult("ok", status.to_json(), art)


def cmd_sync(args, budget):
    M = _automaton(args)
    word = synchronizing_word(M)
    return _verdict(word is not None, {"word": None if word is None else list(word)})


def cmd_maxsync(args, budget):
    M = _automaton(args)
    holds = maxsync(M, args.m, args.variant, budget)
    return _verdict(holds, {"m": args.m, "variant": args.variant, "maxsync": holds})


def cmd_witness(args, budget):
    M = _automaton(args)
    xi = parse_epw(M, args.point)
    report = singular_witness(M, xi, budget=budget)
    return _verdict(report.found, report.to_json())


def cmd_positive(args, budget):
    M = _automaton(args)
    if args.complete is not None:
        report = positive_completion(M, parse_state_word(M, args.complete), args.len, budget)
    else:
        report = positive_relation_search(M, args.len, budget)
    return _verdict(report.found, report.to_json())


def cmd_fullpos(args, budget):
    M = _automaton(args)
    report = fully_positive(M, args.len, budget)
    return _verdict(bool(report), report.to_json())


def cmd_ts(args, budget):
    M = _automaton(args)
    report = ts_condition(M, parse_letter_word(M, args.u), budget.kmax, args.lmax, budget)
    return CommandResult("ok", report.to_json())


def cmd_elementary(args, budget):
    M = _automaton(args)
    u = parse_state_word(M, args.u)
    holds = is_elementary_relation(M, u, budget)
    return _verdict(holds, {"u": list(u), "elementary": holds})


def cmd_shape(args, budget):
    M = _automaton(args)
    verdict = helix_shape(M, args.k, args.n, args.mode, budget)
    return _verdict(verdict.holds, verdict.to_json())


def cmd_lambda(args, budget):
    M = _automaton(args)
    xi = parse_epw(M, args.point)
    return CommandResult("ok", edge_lambda_psi(M, xi, args.radius, budget).to_json())


def cmd_isolated(args, budget):
    M = _automaton(args)
    verdict = isolated_point(M, args.state, parse_letter_word(M, args.letters))
    return _verdict(verdict.holds, verdict.to_json())


def cmd_status(args, budget):
    return CommandResult(
        "ok",
        {
            "version": __version__,
            "env": MEALY_ENV,
            "budget": asdict(budget),
            "profiles": sorted(BUDGET_PROFILES),
            "corpus": corpus_names(),
            "tilesets": sorted(TILESETS),
        },
    )


# =========================================================
# 2) Parser
# =========================================================
def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("budgets")
    g.add_argument("--profile", default="", help="budget profile (desk, deep)")
    for name, help_ in (
        ("kmax", "longest state word searched"),
        ("nmax", "longest letter word searched"),
        ("mmax", "largest square side"),
        ("cap", "nucleus size / order cap"),
        ("nodes", "graph vertex cap"),
        ("depth", "longest nucleus representative"),
        ("closure", "section-closure words per identity test"),
    ):
        g.add_argument(f"--{name}", type=int, default=None, help=help_)
    o = p.add_argument_group("output")
    o.add_argument("-v", "--verbose", action="store_true")
    o.add_argument("-q", "--quiet", action="store_true")
    o.add_argument("-o", "--output", default=None, help="write the JSON report here instead of stdout")
    o.add_argument("--dot", default=None, metavar="PATH", help="write a DOT rendering")
    o.add_argument("--ascii", default=None, metavar="PATH", help="write an ASCII rendering")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="mealy", description="Mealy automaton groups: singular points, helices, tilings.")
    parser.add_argument("--version", action="version", version=f"mealy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, handler: Handler, help_: str, automaton: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        if automaton:
            p.add_argument("automaton", help="path to a .mealy/.json file or a bundled name")
        p.set_defaults(handler=handler)
        return p

    add("classify", cmd_classify, "invertibility, reversibility, sink accessibility")
    add("dual", _transform(dual), "dual automaton")
    add("inverse", _transform(inverse), "inverse automaton")
    add("enrich", _transform(enrich), "disjoint union with the inverse")
    add("union", _transform(union_identify_sinks), "union with the inverse, sinks merged")
    add("minimize", _transform(minimize), "minimal equivalent automaton")

    p = add("act", cmd_act, "action of a state word on a letter word or a boundary point")
    p.add_argument("u")
    p.add_argument("v", help="letter word, or 'pre|period' for a boundary point")

    p = add("identity", cmd_identity, "is the state word the identity")
    p.add_argument("u")

    p = add("order", cmd_order, "order of a state word")
    p.add_argument("u")
    p.add_argument("--cap-order", type=int, default=None)

    p = add("helix", cmd_helix, "helix graph H_{k,n} and its commuting pairs")
    p.add_argument("-k", type=int, default=1)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--signed", action="store_true")
    p.add_argument("--letters-signed", action="store_true")

    p = add("commuting", cmd_commuting, "bounded non-elementary commuting-pair search")
    p.add_argument("--signed", action="store_true")
    p.add_argument("--restrict", default=None, help="search only over these states")

    add("nucleus", cmd_nucleus, "nucleus of a contracting group")
    add("stable", cmd_stable, "stable automaton and its Büchi language")

    p = add("singular", cmd_singular, "description of the singular set")
    p.add_argument("--levels", type=int, default=None)

    p = add("selfrep", cmd_selfrep, "self-replication check")
    p.add_argument("--levels", type=int, default=None)

    p = add("schreier", cmd_schreier, "Schreier graph of a level")
    p.add_argument("-l", "--level", type=int, required=True)
    p.add_argument("--labels", choices=LABEL_MODES, default="signed")
    p.add_argument("--skip-sink", action="store_true")

    p = add("orbit", cmd_orbit, "orbital graph of a boundary point")
    p.add_argument("point", help="'pre|period'")
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--labels", choices=LABEL_MODES, default="signed")
    p.add_argument("--skip-sink", action="store_true")

    p = add("upsilon", cmd_upsilon, "two-copy loop surgery on an orbital ball")
    p.add_argument("point")
    p.add_argument("label")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--labels", choices=LABEL_MODES, default="positive")
    p.add_argument("--skip-sink", action="store_true")
    p.add_argument("--level", type=int, default=None, help="compare with this Schreier level")
    p.add_argument("--vertex", default=None)
    p.add_argument("--ball", type=int, default=None)

    p = add("tileset", cmd_tileset, "Wang tileset of an automaton")
    p.add_argument("--reduced", action="store_true")
    p.add_argument("--restrict", default=None)
    p.add_argument("--reflect", choices=sorted(REFLECTION_AXES), default=None)

    p = add("tile", cmd_tile, "tiling status, square search or sink completion", automaton=False)
    p.add_argument("tiles", help="tileset .json, bundled tileset name, or automaton")
    p.add_argument("-m", type=int, default=None, help="search one m x m square")
    p.add_argument("--reduced", action="store_true")
    p.add_argument("--periodic", action="store_true", help="periodic tiling of T(M)")
    p.add_argument("--complete", action="store_true", help="sink-completed automaton of the tileset")

    add("sync", cmd_sync, "synchronizing word")

    p = add("maxsync", cmd_maxsync, "MaxSync check at one size")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--variant", choices=MAXSYNC_VARIANTS, default="plain")

    p = add("witness", cmd_witness, "singularity witness at a boundary point")
    p.add_argument("point")

    p = add("positive", cmd_positive, "positive relation / positive inverse search")
    p.add_argument("--len", type=int, default=4)
    p.add_argument("--complete", default=None, help="state word to complete positively")

    p = add("fullpos", cmd_fullpos, "bounded fully-positive check")
    p.add_argument("--len", type=int, default=4)

    p = add("ts", cmd_ts, "torsion / stabilizer consistency for u^ω")
    p.add_argument("u", help="letter word")
    p.add_argument("--lmax", type=int, default=None)

    p = add("elementary", cmd_elementary, "is a relation elementary")
    p.add_argument("u")

    p = add("shape", cmd_shape, "singular-shape predicates of H_{k,n}")
    p.add_argument("-k", type=int, default=1)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--mode", choices=SHAPE_MODES, default="singular")

    p = add("lambda", cmd_lambda, "λ/ψ labels on an orbital ball")
    p.add_argument("point")
    p.add_argument("--radius", type=int, default=2)

    p = add("isolated", cmd_isolated, "isolated-point check for a state loop")
    p.add_argument("state")
    p.add_argument("letters")

    add("status", cmd_status, "environment, budgets and bundled corpus", automaton=False)
    return parser


# =========================================================
# 3) Entry points
# =========================================================
def _budget(args: argparse.Namespace) -> Budget:
    base = get_budget(args.profile)
    return base.replace(
        kmax=args.kmax, nmax=args.nmax, mmax=args.mmax, cap=args.cap,
        nodes=args.nodes, depth=args.depth, closure=args.closure,
    )


def _error(status: str, exc: BaseException) -> CommandResult:
    payload: Dict[str, Any] = {"error": str(exc), "type": type(exc).__name__}
    if isinstance(exc, BudgetExhausted):
        payload["budget"] = exc.budget
        payload["limit"] = exc.limit
    line = getattr(exc, "line", None)
    if line is not None:
        payload["line"] = line
    return CommandResult(status, payload)


def run(argv: Optional[Sequence[str]] = None) -> CommandResult:
    try:
        args = build_parser().parse_args(list(sys.argv[1:] if argv is None else argv))
        budget = _budget(args)
    except UsageError as exc:
        return _error("usage_error", exc)
    except ValueError as exc:
        return _error("usage_error", exc)

    logger.debug("running %s with %s", args.command, budget)
    try:
        result = args.handler(args, budget)
    except BudgetExhausted as exc:
        return _error("budget_exhausted", exc)
    except InternalError as exc:
        if IS_DEV:
            logger.exception("internal error in %s", args.command)
        return _error("internal_error", exc)
    except UsageError as exc:
        return _error("usage_error", exc)
    except MealyError as exc:
        return _error("parse_error", exc)
    except (ValueError, OSError) as exc:
        return _error("usage_error", exc)
    except Exception as exc:  # noqa: BLE001
        if IS_DEV:
            logger.exception("internal error in %s", args.command)
        return _error("internal_error", exc)
    result.payload.setdefault("command", args.command)
    result.output = args.output
    return result


def _configure_logging(argv: Sequence[str]) -> None:
    level = os.getenv("MEALY_LOG_LEVEL", "INFO").upper()
    if "-v" in argv or "--verbose" in argv:
        level = "DEBUG"
    elif "-q" in argv or "--quiet" in argv:
        level = "WARNING"
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _configure_logging(argv)
    result = run(argv)
    for path, blob in result.artifacts.items():
        with open(path, "wb") as f:
            f.write(blob)
        logger.info("wrote %s", path)
    text = json.dumps(result.payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if result.output:
        with open(result.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
