"""Command-line entry point: ``netpricing <command> ...``.

Results go to stdout as JSON (or CSV for sweeps with ``--format csv``).
Failures exit with status 1 and print ``{"error": ..., "message": ...}`` to
stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .errors import AssumptionError, ConvergenceError, DomainError
from .game import DEFAULT_MAX_ITER, DEFAULT_TOL, GameSpec, check_assumptions, normalize_game, solve_ne
from .pricing import (
    action_bounds,
    price_of_information,
    solve_optimal_price,
    solve_uniform_price,
    uniform_agnostic,
    uniform_poi_lower_bound,
)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if dataclasses.is_dataclass(obj):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and obj != obj:
        return None
    return obj


def _emit(doc, out_dir, name):
    text = json.dumps(_jsonable(doc), indent=2)
    print(text)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")


def _load_prices(path, n):
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict):
        doc = doc["p"]
    p = np.asarray(doc, dtype=float)
    return np.full(n, float(p)) if p.ndim == 0 else p


def cmd_validate(args):
    game = GameSpec.load(args.game)
    report = check_assumptions(game).to_dict()
    report["normalized"] = game.f.is_normalized
    report["audit"] = game.f.audit()
    _emit(report, args.out, "validate.json")


def cmd_solve_ne(args):
    game = GameSpec.load(args.game)
    p = _load_prices(args.prices, game.n)
    rep = solve_ne(game, p, tol=args.tol, max_iter=args.max_iter)
    _emit(rep, args.out, "ne.json")


def cmd_optimal_price(args):
    game = normalize_game(GameSpec.load(args.game))
    sol = solve_optimal_price(game, tol=args.tol, max_iter=args.max_iter)
    poi = price_of_information(game, tol=args.tol, max_iter=args.max_iter)
    _emit({"solution": sol.to_dict(), "poi": poi.to_dict()}, args.out, "optimal_price.json")


def cmd_uniform_price(args):
    game = normalize_game(GameSpec.load(args.game))
    p_bar, x_bar, revenue = solve_uniform_price(game)
    x0, j0 = uniform_agnostic(game)
    doc = {
        "p_bar_star": p_bar,
        "x_bar_star": x_bar,
        "revenue": revenue,
        "x_bar_0": x0,
        "j_agnostic": j0,
        "gap": revenue / j0 - 1.0,
        "bound": uniform_poi_lower_bound(game),
    }
    _emit(doc, args.out, "uniform_price.json")


def cmd_oracle(args):
    game = normalize_game(GameSpec.load(args.game))
    x_max = args.x_max
    if x_max is None:
        x_max = 1.1 * float(action_bounds(game)["upper_optimal"].max())
    x, J = ex.brute_force_optimal(game, x_max=x_max, coarse_step=args.step)
    _emit({"x": x, "J": J, "x_max": x_max, "step": args.step}, args.out, "oracle.json")


def cmd_sweep(args):
    doc = json.loads(Path(args.config).read_text())
    if args.seed is not None:
        doc.setdefault("graph", {})["seed"] = args.seed
    if args.tol != DEFAULT_TOL or "tol" not in doc:
        doc["tol"] = args.tol
    if args.max_iter != DEFAULT_MAX_ITER or "max_iter" not in doc:
        doc["max_iter"] = args.max_iter
    cfg = ex.ExperimentConfig.from_dict(doc)
    out_dir = args.out or cfg.output_dir
    result = ex.run(cfg)
    if cfg.experiment == "single":
        _emit(result.to_dict(), out_dir, "single.json")
        return
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if args.format == "csv":
            ex.emit_csv(result, out / "sweep.csv")
        else:
            ex.emit_json(result, out / "sweep.json")
        ex.emit_plot(result, out / "sweep.svg", kind="alpha" if cfg.experiment == "alpha_sweep" else "gbar")
    if args.format == "csv":
        ex.write_csv(result, sys.stdout)
    else:
        summary = {"rows": [dataclasses.asdict(r) for r in result]}
        if cfg.experiment == "alpha_sweep" and any(r.ok for r in result):
            at, value = ex.peak_inverse_poi(result)
            summary["peak"] = {"param": at, "inverse_poi": value}
        print(json.dumps(_jsonable(summary), indent=2))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netpricing", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    common.add_argument("--out", default=None, help="directory for result files")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--seed", type=int, default=None, help="override the graph seed")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the game's assumptions")
    p.add_argument("game")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve-ne", parents=[common], help="Nash equilibrium for given prices")
    p.add_argument("game")
    p.add_argument("--prices", required=True, help="JSON list, scalar, or {\"p\": [...]}")
    p.set_defaults(func=cmd_solve_ne)

    p = sub.add_parser("optimal-price", parents=[common], help="revenue-maximising prices")
    p.add_argument("game")
    p.set_defaults(func=cmd_optimal_price)

    p = sub.add_parser("uniform-price", parents=[common], help="best single price for a symmetric game")
    p.add_argument("game")
    p.set_defaults(func=cmd_uniform_price)

    p = sub.add_parser("sweep", parents=[common], help="run an experiment config")
    p.add_argument("config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", parents=[common], help="grid-search optimum (n <= 3)")
    p.add_argument("game")
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--step", type=float, default=1e-3)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (AssumptionError, ConvergenceError, DomainError, ValueError, OSError, KeyError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics:
            err["diagnostics"] = _jsonable(diagnostics)
        print(json.dumps(err), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
