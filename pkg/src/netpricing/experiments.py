"""Parameter sweeps over graph families, a brute-force oracle, and output writers."""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import AssumptionError, ConvergenceError, DomainError
from .game import DEFAULT_MAX_ITER, DEFAULT_TOL, GameSpec, check_assumptions
from .graphs import GraphParams
from .interaction import from_dict
from .pricing import (
    agnostic_baseline,
    poi_lower_bound,
    price_of_information,
    revenue_J_batch,
    solve_optimal_price,
    solve_uniform_price,
    uniform_agnostic,
    uniform_poi_lower_bound,
)

log = logging.getLogger(__name__)

EXPERIMENTS = ("alpha_sweep", "gbar_sweep", "single")
MODES = ("discriminatory", "uniform")
CSV_HEADER = ["param", "j_star", "j_agnostic", "inverse_poi", "gap", "bound", "iterations", "status"]

# b may be tied to the sweep parameter, as in the ring experiment with b = g_bar
B_FOLLOWS_GBAR = "g_bar"


def default_grid(experiment: str) -> list[float]:
    if experiment == "alpha_sweep":
        return [k / 100 for k in range(101)]
    if experiment == "gbar_sweep":
        return [k / 100 for k in range(1, 101)]
    return []


@dataclass
class ExperimentConfig:
    experiment: str
    graph: GraphParams
    a_scalar: float = 1.0
    b_scalar: Union[float, str] = 1.0
    f_kind: Union[str, dict] = "log1p"
    mode: str = "discriminatory"
    sweep_grid: list = field(default_factory=list)
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if isinstance(self.b_scalar, str) and self.b_scalar != B_FOLLOWS_GBAR:
            raise ValueError(f"b_scalar must be a number or {B_FOLLOWS_GBAR!r}")
        if not self.sweep_grid:
            self.sweep_grid = default_grid(self.experiment)
        grid = np.asarray(self.sweep_grid, dtype=float)
        if np.any(np.diff(grid) <= 0):
            raise ValueError("sweep_grid must be strictly increasing")
        if self.experiment == "alpha_sweep":
            if self.graph.family not in ("star", "pa"):
                raise ValueError("alpha sweeps need a star or pa graph")
            if grid.size and (grid[0] < 0 or grid[-1] > 1):
                raise ValueError("alpha values must lie in [0, 1]")
        if self.experiment == "gbar_sweep":
            if self.graph.family != "ring":
                raise ValueError("g_bar sweeps need a ring graph")
            if grid.size and grid[0] < 0:
                raise ValueError("g_bar values must be non-negative")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        doc["graph"] = GraphParams.from_dict(doc["graph"])
        for short, long in (("a", "a_scalar"), ("b", "b_scalar"), ("f", "f_kind")):
            if short in doc:
                doc[long] = doc.pop(short)
        if "tolerances" in doc:
            doc.update(doc.pop("tolerances"))
        doc["experiment"] = doc["experiment"].lower()
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def game(self, param: Optional[float] = None) -> GameSpec:
        """The game at one sweep point (or the configured graph for ``single``)."""
        g = self.graph
        if self.experiment == "alpha_sweep" and param is not None:
            G = g.build(alpha=param)
        elif self.experiment == "gbar_sweep" and param is not None:
            G = g.build(g_bar=param)
        else:
            G = g.build()
        g_bar = param if self.experiment == "gbar_sweep" and param is not None else g.g_bar
        b = g_bar if self.b_scalar == B_FOLLOWS_GBAR else self.b_scalar
        n = g.n
        return GameSpec(a=np.full(n, float(self.a_scalar)), b=np.full(n, float(b)), G=G,
                        f=from_dict(self.f_kind))


@dataclass(frozen=True)
class SweepRow:
    param: float
    j_star: float
    j_agnostic: float
    inverse_poi: float
    gap: float
    bound: float
    iterations: int
    status: str = "ok"

    @classmethod
    def skipped(cls, param: float, status: str) -> "SweepRow":
        nan = float("nan")
        return cls(param, nan, nan, nan, nan, nan, 0, status)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _discriminatory_row(game: GameSpec, param: float, cfg: ExperimentConfig) -> SweepRow:
    sol = solve_optimal_price(game, tol=cfg.tol, max_iter=cfg.max_iter)
    _, _, j0 = agnostic_baseline(game, tol=cfg.tol, max_iter=cfg.max_iter)
    try:
        bound = poi_lower_bound(game)
    except AssumptionError:
        bound = float("nan")
    return SweepRow(
        param=param,
        j_star=sol.revenue,
        j_agnostic=j0,
        inverse_poi=j0 / sol.revenue,
        gap=sol.revenue / j0 - 1.0,
        bound=bound,
        iterations=sol.iterations,
    )


def _uniform_row(game: GameSpec, param: float) -> SweepRow:
    _, _, j_star = solve_uniform_price(game)
    _, j0 = uniform_agnostic(game)
    return SweepRow(
        param=param,
        j_star=j_star,
        j_agnostic=j0,
        inverse_poi=j0 / j_star,
        gap=j_star / j0 - 1.0,
        bound=uniform_poi_lower_bound(game),
        iterations=0,
    )


def sweep_point(cfg: ExperimentConfig, param: float) -> SweepRow:
    """Evaluate one grid point; failures are recorded in the row's status."""
    try:
        game = cfg.game(param)
    except ValueError as exc:
        return SweepRow.skipped(param, f"skipped: {exc}")
    if cfg.experiment == "gbar_sweep" and not check_assumptions(game).assumption3_ok:
        return SweepRow.skipped(param, "skipped: diagonal dominance fails")
    try:
        if cfg.experiment == "gbar_sweep" and cfg.mode == "uniform":
            return _uniform_row(game, param)
        return _discriminatory_row(game, param, cfg)
    except (ConvergenceError, AssumptionError) as exc:
        log.warning("sweep point %s failed: %s", param, exc)
        return SweepRow.skipped(param, f"failed: {exc}")


def run_alpha_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    if cfg.experiment != "alpha_sweep":
        raise ValueError("config is not an alpha sweep")
    return [sweep_point(cfg, float(al)) for al in cfg.sweep_grid]


def run_gbar_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    if cfg.experiment != "gbar_sweep":
        raise ValueError("config is not a g_bar sweep")
    return [sweep_point(cfg, float(g)) for g in cfg.sweep_grid]


def run_single(cfg: ExperimentConfig):
    return price_of_information(cfg.game(), uniform=cfg.mode == "uniform", tol=cfg.tol,
                                max_iter=cfg.max_iter)


def run(cfg: ExperimentConfig):
    if cfg.experiment == "alpha_sweep":
        return run_alpha_sweep(cfg)
    if cfg.experiment == "gbar_sweep":
        return run_gbar_sweep(cfg)
    return run_single(cfg)


def peak_inverse_poi(rows: list[SweepRow]) -> tuple[float, float]:
    """Location and value of the largest inverse PoI, refined by a parabola.

    The parabola goes through the best grid point and its two neighbours;
    at the grid edge the grid point itself is returned.
    """
    good = [r for r in rows if r.ok]
    if not good:
        raise ValueError("no successful rows")
    xs = np.array([r.param for r in good])
    ys = np.array([r.inverse_poi for r in good])
    k = int(np.argmax(ys))
    if k == 0 or k == len(good) - 1:
        return float(xs[k]), float(ys[k])
    x0, x1, x2 = xs[k - 1 : k + 2]
    y0, y1, y2 = ys[k - 1 : k + 2]
    # vertex of the interpolating parabola (non-uniform spacing allowed)
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    Bc = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if A >= 0:
        return float(x1), float(y1)
    xv = -Bc / (2 * A)
    C = y1 - A * x1**2 - Bc * x1
    return float(xv), float(A * xv**2 + Bc * xv + C)


def brute_force_optimal(
    game: GameSpec,
    x_max: float,
    coarse_step: float,
    refine_factor: int = 100,
    max_points: int = 2_000_000,
):
    """Maximise J over the grid [0, x_max]^n, then refine around the winner.

    Only for n <= 3.  Returns ``(x, J)``.
    """
    n = game.n
    if n > 3:
        raise DomainError(f"brute force is limited to n <= 3 (got n={n})")
    if x_max <= 0 or coarse_step <= 0:
        raise ValueError("x_max and coarse_step must be positive")

    def search(axes):
        best_val, best_x = -np.inf, None
        sizes = [len(ax) for ax in axes]
        rest = int(np.prod(sizes[1:], dtype=np.int64))
        block = max(1, max_points // max(rest, 1))
        tail = np.array(list(itertools.product(*axes[1:]))) if n > 1 else np.empty((1, 0))
        for start in range(0, sizes[0], block):
            head = axes[0][start : start + block]
            X = np.column_stack([np.repeat(head, len(tail)), np.tile(tail, (len(head), 1))])
            vals = revenue_J_batch(game, X)
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val, best_x = float(vals[k]), X[k].copy()
        return best_x, best_val

    coarse = np.arange(0.0, x_max + 0.5 * coarse_step, coarse_step)
    x, _ = search([coarse] * n)
    fine_step = coarse_step / refine_factor
    axes = [
        np.arange(max(xi - coarse_step, 0.0), min(xi + coarse_step, x_max) + 0.5 * fine_step, fine_step)
        for xi in x
    ]
    return search(axes)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    return "nan" if math.isnan(v) else format(v, ".17g")


def write_csv(rows: list[SweepRow], fh) -> None:
    if not rows:
        raise ValueError("no rows to write")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])


def emit_csv(rows: list[SweepRow], path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", newline="") as fh:
        write_csv(rows, fh)


def read_csv(path) -> list[SweepRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(SweepRow(
                param=float(rec["param"]),
                j_star=float(rec["j_star"]),
                j_agnostic=float(rec["j_agnostic"]),
                inverse_poi=float(rec["inverse_poi"]),
                gap=float(rec["gap"]),
                bound=float(rec["bound"]),
                iterations=int(rec["iterations"]),
                status=rec.get("status", "ok"),
            ))
    return rows


def emit_json(rows: list[SweepRow], path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    doc = [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(r).items()}
           for r in rows]
    Path(path).write_text(json.dumps(doc, indent=2))


def emit_plot(rows: list[SweepRow], path, kind: str = "alpha") -> tuple[float, float]:
    """Static SVG: inverse PoI against alpha, or gap and bound against g_bar.

    Returns the x-axis limits of the figure.
    """
    if not rows:
        raise ValueError("no rows to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    good = [r for r in rows if r.ok]
    xs = [r.param for r in good]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if kind == "alpha":
        ax.plot(xs, [r.inverse_poi for r in good], marker=".", lw=1)
        ax.set_xlim(0.0, 1.0)
        ax.set_xlabel("alpha")
        ax.set_ylabel("J(x0) / J(x*)")
    else:
        ax.plot(xs, [r.gap for r in good], label="revenue gap", lw=1.5)
        ax.plot(xs, [r.bound for r in good], label="lower bound", lw=1.5, ls="--")
        ax.set_xlabel("g_bar")
        ax.set_ylabel("J(x*) / J(x0) - 1")
        ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    xlim = tuple(float(v) for v in ax.get_xlim())
    plt.close(fig)
    return xlim
