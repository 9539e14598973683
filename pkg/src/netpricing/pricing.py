"""Optimal pricing through the single-level reduction.

Substituting p = a + G f(x) - B x turns the revenue p^T x^NE into

    J(x) = x^T (a + G f(x) - B x),

which is strongly concave on the non-negative orthant under diagonal
dominance, so a projected gradient ascent with step 1/nu finds the optimum.
All functions here expect a normalized game (f(0) = 0, alpha = 1).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import AssumptionError, ConvergenceError, DomainError, NotUniformError
from .game import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    GameSpec,
    check_assumptions,
    require_assumption3,
    solve_ne,
)

UNIFORM_ATOL = 1e-12
BISECT_XTOL = 1e-12


@dataclass(frozen=True)
class PricingSolution:
    x_star: np.ndarray
    p_star: np.ndarray
    revenue: float
    iterations: int
    step_size: float
    grad_norm: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["x_star"] = self.x_star.tolist()
        d["p_star"] = self.p_star.tolist()
        return d


@dataclass(frozen=True)
class PoiReport:
    """Price of information J(x*)/J(x0) with its lower bound on ``poi - 1``.

    ``lower_bound`` is NaN when it cannot be computed (undeclared curvature
    bound, or diagonal dominance failing).
    """

    j_star: float
    j_agnostic: float
    poi: float
    lower_bound: float
    nu: float
    rho: float
    uniform: bool = False

    @property
    def gap(self) -> float:
        return self.poi - 1.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class UniformGame:
    a_bar: float
    b_bar: float
    g_bar: float
    n: int


def _check_nonneg(game: GameSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (game.n,):
        raise ValueError(f"expected a vector of length {game.n}, got shape {x.shape}")
    if np.any(x < 0):
        raise DomainError("actions must be non-negative")
    return x


def _require_normalized(game: GameSpec) -> None:
    if not game.f.is_normalized:
        raise AssumptionError("interaction function must be normalized; see normalize_game")


def revenue_J(game: GameSpec, x) -> float:
    x = _check_nonneg(game, x)
    return float(x @ (game.a + game.G @ game.f(x) - 2.0 * game.b * x))


def revenue_J_batch(game: GameSpec, X: np.ndarray) -> np.ndarray:
    """J evaluated on each row of ``X`` (shape (m, n))."""
    F = game.f(X)
    return np.einsum("ki,ki->k", X, game.a + F @ game.G.T - 2.0 * game.b * X)


def grad_J(game: GameSpec, x) -> np.ndarray:
    x = _check_nonneg(game, x)
    G, f = game.G, game.f
    return game.a - 4.0 * game.b * x + G @ f(x) + f.deriv(x) * (G.T @ x)


def hessian_J(game: GameSpec, x) -> np.ndarray:
    x = _check_nonneg(game, x)
    G, f = game.G, game.f
    d1 = f.deriv(x)
    # (i, j) -> G_ij f'(x_j) + G_ji f'(x_i)
    H = G * d1[None, :] + G.T * d1[:, None]
    np.fill_diagonal(H, -4.0 * game.b + (G.T @ x) * f.second_deriv(x))
    return H


def _inverse_positive_solve(A: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise AssumptionError(f"{what} is singular") from exc
    if np.any(sol < 0):
        raise AssumptionError(f"{what} is not inverse-positive")
    return sol


def action_bounds(game: GameSpec) -> dict:
    """Elementwise bounds on the agnostic NE x0 and the optimum x*.

    Returns ``lower`` = B^-1 a / 2 (below both), ``upper_agnostic`` =
    (B - G)^-1 a / 2 and ``upper_optimal`` = (B - (G+G^T)/2)^-1 a / 2.
    """
    B = game.B
    G = game.G
    a = game.a
    return {
        "lower": 0.5 * a / (2.0 * game.b),
        "upper_agnostic": 0.5 * _inverse_positive_solve(B - G, a, "B - G"),
        "upper_optimal": 0.5 * _inverse_positive_solve(B - 0.5 * (G + G.T), a, "B - (G+G^T)/2"),
    }


def nu_bound(game: GameSpec) -> float:
    """Lipschitz constant of grad J on the box containing x0 and x*."""
    M = game.f.curvature_M
    if M is None:
        raise AssumptionError("smoothness bound needs a declared curvature bound M")
    bounds = action_bounds(game)
    x_max = np.maximum(bounds["upper_agnostic"], bounds["upper_optimal"])
    G = game.G
    return float(np.max(np.abs(4.0 * game.b + (G + G.T).sum(axis=1) + M * (G.T @ x_max))))


def solve_optimal_price(
    game: GameSpec,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    history: list | None = None,
) -> PricingSolution:
    """Projected gradient ascent x <- max{0, x + grad J(x) / nu} from x = B^-1 a / 2.

    Prices are recovered as p* = a + G f(x*) - B x*.  If ``history`` is a
    list, each iterate is appended to it.
    """
    _require_normalized(game)
    nu = nu_bound(game)
    gamma = 1.0 / nu
    x = 0.5 * game.a / (2.0 * game.b)
    step = np.inf
    converged = False
    for t in range(1, max_iter + 1):
        x_new = np.maximum(0.0, x + gamma * grad_J(game, x))
        step = float(np.max(np.abs(x_new - x)))
        x = x_new
        if history is not None:
            history.append(x.copy())
        if step <= tol:
            converged = True
            break
        if not np.isfinite(step):
            break
    if not converged:
        raise ConvergenceError(
            f"projected gradient did not converge in {max_iter} iterations (last step {step:.3e})",
            x=x,
            step=step,
            step_size=gamma,
        )
    if np.any(x <= 0):
        raise ConvergenceError(
            "optimal actions have a zero coordinate; the game likely violates the "
            "pricing assumptions",
            x=x,
            step_size=gamma,
        )
    p = game.a + game.G @ game.f(x) - 2.0 * game.b * x
    return PricingSolution(
        x_star=x,
        p_star=p,
        revenue=revenue_J(game, x),
        iterations=t,
        step_size=gamma,
        grad_norm=float(np.max(np.abs(grad_J(game, x)))),
    )


def agnostic_baseline(game: GameSpec, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Price a/2 (optimal when the network is ignored) and the revenue it earns.

    Returns ``(p0, x0, j0)`` with j0 = J(x0).
    """
    _require_normalized(game)
    p0 = game.a / 2.0
    x0 = solve_ne(game, p0, tol=tol, max_iter=max_iter).x
    j0 = revenue_J(game, x0)
    direct = float(p0 @ x0)
    if not np.isclose(j0, direct, rtol=1e-8, atol=1e-12):
        raise ConvergenceError(
            f"J(x0)={j0!r} differs from p0.x0={direct!r}; x0 is not interior", x=x0
        )
    return p0, x0, j0


def poi_lower_bound(game: GameSpec) -> float:
    """Lower bound on J(x*)/J(x0) - 1 for discriminatory pricing."""
    _require_normalized(game)
    rho = require_assumption3(game).rho
    nu = nu_bound(game)
    B_diag = 2.0 * game.b
    a, G = game.a, game.G
    x_low = 0.5 * a / B_diag
    numer = ((a / B_diag) @ (G @ game.f.h(x_low))) ** 2
    y = _inverse_positive_solve(game.B - G, a, "B - G")
    denom = (a @ y) * (y @ y)
    return float(4.0 * rho / nu**2 * numer / denom)


def uniform_reduce(game: GameSpec, atol: float = UNIFORM_ATOL) -> UniformGame:
    """Scalars (a_bar, b_bar, g_bar) of a symmetric game, or NotUniformError."""
    a, b, row = game.a, game.b, game.G.sum(axis=1)
    for name, vec, label in (("a", a, "a is not constant"),
                             ("b", b, "b is not constant"),
                             ("row_sums", row, "row sums of G differ")):
        if np.ptp(vec) > atol:
            raise NotUniformError(name, f"{label} (spread {np.ptp(vec):.3e})")
    return UniformGame(a_bar=float(a[0]), b_bar=float(b[0]), g_bar=float(row.mean()), n=game.n)


def _bisect_root(fn, lo: float, hi: float, what: str, xtol: float = BISECT_XTOL) -> float:
    # widen the proven bracket by 10% on each side, then re-check the sign change
    width = hi - lo
    lo = max(lo - 0.1 * width, 0.0) if width > 0 else lo * 0.9
    hi = hi + 0.1 * width if width > 0 else hi * 1.1
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise AssumptionError(f"no sign change for {what} on [{lo:.6g}, {hi:.6g}]")
    return float(bisect(fn, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500))


def _uniform_upper(u: UniformGame) -> float:
    denom = 4.0 * u.b_bar - 2.0 * u.g_bar
    if denom <= 0:
        raise AssumptionError("need 4 b_bar > 2 g_bar for the uniform game")
    return u.a_bar / denom


def solve_uniform_price(game: GameSpec, tol: float = BISECT_XTOL):
    """Best single price for a symmetric game.

    Returns ``(p_bar_star, x_bar_star, revenue)``.
    """
    _require_normalized(game)
    u = uniform_reduce(game)
    f = game.f

    def stationarity(x):
        return u.a_bar - 4.0 * u.b_bar * x + u.g_bar * (x * float(f.deriv(x)) + float(f(x)))

    x_star = _bisect_root(
        stationarity, 0.0, _uniform_upper(u), "the uniform optimality condition", xtol=tol
    )
    p_star = u.a_bar + u.g_bar * float(f(x_star)) - 2.0 * u.b_bar * x_star
    return p_star, x_star, u.n * x_star * p_star


def uniform_agnostic(game: GameSpec):
    """Uniform NE under price a_bar/2.  Returns ``(x_bar_0, j0)``."""
    _require_normalized(game)
    u = uniform_reduce(game)
    f = game.f

    def equilibrium(x):
        return u.a_bar - 4.0 * u.b_bar * x + 2.0 * u.g_bar * float(f(x))

    x0 = _bisect_root(
        equilibrium, u.a_bar / (4.0 * u.b_bar), _uniform_upper(u), "the uniform equilibrium"
    )
    return x0, 0.5 * u.n * u.a_bar * x0


def uniform_poi_lower_bound(game: GameSpec) -> float:
    """Lower bound on the uniform-pricing revenue gap."""
    u = uniform_reduce(game)
    h = float(game.f.h(u.a_bar / (4.0 * u.b_bar)))
    return float((u.g_bar / u.a_bar * (1.0 - u.g_bar / (2.0 * u.b_bar)) * h) ** 2)


def price_of_information(
    game: GameSpec,
    uniform: bool = False,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> PoiReport:
    """Compare optimal and network-agnostic revenue.

    In uniform mode both strategies are restricted to a single price and the
    scalar bound is reported.
    """
    _require_normalized(game)
    if uniform:
        _, _, j_star = solve_uniform_price(game)
        _, j0 = uniform_agnostic(game)
        bound = uniform_poi_lower_bound(game)
        report = require_assumption3(game)
        nu = nu_bound(game) if game.f.curvature_M is not None else float("nan")
        rho = report.rho
    else:
        j_star = solve_optimal_price(game, tol=tol, max_iter=max_iter).revenue
        _, _, j0 = agnostic_baseline(game, tol=tol, max_iter=max_iter)
        try:
            bound = poi_lower_bound(game)
            nu = nu_bound(game)
        except AssumptionError:
            bound = nu = float("nan")
        rho = check_assumptions(game).rho
    return PoiReport(
        j_star=j_star,
        j_agnostic=j0,
        poi=j_star / j0,
        lower_bound=bound,
        nu=nu,
        rho=rho,
        uniform=uniform,
    )
