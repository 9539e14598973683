"""Linear-quadratic network games and their Nash equilibria.

Agent i chooses x_i >= 0 to maximise

    u_i = (sum_j G_ij f(x_j) + a_i - p_i) x_i - b_i x_i^2,

whose best response is T_i(x) = max{0, (sum_j G_ij f(x_j) + a_i - p_i) / (2 b_i)}.
The equilibrium is the fixed point of T, found here by plain iteration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AssumptionError, ConvergenceError, DomainError
from .interaction import InteractionFunction, from_dict

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class GameSpec:
    """Game(a, b, G, f) without the price vector.

    ``G[i, j]`` is the influence agent j exerts on agent i.  Arrays are
    copied and made read-only on construction.
    """

    a: np.ndarray
    b: np.ndarray
    G: np.ndarray
    f: InteractionFunction

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        b = np.array(self.b, dtype=float).reshape(-1)
        G = np.array(self.G, dtype=float)
        n = a.size
        if n == 0:
            raise ValueError("game needs at least one agent")
        if b.shape != (n,) or G.shape != (n, n):
            raise ValueError(f"shape mismatch: a {a.shape}, b {b.shape}, G {G.shape}")
        if np.any(a <= 0) or np.any(b <= 0):
            raise ValueError("a and b must be strictly positive")
        if np.any(G < 0):
            raise ValueError("G must be entrywise non-negative")
        if np.any(np.diag(G) != 0):
            raise ValueError("G must have a zero diagonal")
        for name, arr in (("a", a), ("b", b), ("G", G)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def B(self) -> np.ndarray:
        """2 Diag(b)."""
        return np.diag(2.0 * self.b)

    def replace(self, **changes) -> "GameSpec":
        fields = {"a": self.a, "b": self.b, "G": self.G, "f": self.f}
        fields.update(changes)
        return GameSpec(**fields)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "G": self.G.tolist(),
            "f": self.f.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GameSpec":
        game = cls(a=doc["a"], b=doc["b"], G=doc["G"], f=from_dict(doc["f"]))
        if "n" in doc and int(doc["n"]) != game.n:
            raise ValueError(f"declared n={doc['n']} but vectors have length {game.n}")
        return game

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> "GameSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class SolveReport:
    x: np.ndarray
    iterations: int
    final_residual: float
    converged: bool


@dataclass(frozen=True)
class AssumptionReport:
    """Computed quantities behind the existence/uniqueness and concavity conditions.

    ``rho`` and ``rho_prime`` are the largest values for which
    B - (G+G^T)/2 - rho I and B - G - rho' I are diagonally dominant.
    ``linf_contraction`` is alpha * ||B^-1 G||_inf, the per-step contraction
    modulus of the best-response map in the max norm.
    """

    contraction_factor: float
    linf_contraction: float
    rho: float
    rho_prime: float
    assumption1_ok: bool
    assumption3_ok: bool

    def to_dict(self) -> dict:
        return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v))
                for k, v in self.__dict__.items()}


def _as_actions(game: GameSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (game.n,):
        raise ValueError(f"expected a vector of length {game.n}, got shape {x.shape}")
    return x


def _as_prices(game: GameSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim == 0:
        p = np.full(game.n, float(p))
    if p.shape != (game.n,):
        raise ValueError(f"expected a price vector of length {game.n}, got shape {p.shape}")
    return p


def payoff(game: GameSpec, i: int, x, p_i: float) -> float:
    """Utility of agent ``i`` at profile ``x`` when charged ``p_i``."""
    if not 0 <= i < game.n:
        raise DomainError(f"agent index {i} out of range for n={game.n}")
    x = _as_actions(game, x)
    if np.any(x < 0):
        raise DomainError("actions must be non-negative")
    peer = game.G[i] @ game.f(x)
    return float((peer + game.a[i] - p_i) * x[i] - game.b[i] * x[i] ** 2)


def best_response_map(game: GameSpec, x, p) -> np.ndarray:
    x = _as_actions(game, x)
    p = _as_prices(game, p)
    return np.maximum(0.0, (game.G @ game.f(x) + game.a - p) / (2.0 * game.b))


def solve_ne(
    game: GameSpec,
    p,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    x0=None,
    history: list | None = None,
) -> SolveReport:
    """Iterate x <- T(x) until the max-norm change drops to ``tol``.

    Starts from zero unless ``x0`` is given.  If ``history`` is a list, the
    max-norm step length of every iteration is appended to it.

    Raises ConvergenceError if ``max_iter`` is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = _as_prices(game, p)
    x = np.zeros(game.n) if x0 is None else np.maximum(_as_actions(game, x0), 0.0)
    residual = np.inf
    for k in range(1, max_iter + 1):
        x_new = best_response_map(game, x, p)
        residual = float(np.max(np.abs(x_new - x)))
        x = x_new
        if history is not None:
            history.append(residual)
        if residual <= tol:
            return SolveReport(x=x, iterations=k, final_residual=residual, converged=True)
        if not np.isfinite(residual):
            break
    raise ConvergenceError(
        f"best-response iteration did not converge in {max_iter} iterations "
        f"(last step {residual:.3e}); check 2 b_i > alpha * sum_j G_ij",
        x=x,
        iterations=max_iter,
        final_residual=residual,
    )


def spectral_radius(M, rtol: float = 1e-14, max_squarings: int = 200) -> float:
    """Perron root of a non-negative matrix.

    Uses the Gelfand formula rho = lim ||M^k||^(1/k) evaluated along
    k = 2^s by repeated squaring with renormalisation.  Products of
    non-negative matrices suffer no cancellation, and unlike plain power
    iteration this handles nilpotent and periodic (bipartite) matrices.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("spectral_radius needs a square matrix")
    if np.any(M < 0):
        raise DomainError("spectral_radius expects a non-negative matrix")
    norm = np.abs(M).sum(axis=1).max()
    if norm == 0.0:
        return 0.0
    A = M / norm
    log_scale = np.log(norm)  # log ||M^(2^s)|| / 2^s
    estimate = norm
    for s in range(1, max_squarings + 1):
        A = A @ A
        norm = A.sum(axis=1).max()
        if norm == 0.0:
            return 0.0
        A /= norm
        log_scale += np.log(norm) / 2.0**s
        new_estimate = float(np.exp(log_scale))
        if abs(new_estimate - estimate) <= rtol * new_estimate and s >= 8:
            return new_estimate
        estimate = new_estimate
    raise ConvergenceError(
        "spectral radius estimate did not settle", estimate=estimate, squarings=max_squarings
    )


def check_assumptions(game: GameSpec) -> AssumptionReport:
    alpha = game.f.lipschitz_alpha
    G, b = game.G, game.b
    row = G.sum(axis=1)
    col = G.sum(axis=0)
    scaled = G / (2.0 * b)[:, None]
    contraction = alpha * spectral_radius(scaled)
    linf = alpha * float(scaled.sum(axis=1).max())
    rho = float(np.min(2.0 * b - 0.5 * (row + col)))
    rho_prime = float(np.min(2.0 * b - row))
    ok1 = bool(np.all(2.0 * b > alpha * row))
    report = AssumptionReport(
        contraction_factor=contraction,
        linf_contraction=linf,
        rho=rho,
        rho_prime=rho_prime,
        assumption1_ok=ok1,
        assumption3_ok=rho > 0 and rho_prime > 0,
    )
    if ok1 and not contraction < 1.0:
        raise AssertionError(f"contraction factor {contraction} >= 1 although 2 b_i > alpha * sum_j G_ij")
    return report


def require_assumption3(game: GameSpec) -> AssumptionReport:
    report = check_assumptions(game)
    if not report.assumption3_ok:
        raise AssumptionError(
            f"diagonal dominance fails: rho={report.rho:.6g}, rho'={report.rho_prime:.6g}"
        )
    return report


def normalize_game(game: GameSpec) -> GameSpec:
    """Equivalent game with f(0) = 0 and unit Lipschitz constant.

    a_hat = a + f(0) G 1, G_hat = alpha G, f_hat = (f - f(0)) / alpha.
    """
    f = game.f
    if f.is_normalized:
        return game
    alpha = f.lipschitz_alpha
    return GameSpec(
        a=game.a + f.value_at_zero * game.G.sum(axis=1),
        b=game.b,
        G=alpha * game.G,
        f=f.normalized(),
    )
