"""Nash equilibria and optimal pricing for linear-quadratic network games."""

from .errors import AssumptionError, ConvergenceError, DomainError, NotUniformError
from .game import (
    AssumptionReport,
    GameSpec,
    SolveReport,
    best_response_map,
    check_assumptions,
    normalize_game,
    payoff,
    solve_ne,
    spectral_radius,
)
from .graphs import GraphParams, pa_graph, ring_graph, star_graph
from .interaction import InteractionFunction, custom, linear, log1p, scaled_log
from .pricing import (
    PoiReport,
    PricingSolution,
    action_bounds,
    agnostic_baseline,
    grad_J,
    hessian_J,
    nu_bound,
    poi_lower_bound,
    price_of_information,
    revenue_J,
    solve_optimal_price,
    solve_uniform_price,
    uniform_agnostic,
    uniform_poi_lower_bound,
    uniform_reduce,
)

__version__ = "0.1.0"
