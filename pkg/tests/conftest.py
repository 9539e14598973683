import numpy as np
import pytest

from netpricing import GameSpec, linear, log1p, scaled_log

ACCEPTANCE_LINES: list[str] = []


def random_game(rng, n=None, f=None, margin=None, density=0.6):
    """Random game satisfying strict diagonal dominance (hence a contracting best response).

    b_i is set so that 2 b_i exceeds both the row sum and the average of row
    and column sums by a random margin.
    """
    n = int(rng.integers(2, 11)) if n is None else n
    G = rng.uniform(0.0, 1.0, (n, n)) * (rng.uniform(size=(n, n)) < density)
    np.fill_diagonal(G, 0.0)
    row, col = G.sum(axis=1), G.sum(axis=0)
    margin = rng.uniform(0.1, 1.0, n) if margin is None else margin
    b = np.maximum(0.5 * (np.maximum(row, 0.5 * (row + col)) + margin), 0.05)
    a = rng.uniform(0.5, 2.0, n)
    if f is None:
        f = [linear, log1p, lambda: scaled_log(float(rng.choice([2.0, 10.0])))][rng.integers(3)]()
    return GameSpec(a=a, b=b, G=G, f=f)


def random_concave_game(rng, n=None, **kw):
    f = log1p() if rng.uniform() < 0.5 else scaled_log(float(rng.uniform(1.0, 10.0)))
    return random_game(rng, n=n, f=f, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sym2_log1p(G01=1.0, a=1.0, b=1.0):
    G = np.array([[0.0, G01], [G01, 0.0]])
    return GameSpec(a=[a, a], b=[b, b], G=G, f=log1p())


def bisect_scalar(fn, lo, hi, tol=1e-14):
    """Plain bisection used as an independent scalar oracle in tests."""
    f_lo = fn(lo)
    assert f_lo * fn(hi) < 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) * f_lo > 0:
            lo, f_lo = mid, fn(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
