"""Network families used in the experiments.

Directed families are mixed with their transpose,
``G = alpha * G0 + (1 - alpha) * G0.T``, so ``alpha = 0.5`` is symmetric.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

FAMILIES = ("star", "pa", "ring")
DEFAULT_PA_M = 1
DEFAULT_SEED = 20240101


def mix(G0: np.ndarray, alpha: float) -> np.ndarray:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha * G0 + (1.0 - alpha) * G0.T


def star_graph(n: int, alpha: float) -> np.ndarray:
    """Agent 0 is the hub; at alpha = 1 it is influenced by every other agent."""
    if n < 2:
        raise ValueError("a star needs at least two agents")
    G0 = np.zeros((n, n))
    G0[0, 1:] = 1.0
    return mix(G0, alpha)


def ring_graph(n: int, g_bar: float) -> np.ndarray:
    """G[i, j] = g_bar iff i = j + 1 (mod n)."""
    if n < 2:
        raise ValueError("a ring needs at least two agents")
    if g_bar < 0:
        raise ValueError("g_bar must be non-negative")
    G = np.zeros((n, n))
    idx = np.arange(n)
    G[(idx + 1) % n, idx] = g_bar
    return G


def pa_edges(n: int, m: int, seed: int) -> np.ndarray:
    """Upper-triangular 0/1 matrix of a Barabasi-Albert graph.

    The first m + 1 nodes form a complete graph.  Each later node attaches to
    m distinct earlier nodes drawn with probability proportional to degree;
    repeated draws are rejected.  Entry (u, v) with u < v means the older
    node u is influenced by the newer node v.

    Draws come from numpy's PCG64 bit generator seeded with ``seed``.
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    E = np.zeros((n, n))
    # every edge endpoint appears once, so uniform draws are degree-proportional
    endpoints: list[int] = []
    for v in range(m + 1):
        for u in range(v):
            E[u, v] = 1.0
            endpoints += [u, v]
    for v in range(m + 1, n):
        targets: list[int] = []
        while len(targets) < m:
            u = endpoints[int(rng.integers(len(endpoints)))]
            if u not in targets:
                targets.append(u)
        for u in targets:
            E[u, v] = 1.0
            endpoints += [u, v]
    return E


def pa_graph(n: int, m: int = DEFAULT_PA_M, seed: int = DEFAULT_SEED, alpha: float = 1.0) -> np.ndarray:
    return mix(pa_edges(n, m, seed), alpha)


@dataclass(frozen=True)
class GraphParams:
    family: str
    n: int
    alpha: float = 1.0
    g_bar: float = 0.0
    m: int = DEFAULT_PA_M
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown graph family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 2:
            raise ValueError("graphs need n >= 2")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.g_bar < 0:
            raise ValueError("g_bar must be non-negative")
        if self.family == "pa" and not 1 <= self.m < self.n:
            raise ValueError("pa graphs need 1 <= m < n")

    def build(self, **overrides) -> np.ndarray:
        p = {**asdict(self), **overrides}
        if p["family"] == "star":
            return star_graph(p["n"], p["alpha"])
        if p["family"] == "ring":
            return ring_graph(p["n"], p["g_bar"])
        return pa_graph(p["n"], p["m"], p["seed"], p["alpha"])

    @classmethod
    def from_dict(cls, doc: dict) -> "GraphParams":
        key = doc["family"].lower().replace("_", "").replace("-", "")
        family = {"preferentialattachment": "pa"}.get(key, key)
        return cls(**{**doc, "family": family})

    def to_dict(self) -> dict:
        return asdict(self)
