"""Interaction functions f: R+ -> R acting on neighbours' actions.

Each function carries its first and second derivatives together with the
analytic constants the solvers rely on: the Lipschitz constant ``alpha`` and
the curvature bound ``curvature_M`` (f'' >= -M on R+).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class InteractionFunction:
    """An evaluatable interaction function with declared constants.

    ``curvature_M`` may be ``None`` for custom functions; quantities that
    need it (the smoothness bound, the discriminatory PoI bound) then refuse
    to compute.  Arguments slightly below zero are clamped to zero.
    """

    kind: str
    f: ArrayFn = field(repr=False)
    df: ArrayFn = field(repr=False)
    d2f: ArrayFn = field(repr=False)
    lipschitz_alpha: float
    curvature_M: Optional[float]
    concave: bool = True
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.lipschitz_alpha > 0:
            raise ValueError("lipschitz_alpha must be positive")
        if self.curvature_M is not None and self.curvature_M < 0:
            raise ValueError("curvature_M must be non-negative")

    def eval(self, x):
        return self.f(np.maximum(np.asarray(x, dtype=float), 0.0))

    def deriv(self, x):
        return self.df(np.maximum(np.asarray(x, dtype=float), 0.0))

    def second_deriv(self, x):
        return self.d2f(np.maximum(np.asarray(x, dtype=float), 0.0))

    __call__ = eval

    def h(self, x):
        """Concavity gap f(x) - f'(x) x; zero for linear f, positive for strictly concave f."""
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return self.f(x) - self.df(x) * x

    @property
    def value_at_zero(self) -> float:
        return float(self.eval(0.0))

    @property
    def is_normalized(self) -> bool:
        return abs(self.value_at_zero) <= 1e-14 and abs(self.lipschitz_alpha - 1.0) <= 1e-14

    @property
    def strictly_concave(self) -> bool:
        return self.concave and bool(self.curvature_M) and self.curvature_M > 0

    def affine(self, scale: float = 1.0, offset: float = 0.0) -> "InteractionFunction":
        """Return x -> offset + scale * f(x)."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        f, df, d2f = self.f, self.df, self.d2f
        params = dict(self.params)
        params["scale"] = params.get("scale", 1.0) * scale
        params["offset"] = params.get("offset", 0.0) * scale + offset
        return InteractionFunction(
            kind=self.kind,
            f=lambda x: offset + scale * f(x),
            df=lambda x: scale * df(x),
            d2f=lambda x: scale * d2f(x),
            lipschitz_alpha=scale * self.lipschitz_alpha,
            curvature_M=None if self.curvature_M is None else scale * self.curvature_M,
            concave=self.concave,
            params=params,
        )

    def normalized(self) -> "InteractionFunction":
        """(f(x) - f(0)) / alpha, which has f(0) = 0 and Lipschitz constant 1."""
        if self.is_normalized:
            return self
        alpha, f0 = self.lipschitz_alpha, self.value_at_zero
        f, df, d2f = self.f, self.df, self.d2f
        params = dict(self.params)
        params["scale"] = params.get("scale", 1.0) / alpha
        params["offset"] = 0.0
        return InteractionFunction(
            kind=self.kind,
            f=lambda x: (f(x) - f0) / alpha,
            df=lambda x: df(x) / alpha,
            d2f=lambda x: d2f(x) / alpha,
            lipschitz_alpha=1.0,
            curvature_M=None if self.curvature_M is None else self.curvature_M / alpha,
            concave=self.concave,
            params=params,
        )

    def audit(self, x_max: float = 100.0, num: int = 10_000, rtol: float = 1e-6) -> list[str]:
        """Check the declared constants against dense sampling on [0, x_max].

        Returns a list of human-readable problems; empty means consistent.
        """
        x = np.linspace(0.0, x_max, num)
        issues = []
        slope = np.abs(self.deriv(x))
        if np.any(slope > self.lipschitz_alpha * (1 + rtol)):
            issues.append(
                f"|f'| reaches {slope.max():.6g} > declared alpha {self.lipschitz_alpha:.6g}"
            )
        curv = self.second_deriv(x)
        if self.curvature_M is not None and np.any(curv < -self.curvature_M * (1 + rtol) - rtol):
            issues.append(f"f'' reaches {curv.min():.6g} < -M = {-self.curvature_M:.6g}")
        if self.concave and np.any(curv > rtol):
            issues.append("declared concave but f'' > 0 somewhere")
        # the derivative callables must match the function they claim to differentiate
        step = 1e-6
        mid = x[1:-1]
        fd = (self.eval(mid + step) - self.eval(mid - step)) / (2 * step)
        if not np.allclose(fd, self.deriv(mid), rtol=1e-4, atol=1e-6):
            issues.append("f' disagrees with finite differences of f")
        sd = (self.deriv(mid + step) - self.deriv(mid - step)) / (2 * step)
        if not np.allclose(sd, self.second_deriv(mid), rtol=1e-4, atol=1e-5):
            issues.append("f'' disagrees with finite differences of f'")
        return issues

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}


def linear() -> InteractionFunction:
    return InteractionFunction(
        kind="linear",
        f=lambda x: x * 1.0,
        df=np.ones_like,
        d2f=np.zeros_like,
        lipschitz_alpha=1.0,
        curvature_M=0.0,
    )


def log1p() -> InteractionFunction:
    return InteractionFunction(
        kind="log1p",
        f=np.log1p,
        df=lambda x: 1.0 / (1.0 + x),
        d2f=lambda x: -1.0 / (1.0 + x) ** 2,
        lipschitz_alpha=1.0,
        curvature_M=1.0,
    )


def scaled_log(c: float = 10.0) -> InteractionFunction:
    """(1/c) ln(1 + c x): normalized, with curvature bound M = c."""
    if c <= 0:
        raise ValueError("c must be positive")
    return InteractionFunction(
        kind="scaled_log",
        f=lambda x: np.log1p(c * x) / c,
        df=lambda x: 1.0 / (1.0 + c * x),
        d2f=lambda x: -c / (1.0 + c * x) ** 2,
        lipschitz_alpha=1.0,
        curvature_M=float(c),
        params={"c": float(c)},
    )


def custom(
    f: ArrayFn,
    df: ArrayFn,
    d2f: ArrayFn,
    lipschitz_alpha: float,
    curvature_M: Optional[float] = None,
    concave: bool = True,
    name: str = "custom",
) -> InteractionFunction:
    """Wrap user-supplied callables; run ``audit()`` to sanity-check the constants."""
    return InteractionFunction(
        kind=name,
        f=f,
        df=df,
        d2f=d2f,
        lipschitz_alpha=float(lipschitz_alpha),
        curvature_M=curvature_M,
        concave=concave,
    )


_BUILTINS = {"linear": linear, "log1p": log1p, "scaled_log": scaled_log}

# short names used in configs and on the command line
ALIASES = {"f": "linear", "f1": "log1p", "f2": "scaled_log"}


def from_dict(spec) -> InteractionFunction:
    """Build a built-in function from ``"log1p"`` or ``{"kind": ..., "params": {...}}``.

    ``params`` may include ``scale`` and ``offset`` to describe an affine
    transform ``offset + scale * base(x)`` of the built-in.
    """
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = ALIASES.get(spec["kind"], spec["kind"])
    params = dict(spec.get("params") or {})
    if kind not in _BUILTINS:
        raise ValueError(f"unknown interaction function kind {spec['kind']!r}")
    scale = float(params.pop("scale", 1.0))
    offset = float(params.pop("offset", 0.0))
    fn = _BUILTINS[kind](**params)
    if scale != 1.0 or offset != 0.0:
        fn = fn.affine(scale=scale, offset=offset)
    return fn
