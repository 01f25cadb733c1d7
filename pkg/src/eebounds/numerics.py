"""Scalar analysis kernel shared by all bound modules.

Bracketed root finding, unimodal maximization, the binary-entropy inverse
and overflow-safe log-domain combinatorics. Everything here is a pure
function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

__all__ = [
    "RealInterval",
    "SolverConfig",
    "BracketError",
    "ConvergenceError",
    "solve_bracketed",
    "maximize_unimodal",
    "binary_entropy",
    "entropy_inverse",
    "log2_binomial",
    "log_binomial",
    "log_sum",
]

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
LN2 = math.log(2.0)


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before reaching the requested tolerance."""


@dataclass(frozen=True)
class RealInterval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise ValueError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class SolverConfig:
    abs_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def solve_bracketed(
    f: Callable[[float], float],
    interval: RealInterval,
    cfg: SolverConfig = SolverConfig(),
) -> float:
    """Root of f on a sign-changing bracket.

    Bisection with a secant acceleration step; the secant proposal is only
    accepted when it falls strictly inside the current bracket, so the
    bisection contract (bracket width halves at least every other step)
    is preserved.
    """
    a, b = interval.lo, interval.hi
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"no sign change on [{a}, {b}]: f(lo)={fa}, f(hi)={fb}")

    for _ in range(cfg.max_iter):
        width = b - a
        # Secant proposal; fall back to the midpoint when degenerate.
        denom = fb - fa
        x = 0.5 * (a + b)
        if denom != 0.0:
            xs = b - fb * (b - a) / denom
            if a < xs < b:
                x = xs
        fx = f(x)
        if fx == 0.0 or (b - a) <= cfg.abs_tol:
            return x
        if math.copysign(1.0, fx) == math.copysign(1.0, fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
        # Guard against stagnating secant steps: force a bisection whenever
        # the bracket did not at least halve this iteration.
        if (b - a) > 0.5 * width:
            mid = 0.5 * (a + b)
            if not a < mid < b:
                return mid  # bracket at floating-point resolution
            fm = f(mid)
            if fm == 0.0:
                return mid
            if math.copysign(1.0, fm) == math.copysign(1.0, fa):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
        if (b - a) <= cfg.abs_tol or not a < 0.5 * (a + b) < b:
            return 0.5 * (a + b)
    raise ConvergenceError(
        f"max_iter={cfg.max_iter} exceeded, bracket [{a}, {b}] wider than {cfg.abs_tol}"
    )


def maximize_unimodal(
    f: Callable[[float], float],
    interval: RealInterval,
    cfg: SolverConfig = SolverConfig(),
) -> tuple[float, float]:
    """(argmax, max) of f on the interval.

    A 64-point guard scan locates the coarse peak first, golden-section then
    refines inside the surrounding grid cell. The scan makes the result
    robust when the caller cannot certify unimodality.
    """
    lo, hi = interval.lo, interval.hi
    xs = np.linspace(lo, hi, 64)
    vals = np.array([f(x) for x in xs])
    k = int(np.argmax(vals))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, len(xs) - 1)]
    if a == b:
        return float(xs[k]), float(vals[k])

    # Golden-section on [a, b].
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(cfg.max_iter):
        if (b - a) <= cfg.abs_tol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = f(x2)
        elif f1 > f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = f(x1)
        else:
            # Exact tie: a flat plateau around the peak. Shrink both ends so
            # the bracket stays centered instead of drifting to one edge.
            a, b = x1, x2
            x1 = b - _INV_GOLDEN * (b - a)
            x2 = a + _INV_GOLDEN * (b - a)
            f1, f2 = f(x1), f(x2)
    xm = 0.5 * (a + b)
    fm = f(xm)
    # The guard-scan maximum can still win for very flat or spiky functions.
    if vals[k] > fm:
        return float(xs[k]), float(vals[k])
    return xm, fm


def binary_entropy(x: float) -> float:
    """h(x) in bits."""
    if x < 0.0 or x > 1.0:
        raise ValueError(f"entropy argument must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def entropy_inverse(y: float, cfg: SolverConfig = SolverConfig(abs_tol=1e-15)) -> float:
    """The branch of h^{-1}(y) in [0, 1/2], h in bits."""
    if y < 0.0 or y > 1.0:
        raise ValueError(f"entropy_inverse argument must lie in [0, 1], got {y}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    return solve_bracketed(lambda x: binary_entropy(x) - y, RealInterval(0.0, 0.5), cfg)


def log2_binomial(n: int, k: int) -> float:
    """log2 C(n, k) via log-gamma."""
    if n < 0 or k < 0:
        raise ValueError(f"negative argument: n={n}, k={k}")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) / LN2


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k) via log-gamma."""
    return log2_binomial(n, k) * LN2


def log_sum(values: Sequence[float], base: float = 2.0) -> float:
    """log of a sum given in log domain, overflow-safe.

    Default base 2 matches the bit-domain bounds; pass base=math.e for the
    nats-domain spherical sums.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return -math.inf
    m = np.max(arr)
    if not math.isfinite(m):
        return float(m)
    lb = math.log(base)
    return float(m + np.log(np.sum(np.exp((arr - m) * lb))) / lb)
