"""Asymptotic exponents for binary linear codes on the BSC under margin decoding.

All quantities in this module are in bits (log base 2) and relative weights.
Covers the classical random-coding exponent, the Blokh-Zyablov style
error/erasure bounds, the improved trade-off pair M+/M-, bounds for a
specific weight profile and for bounded-distance decoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import (
    RealInterval,
    binary_entropy as h,
    entropy_inverse,
    log2_binomial,
    maximize_unimodal,
)

__all__ = [
    "BscChannel",
    "BinaryBoundValue",
    "BinaryLandmarks",
    "WeightProfile",
    "entropy_family",
    "gallager_exponent",
    "landmarks",
    "bz_bounds",
    "tradeoff_bounds",
    "nontrivial_rate_threshold",
    "specific_code_bound",
    "bounded_distance_exponent",
    "typical_error_geometry",
]


@dataclass(frozen=True)
class BscChannel:
    """Binary symmetric channel with crossover probability p in (0, 1/2)."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 0.5:
            raise ValueError(f"crossover probability must lie in (0, 1/2), got {self.p}")

    @property
    def nu(self) -> float:
        """log2((1-p)/p)."""
        return math.log2((1.0 - self.p) / self.p)

    @property
    def u(self) -> float:
        """p(1-p)."""
        return self.p * (1.0 - self.p)

    @property
    def capacity(self) -> float:
        return 1.0 - h(self.p)


@dataclass(frozen=True)
class BinaryBoundValue:
    value: float
    regime: str  # one of "a", "b", "c"
    valid: bool = True
    diagnostics: Optional[dict] = None


@dataclass(frozen=True)
class BinaryLandmarks:
    rho0: float
    omega0: float
    R_e: float
    R_c: float
    rho0_plus: float
    rho0_minus: float
    omega0_tau: float


def entropy_family(x: float, y: float) -> tuple[float, float, float]:
    """(h(x), T(x, y), D(x || y)) in bits.

    T(x, y) = -x log2 y - (1-x) log2(1-y). Degenerate y in {0, 1} yields an
    explicit infinite T/D when the corresponding weight is nonzero.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    hx = h(x)
    if y <= 0.0 or y >= 1.0:
        if (y <= 0.0 and x > 0.0) or (y >= 1.0 and x < 1.0):
            return hx, math.inf, math.inf
        t = 0.0
        return hx, t, t - hx
    t = -x * math.log2(y) - (1.0 - x) * math.log2(1.0 - y)
    return hx, t, t - hx


def _T(x: float, y: float) -> float:
    return entropy_family(x, y)[1]


def _D(x: float, y: float) -> float:
    return entropy_family(x, y)[2]


def delta_gv(R: float) -> float:
    """Relative Gilbert-Varshamov distance h^{-1}(1 - R)."""
    if not 0.0 <= R <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {R}")
    return entropy_inverse(1.0 - R)


def landmarks(ch: BscChannel, tau: float = 0.0) -> BinaryLandmarks:
    """Saddle weights and rate breakpoints of the binary bounds."""
    if not 0.0 <= tau < 0.5:
        raise ValueError(f"tau must lie in [0, 1/2), got {tau}")
    p, u = ch.p, ch.u
    sp = math.sqrt(p)
    rho0 = sp / (sp + math.sqrt(1.0 - p))
    omega0 = 2.0 * rho0 * (1.0 - rho0)
    root = math.sqrt(u + tau * tau * (1.0 - 2.0 * p) ** 2)
    rho0_plus = (root - p * (1.0 + 2.0 * tau) + tau) / (1.0 - 2.0 * p)
    rho0_minus = (root - p * (1.0 - 2.0 * tau) - tau) / (1.0 - 2.0 * p)
    omega0_tau = 2.0 * (math.sqrt(u + tau * tau * (1.0 - 4.0 * u)) - 2.0 * u) / (1.0 - 4.0 * u)
    return BinaryLandmarks(
        rho0=rho0,
        omega0=omega0,
        R_e=1.0 - h(omega0),
        R_c=1.0 - h(rho0),
        rho0_plus=rho0_plus,
        rho0_minus=rho0_minus,
        omega0_tau=omega0_tau,
    )


def gallager_exponent(R: float, ch: BscChannel) -> BinaryBoundValue:
    """Classical random-coding / expurgated lower bound E0(R, p), in bits."""
    lm = landmarks(ch, 0.0)
    if R > ch.capacity + 1e-12:
        return BinaryBoundValue(0.0, "c", valid=False)
    R = min(R, ch.capacity)
    dgv = delta_gv(R)
    if R <= lm.R_e:
        value = -dgv * math.log2(2.0 * math.sqrt(ch.u))
        regime = "a"
    elif R <= lm.R_c:
        value = _D(lm.rho0, ch.p) + lm.R_c - R
        regime = "b"
    else:
        value = _D(dgv, ch.p)
        regime = "c"
    return BinaryBoundValue(value, regime, diagnostics={"delta_gv": dgv})


def bz_bounds(
    R: float, ch: BscChannel, tau: float
) -> tuple[BinaryBoundValue, BinaryBoundValue]:
    """Linear-in-tau error/erasure bounds (Ee_lb, Ex_lb)."""
    if tau < 0.0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    base = gallager_exponent(R, ch)
    if not base.valid:
        return (
            BinaryBoundValue(0.0, base.regime, valid=False),
            BinaryBoundValue(0.0, base.regime, valid=False),
        )
    lm = landmarks(ch, 0.0)
    if R < lm.R_c:
        shift = ch.nu * tau
    else:
        dgv = delta_gv(R)
        # d/d(delta) D(delta || p) in bits.
        dprime = math.log2(dgv * (1.0 - ch.p) / (ch.p * (1.0 - dgv)))
        shift = 2.0 * tau * dprime
    ee = BinaryBoundValue(base.value + shift, base.regime)
    ex_val = base.value - shift
    if ex_val < 0.0:
        ex = BinaryBoundValue(0.0, base.regime, valid=False)
    else:
        ex = BinaryBoundValue(ex_val, base.regime)
    return ee, ex


def _tradeoff_one(R: float, ch: BscChannel, tau: float, sign: int) -> BinaryBoundValue:
    """M+ (sign=+1, undetected error) or M- (sign=-1, erasure)."""
    p, u, nu = ch.p, ch.u, ch.nu
    lm = landmarks(ch, tau)
    rho0s = lm.rho0_plus if sign > 0 else lm.rho0_minus
    omega0 = lm.omega0_tau

    valid = True
    if sign > 0:
        valid = R >= 1.0 - h(0.5 - tau) - 1e-15
    else:
        valid = tau <= p / 2.0 + 1e-15

    dgv = delta_gv(min(max(R, 0.0), 1.0))
    # Regime boundaries: the (b)/(c) split is where the interior saddle
    # rho0 leaves the feasible range [dgv/2 + tau, dgv + 2 tau], i.e. at
    # dgv = rho0 - 2*sign*tau.
    Ra = 1.0 - h(omega0)
    inner = rho0s - 2.0 * sign * tau
    Rb = 1.0 - h(inner) if 0.0 <= inner <= 1.0 else 1.0

    if R <= Ra:
        arg = 0.5 + tau / dgv if dgv > 0 else math.inf
        if not 0.0 <= arg <= 1.0:
            return BinaryBoundValue(0.0, "a", valid=False)
        value = -dgv * (h(arg) + 0.5 * math.log2(u)) + sign * nu * tau
        regime = "a"
        diag = {"rho_typ": (1.0 - dgv) * p + dgv / 2.0 + sign * tau, "omega_typ": dgv}
    elif R <= Rb:
        value = _D(rho0s, p) + 1.0 - R - h(rho0s - 2.0 * sign * tau)
        regime = "b"
        diag = {"rho_typ": rho0s, "omega_typ": omega0}
    else:
        rho = dgv + 2.0 * sign * tau
        regime = "c"
        diag = {
            "rho_typ": rho,
            "omega_typ": 2.0 * rho * (1.0 - rho) - 2.0 * sign * tau * (1.0 - 2.0 * rho),
        }
        if sign < 0 and rho < p - 1e-15:
            # Decoding radius below the typical noise weight (possibly even
            # negative): the tail term has no exponential decay, so the bound
            # degenerates.
            return BinaryBoundValue(0.0, regime, valid=False, diagnostics=diag)
        value = _D(rho, p)
    if value < 0.0 and value > -1e-12:
        value = 0.0
    return BinaryBoundValue(value, regime, valid=valid and value >= 0.0, diagnostics=diag)


def tradeoff_bounds(
    R: float, ch: BscChannel, tau: float
) -> tuple[BinaryBoundValue, BinaryBoundValue]:
    """Nonlinear trade-off pair (M_plus, M_minus) for undetected error / erasure."""
    if tau < 0.0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    return _tradeoff_one(R, ch, tau, +1), _tradeoff_one(R, ch, tau, -1)


def tradeoff_case_b_alternative(ch: BscChannel, tau: float, sign: int, R: float) -> float:
    """Case-(b) trade-off value via the omega0-only identity, for cross-checks."""
    lm = landmarks(ch, tau)
    w0 = lm.omega0_tau
    return (
        1.0
        - R
        - h(w0)
        - w0 * h(0.5 + sign * tau / w0)
        - (w0 / 2.0) * math.log2(ch.u)
        + sign * ch.nu * tau
    )


def nontrivial_rate_threshold(ch: BscChannel, tau: float) -> float:
    """Largest rate at which the erasure trade-off bound stays positive."""
    q = ch.p + 2.0 * tau
    if q >= 0.5:
        return 0.0
    return 1.0 - h(q)


@dataclass(frozen=True)
class WeightProfile:
    """Exponential weight profile alpha(omega) on a grid, linear in between.

    Outside the grid support the profile is -inf (no codewords).
    """

    omegas: tuple[float, ...]
    alphas: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.omegas) != len(self.alphas) or len(self.omegas) == 0:
            raise ValueError("profile grids must be nonempty and of equal length")
        if any(b <= a for a, b in zip(self.omegas, self.omegas[1:])):
            raise ValueError("omega grid must be strictly increasing")

    @property
    def support(self) -> tuple[float, float]:
        return self.omegas[0], self.omegas[-1]

    def __call__(self, omega: float) -> float:
        lo, hi = self.support
        if omega < lo or omega > hi:
            return -math.inf
        return float(np.interp(omega, self.omegas, self.alphas))

    @classmethod
    def gv_ensemble(cls, R: float, grid: int = 2001) -> "WeightProfile":
        """Binomial/GV profile alpha(omega) = h(omega) - (1 - R) on its support."""
        dgv = delta_gv(R)
        om = np.linspace(dgv, 1.0, grid)
        al = np.array([h(float(w)) - (1.0 - R) for w in om])
        return cls(tuple(float(x) for x in om), tuple(float(x) for x in al))

    @classmethod
    def single_weight(cls, omega: float, alpha: float = 0.0) -> "WeightProfile":
        eps = 1e-12
        return cls((omega - eps, omega, omega + eps), (alpha, alpha, alpha))


def specific_code_bound(profile: WeightProfile, R: float, ch: BscChannel) -> float:
    """Error-rate exponent of a specific weight profile under complete decoding.

    max(D, E0(R, p) - kappa) where D is the Bhattacharyya-weighted profile
    maximum and kappa the profile's excess over the rate-R ensemble.
    """
    lo, hi = profile.support
    if hi <= 0.0:
        raise ValueError("profile support must contain positive weights")
    lo = max(lo, 1e-9)
    log4u = math.log2(4.0 * ch.u)

    def bhatta(w: float) -> float:
        return profile(w) + (w / 2.0) * log4u

    def excess(w: float) -> float:
        return profile(w) - max(0.0, h(w) - (1.0 - R))

    interval = RealInterval(lo, hi) if hi > lo else None
    if interval is None:
        d_part = -bhatta(lo)
        kappa = max(0.0, excess(lo))
    else:
        # Dense grid + golden refinement; the profile is only piecewise smooth.
        grid = np.linspace(lo, hi, 4001)
        bvals = np.array([bhatta(float(w)) for w in grid])
        k = int(np.argmax(bvals))
        a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        _, bmax = maximize_unimodal(bhatta, RealInterval(a, b)) if b > a else (a, bvals[k])
        d_part = -max(float(bmax), float(bvals[k]))
        evals = np.array([excess(float(w)) for w in grid])
        k = int(np.argmax(evals))
        a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        _, emax = maximize_unimodal(excess, RealInterval(a, b)) if b > a else (a, evals[k])
        kappa = max(0.0, float(emax), float(evals[k]))
    e0 = gallager_exponent(R, ch).value
    return max(d_part, e0 - kappa)


def bounded_distance_exponent(
    R: float, ch: BscChannel, tau: float, check_n: int = 128
) -> tuple[float, bool]:
    """Exponent of bounded-distance margin decoding, plus a finite-n check
    that the single-term dominance hypothesis behind it holds.
    """
    if not 0.0 <= tau <= 0.5:
        raise ValueError(f"tau must lie in [0, 1/2], got {tau}")
    p = ch.p
    split = 1.0 - h(min(p + tau * (1.0 - p), 1.0))
    if R <= split:
        dgv = delta_gv(R)
        value = _T(dgv - tau, p) - dgv * h(min(tau / dgv, 1.0)) if dgv > 0 else 0.0
    else:
        value = 1.0 - R - h(tau) - tau * math.log2(1.0 - p)
    return value, _bounded_distance_hypothesis(R, ch, tau, check_n)


def _bounded_distance_hypothesis(R: float, ch: BscChannel, tau: float, n: int) -> bool:
    """Check on a length-n grid that for every w >= d the double sum over
    (i, l) is dominated by its (i, l) = (w - t, 0) term."""
    p = ch.p
    t = int(round(tau * n))
    d = max(1, int(math.floor(delta_gv(R) * n)))
    lp, lq = math.log2(p), math.log2(1.0 - p)
    for w in range(d, n + 1):
        i_lo = max(math.ceil(w / 2), w - t)
        best = (-math.inf, None)
        for i in range(i_lo, w + 1):
            for ell in range(0, min(t, n - w) + 1):
                lt = (
                    log2_binomial(w, i)
                    + log2_binomial(n - w, ell)
                    + (i + ell) * lp
                    + (n - i - ell) * lq
                )
                if lt > best[0]:
                    best = (lt, (i, ell))
        if best[1] != (max(i_lo, w - t), 0):
            return False
    return True


def typical_error_geometry(
    R: float, ch: BscChannel, tau: float
) -> tuple[float, float, str]:
    """Typical (error weight, decoded-codeword weight) of the undetected-error
    event, per regime of the trade-off bound."""
    m_plus = _tradeoff_one(R, ch, tau, +1)
    p = ch.p
    dgv = delta_gv(R)
    if m_plus.regime == "a":
        return (1.0 - dgv) * p + dgv / 2.0 + tau, dgv, "a"
    if m_plus.regime == "b":
        lm = landmarks(ch, tau)
        return lm.rho0_plus, lm.omega0_tau, "b"
    return dgv, 2.0 * dgv * (1.0 - dgv) + 2.0 * tau * (1.0 - 2.0 * dgv), "c"
