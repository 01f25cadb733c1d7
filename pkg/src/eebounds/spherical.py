"""Asymptotic exponents for spherical codes on the AWGN channel.

All angles are radians, all exponents nats per dimension. The module covers
the classical lower bound on the reliability function, the trade-off bound
for margin decoding (error and erasure flavors), the distance-profile bound
it derives from, and the bounded-distance / error-detection exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .numerics import BracketError, RealInterval, SolverConfig, solve_bracketed

__all__ = [
    "AwgnChannel",
    "SphericalBoundValue",
    "SphericalLandmarks",
    "DistanceProfile",
    "theta_s",
    "rate_of_angle",
    "g_aux",
    "esp",
    "shannon_exponent",
    "shannon_angles",
    "big_g",
    "elias_theta",
    "decoding_radius",
    "spherical_landmarks",
    "f_exponent",
    "tradeoff_exponent",
    "profile_exponent",
    "bounded_distance_exponent_s",
    "undetected_error_exponent",
    "rankin_rate",
]

_ROOT_CFG = SolverConfig(abs_tol=1e-14, max_iter=400)


@dataclass(frozen=True)
class AwgnChannel:
    """AWGN channel, unit noise variance, signal-to-noise ratio A."""

    A: float

    def __post_init__(self) -> None:
        if not (self.A > 0.0 and math.isfinite(self.A)):
            raise ValueError(f"signal-to-noise ratio must be positive and finite, got {self.A}")

    @property
    def capacity(self) -> float:
        return 0.5 * math.log1p(self.A)

    @property
    def capacity_angle(self) -> float:
        """arccot sqrt(A): the zero-exponent angle."""
        return math.atan(1.0 / math.sqrt(self.A))


@dataclass(frozen=True)
class SphericalBoundValue:
    value: float
    regime: str  # "expurgation" | "straight" | "sphere-packing"
    valid: bool = True
    diagnostics: Optional[dict] = None


@dataclass(frozen=True)
class SphericalLandmarks:
    theta_e: float
    theta_c: float
    theta_1: float
    theta_2: float
    R_star: float
    residuals: Optional[dict] = None


def theta_s(R: float) -> float:
    """Code-distance angle arcsin e^{-R} of the rate-R packing."""
    if R < 0.0:
        raise ValueError(f"rate must be nonnegative, got {R}")
    return math.asin(math.exp(-R))


def rate_of_angle(theta: float) -> float:
    """Inverse of theta_s: -ln sin theta."""
    s = math.sin(theta)
    if s <= 0.0:
        raise ValueError(f"angle must have positive sine, got {theta}")
    return -math.log(s)


def g_aux(phi: float, ch: AwgnChannel) -> float:
    """Saddle factor g(phi) of the sphere-packing exponent."""
    A = ch.A
    c = math.cos(phi)
    return 0.5 * (math.sqrt(A) * c + math.sqrt(A * c * c + 4.0))


def esp(phi: float, ch: AwgnChannel) -> float:
    """Sphere-packing exponent: decay rate of noise escaping a cone of
    half-angle phi."""
    if not 0.0 < phi < math.pi:
        raise ValueError(f"angle must lie in (0, pi), got {phi}")
    A = ch.A
    g = g_aux(phi, ch)
    gs = g * math.sin(phi)
    if gs <= 0.0:
        raise ValueError(f"degenerate angle {phi}: g*sin(phi) = {gs}")
    return A / 2.0 - (math.sqrt(A) / 2.0) * g * math.cos(phi) - math.log(gs)


def shannon_angles(ch: AwgnChannel) -> tuple[float, float]:
    """(theta_e, theta_c): expurgation and critical angles."""
    root = math.sqrt(1.0 + ch.A * ch.A / 4.0)
    te = math.asin(math.sqrt(1.0 / (0.5 + 0.5 * root)))
    tc = math.asin(math.sqrt(1.0 / (0.5 + ch.A / 4.0 + 0.5 * root)))
    return te, tc


def shannon_exponent(R: float, ch: AwgnChannel) -> SphericalBoundValue:
    """Classical lower bound on the AWGN reliability function at rate R."""
    if R > ch.capacity + 1e-12:
        return SphericalBoundValue(0.0, "sphere-packing", valid=False)
    theta = theta_s(R)
    te, tc = shannon_angles(ch)
    A = ch.A
    if theta >= te:
        return SphericalBoundValue((A / 4.0) * (1.0 - math.cos(theta)), "expurgation")
    if theta >= tc:
        value = (A / 4.0) * (1.0 - math.cos(te)) + math.log(math.sin(theta) / math.sin(te))
        return SphericalBoundValue(value, "straight")
    return SphericalBoundValue(esp(theta, ch), "sphere-packing")


def big_g(phi: float, tau: float, ch: AwgnChannel) -> float:
    """Small negative correction term of the trade-off bound; zero at tau=0."""
    if not (0.0 < phi and phi / 2.0 + tau < math.pi / 2.0):
        raise ValueError(f"require 0 < phi and phi/2 + tau < pi/2, got phi={phi}, tau={tau}")
    a = 0.5 * (phi + tau)
    b = 0.5 * phi + tau
    ca, cb = math.cos(a), math.cos(b)
    arg = 1.0 + ch.A * ca * ca * (math.sin(a) ** 2 - math.sin(b) ** 2) / (cb * cb)
    if arg <= 0.0:
        raise ValueError(f"log argument nonpositive: {arg} at phi={phi}, tau={tau}")
    return 0.5 * math.log(arg)


def _big_g_dx(x: float, tau: float, ch: AwgnChannel) -> float:
    """d/dx G(x, tau), assembled in closed form."""
    A = ch.A
    a = 0.5 * (x + tau)
    b = 0.5 * x + tau
    sec2b = 1.0 / math.cos(b) ** 2
    tanb = math.tan(b)
    sin2a = math.sin(2.0 * a)
    cos2a = math.cos(2.0 * a)
    ca2 = math.cos(a) ** 2
    N = 0.25 * sin2a * sin2a * sec2b - ca2 * tanb * tanb
    dN = (
        0.25 * math.sin(4.0 * a) * sec2b
        + 0.25 * sin2a * sin2a * sec2b * tanb
        + 0.5 * sin2a * tanb * tanb
        - ca2 * tanb * sec2b
    )
    return 0.5 * A * dN / (1.0 + A * N)


def _scan_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    points: int = 512,
    all_roots: bool = False,
) -> list[float]:
    """Sign-scan on [lo, hi] followed by bracketed refinement."""
    xs = np.linspace(lo, hi, points)
    vals = np.empty_like(xs)
    for i, x in enumerate(xs):
        try:
            vals[i] = f(float(x))
        except (ValueError, ZeroDivisionError):
            vals[i] = math.nan
    roots: list[float] = []
    for i in range(len(xs) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if math.isnan(v0) or math.isnan(v1):
            continue
        if v0 == 0.0:
            roots.append(float(xs[i]))
        elif v0 * v1 < 0.0:
            roots.append(
                solve_bracketed(f, RealInterval(float(xs[i]), float(xs[i + 1])), _ROOT_CFG)
            )
        if roots and not all_roots:
            return roots
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


def elias_theta(x: float, tau: float, residual_tol: float = 1e-10) -> float:
    """Neighbor angle theta(x): the implicit covering-angle equation's root.

    Solved on the cleared (pole-free) form cot(theta) * (cos(theta + 2 tau)
    - cos 2x) - cos^2 x * tan(theta/2 + tau) = 0, scanned on (0, pi - 2 tau).
    """
    if not 0.0 < x <= math.pi / 2.0:
        raise ValueError(f"x must lie in (0, pi/2], got {x}")
    c2x = math.cos(2.0 * x)
    cx2 = math.cos(x) ** 2

    def resid(theta: float) -> float:
        return (
            (math.cos(theta) / math.sin(theta)) * (math.cos(theta + 2.0 * tau) - c2x)
            - cx2 * math.tan(theta / 2.0 + tau)
        )

    hi = math.pi - 2.0 * tau - 1e-9
    roots = _scan_root(resid, 1e-9, hi, points=160)
    if not roots:
        raise BracketError(f"no root of the neighbor-angle equation on (0, {hi})")
    theta = roots[0]
    if abs(resid(theta)) > residual_tol:
        raise BracketError(f"neighbor-angle residual {resid(theta)} exceeds {residual_tol}")
    return theta


def _decoding_residual(rho: float, R: float, tau: float) -> float:
    theta = elias_theta(rho if rho <= math.pi / 2.0 else math.pi / 2.0, tau)
    t2 = math.tan(theta / 2.0 + tau) ** 2 / math.tan(rho) ** 2
    if t2 >= 1.0:
        raise ValueError("decoding radius inside the half-distance cone")
    return R + math.log(math.sin(theta)) + 0.5 * math.log(1.0 - t2)


def decoding_radius(R: float, tau: float, ch: AwgnChannel) -> float:
    """Decoding radius rho(R): the unique root of the self-consistency
    equation on [theta_s, 2 theta_s]. Raises BracketError when the scan
    finds no (or no unique) sign change."""
    if R <= 0.0:
        raise ValueError(f"rate must be positive, got {R}")
    ts = theta_s(R)
    if tau >= 0.0:
        lo = ts
        hi = min(2.0 * ts, math.pi / 2.0 - 1e-9)
    else:
        # Negative margin (erasure flavor) shrinks the radius below theta_s.
        lo = 1e-3
        hi = ts
    if hi <= lo:
        raise BracketError(f"degenerate decoding-radius bracket [{lo}, {hi}]")

    def f(rho: float) -> float:
        return _decoding_residual(rho, R, tau)

    # Endpoint can be an exact root (tau = 0 collapses to theta_s).
    try:
        flo = f(lo)
        if abs(flo) < 1e-11:
            return lo
    except (ValueError, BracketError):
        pass
    roots = _scan_root(f, lo, hi, points=48, all_roots=True)
    if not roots:
        raise BracketError(
            f"no sign change of the decoding-radius equation on [{lo}, {hi}]"
        )
    if len(roots) > 1 and max(roots) - min(roots) > 1e-8:
        raise BracketError(f"decoding-radius root not unique on [{lo}, {hi}]: {roots}")
    return roots[0]


@lru_cache(maxsize=256)
def spherical_landmarks(tau: float, ch: AwgnChannel) -> SphericalLandmarks:
    """Regime-boundary angles of the trade-off bound, memoized per (A, tau)."""
    te, tc = shannon_angles(ch)
    A = ch.A

    def d_expurg(x: float) -> float:
        # Stationarity of ln sin(x) - (A/4)(1 - cos(x + 2 tau)), the exact
        # saddle-simplified expurgation integrand.
        return math.cos(x) / math.sin(x) - (A / 4.0) * math.sin(x + 2.0 * tau)

    roots = _scan_root(d_expurg, 1e-6, math.pi / 2.0 - 1e-6, points=1024)
    if not roots:
        raise BracketError("expurgation-angle equation has no root in (0, pi/2)")
    theta_1 = roots[0]
    resid_t1 = d_expurg(theta_1)

    def theta_of_rate(R: float) -> float:
        return elias_theta(decoding_radius(R, tau, ch), tau)

    def f_rstar(R: float) -> float:
        return theta_of_rate(R) - theta_1

    r_hi = ch.capacity - 1e-9
    roots = _scan_root(f_rstar, 1e-4, r_hi, points=24)
    if not roots:
        raise BracketError("no root for the straight-line/sphere-packing rate boundary")
    r_star = roots[0]
    resid_rs = f_rstar(r_star)
    return SphericalLandmarks(
        theta_e=te,
        theta_c=tc,
        theta_1=theta_1,
        theta_2=theta_s(r_star),
        R_star=r_star,
        residuals={"theta_1": resid_t1, "R_star": resid_rs},
    )


def _phi0(theta: float, tau: float, ch: AwgnChannel) -> float:
    """Interior saddle angle of the pairwise-error integrand."""
    A = ch.A
    psi = theta + 2.0 * tau
    s2 = (4.0 + A * math.sin(psi) ** 2) / (2.0 * (2.0 + A + A * math.cos(psi)))
    return math.asin(math.sqrt(min(max(s2, 0.0), 1.0)))


def f_exponent(
    theta: float, tau: float, ch: AwgnChannel, rho: float
) -> tuple[float, float]:
    """(-1/n ln of the pairwise error probability, active saddle angle) for
    two codewords at angle theta under margin tau, errors capped at radius rho."""
    half = theta / 2.0 + tau
    if not half < rho < math.pi / 2.0:
        raise ValueError(f"require theta/2 + tau < rho < pi/2, got {half} vs {rho}")
    phi0 = _phi0(theta, tau, ch)
    if phi0 <= half:
        raise ValueError(f"saddle {phi0} at or below integration start {half}")
    phi = phi0 if phi0 < rho else rho
    t2 = math.tan(half) ** 2 / math.tan(phi) ** 2
    value = -0.5 * math.log(1.0 - t2) + esp(phi, ch)
    return value, phi


def tradeoff_exponent(
    R: float, ch: AwgnChannel, tau: float, kind: str = "error"
) -> SphericalBoundValue:
    """Trade-off lower bound M(R) on the undetected-error (kind="error") or
    erasure (kind="erasure", margin negated) exponent."""
    if kind not in ("error", "erasure"):
        raise ValueError(f"kind must be 'error' or 'erasure', got {kind}")
    if tau < 0.0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    t = tau if kind == "error" else -tau
    try:
        if R <= 0.0 or R > ch.capacity + 1e-12:
            return SphericalBoundValue(0.0, "sphere-packing", valid=False)
        ts = theta_s(R)
        lms = spherical_landmarks(t, ch)
        A = ch.A
        # The pairwise-error exponent at the interior saddle simplifies
        # exactly to (A/4)(1 - cos(theta + 2 tau)); equivalently, the
        # correction to the tau-shifted expurgation term is
        # (A/4)(cos(theta + 2 tau) - cos(theta + tau)), which vanishes at
        # tau = 0 and is negative for tau > 0.
        if ts > lms.theta_1:
            value = (A / 4.0) * (1.0 - math.cos(ts + 2.0 * t))
            return SphericalBoundValue(
                value, "expurgation", diagnostics={"theta_star": ts}
            )
        if ts > lms.theta_2:
            value = (A / 4.0) * (1.0 - math.cos(lms.theta_1 + 2.0 * t)) + math.log(
                math.sin(ts) / math.sin(lms.theta_1)
            )
            return SphericalBoundValue(
                value, "straight", diagnostics={"theta_star": lms.theta_1}
            )
        rho = decoding_radius(R, t, ch)
        diag = {"rho": rho, "theta_star": elias_theta(rho, t)}
        if rho < ch.capacity_angle - 1e-12:
            # Noise typically exceeds the radius: the tail term carries no
            # exponential decay and the bound degenerates.
            return SphericalBoundValue(0.0, "sphere-packing", valid=False, diagnostics=diag)
        value = esp(rho, ch)
        return SphericalBoundValue(value, "sphere-packing", diagnostics=diag)
    except (ValueError, BracketError):
        return SphericalBoundValue(0.0, "sphere-packing", valid=False)


@dataclass(frozen=True)
class DistanceProfile:
    """Exponential distance profile b(theta) with declared angular support."""

    b: Callable[[float], float]
    theta_min: float
    theta_max: float

    @classmethod
    def packing(cls, R: float) -> "DistanceProfile":
        """Profile R + ln sin theta of the uniform-measure packing of rate R."""
        tmin = theta_s(R)
        return cls(lambda th: R + math.log(math.sin(th)), tmin, math.pi - tmin)

    @classmethod
    def single_angle(cls, theta0: float, value: float = 0.0) -> "DistanceProfile":
        return cls(lambda th: value, theta0, theta0)


def _grid_refine_min(
    f: Callable[[float], float], lo: float, hi: float, grid: int = 2001
) -> float:
    """Minimum of f on [lo, hi] by a dense grid plus golden refinement."""
    if hi <= lo:
        return f(lo)
    xs = np.linspace(lo, hi, grid)
    vals = np.empty_like(xs)
    for i, x in enumerate(xs):
        try:
            vals[i] = f(float(x))
        except (ValueError, BracketError):
            vals[i] = math.inf
    k = int(np.argmin(vals))
    a, b = float(xs[max(k - 1, 0)]), float(xs[min(k + 1, len(xs) - 1)])
    best = float(vals[k])
    if b > a:
        inv = (math.sqrt(5.0) - 1.0) / 2.0
        x1 = b - inv * (b - a)
        x2 = a + inv * (b - a)

        def safe(x: float) -> float:
            try:
                return f(x)
            except (ValueError, BracketError):
                return math.inf

        f1, f2 = safe(x1), safe(x2)
        for _ in range(200):
            if (b - a) < 1e-12:
                break
            if f1 > f2:
                a, x1, f1 = x1, x2, f2
                x2 = a + inv * (b - a)
                f2 = safe(x2)
            else:
                b, x2, f2 = x2, x1, f1
                x1 = b - inv * (b - a)
                f1 = safe(x1)
        best = min(best, safe(0.5 * (a + b)))
    return best


def profile_exponent(
    profile: DistanceProfile,
    R: float,
    ch: AwgnChannel,
    tau: float,
    rho: float,
) -> float:
    """Exponent of the distance-profile union bound: competition between the
    worst profile angle and the sphere-packing tail at radius rho."""
    lo = profile.theta_min
    hi = min(profile.theta_max, 2.0 * (rho - tau) - 1e-9)
    if hi < lo:
        raise ValueError(f"empty angular support [{lo}, {hi}]")

    def per_theta(th: float) -> float:
        return -profile.b(th) + f_exponent(th, tau, ch, rho)[0]

    worst = _grid_refine_min(per_theta, lo, hi)
    return min(worst, esp(rho, ch))


def bounded_distance_exponent_s(
    profile: DistanceProfile, ch: AwgnChannel, tau: float, eps: float = 1e-4
) -> float:
    """Error exponent of bounded-distance decoding at angular radius tau."""
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not profile.theta_min > 0.0:
        raise ValueError("profile must have positive minimum distance")
    A = ch.A
    lo = profile.theta_min
    hi = math.pi / 2.0 - tau - eps
    if hi < lo:
        raise ValueError(f"empty angle range [{lo}, {hi}]")

    def per_theta(th: float) -> float:
        psi = 2.0 * (th - tau)
        s2 = (4.0 + A * math.sin(psi) ** 2) / (4.0 + 2.0 * A + 2.0 * A * math.cos(psi))
        phi0 = math.asin(math.sqrt(min(max(s2, 0.0), 1.0)))
        if not (phi0 < math.pi / 2.0 and phi0 > th - tau):
            raise ValueError(f"saddle {phi0} outside (theta - tau, pi/2) at theta={th}")
        theta0 = phi0 if phi0 < th + tau else th + tau
        t2 = math.tan(th - tau) ** 2 / math.tan(theta0) ** 2
        q = 0.5 * math.log(1.0 - t2) - esp(theta0, ch)
        return -profile.b(th) - q

    worst = _grid_refine_min(per_theta, lo, hi)
    return min(worst, esp(hi, ch))


def undetected_error_exponent(theta: float, tau: float) -> SphericalBoundValue:
    """Exponent of undetected error in the vanishing-radius detection limit."""
    if not 0.0 < theta < math.pi / 2.0:
        raise ValueError(f"distance angle must lie in (0, pi/2), got {theta}")
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    arg = 8.0 * tau / math.sin(2.0 * theta)
    if arg > 1.0:
        return SphericalBoundValue(0.0, "detection", valid=False)
    return SphericalBoundValue(-0.5 * math.log(arg), "detection")


def rankin_rate(theta: float) -> float:
    """Upper bound on the rate of a spherical code of distance theta."""
    if not 0.0 < theta <= math.pi / 2.0:
        raise ValueError(f"angle must lie in (0, pi/2], got {theta}")
    return -math.log(math.sqrt(2.0) * math.sin(theta / 2.0))
