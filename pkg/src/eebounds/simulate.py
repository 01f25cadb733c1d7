"""Seeded Monte Carlo simulation of the margin decoder over BSC and AWGN.

Trials are processed in fixed-size blocks; block b draws from an RNG seeded
by (seed, b), so tallies are identical for any worker count and can be
verified against the exhaustive oracle classification word by word.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from .finite import WeightDistribution
from .spherical import AwgnChannel

__all__ = [
    "LinearCode",
    "SphericalCodebook",
    "TrialTally",
    "RegressionResult",
    "gen_linear_code",
    "weight_distribution",
    "margin_decode",
    "margin_decode_awgn",
    "simulate_bsc",
    "simulate_awgn",
    "simulate_cone_exit",
    "estimate_exponent",
    "wilson_interval",
]

_BLOCK = 1 << 14
_MAX_K = 26


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = float(norm.ppf(0.5 + confidence / 2.0))
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class TrialTally:
    trials: int
    correct: int
    undetected: int
    erasure: int
    seed: int

    def __post_init__(self) -> None:
        if self.correct + self.undetected + self.erasure != self.trials:
            raise ValueError("tally classes must sum to the trial count")

    def rate(self, cls: str) -> float:
        return getattr(self, cls) / self.trials

    def wilson(self, cls: str, confidence: float = 0.95) -> tuple[float, float]:
        return wilson_interval(getattr(self, cls), self.trials, confidence)


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class LinearCode:
    """Systematic [n, k] binary linear code with generator [I | P]."""

    n: int
    k: int
    parity: tuple[tuple[int, ...], ...]  # k x (n - k)

    def __post_init__(self) -> None:
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if self.k > _MAX_K:
            raise ValueError(f"k={self.k} exceeds enumeration guard {_MAX_K}")
        if len(self.parity) != self.k or any(len(r) != self.n - self.k for r in self.parity):
            raise ValueError("parity block must be k x (n - k)")

    @property
    def generator(self) -> np.ndarray:
        g = np.zeros((self.k, self.n), dtype=np.uint8)
        g[:, : self.k] = np.eye(self.k, dtype=np.uint8)
        g[:, self.k :] = np.asarray(self.parity, dtype=np.uint8).reshape(self.k, self.n - self.k)
        return g

    def codewords(self) -> np.ndarray:
        """All 2^k codewords as a (2^k, n) bit matrix, message order."""
        msgs = ((np.arange(1 << self.k, dtype=np.int64)[:, None] >> np.arange(self.k)) & 1).astype(
            np.uint8
        )
        return (msgs @ self.generator) % 2

    def codeword_ints(self) -> np.ndarray:
        cw = self.codewords().astype(np.uint64)
        return (cw << np.arange(self.n, dtype=np.uint64)).sum(axis=1).astype(np.uint64)


def gen_linear_code(n: int, k: int, seed: int) -> LinearCode:
    """Random systematic code, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    parity = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
    return LinearCode(n, k, tuple(tuple(int(b) for b in row) for row in parity))


def weight_distribution(code: LinearCode) -> WeightDistribution:
    """Exact weight distribution by enumerating all 2^k codewords."""
    counts = np.zeros(code.n + 1, dtype=np.int64)
    total = 1 << code.k
    gen = code.generator
    chunk = 1 << 20
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        msgs = ((idx[:, None] >> np.arange(code.k)) & 1).astype(np.uint8)
        wts = ((msgs @ gen) % 2).sum(axis=1)
        counts += np.bincount(wts, minlength=code.n + 1)
    return WeightDistribution.from_counts(counts.tolist())


def margin_decode(code: LinearCode, y: Sequence[int], t: int) -> Optional[int]:
    """Message index of the margin winner, or None for an erasure.

    At t = 0 exact distance ties are classified as erasure (no unique winner).
    """
    if t < 0:
        raise ValueError(f"margin must be nonnegative, got {t}")
    yv = np.asarray(y, dtype=np.uint8)
    dist = (code.codewords() ^ yv).sum(axis=1)
    order = np.argsort(dist, kind="stable")
    d1 = int(dist[order[0]])
    d2 = int(dist[order[1]]) if dist.size > 1 else d1 + 2 * t + 1
    if d2 - d1 >= max(2 * t, 1):
        return int(order[0])
    return None


def margin_decode_awgn(
    codebook: "SphericalCodebook", y: Sequence[float], tau: float
) -> Optional[int]:
    """Index of the margin winner under angular distance, or None."""
    if tau < 0.0:
        raise ValueError(f"margin must be nonnegative, got {tau}")
    yv = np.asarray(y, dtype=np.float64)
    ny = np.linalg.norm(yv)
    if ny == 0.0:
        return None
    cosang = (codebook.points @ yv) / (ny * math.sqrt(codebook.A * codebook.n))
    ang = np.arccos(np.clip(cosang, -1.0, 1.0))
    order = np.argsort(ang, kind="stable")
    if ang.size == 1:
        return int(order[0])
    if ang[order[1]] - ang[order[0]] >= 2.0 * tau and ang[order[1]] > ang[order[0]]:
        return int(order[0])
    return None


@dataclass(frozen=True)
class SphericalCodebook:
    """M points on the sphere of radius sqrt(A n) in R^n."""

    M: int
    n: int
    A: float
    points: np.ndarray  # (M, n)

    def __post_init__(self) -> None:
        if self.points.shape != (self.M, self.n):
            raise ValueError("points must be an (M, n) array")
        energy = (self.points**2).sum(axis=1)
        if not np.allclose(energy, self.A * self.n, rtol=1e-9):
            raise ValueError("codebook points must have squared norm A*n")

    @classmethod
    def random(cls, M: int, n: int, A: float, seed: int) -> "SphericalCodebook":
        """Uniform random directions, deterministic in the seed."""
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((M, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return cls(M, n, A, g * math.sqrt(A * n))

    @classmethod
    def binary(cls, code: LinearCode, A: float) -> "SphericalCodebook":
        """BPSK image of a binary code: bits 0/1 -> +/- sqrt(A)."""
        pts = (1.0 - 2.0 * code.codewords().astype(np.float64)) * math.sqrt(A)
        return cls(1 << code.k, code.n, A, pts)


def _blocks(trials: int) -> list[tuple[int, int]]:
    out = []
    b = 0
    left = trials
    while left > 0:
        size = min(_BLOCK, left)
        out.append((b, size))
        b += 1
        left -= size
    return out


def _run_blocks(fn, trials: int, workers: int) -> np.ndarray:
    blocks = _blocks(trials)
    if workers <= 1:
        parts = [fn(b, size) for b, size in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda bs: fn(*bs), blocks))
    return np.sum(parts, axis=0)


def simulate_bsc(
    code: LinearCode, p: float, t: int, trials: int, seed: int, workers: int = 1
) -> TrialTally:
    """Margin-decode BSC trials with the all-zero codeword transmitted
    (exact by linearity and channel symmetry)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"crossover must lie in [0, 1], got {p}")
    cw_pm = (1.0 - 2.0 * code.codewords().astype(np.float64)).T  # (n, 2^k)
    n = code.n
    need_margin = max(2 * t, 1)

    def block(b: int, size: int) -> np.ndarray:
        rng = np.random.default_rng([seed, b])
        err = rng.random((size, n)) < p
        e_pm = 1.0 - 2.0 * err
        dist = (n - e_pm @ cw_pm) / 2.0  # integer-valued distances
        part = np.partition(dist, 1, axis=1) if dist.shape[1] > 1 else None
        if part is None:
            return np.array([size, 0, 0], dtype=np.int64)
        d1 = part[:, 0]
        d2 = part[:, 1]
        decoded = (d2 - d1) >= need_margin
        winner0 = dist[:, 0] == d1
        correct = int(np.count_nonzero(decoded & winner0))
        undetected = int(np.count_nonzero(decoded & ~winner0))
        erased = size - correct - undetected
        return np.array([correct, undetected, erased], dtype=np.int64)

    c, u, e = _run_blocks(block, trials, workers)
    return TrialTally(trials, int(c), int(u), int(e), seed)


def simulate_awgn(
    codebook: SphericalCodebook, tau: float, trials: int, seed: int, workers: int = 1
) -> TrialTally:
    """Margin-decode AWGN trials with a uniformly drawn transmitted point."""
    pts = codebook.points
    norm_pts = math.sqrt(codebook.A * codebook.n)

    def block(b: int, size: int) -> np.ndarray:
        rng = np.random.default_rng([seed, b])
        sent = rng.integers(0, codebook.M, size=size)
        y = pts[sent] + rng.standard_normal((size, codebook.n))
        ny = np.linalg.norm(y, axis=1, keepdims=True)
        cosang = (y @ pts.T) / (ny * norm_pts)
        ang = np.arccos(np.clip(cosang, -1.0, 1.0))
        part = np.partition(ang, 1, axis=1) if codebook.M > 1 else None
        if part is None:
            return np.array([size, 0, 0], dtype=np.int64)
        a1, a2 = part[:, 0], part[:, 1]
        decoded = ((a2 - a1) >= 2.0 * tau) & (a2 > a1)
        winner_sent = ang[np.arange(size), sent] == a1
        correct = int(np.count_nonzero(decoded & winner_sent))
        undetected = int(np.count_nonzero(decoded & ~winner_sent))
        erased = size - correct - undetected
        return np.array([correct, undetected, erased], dtype=np.int64)

    c, u, e = _run_blocks(block, trials, workers)
    return TrialTally(trials, int(c), int(u), int(e), seed)


def simulate_cone_exit(
    n: int, ch: AwgnChannel, phi: float, trials: int, seed: int, workers: int = 1
) -> tuple[float, tuple[float, float], int]:
    """Estimate the cone-exit probability Q(phi): i.i.d. Gaussian noise
    pushing a signal point outside the cone of half-angle phi.

    Returns (estimate, wilson 95% interval, exit count).
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    if n < 2:
        raise ValueError(f"dimension must be at least 2, got {n}")
    if not 0.0 < phi < math.pi:
        raise ValueError(f"angle must lie in (0, pi), got {phi}")
    radius = math.sqrt(ch.A * n)
    cos_phi = math.cos(phi)

    def block(b: int, size: int) -> np.ndarray:
        rng = np.random.default_rng([seed, b])
        z = rng.standard_normal((size, n))
        first = radius + z[:, 0]
        rest_sq = np.einsum("ij,ij->i", z[:, 1:], z[:, 1:])
        cosang = first / np.sqrt(first * first + rest_sq)
        return np.array([int(np.count_nonzero(cosang < cos_phi))], dtype=np.int64)

    (exits,) = _run_blocks(block, trials, workers)
    est = exits / trials
    return float(est), wilson_interval(int(exits), trials), int(exits)


def estimate_exponent(points: Sequence[tuple[float, float]]) -> RegressionResult:
    """Least-squares slope of -ln(p_hat) against n."""
    if len(points) < 3:
        raise ValueError("need at least 3 (n, p_hat) points")
    ns = np.array([q[0] for q in points], dtype=float)
    ps = np.array([q[1] for q in points], dtype=float)
    if np.any(ps <= 0.0):
        raise ValueError("all p_hat must be positive")
    if np.unique(ns).size < 2:
        raise ValueError("need at least two distinct n values")
    ys = -np.log(ps)
    slope, intercept = np.polyfit(ns, ys, 1)
    pred = slope * ns + intercept
    ss_res = float(((ys - pred) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RegressionResult(float(slope), float(intercept), r2)
