"""Exact finite-blocklength union bounds and an exhaustive decoding oracle.

These are the numerical ground truth for the asymptotic modules: the binary
union bound dominates the exhaustive margin-decoding oracle for every code,
and its normalized exponent converges to the asymptotic trade-off bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .numerics import LN2, log_sum
from .spherical import AwgnChannel, esp

__all__ = [
    "WeightDistribution",
    "MarginParams",
    "triangle_count",
    "binary_union_bound",
    "awgn_union_bound",
    "exact_margin_probability",
]


@dataclass(frozen=True)
class WeightDistribution:
    """Weight distribution of a length-n code, stored as log2 counts."""

    n: int
    log2_counts: tuple[float, ...]  # index w -> log2 A_w, -inf for absent weights

    def __post_init__(self) -> None:
        if len(self.log2_counts) != self.n + 1:
            raise ValueError(f"expected {self.n + 1} counts, got {len(self.log2_counts)}")

    @classmethod
    def from_counts(cls, counts) -> "WeightDistribution":
        arr = [math.log2(c) if c > 0 else -math.inf for c in counts]
        return cls(len(counts) - 1, tuple(arr))

    @classmethod
    def gv_ensemble(cls, n: int, rate_bits: float) -> "WeightDistribution":
        """Expected spectrum floor(C(n,w) 2^{-n(1-R)}) of the rate-R ensemble."""
        lgc = (gammaln(n + 1) - gammaln(np.arange(n + 1) + 1) - gammaln(n - np.arange(n + 1) + 1)) / LN2
        la = lgc - n * (1.0 - rate_bits)
        la[la < 0.0] = -math.inf  # floor() kills expected counts below one
        la[0] = 0.0
        return cls(n, tuple(float(x) for x in la))

    @classmethod
    def binomial_spherical(cls, n: int, rate_nats: float) -> "WeightDistribution":
        """Binomial Hamming spectrum of a rate-R (nats) binary spherical code."""
        return cls.gv_ensemble(n, rate_nats / LN2)

    @property
    def min_distance(self) -> Optional[int]:
        for w in range(1, self.n + 1):
            if self.log2_counts[w] > -math.inf:
                return w
        return None


@dataclass(frozen=True)
class MarginParams:
    """Margin decoder parameters: integer Hamming margin t, optional
    decoding-radius override r (default d +/- 2t)."""

    t: int = 0
    r: Optional[int] = None

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError(f"margin must be nonnegative, got {self.t}")


def triangle_count(n: int, k: int, i: int, j: int) -> int:
    """Number of points at distance i from x and j from y when d(x, y) = k."""
    if min(n, k, i, j) < 0 or max(k, i, j) > n:
        return 0
    two_s = k + i - j
    if two_s < 0 or two_s % 2 != 0:
        return 0
    s = two_s // 2
    if s > k or s > i or i - s > n - k:
        return 0
    return math.comb(k, s) * math.comb(n - k, i - s)


def _log2_binom_row(m: int) -> np.ndarray:
    ks = np.arange(m + 1)
    return (gammaln(m + 1) - gammaln(ks + 1) - gammaln(m - ks + 1)) / LN2


def binary_union_bound(
    wd: WeightDistribution, p: float, m: MarginParams, mode: str = "error"
) -> float:
    """log2 of the finite-n union bound on the margin-decoding failure
    probability: codeword competition inside radius r plus the noise tail.

    mode="error" bounds the undetected-error probability, mode="erasure" the
    error-or-erasure probability (margin sign flipped).
    """
    if mode not in ("error", "erasure"):
        raise ValueError(f"mode must be 'error' or 'erasure', got {mode}")
    if not 0.0 < p < 0.5:
        raise ValueError(f"crossover must lie in (0, 1/2), got {p}")
    n, t = wd.n, m.t
    sign = 1 if mode == "error" else -1
    lp, lq = math.log2(p), math.log2(1.0 - p)
    d = wd.min_distance

    if m.r is not None:
        r = m.r
    elif d is None:
        r = n  # no competing codeword: only the (empty) tail remains
    else:
        r = d + sign * 2 * t
    r = max(min(r, n), -1)

    pieces: list[float] = []
    if d is not None:
        lgc_n = _log2_binom_row(n)
        for w in range(d, n + 1):
            law = wd.log2_counts[w]
            if law == -math.inf:
                continue
            lo = math.ceil(w / 2) + sign * t
            lo = max(lo, 0)
            if lo > r:
                continue
            lgc_w = _log2_binom_row(w)
            lgc_nw = _log2_binom_row(n - w)
            for e in range(lo, r + 1):
                i_arr = np.arange(lo, min(e, w) + 1)
                if i_arr.size == 0:
                    continue
                j_arr = e - i_arr
                mask = j_arr <= n - w
                if not mask.any():
                    continue
                i_arr, j_arr = i_arr[mask], j_arr[mask]
                terms = lgc_w[i_arr] + lgc_nw[j_arr] + e * lp + (n - e) * lq
                pieces.append(law + log_sum(terms))
    # Tail: error weight beyond the decoding radius.
    if r < n:
        es = np.arange(r + 1, n + 1)
        lgc_n = _log2_binom_row(n)
        pieces.append(log_sum(lgc_n[es] + es * lp + (n - es) * lq))
    return log_sum(pieces) if pieces else -math.inf


def awgn_union_bound(
    hamming_wd: WeightDistribution,
    ch: AwgnChannel,
    tau: float,
    rho: float,
    quad_points: int = 2048,
) -> float:
    """ln of the finite-n tangential-sphere style union bound for a binary
    spherical code with the given Hamming spectrum."""
    n = hamming_wd.n
    if not 0.0 < rho < math.pi / 2.0:
        raise ValueError(f"decoding radius must lie in (0, pi/2), got {rho}")
    d = hamming_wd.min_distance
    # Normalized cap-area prefactor, exact to leading order.
    log_cap_pref = float(
        gammaln(n / 2.0) - gammaln((n - 1) / 2.0) - 0.5 * math.log(math.pi) - math.log(n - 1)
    )

    def log_f(theta: float) -> float:
        half = theta / 2.0 + tau
        if half >= rho:
            raise ValueError(f"cone start {half} at or beyond radius {rho}")
        phis = half + (np.arange(quad_points) + 0.5) * (rho - half) / quad_points
        tan_ratio = math.tan(half) / np.tan(phis)
        sin_x = np.sqrt(np.maximum(1.0 - tan_ratio**2, 0.0))
        with np.errstate(divide="ignore"):
            log_omega = log_cap_pref + (n - 1) * np.log(sin_x) - np.log(tan_ratio)
        A = ch.A
        cphi = np.cos(phis)
        g = 0.5 * (math.sqrt(A) * cphi + np.sqrt(A * cphi**2 + 4.0))
        e_sp = A / 2.0 - (math.sqrt(A) / 2.0) * g * cphi - np.log(g * np.sin(phis))
        integrand = log_omega - n * e_sp
        return log_sum(list(integrand), base=math.e) + math.log((rho - half) / quad_points)

    pieces: list[float] = []
    if d is not None:
        w_hi = min(n, math.floor(n * (1.0 - math.cos(2.0 * rho)) / 2.0))
        for w in range(d, w_hi + 1):
            law = hamming_wd.log2_counts[w]
            if law == -math.inf:
                continue
            theta_w = math.acos(1.0 - 2.0 * w / n)
            if theta_w / 2.0 + tau >= rho - 1e-12:
                continue
            pieces.append(law * LN2 + log_f(theta_w))
    pieces.append(-n * esp(rho, ch))
    return log_sum(pieces, base=math.e)


_POPCOUNT16 = np.array([bin(v).count("1") for v in range(1 << 16)], dtype=np.uint8)


def exact_margin_probability(code, p: float, t: int) -> tuple[float, float, float]:
    """Exact (P_correct, P_undetected, P_erasure) of margin decoding by
    enumerating every received word. Requires n <= 16 and k <= 10.

    ``code`` must expose ``n``, ``k`` and ``codeword_ints()``.
    """
    n, k = code.n, code.k
    if n > 16 or k > 10:
        raise ValueError(f"exhaustive oracle limited to n <= 16, k <= 10, got ({n}, {k})")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"crossover must lie in [0, 1], got {p}")
    if t < 0:
        raise ValueError(f"margin must be nonnegative, got {t}")
    cws = np.asarray(code.codeword_ints(), dtype=np.uint32)
    ys = np.arange(1 << n, dtype=np.uint32)
    wt_y = _POPCOUNT16[ys].astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_prob_y = wt_y * (math.log(p) if p > 0 else -math.inf) + (n - wt_y) * (
            math.log1p(-p) if p < 1 else -math.inf
        )
    if p == 0.0:
        log_prob_y = np.where(wt_y == 0, 0.0, -math.inf)
    if p == 1.0:
        log_prob_y = np.where(wt_y == n, 0.0, -math.inf)
    prob_y = np.exp(log_prob_y)

    dist = _POPCOUNT16[ys[:, None] ^ cws[None, :]].astype(np.int16)
    order = np.argsort(dist, axis=1, kind="stable")
    d1 = np.take_along_axis(dist, order[:, :1], axis=1)[:, 0]
    if cws.size > 1:
        d2 = np.take_along_axis(dist, order[:, 1:2], axis=1)[:, 0]
    else:
        d2 = np.full_like(d1, np.iinfo(np.int16).max)
    winner = order[:, 0]
    margin = d2 - d1
    decoded = margin >= max(2 * t, 1)  # strict tie-break: equal distances erase
    correct = decoded & (winner == 0)
    undetected = decoded & (winner != 0)

    p_correct = float(prob_y[correct].sum())
    p_und = float(prob_y[undetected].sum())
    p_erase = float(prob_y[~decoded].sum())
    return p_correct, p_und, p_erase
