"""FEC block sizing under the erasure-channel MDS model.

A block of N packets carrying M source packets decodes iff at least M
packets survive; with independent random loss at rate p the decoding
failure probability is the binomial upper tail P(losses >= N-M+1).  The
minimal block size meeting a target decoding error rate is found by
steadily increasing N.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

# Relative slack when comparing the failure probability against the target
# rate, so that exact-boundary cases (p**N == DER in real arithmetic) are
# not pushed to the next block size by floating-point round-off.
_DER_SLACK = 1e-9


class FecInfeasibleError(ValueError):
    """No finite block size can meet the target (loss rate >= 1)."""


@dataclass(frozen=True)
class FecProfile:
    """Sizing inputs: M source packets, target DER, static tolerance t."""

    m: int
    der: float
    tolerance: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not (0.0 < self.der < 1.0):
            raise ValueError(f"der must be in (0,1), got {self.der}")
        if not (0.0 <= self.tolerance < 1.0):
            raise ValueError(f"tolerance must be in [0,1), got {self.tolerance}")


class RateIncrease(NamedTuple):
    """Block sizes whose ratio gives the sender's rate overhead."""

    fec_p: int  # block size at the observed loss rate
    fec_t: int  # default block size at the static tolerance

    @property
    def overhead(self) -> float:
        return self.fec_p / self.fec_t - 1.0


def decoding_failure_prob(n: int, m: int, p: float) -> float:
    """P(losses >= n-m+1) for losses ~ Binomial(n, p).

    Accumulates the at-most-m upper-tail terms in log space; absolute error
    stays well inside 1e-12 for n <= 200.
    """
    if m < 1 or n < m:
        raise ValueError(f"need n >= m >= 1, got n={n} m={m}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"loss probability out of range: {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    log_p = math.log(p)
    log_q = math.log1p(-p)
    lg_n = math.lgamma(n + 1)
    terms = [
        math.exp(lg_n - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                 + k * log_p + (n - k) * log_q)
        for k in range(n - m + 1, n + 1)
    ]
    return min(1.0, math.fsum(terms))


def fec_block_size(profile: FecProfile, p: float) -> int:
    """Minimal block size N >= M with failure probability <= DER at loss p.

    Linear scan from N = M upward; the failure probability is decreasing in
    N at fixed M and p, so the first hit is the minimum.  Memoized on the
    exact bits of (M, DER, p); the static tolerance plays no role in the
    size at p, so all profiles sharing M and DER share the memo.
    """
    if p >= 1.0:
        raise FecInfeasibleError(
            f"loss rate {p} >= 1: no finite block size reaches der={profile.der}")
    if p < 0.0:
        raise ValueError(f"loss probability out of range: {p}")
    return _block_size(profile.m, profile.der, p)


@functools.lru_cache(maxsize=None)
def _block_size(m: int, der: float, p: float) -> int:
    if p == 0.0:
        return m
    bound = der * (1.0 + _DER_SLACK)
    n = m
    while decoding_failure_prob(n, m, p) > bound:
        n += 1
    return n


def rate_increase(profile: FecProfile, p: float) -> RateIncrease:
    """Block sizes at loss rate p and at the static tolerance."""
    return RateIncrease(fec_p=fec_block_size(profile, p),
                        fec_t=fec_block_size(profile, profile.tolerance))


def large_block_rate(p: float) -> float:
    """Asymptotic rate factor 1/(1-p) for very large blocks."""
    if p >= 1.0:
        raise FecInfeasibleError(f"loss rate {p} >= 1 has no finite rate factor")
    if p < 0.0:
        raise ValueError(f"loss probability out of range: {p}")
    return 1.0 / (1.0 - p)


@dataclass
class FecTable:
    """On-demand table of block sizes for one profile, keyed by loss rate."""

    profile: FecProfile
    entries: dict[float, int] = field(default_factory=dict)

    def block_size(self, p: float) -> int:
        if p not in self.entries:
            self.entries[p] = fec_block_size(self.profile, p)
        return self.entries[p]
