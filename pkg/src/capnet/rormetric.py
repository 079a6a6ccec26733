"""Redundancy Overall Requirement: rate a routing pattern by a scalar.

A complete failure of a link carrying relative load r produces a packet
loss rate r at the receiver, so the sender must grow its FEC block from the
default size to the size matching r.  ROR sums these rate overheads over
every link whose load meets or exceeds the static tolerance; links carrying
the entire flow are skipped (no finite redundancy compensates them) and
reported separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fecsizing import FecProfile, FecTable
from .lpcore import EPS_LOAD
from .netmodel import FlowPattern

REALTIME = "realtime"
OFFLINE = "offline"


@dataclass(frozen=True)
class RorReport:
    mode: str
    total: float
    contributions: dict[int, float] = field(default_factory=dict)
    skipped_full_load: tuple[int, ...] = ()
    below_tolerance: int = 0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "total": self.total,
            "contributions": {str(k): v for k, v in self.contributions.items()},
            "skipped_full_load": list(self.skipped_full_load),
            "below_tolerance": self.below_tolerance,
        }


def _classify(loads) -> tuple[list[tuple[int, float]], list[int]]:
    """Split footprint links into (rated candidates, full-load skips)."""
    rated: list[tuple[int, float]] = []
    skipped: list[int] = []
    for lid, r in enumerate(loads):
        if r <= EPS_LOAD:
            continue  # not part of the communication footprint
        if r >= 1.0 - EPS_LOAD:
            skipped.append(lid)
        else:
            rated.append((lid, r))
    return rated, skipped


def ror_realtime(pattern: FlowPattern, profile: FecProfile) -> RorReport:
    """Short-buffer rating: overheads from exact block-size ratios."""
    table = FecTable(profile)
    fec_t = table.block_size(profile.tolerance)
    rated, skipped = _classify(pattern.loads)
    contributions: dict[int, float] = {}
    below = 0
    for lid, r in rated:
        if r < profile.tolerance:
            below += 1
            continue
        contributions[lid] = table.block_size(r) / fec_t - 1.0
    return RorReport(mode=REALTIME,
                     total=math.fsum(contributions.values()),
                     contributions=contributions,
                     skipped_full_load=tuple(skipped),
                     below_tolerance=below)


def ror_offline(pattern: FlowPattern, tolerance: float) -> RorReport:
    """Large-block rating: overhead (1-t)/(1-r) - 1 per footprint link."""
    if not (0.0 <= tolerance < 1.0):
        raise ValueError(f"tolerance must be in [0,1), got {tolerance}")
    rated, skipped = _classify(pattern.loads)
    contributions: dict[int, float] = {}
    below = 0
    for lid, r in rated:
        if r < tolerance:
            below += 1
            continue
        contributions[lid] = (1.0 - tolerance) / (1.0 - r) - 1.0
    return RorReport(mode=OFFLINE,
                     total=math.fsum(contributions.values()),
                     contributions=contributions,
                     skipped_full_load=tuple(skipped),
                     below_tolerance=below)
