"""Ensembles of network samples from a random-walk mobile ad-hoc network.

Nodes start uniformly on a rectangular area and take a fixed-length step in
a uniformly random direction each timeframe, reflecting off the walls.  Two
nodes are linked iff they are within coverage range.  Every timeframe
yields one network sample; samples whose endpoints cannot support the
required number of disjoint paths are marked skipped, never dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .netmodel import Network, max_disjoint_paths

ENDPOINT_ATTEMPTS = 64


@dataclass(frozen=True)
class ManetConfig:
    """Mobility and sampling parameters.

    coverage_radius defaults to sqrt(8 / (pi * node_count)) on the unit
    square, which targets a mean degree of about 8; step_length defaults to
    a quarter of the radius per timeframe.
    """

    node_count: int
    timeframes: int = 1
    area: tuple[float, float] = (1.0, 1.0)
    coverage_radius: float | None = None
    step_length: float | None = None
    master_seed: int = 0
    min_disjoint_paths: int = 2

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError(f"node_count must be >= 2, got {self.node_count}")
        if self.timeframes < 1:
            raise ValueError(f"timeframes must be >= 1, got {self.timeframes}")
        if self.area[0] <= 0 or self.area[1] <= 0:
            raise ValueError(f"area sides must be positive, got {self.area}")
        if self.coverage_radius is not None and self.coverage_radius < 0:
            raise ValueError("coverage_radius must be >= 0")
        if self.step_length is not None and self.step_length < 0:
            raise ValueError("step_length must be >= 0")
        if self.min_disjoint_paths < 1:
            raise ValueError("min_disjoint_paths must be >= 1")

    @property
    def radius(self) -> float:
        if self.coverage_radius is not None:
            return self.coverage_radius
        return math.sqrt(8.0 / (math.pi * self.node_count))

    @property
    def step(self) -> float:
        if self.step_length is not None:
            return self.step_length
        return self.radius / 4.0

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "timeframes": self.timeframes,
            "area": list(self.area),
            "coverage_radius": self.radius,
            "step_length": self.step,
            "master_seed": self.master_seed,
            "min_disjoint_paths": self.min_disjoint_paths,
        }


@dataclass(frozen=True)
class ManetSample:
    frame: int
    network: Network | None
    skip_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.network is None


@dataclass(frozen=True)
class Ensemble:
    config: ManetConfig
    samples: tuple[ManetSample, ...]

    def accepted(self) -> list[ManetSample]:
        return [s for s in self.samples if not s.skipped]

    @property
    def skipped_count(self) -> int:
        return sum(1 for s in self.samples if s.skipped)


def walk_positions(cfg: ManetConfig):
    """Yield the (node_count, 2) position array of each timeframe.

    The walk consumes a dedicated RNG stream derived from the master seed
    only, so endpoint selection cannot perturb the trajectory.
    """
    rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed]))
    width, height = cfg.area
    pos = np.column_stack([rng.uniform(0.0, width, cfg.node_count),
                           rng.uniform(0.0, height, cfg.node_count)])
    step = cfg.step
    for _ in range(cfg.timeframes):
        yield pos.copy()
        theta = rng.uniform(0.0, 2.0 * math.pi, cfg.node_count)
        pos[:, 0] = _reflect(pos[:, 0] + step * np.cos(theta), width)
        pos[:, 1] = _reflect(pos[:, 1] + step * np.sin(theta), height)


def _reflect(coords: np.ndarray, hi: float) -> np.ndarray:
    """Fold coordinates back into [0, hi] (mirror walls)."""
    folded = np.mod(np.abs(coords), 2.0 * hi)
    return np.where(folded > hi, 2.0 * hi - folded, folded)


def links_within_range(pos: np.ndarray, radius: float) -> tuple[tuple[int, int], ...]:
    """All node pairs at Euclidean distance <= radius, lexicographic order."""
    diff = pos[:, None, :] - pos[None, :, :]
    d2 = (diff ** 2).sum(axis=-1)
    rows, cols = np.triu_indices(len(pos), k=1)
    hit = d2[rows, cols] <= radius * radius
    return tuple((int(u), int(v)) for u, v in zip(rows[hit], cols[hit]))


def select_endpoints(net: Network, rng: np.random.Generator,
                     min_disjoint_paths: int = 2) -> tuple[int, int] | None:
    """Uniformly random distinct pair supporting the disjoint-path minimum.

    Redraws up to ENDPOINT_ATTEMPTS times, then gives up (None) so that
    near-disconnected frames cannot hang the generator.
    """
    for _ in range(ENDPOINT_ATTEMPTS):
        s, t = (int(x) for x in rng.choice(net.node_count, size=2, replace=False))
        if max_disjoint_paths(net, source=s, sink=t) >= min_disjoint_paths:
            return s, t
    return None


def generate_samples(cfg: ManetConfig) -> Ensemble:
    """One network sample per timeframe of the walk.

    Per-frame endpoint selection uses an RNG stream seeded by the pair
    (master_seed, frame), so any sample can be regenerated independently.
    """
    radius = cfg.radius
    samples: list[ManetSample] = []
    for frame, pos in enumerate(walk_positions(cfg)):
        positions = tuple((float(x), float(y)) for x, y in pos)
        links = links_within_range(pos, radius)
        if not links:
            samples.append(ManetSample(frame=frame, network=None,
                                       skip_reason="no links in range"))
            continue
        probe = Network(node_count=cfg.node_count, links=links,
                        source=0, sink=cfg.node_count - 1)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed, frame]))
        pair = select_endpoints(probe, rng, cfg.min_disjoint_paths)
        if pair is None:
            samples.append(ManetSample(
                frame=frame, network=None,
                skip_reason=(f"no endpoint pair with {cfg.min_disjoint_paths} "
                             f"disjoint paths in {ENDPOINT_ATTEMPTS} attempts")))
            continue
        samples.append(ManetSample(
            frame=frame,
            network=Network(node_count=cfg.node_count, links=links,
                            source=pair[0], sink=pair[1], positions=positions)))
    return Ensemble(config=cfg, samples=tuple(samples))
