"""Experiment engine: aggregation semantics and the pinned desk ensemble."""
from __future__ import annotations

import math

import pytest

from capnet.experiment import (DEFAULT_TOLERANCES, ExperimentConfig,
                               _partition_slices, hunting_rows, ror_rows,
                               rate_ensemble)
from capnet.manetgen import ManetConfig, generate_samples


def test_default_tolerance_sweep():
    assert len(DEFAULT_TOLERANCES) == 15
    assert DEFAULT_TOLERANCES[0] == 0.036
    assert DEFAULT_TOLERANCES[-1] == 0.078
    steps = [round(b - a, 9) for a, b in zip(DEFAULT_TOLERANCES,
                                             DEFAULT_TOLERANCES[1:])]
    assert all(s == 0.003 for s in steps)


def test_config_validation():
    manet = ManetConfig(node_count=10)
    with pytest.raises(ValueError):
        ExperimentConfig(manet=manet, tolerances=(0.05, 0.04))
    with pytest.raises(ValueError):
        ExperimentConfig(manet=manet, tolerances=(0.5, 1.2))
    with pytest.raises(ValueError):
        ExperimentConfig(manet=manet, modes=("sideways",))
    with pytest.raises(ValueError):
        ExperimentConfig(manet=manet, partitions=0)


def test_partition_slices_cover_contiguously():
    slices = _partition_slices(10, 3)
    assert [list(s) for s in slices] == [[0, 1, 2, 3], [4, 5, 6], [7, 8, 9]]
    assert _partition_slices(2, 4)[-1] == range(2, 2)


def test_mean_of_single_sample_is_the_sample_value():
    cfg = ExperimentConfig(
        manet=ManetConfig(node_count=16, timeframes=1, master_seed=3,
                          coverage_radius=0.55),
        max_layers=2, tolerances=(0.0, 0.036), modes=("offline",))
    ensemble = generate_samples(cfg.manet)
    outcomes = rate_ensemble(cfg, ensemble)
    assert len(outcomes) == 1
    rows = ror_rows(cfg, outcomes)
    for _, layer, tol, _, mean, n in rows:
        ti = cfg.tolerances.index(tol)
        assert n == 1
        assert mean == outcomes[0].ror[layer - 1][ti][0]


def test_partitioned_means_recombine_to_global_mean():
    cfg = ExperimentConfig(
        manet=ManetConfig(node_count=16, timeframes=4, master_seed=5,
                          coverage_radius=0.55),
        max_layers=2, tolerances=(0.036,), modes=("offline",), partitions=2)
    ensemble = generate_samples(cfg.manet)
    outcomes = rate_ensemble(cfg, ensemble)
    rows = ror_rows(cfg, outcomes)
    by_part = {(r[0], r[1]): (r[4], r[5]) for r in rows}
    for layer in (1, 2):
        total = math.fsum(o.ror[layer - 1][0][0] for o in outcomes)
        weighted = math.fsum(by_part[(p, layer)][0] * by_part[(p, layer)][1]
                             for p in (0, 1))
        assert weighted == pytest.approx(total, abs=1e-9)


def test_hunting_rows_average_reached_iterations_only():
    cfg = ExperimentConfig(
        manet=ManetConfig(node_count=16, timeframes=2, master_seed=5,
                          coverage_radius=0.55),
        max_layers=3, tolerances=(0.036,), modes=("offline",))
    ensemble = generate_samples(cfg.manet)
    outcomes = rate_ensemble(cfg, ensemble)
    rows = hunting_rows(cfg, outcomes)
    for layer, iteration, mean in rows:
        present = [o.hunting_traces[layer - 1][iteration - 1] for o in outcomes
                   if o.layer_count >= layer
                   and len(o.hunting_traces[layer - 1]) >= iteration]
        assert present
        assert mean == pytest.approx(math.fsum(present) / len(present))


def test_seed42_desk_ensemble_offline_improves_by_layer5():
    """Pinned qualitative run: 50 nodes, 20 frames, offline mode."""
    cfg = ExperimentConfig(
        manet=ManetConfig(node_count=50, timeframes=20, master_seed=42),
        max_layers=5, tolerances=DEFAULT_TOLERANCES, modes=("offline",),
        workers=2)
    ensemble = generate_samples(cfg.manet)
    assert len(ensemble.accepted()) == 20
    outcomes = rate_ensemble(cfg, ensemble)
    rows = ror_rows(cfg, outcomes)
    means = {(r[1], r[2]): r[4] for r in rows}
    for t in DEFAULT_TOLERANCES:
        assert means[(5, t)] < means[(1, t)]
