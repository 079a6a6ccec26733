"""Layered construction, bottleneck hunting, completion and cancellation."""
from __future__ import annotations

import random

import pytest

from capnet import capillary, lpcore
from capnet.capillary import (UnroutableError, build_capillary, build_layer,
                              cancel_cycles, complete_residual,
                              decompose_paths, hunt_bottlenecks,
                              layer_pattern, result_from_dict, result_to_dict)
from capnet.lpcore import EPS_LOAD
from capnet.manetgen import ManetConfig, generate_samples
from capnet.netmodel import Network, check_pattern
from .conftest import (brute_force_max_flow, random_connected_network,
                       serial_bundles)


def oracle_bottlenecks(net, fixed, u_k):
    """Links pinned at u_k in every optimum: per-link load minimization.

    A link is a true bottleneck iff its load cannot be pushed below u_k
    anywhere on the capped optimal polytope.
    """
    nonfixed = [l for l in range(net.link_count) if l not in fixed]
    caps = {l: u_k for l in nonfixed}
    found = []
    for lid in nonfixed:
        sol = lpcore.solve(lpcore.weighted_load_problem(
            net, fixed, {lid: 1.0}, caps))
        assert sol.status == "optimal"
        if sol.loads[lid] >= u_k - EPS_LOAD:
            found.append(lid)
    return tuple(found)


def test_diamond_single_layer(diamond):
    result = build_capillary(diamond, max_layers=10)
    assert len(result.layers) == 1
    layer = result.layers[0]
    assert layer.max_load == pytest.approx(0.5, abs=1e-9)
    assert layer.bottlenecks == (0, 1, 2, 3)
    assert layer.hunting_trace == (4,)
    assert result.complete
    assert result.pattern.loads == pytest.approx((0.5,) * 4, abs=1e-8)


def test_bridge_layer_excludes_bridge(bridge_graph):
    layer = build_layer(bridge_graph, {}, 1)
    assert layer.max_load == pytest.approx(0.5, abs=1e-9)
    assert layer.bottlenecks == (0, 1, 2, 3)
    result = build_capillary(bridge_graph)
    assert result.pattern.loads[4] == pytest.approx(0.0, abs=1e-8)
    assert result.complete


def test_single_path_degenerate(single_path):
    result = build_capillary(single_path, max_layers=10)
    assert len(result.layers) == 1
    assert result.layers[0].max_load == pytest.approx(1.0, abs=1e-9)
    assert result.layers[0].bottlenecks == (0, 1)
    assert result.complete
    assert result.pattern.loads == pytest.approx((1.0, 1.0), abs=1e-8)


def test_unroutable_raises():
    net = Network(4, ((0, 1), (2, 3)), 0, 3)
    with pytest.raises(UnroutableError):
        build_capillary(net)


def test_serial_bundles_layer_sequence():
    net = serial_bundles((2, 3, 4))
    result = build_capillary(net, max_layers=10)
    assert [l.max_load for l in result.layers] == pytest.approx(
        [1 / 2, 1 / 3, 1 / 4], abs=1e-8)
    assert [len(l.bottlenecks) for l in result.layers] == [4, 6, 8]
    assert result.complete
    for layer in result.layers:
        trace = layer.hunting_trace
        assert all(a >= b for a, b in zip(trace, trace[1:]))
        assert trace[-1] == len(layer.bottlenecks)


def test_strictly_decreasing_bounds_on_bundles():
    net = serial_bundles((2, 3, 4, 5))
    result = build_capillary(net, max_layers=10)
    bounds = [l.max_load for l in result.layers]
    assert bounds == pytest.approx([1 / 2, 1 / 3, 1 / 4, 1 / 5], abs=1e-8)
    for a, b in zip(bounds, bounds[1:]):
        assert b < a - EPS_LOAD


def test_layer1_bound_is_inverse_max_flow():
    rng = random.Random(2024)
    for _ in range(40):
        net = random_connected_network(rng, max_nodes=20)
        layer = build_layer(net, {}, 1)
        assert abs(layer.max_load - 1.0 / brute_force_max_flow(net)) <= 1e-7


def test_hunting_matches_per_link_oracle():
    # two parallel 2-link paths plus a longer 3-link path
    net = Network(6, ((0, 1), (1, 5), (0, 2), (2, 5), (0, 3), (3, 4), (4, 5)),
                  0, 5)
    sol = lpcore.solve(lpcore.minimax_problem(net, {}))
    u_1 = sol.objective
    bottlenecks, trace = hunt_bottlenecks(net, {}, u_1, seed_loads=sol.loads)
    assert bottlenecks == oracle_bottlenecks(net, {}, u_1)
    assert all(a >= b for a, b in zip(trace, trace[1:]))
    assert trace[-1] == len(bottlenecks)


def test_hunting_matches_oracle_on_random_graphs():
    rng = random.Random(31)
    for _ in range(15):
        net = random_connected_network(rng, max_nodes=12)
        sol = lpcore.solve(lpcore.minimax_problem(net, {}))
        bottlenecks, _ = hunt_bottlenecks(net, {}, sol.objective,
                                          seed_loads=sol.loads)
        assert bottlenecks == oracle_bottlenecks(net, {}, sol.objective)


def test_hunting_discriminates_on_bundle_fixture():
    # layer 1 of the (2,3) chain: only the 2-bundle links are true
    # bottlenecks even when the first vertex solution parks some 3-bundle
    # link at the bound
    net = serial_bundles((2, 3))
    layer = build_layer(net, {}, 1)
    assert layer.bottlenecks == (0, 1, 2, 3)
    assert layer.hunting_trace[-1] == 4


def test_layer_bottlenecks_disjoint_and_bounds_monotone():
    rng = random.Random(77)
    for _ in range(10):
        net = random_connected_network(rng, max_nodes=14, require_paths=2)
        result = build_capillary(net, max_layers=10)
        seen: set[int] = set()
        for layer in result.layers:
            assert not (seen & set(layer.bottlenecks))
            seen.update(layer.bottlenecks)
        bounds = [l.max_load for l in result.layers]
        for a, b in zip(bounds, bounds[1:]):
            assert b <= a + EPS_LOAD


def test_pattern_valid_at_every_truncation():
    rng = random.Random(55)
    for _ in range(8):
        net = random_connected_network(rng, max_nodes=14, require_paths=2)
        result = build_capillary(net, max_layers=10)
        for k in range(1, len(result.layers) + 1):
            pattern = layer_pattern(net, result.layers, k)
            check_pattern(net, pattern, tol=1e-6)
            for lid, want in result.fixed_loads(upto=k).items():
                assert pattern.loads[lid] == pytest.approx(want, abs=EPS_LOAD)


def test_completion_contributes_nothing_when_complete(diamond):
    result = build_capillary(diamond)
    fixed = result.fixed_loads()
    pattern = complete_residual(diamond, fixed)
    residual = sum(pattern.loads[l] for l in range(diamond.link_count)
                   if l not in fixed)
    assert residual <= EPS_LOAD


def test_completion_keeps_bridge_empty(bridge_graph):
    fixed = {0: 0.5, 1: 0.5, 2: 0.5, 3: 0.5}
    pattern = complete_residual(bridge_graph, fixed)
    assert pattern.loads[4] == pytest.approx(0.0, abs=1e-8)


def test_cancel_cycles_nets_two_way_flow(diamond):
    arcs = [(0.5, 0.0), (0.5, 0.0), (0.7, 0.2), (0.5, 0.0)]
    loads, dirs = cancel_cycles(diamond, arcs)
    assert loads == pytest.approx((0.5, 0.5, 0.5, 0.5))
    assert dirs[2] == (1, 3)


def test_cancel_cycles_removes_circulation():
    # square 1-2-3-4 carrying a unit circulation beside the 0->1->5 path
    net = Network(6, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 1), (1, 5)), 0, 5)
    arcs = [(1.0, 0.0), (0.25, 0.0), (0.25, 0.0), (0.25, 0.0), (0.25, 0.0),
            (1.0, 0.0)]
    loads, dirs = cancel_cycles(net, arcs)
    assert loads == pytest.approx((1.0, 0.0, 0.0, 0.0, 0.0, 1.0))
    check_pattern(net, capillary.FlowPattern(loads, dirs))


def test_decompose_paths_diamond(diamond):
    result = build_capillary(diamond)
    paths = decompose_paths(diamond, result.pattern)
    assert sum(w for _, w in paths) == pytest.approx(1.0, abs=1e-9)
    for path, _ in paths:
        assert len(path) == 2


def test_decompose_paths_matches_loads():
    net = serial_bundles((2, 3))
    result = build_capillary(net)
    paths = decompose_paths(net, result.pattern)
    rebuilt = [0.0] * net.link_count
    for path, w in paths:
        for lid in path:
            rebuilt[lid] += w
    assert rebuilt == pytest.approx(list(result.pattern.loads), abs=1e-8)


def test_routing_dict_round_trip(diamond):
    result = build_capillary(diamond)
    data = result_to_dict(result)
    again = result_from_dict(data)
    assert again.layers == result.layers
    assert again.pattern.loads == result.pattern.loads
    assert again.complete == result.complete


def test_manet_sample_regression():
    """Pinned construction on the first accepted seed-42 sample."""
    cfg = ManetConfig(node_count=50, timeframes=20, master_seed=42)
    sample = generate_samples(cfg).accepted()[0]
    net = sample.network
    assert (net.link_count, net.source, net.sink) == (172, 4, 38)
    result = build_capillary(net, max_layers=10)
    assert len(result.layers) == 10
    assert not result.complete
    assert [l.max_load for l in result.layers] == pytest.approx(
        [1 / 4, 1 / 6, 1 / 7, 1 / 9, 1 / 10, 11 / 120, 1 / 12, 1 / 14,
         13 / 225, 1 / 18], abs=1e-8)
    assert [len(l.bottlenecks) for l in result.layers] == [
        8, 6, 7, 12, 5, 4, 3, 8, 5, 1]
    assert result.layers[0].bottlenecks == (30, 31, 32, 33, 67, 90, 94, 146)
    for layer in result.layers:
        trace = layer.hunting_trace
        assert all(a >= b for a, b in zip(trace, trace[1:]))
        assert trace[-1] == len(layer.bottlenecks)
        assert len(trace) <= net.link_count
    # conservation, acyclicity and frozen loads at sampled truncations
    for k in (1, 5, 10):
        pattern = layer_pattern(net, result.layers, k)
        check_pattern(net, pattern, tol=1e-6)
        for lid, want in result.fixed_loads(upto=k).items():
            assert pattern.loads[lid] == pytest.approx(want, abs=EPS_LOAD)
