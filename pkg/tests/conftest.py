"""Shared fixtures and independent oracles for the test suite."""
from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import pytest

from capnet.netmodel import Network


def exact_failure_prob(n: int, m: int, p: Fraction) -> Fraction:
    """Binomial upper tail P(losses >= n-m+1) in exact rational arithmetic."""
    q = 1 - p
    return sum((Fraction(comb(n, k)) * p ** k * q ** (n - k)
                for k in range(n - m + 1, n + 1)), start=Fraction(0))


def exact_block_size(m: int, der: Fraction, p: Fraction) -> int:
    """Minimal block size by exact-rational scan."""
    n = m
    while exact_failure_prob(n, m, p) > der:
        n += 1
    return n


@pytest.fixture
def diamond() -> Network:
    """4 nodes, two disjoint 2-link paths from 0 to 3."""
    return Network(4, ((0, 1), (0, 2), (1, 3), (2, 3)), 0, 3)


@pytest.fixture
def bridge_graph() -> Network:
    """Diamond plus the cross link {1,2}; the bridge stays unloaded."""
    return Network(4, ((0, 1), (0, 2), (1, 3), (2, 3), (1, 2)), 0, 3)


@pytest.fixture
def single_path() -> Network:
    """Path 0-1-2: exactly one route, both links carry everything."""
    return Network(3, ((0, 1), (1, 2)), 0, 2)


def serial_bundles(counts: tuple[int, ...]) -> Network:
    """Chain of parallel 2-link path bundles between successive hub nodes.

    counts[i] disjoint two-link paths join hub i to hub i+1; the first hub
    is the source, the last the sink.  With counts (2, 3, 4) the layered
    construction freezes bounds 1/2, 1/3, 1/4.
    """
    links: list[tuple[int, int]] = []
    hub = 0
    next_id = 1
    for width in counts:
        mids = list(range(next_id, next_id + width))
        next_id += width
        new_hub = next_id
        next_id += 1
        for mid in mids:
            links.append((hub, mid))
            links.append((mid, new_hub))
        hub = new_hub
    return Network(next_id, tuple(links), 0, hub)


def random_connected_network(rng: random.Random, max_nodes: int = 20,
                             require_paths: int = 1) -> Network:
    """Random simple graph with a routable source/sink pair."""
    while True:
        n = rng.randint(3, max_nodes)
        p = rng.uniform(0.15, 0.5)
        links = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < p]
        if len(links) < 2:
            continue
        s, t = rng.sample(range(n), 2)
        net = Network(n, tuple(links), s, t)
        if brute_force_max_flow(net) >= require_paths:
            return net


def brute_force_max_flow(net: Network, source: int | None = None,
                         sink: int | None = None) -> int:
    """Edge-disjoint path count by DFS augmentation on a capacity matrix.

    Deliberately a different algorithm and data layout from the library's
    BFS implementation, so the two can check each other.
    """
    s = net.source if source is None else source
    t = net.sink if sink is None else sink
    n = net.node_count
    cap = [[0] * n for _ in range(n)]
    for u, v in net.links:
        cap[u][v] += 1
        cap[v][u] += 1

    def augment() -> bool:
        seen = [False] * n
        stack = [(s, [])]
        while stack:
            node, path = stack.pop()
            if node == t:
                for a, b in path:
                    cap[a][b] -= 1
                    cap[b][a] += 1
                return True
            if seen[node]:
                continue
            seen[node] = True
            for nxt in range(n - 1, -1, -1):
                if cap[node][nxt] > 0 and not seen[nxt]:
                    stack.append((nxt, path + [(node, nxt)]))
        return False

    total = 0
    while augment():
        total += 1
    return total
