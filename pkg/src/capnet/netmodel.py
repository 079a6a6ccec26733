"""Graph representation, serialization and validation for routing networks.

Networks are undirected simple graphs over dense integer node ids with a
designated source and sink.  Link ids are the 0-based position in the link
list; every per-link output in the package (loads, directions, FEC
overheads) is indexed by that id.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

# Load-bound slack used when validating flow patterns at this layer.  The LP
# layer compares loads with a much coarser tolerance (see lpcore.EPS_LOAD),
# which dominates in practice.
EPS_BOUND = 1e-9


class NetworkError(ValueError):
    """Malformed or invariant-violating network description."""


@dataclass(frozen=True)
class Network:
    """Undirected simple graph with designated source and sink nodes.

    positions, when present, are (x, y) coordinates in abstract area units
    (carried by MANET-generated samples).
    """

    node_count: int
    links: tuple[tuple[int, int], ...]
    source: int
    sink: int
    positions: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        n = self.node_count
        if n < 1:
            raise NetworkError(f"node_count must be positive, got {n}")
        for end in ("source", "sink"):
            v = getattr(self, end)
            if not (0 <= v < n):
                raise NetworkError(f"{end} {v} is not a valid node id (n={n})")
        if self.source == self.sink:
            raise NetworkError(f"source and sink coincide at node {self.source}")
        seen = set()
        for idx, (u, v) in enumerate(self.links):
            if u == v:
                raise NetworkError(f"link {idx} is a self-loop ({u},{v})")
            if not (0 <= u < n and 0 <= v < n):
                raise NetworkError(f"link {idx} endpoint out of range: ({u},{v})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise NetworkError(f"duplicate link {idx}: ({u},{v})")
            seen.add(key)
        if self.positions is not None and len(self.positions) != n:
            raise NetworkError(
                f"positions count {len(self.positions)} != node_count {n}")

    @property
    def link_count(self) -> int:
        return len(self.links)

    def incident(self) -> list[list[int]]:
        """Per-node list of incident link ids (deterministic order)."""
        inc: list[list[int]] = [[] for _ in range(self.node_count)]
        for lid, (u, v) in enumerate(self.links):
            inc[u].append(lid)
            inc[v].append(lid)
        return inc


@dataclass(frozen=True)
class FlowPattern:
    """Per-link relative loads of a unit source->sink flow.

    loads[l] is the fraction of the total traffic crossing link l;
    directions[l] is the (from, to) orientation of that traffic, or None for
    links carrying no load.
    """

    loads: tuple[float, ...]
    directions: tuple[tuple[int, int] | None, ...]

    def footprint(self, eps: float = EPS_BOUND) -> list[int]:
        """Link ids carrying positive load."""
        return [l for l, r in enumerate(self.loads) if r > eps]

    def to_dict(self) -> dict:
        return {
            "loads": list(self.loads),
            "directions": [list(d) if d is not None else None
                           for d in self.directions],
        }

    @staticmethod
    def from_dict(data: dict) -> "FlowPattern":
        return FlowPattern(
            loads=tuple(float(x) for x in data["loads"]),
            directions=tuple(tuple(d) if d is not None else None
                             for d in data["directions"]),
        )


@dataclass(frozen=True)
class RoutabilityReport:
    """Result of validate_routable: 0 disjoint paths means disconnected."""

    max_disjoint_paths: int


def parse_network(text: str) -> Network:
    """Parse the JSON network format into a validated Network.

    Format: {"nodes": n, "links": [[u,v],...], "source": s, "sink": t,
    "positions": [[x,y],...]} with positions optional.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise NetworkError("top-level value must be an object")
    for key in ("nodes", "links", "source", "sink"):
        if key not in data:
            raise NetworkError(f"missing required key {key!r}")
    nodes = data["nodes"]
    if not isinstance(nodes, int) or isinstance(nodes, bool):
        raise NetworkError(f"'nodes' must be an integer, got {nodes!r}")
    raw_links = data["links"]
    if not isinstance(raw_links, list):
        raise NetworkError("'links' must be a list of [u, v] pairs")
    links = []
    for idx, pair in enumerate(raw_links):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool)
                           for x in pair)):
            raise NetworkError(f"link {idx} must be a pair of node ids, got {pair!r}")
        links.append((pair[0], pair[1]))
    positions = None
    if data.get("positions") is not None:
        raw_pos = data["positions"]
        if not isinstance(raw_pos, list):
            raise NetworkError("'positions' must be a list of [x, y] pairs")
        positions = []
        for idx, xy in enumerate(raw_pos):
            if not isinstance(xy, list) or len(xy) != 2:
                raise NetworkError(f"position {idx} must be an [x, y] pair")
            positions.append((float(xy[0]), float(xy[1])))
        positions = tuple(positions)
    for end in ("source", "sink"):
        if not isinstance(data[end], int) or isinstance(data[end], bool):
            raise NetworkError(f"{end!r} must be an integer node id")
    return Network(node_count=nodes, links=tuple(links),
                   source=data["source"], sink=data["sink"],
                   positions=positions)


def network_to_dict(net: Network) -> dict:
    out = {
        "nodes": net.node_count,
        "links": [list(l) for l in net.links],
        "source": net.source,
        "sink": net.sink,
    }
    if net.positions is not None:
        out["positions"] = [[float(x), float(y)] for x, y in net.positions]
    return out


def serialize_network(net: Network) -> str:
    """Canonical JSON form; parse(serialize(net)) equals net structurally."""
    return json.dumps(network_to_dict(net))


def max_disjoint_paths(net: Network, source: int | None = None,
                       sink: int | None = None) -> int:
    """Maximum number of edge-disjoint source->sink paths.

    Unit-capacity max-flow (Edmonds-Karp) on the bidirected graph; each
    undirected link contributes capacity 1 usable in a single direction.
    """
    s = net.source if source is None else source
    t = net.sink if sink is None else sink
    if s == t:
        raise ValueError("source and sink must differ")
    n = net.node_count
    # residual capacities as adjacency dicts: cap[u][v]
    cap: list[dict[int, int]] = [dict() for _ in range(n)]
    for u, v in net.links:
        cap[u][v] = cap[u].get(v, 0) + 1
        cap[v][u] = cap[v].get(u, 0) + 1
    flow = 0
    while True:
        parent = [-1] * n
        parent[s] = s
        queue = deque([s])
        while queue and parent[t] == -1:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and parent[v] == -1:
                    parent[v] = u
                    queue.append(v)
        if parent[t] == -1:
            return flow
        v = t
        while v != s:
            u = parent[v]
            cap[u][v] -= 1
            cap[v][u] = cap[v].get(u, 0) + 1
            v = u
        flow += 1


def validate_routable(net: Network) -> RoutabilityReport:
    """Report how many edge-disjoint source->sink paths the network admits."""
    return RoutabilityReport(max_disjoint_paths=max_disjoint_paths(net))


def check_pattern(net: Network, pattern: FlowPattern,
                  tol: float = 1e-7) -> None:
    """Assert the FlowPattern invariants against a network.

    Checks load bounds, unit flow conservation and acyclicity of the
    directed positive-load subgraph.  Raises NetworkError on violation.
    """
    if len(pattern.loads) != net.link_count:
        raise NetworkError("pattern size does not match link count")
    balance = [0.0] * net.node_count
    arcs: list[tuple[int, int]] = []
    for lid, r in enumerate(pattern.loads):
        if r < -tol or r > 1.0 + tol:
            raise NetworkError(f"load of link {lid} out of [0,1]: {r}")
        if r > tol:
            dirn = pattern.directions[lid]
            if dirn is None:
                raise NetworkError(f"loaded link {lid} has no direction")
            u, v = dirn
            if {u, v} != set(net.links[lid]):
                raise NetworkError(
                    f"direction {dirn} does not match link {lid} {net.links[lid]}")
            balance[u] += r
            balance[v] -= r
            arcs.append((u, v))
    for node, b in enumerate(balance):
        want = 1.0 if node == net.source else (-1.0 if node == net.sink else 0.0)
        if abs(b - want) > tol:
            raise NetworkError(f"flow imbalance {b - want:.3e} at node {node}")
    # topological check on the directed positive-load subgraph
    indeg = [0] * net.node_count
    out: list[list[int]] = [[] for _ in range(net.node_count)]
    for u, v in arcs:
        out[u].append(v)
        indeg[v] += 1
    queue = deque(i for i in range(net.node_count) if indeg[i] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if seen != net.node_count:
        raise NetworkError("positive-load subgraph contains a directed cycle")
