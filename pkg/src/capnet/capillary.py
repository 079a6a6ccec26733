"""Layered construction of steadily diversifying multi-path routing patterns.

Each layer minimizes the maximal load over the links not yet frozen, then a
hunting loop separates the true bottlenecks (links at the layer bound in
every optimum) from incidentally maximal ones.  Bottleneck loads are frozen
by equality and the next layer refines the rest.  A min-cost completion of
whatever flow is not yet enclosed in bottlenecks yields the final pattern.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from . import lpcore
from .lpcore import EPS_LOAD, LpInfeasibleError
from .netmodel import FlowPattern, Network, max_disjoint_paths

# loads below this are treated as exact zeros when cancelling circulation
_EPS_ZERO = 1e-12


class UnroutableError(ValueError):
    """The network admits no source->sink path at all."""


@dataclass(frozen=True)
class LayerResult:
    """One construction layer: its minimized bound and frozen bottlenecks."""

    index: int                       # 1-based layer number
    max_load: float                  # minimized maximal load u_k
    bottlenecks: tuple[int, ...]     # link ids frozen at max_load
    hunting_trace: tuple[int, ...]   # suspect-set size after each hunt iteration


@dataclass(frozen=True)
class CapillaryResult:
    layers: tuple[LayerResult, ...]
    pattern: FlowPattern
    complete: bool                   # every loaded link is a frozen bottleneck

    def fixed_loads(self, upto: int | None = None) -> dict[int, float]:
        """Frozen link->load map of layers 1..upto (all layers when None)."""
        sel = self.layers if upto is None else self.layers[:upto]
        return {l: layer.max_load for layer in sel for l in layer.bottlenecks}


def cancel_cycles(net: Network, arcs: Sequence[tuple[float, float]],
                  ) -> tuple[tuple[float, ...], tuple[tuple[int, int] | None, ...]]:
    """Reduce an arc flow to acyclic per-link loads and directions.

    Two-way flow on a link is netted out first; remaining directed cycles
    are cancelled lowest link id first, so the result is deterministic.
    """
    loads = [0.0] * net.link_count
    dirs: list[tuple[int, int] | None] = [None] * net.link_count
    for lid, (fwd, back) in enumerate(arcs):
        flow = fwd - back
        u, v = net.links[lid]
        if flow < 0:
            u, v, flow = v, u, -flow
        if flow <= _EPS_ZERO:
            continue
        loads[lid] = flow
        dirs[lid] = (u, v)

    while True:
        cycle = _find_cycle(net, loads, dirs)
        if cycle is None:
            break
        delta = min(loads[lid] for lid in cycle)
        floor = min(range(len(cycle)), key=lambda i: loads[cycle[i]])
        for i, lid in enumerate(cycle):
            loads[lid] -= delta
            if i == floor or loads[lid] <= _EPS_ZERO:
                loads[lid] = 0.0
                dirs[lid] = None

    return tuple(loads), tuple(dirs)


def _find_cycle(net: Network, loads: Sequence[float],
                dirs: Sequence[tuple[int, int] | None]) -> list[int] | None:
    """First directed cycle of the positive-load subgraph, as link ids."""
    out: list[list[tuple[int, int]]] = [[] for _ in range(net.node_count)]
    for lid in range(net.link_count):
        if loads[lid] > 0.0:
            u, v = dirs[lid]
            out[u].append((lid, v))
    for adj in out:
        adj.sort()

    color = [0] * net.node_count  # 0 new, 1 on stack, 2 done
    for start in range(net.node_count):
        if color[start] != 0:
            continue
        # stack of (node, iterator index); via[n] = link that entered n
        stack = [(start, 0)]
        via: dict[int, int] = {}
        color[start] = 1
        while stack:
            node, idx = stack[-1]
            if idx < len(out[node]):
                stack[-1] = (node, idx + 1)
                lid, nxt = out[node][idx]
                if color[nxt] == 1:
                    cycle = [lid]
                    cur = node
                    while cur != nxt:
                        cycle.append(via[cur])
                        cur = _arc_from(net, dirs, via[cur])
                    cycle.reverse()
                    return cycle
                if color[nxt] == 0:
                    color[nxt] = 1
                    via[nxt] = lid
                    stack.append((nxt, 0))
            else:
                color[node] = 2
                stack.pop()
    return None


def _arc_from(net: Network, dirs: Sequence[tuple[int, int] | None],
              lid: int) -> int:
    return dirs[lid][0]


def build_layer(net: Network, fixed: Mapping[int, float], k: int) -> LayerResult:
    """Minimize the maximal load of non-frozen links and hunt its bottlenecks.

    A vanishing bound means the remaining flow needs no additional links;
    the returned layer then carries no bottlenecks and callers treat the
    construction as complete.
    """
    sol = lpcore.solve(lpcore.minimax_problem(net, fixed))
    if sol.status != "optimal":
        raise LpInfeasibleError(
            f"layer {k}: fixed-load system infeasible (internal inconsistency)")
    u_k = sol.objective
    if u_k <= EPS_LOAD:
        return LayerResult(index=k, max_load=u_k, bottlenecks=(), hunting_trace=())
    bottlenecks, trace = hunt_bottlenecks(net, fixed, u_k, seed_loads=sol.loads)
    return LayerResult(index=k, max_load=u_k, bottlenecks=bottlenecks,
                       hunting_trace=trace)


def hunt_bottlenecks(net: Network, fixed: Mapping[int, float], u_k: float,
                     seed_loads: Sequence[float] | None = None,
                     ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Fixed-point loop isolating the links at u_k in every optimum.

    Starting from the links at maximal load in the minimizing solution, each
    iteration minimizes the total load over the remaining suspects (all
    non-frozen links stay capped at u_k) and drops every suspect whose load
    falls below the bound.  Returns the surviving set and the per-iteration
    suspect counts.
    """
    if seed_loads is None:
        sol = lpcore.solve(lpcore.minimax_problem(net, fixed))
        if sol.status != "optimal":
            raise LpInfeasibleError("fixed-load system infeasible")
        seed_loads = sol.loads
    nonfixed = [l for l in range(net.link_count) if l not in fixed]
    caps = {l: u_k for l in nonfixed}
    suspects = {l for l in nonfixed if seed_loads[l] >= u_k - EPS_LOAD}
    trace: list[int] = []
    while True:
        weights = {l: 1.0 for l in suspects}
        sol = lpcore.solve(lpcore.weighted_load_problem(net, fixed, weights, caps))
        if sol.status != "optimal":
            raise LpInfeasibleError("hunting system infeasible")
        dropped = {l for l in suspects if sol.loads[l] < u_k - EPS_LOAD}
        suspects -= dropped
        trace.append(len(suspects))
        if not dropped:
            return tuple(sorted(suspects)), tuple(trace)


def complete_residual(net: Network, fixed: Mapping[int, float]) -> FlowPattern:
    """Min-cost completion of the flow not enclosed in frozen bottlenecks.

    Minimizes the total load over non-frozen links subject to conservation
    and the frozen equalities, then cancels circulation so the pattern is
    acyclic.
    """
    weights = {l: 1.0 for l in range(net.link_count) if l not in fixed}
    sol = lpcore.solve(lpcore.weighted_load_problem(net, fixed, weights, caps=None))
    if sol.status != "optimal":
        raise LpInfeasibleError("residual completion infeasible")
    loads, dirs = cancel_cycles(net, sol.arcs)
    return FlowPattern(loads=loads, directions=dirs)


def build_capillary(net: Network, max_layers: int = 10) -> CapillaryResult:
    """Run the layer loop until the footprint is enclosed or max_layers."""
    if max_layers < 1:
        raise ValueError("max_layers must be >= 1")
    if max_disjoint_paths(net) < 1:
        raise UnroutableError("no path from source to sink")
    fixed: dict[int, float] = {}
    layers: list[LayerResult] = []
    for k in range(1, max_layers + 1):
        layer = build_layer(net, fixed, k)
        if not layer.bottlenecks:
            break
        layers.append(layer)
        for lid in layer.bottlenecks:
            fixed[lid] = layer.max_load
    pattern = complete_residual(net, fixed)
    residual = sum(pattern.loads[l] for l in range(net.link_count)
                   if l not in fixed)
    return CapillaryResult(layers=tuple(layers), pattern=pattern,
                           complete=residual <= EPS_LOAD)


def layer_pattern(net: Network, layers: Sequence[LayerResult], k: int) -> FlowPattern:
    """Routing pattern as of layer k: frozen loads of layers 1..k plus completion."""
    fixed = {l: layer.max_load for layer in layers[:k] for l in layer.bottlenecks}
    return complete_residual(net, fixed)


def decompose_paths(net: Network, pattern: FlowPattern,
                    ) -> list[tuple[tuple[int, ...], float]]:
    """Split an acyclic pattern into source->sink paths with weights.

    Path weights sum to the unit flow; each link's load is the sum of the
    weights of the paths crossing it.  Follows lowest link ids first.
    """
    remaining = list(pattern.loads)
    out: list[list[tuple[int, int]]] = [[] for _ in range(net.node_count)]
    for lid, d in enumerate(pattern.directions):
        if d is not None and remaining[lid] > _EPS_ZERO:
            out[d[0]].append((lid, d[1]))
    for adj in out:
        adj.sort()
    paths: list[tuple[tuple[int, ...], float]] = []
    while True:
        node = net.source
        path: list[int] = []
        while node != net.sink:
            step = next(((lid, nxt) for lid, nxt in out[node]
                         if remaining[lid] > _EPS_ZERO), None)
            if step is None:
                break
            path.append(step[0])
            node = step[1]
        if node != net.sink or not path:
            return paths
        weight = min(remaining[lid] for lid in path)
        for lid in path:
            remaining[lid] -= weight
            if remaining[lid] <= _EPS_ZERO:
                remaining[lid] = 0.0
        paths.append((tuple(path), weight))


def result_to_dict(result: CapillaryResult) -> dict:
    """Routing output schema used by the CLI."""
    return {
        "layers": [
            {"k": layer.index, "u": layer.max_load,
             "bottlenecks": list(layer.bottlenecks),
             "hunting_trace": list(layer.hunting_trace)}
            for layer in result.layers
        ],
        "pattern": result.pattern.to_dict(),
        "complete": result.complete,
    }


def result_from_dict(data: dict) -> CapillaryResult:
    layers = tuple(
        LayerResult(index=entry["k"], max_load=float(entry["u"]),
                    bottlenecks=tuple(entry["bottlenecks"]),
                    hunting_trace=tuple(entry["hunting_trace"]))
        for entry in data["layers"]
    )
    return CapillaryResult(layers=layers,
                           pattern=FlowPattern.from_dict(data["pattern"]),
                           complete=bool(data["complete"]))
