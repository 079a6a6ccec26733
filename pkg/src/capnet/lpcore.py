"""Linear programs over network flows: build and solve.

Every problem shares the same variable layout: two nonnegative arc flows per
undirected link (forward = lower node id to higher) plus, for min-max
problems, one bound variable.  The load of a link is the sum of its two arc
flows.  Constraints are unit flow conservation, fixed-load equalities for
already-frozen links, and per-link load caps.

The solver backend is HiGHS via scipy.linprog; it is deterministic for
identical problem bytes and every returned solution is re-checked against
the feasibility budget below.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.optimize import linprog

from .netmodel import Network

# Feasibility budget enforced on every returned solution.
EPS_FEAS = 1e-8
# Optimality budget contracted against oracles (tested, not enforced inline).
EPS_OPT = 1e-7
# Load-comparison tolerance used by callers when classifying bottlenecks.
EPS_LOAD = 1e-6

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class LpNumericalError(RuntimeError):
    """Solver failed for a reason other than infeasibility; callers treat as fatal."""


class LpInfeasibleError(RuntimeError):
    """Raised by callers for whom an infeasible program indicates a bug."""


@dataclass(frozen=True)
class LpProblem:
    """A flow LP: minimize the load bound, or a weighted sum of loads.

    fixed maps link id -> load pinned by an equality row.  caps maps link
    id -> load upper bound.  weights maps link id -> objective coefficient;
    when weights is None the problem carries an extra bound variable applied
    as a cap to every link not in fixed, and minimizes that bound.
    """

    net: Network
    fixed: tuple[tuple[int, float], ...]
    caps: tuple[tuple[int, float], ...]
    weights: tuple[tuple[int, float], ...] | None

    @property
    def minimax(self) -> bool:
        return self.weights is None


@dataclass(frozen=True)
class LpSolution:
    """Solved flow LP.  arcs[l] = (forward, backward) flows of link l."""

    status: str  # "optimal" | "infeasible"
    objective: float | None = None
    loads: tuple[float, ...] | None = None
    arcs: tuple[tuple[float, float], ...] | None = None


def _sorted_items(mapping: Mapping[int, float]) -> tuple[tuple[int, float], ...]:
    return tuple(sorted((int(k), float(v)) for k, v in mapping.items()))


def minimax_problem(net: Network, fixed: Mapping[int, float]) -> LpProblem:
    """Minimize the common load bound over all links not in fixed."""
    return LpProblem(net=net, fixed=_sorted_items(fixed), caps=(), weights=None)


def weighted_load_problem(net: Network, fixed: Mapping[int, float],
                          weights: Mapping[int, float],
                          caps: Mapping[int, float] | None = None) -> LpProblem:
    """Minimize sum of weights[l] * load(l) under fixed equalities and caps."""
    return LpProblem(net=net, fixed=_sorted_items(fixed),
                     caps=_sorted_items(caps or {}),
                     weights=_sorted_items(weights))


def solve(problem: LpProblem) -> LpSolution:
    """Solve a flow LP; returns an optimal or infeasible LpSolution.

    Optimal solutions satisfy every constraint within EPS_FEAS (verified
    after the solve).  Numerical failures raise LpNumericalError.
    """
    net = problem.net
    nlinks = net.link_count
    nvars = 2 * nlinks + (1 if problem.minimax else 0)
    fixed = dict(problem.fixed)

    c = np.zeros(nvars)
    if problem.minimax:
        c[2 * nlinks] = 1.0
    else:
        for lid, w in problem.weights:
            c[2 * lid] = w
            c[2 * lid + 1] = w

    # conservation rows: out - in = +1 at source, -1 at sink, 0 elsewhere
    n_eq = net.node_count + len(fixed)
    a_eq = np.zeros((n_eq, nvars))
    b_eq = np.zeros(n_eq)
    for lid, (u, v) in enumerate(net.links):
        a_eq[u, 2 * lid] += 1.0      # forward u->v leaves u
        a_eq[v, 2 * lid] -= 1.0
        a_eq[v, 2 * lid + 1] += 1.0  # backward v->u leaves v
        a_eq[u, 2 * lid + 1] -= 1.0
    b_eq[net.source] = 1.0
    b_eq[net.sink] = -1.0
    for row, (lid, load) in enumerate(problem.fixed, start=net.node_count):
        a_eq[row, 2 * lid] = 1.0
        a_eq[row, 2 * lid + 1] = 1.0
        b_eq[row] = load

    if problem.minimax:
        capped = [lid for lid in range(nlinks) if lid not in fixed]
        a_ub = np.zeros((len(capped), nvars))
        b_ub = np.zeros(len(capped))
        for row, lid in enumerate(capped):
            a_ub[row, 2 * lid] = 1.0
            a_ub[row, 2 * lid + 1] = 1.0
            a_ub[row, 2 * nlinks] = -1.0
    else:
        a_ub = np.zeros((len(problem.caps), nvars))
        b_ub = np.zeros(len(problem.caps))
        for row, (lid, cap) in enumerate(problem.caps):
            a_ub[row, 2 * lid] = 1.0
            a_ub[row, 2 * lid + 1] = 1.0
            b_ub[row] = cap

    res = linprog(c, A_ub=a_ub if a_ub.size else None,
                  b_ub=b_ub if b_ub.size else None,
                  A_eq=a_eq, b_eq=b_eq, bounds=(0, None),
                  method="highs", options=_HIGHS_OPTIONS)
    if res.status == 2:
        return LpSolution(status="infeasible")
    if res.status != 0:
        raise LpNumericalError(
            f"solver status {res.status}: {res.message}")

    x = np.asarray(res.x)
    eq_resid = float(np.max(np.abs(a_eq @ x - b_eq))) if n_eq else 0.0
    ub_resid = float(np.max(a_ub @ x - b_ub)) if a_ub.size else 0.0
    lo_resid = float(max(0.0, -np.min(x)))
    if max(eq_resid, ub_resid, lo_resid) > EPS_FEAS:
        raise LpNumericalError(
            f"solution violates feasibility budget: eq={eq_resid:.3e} "
            f"ub={ub_resid:.3e} lb={lo_resid:.3e}")

    arcs = tuple((float(x[2 * l]), float(x[2 * l + 1])) for l in range(nlinks))
    loads = tuple(f + b for f, b in arcs)
    return LpSolution(status="optimal", objective=float(res.fun),
                      loads=loads, arcs=arcs)
