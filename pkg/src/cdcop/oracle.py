"""Centralized ground-truth utilities.

These deliberately avoid the solver's code paths: costs go through the plain
tree-walk evaluator, and the optimum search is an exhaustive (derivative-free)
lattice scan, so they can arbitrate what the distributed machinery reports.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import CdcopInstance, global_cost
from .expressions import eval_expr

__all__ = [
    "GridSearchSpec",
    "GridTooLargeError",
    "centralized_fitness",
    "grid_optimum",
    "check_anytime",
]

GRID_GUARD = 10_000_000


class GridTooLargeError(ValueError):
    """The requested lattice would exceed the evaluation guard."""


@dataclass(frozen=True)
class GridSearchSpec:
    points_per_dim: int = 21
    max_dims: int = 8

    def __post_init__(self):
        if self.points_per_dim < 2:
            raise ValueError(f"points_per_dim must be >= 2, got {self.points_per_dim}")


def centralized_fitness(inst: CdcopInstance, assignment) -> float:
    """Internal cost of a full assignment, computed by direct summation."""
    return global_cost(inst, assignment)


def grid_optimum(inst: CdcopInstance, spec: GridSearchSpec = GridSearchSpec()) -> tuple[np.ndarray, float]:
    """Best assignment on the rectangular lattice with ``points_per_dim`` per axis.

    Exhaustive and deterministic; ties resolve to the lexicographically
    smallest lattice point. Costs are internal (minimization) sign.
    """
    n = inst.num_agents
    if n > spec.max_dims:
        raise GridTooLargeError(f"{n} agents exceeds max_dims={spec.max_dims}")
    total = spec.points_per_dim ** n
    if total > GRID_GUARD:
        raise GridTooLargeError(f"{total} lattice points exceeds the {GRID_GUARD} guard")

    axes = [np.linspace(inst.domains[i].lb, inst.domains[i].ub, spec.points_per_dim)
            for i in range(n)]
    sign = inst.sign

    best_cost = np.inf
    best_flat = -1
    chunk = 1_000_000
    # lexicographic enumeration in chunks; first strict improvement wins ties
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        flat = np.arange(start, stop)
        coords = np.empty((n, stop - start))
        rem = flat
        for dim in range(n - 1, -1, -1):
            idx = rem % spec.points_per_dim
            coords[dim] = axes[dim][idx]
            rem = rem // spec.points_per_dim
        costs = np.zeros(stop - start)
        for fn in inst.functions:
            u, v = fn.scope
            costs += eval_expr(fn.expr, coords[u], coords[v])
        costs *= sign
        k = int(np.argmin(costs))
        if costs[k] < best_cost:
            best_cost = float(costs[k])
            best_flat = start + k

    assignment = np.empty(n)
    rem = best_flat
    for dim in range(n - 1, -1, -1):
        assignment[dim] = axes[dim][rem % spec.points_per_dim]
        rem //= spec.points_per_dim
    return assignment, best_cost


def check_anytime(costs: Sequence[float], sense: str = "min") -> int | None:
    """First index where the best-so-far series degrades, or None if monotone.

    ``sense="min"`` expects non-increasing values, ``sense="max"``
    non-decreasing (for traces reported in a maximization objective's sign).
    """
    if len(costs) == 0:
        raise ValueError("empty trace")
    flip = -1.0 if sense == "max" else 1.0
    prev = flip * costs[0]
    for i in range(1, len(costs)):
        cur = flip * costs[i]
        if cur > prev:
            return i
        prev = cur
    return None
