"""Continuous DCOP instances: agents, box domains, binary cost functions.

One agent owns one continuous variable. Each cost function couples two
distinct variables through an expression tree. Maximization instances are
handled by negating every function value at evaluation time, so the rest of
the toolkit always minimizes; display helpers restore the original sign.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .expressions import (
    Expression,
    eval_expr,
    format_expr,
    parse_expr,
    referenced_slots,
)

__all__ = [
    "Domain",
    "CostFunction",
    "CdcopInstance",
    "InvalidInstanceError",
    "constraint_cost",
    "global_cost",
    "incident_functions",
    "validate_instance",
    "load_instance",
    "save_instance",
    "instance_to_json",
    "instance_from_json",
]


class InvalidInstanceError(ValueError):
    """Raised when loading an instance that fails validation."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class Domain:
    lb: float
    ub: float

    def contains(self, value: float) -> bool:
        return self.lb <= value <= self.ub


@dataclass(frozen=True)
class CostFunction:
    id: int
    scope: tuple[int, int]  # (variable for slot x0, variable for slot x1)
    expr: Expression


@dataclass(frozen=True)
class CdcopInstance:
    num_agents: int
    domains: tuple[Domain, ...]
    functions: tuple[CostFunction, ...]
    objective: str = "min"  # "min" | "max"

    @property
    def sign(self) -> float:
        """Internal-minimization sign: -1 for maximization instances."""
        return -1.0 if self.objective == "max" else 1.0

    @property
    def num_edges(self) -> int:
        return len(self.functions)

    def neighbors(self, agent: int) -> tuple[int, ...]:
        return _neighbor_table(self)[agent]

    def edges(self) -> list[tuple[int, int]]:
        """Unordered constraint-graph edges as (min, max) pairs."""
        return [tuple(sorted(f.scope)) for f in self.functions]

    def to_display(self, internal_cost: float) -> float:
        """Map an internal (minimization) cost back to the stated objective."""
        return self.sign * internal_cost


def _neighbor_table(inst: CdcopInstance) -> tuple[tuple[int, ...], ...]:
    sets: list[set[int]] = [set() for _ in range(inst.num_agents)]
    for f in inst.functions:
        u, v = f.scope
        sets[u].add(v)
        sets[v].add(u)
    return tuple(tuple(sorted(s)) for s in sets)


def constraint_cost(inst: CdcopInstance, fn_id: int, assignment) -> float:
    """Internal (minimization-sign) cost of one function under a full assignment."""
    fn = inst.functions[_function_index(inst, fn_id)]
    u, v = fn.scope
    return inst.sign * eval_expr(fn.expr, assignment[u], assignment[v])


def global_cost(inst: CdcopInstance, assignment) -> float:
    """Internal cost of a complete assignment: the sum over all functions."""
    sign = inst.sign
    total = 0.0
    for fn in inst.functions:
        u, v = fn.scope
        total += eval_expr(fn.expr, assignment[u], assignment[v])
    return sign * total


def incident_functions(inst: CdcopInstance, agent: int) -> list[int]:
    """Ids of the functions whose scope contains the agent, ascending."""
    return sorted(f.id for f in inst.functions if agent in f.scope)


def _function_index(inst: CdcopInstance, fn_id: int) -> int:
    for i, f in enumerate(inst.functions):
        if f.id == fn_id:
            return i
    raise KeyError(f"no function with id {fn_id}")


def validate_instance(inst: CdcopInstance) -> list[str]:
    """Check every structural invariant; returns a list of violations (empty = ok)."""
    out: list[str] = []
    if inst.num_agents < 1:
        out.append(f"num_agents must be >= 1, got {inst.num_agents}")
        return out
    if len(inst.domains) != inst.num_agents:
        out.append(f"expected {inst.num_agents} domains, got {len(inst.domains)}")
    for i, d in enumerate(inst.domains):
        if not (np.isfinite(d.lb) and np.isfinite(d.ub)):
            out.append(f"domain {i} has non-finite bounds [{d.lb}, {d.ub}]")
        elif d.lb >= d.ub:
            out.append(f"degenerate domain {i}: [{d.lb}, {d.ub}]")
    if inst.objective not in ("min", "max"):
        out.append(f"objective must be 'min' or 'max', got {inst.objective!r}")

    seen_ids: set[int] = set()
    seen_pairs: set[tuple[int, int]] = set()
    for f in inst.functions:
        if f.id in seen_ids:
            out.append(f"duplicate function id {f.id}")
        seen_ids.add(f.id)
        u, v = f.scope
        if not (0 <= u < inst.num_agents and 0 <= v < inst.num_agents):
            out.append(f"function {f.id} scope ({u}, {v}) out of range")
            continue
        if u == v:
            out.append(f"function {f.id} is a self-loop on variable {u}")
            continue
        pair = (min(u, v), max(u, v))
        if pair in seen_pairs:
            out.append(f"duplicate constraint between variables {pair[0]} and {pair[1]}")
        seen_pairs.add(pair)
        slots = referenced_slots(f.expr)
        if slots != {0, 1}:
            out.append(f"function {f.id} must reference both scope slots, uses {sorted(slots)}")

    if inst.num_agents > 1 and not out:
        reached = _reachable_from(inst, 0)
        if len(reached) != inst.num_agents:
            missing = sorted(set(range(inst.num_agents)) - reached)
            out.append(f"disconnected graph: agents {missing} unreachable from agent 0")
    return out


def _reachable_from(inst: CdcopInstance, start: int) -> set[int]:
    table = _neighbor_table(inst)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in table[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


# --- JSON instance files -----------------------------------------------------

def instance_to_json(inst: CdcopInstance) -> str:
    doc = {
        "num_agents": inst.num_agents,
        "domains": [[d.lb, d.ub] for d in inst.domains],
        "objective": inst.objective,
        "functions": [
            {"id": f.id, "scope": list(f.scope), "expr": format_expr(f.expr)}
            for f in inst.functions
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def instance_from_json(text: str) -> CdcopInstance:
    doc = json.loads(text)
    inst = CdcopInstance(
        num_agents=int(doc["num_agents"]),
        domains=tuple(Domain(float(lb), float(ub)) for lb, ub in doc["domains"]),
        functions=tuple(
            CostFunction(
                id=int(f["id"]),
                scope=(int(f["scope"][0]), int(f["scope"][1])),
                expr=parse_expr(f["expr"]),
            )
            for f in doc["functions"]
        ),
        objective=str(doc.get("objective", "min")),
    )
    violations = validate_instance(inst)
    if violations:
        raise InvalidInstanceError(violations)
    return inst


def save_instance(inst: CdcopInstance, path) -> None:
    Path(path).write_text(instance_to_json(inst))


def load_instance(path) -> CdcopInstance:
    return instance_from_json(Path(path).read_text())
