"""Decentralized particle-swarm solver over a pseudo-tree (PCD).

Every agent owns one coordinate of each of the K particles. A cycle runs
four steps on top of the synchronous runtime:

* evaluation — with neighbor positions in hand, each agent sums its incident
  cost functions per particle, adds the children's aggregated fitness, and
  forwards the result to its parent; the root halves the total because every
  binary constraint was counted by both endpoints.
* best update — the root advances personal/global bests under strict
  less-than and broadcasts the improved particle indices plus the new best
  particle (if any); receivers snapshot their own coordinates for those
  indices.
* optional crossover — each agent blends two of its local coordinates,
  selected with probability proportional to |local fitness|.
* variable update — guaranteed-convergence PSO velocity rules: the global
  best particle does a directed random walk of diameter ``radius`` around
  the global best position, everything else follows the usual
  cognitive/social pull. Success/failure streaks double or halve ``radius``.

All randomness comes from per-agent labeled substreams of the run seed, so
traces are reproducible and enabling crossover does not perturb the
initialization or velocity draws.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import CdcopInstance, incident_functions
from .expressions import compile_expr
from .pseudotree import PseudoTree, build_bfs
from .runtime import BestPayload, CycleStats, SyncRuntime

__all__ = [
    "FixedInertia",
    "AdaptiveInertia",
    "ConstrictionInertia",
    "SwarmConfig",
    "validate_config",
    "GcpsoControl",
    "ConfigError",
    "MissingMessage",
    "inertia_weight",
    "update_control",
    "velocity_standard",
    "velocity_constricted",
    "velocity_global_best",
    "crossover_probabilities",
    "crossover_positions",
    "crossover_velocities",
    "SwarmAgent",
    "TraceRow",
    "RunTrace",
    "solve",
]


class ConfigError(ValueError):
    """Invalid solver configuration."""


class MissingMessage(RuntimeError):
    """A phase handler was invoked without its required messages."""


# --- inertia schedules -------------------------------------------------------

@dataclass(frozen=True)
class FixedInertia:
    w: float


@dataclass(frozen=True)
class AdaptiveInertia:
    """Linear inertia schedule from w_max down to w_min over the run.

    ``literal_increasing`` switches to the increasing ramp
    (w_max - w_min) * t / t_max instead; off by default.
    """

    w_max: float = 1.4
    w_min: float = 0.4
    literal_increasing: bool = False


@dataclass(frozen=True)
class ConstrictionInertia:
    """Constant constriction weight derived from phi = c1 + c2 > 4."""

    phi: float = 4.1


InertiaSchedule = FixedInertia | AdaptiveInertia | ConstrictionInertia


def inertia_weight(schedule: InertiaSchedule, t: int, t_max: int) -> float:
    """Inertia weight at cycle ``t`` of ``t_max``."""
    match schedule:
        case FixedInertia(w=w):
            return w
        case AdaptiveInertia(w_max=hi, w_min=lo, literal_increasing=inc):
            frac = t / t_max
            return (hi - lo) * frac if inc else hi - (hi - lo) * frac
        case ConstrictionInertia(phi=phi):
            if phi <= 4.0:
                raise ConfigError(f"constriction requires phi > 4, got {phi}")
            return 2.0 / abs(2.0 - phi - math.sqrt(phi * phi - 4.0 * phi))
    raise TypeError(f"unknown inertia schedule: {schedule!r}")


# --- configuration and control state ------------------------------------------

@dataclass(frozen=True)
class SwarmConfig:
    num_particles: int = 200
    c1: float = 1.49
    c2: float = 1.49
    inertia: InertiaSchedule = AdaptiveInertia()
    max_sc: int = 15
    max_fc: int = 5
    t_max: int = 500
    crossover: bool = False
    seed: int = 0


def validate_config(cfg: SwarmConfig) -> None:
    if cfg.num_particles < 2:
        raise ConfigError(f"need at least 2 particles, got {cfg.num_particles}")
    if cfg.c1 <= 0 or cfg.c2 <= 0:
        raise ConfigError(f"c1 and c2 must be positive, got {cfg.c1}, {cfg.c2}")
    if cfg.max_sc < 1 or cfg.max_fc < 1:
        raise ConfigError("success/failure thresholds must be >= 1")
    if cfg.t_max < 1:
        raise ConfigError(f"t_max must be >= 1, got {cfg.t_max}")
    if isinstance(cfg.inertia, ConstrictionInertia):
        phi = cfg.inertia.phi
        if phi <= 4.0:
            raise ConfigError(f"constriction requires phi = c1 + c2 > 4, got {phi}")
        if not math.isclose(cfg.c1 + cfg.c2, phi, rel_tol=1e-9):
            raise ConfigError(f"constriction phi {phi} must equal c1 + c2 = {cfg.c1 + cfg.c2}")
    if isinstance(cfg.inertia, AdaptiveInertia) and cfg.inertia.w_max < cfg.inertia.w_min:
        raise ConfigError("adaptive inertia needs w_max >= w_min")


@dataclass
class GcpsoControl:
    """Shared exploration-control state, kept identical on every agent."""

    cycle: int = 0
    successes: int = 0
    failures: int = 0
    radius: float = 1.0
    best_particle: int | None = None


def update_control(ctrl: GcpsoControl, improved: bool, cfg: SwarmConfig) -> None:
    """Advance success/failure streaks, then rescale the exploration radius.

    The radius step looks at the streak values from the *previous* cycle, so
    a threshold crossing takes effect on the following update.
    """
    prev_s, prev_f = ctrl.successes, ctrl.failures
    if improved:
        ctrl.successes += 1
        ctrl.failures = 0
    else:
        ctrl.successes = 0
        ctrl.failures += 1
    if prev_s > cfg.max_sc:
        ctrl.radius *= 2.0
    elif prev_f > cfg.max_fc:
        ctrl.radius *= 0.5


# --- update equations (pure helpers, shared by the agent and the tests) -------

def velocity_standard(v, x, p_best, g_best, w, c1, c2, r1, r2):
    return w * v + (r1 * c1) * (p_best - x) + (r2 * c2) * (g_best - x)


def velocity_constricted(v, x, p_best, g_best, w, c1, c2, r1, r2):
    return w * (v + (r1 * c1) * (p_best - x) + (r2 * c2) * (g_best - x))


def velocity_global_best(v, x, g_best, w, radius, r2):
    return -x + g_best + w * v + radius * (1.0 - 2.0 * r2)


def crossover_probabilities(local_fitness: np.ndarray) -> np.ndarray:
    """Selection weights proportional to |local fitness|; uniform when all zero."""
    weights = np.abs(local_fitness)
    total = weights.sum()
    if total == 0.0:
        return np.full(len(weights), 1.0 / len(weights))
    return weights / total


def crossover_positions(xa: float, xb: float, r: float) -> tuple[float, float]:
    return r * xa + (1.0 - r) * xb, r * xb + (1.0 - r) * xa


def crossover_velocities(va: float, vb: float) -> tuple[float, float] | None:
    """Align both velocities with the sign of their sum; None if the sum is zero."""
    total = va + vb
    if total == 0.0:
        return None
    unit = 1.0 if total > 0.0 else -1.0
    return unit * abs(va), unit * abs(vb)


# --- the agent -----------------------------------------------------------------

class SwarmAgent:
    """One agent's slice of the swarm plus its runtime phase handlers."""

    def __init__(self, agent_id: int, inst: CdcopInstance, tree: PseudoTree,
                 cfg: SwarmConfig, record_eval: bool = False):
        self.id = agent_id
        self.cfg = cfg
        self.is_root = agent_id == tree.root
        self.neighbors = tree.neighbors[agent_id]
        self.children = tree.children[agent_id]
        self.parent = tree.parent[agent_id]
        dom = inst.domains[agent_id]
        self.lb, self.ub = dom.lb, dom.ub
        self._record_eval = record_eval

        # incident cost terms: (compiled fn, my scope slot is 0?, neighbor id)
        sign = inst.sign
        self.terms = []
        by_id = {f.id: f for f in inst.functions}
        for fid in incident_functions(inst, agent_id):
            f = by_id[fid]
            first = f.scope[0] == agent_id
            peer = f.scope[1] if first else f.scope[0]
            self.terms.append((compile_expr(f.expr), first, peer, sign))

        # labeled substreams: initialization, per-cycle velocity draws, crossover
        make = lambda label: np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(agent_id, label))))
        rng_init = make(0)
        self.rng_update = make(1)
        self.rng_cross = make(2)

        K = cfg.num_particles
        self.x = rng_init.uniform(self.lb, self.ub, size=K)
        self.v = np.zeros(K)
        self.local_fitness = np.zeros(K)
        self.fitness = np.zeros(K)
        self.p_best_x = np.zeros(K)  # never read before the first best update fills it
        self.p_best_fit = np.full(K, np.inf) if self.is_root else None
        self.g_best_x = 0.0
        self.g_best_fit = np.inf
        self.b_p = np.zeros(K)  # last cycle's crossover selection weights
        self.control = GcpsoControl()
        self._constricted = isinstance(cfg.inertia, ConstrictionInertia)
        self._improved = False
        self._crossed_full: tuple[int, ...] = ()
        self.eval_x: np.ndarray | None = None

    # -- runtime handlers, in phase order --

    def value_payload(self) -> np.ndarray:
        return self.x

    def handle_values(self, by_sender: dict[int, np.ndarray]) -> None:
        if len(by_sender) != len(self.neighbors):
            raise MissingMessage(
                f"agent {self.id} expected positions from {len(self.neighbors)} neighbors, "
                f"got {len(by_sender)}")
        if self._record_eval:
            self.eval_x = self.x.copy()
        lf = np.zeros(len(self.x))
        x = self.x
        for fn, self_first, peer, sign in self.terms:
            other = by_sender[peer]
            val = fn(x, other) if self_first else fn(other, x)
            if sign < 0:
                lf -= val
            else:
                lf += val
        self.local_fitness = lf

    def handle_costs(self, by_child: dict[int, np.ndarray]) -> None:
        total = self.local_fitness.copy()
        for child in self.children:
            total += by_child[child]
        if self.is_root:
            total *= 0.5
        self.fitness = total

    def cost_payload(self) -> np.ndarray:
        return self.fitness

    def best_payload(self) -> BestPayload:
        fit = self.fitness
        mask = fit < self.p_best_fit
        improved = np.flatnonzero(mask)
        self.p_best_fit[improved] = fit[improved]
        self.p_best_x[improved] = self.x[improved]
        k = int(np.argmin(fit))
        if fit[k] < self.g_best_fit:
            self.g_best_fit = float(fit[k])
            self.g_best_x = float(self.x[k])
            self.control.best_particle = k
            best_index, best_fitness = k, float(fit[k])
        else:
            best_index, best_fitness = None, None
        self._improved = best_index is not None
        return BestPayload(tuple(int(i) for i in improved), best_index, best_fitness)

    def handle_best(self, payload: BestPayload) -> None:
        if payload.improved:
            idx = list(payload.improved)
            self.p_best_x[idx] = self.x[idx]
        if payload.best_index is not None:
            self.control.best_particle = payload.best_index
            self.g_best_x = float(self.x[payload.best_index])
            self.g_best_fit = float(payload.best_fitness)
        self._improved = payload.best_index is not None

    def end_cycle(self) -> None:
        self.control.cycle += 1
        if self.cfg.crossover:
            self._apply_crossover()
        update_control(self.control, self._improved, self.cfg)
        self._variable_update()

    # -- local update steps --

    def _apply_crossover(self) -> None:
        rng = self.rng_cross
        K = len(self.x)
        self.b_p = crossover_probabilities(self.local_fitness)
        bp = self.b_p.copy()
        cdf = bp.cumsum()
        a = min(int(cdf.searchsorted(rng.random() * cdf[-1], side="right")), K - 1)
        bp[a] = 0.0
        cdf = bp.cumsum()
        if cdf[-1] == 0.0:
            # only one particle carried weight: pick its partner uniformly
            b = int(rng.integers(0, K - 1))
            if b >= a:
                b += 1
        else:
            b = min(int(cdf.searchsorted(rng.random() * cdf[-1], side="right")), K - 1)
        r = float(rng.random())
        self.x[a], self.x[b] = crossover_positions(self.x[a], self.x[b], r)
        crossed = crossover_velocities(self.v[a], self.v[b])
        if crossed is None:
            # zero velocity sum: positions keep the blend, velocities (and the
            # position step) fall through to the regular update this cycle
            self._crossed_full = ()
        else:
            self.v[a], self.v[b] = crossed
            self._crossed_full = (a, b)

    def _draw_update_randoms(self) -> tuple[float, float]:
        r = self.rng_update.random(2)
        return float(r[0]), float(r[1])

    def _variable_update(self) -> None:
        cfg = self.cfg
        ctrl = self.control
        w = inertia_weight(cfg.inertia, ctrl.cycle, cfg.t_max)
        r1, r2 = self._draw_update_randoms()
        x, v = self.x, self.v
        # same math as velocity_standard/velocity_constricted, minus temporaries
        v_new = self.p_best_x - x
        v_new *= r1 * cfg.c1
        social = self.g_best_x - x
        social *= r2 * cfg.c2
        v_new += social
        if self._constricted:
            v_new += v
            v_new *= w
        else:
            v_new += w * v
        k_star = ctrl.best_particle
        if k_star is not None:
            v_new[k_star] = velocity_global_best(v[k_star], x[k_star], self.g_best_x, w, ctrl.radius, r2)
        for k in self._crossed_full:  # pair fully set by crossover: no regular step
            v_new[k] = v[k]
        x_new = x + v_new
        for k in self._crossed_full:
            x_new[k] = x[k]
        x_new.clip(self.lb, self.ub, out=x_new)
        self.x = x_new
        self.v = v_new
        self._crossed_full = ()


# --- solve ---------------------------------------------------------------------

@dataclass(frozen=True)
class TraceRow:
    cycle: int
    best_cost: float       # in the instance's stated objective sign
    best_internal: float   # minimization sign, monotone non-increasing
    assignment: tuple[float, ...]
    stats: CycleStats


@dataclass
class RunTrace:
    objective: str
    num_agents: int
    num_edges: int
    tree_height: int
    rows: list[TraceRow]
    best_assignment: np.ndarray
    best_cost: float
    best_internal: float
    probes: list[tuple[np.ndarray, np.ndarray]] | None = None
    messages: list | None = None

    @property
    def hops_per_cycle(self) -> int:
        return 1 + 2 * self.tree_height

    def internal_series(self) -> list[float]:
        return [row.best_internal for row in self.rows]

    def display_series(self) -> list[float]:
        return [row.best_cost for row in self.rows]


def solve(inst: CdcopInstance, cfg: SwarmConfig, tree: PseudoTree | None = None,
          root: int = 0, record_probes: bool = False,
          log_messages: bool = False) -> RunTrace:
    """Run the swarm for ``cfg.t_max`` cycles and return the anytime trace.

    ``record_probes`` additionally stores, per cycle, the full position
    matrix that was evaluated and the root's fitness vector, for
    cross-checking against the centralized oracle.
    """
    validate_config(cfg)
    if tree is None:
        tree = build_bfs(inst, root)
    agents = [SwarmAgent(i, inst, tree, cfg, record_eval=record_probes)
              for i in range(inst.num_agents)]
    runtime = SyncRuntime(tree, log_messages=log_messages)
    root_agent = agents[tree.root]

    rows: list[TraceRow] = []
    probes: list[tuple[np.ndarray, np.ndarray]] | None = [] if record_probes else None
    for t in range(1, cfg.t_max + 1):
        stats = runtime.run_cycle(agents, t)
        if probes is not None:
            positions = np.stack([a.eval_x for a in agents])
            probes.append((positions, root_agent.fitness.copy()))
        internal = root_agent.g_best_fit
        assignment = tuple(a.g_best_x for a in agents)
        rows.append(TraceRow(t, inst.to_display(internal), internal, assignment, stats))

    trace = RunTrace(
        objective=inst.objective,
        num_agents=inst.num_agents,
        num_edges=inst.num_edges,
        tree_height=tree.height,
        rows=rows,
        best_assignment=np.array([a.g_best_x for a in agents]),
        best_cost=inst.to_display(root_agent.g_best_fit),
        best_internal=root_agent.g_best_fit,
        probes=probes,
        messages=runtime.log,
    )
    return trace
