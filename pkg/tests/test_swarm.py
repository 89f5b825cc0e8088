import numpy as np
import pytest
from hypothesis import given, strategies as st

from cdcop import build_bfs, global_cost
from cdcop.runtime import SyncRuntime
from cdcop.swarm import (
    AdaptiveInertia,
    ConfigError,
    ConstrictionInertia,
    FixedInertia,
    GcpsoControl,
    MissingMessage,
    SwarmAgent,
    SwarmConfig,
    crossover_positions,
    crossover_probabilities,
    crossover_velocities,
    inertia_weight,
    solve,
    update_control,
    validate_config,
    velocity_constricted,
    velocity_global_best,
    velocity_standard,
)

from conftest import (
    KITE_CROSSOVER_P,
    KITE_GBEST,
    KITE_LOCAL_FITNESS,
    KITE_POSITIONS,
    KITE_ROOT_FITNESS,
    KITE_UPDATED_V,
    KITE_UPDATED_X,
)

TABLE = dict(rtol=0.0, atol=5e-3)  # two printed decimals


# --- inertia schedules ---------------------------------------------------------

def test_adaptive_endpoints_and_midpoint():
    sched = AdaptiveInertia(1.4, 0.4)
    assert inertia_weight(sched, 0, 100) == pytest.approx(1.4)
    assert inertia_weight(sched, 100, 100) == pytest.approx(0.4)
    assert inertia_weight(sched, 50, 100) == pytest.approx(0.9)


def test_adaptive_literal_increasing_ramp():
    sched = AdaptiveInertia(1.4, 0.4, literal_increasing=True)
    assert inertia_weight(sched, 0, 100) == 0.0
    assert inertia_weight(sched, 100, 100) == pytest.approx(1.0)


def test_constriction_weight_value():
    assert inertia_weight(ConstrictionInertia(4.1), 3, 10) == pytest.approx(0.7298, abs=1e-4)


def test_constriction_rejects_small_phi():
    with pytest.raises(ConfigError):
        inertia_weight(ConstrictionInertia(4.0), 0, 1)


def test_fixed_inertia():
    assert inertia_weight(FixedInertia(0.72), 5, 10) == 0.72


# --- configuration --------------------------------------------------------------

def test_config_defaults_valid():
    validate_config(SwarmConfig())


@pytest.mark.parametrize("bad", [
    SwarmConfig(num_particles=1),
    SwarmConfig(num_particles=0),
    SwarmConfig(c1=0.0),
    SwarmConfig(max_sc=0),
    SwarmConfig(t_max=0),
    SwarmConfig(inertia=ConstrictionInertia(3.9), c1=1.95, c2=1.95),
    SwarmConfig(inertia=ConstrictionInertia(4.1)),  # phi != c1 + c2
])
def test_config_rejections(bad):
    with pytest.raises(ConfigError):
        validate_config(bad)


def test_constriction_config_accepts_matching_phi():
    validate_config(SwarmConfig(inertia=ConstrictionInertia(4.1), c1=2.05, c2=2.05))


# --- success/failure control -----------------------------------------------------

def test_first_improvement_keeps_radius():
    ctrl = GcpsoControl()
    update_control(ctrl, True, SwarmConfig())
    assert (ctrl.successes, ctrl.failures, ctrl.radius) == (1, 0, 1.0)


def test_radius_doubles_after_streak_exceeds_threshold():
    cfg = SwarmConfig()
    ctrl = GcpsoControl()
    for _ in range(16):
        update_control(ctrl, True, cfg)
    assert ctrl.successes == 16 and ctrl.radius == 1.0
    update_control(ctrl, True, cfg)  # previous streak 16 > 15 fires now
    assert ctrl.radius == 2.0


def test_radius_halves_after_failure_streak():
    cfg = SwarmConfig()
    ctrl = GcpsoControl()
    for _ in range(6):
        update_control(ctrl, False, cfg)
    assert ctrl.failures == 6 and ctrl.radius == 1.0
    update_control(ctrl, False, cfg)
    assert ctrl.radius == 0.5


def test_streaks_are_mutually_exclusive():
    cfg = SwarmConfig()
    ctrl = GcpsoControl()
    for improved in (True, True, False, True, False, False):
        update_control(ctrl, improved, cfg)
        assert ctrl.successes * ctrl.failures == 0


# --- golden one-cycle trace ------------------------------------------------------

def _primed_agents(kite_instance, monkeypatch=None):
    cfg = SwarmConfig(num_particles=4, inertia=FixedInertia(0.72), c1=1.49, c2=1.49,
                      t_max=100, seed=3)
    tree = build_bfs(kite_instance, 0)
    agents = [SwarmAgent(i, kite_instance, tree, cfg) for i in range(4)]
    for i, agent in enumerate(agents):
        agent.x = KITE_POSITIONS[i].copy()
        agent.v = np.zeros(4)
        agent._draw_update_randoms = lambda: (0.7, 0.4)
    return tree, agents


def test_one_cycle_reproduces_hand_tables(kite_instance):
    tree, agents = _primed_agents(kite_instance)
    rt = SyncRuntime(tree)
    stats = rt.run_cycle(agents, 1)

    assert (stats.value_count, stats.cost_count, stats.best_count) == (8, 3, 3)

    # local fitness per agent
    for i in range(4):
        np.testing.assert_allclose(agents[i].local_fitness, KITE_LOCAL_FITNESS[i], **TABLE)
    # aggregated fitness: root halves, leaves keep their local sums
    np.testing.assert_allclose(agents[0].fitness, KITE_ROOT_FITNESS, **TABLE)
    for i in (1, 2, 3):
        np.testing.assert_allclose(agents[i].fitness, KITE_LOCAL_FITNESS[i], **TABLE)

    # first cycle: every personal best advanced, particle 2 is the global best
    assert agents[0].control.best_particle == 2
    assert agents[0].g_best_fit == pytest.approx(7.00, abs=5e-3)
    for i in range(4):
        assert agents[i].g_best_x == pytest.approx(KITE_GBEST[i], abs=1e-12)
        np.testing.assert_allclose(agents[i].p_best_x, KITE_POSITIONS[i], atol=1e-12)
        assert agents[i].control.best_particle == 2
        assert (agents[i].control.successes, agents[i].control.failures) == (1, 0)
        assert agents[i].control.radius == 1.0

    # velocities and positions after the update phase
    for i in range(4):
        np.testing.assert_allclose(agents[i].v, KITE_UPDATED_V[i], **TABLE)
        np.testing.assert_allclose(agents[i].x, KITE_UPDATED_X[i], **TABLE)


def test_all_zero_positions_give_zero_fitness(kite_instance):
    tree, agents = _primed_agents(kite_instance)
    for agent in agents:
        agent.x = np.zeros(4)
    SyncRuntime(tree).run_cycle(agents, 1)
    for agent in agents:
        np.testing.assert_array_equal(agent.local_fitness, np.zeros(4))
    np.testing.assert_array_equal(agents[0].fitness, np.zeros(4))


def test_best_update_without_improvement(kite_instance):
    tree, agents = _primed_agents(kite_instance)
    SyncRuntime(tree).run_cycle(agents, 1)
    root = agents[0]
    g_before = root.g_best_fit

    # strictly worse fitness: nothing advances, no new global best
    root.fitness = root.p_best_fit + 1.0
    payload = root.best_payload()
    assert payload.improved == ()
    assert payload.best_index is None
    assert root.g_best_fit == g_before

    # exact ties lose to the incumbent as well
    root.fitness = root.p_best_fit.copy()
    payload = root.best_payload()
    assert payload.improved == ()
    assert payload.best_index is None
    assert root.g_best_fit == g_before


def test_crossover_probability_table(kite_instance):
    for i in range(4):
        bp = crossover_probabilities(KITE_LOCAL_FITNESS[i])
        np.testing.assert_allclose(bp, KITE_CROSSOVER_P[i], atol=5e-4)


def test_crossover_position_blend_by_hand():
    xa2, xb2 = crossover_positions(-2.0, 1.1, r=0.3)
    assert xa2 == pytest.approx(0.17)
    assert xb2 == pytest.approx(-1.07)


def test_crossover_velocity_alignment():
    assert crossover_velocities(2.0, -1.0) == (2.0, 1.0)
    assert crossover_velocities(-2.0, 1.0) == (-2.0, -1.0)
    assert crossover_velocities(0.0, 0.0) is None
    assert crossover_velocities(1.5, -1.5) is None


def test_crossover_probabilities_degenerate_uniform():
    bp = crossover_probabilities(np.zeros(5))
    np.testing.assert_allclose(bp, np.full(5, 0.2))


@given(st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False),
       st.floats(0, 1, allow_nan=False))
def test_crossover_stays_in_parent_hull(xa, xb, r):
    lo, hi = min(xa, xb), max(xa, xb)
    ya, yb = crossover_positions(xa, xb, r)
    assert lo - 1e-9 <= ya <= hi + 1e-9
    assert lo - 1e-9 <= yb <= hi + 1e-9


# --- velocity equations -----------------------------------------------------------

def test_velocity_standard_by_hand():
    # 0.72*0 + 0.7*1.49*(-1 - -1) + 0.4*1.49*(0 - -1)
    v = velocity_standard(0.0, -1.0, -1.0, 0.0, 0.72, 1.49, 1.49, 0.7, 0.4)
    assert v == pytest.approx(0.596)


def test_velocity_global_best_by_hand():
    v = velocity_global_best(0.0, 0.0, 0.0, 0.72, 1.0, 0.4)
    assert v == pytest.approx(0.20)


def test_velocity_constricted_scales_everything():
    args = (1.0, 2.0, 3.0, 4.0, 0.7298, 2.05, 2.05, 0.5, 0.5)
    inner = 1.0 + 0.5 * 2.05 * (3.0 - 2.0) + 0.5 * 2.05 * (4.0 - 2.0)
    assert velocity_constricted(*args) == pytest.approx(0.7298 * inner)


def test_fixed_point_particle_stays_put():
    v = velocity_standard(0.0, 2.5, 2.5, 2.5, 0.72, 1.49, 1.49, 0.3, 0.9)
    assert v == 0.0


# --- initialization ----------------------------------------------------------------

def test_initialization_state(kite_instance):
    tree = build_bfs(kite_instance, 0)
    cfg = SwarmConfig(num_particles=32, seed=42, t_max=10)
    agent = SwarmAgent(1, kite_instance, tree, cfg)
    assert np.all(agent.v == 0.0)
    assert np.all((agent.x >= -10.0) & (agent.x <= 10.0))
    assert agent.g_best_fit == np.inf
    again = SwarmAgent(1, kite_instance, tree, cfg)
    np.testing.assert_array_equal(agent.x, again.x)


def test_initialization_streams_differ_by_agent(kite_instance):
    tree = build_bfs(kite_instance, 0)
    cfg = SwarmConfig(num_particles=32, seed=42, t_max=10)
    a0 = SwarmAgent(0, kite_instance, tree, cfg)
    a1 = SwarmAgent(1, kite_instance, tree, cfg)
    assert not np.array_equal(a0.x, a1.x)


def test_missing_message_guard(kite_instance):
    tree = build_bfs(kite_instance, 0)
    agent = SwarmAgent(0, kite_instance, tree, SwarmConfig(num_particles=4, t_max=5))
    with pytest.raises(MissingMessage):
        agent.handle_values({1: np.zeros(4)})  # expects 3 neighbors


# --- solve -------------------------------------------------------------------------

def _trace_key(trace):
    return [(r.cycle, r.best_internal, r.assignment,
             r.stats.value_count, r.stats.cost_count, r.stats.best_count)
            for r in trace.rows]


def test_solve_monotone_and_deterministic(kite_instance):
    cfg = SwarmConfig(num_particles=20, t_max=60, seed=11)
    t1 = solve(kite_instance, cfg)
    t2 = solve(kite_instance, cfg)
    internal = t1.internal_series()
    assert all(b <= a for a, b in zip(internal, internal[1:]))
    assert _trace_key(t1) == _trace_key(t2)


def test_solve_reaches_convex_optimum(two_agent_convex):
    cfg = SwarmConfig(num_particles=200, t_max=500, seed=5)
    trace = solve(two_agent_convex, cfg)
    assert trace.best_internal < 1e-2


def test_positions_stay_clamped(kite_instance):
    cfg = SwarmConfig(num_particles=16, t_max=40, seed=3)
    trace = solve(kite_instance, cfg, record_probes=True)
    for positions, _ in trace.probes:
        assert np.all(positions >= -10.0 - 1e-12)
        assert np.all(positions <= 10.0 + 1e-12)


def test_root_fitness_matches_centralized(kite_instance):
    cfg = SwarmConfig(num_particles=8, t_max=25, seed=9)
    trace = solve(kite_instance, cfg, record_probes=True)
    for positions, fitness in trace.probes:
        for k in range(8):
            direct = global_cost(kite_instance, positions[:, k])
            assert fitness[k] == pytest.approx(direct, rel=1e-9, abs=1e-9)


def test_personal_best_snapshots_cohere(kite_instance):
    cfg = SwarmConfig(num_particles=8, t_max=30, seed=13)
    tree = build_bfs(kite_instance, 0)
    agents = [SwarmAgent(i, kite_instance, tree, cfg) for i in range(4)]
    rt = SyncRuntime(tree)
    for t in range(1, 31):
        rt.run_cycle(agents, t)
        root = agents[0]
        for k in range(8):
            if np.isfinite(root.p_best_fit[k]):
                vec = np.array([a.p_best_x[k] for a in agents])
                assert global_cost(kite_instance, vec) == pytest.approx(
                    root.p_best_fit[k], rel=1e-9, abs=1e-9)


def test_crossover_does_not_change_first_evaluation(kite_instance):
    plain = solve(kite_instance, SwarmConfig(num_particles=12, t_max=1, seed=21),
                  record_probes=True)
    crossed = solve(kite_instance,
                    SwarmConfig(num_particles=12, t_max=1, seed=21, crossover=True),
                    record_probes=True)
    np.testing.assert_array_equal(plain.probes[0][0], crossed.probes[0][0])
    np.testing.assert_array_equal(plain.probes[0][1], crossed.probes[0][1])


def test_crossover_run_monotone_and_in_bounds(kite_instance):
    cfg = SwarmConfig(num_particles=12, t_max=60, seed=2, crossover=True)
    trace = solve(kite_instance, cfg, record_probes=True)
    internal = trace.internal_series()
    assert all(b <= a for a, b in zip(internal, internal[1:]))
    for positions, _ in trace.probes:
        assert np.all(np.abs(positions) <= 10.0 + 1e-12)


def test_solve_single_agent():
    from cdcop import CdcopInstance, Domain
    inst = CdcopInstance(1, (Domain(-1.0, 1.0),), (), "min")
    trace = solve(inst, SwarmConfig(num_particles=4, t_max=5, seed=0))
    assert trace.best_internal == 0.0
    assert trace.rows[0].stats.total_messages == 0


def test_max_instance_reports_restored_sign():
    from conftest import make_instance
    inst = make_instance(2, [((0, 1), "(/ 100.0 (+ (^ (- x0 x1) 2) 1.0))")],
                         domain=(0.0, 10.0), objective="max")
    trace = solve(inst, SwarmConfig(num_particles=20, t_max=40, seed=1))
    display = trace.display_series()
    assert all(c > 0 for c in display)
    assert all(b >= a for a, b in zip(display, display[1:]))
    assert trace.best_cost == pytest.approx(-trace.best_internal)
