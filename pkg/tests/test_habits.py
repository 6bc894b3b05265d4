import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biasim import Engine
from biasim import rng
from biasim.errors import HistoryTooShort
from biasim.habits import (BIKE, CAR, RATIONAL, ROUTINE, HabitsConfig, MobilityAgent,
                           decide, habit_strength, rational_choice, rational_mark,
                           reset_habits, routine_choice)


class TestRationalMark:
    def test_bike_mark_is_planning(self):
        assert rational_mark(BIKE, 85.0) == 85.0

    def test_car_mark_is_complement(self):
        assert rational_mark(CAR, 85.0) == 15.0

    def test_symmetry_point(self):
        assert rational_mark(CAR, 50.0) == rational_mark(BIKE, 50.0) == 50.0


class TestRationalChoice:
    def test_planning_zero_always_car(self):
        g = np.random.default_rng(0)
        assert all(rational_choice(0.0, g.random()) == CAR for _ in range(200))

    def test_planning_hundred_always_bike(self):
        g = np.random.default_rng(0)
        assert all(rational_choice(100.0, g.random()) == BIKE for _ in range(200))

    def test_bernoulli_parameter(self):
        # Monte-Carlo check of the choice law: planning 85 -> bike 0.85 +/- 0.02
        g = np.random.default_rng(42)
        draws = [rational_choice(85.0, g.random()) for _ in range(10_000)]
        assert draws.count(BIKE) / 10_000 == pytest.approx(0.85, abs=0.02)


class TestRoutineChoice:
    def test_degenerate_history(self):
        g = np.random.default_rng(1)
        hist = [CAR] * 20
        assert all(routine_choice(hist, 20, g.random()) == CAR for _ in range(100))

    def test_frequency_by_definition(self):
        g = np.random.default_rng(7)
        hist = [CAR] * 16 + [BIKE] * 4
        draws = [routine_choice(hist, 20, g.random()) for _ in range(10_000)]
        assert draws.count(CAR) / 10_000 == pytest.approx(0.8, abs=0.02)

    def test_even_split(self):
        g = np.random.default_rng(9)
        hist = [CAR] * 10 + [BIKE] * 10
        draws = [routine_choice(hist, 20, g.random()) for _ in range(10_000)]
        assert draws.count(CAR) / 10_000 == pytest.approx(0.5, abs=0.02)

    def test_short_history_raises(self):
        with pytest.raises(HistoryTooShort):
            routine_choice([CAR] * 19, 20, 0.5)


class TestHabitStrength:
    def test_pure_history(self):
        assert habit_strength([BIKE] * 20, 20) == 1.0

    def test_even_split(self):
        assert habit_strength([CAR] * 10 + [BIKE] * 10, 20) == 0.5

    def test_empty_history_no_habit(self):
        assert habit_strength([], 20) == 0.0

    def test_partial_history_no_habit(self):
        assert habit_strength([CAR] * 19, 20) == 0.0

    @given(st.lists(st.sampled_from([BIKE, CAR]), min_size=20, max_size=20))
    def test_bounded_half_to_one_when_full(self, hist):
        assert 0.5 <= habit_strength(hist, 20) <= 1.0


class TestDecide:
    def test_degenerate_history_forces_routine_car(self):
        cfg = HabitsConfig()
        agent = MobilityAgent(history=[CAR] * 20)
        for u in (0.0, 0.3, 0.77, 0.999):
            a = MobilityAgent(history=[CAR] * 20)
            mode, kind = decide(a, 85.0, cfg, gate_u=u, choice_u=0.5)
            assert (mode, kind) == (CAR, ROUTINE)
            assert a.satisfaction == 15.0

    def test_habits_disabled_always_rational(self):
        cfg = HabitsConfig(habits_enabled=False)
        agent = MobilityAgent(history=[CAR] * 20)
        _, kind = decide(agent, 85.0, cfg, gate_u=0.0, choice_u=0.99)
        assert kind == RATIONAL

    def test_history_evicts_oldest(self):
        cfg = HabitsConfig(window=3, habits_enabled=False)
        agent = MobilityAgent(history=[CAR, CAR, BIKE])
        decide(agent, 100.0, cfg, gate_u=0.5, choice_u=0.0)  # forces bike
        assert agent.history == [CAR, BIKE, BIKE]

    def test_first_decision_after_reset_is_rational(self):
        cfg = HabitsConfig()
        pop = [MobilityAgent(history=[CAR] * 20) for _ in range(10)]
        reset_habits(pop)
        for a in pop:
            _, kind = decide(a, 30.0, cfg, gate_u=0.0, choice_u=0.5)
            assert kind == RATIONAL

    def test_reset_idempotent(self):
        pop = [MobilityAgent(history=[CAR] * 20)]
        reset_habits(pop)
        once = [list(a.history) for a in pop]
        reset_habits(pop)
        assert [list(a.history) for a in pop] == once == [[]]


class TestVectorisedAgainstScalarOracle:
    """The engine's array math must match the per-agent operations exactly,
    draw for draw, using the same per-agent substreams."""

    def test_exact_equivalence_over_run(self):
        n, ticks, seed = 17, 60, 31
        overrides = {"world.population_size": n, "urban_planning": 20.0,
                     "habits.window": 6}
        e = Engine("habits", overrides, seed=seed)
        cfg = e.model.cfg

        # scalar replica: same initial-mode draw, same gate/choice substreams
        agents = []
        for i in range(n):
            g = rng.substream(seed, i, rng.INIT)
            g.random(3)  # world consumed position/heading draws
            mode = BIKE if g.random() < 20.0 / 100.0 else CAR
            agents.append(MobilityAgent(current_mode=mode,
                                        satisfaction=rational_mark(mode, 20.0)))
        gates = [rng.substream(seed, i, rng.GATE) for i in range(n)]
        choices = [rng.substream(seed, i, rng.CHOICE) for i in range(n)]

        planning = 20.0
        for t in range(1, ticks + 1):
            if t == 25:  # exercise a mid-run command on both paths
                e.submit("urban_planning", 90.0, tick=25)
                planning = 90.0
            frame = e.step()
            for i, a in enumerate(agents):
                decide(a, planning, cfg, gates[i].random(), choices[i].random())
            assert [MODES_BY_CODE[m] for m in e.model.mode] == [a.current_mode for a in agents], t
            assert e.model.satisfaction.tolist() == [a.satisfaction for a in agents]
            kinds = [ROUTINE if r else RATIONAL for r in e.model.routine_mask]
            assert kinds == [a.last_decision_kind for a in agents]
            assert frame["routine_count"] == sum(k == ROUTINE for k in kinds)


MODES_BY_CODE = {0: BIKE, 1: CAR}


class TestModelBehaviour:
    def test_long_run_car_share_without_habits(self):
        # Bernoulli mean over 500 agents x 200 ticks at planning 10
        e = Engine("habits", {"habits.habits_enabled": False, "urban_planning": 10.0,
                              "world.population_size": 500}, seed=11)
        shares = [e.step()["car_share"] for _ in range(200)]
        assert np.mean(shares) == pytest.approx(0.90, abs=0.03)

    def test_modal_share_tracks_planning(self):
        # stationary bike share ~ planning/100 within 0.05, habits off
        for planning in (25.0, 60.0):
            e = Engine("habits", {"habits.habits_enabled": False,
                                  "urban_planning": planning,
                                  "world.population_size": 500}, seed=13)
            shares = [e.step()["bike_share"] for _ in range(100)]
            assert np.mean(shares) == pytest.approx(planning / 100.0, abs=0.05)

    def test_satisfaction_coupling_every_tick(self):
        e = Engine("habits", {"urban_planning": 30.0, "world.population_size": 60}, seed=5)
        e.submit("urban_planning", 70.0, tick=20)
        for _ in range(40):
            e.step()
            m = e.model
            expected = np.where(m.mode == 0, m.planning, 100.0 - m.planning)
            np.testing.assert_array_equal(m.satisfaction, expected)

    def test_reset_restores_rational_regime(self):
        # after reset at planning 85, bike share returns to 0.85 +/- 0.05
        # within a window's worth of ticks
        e = Engine("habits", {"urban_planning": 10.0, "world.population_size": 500}, seed=17)
        for _ in range(120):
            e.step()
        e.submit("urban_planning", 85.0)
        for _ in range(80):
            e.step()
        locked = e.metrics_frame()["bike_share"]
        e.submit("reset_habits")
        frames = [e.step() for _ in range(e.model.cfg.window)]
        assert frames[0]["bike_share"] > locked
        assert frames[0]["rational_count"] == 500
        assert np.mean([f["bike_share"] for f in frames]) == pytest.approx(0.85, abs=0.05)

    def test_tick0_frame_has_empty_histories(self):
        e = Engine("habits", {"world.population_size": 10}, seed=2)
        assert e.metrics_frame()["mean_habit_strength_bike"] in (0.0, None)
        assert (e.model.hist_len == 0).all()
        snap = e.snapshot()
        assert all(a["history_len"] == 0 for a in snap)
