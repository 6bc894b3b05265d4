import pytest

from biasim import Engine
from biasim.errors import InvalidConfig, UnknownParameter, ValueOutOfRange
from biasim.params import CommandQueue


class TestCommandQueue:
    def test_ordered_by_tick_then_submission(self):
        q = CommandQueue()
        q.push(5, "b", 1)
        q.push(3, "a", 1)
        q.push(5, "a", 2)
        due = q.due(5)
        assert [(c.tick, c.path) for c in due] == [(3, "a"), (5, "b"), (5, "a")]

    def test_due_leaves_future_commands(self):
        q = CommandQueue()
        q.push(2, "x")
        q.push(9, "y")
        assert [c.path for c in q.due(5)] == ["x"]
        assert len(q) == 1


class TestEngineCommands:
    def test_set_at_tick_visible_from_that_tick_on(self):
        e = Engine("habits", {"urban_planning": 10.0, "world.population_size": 20}, seed=1)
        e.submit("urban_planning", 85.0, tick=100)
        frames = [e.step() for _ in range(105)]
        assert frames[98]["urban_planning"] == 10.0   # tick 99
        assert frames[99]["urban_planning"] == 85.0   # tick 100
        assert frames[104]["urban_planning"] == 85.0

    def test_empty_queue_leaves_state_unchanged(self):
        a = Engine("habits", seed=3)
        b = Engine("habits", seed=3)
        b.submit("urban_planning", 50.0, tick=10_000)  # never reached
        fa = [a.step() for _ in range(5)]
        fb = [b.step() for _ in range(5)]
        assert fa == fb

    def test_unknown_parameter_names_path(self):
        e = Engine("habits", seed=1)
        with pytest.raises(UnknownParameter) as exc:
            e.submit("urban_plannning", 10)
        assert "urban_plannning" in str(exc.value)

    def test_out_of_range_names_path(self):
        e = Engine("habits", seed=1)
        with pytest.raises(ValueOutOfRange) as exc:
            e.submit("urban_planning", 150)
        assert "urban_planning" in str(exc.value)

    def test_toggle_accepts_bool_only(self):
        e = Engine("habits", seed=1)
        e.submit("habits_enabled", False)
        with pytest.raises(ValueOutOfRange):
            e.submit("habits_enabled", 0.5)


class TestOverrides:
    def test_unknown_override_key_rejected(self):
        with pytest.raises(UnknownParameter):
            Engine("habits", {"nonsense_key": 1})

    def test_world_override_type_checked(self):
        with pytest.raises(InvalidConfig):
            Engine("habits", {"world.population_size": 10.5})

    def test_action_rejected_as_initial_parameter(self):
        with pytest.raises(InvalidConfig):
            Engine("habits", {"reset_habits": None})

    def test_config_field_override(self):
        e = Engine("habits", {"habits.window": 5, "world.population_size": 10}, seed=1)
        assert e.model.cfg.window == 5

    def test_capabilities_lists_every_param_once(self):
        e = Engine("reactance", seed=1)
        caps = e.capabilities()
        paths = [p["path"] for p in caps["params"]]
        assert paths == ["message", "broadcasting", "reactance_delta",
                         "contagion", "confirmation_bias"]
        assert len(paths) == len(set(paths))
        assert caps["metrics"] == list(e.model.METRICS)
