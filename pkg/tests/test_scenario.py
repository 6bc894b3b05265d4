import json

import pytest

from biasim import scenario
from biasim.errors import InvalidScript
from biasim.scenario import ScenarioScript, load_frames, run_scenario


MINI = {
    "schema": 1,
    "name": "mini",
    "model": "habits",
    "world": {"population_size": 30},
    "params": {"urban_planning": 10, "habits_enabled": False},
    "commands": [{"at": 5, "set": "urban_planning", "value": 80}],
    "stop": {"max_ticks": 12},
    "replications": 2,
    "base_seed": 7,
}


def mini_script(**patch):
    doc = json.loads(json.dumps(MINI))
    doc.update(patch)
    return ScenarioScript.from_mapping(doc)


class TestScriptParsing:
    def test_builtins_load_and_validate(self):
        names = scenario.builtin_names()
        assert names == sorted(names)
        assert len(names) == 9
        for n in names:
            s = scenario.load_builtin(n)
            assert s.name == n

    def test_unknown_model_rejected(self):
        with pytest.raises(InvalidScript):
            mini_script(model="telepathy")

    def test_unknown_parameter_path_named(self):
        bad = json.loads(json.dumps(MINI))
        bad["commands"] = [{"at": 3, "set": "urban_plannning", "value": 10}]
        with pytest.raises(InvalidScript) as exc:
            ScenarioScript.from_mapping(bad)
        assert "urban_plannning" in str(exc.value)

    def test_out_of_range_value_named(self):
        bad = json.loads(json.dumps(MINI))
        bad["params"] = {"urban_planning": 150}
        with pytest.raises(InvalidScript) as exc:
            ScenarioScript.from_mapping(bad)
        assert "urban_planning" in str(exc.value)

    def test_condition_metric_must_exist(self):
        bad = json.loads(json.dumps(MINI))
        bad["commands"] = [{"when": {"metric": "nope", "op": "<", "value": 1},
                            "set": "urban_planning", "value": 20}]
        with pytest.raises(InvalidScript) as exc:
            ScenarioScript.from_mapping(bad)
        assert "nope" in str(exc.value)

    def test_stop_required(self):
        bad = json.loads(json.dumps(MINI))
        del bad["stop"]
        with pytest.raises(InvalidScript):
            ScenarioScript.from_mapping(bad)

    def test_ramp_expansion_endpoints_and_linearity(self):
        doc = json.loads(json.dumps(MINI))
        doc["commands"] = [{"ramp": "urban_planning", "from": 10, "to": 85,
                            "start": 3, "end": 8}]
        s = ScenarioScript.from_mapping(doc)
        cmds = [c for c in s.commands]
        assert [c.at for c in cmds] == [3, 4, 5, 6, 7, 8]
        assert cmds[0].value == 10.0
        assert cmds[-1].value == 85.0
        assert cmds[2].value == pytest.approx(10 + 75 * 2 / 5)


class TestRunner:
    def test_replication_seeds_offset_from_base(self):
        r = run_scenario(mini_script())
        assert [rep.seed for rep in r.replications] == [7, 8]

    def test_timed_command_applies(self):
        r = run_scenario(mini_script())
        frames = r.replications[0].frames
        assert frames[3]["urban_planning"] == 10.0
        assert frames[4]["urban_planning"] == 80.0

    def test_stop_condition_ends_run(self):
        doc = json.loads(json.dumps(MINI))
        doc["model"] = "reactance"
        doc["world"] = {"population_size": 20, "width": 10, "height": 10,
                        "encounter_radius": 3.0}
        doc["params"] = {"message": 0.5, "reactance_delta": 1.0}
        doc["config"] = {"reactance.init_variance": 0.0,
                         "reactance.initial_mean": 0.5}
        doc["commands"] = []
        doc["stop"] = {"max_ticks": 50, "positive_target_empty": True}
        s = ScenarioScript.from_mapping(doc)
        r = run_scenario(s)
        # zero variance at the message: everyone convinced from tick 1
        assert all(rep.stopped_by == "condition" for rep in r.replications)
        assert all(len(rep.frames) == 1 for rep in r.replications)

    def test_summary_mean_min_max(self):
        r = run_scenario(mini_script())
        ticks = r.summary["per_tick"]["car_share"]
        reps = [rep.frames for rep in r.replications]
        for t in range(12):
            vals = [reps[0][t]["car_share"], reps[1][t]["car_share"]]
            assert ticks["mean"][t] == pytest.approx(sum(vals) / 2)
            assert ticks["min"][t] == min(vals)
            assert ticks["max"][t] == max(vals)
            assert ticks["count"][t] == 2

    def test_conditionals_fire_in_order_never_regress(self):
        s = scenario.load_builtin("reactance-scenario-3").with_overrides(
            replications=1,
            world={"population_size": 60},
        )
        r = run_scenario(s)
        msgs = [f["message"] for f in r.replications[0].frames]
        seen = sorted(set(msgs), reverse=True)
        assert seen == [0.5, 0.4, 0.3, 0.25]
        # never regress: once stepped down, never up
        for a, b in zip(msgs, msgs[1:]):
            assert b <= a


class TestExport:
    def test_csv_header_is_documented_metric_order(self, tmp_path):
        r = run_scenario(mini_script(), out_dir=tmp_path)
        lines = r.files[0].read_text().splitlines()
        assert lines[0].startswith("# biasim frames schema=1")
        assert lines[1].split(",") == r.metric_names

    def test_filenames_embed_scenario_and_seed(self, tmp_path):
        r = run_scenario(mini_script(), out_dir=tmp_path)
        names = [f.name for f in r.files]
        assert "mini_seed7.csv" in names and "mini_seed8.csv" in names
        assert "mini_summary.json" in names

    def test_csv_roundtrip(self, tmp_path):
        r = run_scenario(mini_script(), out_dir=tmp_path)
        assert load_frames(r.files[0]) == r.replications[0].frames

    def test_json_roundtrip_lossless(self, tmp_path):
        r = run_scenario(mini_script(), out_dir=tmp_path, fmt="json")
        assert load_frames(r.files[0]) == r.replications[0].frames

    def test_empty_run_header_only(self, tmp_path):
        s = mini_script(stop={"max_ticks": 0})
        r = run_scenario(s, out_dir=tmp_path)
        lines = r.files[0].read_text().splitlines()
        assert len(lines) == 2  # schema comment + header row

    def test_byte_identical_reruns(self, tmp_path):
        s = mini_script()
        r1 = run_scenario(s, out_dir=tmp_path / "a")
        r2 = run_scenario(s, out_dir=tmp_path / "b")
        for f1, f2 in zip(r1.files, r2.files):
            assert f1.read_bytes() == f2.read_bytes()
