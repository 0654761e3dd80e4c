import json

import pytest
from hypothesis import given, settings

from pi_forge.data import exact_dataset, sample
from pi_forge.errors import InvalidInputError, NotFoundError
from pi_forge.learners import kutato_learn, pc_skeleton
from pi_forge.pi_models import PiSpec, construct_full_pi, fixture
from pi_forge.scores import Dag
from pi_forge.serialization import (
    dataset_from_csv,
    dataset_from_json,
    dataset_to_csv,
    dataset_to_json,
    graph_to_dot,
    graph_to_json,
    load_dataset,
    load_model,
    model_from_json,
    model_to_json,
    removals_to_jsonl,
    trace_to_jsonl,
    write_model,
)

from .helpers import tables


class TestModel:
    def test_round_trip_fixtures(self, any_fixture):
        back = model_from_json(model_to_json(any_fixture))
        assert back == any_fixture

    @given(tables())
    @settings(max_examples=50, deadline=None)
    def test_round_trip_random(self, t):
        back = model_from_json(model_to_json(t))
        assert back.vars == t.vars
        assert abs(back.probs - t.probs).max() <= 1e-15

    def test_probabilities_are_strings(self):
        obj = json.loads(model_to_json(fixture("table2")))
        assert obj["probs"][1] == "0.216"
        assert obj["variables"][0] == {"name": "X1", "cardinality": 2}

    def test_generated_matches_fixture_text(self):
        assert model_to_json(construct_full_pi(PiSpec(4, 1.0))) == model_to_json(fixture("table1"))

    def test_metadata(self):
        obj = json.loads(model_to_json(fixture("table1"), {"generator": "theorem1"}))
        assert obj["metadata"] == {"generator": "theorem1"}

    def test_load(self, tmp_path):
        path = tmp_path / "m.json"
        write_model(fixture("table3"), path)
        assert load_model(path) == fixture("table3")
        assert load_model("fixture:table3") == fixture("table3")

    def test_load_unknown_fixture(self):
        with pytest.raises(NotFoundError):
            load_model("fixture:nope")

    def test_malformed(self):
        with pytest.raises(InvalidInputError):
            model_from_json('{"variables": []}')


class TestDataset:
    def test_csv_round_trip(self, tmp_path):
        d = sample(fixture("table4"), 200, seed=3)
        text = dataset_to_csv(d)
        assert text.splitlines()[0] == "X1,X2,X3,X4"
        assert len(text.splitlines()) == 201
        assert dataset_from_csv(text) == d
        path = tmp_path / "d.csv"
        path.write_text(text)
        assert load_dataset(path) == d

    def test_csv_rows_in_index_order(self):
        text = dataset_to_csv(exact_dataset(fixture("table1"), 8))
        assert text.splitlines()[1:3] == ["0,0,0,0", "0,0,1,1"]

    def test_json_round_trip(self, tmp_path):
        d = exact_dataset(fixture("table2"), 1000)
        assert dataset_from_json(dataset_to_json(d)) == d
        path = tmp_path / "d.json"
        path.write_text(dataset_to_json(d))
        assert load_dataset(path) == d

    def test_csv_cardinality_floor(self):
        d = dataset_from_csv("A,B\n0,0\n0,0\n")
        assert d.shape == (2, 2)

    def test_empty_csv(self):
        with pytest.raises(InvalidInputError):
            dataset_from_csv("")


class TestGraphs:
    def test_dag_json_and_dot(self):
        dag = Dag.from_arcs(3, [(0, 2), (1, 2)])
        names = ["A", "B", "C"]
        obj = json.loads(graph_to_json(dag, names, {"algorithm": "x"}))
        assert obj == {"nodes": names, "arcs": [["A", "C"], ["B", "C"]], "algorithm": "x"}
        dot = graph_to_dot(dag, names)
        assert dot.startswith("digraph") and '"A" -> "C";' in dot

    def test_skeleton_json_and_dot(self):
        g, removals = pc_skeleton(fixture("table4"))
        names = list(fixture("table4").names)
        obj = json.loads(graph_to_json(g, names))
        assert obj["links"] == [["X2", "X3"], ["X2", "X4"], ["X3", "X4"]]
        assert graph_to_dot(g, names).startswith("graph")
        lines = removals_to_jsonl(removals).splitlines()
        assert json.loads(lines[0]) == {"link": [0, 1], "sepset": [], "order": 0}

    def test_trace_jsonl(self):
        _, trace = kutato_learn(fixture("table1"), k=3)
        lines = trace_to_jsonl(trace).splitlines()
        assert len(lines) == len(trace.steps)
        first = json.loads(lines[0])
        assert first["accepted"] and first["arcs"] == [[0, 3], [1, 3], [2, 3]]
