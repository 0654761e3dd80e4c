"""File formats: model JSON, dataset CSV/JSON, graph JSON/DOT, trace JSON lines."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable

from .data import Dataset, from_rows
from .errors import InvalidInputError
from .jpd import JointTable, VariableSpec
from .learners import Removal, SearchTrace, UGraph
from .pi_models import fixture
from .scores import Dag

FIXTURE_SCHEME = "fixture:"


def _variables_json(variables: Iterable[VariableSpec]) -> list[dict]:
    return [{"name": v.name, "cardinality": v.cardinality} for v in variables]


def _variables_from_json(items) -> list[VariableSpec]:
    try:
        return [VariableSpec(str(it["name"]), int(it["cardinality"])) for it in items]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed variable list: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def model_to_json(table: JointTable, metadata: dict | None = None) -> str:
    """Probabilities are written as shortest round-trip decimal strings."""
    obj = {"variables": _variables_json(table.vars), "probs": [repr(float(p)) for p in table.probs]}
    if metadata:
        obj["metadata"] = metadata
    return _dump(obj)


def model_from_json(text: str) -> JointTable:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "variables" not in obj or "probs" not in obj:
        raise InvalidInputError("model JSON needs 'variables' and 'probs'")
    return JointTable(_variables_from_json(obj["variables"]), [float(p) for p in obj["probs"]])


def write_model(table: JointTable, path: str | Path, metadata: dict | None = None) -> None:
    Path(path).write_text(model_to_json(table, metadata))


def load_model(source: str | Path) -> JointTable:
    """Load ``fixture:<name>`` or a model JSON file."""
    text = str(source)
    if text.startswith(FIXTURE_SCHEME):
        return fixture(text[len(FIXTURE_SCHEME):])
    return model_from_json(Path(text).read_text())


def dataset_to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(dataset.names)
    writer.writerows(dataset.rows())
    return buf.getvalue()


def dataset_from_csv(text: str, cardinalities: dict[str, int] | None = None) -> Dataset:
    """Read one case per row; cardinalities default to max observed value + 1 (at least 2)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InvalidInputError("empty CSV") from None
    rows = [tuple(int(x) for x in row) for row in reader if row]
    cardinalities = cardinalities or {}
    variables = []
    for j, name in enumerate(header):
        seen = max((r[j] for r in rows), default=0) + 1
        variables.append(VariableSpec(name, cardinalities.get(name, max(2, seen))))
    return from_rows(variables, rows)


def dataset_to_json(dataset: Dataset) -> str:
    return _dump({"variables": _variables_json(dataset.vars), "counts": [int(c) for c in dataset.counts]})


def dataset_from_json(text: str) -> Dataset:
    obj = json.loads(text)
    return Dataset(_variables_from_json(obj["variables"]), obj["counts"])


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return dataset_from_json(text)
    return dataset_from_csv(text)


def graph_to_dict(graph: Dag | UGraph, names: list[str] | tuple[str, ...]) -> dict:
    if isinstance(graph, Dag):
        return {"nodes": list(names), "arcs": [[names[p], names[c]] for p, c in graph.arcs()]}
    return {"nodes": list(names), "links": [[names[a], names[b]] for a, b in graph.sorted_links()]}


def graph_to_json(graph: Dag | UGraph, names, extra: dict | None = None) -> str:
    obj = graph_to_dict(graph, names)
    if extra:
        obj.update(extra)
    return _dump(obj)


def graph_to_dot(graph: Dag | UGraph, names) -> str:
    directed = isinstance(graph, Dag)
    edges = graph.arcs() if directed else graph.sorted_links()
    op = "->" if directed else "--"
    lines = ["digraph G {" if directed else "graph G {"]
    lines += [f'  "{name}";' for name in names]
    lines += [f'  "{names[a]}" {op} "{names[b]}";' for a, b in edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def trace_to_jsonl(trace: SearchTrace) -> str:
    return "".join(json.dumps(step.to_dict()) + "\n" for step in trace.steps)


def removals_to_jsonl(removals: Iterable[Removal]) -> str:
    return "".join(json.dumps(r.to_dict()) + "\n" for r in removals)
