import json

from conftest import lst, nat
from polyprog.core import identity
from polyprog.engine import initial_diagram
from polyprog.export import (
    DIAGRAM_SCHEMA, diagram_dot, diagram_json, dumps, layers, trace_json, trace_records,
)


def test_identity_has_no_nodes():
    doc = diagram_json(identity(("nat", "list")))
    assert doc["schema"] == DIAGRAM_SCHEMA
    assert doc["nodes"] == []
    assert doc["output_sources"] == [{"boundary": "input", "port": 0}, {"boundary": "input", "port": 1}]


def test_layers_follow_wires(arith):
    p, _ = arith
    d = initial_diagram(p.signature.cell("add"), [nat(p, 2), nat(p, 0)])
    lay = layers(d)
    assert sorted(lay.values()) == [0, 0, 1, 2, 3]
    assert max(lay, key=lay.get) in {n for n, nd in d.nodes.items() if nd.cell.name == "add"}


def test_json_round_trips(sortprog):
    p, _ = sortprog
    d = initial_diagram(p.signature.cell("sort"), [lst(p, [2, 1])])
    doc = json.loads(dumps(diagram_json(d)))
    lits = sorted(n["literal"] for n in doc["nodes"] if n["literal"] is not None)
    assert lits == [1, 2]
    assert doc["outputs"] == ["list"]


def test_dot_mentions_every_node(arith):
    p, _ = arith
    d = initial_diagram(p.signature.cell("mult"), [nat(p, 1), nat(p, 1)])
    text = diagram_dot(d, "m")
    assert text.startswith('digraph "m" {') and text.rstrip().endswith("}")
    for n in d.nodes:
        assert f"  n{n} [label=" in text


def test_trace_records(arith):
    p, interp = arith
    trace, records, h0 = trace_records(p, "mult", [nat(p, 2), nat(p, 2)], interp)
    assert len(records) == trace.k + trace.l
    assert records[-1]["k"] == trace.k and records[-1]["l"] == trace.l
    heats = [h0[0]] + [r["heat"] for r in records]
    for r, before, after in zip(records, heats, heats[1:]):
        if r["kind"] == "computation":
            assert after < before
    assert records[-1]["heat"] == 0
    doc = trace_json(trace, records, h0, ["4"])
    assert doc["steps"] == len(records) and doc["outputs"] == ["4"]


def test_trace_without_interpretation(coin):
    trace, records, h0 = trace_records(coin, "c", [])
    assert h0 == (None, None)
    assert all(r["heat"] is None for r in records)
