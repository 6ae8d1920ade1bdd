"""Machine-readable renderings of diagrams and traces."""
from __future__ import annotations

import json
from typing import Sequence

from .core import IN, Diagram, Term, topological_order
from .engine import Trace, initial_diagram, normalize
from .interp import Interpretation, _total_heats
from .rules import Program

DIAGRAM_SCHEMA = "polyprog.diagram/1"
TRACE_SCHEMA = "polyprog.trace/1"


def layers(d: Diagram) -> dict[int, int]:
    """Longest distance of every node from the input boundary."""
    out = {}
    for n in topological_order(d):
        out[n] = 1 + max((out[p] for p, _ in d.src[n] if p != IN), default=-1)
    return out


def _port(p) -> dict:
    n, j = p
    return {"boundary": "input", "port": j} if n == IN else {"node": n, "port": j}


def diagram_json(d: Diagram) -> dict:
    lay = layers(d)
    nodes = []
    for n in topological_order(d):
        nd = d.nodes[n]
        nodes.append({
            "id": n, "cell": nd.cell.name, "kind": nd.cell.kind.value, "literal": nd.literal,
            "layer": lay[n], "inputs": [_port(p) for p in d.src[n]],
        })
    return {
        "schema": DIAGRAM_SCHEMA, "inputs": list(d.inputs), "outputs": list(d.outputs),
        "nodes": nodes, "output_sources": [_port(p) for p in d.out_src],
    }


def _label(nd) -> str:
    return nd.cell.name if nd.literal is None else f"{nd.cell.name}[{nd.literal}]"


def diagram_dot(d: Diagram, name: str = "diagram") -> str:
    """Graphviz rendering, one rank per layer, wires labelled by sort."""
    lay = layers(d)
    lines = [f'digraph "{name}" {{', "  rankdir=TB;", '  node [shape=box, fontname="monospace"];']
    for i in range(len(d.inputs)):
        lines.append(f'  in{i} [shape=point, xlabel="{d.inputs[i]}"];')
    for j in range(len(d.outputs)):
        lines.append(f'  out{j} [shape=point, xlabel="{d.outputs[j]}"];')
    for layer in sorted(set(lay.values())):
        members = " ".join(f"n{n};" for n, v in lay.items() if v == layer)
        lines.append(f"  {{ rank=same; {members} }}")
    for n in topological_order(d):
        nd = d.nodes[n]
        shape = "" if nd.cell.kind.value == "function" else ", style=rounded"
        lines.append(f'  n{n} [label="{_label(nd)}"{shape}];')

    def ref(p):
        return f"in{p[1]}" if p[0] == IN else f"n{p[0]}"

    for n in topological_order(d):
        for i, p in enumerate(d.src[n]):
            sort = d.inputs[p[1]] if p[0] == IN else d.nodes[p[0]].cell.target[p[1]]
            lines.append(f'  {ref(p)} -> n{n} [label="{sort}", headlabel="{i}"];')
    for j, p in enumerate(d.out_src):
        lines.append(f'  {ref(p)} -> out{j} [label="{d.outputs[j]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def trace_records(program: Program, phi, args: Sequence[Term], interp: Interpretation | None = None,
                  strategy: str = "innermost", fuel: int | None = None, seed: int | None = None):
    """(trace, records): one record per step with running k and l and,
    given an interpretation, the heat and structure heat after the step."""
    if isinstance(phi, str):
        phi = program.signature.cell(phi)
    heats = []

    def observe(d, m):
        heats.append(_total_heats(d, interp) if interp is not None else (None, None))

    kw = {} if fuel is None else {"fuel": fuel}
    _, trace = normalize(initial_diagram(phi, args), program, strategy=strategy, seed=seed,
                         observer=observe, **kw)
    records = []
    k = l = 0
    for i, s in enumerate(trace.steps, 1):
        if s.kind == "computation":
            k += 1
        else:
            l += 1
        h, sh = heats[i]
        records.append({"index": i, "rule": s.rule, "kind": s.kind, "anchor": s.anchor,
                        "k": k, "l": l, "heat": h, "structure_heat": sh})
    return trace, records, heats[0]


def trace_json(trace: Trace, records: list, initial_heat=(None, None), values=()) -> dict:
    return {
        "schema": TRACE_SCHEMA, "k": trace.k, "l": trace.l, "steps": len(trace.steps),
        "initial": {"heat": initial_heat[0], "structure_heat": initial_heat[1]},
        "records": records, "outputs": list(values),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)
