"""``polyprog`` command line.

Exit status: 0 on success (and, for ``check``/``bounds``, when everything
holds), 1 on diagnostics or failed checks, 2 when a run hits its fuel,
state budget or step limit.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import export
from .core import NotAValue, TypeMismatch, decode_values
from .engine import (
    DEFAULT_FUEL, BudgetExhausted, FuelExhausted, enumerate_normal_forms, evaluate, initial_diagram,
    normalize, value_max,
)
from .interp import NotSimple, check_simple, check_structure_rules, verify_bounds
from .natexpr import default_names
from .suite import data_text
from .syntax import ProgramError, format_value, load, parse_value
from .tm import NondeterministicMachine, StepLimit, TMFormatError, clocked_source, load_tm, tm_source

CHECK_SCHEMA = "polyprog.check/1"
BOUNDS_SCHEMA = "polyprog.bounds/1"
BUNDLED = ("arith", "sort", "coin")


class Diagnostic(Exception):
    pass


def _load(path: str):
    if not os.path.exists(path):
        stem = os.path.basename(path).removesuffix(".poly")
        if stem in BUNDLED and os.sep not in path:
            return load(data_text(stem + ".poly"))
        raise Diagnostic(f"{path}: no such file")
    with open(path, encoding="utf-8") as fh:
        return load(fh.read())


def _function(loaded, name: str):
    c = loaded.program.signature.cells.get(name)
    if c is None or c.kind.value != "function":
        raise Diagnostic(f"{name} is not a function of {loaded.program.name}")
    return c


def _args(loaded, phi, texts):
    if len(texts) != len(phi.source):
        raise Diagnostic(f"{phi.name} takes {len(phi.source)} argument(s), got {len(texts)}")
    sig = loaded.program.signature
    return [parse_value(t, s, sig) for t, s in zip(texts, phi.source)]


def _interp(loaded):
    if loaded.interpretation is None:
        raise Diagnostic(f"{loaded.program.name} has no interpretation section")
    return loaded.interpretation


def _emit(obj) -> None:
    print(export.dumps(obj))


# ------------------------------------------------------------------ commands


def cmd_eval(ns) -> int:
    loaded = _load(ns.program)
    sig = loaded.program.signature
    phi = _function(loaded, ns.function)
    args = _args(loaded, phi, ns.args)
    strategy = ns.strategy if ns.seed is None else "random"
    if ns.mode == "exhaustive":
        forms = enumerate_normal_forms(initial_diagram(phi, args), loaded.program)
        values = [decode_values(f) for f in forms]
        best = value_max(values, sig)
        if ns.json:
            _emit({"schema": export.TRACE_SCHEMA, "mode": "exhaustive",
                   "normal_forms": sorted(" ".join(format_value(t, sig) for t in v) for v in values),
                   "outputs": [format_value(t, sig) for t in best]})
        else:
            print(" ".join(format_value(t, sig) for t in best))
        return 0
    if ns.json:
        trace, records, h0 = export.trace_records(loaded.program, phi, args, loaded.interpretation,
                                                  strategy, ns.fuel, ns.seed)
        values = [format_value(t, sig) for t in decode_values(trace.final)]
        doc = export.trace_json(trace, records, h0, values)
        doc["mode"] = "confluent"
        _emit(doc)
        return 0
    values = evaluate(loaded.program, phi, args, fuel=ns.fuel, strategy=strategy, seed=ns.seed)
    print(" ".join(format_value(t, sig) for t in values))
    return 0


def cmd_check(ns) -> int:
    loaded = _load(ns.program)
    interp = _interp(loaded)
    report = check_simple(loaded.program, interp, ns.grid, ns.start)
    structure = []
    if ns.structure:
        structure = check_structure_rules(_structure_rules(loaded.program), interp, ns.grid, ns.start)
    ok = report.simple and all(p is None and w.weak and s.compatible for _, p, w, s in structure)
    if ns.json:
        doc = {"schema": CHECK_SCHEMA, "program": loaded.program.name, **report.as_dict()}
        if ns.structure:
            doc["structure_rules"] = [
                {"rule": r.name, "current_preserving": p is None,
                 "witness": list(p) if p is not None else None,
                 "heat": w.as_dict(), "structure_heat": s.as_dict()}
                for r, p, w, s in structure]
        _emit(doc)
        return 0 if ok else 1
    print(f"{loaded.program.name}: {'simple' if report.simple else 'not simple'} "
          f"on {{{ns.start}..{ns.grid}}}^m")
    print(f"a = {report.a}, K = {report.K}")
    for r in report.rules:
        print(f"  {r}")
    for v in report.violations:
        if not any(v == str(r) for r in report.rules):
            print(f"  ! {v}")
    if structure:
        bad = [(r, p, w, s) for r, p, w, s in structure if p is not None or not w.weak or not s.compatible]
        print(f"structure rules: {len(structure) - len(bad)}/{len(structure)} current-preserving, "
              "weakly compatible and structure-heat decreasing")
        for r, p, w, s in bad:
            print(f"  ! {r.name}: currents differ at {p}" if p is not None else f"  ! {w if not w.weak else s}")
    return 0 if ok else 1


def _structure_rules(program):
    from .structure import generate_structure_rules

    return generate_structure_rules(program.signature)


def cmd_bounds(ns) -> int:
    loaded = _load(ns.program)
    interp = _interp(loaded)
    sig = loaded.program.signature
    phi = _function(loaded, ns.function)
    args = _args(loaded, phi, ns.args)
    try:
        rep = verify_bounds(loaded.program, interp, phi, args, strategy=ns.strategy, fuel=ns.fuel,
                            seed=ns.seed, bound=ns.grid, require_simple=not ns.force)
    except NotSimple as e:
        if ns.json:
            _emit({"schema": BOUNDS_SCHEMA, "simple": False, "violations": e.report.violations,
                   "passed": False})
        else:
            print(f"{loaded.program.name} is not simple; rerun with --force to measure anyway")
            for v in e.report.violations:
                print(f"  ! {v}")
        return 1
    names = default_names(len(phi.source))
    if ns.json:
        doc = {"schema": BOUNDS_SCHEMA, **rep.as_dict(names)}
        doc["outputs"] = [format_value(t, sig) for t in rep.outputs]
        _emit(doc)
        return 0 if rep.passed else 1
    args_s = ", ".join(names)
    for k in "PSQR":
        print(f"{k}_{phi.name}({args_s}) = {getattr(rep, k).format(names)}")
    print(f"sizes {list(rep.sizes)}; k = {rep.k}, l = {rep.l}, steps = {rep.k + rep.l}, "
          f"peak value layer = {rep.peak_current_sum}")
    for c in rep.checks + rep.heat:
        mark = "pass" if c.passed else "FAIL"
        extra = f" ({c.detail})" if c.detail else ""
        print(f"  {mark} {c.name}: {c.measured} <= {c.bound}{extra}")
    print("result: " + " ".join(format_value(t, sig) for t in rep.outputs))
    return 0 if rep.passed else 1


def cmd_compile_tm(ns) -> int:
    tm = load_tm(ns.machine)
    if ns.clock:
        text = clocked_source(tm, ns.clock, ns.nondeterministic)
    else:
        text = tm_source(tm, ns.nondeterministic)
    load(text)  # the output must read back
    if ns.output:
        with open(ns.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_export(ns) -> int:
    loaded = _load(ns.program)
    if ns.rule:
        try:
            rule = loaded.program.rule(ns.rule)
        except KeyError:
            raise Diagnostic(f"no rule named {ns.rule}") from None
        d = rule.lhs if ns.side == "lhs" else rule.rhs
        name = f"{rule.name}.{ns.side}"
    else:
        if ns.function is None:
            raise Diagnostic("export needs a function and arguments, or --rule")
        phi = _function(loaded, ns.function)
        args = _args(loaded, phi, ns.args)
        if ns.stage == "trace":
            trace, records, h0 = export.trace_records(loaded.program, phi, args, loaded.interpretation,
                                                      ns.strategy, ns.fuel, ns.seed)
            sig = loaded.program.signature
            values = [format_value(t, sig) for t in decode_values(trace.final)]
            if ns.format == "dot":
                raise Diagnostic("traces export as json only")
            _emit(export.trace_json(trace, records, h0, values))
            return 0
        d = initial_diagram(phi, args)
        if ns.stage == "normal":
            d, _ = normalize(d, loaded.program, strategy=ns.strategy, fuel=ns.fuel, seed=ns.seed)
        name = f"{phi.name}.{ns.stage}"
    if ns.format == "dot":
        sys.stdout.write(export.diagram_dot(d, name))
    else:
        _emit(export.diagram_json(d))
    return 0


# ---------------------------------------------------------------------- main


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="step limit (default %(default)s)")
    p.add_argument("--strategy", choices=("innermost", "outermost", "random"), default="innermost")
    p.add_argument("--seed", type=int, default=None, help="seed for the random strategy (implies it)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyprog", description="Run and analyse polygraphic programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a function on values")
    p.add_argument("program", help="program file, or arith/sort/coin for the bundled ones")
    p.add_argument("function")
    p.add_argument("args", nargs="*")
    p.add_argument("--mode", choices=("confluent", "exhaustive"), default="confluent")
    p.add_argument("--json", action="store_true", help="print the trace as json")
    _run_flags(p)
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("check", help="check that the interpretation is simple")
    p.add_argument("program")
    p.add_argument("--grid", type=int, default=8, help="largest grid value (default %(default)s)")
    p.add_argument("--start", type=int, default=1, help="smallest grid value (default %(default)s)")
    p.add_argument("--structure", action="store_true", help="also check every structure rule")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("bounds", help="compare a run with the derived bounds")
    p.add_argument("program")
    p.add_argument("function")
    p.add_argument("args", nargs="*")
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--force", action="store_true", help="measure even if the program is not simple")
    p.add_argument("--json", action="store_true")
    _run_flags(p)
    p.set_defaults(run=cmd_bounds)

    p = sub.add_parser("compile-tm", help="compile a Turing machine into a program")
    p.add_argument("machine")
    p.add_argument("--clock", help="clock polynomial in n, e.g. '2*n+2'")
    p.add_argument("--nondeterministic", action="store_true", help="allow several transitions per pair")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_compile_tm)

    p = sub.add_parser("export", help="render a diagram or a trace")
    p.add_argument("program")
    p.add_argument("function", nargs="?")
    p.add_argument("args", nargs="*")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--stage", choices=("initial", "normal", "trace"), default="initial")
    p.add_argument("--rule", help="export a rule side instead of a run")
    p.add_argument("--side", choices=("lhs", "rhs"), default="lhs")
    _run_flags(p)
    p.set_defaults(run=cmd_export)
    return ap


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if getattr(ns, "seed", None) is not None and hasattr(ns, "strategy"):
        ns.strategy = "random"
    try:
        return ns.run(ns)
    except (FuelExhausted, BudgetExhausted, StepLimit) as e:
        print(f"polyprog: resources exhausted: {e}", file=sys.stderr)
        return 2
    except (Diagnostic, ProgramError, TMFormatError, NondeterministicMachine, TypeMismatch,
            NotAValue, OSError) as e:
        print(f"polyprog: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
