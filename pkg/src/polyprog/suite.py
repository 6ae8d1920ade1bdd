"""The bundled programs and fixture machines."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .interp import Interpretation
from .rules import Program
from .syntax import Loaded, load


def data_text(name: str) -> str:
    return resources.files(__package__).joinpath("data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def _bundled(name: str) -> Loaded:
    return load(data_text(name))


def builtin_arith() -> tuple[Program, Interpretation]:
    """Unary ``add`` and ``mult`` with their interpretation."""
    got = _bundled("arith.poly")
    return got.program, got.interpretation


def builtin_sort() -> tuple[Program, Interpretation]:
    """Merge sort over literal lists with its interpretation."""
    got = _bundled("sort.poly")
    return got.program, got.interpretation


def builtin_coin() -> Program:
    """A nullary ``c`` that may rewrite to 0 or to 1."""
    return _bundled("coin.poly").program


def fixture_machine(name: str):
    """``increment`` (binary, least significant bit first) or ``halt``."""
    from .tm import parse_tm

    return parse_tm(data_text(f"{name}.tm"))


BUILTINS = {"arith": builtin_arith, "sort": builtin_sort}
