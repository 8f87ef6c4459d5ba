"""Python front end for the prophic model checker.

    >>> import prophic
    >>> r = prophic.check_file("tests/corpus/running.vmt")
    >>> r.verdict
    'safe'
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ._prophic import ParseError, ProphicError, UnsupportedLogic
from ._prophic import check as _check

__all__ = ["Result", "check", "check_file", "ProphicError", "ParseError", "UnsupportedLogic"]


@dataclass
class Result:
    verdict: str  # "safe", "unsafe" or "unknown"
    bound: int  # counterexample length for unsafe results
    reason: str
    witness: str  # SMT-LIB invariant or state blocks; empty when unknown
    stats: dict = field(default_factory=dict)


def check(text: str, **options) -> Result:
    """Runs the engine on VMT text. Keyword options mirror the CLI flags:
    mode, engine, max_k, timeout, property, value_abstraction,
    assume_prestate, solver."""
    r = _check(text, **options)
    return Result(r["verdict"], r["bound"], r["reason"], r["witness"], json.loads(r["stats"]))


def check_file(path: str | Path, **options) -> Result:
    return check(Path(path).read_text(), **options)
