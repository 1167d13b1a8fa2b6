"""Memoizing evaluation of orthogonal constructor rewrite programs."""

from ._memodag import (
    EvalError,
    GrsrError,
    ParseError,
    Program,
    ProgramError,
    bench_csv,
    check_all,
    compile,
    orthogonality_violations,
    run,
    tiers,
)


def load_program(path):
    """Parses a program file."""
    with open(path, encoding="utf-8") as f:
        return Program.parse(f.read())


__all__ = [
    "EvalError",
    "GrsrError",
    "ParseError",
    "Program",
    "ProgramError",
    "bench_csv",
    "check_all",
    "compile",
    "load_program",
    "orthogonality_violations",
    "run",
    "tiers",
]
