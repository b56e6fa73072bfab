"""Separation-logic entailment checking by hint unfolding and cancellation.

Goals and hint databases use the text format in docs/format.md.
"""

from ._core import (
    BenchRow,
    CheckResult,
    ParseError,
    TraceEvent,
    bench_csv_header,
    bench_sll,
    builtin_hints,
    check,
    normalize_goal,
    validate_hints,
)

__all__ = [
    "BenchRow",
    "CheckResult",
    "ParseError",
    "TraceEvent",
    "bench_csv",
    "bench_csv_header",
    "bench_sll",
    "builtin_hints",
    "check",
    "normalize_goal",
    "validate_hints",
]


def bench_csv(sizes):
    """CSV text for the linked-list benchmark at the given sizes."""
    lines = [bench_csv_header()]
    lines += [bench_sll(n).csv() for n in sizes]
    return "\n".join(lines) + "\n"
