"""Run, measure and verify two-party protocol sessions from Python."""

from ._core import (
    Error,
    FramingError,
    InvalidArgument,
    VerificationError,
    catalog,
    factor_from_roots,
    four_square_roots,
    jacobi,
    run,
    stats,
    verify_transcript,
)

__all__ = [
    "Error",
    "FramingError",
    "InvalidArgument",
    "VerificationError",
    "catalog",
    "factor_from_roots",
    "four_square_roots",
    "jacobi",
    "run",
    "stats",
    "verify_transcript",
]
