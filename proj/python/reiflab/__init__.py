"""Python bindings for the reiflab lattice experiment library."""

from ._core import (
    Domain,
    InvalidInput,
    SolverError,
    ball,
    cone,
    ellipticity_constant,
    flatness,
    half_space_ball,
    koch,
    run_decay,
    run_flatness,
    run_holder,
    run_solve,
    run_verify,
    solve,
)

__all__ = [
    "Domain",
    "InvalidInput",
    "SolverError",
    "ball",
    "cone",
    "ellipticity_constant",
    "flatness",
    "half_space_ball",
    "koch",
    "run_decay",
    "run_flatness",
    "run_holder",
    "run_solve",
    "run_verify",
    "solve",
]
