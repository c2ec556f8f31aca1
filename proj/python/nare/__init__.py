"""Solvers for complex nonsymmetric algebraic Riccati equations X C X - X D - A X + B = 0."""

from ._nare import (
    BadParam,
    BracketInvalid,
    ClassReport,
    Infeasible,
    IoError,
    MarginViolation,
    NareError,
    NoConvergence,
    ParamChoice,
    Problem,
    RotationInfeasible,
    SingularMatrix,
    Solution,
    SylvesterSingular,
    bench,
    choose_params,
    classify,
    example_71,
    example_72,
    methods,
    nres,
    random_problem,
    read_problem,
    solve,
    verify_extremal,
    write_problem,
)

__all__ = [name for name in dir() if not name.startswith("_")]
