"""Operator-splitting PDE-ODE solvers with discrete adjoint and tangent-linear models."""

from ._core import (
    Error,
    InvalidArgument,
    RhsSystem,
    Stepper,
    converge_ode,
    converge_split,
    mito_f,
    mito_g,
    model,
    model_names,
    order_conditions,
    parse_system,
    phi,
    phi_prime,
    rhs,
    run_fhn2d,
    run_mito,
    scheme_names,
    tableau,
)

__all__ = [
    "Error",
    "InvalidArgument",
    "RhsSystem",
    "Stepper",
    "converge_ode",
    "converge_split",
    "mito_f",
    "mito_g",
    "model",
    "model_names",
    "order_conditions",
    "parse_system",
    "phi",
    "phi_prime",
    "rhs",
    "run_fhn2d",
    "run_mito",
    "scheme_names",
    "tableau",
]
