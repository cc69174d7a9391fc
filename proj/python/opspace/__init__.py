"""Matrix-ordered operator spaces: norms, cones and dual SDP checks."""

from ._core import (
    OpspaceError,
    Space,
    cone_member,
    cp_check,
    dualnorm,
    example,
    extend,
    kraus_functional,
    l1_probe,
    norm,
    nu,
    regnorm,
    regularity,
    run,
    selftest,
    span,
)

__all__ = [
    "OpspaceError",
    "Space",
    "cone_member",
    "cp_check",
    "dualnorm",
    "example",
    "extend",
    "kraus_functional",
    "l1_probe",
    "norm",
    "nu",
    "regnorm",
    "regularity",
    "run",
    "selftest",
    "span",
]
