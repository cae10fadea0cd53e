from ._core import (
    CosmoError,
    Expr,
    InversionError,
    IntegrationError,
    NegativeKineticError,
    ParseError,
    derive,
    diff,
    equivalent,
    eval,
    evolve,
    integrate,
    is_zero,
    parse,
    reconstruct,
    simplify,
)

__all__ = [
    "CosmoError",
    "Expr",
    "InversionError",
    "IntegrationError",
    "NegativeKineticError",
    "ParseError",
    "derive",
    "diff",
    "equivalent",
    "eval",
    "evolve",
    "integrate",
    "is_zero",
    "parse",
    "reconstruct",
    "simplify",
]
