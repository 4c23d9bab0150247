"""Exact-arithmetic verification of finite double-sum identities."""

from .catalog import IdentityRecord, ParamBinding, builtin_catalog, get_record
from .dsl import EvalError, ParseError, evaluate, parse, to_text
from .exact import Rational, rational
from .transform import binomial_transform, inverse_binomial_transform
from .verify import (
    UnknownIdentity,
    VerificationReport,
    brute_force_double_sum,
    check_identity,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "IdentityRecord",
    "ParamBinding",
    "builtin_catalog",
    "get_record",
    "EvalError",
    "ParseError",
    "evaluate",
    "parse",
    "to_text",
    "Rational",
    "rational",
    "binomial_transform",
    "inverse_binomial_transform",
    "UnknownIdentity",
    "VerificationReport",
    "brute_force_double_sum",
    "check_identity",
    "run_suite",
]
