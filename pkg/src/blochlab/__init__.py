"""Weighted Bloch semi-norms and composition operators from the log-Bloch space."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    EvaluationError,
    PreconditionError,
    SelfMapRefused,
    SpecParseError,
    UnsupportedError,
)
from .monomials import CONSTANTS, A, find_threshold_N, monomial_log_norm, r_seq, solve_tj  # noqa: E402
from .operator import (  # noqa: E402
    annuli_diagnostic,
    classify,
    direct_transfer_check,
    essential_norm_band,
    quotient_sequence,
)
from .seminorm import GridConfig, sup_weighted_deriv, sup_weighted_deriv_radial  # noqa: E402
from .symbols import parse_symbol_spec, validate_self_map  # noqa: E402
from .weights import VLOG, equivalence_constants, eval_weight, parse_weight_spec  # noqa: E402
