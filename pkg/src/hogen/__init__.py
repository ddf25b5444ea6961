"""Higher-order pattern generalization modulo A, C, and AC symbols."""

from .terms import (
    A,
    C,
    ArrowType,
    BaseType,
    BudgetExceeded,
    Bound,
    Const,
    Free,
    Signature,
    SignatureError,
    SimpleType,
    Term,
    TermError,
    apply_subst,
    arrow,
    depth,
    e_equal,
    head,
    is_pattern,
    make_signature,
    mk_app,
    normalize,
    size,
)
from .syntactic import GeneralizationResult, syntactic_lgg
from .equational import (
    CompleteSetOutcome,
    MatchBudget,
    complete_set,
    e_match,
    minimize,
    more_general,
)
from .fragments import (
    BOTTOM,
    FAILURE,
    Block,
    DetSet,
    SingletonAlignment,
    determinate_set,
    is_k_determined,
    is_kl_distinct,
    is_total_k_determined,
    is_total_kl_distinct,
    pahm,
    pahs,
)
from .optimal import (
    Strategy,
    choose,
    optimal_generalize,
    rigidity_a,
    rigidity_a_full,
    rigidity_ac,
    rigidity_c,
)
from .oracle import OracleBudget, brute_force_mcsg, e_equal_naive
from .syntax import ParseError, Problem, format_term, parse_problem, parse_term, parse_type

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
