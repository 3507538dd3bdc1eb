"""Markov logic over infinite Herbrand domains."""

__version__ = "0.1.0"

from .errors import (
    MLNError,
    ParseError,
    TypeCheckError,
    AnalysisError,
    QuantifierRestrictionError,
    NotDeterminateError,
    SizeError,
)
from .logic import (
    INF,
    DomainType,
    Signature,
    Var,
    Const,
    App,
    Atom,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Forall,
    Exists,
    Literal,
    WeightedFormula,
    WeightedClause,
    Program,
)
from .parser import parse_program, parse_formula, format_program, format_formula
from .cnf import to_prenex_cnf, expand_finite_existentials, compile_clauses, compile_program
from .herbrand import (
    GroundTerm,
    GroundAtom,
    GroundClause,
    DeterminacyReport,
    enumerate_universe,
    check_sigma_determinate,
    ground_clauses_containing,
    neighbors,
    ground_atom,
    parse_ground_atom,
)
from .gibbs import (
    Volume,
    ConditionalDistribution,
    build_volume,
    hamiltonian,
    conditional,
)
from .uniqueness import (
    AtomInteraction,
    UniquenessReport,
    oscillation,
    interaction_sum,
    check_uniqueness,
)
from .sampler import (
    TruncationSpec,
    MarginalEstimate,
    SensitivityReport,
    truncate,
    gibbs_sweep,
    estimate_marginals,
    boundary_sensitivity,
)
from .satisfiability import (
    TruncatedKB,
    SatReport,
    ground_truncation,
    solve_ground,
    check_satisfiable,
    check_entailment,
    limit_conditional,
)
