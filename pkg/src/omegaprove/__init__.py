"""First-order theorem proving over omega-automatic structures.

The kernel (`buchi`, `complement`) implements nondeterministic Buchi
automata with guard-labelled edges and their closure and decision
operations. The `varmaps` layer pairs automata with variable-to-track
bindings. On top sit the input language (`parser`, `desugar`,
`typecheck`), the big-step evaluator (`evaluator`), the built-in binary
numeration (`stdlib`), automaton serialization (`autio`) and the CLI
(`cli`).
"""

from .buchi import (
    BuchiAutomaton,
    LassoWord,
    accepts,
    empty,
    find_accepted_lasso,
    intersect,
    is_empty,
    project,
    simplify,
    substitute_aps,
    track_equality,
    union,
    universal,
)
from .complement import DEFAULT_STATE_BUDGET, complement
from .errors import ProverError, StateBudgetError
from .varmaps import (
    EMPTY_MAP,
    Substitution,
    VarAutomaton,
    VariableMap,
    biased_merge,
    conjoin,
    disjoin,
    merge_union,
    negate,
    project_var,
    rename_var,
)

__version__ = "0.1.0"

__all__ = [
    "BuchiAutomaton",
    "LassoWord",
    "VarAutomaton",
    "VariableMap",
    "Substitution",
    "EMPTY_MAP",
    "DEFAULT_STATE_BUDGET",
    "ProverError",
    "StateBudgetError",
    "accepts",
    "biased_merge",
    "complement",
    "conjoin",
    "disjoin",
    "empty",
    "find_accepted_lasso",
    "intersect",
    "is_empty",
    "merge_union",
    "negate",
    "project",
    "project_var",
    "rename_var",
    "simplify",
    "substitute_aps",
    "track_equality",
    "union",
    "universal",
]
