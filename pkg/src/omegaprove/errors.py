"""Exception hierarchy for the prover."""


class ProverError(Exception):
    """Base class for every error raised by this package."""


class UnknownAPError(ProverError):
    """An operation referenced an atomic proposition the automaton does not have."""


class APCollisionError(ProverError):
    """A renaming would map two distinct atomic propositions onto the same one."""


class StateBudgetError(ProverError):
    """A construction (complementation) exceeded the configured state budget."""


class VarMapConflictError(ProverError):
    """Two variable maps disagree about the tracks of a shared variable."""


class VarArityError(ProverError):
    """Two lists of atomic propositions that must align have different lengths."""


class UnknownVariableError(ProverError):
    """A variable-level operation referenced a variable the map does not bind."""


class ParseError(ProverError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


class DesugarError(ProverError):
    """A sugar form could not be rewritten (e.g. factor equality over an unrestricted index)."""


class TypecheckError(ProverError):
    """A definition or proposition is not well formed."""


class AmbiguousCallError(TypecheckError):
    """Two distinct structures both define the called operation."""


class EvalError(ProverError):
    """Evaluation failed (missing annotation, internal inconsistency)."""


class OpenFormulaError(EvalError):
    def __init__(self, free: list):
        super().__init__(f"theorem body has free variables: {', '.join(sorted(free))}")
        self.free = tuple(sorted(free))


class TheoremTimeoutError(EvalError):
    """Evaluation of a theorem exceeded its time limit."""


class DocumentError(ProverError):
    """A serialized automaton document is malformed."""
