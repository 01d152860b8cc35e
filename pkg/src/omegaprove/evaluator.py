"""Big-step evaluation of checked predicates into automata.

Every predicate evaluates to a `VarAutomaton`; every expression evaluates to
a pair (automaton, variable) where the variable carries the expression's
value on a fresh track that callers project away. Conjunction and
disjunction combine through the size-biased merge, negation complements,
existential quantification conjoins the binder's type guard and projects the
variable's tracks.

Every step simplifies its result and feeds the running metrics (peak
intermediate automaton size); a deadline aborts long evaluations.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from . import varmaps
from .buchi import BuchiAutomaton, find_accepted_lasso, track_equality
from .complement import DEFAULT_STATE_BUDGET
from .desugar import count_atoms, signature
from .errors import EvalError, OpenFormulaError, TheoremTimeoutError
from .syntax import (
    ANY,
    E,
    EAdd,
    ECall,
    EInt,
    ESub,
    EVar,
    PAnd,
    PAutLit,
    PCall,
    PEqual,
    PExists,
    PFalse,
    PLess,
    PNot,
    POr,
    PTrue,
    Pred,
    ResolvedCall,
    TypeTag,
    free_vars,
)
from .typecheck import Registry, resolve_call
from .varmaps import EMPTY_MAP, VarAutomaton, VariableMap, fresh_var


@dataclass
class MetricsRecord:
    atoms: int = 0
    quantifier_blocks: str = ""
    max_states: int = 0
    max_edges: int = 0
    final_states: int = 0
    final_edges: int = 0
    runtime_seconds: float = 0.0

    def observe(self, a: BuchiAutomaton):
        if a.n_states > self.max_states:
            self.max_states = a.n_states
        if len(a.edges) > self.max_edges:
            self.max_edges = len(a.edges)


@dataclass
class SharedCaches:
    """Caches shared across theorems of one program run."""

    compiled: dict = field(default_factory=dict)  # predicate name -> VarAutomaton
    complements: dict = field(default_factory=dict)  # BuchiAutomaton -> BuchiAutomaton


class EvalContext:
    def __init__(
        self,
        registry: Registry,
        caches: Optional[SharedCaches] = None,
        state_budget: int = DEFAULT_STATE_BUDGET,
        deadline: Optional[float] = None,
    ):
        self.registry = registry
        self.caches = caches if caches is not None else SharedCaches()
        self.state_budget = state_budget
        self.deadline = deadline
        self.metrics = MetricsRecord()
        self.var_aps: dict = {}  # variable name -> tuple of track names
        self.used_aps: set = set()

    # -- naming -----------------------------------------------------------

    def aps_for_var(self, name: str, n: int = 1) -> tuple:
        aps = self.var_aps.get(name)
        if aps is not None:
            if len(aps) != n:
                raise EvalError(
                    f"variable {name!r} is registered with {len(aps)} tracks, "
                    f"needs {n}"
                )
            return aps
        if n == 1:
            aps = (name,)
        else:
            aps = tuple(f"{name}_{i}" for i in range(n))
        if any(ap in self.used_aps for ap in aps):
            raise EvalError(f"track names for {name!r} collide")
        self.var_aps[name] = aps
        self.used_aps.update(aps)
        return aps

    def fresh(self, n_aps: int = 1) -> str:
        taken = set(self.var_aps) | self.used_aps | set(self.registry.predicates)
        name, aps = fresh_var(n_aps, taken=taken)
        self.var_aps[name] = aps
        self.used_aps.update(aps)
        return name

    # -- step bookkeeping ---------------------------------------------------

    def check_deadline(self):
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise TheoremTimeoutError("theorem evaluation timed out")

    def step(self, va: VarAutomaton) -> VarAutomaton:
        from .buchi import simplify

        self.check_deadline()
        va = VarAutomaton(va.varmap, simplify(va.automaton))
        self.metrics.observe(va.automaton)
        return va


# ---------------------------------------------------------------------------
# Kernel-op wrappers (simplify + metrics after every step)


def _conj(ctx: EvalContext, a: VarAutomaton, b: VarAutomaton) -> VarAutomaton:
    return ctx.step(varmaps.conjoin(a, b))


def _disj(ctx: EvalContext, a: VarAutomaton, b: VarAutomaton) -> VarAutomaton:
    return ctx.step(varmaps.disjoin(a, b))


def _neg(ctx: EvalContext, a: VarAutomaton) -> VarAutomaton:
    cached = ctx.caches.complements.get(a.automaton)
    if cached is None:
        ctx.check_deadline()
        cached = varmaps.negate(a, ctx.state_budget).automaton
        ctx.caches.complements[a.automaton] = cached
    return ctx.step(VarAutomaton(a.varmap, cached))


def _proj(ctx: EvalContext, a: VarAutomaton, var: str) -> VarAutomaton:
    if var not in a.varmap:
        return a  # variable never constrained; nothing to project
    return ctx.step(varmaps.project_var(a, var))


# ---------------------------------------------------------------------------
# Expressions: e  =>  (automaton, variable, is_plain_variable)


def eval_expr(ctx: EvalContext, e: E):
    if isinstance(e, EVar):
        return varmaps.true_automaton(), e.name, True
    if isinstance(e, EInt):
        if e.ty is None:
            raise EvalError("literal was not typechecked")
        if e.value == 0:
            return _nullary_op(ctx, "zero", e.ty)
        if e.value == 1:
            return _nullary_op(ctx, "one", e.ty)
        expanded: E = EInt(1, ty=e.ty)
        for _ in range(e.value - 1):
            expanded = EAdd(expanded, EInt(1, ty=e.ty), ty=e.ty)
        return eval_expr(ctx, expanded)
    if isinstance(e, (EAdd, ESub)):
        va_a, x, x_var = eval_expr(ctx, e.a)
        va_b, y, y_var = eval_expr(ctx, e.b)
        z = ctx.fresh()
        if isinstance(e, EAdd):
            rel_args = [EVar(x, e.ty), EVar(y, e.ty), EVar(z, e.ty)]
        else:  # a - b: the result z satisfies z + b = a
            rel_args = [EVar(z, e.ty), EVar(y, e.ty), EVar(x, e.ty)]
        rc = resolve_call(ctx.registry, "adder", [e.ty] * 3, rel_args)
        if rc.target == "adder" and not ctx.registry.has_predicate("adder"):
            raise EvalError(f"no adder for type {e.ty}")
        cur = eval_call(ctx, rc)
        if not y_var:
            cur = _conj(ctx, va_b, cur)
        if not x_var:
            cur = _conj(ctx, va_a, cur)
        if not x_var:
            cur = _proj(ctx, cur, x)
        if not y_var:
            cur = _proj(ctx, cur, y)
        return cur, z, False
    if isinstance(e, ECall):
        x = ctx.fresh()
        rc = ResolvedCall(e.name, tuple(e.args) + (EVar(x, e.ty),))
        va = eval_call(ctx, rc)
        return va, x, False
    raise EvalError(f"expression not desugared: {e!r}")


def _nullary_op(ctx: EvalContext, opname: str, ty: TypeTag):
    x = ctx.fresh()
    rc = resolve_call(ctx.registry, opname, [ty], [EVar(x, ty)])
    if rc.target == opname and not ctx.registry.has_predicate(opname):
        raise EvalError(f"no {opname!r} for type {ty}")
    return eval_call(ctx, rc), x, False


# ---------------------------------------------------------------------------
# Calls


def instantiate_predicate(ctx: EvalContext, name: str) -> VarAutomaton:
    """The compiled automaton of a registered predicate over its formals."""
    cached = ctx.caches.compiled.get(name)
    if cached is not None:
        return cached
    info = ctx.registry.predicate(name)
    if info.literal is not None:
        va = info.literal
        for (v, aps) in va.varmap.items():
            known = ctx.var_aps.get(v)
            if known is None:
                ctx.var_aps[v] = aps
                ctx.used_aps.update(aps)
    else:
        if info.body is None:
            raise EvalError(f"predicate {name!r} has no body")
        va = eval_pred(ctx, info.body)
    ctx.caches.compiled[name] = va
    return va


def eval_call(ctx: EvalContext, rc: ResolvedCall) -> VarAutomaton:
    """The call rule: evaluate arguments, rename the callee's formals onto
    the argument variables (two passes, so swaps and aliasing work), conjoin
    everything, and project the temporaries of non-variable arguments."""
    results = [eval_expr(ctx, arg) for arg in rc.args]

    if rc.target is None:  # raw track equality
        (va_a, x, _), (va_b, y, _) = results
        aps_x = ctx.var_aps.get(x) or ctx.aps_for_var(x)
        aps_y = ctx.var_aps.get(y) or ctx.aps_for_var(y)
        eq = VarAutomaton(
            VariableMap.of({x: aps_x, y: aps_y}) if x != y else VariableMap.of({x: aps_x}),
            track_equality(aps_x, aps_y),
        )
        cur = eq
        for (va, v, is_var) in reversed(results):
            if not is_var:
                cur = _conj(ctx, va, cur)
        for (va, v, is_var) in results:
            if not is_var:
                cur = _proj(ctx, cur, v)
        return cur

    body = instantiate_predicate(ctx, rc.target)
    info = ctx.registry.predicate(rc.target)
    formals = [f.name for f in info.formals]
    if len(formals) != len(results):
        raise EvalError(
            f"{rc.target!r} takes {len(formals)} arguments, got {len(results)}"
        )

    renamed = body
    temps = []
    for fname in formals:
        if fname in renamed.varmap:
            tmp = ctx.fresh(len(renamed.varmap[fname]))
            renamed = varmaps.rename_var(
                renamed, fname, tmp, ctx.var_aps[tmp]
            )
            temps.append(tmp)
        else:
            temps.append(None)
    for tmp, (_, argvar, _) in zip(temps, results):
        if tmp is None:
            continue
        aps = ctx.aps_for_var(argvar, len(ctx.var_aps[tmp]))
        renamed = varmaps.rename_var(renamed, tmp, argvar, aps)

    cur = renamed
    for (va, v, is_var) in reversed(results):
        if not is_var:
            cur = _conj(ctx, va, cur)
    cur = ctx.step(cur)
    for (va, v, is_var) in results:
        if not is_var:
            cur = _proj(ctx, cur, v)
    return cur


# ---------------------------------------------------------------------------
# Predicates


def eval_exists(ctx: EvalContext, p: PExists) -> VarAutomaton:
    body = eval_pred(ctx, p.body)
    if p.guard is not None:
        guard = eval_call(ctx, p.guard)
        combined = _conj(ctx, guard, body)
    else:
        combined = body
    return _proj(ctx, combined, p.var)


def eval_pred(ctx: EvalContext, p: Pred) -> VarAutomaton:
    ctx.check_deadline()
    if isinstance(p, PTrue):
        return ctx.step(varmaps.true_automaton())
    if isinstance(p, PFalse):
        return ctx.step(varmaps.false_automaton())
    if isinstance(p, PAnd):
        return _conj(ctx, eval_pred(ctx, p.l), eval_pred(ctx, p.r))
    if isinstance(p, POr):
        return _disj(ctx, eval_pred(ctx, p.l), eval_pred(ctx, p.r))
    if isinstance(p, PNot):
        if isinstance(p.p, PNot):  # language-preserving shortcut
            return eval_pred(ctx, p.p.p)
        return _neg(ctx, eval_pred(ctx, p.p))
    if isinstance(p, PAutLit):
        for (v, aps) in p.value.varmap.items():
            if v not in ctx.var_aps:
                ctx.var_aps[v] = aps
                ctx.used_aps.update(aps)
        return ctx.step(p.value)
    if isinstance(p, PExists):
        return eval_exists(ctx, p)
    if isinstance(p, (PLess, PEqual, PCall)):
        if p.resolved is None:
            raise EvalError(f"predicate was not typechecked: {p!r}")
        return eval_call(ctx, p.resolved)
    raise EvalError(f"cannot evaluate {p!r}; was it desugared?")


# ---------------------------------------------------------------------------
# Theorems


def decide_theorem(ctx: EvalContext, name: str, p: Pred):
    """Evaluate a closed, checked, desugared predicate to a verdict.

    Returns (verdict, metrics). The empty-varmap result automaton accepts
    the unique empty-valuation word exactly when the theorem is TRUE.
    """
    free = free_vars(p)
    if free:
        raise OpenFormulaError(sorted(free))
    start = time.perf_counter()
    ctx.metrics = MetricsRecord(
        atoms=count_atoms(p), quantifier_blocks=signature(p)
    )
    result = eval_pred(ctx, p)
    if result.varmap.vars():
        raise EvalError(
            f"theorem {name!r} left unprojected variables {result.varmap.vars()}"
        )
    witness = find_accepted_lasso(result.automaton)
    verdict = witness is not None
    ctx.metrics.final_states = result.automaton.n_states
    ctx.metrics.final_edges = len(result.automaton.edges)
    ctx.metrics.runtime_seconds = time.perf_counter() - start
    return verdict, ctx.metrics
