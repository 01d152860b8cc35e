"""Type environments, structures, call resolution and well-formedness.

Types are predicates: `x : tau` means the automaton named by tau accepts x
(possibly with partially applied arguments). A structure is a named bundle
of call templates that resolves operation names (`adder`, `less`, `equal`,
`zero`, `one`, and any user-chosen names) to concrete predicates, giving
ad-hoc polymorphism across numeration systems.

Checking runs before evaluation and annotates every expression with its
type and every relation and call with its resolved target, so the evaluator
never re-derives types. Predicates may only call previously registered
predicates, which also rules out recursion.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .errors import AmbiguousCallError, TypecheckError
from .syntax import (
    ANY,
    CallTemplate,
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
    Param,
    Pred,
    ResolvedCall,
    TypeTag,
)
from .varmaps import VarAutomaton

TypeEnv = dict  # identifier -> TypeTag; inner scopes shadow by copy-extend


class _LiteralNeedsContext(TypecheckError):
    def __init__(self):
        super().__init__("integer literal has no numeric context")


def template_params(ct: CallTemplate) -> list:
    """1-based positions of the star slots (the call's explicit arguments)."""
    return [i + 1 for i, s in enumerate(ct.slots) if s is None]


def template_implicits(ct: CallTemplate) -> list:
    """1-based positions of the identifier slots (filled by the structure)."""
    return [i + 1 for i, s in enumerate(ct.slots) if s is not None]


@dataclass(frozen=True)
class StructureDef:
    name: str
    params: tuple
    defs: tuple  # ((opname, CallTemplate), ...)

    def lookup(self, opname: str) -> Optional[CallTemplate]:
        for (k, ct) in self.defs:
            if k == opname:
                return ct
        return None

    def is_numeric(self) -> bool:
        adder = self.lookup("adder")
        less = self.lookup("less")
        return (
            adder is not None
            and len(template_params(adder)) == 3
            and less is not None
            and len(template_params(less)) == 2
        )

    def with_def(self, opname: str, ct: CallTemplate) -> "StructureDef":
        return StructureDef(self.name, self.params, self.defs + ((opname, ct),))


@dataclass
class PredicateInfo:
    name: str
    formals: tuple  # (Param, ...)
    body: Optional[Pred] = None  # annotated; None for automaton literals
    literal: Optional[VarAutomaton] = None

    @property
    def arity(self) -> int:
        return len(self.formals)


class Registry:
    """Program-ordered predicate and structure registries.

    Predicates may only refer to predicates registered earlier, which is how
    the checker realizes the well-formed set and rejects recursion.
    """

    def __init__(self):
        self.predicates: dict = {}
        self.structures: dict = {}

    def register_predicate(self, info: PredicateInfo):
        if info.name in self.predicates:
            raise TypecheckError(f"predicate {info.name!r} is already defined")
        self.predicates[info.name] = info

    def register_structure(self, sd: StructureDef, replace_existing: bool = True):
        if sd.name in self.structures and not replace_existing:
            raise TypecheckError(f"structure {sd.name!r} is already defined")
        self.structures[sd.name] = sd

    def predicate(self, name: str) -> PredicateInfo:
        info = self.predicates.get(name)
        if info is None:
            raise TypecheckError(f"call to undefined predicate {name!r}")
        return info

    def has_predicate(self, name: str) -> bool:
        return name in self.predicates

    def structure(self, name: str) -> Optional[StructureDef]:
        return self.structures.get(name)

    def is_numeric_type(self, tag: Optional[TypeTag]) -> bool:
        if tag is None or tag == ANY:
            return False
        sd = self.structures.get(tag.name)
        return sd is not None and sd.is_numeric()


def resolve_call(
    reg: Registry, name: str, arg_types: Sequence[Optional[TypeTag]], args: Sequence[E]
) -> ResolvedCall:
    """Resolve `name(args)` through the structures of the argument types.

    If exactly one structure among the argument types defines `name`, the
    call becomes a call of that template's target with structure parameters
    filled in at the implicit slots; if none does, the call resolves to
    itself.
    """
    candidates = []
    for ty in arg_types:
        if ty is None or ty == ANY:
            continue
        sd = reg.structure(ty.name)
        if sd is not None and sd.lookup(name) is not None:
            candidates.append((sd, ty))
    if not candidates:
        return ResolvedCall(name, tuple(args))

    names = {sd.name for (sd, _) in candidates}
    if len(names) > 1:
        raise AmbiguousCallError(
            f"call {name!r}: structures {sorted(names)} both define it"
        )
    tags = {ty for (_, ty) in candidates}
    if len(tags) > 1:
        raise TypecheckError(
            f"call {name!r}: arguments instantiate {names.pop()!r} differently: "
            f"{sorted(map(str, tags))}"
        )
    sd, tag = candidates[0]
    ct = sd.lookup(name)
    stars = template_params(ct)
    if len(stars) != len(args):
        raise TypecheckError(
            f"{name!r} resolves to {ct} taking {len(stars)} arguments, got {len(args)}"
        )
    if len(sd.params) != len(tag.args):
        raise TypecheckError(
            f"type {tag} does not instantiate structure {sd.name!r} "
            f"({len(sd.params)} parameters)"
        )
    binding = dict(zip(sd.params, tag.args))
    full = []
    arg_iter = iter(args)
    for slot in ct.slots:
        if slot is None:
            full.append(next(arg_iter))
        else:
            full.append(EVar(binding[slot]))
    return ResolvedCall(ct.target, tuple(full))


# ---------------------------------------------------------------------------
# Expression typing


def type_expr(
    reg: Registry, gamma: TypeEnv, e: E, expected: Optional[TypeTag] = None
) -> E:
    """Annotate `e` with its type; literals adopt the type of their context."""
    if isinstance(e, EVar):
        ty = gamma.get(e.name)
        if ty is None:
            raise TypecheckError(f"unbound variable {e.name!r}")
        if expected is not None and expected != ANY and ty != expected:
            raise TypecheckError(
                f"variable {e.name!r} has type {ty}, expected {expected}"
            )
        return replace(e, ty=ty)
    if isinstance(e, EInt):
        if expected is None:
            raise _LiteralNeedsContext()
        if not reg.is_numeric_type(expected):
            raise TypecheckError(
                f"literal {e.value} needs a numeric type, got {expected}"
            )
        return replace(e, ty=expected)
    if isinstance(e, (EAdd, ESub)):
        try:
            a = type_expr(reg, gamma, e.a, expected)
            b = type_expr(reg, gamma, e.b, a.ty)
        except _LiteralNeedsContext:
            b = type_expr(reg, gamma, e.b, expected)
            a = type_expr(reg, gamma, e.a, b.ty)
        ty = a.ty
        if not reg.is_numeric_type(ty):
            raise TypecheckError(f"no adder available for type {ty}")
        return replace(e, a=a, b=b, ty=ty)
    if isinstance(e, ECall):
        info = reg.predicate(e.name)
        if info.arity != len(e.args) + 1:
            raise TypecheckError(
                f"{e.name!r} used as a function needs {info.arity - 1} arguments, "
                f"got {len(e.args)}"
            )
        args = []
        arg_ty = None
        for arg, formal in zip(e.args, info.formals):
            a = type_expr(reg, gamma, arg, formal.ty)
            args.append(a)
            arg_ty = arg_ty or a.ty
        sigma = info.formals[-1].ty or arg_ty or expected or ANY
        return replace(e, args=tuple(args), ty=sigma)
    raise TypecheckError(f"expression not desugared: {e!r}")


def _relation_types(reg: Registry, gamma: TypeEnv, a: E, b: E):
    try:
        a2 = type_expr(reg, gamma, a)
        b2 = type_expr(reg, gamma, b, a2.ty)
    except _LiteralNeedsContext:
        b2 = type_expr(reg, gamma, b)
        a2 = type_expr(reg, gamma, a, b2.ty)
    if a2.ty != b2.ty:
        raise TypecheckError(f"relation operands differ: {a2.ty} vs {b2.ty}")
    return a2, b2


def _check_call_against(reg: Registry, gamma: TypeEnv, rc: ResolvedCall) -> ResolvedCall:
    """Type the full argument list of a resolved call against its target."""
    info = reg.predicate(rc.target)
    if info.arity != len(rc.args):
        raise TypecheckError(
            f"{rc.target!r} takes {info.arity} arguments, got {len(rc.args)}"
        )
    sibling = None
    for arg in rc.args:
        if isinstance(arg, EVar) and gamma.get(arg.name) not in (None, ANY):
            sibling = gamma[arg.name]
            break
    args = []
    for arg, formal in zip(rc.args, info.formals):
        expected = formal.ty or sibling
        try:
            args.append(type_expr(reg, gamma, arg, formal.ty))
        except _LiteralNeedsContext:
            args.append(type_expr(reg, gamma, arg, expected))
    return ResolvedCall(rc.target, tuple(args))


def check_prop(reg: Registry, gamma: TypeEnv, p: Pred) -> Pred:
    """Well-formedness of a desugared proposition; returns the annotated tree."""
    if isinstance(p, (PTrue, PFalse, PAutLit)):
        return p
    if isinstance(p, PAnd):
        return PAnd(check_prop(reg, gamma, p.l), check_prop(reg, gamma, p.r))
    if isinstance(p, POr):
        return POr(check_prop(reg, gamma, p.l), check_prop(reg, gamma, p.r))
    if isinstance(p, PNot):
        return PNot(check_prop(reg, gamma, p.p))
    if isinstance(p, PExists):
        ty = p.ty or ANY
        guard = None
        if ty != ANY:
            info = reg.predicate(ty.name)
            if info.arity != len(ty.args) + 1:
                raise TypecheckError(
                    f"type {ty} needs {info.arity - 1} parameters"
                )
            for a in ty.args:
                if a not in gamma:
                    raise TypecheckError(f"type parameter {a!r} is unbound")
            guard_args = tuple(EVar(a, gamma[a]) for a in ty.args) + (
                EVar(p.var, ty),
            )
            guard = ResolvedCall(ty.name, guard_args)
        inner = dict(gamma)
        inner[p.var] = ty
        return PExists(p.var, p.ty, check_prop(reg, inner, p.body), guard=guard)
    if isinstance(p, PLess):
        a, b = _relation_types(reg, gamma, p.a, p.b)
        rc = resolve_call(reg, "less", [a.ty, b.ty], [a, b])
        if rc.target == "less" and not reg.has_predicate("less"):
            raise TypecheckError(f"no ordering defined for type {a.ty}")
        rc = _check_call_against(reg, gamma, rc)
        return PLess(a, b, resolved=rc)
    if isinstance(p, PEqual):
        a, b = _relation_types(reg, gamma, p.a, p.b)
        rc = resolve_call(reg, "equal", [a.ty, b.ty], [a, b])
        if rc.target == "equal" and not reg.has_predicate("equal"):
            rc = ResolvedCall(None, (a, b))  # raw track equality
        else:
            rc = _check_call_against(reg, gamma, rc)
        return PEqual(a, b, resolved=rc)
    if isinstance(p, PCall):
        arg_types = []
        pre_args = []
        for arg in p.args:
            try:
                a = type_expr(reg, gamma, arg)
            except _LiteralNeedsContext:
                a = arg  # typed against the resolved formal below
            pre_args.append(a)
            arg_types.append(getattr(a, "ty", None))
        rc = resolve_call(reg, p.name, arg_types, pre_args)
        rc = _check_call_against(reg, gamma, rc)
        return PCall(p.name, p.args, resolved=rc)
    raise TypecheckError(f"predicate not desugared: {p!r}")


def check_definition(reg: Registry, name: str, formals: Sequence[Param], body: Pred) -> Pred:
    """A definition P(x : tau...) := Q is well formed when Q checks under the
    formals' environment."""
    gamma: TypeEnv = {}
    for f in formals:
        gamma[f.name] = f.ty or ANY
    return check_prop(reg, gamma, body)
