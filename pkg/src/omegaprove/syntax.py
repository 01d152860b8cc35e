"""Abstract syntax for the prover's input language.

A program is an ordered list of directives and predicate definitions.
Predicates are first-order formulas over arithmetic expressions; the parser
keeps sugar forms (iff, forall, word indexing, literal multiplication) as
dedicated nodes, which `desugar` later eliminates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .varmaps import VarAutomaton


@dataclass(frozen=True)
class TypeTag:
    """A type used as a predicate: P, or a partial application P(x...)."""

    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if self.args:
            return f"{self.name}({', '.join(self.args)})"
        return self.name


ANY = TypeTag("any", ())


@dataclass(frozen=True)
class Param:
    name: str
    ty: Optional[TypeTag] = None


@dataclass(frozen=True)
class CallTemplate:
    """Target predicate with slots: None is a star ('any'), names are
    structure parameters filled implicitly."""

    target: str
    slots: tuple

    def __str__(self) -> str:
        inner = ", ".join("any" if s is None else s for s in self.slots)
        return f"{self.target}({inner})"


# --------------------------------------------------------------------------
# Expressions


class E:
    __slots__ = ()


@dataclass(frozen=True)
class EVar(E):
    name: str
    ty: Optional[TypeTag] = None


@dataclass(frozen=True)
class EInt(E):
    value: int
    ty: Optional[TypeTag] = None

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("integer literals are naturals")


@dataclass(frozen=True)
class EAdd(E):
    a: E
    b: E
    ty: Optional[TypeTag] = None


@dataclass(frozen=True)
class ESub(E):
    a: E
    b: E
    ty: Optional[TypeTag] = None


@dataclass(frozen=True)
class EMul(E):
    """Sugar: literal multiple of an expression."""

    n: int
    e: E
    ty: Optional[TypeTag] = None


@dataclass(frozen=True)
class ECall(E):
    name: str
    args: tuple
    ty: Optional[TypeTag] = None


# --------------------------------------------------------------------------
# Predicates


class Pred:
    __slots__ = ()


@dataclass(frozen=True)
class ResolvedCall:
    """A call after structure resolution: target None means raw track
    equality of the two argument variables."""

    target: Optional[str]
    args: tuple


@dataclass(frozen=True)
class PTrue(Pred):
    pass


@dataclass(frozen=True)
class PFalse(Pred):
    pass


@dataclass(frozen=True)
class PAnd(Pred):
    l: Pred
    r: Pred


@dataclass(frozen=True)
class POr(Pred):
    l: Pred
    r: Pred


@dataclass(frozen=True)
class PNot(Pred):
    p: Pred


@dataclass(frozen=True)
class PIff(Pred):
    l: Pred
    r: Pred


@dataclass(frozen=True)
class PExists(Pred):
    var: str
    ty: Optional[TypeTag]
    body: Pred
    guard: Optional[ResolvedCall] = None


@dataclass(frozen=True)
class PForall(Pred):
    var: str
    ty: Optional[TypeTag]
    body: Pred


@dataclass(frozen=True)
class PLess(Pred):
    a: E
    b: E
    resolved: Optional[ResolvedCall] = None


@dataclass(frozen=True)
class PEqual(Pred):
    a: E
    b: E
    resolved: Optional[ResolvedCall] = None


@dataclass(frozen=True)
class PCall(Pred):
    name: str
    args: tuple
    resolved: Optional[ResolvedCall] = None


@dataclass(frozen=True)
class PAutLit(Pred):
    value: VarAutomaton
    label: str = ""


@dataclass(frozen=True)
class WordIndex:
    word: str
    index: E


@dataclass(frozen=True)
class PWordEq(Pred):
    """P[i] = 0 | 1 | Q[j], possibly negated."""

    left: WordIndex
    right: Union[int, WordIndex]
    negated: bool = False


@dataclass(frozen=True)
class PFactorEq(Pred):
    """P[i..j] = Q[k..l]."""

    lword: str
    i: E
    j: E
    rword: str
    k: E
    l: E


# --------------------------------------------------------------------------
# Top-level items


@dataclass(frozen=True)
class PredicateDef:
    name: str
    params: tuple
    body: Pred


@dataclass(frozen=True)
class RestrictDecl:
    vars: tuple
    ty: TypeTag


@dataclass(frozen=True)
class StructureDecl:
    name: str
    params: tuple
    defs: tuple  # ((opname, CallTemplate), ...)


@dataclass(frozen=True)
class TheoremDecl:
    name: str
    body: Pred


@dataclass(frozen=True)
class LoadDecl:
    path: str
    name: str
    params: tuple


@dataclass(frozen=True)
class SaveDecl:
    path: str
    name: str


@dataclass(frozen=True)
class Program:
    items: tuple


# --------------------------------------------------------------------------
# Free variables


def expr_free_vars(e: E) -> set:
    if isinstance(e, EVar):
        return {e.name}
    if isinstance(e, EInt):
        return set()
    if isinstance(e, (EAdd, ESub)):
        return expr_free_vars(e.a) | expr_free_vars(e.b)
    if isinstance(e, EMul):
        return expr_free_vars(e.e)
    if isinstance(e, ECall):
        out = set()
        for a in e.args:
            out |= expr_free_vars(a)
        return out
    raise TypeError(f"not an expression: {e!r}")


def free_vars(p: Pred) -> set:
    if isinstance(p, (PTrue, PFalse)):
        return set()
    if isinstance(p, (PAnd, POr, PIff)):
        return free_vars(p.l) | free_vars(p.r)
    if isinstance(p, PNot):
        return free_vars(p.p)
    if isinstance(p, (PExists, PForall)):
        inner = free_vars(p.body) - {p.var}
        if p.ty is not None:
            inner |= set(p.ty.args)
        return inner
    if isinstance(p, (PLess, PEqual)):
        return expr_free_vars(p.a) | expr_free_vars(p.b)
    if isinstance(p, PCall):
        out = set()
        for a in p.args:
            out |= expr_free_vars(a)
        return out
    if isinstance(p, PAutLit):
        return set()
    if isinstance(p, PWordEq):
        out = expr_free_vars(p.left.index)
        if isinstance(p.right, WordIndex):
            out |= expr_free_vars(p.right.index)
        return out
    if isinstance(p, PFactorEq):
        return (
            expr_free_vars(p.i)
            | expr_free_vars(p.j)
            | expr_free_vars(p.k)
            | expr_free_vars(p.l)
        )
    raise TypeError(f"not a predicate: {p!r}")


# --------------------------------------------------------------------------
# Pretty printing (round-trips through the parser)


def pretty_expr(e: E, prec: int = 0) -> str:
    # prec levels: 0 additive, 1 multiplicative, 2 atomic
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, EInt):
        return str(e.value)
    if isinstance(e, EAdd):
        s = f"{pretty_expr(e.a, 0)} + {pretty_expr(e.b, 1)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, ESub):
        s = f"{pretty_expr(e.a, 0)} - {pretty_expr(e.b, 1)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, EMul):
        s = f"{e.n}*{pretty_expr(e.e, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(e, ECall):
        return f"{e.name}({', '.join(pretty_expr(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def _windex(w: WordIndex) -> str:
    return f"{w.word}[{pretty_expr(w.index)}]"


def pretty(p: Pred, prec: int = 0) -> str:
    # prec: 0 iff, 1 or, 2 and, 3 unary
    if isinstance(p, PTrue):
        return "true"
    if isinstance(p, PFalse):
        return "false"
    if isinstance(p, PIff):
        s = f"{pretty(p.l, 1)} <=> {pretty(p.r, 1)}"
        return f"({s})" if prec > 0 else s
    if isinstance(p, POr):
        s = f"{pretty(p.l, 1)} | {pretty(p.r, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(p, PAnd):
        s = f"{pretty(p.l, 2)} & {pretty(p.r, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(p, PNot):
        return f"!{pretty(p.p, 4)}"
    if isinstance(p, (PExists, PForall)):
        kw = "exists" if isinstance(p, PExists) else "forall"
        ty = f" is {p.ty}" if p.ty is not None else ""
        s = f"{kw} {p.var}{ty}. {pretty(p.body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(p, PLess):
        s = f"{pretty_expr(p.a)} < {pretty_expr(p.b)}"
        return f"({s})" if prec > 3 else s
    if isinstance(p, PEqual):
        s = f"{pretty_expr(p.a)} = {pretty_expr(p.b)}"
        return f"({s})" if prec > 3 else s
    if isinstance(p, PCall):
        return f"{p.name}({', '.join(pretty_expr(a) for a in p.args)})"
    if isinstance(p, PAutLit):
        return f"<automaton {p.label or 'literal'}>"
    if isinstance(p, PWordEq):
        op = "!=" if p.negated else "="
        rhs = _windex(p.right) if isinstance(p.right, WordIndex) else str(p.right)
        s = f"{_windex(p.left)} {op} {rhs}"
        return f"({s})" if prec > 3 else s
    if isinstance(p, PFactorEq):
        s = (
            f"{p.lword}[{pretty_expr(p.i)}..{pretty_expr(p.j)}] = "
            f"{p.rword}[{pretty_expr(p.k)}..{pretty_expr(p.l)}]"
        )
        return f"({s})" if prec > 3 else s
    raise TypeError(f"not a predicate: {p!r}")
