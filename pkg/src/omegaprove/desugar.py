"""Sugar elimination and restriction application.

Rewrites applied bottom-up to parsed predicates:

* ``P <=> Q``            becomes mutual implication ``(!P | Q) & (!Q | P)``;
* ``forall x. P``        becomes ``!(exists x. !P)``;
* ``n*x``                becomes ``x + x + ... + x`` (n copies), ``0*x`` is 0;
* word indexing          ``P[e] = 0/1/Q[e']`` becomes calls (negated,
  plain, or mutually implied), ``!=`` forms are the negations;
* factor equality        ``P[i..j] = Q[k..l]`` becomes
  ``j + k = i + l & forall n. i + n < j => P[i+n] = Q[k+n]`` with n ranging
  over the restriction type of i;
* quantifiers over restricted variables acquire the restriction as their
  type tag.

Double negations are folded. The desugared tree contains no PForall, PIff,
PWordEq, PFactorEq or EMul nodes. This module also derives the two metric
quantities read off the desugared body: the prenex quantifier-block
signature and the atom count of the fully expanded formula.
"""
from __future__ import annotations

from typing import Mapping, Optional

from .errors import DesugarError
from .syntax import (
    E,
    EAdd,
    ECall,
    EInt,
    EMul,
    ESub,
    EVar,
    PAnd,
    PAutLit,
    PCall,
    PEqual,
    PExists,
    PFalse,
    PForall,
    PIff,
    PLess,
    PNot,
    POr,
    PTrue,
    PWordEq,
    PFactorEq,
    Pred,
    TypeTag,
    WordIndex,
    free_vars,
)


def p_not(p: Pred) -> Pred:
    if isinstance(p, PNot):
        return p.p
    return PNot(p)


def desugar_expr(e: E) -> E:
    if isinstance(e, (EVar, EInt)):
        return e
    if isinstance(e, EAdd):
        return EAdd(desugar_expr(e.a), desugar_expr(e.b))
    if isinstance(e, ESub):
        return ESub(desugar_expr(e.a), desugar_expr(e.b))
    if isinstance(e, EMul):
        inner = desugar_expr(e.e)
        if e.n == 0:
            return EInt(0)
        out = inner
        for _ in range(e.n - 1):
            out = EAdd(out, inner)
        return out
    if isinstance(e, ECall):
        return ECall(e.name, tuple(desugar_expr(a) for a in e.args))
    raise TypeError(f"not an expression: {e!r}")


def _iff(l: Pred, r: Pred) -> Pred:
    return PAnd(POr(p_not(l), r), POr(p_not(r), l))


def _fresh_binder(base: str, avoid: set) -> str:
    if base not in avoid:
        return base
    k = 0
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"


def desugar_pred(
    p: Pred,
    restrictions: Mapping[str, TypeTag],
    scope: Optional[Mapping[str, TypeTag]] = None,
    arities: Optional[Mapping[str, int]] = None,
) -> Pred:
    """Rewrite all sugar away; `restrictions` is the ambient Restrict state,
    `scope` the binder types in force, `arities` known predicate arities
    (used to reject word indexing of non-unary predicates)."""
    scope = dict(scope or {})

    def typ_of(e: E) -> TypeTag:
        if not isinstance(e, EVar):
            raise DesugarError(
                "factor equality needs a plain restricted variable index"
            )
        ty = scope.get(e.name) or restrictions.get(e.name)
        if ty is None:
            raise DesugarError(
                f"variable {e.name!r} has no restriction; cannot bound a factor range"
            )
        return ty

    def word_call(word: str, index: E) -> Pred:
        if arities is not None and word in arities and arities[word] != 1:
            raise DesugarError(
                f"{word!r} is not unary; word indexing needs a unary predicate"
            )
        return PCall(word, (desugar_expr(index),))

    def rec(p: Pred, scope: dict) -> Pred:
        if isinstance(p, (PTrue, PFalse, PAutLit)):
            return p
        if isinstance(p, PAnd):
            return PAnd(rec(p.l, scope), rec(p.r, scope))
        if isinstance(p, POr):
            return POr(rec(p.l, scope), rec(p.r, scope))
        if isinstance(p, PNot):
            return p_not(rec(p.p, scope))
        if isinstance(p, PIff):
            return _iff(rec(p.l, scope), rec(p.r, scope))
        if isinstance(p, PExists):
            ty = p.ty or restrictions.get(p.var)
            inner = dict(scope)
            if ty is not None:
                inner[p.var] = ty
            else:
                inner.pop(p.var, None)
            return PExists(p.var, ty, rec(p.body, inner))
        if isinstance(p, PForall):
            ty = p.ty or restrictions.get(p.var)
            inner = dict(scope)
            if ty is not None:
                inner[p.var] = ty
            else:
                inner.pop(p.var, None)
            return p_not(PExists(p.var, ty, p_not(rec(p.body, inner))))
        if isinstance(p, PLess):
            return PLess(desugar_expr(p.a), desugar_expr(p.b))
        if isinstance(p, PEqual):
            return PEqual(desugar_expr(p.a), desugar_expr(p.b))
        if isinstance(p, PCall):
            return PCall(p.name, tuple(desugar_expr(a) for a in p.args))
        if isinstance(p, PWordEq):
            left = word_call(p.left.word, p.left.index)
            if p.right == 0:
                out = p_not(left)
            elif p.right == 1:
                out = left
            else:
                right = word_call(p.right.word, p.right.index)
                out = _iff(left, right)
            return p_not(out) if p.negated else out
        if isinstance(p, PFactorEq):
            i = desugar_expr(p.i)
            j = desugar_expr(p.j)
            k = desugar_expr(p.k)
            l = desugar_expr(p.l)
            ty = typ_of(p.i)
            avoid = (
                free_vars(p)
                | set(scope)
                | set(restrictions)
                | {p.lword, p.rword}
            )
            n = _fresh_binder("n", avoid)
            length_eq = PEqual(EAdd(j, k), EAdd(i, l))
            letter_eq = _iff(
                word_call(p.lword, EAdd(i, EVar(n))),
                word_call(p.rword, EAdd(k, EVar(n))),
            )
            in_range = PLess(EAdd(i, EVar(n)), j)
            body = POr(p_not(in_range), letter_eq)
            bounded = p_not(PExists(n, ty, p_not(body)))
            return PAnd(length_eq, bounded)
        raise TypeError(f"not a predicate: {p!r}")

    return rec(p, scope)


def is_desugared(p: Pred) -> bool:
    if isinstance(p, (PTrue, PFalse, PAutLit)):
        return True
    if isinstance(p, (PAnd, POr)):
        return is_desugared(p.l) and is_desugared(p.r)
    if isinstance(p, PNot):
        return is_desugared(p.p)
    if isinstance(p, PExists):
        return is_desugared(p.body)
    if isinstance(p, (PLess, PEqual)):
        return _expr_desugared(p.a) and _expr_desugared(p.b)
    if isinstance(p, PCall):
        return all(_expr_desugared(a) for a in p.args)
    return False


def _expr_desugared(e: E) -> bool:
    if isinstance(e, (EVar, EInt)):
        return True
    if isinstance(e, (EAdd, ESub)):
        return _expr_desugared(e.a) and _expr_desugared(e.b)
    if isinstance(e, ECall):
        return all(_expr_desugared(a) for a in e.args)
    return False


# ---------------------------------------------------------------------------
# Metrics read off the desugared body

_SUPERSCRIPTS = {
    "0": "⁰", "1": "¹", "2": "²", "3": "³", "4": "⁴",
    "5": "⁵", "6": "⁶", "7": "⁷", "8": "⁸", "9": "⁹",
}


def quantifier_sequence(p: Pred, polarity: bool = True) -> list:
    """Prenex quantifier prefix of the desugared body, left to right.

    Negation flips polarity, so the forall encoding !(exists x. !P) reads
    back as a universal quantifier.
    """
    if isinstance(p, PNot):
        return quantifier_sequence(p.p, not polarity)
    if isinstance(p, (PAnd, POr)):
        return quantifier_sequence(p.l, polarity) + quantifier_sequence(p.r, polarity)
    if isinstance(p, PExists):
        head = "∃" if polarity else "∀"
        return [head] + quantifier_sequence(p.body, polarity)
    return []


def signature(p: Pred) -> str:
    """Alternating quantifier blocks, e.g. an exists-block of three followed
    by one universal. Empty string for quantifier-free bodies."""
    seq = quantifier_sequence(p)
    out = []
    i = 0
    while i < len(seq):
        j = i
        while j < len(seq) and seq[j] == seq[i]:
            j += 1
        count = j - i
        out.append(seq[i])
        if count > 1:
            out.append("".join(_SUPERSCRIPTS[c] for c in str(count)))
        i = j
    return "".join(out)


def expr_atoms(e: E) -> int:
    if isinstance(e, EVar):
        return 0
    if isinstance(e, EInt):
        # n is evaluated as 1 + 1 + ... + 1: n one-atoms and n-1 adder atoms
        return 1 if e.value == 0 else 2 * e.value - 1
    if isinstance(e, (EAdd, ESub)):
        return 1 + expr_atoms(e.a) + expr_atoms(e.b)
    if isinstance(e, ECall):
        return 1 + sum(expr_atoms(a) for a in e.args)
    raise TypeError(f"not a desugared expression: {e!r}")


def count_atoms(p: Pred) -> int:
    """Atomic formulas of the expanded body: every call, relation and
    automaton literal, plus the type guard each typed binder introduces."""
    if isinstance(p, (PTrue, PFalse)):
        return 0
    if isinstance(p, (PAnd, POr)):
        return count_atoms(p.l) + count_atoms(p.r)
    if isinstance(p, PNot):
        return count_atoms(p.p)
    if isinstance(p, PExists):
        return (1 if p.ty is not None else 0) + count_atoms(p.body)
    if isinstance(p, (PLess, PEqual)):
        return 1 + expr_atoms(p.a) + expr_atoms(p.b)
    if isinstance(p, PCall):
        return 1 + sum(expr_atoms(a) for a in p.args)
    if isinstance(p, PAutLit):
        return 1
    raise TypeError(f"not a desugared predicate: {p!r}")
