"""Boolean guard formulas over atomic propositions.

Guards label automaton edges: a guard holds at a position of an omega-word
when the valuation at that position (the set of true atomic propositions)
satisfies the formula. Formulas are built from constants, atoms, negation,
conjunction and disjunction, and are reduced on construction: constant
folding, flattening of nested connectives, duplicate removal and shallow
complement detection. They are deliberately kept as formulas rather than
BDDs; `canonical` rebuilds a guard as a Shannon-expansion normal form when
its atom count is small.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class Guard:
    """Base class for guard formulas. Instances are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class GTrue(Guard):
    def __str__(self) -> str:
        return "t"


@dataclass(frozen=True)
class GFalse(Guard):
    def __str__(self) -> str:
        return "f"


@dataclass(frozen=True)
class GAtom(Guard):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class GNot(Guard):
    arg: Guard

    def __str__(self) -> str:
        if isinstance(self.arg, (GAtom, GTrue, GFalse, GNot)):
            return f"!{self.arg}"
        return f"!({self.arg})"


@dataclass(frozen=True)
class GAnd(Guard):
    args: tuple

    def __str__(self) -> str:
        parts = []
        for a in self.args:
            if isinstance(a, GOr):
                parts.append(f"({a})")
            else:
                parts.append(str(a))
        return " & ".join(parts)


@dataclass(frozen=True)
class GOr(Guard):
    args: tuple

    def __str__(self) -> str:
        return " | ".join(str(a) for a in self.args)


TRUE = GTrue()
FALSE = GFalse()


def atom(name: str) -> Guard:
    return GAtom(name)


def g_not(g: Guard) -> Guard:
    if isinstance(g, GTrue):
        return FALSE
    if isinstance(g, GFalse):
        return TRUE
    if isinstance(g, GNot):
        return g.arg
    return GNot(g)


def _flatten(cls, gs: Iterable[Guard]) -> list:
    out = []
    for g in gs:
        if isinstance(g, cls):
            out.extend(g.args)
        else:
            out.append(g)
    return out


def g_and(*gs: Guard) -> Guard:
    args = _flatten(GAnd, gs)
    kept = []
    seen = set()
    for g in args:
        if isinstance(g, GFalse):
            return FALSE
        if isinstance(g, GTrue) or g in seen:
            continue
        seen.add(g)
        kept.append(g)
    for g in kept:
        if g_not(g) in seen:
            return FALSE
    if not kept:
        return TRUE
    if len(kept) == 1:
        return kept[0]
    kept.sort(key=str)
    return GAnd(tuple(kept))


def g_or(*gs: Guard) -> Guard:
    args = _flatten(GOr, gs)
    kept = []
    seen = set()
    for g in args:
        if isinstance(g, GTrue):
            return TRUE
        if isinstance(g, GFalse) or g in seen:
            continue
        seen.add(g)
        kept.append(g)
    for g in kept:
        if g_not(g) in seen:
            return TRUE
    if not kept:
        return FALSE
    if len(kept) == 1:
        return kept[0]
    kept.sort(key=str)
    return GOr(tuple(kept))


def atoms(g: Guard) -> frozenset:
    if isinstance(g, GAtom):
        return frozenset((g.name,))
    if isinstance(g, GNot):
        return atoms(g.arg)
    if isinstance(g, (GAnd, GOr)):
        out = frozenset()
        for a in g.args:
            out |= atoms(a)
        return out
    return frozenset()


def evaluate(g: Guard, valuation: frozenset) -> bool:
    if isinstance(g, GTrue):
        return True
    if isinstance(g, GFalse):
        return False
    if isinstance(g, GAtom):
        return g.name in valuation
    if isinstance(g, GNot):
        return not evaluate(g.arg, valuation)
    if isinstance(g, GAnd):
        return all(evaluate(a, valuation) for a in g.args)
    if isinstance(g, GOr):
        return any(evaluate(a, valuation) for a in g.args)
    raise TypeError(f"not a guard: {g!r}")


def substitute(g: Guard, mapping: Mapping[str, str]) -> Guard:
    if isinstance(g, GAtom):
        return GAtom(mapping.get(g.name, g.name))
    if isinstance(g, GNot):
        return g_not(substitute(g.arg, mapping))
    if isinstance(g, GAnd):
        return g_and(*(substitute(a, mapping) for a in g.args))
    if isinstance(g, GOr):
        return g_or(*(substitute(a, mapping) for a in g.args))
    return g


def assign(g: Guard, name: str, value: bool) -> Guard:
    """Partially evaluate `g` with atom `name` fixed to `value`."""
    if isinstance(g, GAtom):
        if g.name == name:
            return TRUE if value else FALSE
        return g
    if isinstance(g, GNot):
        return g_not(assign(g.arg, name, value))
    if isinstance(g, GAnd):
        return g_and(*(assign(a, name, value) for a in g.args))
    if isinstance(g, GOr):
        return g_or(*(assign(a, name, value) for a in g.args))
    return g


def project_atom(g: Guard, name: str) -> Guard:
    """Existentially quantify one atom out of the guard."""
    if name not in atoms(g):
        return g
    return g_or(assign(g, name, False), assign(g, name, True))


def is_satisfiable(g: Guard) -> bool:
    if isinstance(g, GTrue):
        return True
    if isinstance(g, GFalse):
        return False
    a = min(atoms(g))
    return is_satisfiable(assign(g, a, False)) or is_satisfiable(assign(g, a, True))


def some_model(g: Guard):
    """A satisfying valuation (set of true atoms), or None.

    Prefers false assignments, so the returned model is deterministic and
    minimal-ish in its true set.
    """
    true_atoms = []

    def rec(h: Guard) -> bool:
        if isinstance(h, GTrue):
            return True
        if isinstance(h, GFalse):
            return False
        a = min(atoms(h))
        if rec(assign(h, a, False)):
            return True
        if rec(assign(h, a, True)):
            true_atoms.append(a)
            return True
        return False

    if not rec(g):
        return None
    return frozenset(true_atoms)


def valuation_of_mask(aps: Sequence[str], mask: int) -> frozenset:
    return frozenset(ap for i, ap in enumerate(aps) if mask & (1 << i))


def minterms(g: Guard, aps: Sequence[str]) -> frozenset:
    """Masks over `aps` (bit i = aps[i]) whose valuations satisfy `g`."""
    out = []
    for mask in range(1 << len(aps)):
        if evaluate(g, valuation_of_mask(aps, mask)):
            out.append(mask)
    return frozenset(out)


def from_minterms(aps: Sequence[str], masks) -> Guard:
    """Rebuild a guard from its satisfying masks via Shannon expansion.

    Canonical for a fixed `aps` order: irrelevant atoms are dropped.
    """
    masks = frozenset(masks)

    def rec(names: tuple, ms: frozenset) -> Guard:
        if not ms:
            return FALSE
        if len(ms) == 1 << len(names):
            return TRUE
        a0 = names[0]
        lo = frozenset(m >> 1 for m in ms if not (m & 1))
        hi = frozenset(m >> 1 for m in ms if m & 1)
        g0 = rec(names[1:], lo)
        g1 = rec(names[1:], hi)
        if g0 == g1:
            return g0
        return g_or(g_and(g_not(atom(a0)), g0), g_and(atom(a0), g1))

    return rec(tuple(aps), masks)


def canonical(g: Guard) -> Guard:
    """Semantic normal form over the guard's own atoms (small guards only)."""
    ats = tuple(sorted(atoms(g)))
    if len(ats) > 10:
        return g
    return from_minterms(ats, minterms(g, ats))
