"""Variable maps and the variable-level automaton operations.

A variable map binds logical variable names to the ordered lists of atomic
propositions (tracks) that encode them; distinct variables never share a
track. A `VarAutomaton` pairs a variable map with a Buchi automaton and is
the value the evaluator computes for every predicate.

Combining two such values merges their maps with a *biased merge*: shared
variables keep the first map's tracks and the second automaton's tracks are
renamed onto them, which is what synchronizes a shared variable across
subformulas. Logical operations pick the merge direction by comparing state
counts.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import buchi
from .buchi import BuchiAutomaton
from .complement import DEFAULT_STATE_BUDGET, complement
from .errors import (
    APCollisionError,
    ProverError,
    UnknownVariableError,
    VarArityError,
    VarMapConflictError,
)

_counter = itertools.count()
_counter_lock = threading.Lock()


def fresh_var(n_aps: int = 1, taken: Iterable[str] = ()) -> tuple:
    """A fresh variable name and its track names, avoiding `taken` names."""
    taken = set(taken)
    while True:
        with _counter_lock:
            k = next(_counter)
        name = f"v{k}"
        aps = tuple(f"{name}_{i}" for i in range(n_aps))
        if name not in taken and not any(ap in taken for ap in aps):
            return name, aps


@dataclass(frozen=True)
class VariableMap:
    entries: tuple  # ((var, (ap, ...)), ...) sorted by var

    def __post_init__(self):
        names = [x for (x, _) in self.entries]
        if len(set(names)) != len(names):
            raise VarMapConflictError(f"duplicate variable in map: {names}")
        if list(names) != sorted(names):
            raise ProverError("variable map entries must be sorted")
        seen = set()
        for (x, aps) in self.entries:
            for ap in aps:
                if ap in seen:
                    raise VarMapConflictError(
                        f"track {ap!r} is shared by two variables"
                    )
                seen.add(ap)

    @staticmethod
    def of(mapping: Mapping[str, Sequence[str]]) -> "VariableMap":
        return VariableMap(
            tuple(sorted((x, tuple(aps)) for x, aps in mapping.items()))
        )

    def __contains__(self, var: str) -> bool:
        return any(x == var for (x, _) in self.entries)

    def __getitem__(self, var: str) -> tuple:
        for (x, aps) in self.entries:
            if x == var:
                return aps
        raise UnknownVariableError(f"variable {var!r} not bound in map")

    def get(self, var: str, default=None):
        for (x, aps) in self.entries:
            if x == var:
                return aps
        return default

    def items(self):
        return self.entries

    def vars(self) -> tuple:
        return tuple(x for (x, _) in self.entries)

    def all_aps(self) -> tuple:
        out = []
        for (_, aps) in self.entries:
            out.extend(aps)
        return tuple(out)

    def without(self, var: str) -> "VariableMap":
        return VariableMap(tuple((x, aps) for (x, aps) in self.entries if x != var))

    def updated(self, var: str, aps: Sequence[str]) -> "VariableMap":
        rest = [(x, a) for (x, a) in self.entries if x != var]
        rest.append((var, tuple(aps)))
        return VariableMap(tuple(sorted(rest)))

    def as_dict(self) -> dict:
        return {x: aps for (x, aps) in self.entries}


EMPTY_MAP = VariableMap(())


@dataclass(frozen=True)
class Substitution:
    """An injective renaming of atomic propositions."""

    pairs: tuple  # ((src, dst), ...) sorted

    def __post_init__(self):
        srcs = [s for (s, _) in self.pairs]
        dsts = [d for (_, d) in self.pairs]
        if len(set(srcs)) != len(srcs):
            raise APCollisionError("substitution maps one AP twice")
        if len(set(dsts)) != len(dsts):
            raise APCollisionError("substitution is not injective")

    @staticmethod
    def of(mapping: Mapping[str, str]) -> "Substitution":
        return Substitution(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict:
        return dict(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def apply_to_varmap(self, vm: VariableMap) -> VariableMap:
        m = self.as_dict()
        return VariableMap.of(
            {x: tuple(m.get(ap, ap) for ap in aps) for (x, aps) in vm.entries}
        )

    def apply_to_automaton(self, a: BuchiAutomaton) -> BuchiAutomaton:
        if not self.pairs:
            return a
        return buchi.substitute_aps(a, self.as_dict())


@dataclass(frozen=True)
class VarAutomaton:
    """A variable map paired with the automaton over those tracks."""

    varmap: VariableMap
    automaton: BuchiAutomaton

    def __post_init__(self):
        apset = set(self.automaton.aps)
        for (x, aps) in self.varmap.entries:
            missing = [ap for ap in aps if ap not in apset]
            if missing:
                raise ProverError(
                    f"variable {x!r} lists tracks {missing} missing from the automaton"
                )


def true_automaton() -> VarAutomaton:
    return VarAutomaton(EMPTY_MAP, buchi.universal(()))


def false_automaton() -> VarAutomaton:
    return VarAutomaton(EMPTY_MAP, buchi.empty(()))


def merge_union(v: VariableMap, w: VariableMap) -> VariableMap:
    """Keywise union; shared keys must agree exactly."""
    out = dict(v.items())
    for (x, aps) in w.items():
        if x in out and out[x] != aps:
            raise VarMapConflictError(
                f"variable {x!r} bound to {out[x]} and {aps}; use biased_merge"
            )
        out[x] = aps
    return VariableMap.of(out)


def biased_merge(
    v: VariableMap, w: VariableMap, taken: Iterable[str] = ()
) -> tuple:
    """(U, theta) with U = V union W.theta.

    Shared variables keep V's tracks and theta renames W's tracks onto them
    positionally. W-only variables pass through unless their tracks collide
    with V's (or with already-chosen targets), in which case they are renamed
    to fresh tracks.
    """
    theta = {}
    out = dict(v.items())
    used = set()
    for (_, aps) in v.items():
        used.update(aps)
    used.update(taken)

    for (x, waps) in w.items():
        vaps = v.get(x)
        if vaps is None:
            continue
        if len(vaps) != len(waps):
            raise VarArityError(
                f"variable {x!r} has {len(waps)} tracks on one side, {len(vaps)} on the other"
            )
        for wa, va in zip(waps, vaps):
            if wa != va:
                theta[wa] = va

    for (x, waps) in w.items():
        if x in out:
            continue
        if any(ap in used for ap in waps):
            avoid = used | set(w.all_aps()) | set(theta)
            _, naps = fresh_var(len(waps), taken=avoid)
            for wa, na in zip(waps, naps):
                if wa != na:
                    theta[wa] = na
            out[x] = naps
            used.update(naps)
        else:
            out[x] = waps
            used.update(waps)

    return VariableMap.of(out), Substitution.of(theta)


def _combine(a: VarAutomaton, b: VarAutomaton, op: Callable) -> VarAutomaton:
    taken = set(a.automaton.aps) | set(b.automaton.aps)
    if a.automaton.n_states < b.automaton.n_states:
        vm, theta = biased_merge(a.varmap, b.varmap, taken=taken)
        combined = op(a.automaton, theta.apply_to_automaton(b.automaton))
    else:
        vm, theta = biased_merge(b.varmap, a.varmap, taken=taken)
        combined = op(theta.apply_to_automaton(a.automaton), b.automaton)
    return VarAutomaton(vm, combined)


def conjoin(a: VarAutomaton, b: VarAutomaton) -> VarAutomaton:
    return _combine(a, b, buchi.intersect)


def disjoin(a: VarAutomaton, b: VarAutomaton) -> VarAutomaton:
    return _combine(a, b, buchi.union)


def negate(a: VarAutomaton, state_budget: int = DEFAULT_STATE_BUDGET) -> VarAutomaton:
    return VarAutomaton(a.varmap, complement(a.automaton, state_budget))


def rename_var(
    a: VarAutomaton, x: str, y: str, y_aps: Sequence[str]
) -> VarAutomaton:
    """Rebind variable x's tracks to y's tracks, rewriting all guards.

    When y is already bound in the map the rename collapses x's tracks onto
    y's existing ones (call-site aliasing); otherwise it is a strict
    injective renaming and the usual collision rules apply.
    """
    y_aps = tuple(y_aps)
    if x not in a.varmap:
        raise UnknownVariableError(f"cannot rename unbound variable {x!r}")
    xaps = a.varmap[x]
    if len(y_aps) != len(xaps):
        raise VarArityError(
            f"renaming {x!r}->{y!r}: {len(xaps)} tracks vs {len(y_aps)}"
        )
    if x == y and y_aps == xaps:
        return a
    if y in a.varmap and y != x:
        if a.varmap[y] != y_aps:
            raise APCollisionError(
                f"variable {y!r} is already bound to different tracks"
            )
        mapping = {xa: ya for xa, ya in zip(xaps, y_aps)}
        aut = buchi.collapse_aps(a.automaton, mapping)
        return VarAutomaton(a.varmap.without(x), aut)
    mapping = {xa: ya for xa, ya in zip(xaps, y_aps) if xa != ya}
    aut = buchi.substitute_aps(a.automaton, mapping) if mapping else a.automaton
    return VarAutomaton(a.varmap.without(x).updated(y, y_aps), aut)


def project_var(a: VarAutomaton, x: str) -> VarAutomaton:
    """Existentially quantify a variable out: drop its tracks and its entry."""
    if x not in a.varmap:
        raise UnknownVariableError(f"cannot project unbound variable {x!r}")
    aut = buchi.project(a.automaton, a.varmap[x])
    return VarAutomaton(a.varmap.without(x), aut)
