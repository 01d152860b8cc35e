"""Determinization-based complementation (Safra trees).

`_safra_complement` builds, on the fly, a nondeterministic Buchi automaton
for the complement of its input. The deterministic core is the classical
tree-of-subsets construction: every step spawns a child for the accepting
part of each node's label, applies the letter to all labels, keeps each
state only in the oldest sibling containing it, drops empty nodes (a *red*
event for their names) and collapses nodes whose children cover them (a
*green* event).

The input is accepted exactly when some name is eventually never red and
green infinitely often, so the complement is the Streett dual: every name
that is green infinitely often must also be red infinitely often. The
complement automaton tracks the tree deterministically and at some point
guesses the set I of names that will die infinitely often; from then on
greens outside I are forbidden (I may still grow finitely often, which
resets the check) and a round-robin pointer over I must see each member's
red event again and again.
"""
from __future__ import annotations

from .buchi import BuchiAutomaton
from .errors import StateBudgetError
from .guards import FALSE, from_minterms


def _tree_names(node, out):
    out.add(node[0])
    for child in node[2]:
        _tree_names(child, out)


def _subtree_reds(node, reds):
    reds.add(node[0])
    for child in node[2]:
        _subtree_reds(child, reds)


def _safra_step(tree, m, succ, fmask):
    """One deterministic tree transition; returns (tree', greens, reds)."""
    greens = set()
    reds = set()

    if tree is None:
        return None, greens, reds

    used = set()
    _tree_names(tree, used)
    next_free = [0]

    def alloc():
        while next_free[0] in used:
            next_free[0] += 1
        name = next_free[0]
        used.add(name)
        return name

    # 1. spawn children for the accepting part of every original node
    def spawn(node):
        name, label, kids = node
        new_kids = [spawn(k) for k in kids]
        if label & fmask:
            new_kids.append((alloc(), label & fmask, ()))
        return (name, label, tuple(new_kids))

    # 2. letter application
    def power(node):
        name, label, kids = node
        out = 0
        mask = label
        q = 0
        while mask:
            if mask & 1:
                out |= succ[q][m]
            mask >>= 1
            q += 1
        return (name, out, tuple(power(k) for k in kids))

    # 3. oldest sibling keeps each state
    def ban(node, banned):
        name, label, kids = node
        return (name, label & ~banned, tuple(ban(k, banned) for k in kids))

    def horiz(node):
        name, label, kids = node
        claimed = 0
        out = []
        for child in kids:
            child = ban(child, claimed)
            child = horiz(child)
            claimed |= child[1]
            out.append(child)
        return (name, label, tuple(out))

    # 4. drop empty nodes
    def drop_empty(node):
        name, label, kids = node
        if label == 0:
            _subtree_reds(node, reds)
            return None
        out = []
        for child in kids:
            kept = drop_empty(child)
            if kept is not None:
                out.append(kept)
        return (name, label, tuple(out))

    # 5. collapse nodes covered by their children
    def vertical(node):
        name, label, kids = node
        if kids:
            union = 0
            for child in kids:
                union |= child[1]
            if union == label:
                for child in kids:
                    _subtree_reds(child, reds)
                greens.add(name)
                return (name, label, ())
        return (name, label, tuple(vertical(k) for k in kids))

    t = spawn(tree)
    t = power(t)
    t = horiz(t)
    t = drop_empty(t)
    if t is not None:
        t = vertical(t)
    return t, greens, reds


def _safra_complement(a: BuchiAutomaton, base, succ, nl: int, budget: int):
    fmask = 0
    for q in a.accepting:
        fmask |= 1 << q
    init_tree = (0, 1 << a.initial, ())

    step_cache = {}

    def step(tree, m):
        key = (tree, m)
        got = step_cache.get(key)
        if got is None:
            got = _safra_step(tree, m, succ, fmask)
            step_cache[key] = got
        return got

    # complement NBA states:
    #   ("t", tree)                    deterministic tracking, non-accepting
    #   ("s", tree, names, k, flash)   Streett check with guessed name set
    init = ("t", init_tree)
    index = {init: 0}
    order = [init]
    letter_edges = {}
    pos = 0

    def add(state, src, m):
        tid = index.get(state)
        if tid is None:
            tid = len(order)
            if tid >= budget:
                raise StateBudgetError(
                    f"complementation exceeded the state budget ({budget})"
                )
            index[state] = tid
            order.append(state)
        letter_edges.setdefault((src, tid), set()).add(m)

    def subsets(items):
        items = sorted(items)
        out = [()]
        for it in items:
            out += [s + (it,) for s in out]
        return out

    def streett_successors(src, m, tree2, greens, reds, names, k):
        # optionally grow the name set by any subset of this step's greens
        for extra in subsets(set(greens) - set(names)):
            names2 = tuple(sorted(set(names) | set(extra)))
            if not set(greens) <= set(names2):
                continue
            if extra:
                k2 = 0
            else:
                k2 = k
            flash = False
            if not names2:
                flash = True
            elif names2[k2] in reds:
                k2 += 1
                if k2 == len(names2):
                    k2 = 0
                    flash = True
            add(("s", tree2, names2, k2, flash), src, m)

    while pos < len(order):
        st = order[pos]
        if st[0] == "t":
            tree = st[1]
            for m in range(nl):
                tree2, greens, reds = step(tree, m)
                add(("t", tree2), pos, m)
                # jump: guess the recurring-red name set, seeded from a
                # subset of this step's greens
                streett_successors(pos, m, tree2, greens, reds, (), 0)
        else:
            _, tree, names, k, _flash = st
            for m in range(nl):
                tree2, greens, reds = step(tree, m)
                streett_successors(pos, m, tree2, greens, reds, names, k)
        pos += 1

    accepting = frozenset(
        i for i, st in enumerate(order) if st[0] == "s" and st[4]
    )
    edges = []
    for (s, d) in sorted(letter_edges):
        g = from_minterms(base, letter_edges[(s, d)])
        if not isinstance(g, type(FALSE)):
            edges.append((s, d, g))
    return BuchiAutomaton(a.aps, len(order), 0, tuple(edges), accepting)
