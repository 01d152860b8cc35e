"""Complementation of nondeterministic Buchi automata.

Small inputs go through a rank-based construction: a run of the complement
tracks a level ranking of the input's run DAG, restricted to tight rankings
(odd maximum, every odd value below it present) with a constant maximum
rank, plus a breakpoint set discharging even-rank obligations. Rank
guessing is factorial in the tracked-set size, so beyond a few states the
general path switches to the determinization-based construction in
`safra`, whose growth follows the word structure instead.

Worst-case growth is unavoidable - complementation is Omega((0.76n)^n) -
so the constructions are guarded by a configurable state budget and raise
`StateBudgetError` instead of thrashing. Two fast paths run first: automata
with an empty language complement to the universal automaton, and automata
that are deterministic over their letter alphabet are complemented by the
finite-F-visits construction (linear size). The input is aggressively
reduced (trim, bisimulation, direct- and delayed-simulation quotients)
before any construction runs.
"""
from __future__ import annotations

from .buchi import BuchiAutomaton, reduce_hard, simplify, universal
from .errors import StateBudgetError
from .guards import FALSE, from_minterms, minterms

DEFAULT_STATE_BUDGET = 1_000_000

_MAX_LETTER_ATOMS = 10
_MAX_RANK_DOM = 9
_RANK_MAX_STATES = 5


def _letter_masks(a: BuchiAutomaton, base: tuple):
    """succ[q][letter] = bitmask of successors; letters are minterms of base."""
    nl = 1 << len(base)
    succ = [[0] * nl for _ in range(a.n_states)]
    for (s, d, g) in a.edges:
        for m in minterms(g, base):
            succ[s][m] |= 1 << d
    return succ


def _bits(mask: int):
    out = []
    q = 0
    while mask:
        if mask & 1:
            out.append(q)
        mask >>= 1
        q += 1
    return out


def _det_complement(a: BuchiAutomaton, base, succ, nl: int):
    """Complement of a deterministic automaton, completing it first.

    The complement accepts exactly the words whose unique run visits the
    accepting set finitely often: a copy of the automaton plus a guessed
    jump into an acceptance-free copy.
    """
    n = a.n_states
    need_sink = any(succ[q][m] == 0 for q in range(n) for m in range(nl))
    total = n + 1 if need_sink else n
    sink = n

    def succ1(q, m):
        if q == sink:
            return sink
        mask = succ[q][m]
        return sink if mask == 0 else _bits(mask)[0]

    acc = set(a.accepting)
    nonf = [q for q in range(total) if q not in acc]
    hat = {q: total + i for i, q in enumerate(nonf)}

    letter_edges = {}
    for q in range(total):
        for m in range(nl):
            p = succ1(q, m)
            letter_edges.setdefault((q, p), set()).add(m)
            if p not in acc:
                letter_edges.setdefault((q, hat[p]), set()).add(m)
                if q not in acc:
                    letter_edges.setdefault((hat[q], hat[p]), set()).add(m)

    edges = []
    for (s, d) in sorted(letter_edges):
        g = from_minterms(base, letter_edges[(s, d)])
        if not isinstance(g, type(FALSE)):
            edges.append((s, d, g))
    accepting = frozenset(hat.values())
    return BuchiAutomaton(a.aps, total + len(nonf), a.initial, tuple(edges), accepting)


def _tight_rankings(dom: tuple, fset: frozenset, caps, r: int, work):
    """Rankings over `dom` with max exactly r, tight, F-states even, <= caps.

    `caps[q]` bounds the rank of q; `work` is a single-element work counter
    used for budget enforcement.
    """
    needed = set(range(1, r + 1, 2))
    out = []
    k = len(dom)

    def rec(i, current, missing):
        work[0] += 1
        if work[0] > work[1]:
            raise StateBudgetError("complementation exceeded its work budget")
        remaining_nonf = sum(1 for j in range(i, k) if dom[j] not in fset)
        if len(missing) > remaining_nonf:
            return
        if i == k:
            if not missing:
                out.append(tuple(current))
            return
        q = dom[i]
        cap = min(caps[q], r)
        if q in fset:
            choices = range(0, cap + 1, 2)
        else:
            choices = range(0, cap + 1)
        for rank in choices:
            current.append(rank)
            rec(i + 1, current, missing - {rank} if rank in missing else missing)
            current.pop()

    rec(0, [], needed)
    return out


def _rank_complement(a: BuchiAutomaton, base, succ, nl: int, budget: int):
    n = a.n_states
    fset = frozenset(a.accepting)
    nonf_count = n - len(a.accepting & frozenset(range(n)))
    work = [0, max(budget * 4, 2_000_000)]

    SINK = ("k",)

    def succ_mask(mask, m):
        out = 0
        for q in _bits(mask):
            out |= succ[q][m]
        return out

    jump_cache = {}

    def jumps(dommask):
        got = jump_cache.get(dommask)
        if got is not None:
            return got
        dom = tuple(_bits(dommask))
        if len(dom) > _MAX_RANK_DOM:
            raise StateBudgetError(
                f"complementation rank domain too large ({len(dom)} states)"
            )
        caps = {q: 10 ** 9 for q in dom}
        nonf = sum(1 for q in dom if q not in fset)
        targets = []
        for r in range(1, 2 * nonf, 2):
            for ranks in _tight_rankings(dom, fset, caps, r, work):
                targets.append((dom, ranks))
        jump_cache[dommask] = targets
        return targets

    def ranking_state(dom, ranks, omask):
        return ("r", dom, ranks, omask)

    def evens_mask(dom, ranks):
        m = 0
        for q, rk in zip(dom, ranks):
            if rk % 2 == 0:
                m |= 1 << q
        return m

    init = ("s", 1 << a.initial)
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

    succ_rank_cache = {}

    while pos < len(order):
        st = order[pos]
        kind = st[0]
        if kind == "k":
            for m in range(nl):
                add(SINK, pos, m)
        elif kind == "s":
            smask = st[1]
            for m in range(nl):
                s2 = succ_mask(smask, m)
                if s2 == 0:
                    add(SINK, pos, m)
                    continue
                add(("s", s2), pos, m)
                for (dom, ranks) in jumps(s2):
                    add(ranking_state(dom, ranks, evens_mask(dom, ranks)), pos, m)
        else:
            _, dom, ranks, omask = st
            r = max(ranks)
            for m in range(nl):
                ck = (dom, ranks, m)
                cached = succ_rank_cache.get(ck)
                if cached is None:
                    dom2mask = 0
                    caps = {}
                    for q, rk in zip(dom, ranks):
                        t = succ[q][m]
                        dom2mask |= t
                        for q2 in _bits(t):
                            if q2 not in caps or rk < caps[q2]:
                                caps[q2] = rk
                    if dom2mask == 0:
                        cached = (0, ())
                    else:
                        dom2 = tuple(_bits(dom2mask))
                        if len(dom2) > _MAX_RANK_DOM:
                            raise StateBudgetError(
                                f"complementation rank domain too large ({len(dom2)} states)"
                            )
                        cached = (
                            dom2mask,
                            tuple(_tight_rankings(dom2, fset, caps, r, work)),
                        )
                    succ_rank_cache[ck] = cached
                dom2mask, rankings = cached
                if dom2mask == 0:
                    add(SINK, pos, m)
                    continue
                dom2 = tuple(_bits(dom2mask))
                if omask:
                    omoved = succ_mask(omask, m)
                for ranks2 in rankings:
                    ev = evens_mask(dom2, ranks2)
                    o2 = (omoved & ev) if omask else ev
                    add(ranking_state(dom2, ranks2, o2), pos, m)
        pos += 1

    accepting = frozenset(
        i
        for i, st in enumerate(order)
        if st[0] == "k" or (st[0] == "r" and st[3] == 0)
    )
    edges = []
    for (s, d) in sorted(letter_edges):
        g = from_minterms(base, letter_edges[(s, d)])
        if not isinstance(g, type(FALSE)):
            edges.append((s, d, g))
    return BuchiAutomaton(a.aps, len(order), 0, tuple(edges), accepting)


def complement(a: BuchiAutomaton, state_budget: int = DEFAULT_STATE_BUDGET) -> BuchiAutomaton:
    """L(result) = all omega-words over a's AP set not accepted by `a`."""
    red = reduce_hard(a)
    if not red.accepting:
        return universal(a.aps)
    base = red.used_atoms()
    if len(base) > _MAX_LETTER_ATOMS:
        raise StateBudgetError(
            f"complementation over {len(base)} live APs exceeds the letter limit"
        )
    nl = 1 << len(base)
    succ = _letter_masks(red, base)

    deterministic = all(
        bin(succ[q][m]).count("1") <= 1 for q in range(red.n_states) for m in range(nl)
    )
    if deterministic:
        result = _det_complement(red, base, succ, nl)
    elif red.n_states <= _RANK_MAX_STATES:
        result = _rank_complement(red, base, succ, nl, state_budget)
    else:
        from .safra import _safra_complement

        result = _safra_complement(red, base, succ, nl, state_budget)
    return simplify(result)
