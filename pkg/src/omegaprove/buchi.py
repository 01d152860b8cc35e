"""Nondeterministic Buchi automata with guard-labelled edges.

An automaton runs over omega-words whose positions are valuations of the
automaton's atomic propositions; a word is accepted when some run visits an
accepting state infinitely often. States are integers 0..n-1. All values are
immutable; every operation returns a fresh automaton and leaves its inputs
untouched, so automata are safe to share across threads.

Provided here: the closure operations the evaluator needs (intersection,
union, projection, AP renaming), decision procedures (emptiness with a lasso
witness, lasso-word membership) and language-preserving simplification.
Complementation lives in `complement`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import APCollisionError, ProverError, UnknownAPError, VarArityError
from .guards import (
    FALSE,
    TRUE,
    Guard,
    assign,
    atom,
    atoms,
    canonical,
    evaluate,
    from_minterms,
    g_and,
    g_not,
    g_or,
    is_satisfiable,
    minterms,
    some_model,
    substitute,
    valuation_of_mask,
)

Edge = tuple  # (src: int, dst: int, guard: Guard)


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word prefix . cycle^omega.

    Each position is a frozenset of the atomic propositions that are true
    there; propositions not listed are false.
    """

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise ProverError("lasso cycle must be nonempty")

    def valuation(self, t: int) -> frozenset:
        if t < len(self.prefix):
            return self.prefix[t]
        return self.cycle[(t - len(self.prefix)) % len(self.cycle)]


@dataclass(frozen=True)
class BuchiAutomaton:
    aps: tuple
    n_states: int
    initial: int
    edges: tuple
    accepting: frozenset

    def __post_init__(self):
        if len(set(self.aps)) != len(self.aps):
            raise ProverError(f"duplicate atomic propositions: {self.aps}")
        if self.n_states < 1:
            raise ProverError("automaton needs at least one state")
        if not (0 <= self.initial < self.n_states):
            raise ProverError("initial state out of range")
        if not self.accepting <= frozenset(range(self.n_states)):
            raise ProverError("accepting set out of range")
        apset = set(self.aps)
        for (s, d, g) in self.edges:
            if not (0 <= s < self.n_states and 0 <= d < self.n_states):
                raise ProverError(f"edge endpoint out of range: {(s, d)}")
            extra = atoms(g) - apset
            if extra:
                raise ProverError(f"guard uses unknown APs {sorted(extra)}")

    def out_edges(self, q: int):
        return [(d, g) for (s, d, g) in self.edges if s == q]

    def used_atoms(self) -> tuple:
        used = set()
        for (_, _, g) in self.edges:
            used |= atoms(g)
        return tuple(sorted(used))


def universal(aps: Sequence[str]) -> BuchiAutomaton:
    """One accepting state looping on every letter: accepts all omega-words."""
    return BuchiAutomaton(tuple(aps), 1, 0, ((0, 0, TRUE),), frozenset((0,)))


def empty(aps: Sequence[str]) -> BuchiAutomaton:
    """One non-accepting state, no edges: accepts nothing."""
    return BuchiAutomaton(tuple(aps), 1, 0, (), frozenset())


def track_equality(aps_a: Sequence[str], aps_b: Sequence[str]) -> BuchiAutomaton:
    """Accepts words whose `aps_a` tracks equal the `aps_b` tracks pointwise."""
    if len(aps_a) != len(aps_b):
        raise VarArityError("track arity mismatch in equality automaton")
    parts = []
    for a, b in zip(aps_a, aps_b):
        if a != b:
            parts.append(g_or(g_and(atom(a), atom(b)), g_and(g_not(atom(a)), g_not(atom(b)))))
    g = g_and(*parts) if parts else TRUE
    aps = tuple(aps_a) + tuple(p for p in aps_b if p not in aps_a)
    return BuchiAutomaton(aps, 1, 0, ((0, 0, g),), frozenset((0,)))


def _merged_aps(a: BuchiAutomaton, b: BuchiAutomaton) -> tuple:
    return a.aps + tuple(p for p in b.aps if p not in a.aps)


def intersect(a: BuchiAutomaton, b: BuchiAutomaton) -> BuchiAutomaton:
    """Two-copy product: L(result) = L(a) & L(b) over the union AP set.

    Shared AP names are synchronized; the first copy waits for a-acceptance,
    the second for b-acceptance, so the result has at most 2*|Qa|*|Qb| states.
    """
    aps = _merged_aps(a, b)
    a_out = [[] for _ in range(a.n_states)]
    for (s, d, g) in a.edges:
        a_out[s].append((d, g))
    b_out = [[] for _ in range(b.n_states)]
    for (s, d, g) in b.edges:
        b_out[s].append((d, g))

    start = (a.initial, b.initial, 0)
    index = {start: 0}
    order = [start]
    edges = []
    pos = 0
    while pos < len(order):
        qa, qb, ph = order[pos]
        if ph == 0:
            ph2 = 1 if qa in a.accepting else 0
        else:
            ph2 = 0 if qb in b.accepting else 1
        for (ta, ga) in a_out[qa]:
            for (tb, gb) in b_out[qb]:
                g = g_and(ga, gb)
                if isinstance(g, type(FALSE)) or not is_satisfiable(g):
                    continue
                tgt = (ta, tb, ph2)
                tid = index.get(tgt)
                if tid is None:
                    tid = len(order)
                    index[tgt] = tid
                    order.append(tgt)
                edges.append((pos, tid, g))
        pos += 1
    accepting = frozenset(
        i for i, (qa, qb, ph) in enumerate(order) if ph == 0 and qa in a.accepting
    )
    return BuchiAutomaton(aps, len(order), 0, tuple(edges), accepting)


def union(a: BuchiAutomaton, b: BuchiAutomaton) -> BuchiAutomaton:
    """Disjoint union behind a fresh initial state: |Q| = |Qa| + |Qb| + 1."""
    aps = _merged_aps(a, b)
    offa, offb = 1, 1 + a.n_states
    edges = []
    for (s, d, g) in a.edges:
        edges.append((s + offa, d + offa, g))
        if s == a.initial:
            edges.append((0, d + offa, g))
    for (s, d, g) in b.edges:
        edges.append((s + offb, d + offb, g))
        if s == b.initial:
            edges.append((0, d + offb, g))
    accepting = frozenset(q + offa for q in a.accepting) | frozenset(
        q + offb for q in b.accepting
    )
    return BuchiAutomaton(aps, 1 + a.n_states + b.n_states, 0, tuple(edges), accepting)


def project(a: BuchiAutomaton, remove: Sequence[str]) -> BuchiAutomaton:
    """Existentially quantify the listed APs out of every guard."""
    remove = list(remove)
    for p in remove:
        if p not in a.aps:
            raise UnknownAPError(f"cannot project unknown AP {p!r}")
    removeset = set(remove)
    keep = tuple(p for p in a.aps if p not in removeset)
    edges = []
    for (s, d, g) in a.edges:
        for p in a.aps:
            if p in removeset and p in atoms(g):
                g = g_or(assign(g, p, False), assign(g, p, True))
        edges.append((s, d, g))
    return BuchiAutomaton(keep, a.n_states, a.initial, tuple(edges), a.accepting)


def substitute_aps(a: BuchiAutomaton, theta: Mapping[str, str]) -> BuchiAutomaton:
    """Rename APs throughout; graph structure is unchanged.

    Strict contract: every source must exist, and the renamed AP list must
    stay duplicate-free (so a target may only be an existing AP when it is
    itself a source being swapped away).
    """
    for src in theta:
        if src not in a.aps:
            raise UnknownAPError(f"cannot rename unknown AP {src!r}")
    new_aps = tuple(theta.get(p, p) for p in a.aps)
    if len(set(new_aps)) != len(new_aps):
        raise APCollisionError(f"renaming collides: {dict(theta)}")
    edges = tuple((s, d, substitute(g, theta)) for (s, d, g) in a.edges)
    return BuchiAutomaton(new_aps, a.n_states, a.initial, edges, a.accepting)


def collapse_aps(a: BuchiAutomaton, theta: Mapping[str, str]) -> BuchiAutomaton:
    """Rename APs allowing targets that already exist (tracks merge).

    Used for call-site aliasing, where two formal tracks legitimately land on
    the same actual track.
    """
    for src in theta:
        if src not in a.aps:
            raise UnknownAPError(f"cannot rename unknown AP {src!r}")
    new_aps = []
    for p in a.aps:
        q = theta.get(p, p)
        if q not in new_aps:
            new_aps.append(q)
    edges = tuple((s, d, substitute(g, theta)) for (s, d, g) in a.edges)
    return BuchiAutomaton(tuple(new_aps), a.n_states, a.initial, edges, a.accepting)


# ---------------------------------------------------------------------------
# Decision procedures


def _sccs(n: int, adj) -> list:
    """Iterative Tarjan; returns components in a deterministic order."""
    idx = [-1] * n
    low = [0] * n
    on = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if idx[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                idx[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on[v] = True
            advanced = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if idx[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on[w]:
                    low[v] = min(low[v], idx[w])
            if advanced:
                continue
            if low[v] == idx[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comps


def _sat_adjacency(a: BuchiAutomaton):
    adj = [[] for _ in range(a.n_states)]
    adj_edges = [[] for _ in range(a.n_states)]
    for (s, d, g) in sorted(a.edges, key=lambda e: (e[0], e[1], str(e[2]))):
        if is_satisfiable(g):
            adj[s].append(d)
            adj_edges[s].append((d, g))
    return adj, adj_edges


def find_accepted_lasso(a: BuchiAutomaton):
    """A lasso word accepted by `a`, or None when L(a) is empty.

    Searches for a reachable strongly connected component that contains an
    accepting state and at least one edge, then stitches a prefix path and a
    cycle through that state.
    """
    adj, adj_edges = _sat_adjacency(a)

    reach = {a.initial}
    frontier = [a.initial]
    while frontier:
        q = frontier.pop()
        for d in adj[q]:
            if d not in reach:
                reach.add(d)
                frontier.append(d)

    comp_of = {}
    comps = _sccs(a.n_states, adj)
    for ci, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = ci

    def comp_has_edge(ci):
        members = set(comps[ci])
        return any(comp_of.get(d) == ci for q in comps[ci] for d in adj[q] if d in members)

    target = None
    for q in range(a.n_states):
        if q in reach and q in a.accepting and comp_has_edge(comp_of[q]):
            target = q
            break
    if target is None:
        return None

    def bfs_path(src, dst, allowed=None):
        # returns list of (guard) along a shortest edge path src -> dst
        prev = {src: None}
        queue = [src]
        head = 0
        while head < len(queue):
            q = queue[head]
            head += 1
            for (d, g) in adj_edges[q]:
                if allowed is not None and d not in allowed:
                    continue
                if d not in prev:
                    prev[d] = (q, g)
                    if d == dst:
                        queue.append(d)
                        head = len(queue)
                        break
                    queue.append(d)
        if dst not in prev:
            return None
        guards = []
        cur = dst
        while prev[cur] is not None:
            q, g = prev[cur]
            guards.append(g)
            cur = q
        guards.reverse()
        return guards

    prefix_guards = bfs_path(a.initial, target)
    # cycle: one step out of target staying in its SCC, then back
    members = set(comps[comp_of[target]])
    cycle_guards = None
    for (d, g) in adj_edges[target]:
        if d not in members:
            continue
        if d == target:
            cycle_guards = [g]
            break
        back = bfs_path(d, target, allowed=members)
        if back is not None:
            cycle_guards = [g] + back
            break
    if prefix_guards is None or cycle_guards is None:  # pragma: no cover - defensive
        return None

    def model(g):
        m = some_model(g)
        return m if m is not None else frozenset()

    return LassoWord(
        tuple(model(g) for g in prefix_guards), tuple(model(g) for g in cycle_guards)
    )


def is_empty(a: BuchiAutomaton) -> bool:
    return find_accepted_lasso(a) is None


def accepts(a: BuchiAutomaton, w: LassoWord) -> bool:
    """Membership of the ultimately periodic word u.v^omega in L(a).

    Explores the product of the automaton with the |u|+|v| positions of the
    lasso and looks for a cycle through an accepting state.
    """
    vals = list(w.prefix) + list(w.cycle)
    plen = len(w.prefix)
    total = len(vals)

    out = [[] for _ in range(a.n_states)]
    for (s, d, g) in a.edges:
        out[s].append((d, g))

    start = (a.initial, 0)
    index = {start: 0}
    order = [start]
    adj = [[]]
    pos = 0
    while pos < len(order):
        q, j = order[pos]
        j2 = j + 1 if j + 1 < total else plen
        for (d, g) in out[q]:
            if not evaluate(g, vals[j]):
                continue
            tgt = (d, j2)
            tid = index.get(tgt)
            if tid is None:
                tid = len(order)
                index[tgt] = tid
                order.append(tgt)
                adj.append([])
            adj[pos].append(tid)
        pos += 1

    comps = _sccs(len(order), adj)
    comp_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    for ci, comp in enumerate(comps):
        members = set(comp)
        has_edge = any(t in members for v in comp for t in adj[v])
        if not has_edge:
            continue
        if any(order[v][0] in a.accepting for v in comp):
            return True
    return False


# ---------------------------------------------------------------------------
# Simplification

_BISIM_MAX_ATOMS = 6
_BISIM_MAX_STATES = 400


def _clean_edges(a: BuchiAutomaton) -> BuchiAutomaton:
    grouped = {}
    for (s, d, g) in a.edges:
        key = (s, d)
        grouped[key] = g_or(grouped[key], g) if key in grouped else g
    edges = []
    for (s, d) in sorted(grouped):
        g = grouped[(s, d)]
        if len(atoms(g)) <= 8:
            g = canonical(g)
        if isinstance(g, type(FALSE)):
            continue
        if not is_satisfiable(g):
            continue
        edges.append((s, d, g))
    return BuchiAutomaton(a.aps, a.n_states, a.initial, tuple(edges), a.accepting)


def _trim(a: BuchiAutomaton) -> BuchiAutomaton:
    """Keep states on some path initial -> accepting cycle; else canonical empty."""
    adj = [[] for _ in range(a.n_states)]
    radj = [[] for _ in range(a.n_states)]
    for (s, d, g) in a.edges:
        adj[s].append(d)
        radj[d].append(s)

    reach = {a.initial}
    frontier = [a.initial]
    while frontier:
        q = frontier.pop()
        for d in adj[q]:
            if d not in reach:
                reach.add(d)
                frontier.append(d)

    comps = _sccs(a.n_states, adj)
    comp_of = {}
    for ci, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = ci
    good = set()
    for ci, comp in enumerate(comps):
        members = set(comp)
        if not members & a.accepting:
            continue
        if any(d in members for q in comp for d in adj[q]):
            good |= members

    useful = set(q for q in good if q in reach)
    frontier = list(useful)
    while frontier:
        q = frontier.pop()
        for p in radj[q]:
            if p in reach and p not in useful:
                useful.add(p)
                frontier.append(p)

    if a.initial not in useful:
        return empty(a.aps)

    order = sorted(useful)
    renum = {q: i for i, q in enumerate(order)}
    edges = tuple(
        (renum[s], renum[d], g) for (s, d, g) in a.edges if s in useful and d in useful
    )
    accepting = frozenset(renum[q] for q in a.accepting if q in useful)
    return BuchiAutomaton(a.aps, len(order), renum[a.initial], edges, accepting)


def _letter_successors(a: BuchiAutomaton, base: tuple):
    """Per-state, per-letter successor sets over minterms of `base`."""
    nl = 1 << len(base)
    succ = [[set() for _ in range(nl)] for _ in range(a.n_states)]
    for (s, d, g) in a.edges:
        for m in minterms(g, base):
            succ[s][m].add(d)
    return succ


def _bisim_quotient(a: BuchiAutomaton) -> BuchiAutomaton:
    base = a.used_atoms()
    if len(base) > _BISIM_MAX_ATOMS or a.n_states > _BISIM_MAX_STATES:
        return a
    nl = 1 << len(base)
    succ = _letter_successors(a, base)

    block = [1 if q in a.accepting else 0 for q in range(a.n_states)]
    nblocks = 2
    while True:
        sigs = {}
        newblock = [0] * a.n_states
        for q in range(a.n_states):
            sig = (
                block[q],
                tuple(frozenset(block[t] for t in succ[q][m]) for m in range(nl)),
            )
            bid = sigs.get(sig)
            if bid is None:
                bid = len(sigs)
                sigs[sig] = bid
            newblock[q] = bid
        stable = len(sigs) == nblocks
        block = newblock
        nblocks = len(sigs)
        if stable:
            break

    if nblocks == a.n_states:
        return a

    # canonical block numbering by first member
    remap = {}
    for q in range(a.n_states):
        if block[q] not in remap:
            remap[block[q]] = len(remap)
    block = [remap[b] for b in block]

    grouped = {}
    for (s, d, g) in a.edges:
        key = (block[s], block[d])
        grouped[key] = g_or(grouped[key], g) if key in grouped else g
    edges = []
    for (s, d) in sorted(grouped):
        g = grouped[(s, d)]
        if len(atoms(g)) <= 8:
            g = canonical(g)
        if not isinstance(g, type(FALSE)):
            edges.append((s, d, g))
    accepting = frozenset(block[q] for q in a.accepting)
    return BuchiAutomaton(a.aps, nblocks, block[a.initial], tuple(edges), accepting)


def _bfs_renumber(a: BuchiAutomaton) -> BuchiAutomaton:
    adj = [[] for _ in range(a.n_states)]
    for (s, d, g) in sorted(a.edges, key=lambda e: (e[0], e[1], str(e[2]))):
        adj[s].append(d)
    order = [a.initial]
    seen = {a.initial}
    head = 0
    while head < len(order):
        q = order[head]
        head += 1
        for d in adj[q]:
            if d not in seen:
                seen.add(d)
                order.append(d)
    for q in range(a.n_states):
        if q not in seen:
            order.append(q)
            seen.add(q)
    renum = {q: i for i, q in enumerate(order)}
    edges = tuple(
        sorted(
            ((renum[s], renum[d], g) for (s, d, g) in a.edges),
            key=lambda e: (e[0], e[1], str(e[2])),
        )
    )
    return BuchiAutomaton(
        a.aps, a.n_states, renum[a.initial], edges, frozenset(renum[q] for q in a.accepting)
    )


def simplify(a: BuchiAutomaton) -> BuchiAutomaton:
    """Language-preserving reduction.

    Removes unsatisfiable and duplicate edges, prunes states that are
    unreachable or cannot reach an accepting cycle, and merges bisimilar
    states (below a size threshold). The AP set is preserved.
    """
    a = _clean_edges(a)
    a = _trim(a)
    a = _bisim_quotient(a)
    return _bfs_renumber(a)


# ---------------------------------------------------------------------------
# Simulation-based reduction (used before complementation)

_SIM_MAX_STATES = 140
_SIM_MAX_ATOMS = 6


def _attractor(owner, succs, preds, alive, target, player):
    """Nodes from which `player` forces the play into `target` (within alive)."""
    in_attr = [False] * len(owner)
    queue = []
    for v in target:
        if alive[v] and not in_attr[v]:
            in_attr[v] = True
            queue.append(v)
    count = [0] * len(owner)
    for v in range(len(owner)):
        if alive[v] and owner[v] != player:
            count[v] = sum(1 for w in succs[v] if alive[w])
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for u in preds[v]:
            if not alive[u] or in_attr[u]:
                continue
            if owner[u] == player:
                in_attr[u] = True
                queue.append(u)
            else:
                count[u] -= 1
                if count[u] == 0:
                    in_attr[u] = True
                    queue.append(u)
    return in_attr


def _buchi_game_wins(owner, succs, preds, good):
    """Winning set of player 0 for 'visit `good` infinitely often'.

    Every node must have a successor (callers add winning/losing sinks for
    dead ends). Classical iterated-attractor algorithm.
    """
    n = len(owner)
    alive = [True] * n
    while True:
        target = [v for v in range(n) if alive[v] and good[v]]
        attr0 = _attractor(owner, succs, preds, alive, target, 0)
        trap = [v for v in range(n) if alive[v] and not attr0[v]]
        if not trap:
            return alive
        attr1 = _attractor(owner, succs, preds, alive, trap, 1)
        changed = False
        for v in range(n):
            if alive[v] and attr1[v]:
                alive[v] = False
                changed = True
        if not changed:  # pragma: no cover - attr1 always contains trap
            return alive
        if not any(alive):
            return alive


def _delayed_simulation(a: BuchiAutomaton, succ, nl: int):
    """sim[p][q] == True when q delayed-simulates p.

    Delayed simulation: whenever the simulated run visits acceptance, the
    simulating run must visit acceptance eventually (not necessarily at the
    same step). Decided as a Buchi game where the pending-obligation bit
    must clear infinitely often.
    """
    n = a.n_states
    acc = a.accepting

    # node layout: spoiler nodes (p, q, b); duplicator nodes (p2, q, b, m)
    def snode(p, q, b):
        return (p * n + q) * 2 + b

    n_snodes = n * n * 2
    dindex = {}
    owner = [1] * n_snodes  # 1 = spoiler to move
    succs = [[] for _ in range(n_snodes)]
    good = [False] * n_snodes
    for p in range(n):
        for q in range(n):
            for b in (0, 1):
                good[snode(p, q, b)] = b == 0

    def dnode(p2, q, b, m):
        key = (p2, q, b, m)
        got = dindex.get(key)
        if got is None:
            got = len(owner)
            dindex[key] = got
            owner.append(0)
            succs.append([])
            good.append(False)
        return got

    for p in range(n):
        for q in range(n):
            for b in (0, 1):
                v = snode(p, q, b)
                for m in range(nl):
                    mask = succ[p][m]
                    p2 = 0
                    while mask:
                        if mask & 1:
                            succs[v].append(dnode(p2, q, b, m))
                        mask >>= 1
                        p2 += 1
    for (p2, q, b, m), v in list(dindex.items()):
        pending = 1 if (b == 1 or p2 in acc) else 0
        mask = succ[q][m]
        q2 = 0
        while mask:
            if mask & 1:
                b2 = 0 if q2 in acc else pending
                succs[v].append(snode(p2, q2, b2))
            mask >>= 1
            q2 += 1

    # dead ends lose for their owner: route them to looping sinks
    sink_good = len(owner)
    owner.append(0)
    succs.append([sink_good])
    good.append(True)
    sink_bad = len(owner)
    owner.append(0)
    succs.append([sink_bad])
    good.append(False)
    for v in range(len(owner) - 2):
        if not succs[v]:
            succs[v].append(sink_good if owner[v] == 1 else sink_bad)

    preds = [[] for _ in range(len(owner))]
    for v, out in enumerate(succs):
        for w in out:
            preds[w].append(v)

    wins = _buchi_game_wins(owner, succs, preds, good)
    sim = [[False] * n for _ in range(n)]
    for p in range(n):
        for q in range(n):
            b0 = 1 if (p in acc and q not in acc) else 0
            sim[p][q] = wins[snode(p, q, b0)]
    return sim


def _quotient_by(a: BuchiAutomaton, block, nb: int, base: tuple) -> BuchiAutomaton:
    """Merge states per `block`, uniting edges; a class accepts when any
    member does."""
    grouped = {}
    for (s, d, g) in a.edges:
        key = (block[s], block[d])
        grouped[key] = g_or(grouped[key], g) if key in grouped else g
    edges = []
    for (s, d) in sorted(grouped):
        g = grouped[(s, d)]
        if len(atoms(g)) <= 8:
            g = canonical(g)
        if not isinstance(g, type(FALSE)):
            edges.append((s, d, g))
    accepting = frozenset(block[q] for q in a.accepting)
    return BuchiAutomaton(a.aps, nb, block[a.initial], tuple(edges), accepting)


def _delayed_quotient(a: BuchiAutomaton) -> BuchiAutomaton:
    base = a.used_atoms()
    if a.n_states <= 2 or a.n_states > 80 or len(base) > 4:
        return a
    nl = 1 << len(base)
    succ_sets = _letter_successors(a, base)
    succ = [
        [sum(1 << t for t in succ_sets[q][m]) for m in range(nl)]
        for q in range(a.n_states)
    ]
    sim = _delayed_simulation(a, succ, nl)
    n = a.n_states
    rep = list(range(n))
    for p in range(n):
        for q in range(p):
            if sim[p][q] and sim[q][p]:
                rep[p] = rep[q]
                break
    remap = {}
    for q in range(n):
        r = rep[q]
        if r not in remap:
            remap[r] = len(remap)
    if len(remap) == n:
        return a
    block = [remap[rep[q]] for q in range(n)]
    return simplify(_quotient_by(a, block, len(remap), base))


def _direct_simulation(n: int, succ, accepting: frozenset, nl: int):
    """sim[p][q] == True when q direct-simulates p."""
    sim = [[(p not in accepting) or (q in accepting) for q in range(n)] for p in range(n)]
    changed = True
    while changed:
        changed = False
        for p in range(n):
            for q in range(n):
                if not sim[p][q]:
                    continue
                ok = True
                for m in range(nl):
                    for p2 in succ[p][m]:
                        if not any(sim[p2][q2] for q2 in succ[q][m]):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    sim[p][q] = False
                    changed = True
    return sim


def reduce_hard(a: BuchiAutomaton) -> BuchiAutomaton:
    """simplify plus simulation quotients and little-brother pruning.

    Runs the direct-simulation quotient (with dominated-edge removal), then
    a delayed-simulation quotient, which merges more states and is what
    keeps complementation inputs small.
    """
    a = simplify(a)
    base = a.used_atoms()
    if a.n_states <= 1 or a.n_states > _SIM_MAX_STATES or len(base) > _SIM_MAX_ATOMS:
        return a
    for _ in range(2):
        n = a.n_states
        base = a.used_atoms()
        nl = 1 << len(base)
        succ = _letter_successors(a, base)
        sim = _direct_simulation(n, succ, a.accepting, nl)

        # quotient by simulation equivalence
        rep = list(range(n))
        for p in range(n):
            for q in range(p):
                if sim[p][q] and sim[q][p]:
                    rep[p] = rep[q]
                    break
        remap = {}
        for q in range(n):
            r = rep[q]
            if r not in remap:
                remap[r] = len(remap)
        block = [remap[rep[q]] for q in range(n)]
        nb = len(remap)

        # representative-level successor letters with little brothers removed
        bsucc = [[set() for _ in range(nl)] for _ in range(nb)]
        for q in range(n):
            for m in range(nl):
                for t in succ[q][m]:
                    bsucc[block[q]][m].add(t)
        edges = {}
        for bq in range(nb):
            for m in range(nl):
                targets = sorted(bsucc[bq][m])
                kept = []
                for t in targets:
                    dominated = any(
                        t2 != t and sim[t][t2] and not sim[t2][t] for t2 in targets
                    )
                    if not dominated:
                        kept.append(block[t])
                for bt in sorted(set(kept)):
                    edges.setdefault((bq, bt), set()).add(m)
        new_edges = []
        for (s, d) in sorted(edges):
            g = from_minterms(base, edges[(s, d)])
            if not isinstance(g, type(FALSE)):
                new_edges.append((s, d, g))
        b = BuchiAutomaton(
            a.aps, nb, block[a.initial], tuple(new_edges), frozenset(block[q] for q in a.accepting)
        )
        b = simplify(b)
        if b.n_states >= a.n_states:
            break
        a = b
    while True:
        b = _delayed_quotient(a)
        if b.n_states >= a.n_states:
            break
        a = b
    return a
