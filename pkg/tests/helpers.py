"""Shared oracles and generators for the test suite.

Numbers are encoded least-significant-bit first with eventually-false
tracks, so the integer helpers here are independent of the automata they
test against.
"""
from __future__ import annotations

import random

from omegaprove.buchi import BuchiAutomaton, LassoWord
from omegaprove.guards import from_minterms


def nat_lasso(values: dict, pad: int = 1) -> LassoWord:
    """Encode {track: n} as a lasso: LSB-first bits, then an all-false cycle."""
    width = max([n.bit_length() for n in values.values()] + [0]) + pad
    prefix = []
    for t in range(width):
        prefix.append(frozenset(ap for ap, n in values.items() if (n >> t) & 1))
    return LassoWord(tuple(prefix), (frozenset(),))


def lasso_value(w: LassoWord, ap: str) -> int:
    """Decode a finite-support track back to a natural; None if not finite.

    Only meaningful when the cycle never sets the track.
    """
    if any(ap in v for v in w.cycle):
        return None
    n = 0
    for t, v in enumerate(w.prefix):
        if ap in v:
            n |= 1 << t
    return n


def popcount_parity(n: int) -> int:
    return bin(n).count("1") % 2


def random_guard(rng: random.Random, aps):
    masks = {m for m in range(1 << len(aps)) if rng.random() < 0.6}
    return from_minterms(tuple(aps), masks)


def random_automaton(
    rng: random.Random,
    max_states: int = 5,
    ap_pool=("p", "q"),
    density=(0.3, 0.9),
) -> BuchiAutomaton:
    n = rng.randint(1, max_states)
    k = rng.randint(1, len(ap_pool))
    aps = tuple(ap_pool[:k])
    d = rng.uniform(*density)
    edges = []
    for s in range(n):
        for t in range(n):
            if rng.random() < d:
                g = random_guard(rng, aps)
                if str(g) != "f":
                    edges.append((s, t, g))
    accepting = frozenset(q for q in range(n) if rng.random() < 0.4)
    return BuchiAutomaton(aps, n, 0, tuple(edges), accepting)


def random_lasso(rng: random.Random, aps, max_prefix: int = 6, max_cycle: int = 6) -> LassoWord:
    def val():
        return frozenset(ap for ap in aps if rng.random() < 0.5)

    prefix = tuple(val() for _ in range(rng.randint(0, max_prefix)))
    cycle = tuple(val() for _ in range(rng.randint(1, max_cycle)))
    return LassoWord(prefix, cycle)


def corpus(seed: int, count: int, **kwargs):
    rng = random.Random(seed)
    return [random_automaton(rng, **kwargs) for _ in range(count)]
