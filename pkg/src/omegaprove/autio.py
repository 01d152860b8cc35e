"""Text serialization of automata (.aut files).

Document layout, one item per line, UTF-8, `#` comments and blank lines
ignored on input:

    buchi <n_states> <initial>
    aps [<name> ...]
    acc [<state> ...]
    <src> <dst> <guard>        (any number of edge lines)
    var <name>: [<ap> ...]     (any number of variable-map lines)

Guards use `t`, `f`, `!`, `&`, `|`, parentheses, and AP *indices* into the
`aps` line. Serialization is canonical: states are renumbered breadth-first
from the initial state, APs are listed in first-use order, and variable
lines are sorted, so serialize(parse_document(serialize(x))) is exactly
serialize(x).
"""
from __future__ import annotations

import re

from .buchi import BuchiAutomaton
from .errors import DocumentError
from .guards import (
    FALSE,
    TRUE,
    GAnd,
    GAtom,
    GFalse,
    GNot,
    GOr,
    GTrue,
    Guard,
    atoms,
    g_and,
    g_not,
    g_or,
)
from .varmaps import EMPTY_MAP, VarAutomaton, VariableMap


def _guard_atom_order(g: Guard):
    """Atoms in left-to-right structural order."""
    if isinstance(g, GAtom):
        yield g.name
    elif isinstance(g, GNot):
        yield from _guard_atom_order(g.arg)
    elif isinstance(g, (GAnd, GOr)):
        for a in g.args:
            yield from _guard_atom_order(a)


def _guard_text(g: Guard, index: dict) -> str:
    if isinstance(g, GTrue):
        return "t"
    if isinstance(g, GFalse):
        return "f"
    if isinstance(g, GAtom):
        return str(index[g.name])
    if isinstance(g, GNot):
        inner = _guard_text(g.arg, index)
        if isinstance(g.arg, (GAnd, GOr)):
            return f"!({inner})"
        return f"!{inner}"
    if isinstance(g, GAnd):
        parts = []
        for a in g.args:
            t = _guard_text(a, index)
            parts.append(f"({t})" if isinstance(a, GOr) else t)
        return " & ".join(parts)
    if isinstance(g, GOr):
        return " | ".join(_guard_text(a, index) for a in g.args)
    raise TypeError(f"not a guard: {g!r}")


def serialize(va: VarAutomaton) -> str:
    aut = va.automaton
    sorted_edges = sorted(aut.edges, key=lambda e: (e[0], e[1], str(e[2])))

    # breadth-first state order from the initial state
    adj = {}
    for (s, d, _) in sorted_edges:
        adj.setdefault(s, []).append(d)
    order = [aut.initial]
    seen = {aut.initial}
    head = 0
    while head < len(order):
        q = order[head]
        head += 1
        for d in adj.get(q, ()):
            if d not in seen:
                seen.add(d)
                order.append(d)
    for q in range(aut.n_states):
        if q not in seen:
            seen.add(q)
            order.append(q)
    renum = {q: i for i, q in enumerate(order)}

    edges = sorted(
        ((renum[s], renum[d], g) for (s, d, g) in sorted_edges),
        key=lambda e: (e[0], e[1], str(e[2])),
    )

    ap_order = []
    for (_, _, g) in edges:
        for name in _guard_atom_order(g):
            if name not in ap_order:
                ap_order.append(name)
    for name in aut.aps:
        if name not in ap_order:
            ap_order.append(name)
    index = {name: i for i, name in enumerate(ap_order)}

    acc = sorted(renum[q] for q in aut.accepting)
    lines = [
        f"buchi {aut.n_states} {renum[aut.initial]}",
        ("aps " + " ".join(ap_order)).rstrip(),
        ("acc " + " ".join(str(i) for i in acc)).rstrip(),
    ]
    for (s, d, g) in edges:
        lines.append(f"{s} {d} {_guard_text(g, index)}")
    for (x, aps) in va.varmap.items():
        lines.append(("var " + x + ": " + " ".join(aps)).rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parsing

_GUARD_TOKEN = re.compile(r"\s*(t|f|\d+|!|&|\||\(|\))")


class _GuardParser:
    def __init__(self, text: str, aps: list):
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _GUARD_TOKEN.match(text, pos)
            if m is None:
                if text[pos:].strip():
                    raise DocumentError(f"bad guard syntax near {text[pos:]!r}")
                break
            self.tokens.append(m.group(1))
            pos = m.end()
        self.pos = 0
        self.aps = aps

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise DocumentError("guard ended unexpectedly")
        self.pos += 1
        return tok

    def parse(self) -> Guard:
        g = self.disj()
        if self.peek() is not None:
            raise DocumentError(f"trailing guard tokens: {self.tokens[self.pos:]}")
        return g

    def disj(self) -> Guard:
        out = self.conj()
        while self.peek() == "|":
            self.next()
            out = g_or(out, self.conj())
        return out

    def conj(self) -> Guard:
        out = self.lit()
        while self.peek() == "&":
            self.next()
            out = g_and(out, self.lit())
        return out

    def lit(self) -> Guard:
        tok = self.next()
        if tok == "!":
            return g_not(self.lit())
        if tok == "(":
            g = self.disj()
            if self.next() != ")":
                raise DocumentError("unbalanced parenthesis in guard")
            return g
        if tok == "t":
            return TRUE
        if tok == "f":
            return FALSE
        if tok.isdigit():
            i = int(tok)
            if i >= len(self.aps):
                raise DocumentError(f"guard references AP index {i}, only {len(self.aps)} declared")
            return GAtom(self.aps[i])
        raise DocumentError(f"bad guard token {tok!r}")


def parse_document(text: str) -> VarAutomaton:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if len(lines) < 3:
        raise DocumentError("document needs buchi/aps/acc header lines")

    head = lines[0].split()
    if len(head) != 3 or head[0] != "buchi":
        raise DocumentError(f"bad header line: {lines[0]!r}")
    try:
        n_states, initial = int(head[1]), int(head[2])
    except ValueError:
        raise DocumentError(f"bad header numbers: {lines[0]!r}") from None
    if n_states < 1 or not (0 <= initial < n_states):
        raise DocumentError("header state count or initial state out of range")

    ap_line = lines[1].split()
    if not ap_line or ap_line[0] != "aps":
        raise DocumentError(f"expected aps line, found {lines[1]!r}")
    aps = ap_line[1:]
    if len(set(aps)) != len(aps):
        raise DocumentError("duplicate AP names")

    acc_line = lines[2].split()
    if not acc_line or acc_line[0] != "acc":
        raise DocumentError(f"expected acc line, found {lines[2]!r}")
    try:
        accepting = frozenset(int(tok) for tok in acc_line[1:])
    except ValueError:
        raise DocumentError(f"bad accepting state: {lines[2]!r}") from None
    if any(not (0 <= q < n_states) for q in accepting):
        raise DocumentError("accepting state out of range")

    edges = []
    varlines = []
    for line in lines[3:]:
        if line.startswith("var "):
            varlines.append(line)
            continue
        if varlines:
            raise DocumentError("edge line after variable-map section")
        parts = line.split(None, 2)
        if len(parts) < 3:
            raise DocumentError(f"bad edge line: {line!r}")
        try:
            s, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise DocumentError(f"bad edge endpoints: {line!r}") from None
        if not (0 <= s < n_states and 0 <= d < n_states):
            raise DocumentError(f"edge endpoint out of range: {line!r}")
        edges.append((s, d, _GuardParser(parts[2], aps).parse()))

    mapping = {}
    for line in varlines:
        body = line[4:]
        if ":" not in body:
            raise DocumentError(f"bad variable line: {line!r}")
        name, _, rest = body.partition(":")
        name = name.strip()
        tracks = tuple(rest.split())
        for ap in tracks:
            if ap not in aps:
                raise DocumentError(f"variable {name!r} names unknown AP {ap!r}")
        if name in mapping:
            raise DocumentError(f"variable {name!r} listed twice")
        mapping[name] = tracks

    aut = BuchiAutomaton(tuple(aps), n_states, initial, tuple(edges), accepting)
    vm = VariableMap.of(mapping) if mapping else EMPTY_MAP
    return VarAutomaton(vm, aut)


def load_file(path) -> VarAutomaton:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_document(fh.read())


def save_file(path, va: VarAutomaton):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(va))
