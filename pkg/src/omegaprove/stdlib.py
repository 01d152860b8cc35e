"""Built-in automata: binary naturals and the Thue-Morse word.

Naturals are encoded least-significant-digit first, one track per number;
position t is true exactly when bit t is 1, and every encoding is eventually
false (finite support), which the `nat` type automaton enforces. The adder
is the carry automaton, strict comparison guesses the last differing
position, and Thue-Morse tracks the parity of the bits seen so far.

`install_structure` registers a parsed Structure directive and, when the
structure is numeric, fills in the default `equal` / `zero` / `one`
operations: track equality, the all-false track, and the least nonzero
element (compiled from the structure's own order).
"""
from __future__ import annotations

from importlib import resources
from typing import Optional

from .buchi import BuchiAutomaton, track_equality
from .errors import TypecheckError
from .guards import TRUE, atom, g_and, g_not, g_or
from .syntax import (
    CallTemplate,
    EVar,
    PAnd,
    PCall,
    PExists,
    PLess,
    PNot,
    Param,
    StructureDecl,
    TypeTag,
)
from .typecheck import (
    PredicateInfo,
    Registry,
    StructureDef,
    check_prop,
    template_params,
)
from .varmaps import VarAutomaton, VariableMap


def build_nat_type() -> BuchiAutomaton:
    """Accepts exactly the eventually-false tracks (finite binary support)."""
    x = atom("x")
    edges = (
        (0, 0, TRUE),
        (0, 1, g_not(x)),
        (1, 1, g_not(x)),
    )
    return BuchiAutomaton(("x",), 2, 0, edges, frozenset((1,)))


def build_bin_add() -> BuchiAutomaton:
    """Carry automaton over tracks x, y, z: accepts when x + y = z."""
    x, y, z = atom("x"), atom("y"), atom("z")
    nx, ny, nz = g_not(x), g_not(y), g_not(z)
    c0_c0 = g_or(g_and(nx, ny, nz), g_and(x, ny, z), g_and(nx, y, z))
    c0_c1 = g_and(x, y, nz)
    c1_c0 = g_and(nx, ny, z)
    c1_c1 = g_or(g_and(x, y, z), g_and(x, ny, nz), g_and(nx, y, nz))
    edges = ((0, 0, c0_c0), (0, 1, c0_c1), (1, 0, c1_c0), (1, 1, c1_c1))
    return BuchiAutomaton(("x", "y", "z"), 2, 0, edges, frozenset((0,)))


def build_bin_less() -> BuchiAutomaton:
    """Guesses the last position where x has 0 and y has 1: accepts x < y."""
    x, y = atom("x"), atom("y")
    same = g_or(g_and(x, y), g_and(g_not(x), g_not(y)))
    edges = (
        (0, 0, TRUE),
        (0, 1, g_and(g_not(x), y)),
        (1, 1, same),
    )
    return BuchiAutomaton(("x", "y"), 2, 0, edges, frozenset((1,)))


def build_thue_morse() -> BuchiAutomaton:
    """Parity of the ones seen on track i; accepting when the parity is odd.

    For finite-support i this stabilizes, so the automaton accepts exactly
    the encodings of positions whose bit count is odd.
    """
    i = atom("i")
    ni = g_not(i)
    edges = ((0, 0, ni), (0, 1, i), (1, 0, i), (1, 1, ni))
    return BuchiAutomaton(("i",), 2, 0, edges, frozenset((1,)))


def build_zero(ap: str = "x") -> BuchiAutomaton:
    """Forces the track false forever: the encoding of zero."""
    return BuchiAutomaton((ap,), 1, 0, ((0, 0, g_not(atom(ap))),), frozenset((0,)))


def builtin_predicates() -> list:
    """(name, formals, automaton) for everything the prelude loads."""
    return [
        ("nat", ("x",), build_nat_type()),
        ("bin_add", ("x", "y", "z"), build_bin_add()),
        ("bin_less", ("x", "y"), build_bin_less()),
        ("T", ("i",), build_thue_morse()),
    ]


def _literal_info(name: str, formals, aut: BuchiAutomaton) -> PredicateInfo:
    vm = VariableMap.of({f: (ap,) for f, ap in zip(formals, aut.aps)})
    return PredicateInfo(
        name,
        tuple(Param(f) for f in formals),
        literal=VarAutomaton(vm, aut),
    )


def _default_one_body(reg: Registry, tag: TypeTag, zero_name: str):
    """x is one when x is nonzero and no nonzero y of the type is below it."""
    x, y = EVar("x"), EVar("y")
    binder_ty = tag
    if not (
        reg.has_predicate(tag.name)
        and reg.predicate(tag.name).arity == len(tag.args) + 1
    ):
        binder_ty = None  # no type predicate to guard with
    body = PAnd(
        PNot(PCall(zero_name, (x,))),
        PNot(
            PExists(
                "y",
                binder_ty,
                PAnd(PNot(PCall(zero_name, (y,))), PLess(y, x)),
            )
        ),
    )
    return check_prop(reg, {"x": tag}, body)


def build_defaults(reg: Registry, sd: StructureDef, caches=None) -> dict:
    """The default equal/zero/one automata for a numeric structure.

    `equal` is trackwise equality, `zero` the all-false track, and `one` is
    compiled from "nonzero and minimal among nonzero elements" using the
    structure's own less; each is returned over a single formal track.
    """
    from .evaluator import EvalContext, SharedCaches, eval_pred

    tag = TypeTag(sd.name, sd.params)
    out = {}
    out["equal"] = VarAutomaton(
        VariableMap.of({"x": ("x",), "y": ("y",)}), track_equality(("x",), ("y",))
    )
    out["zero"] = VarAutomaton(VariableMap.of({"x": ("x",)}), build_zero("x"))

    zero_name = f"__{sd.name}_zero"
    scratch = Registry()
    scratch.predicates = dict(reg.predicates)
    scratch.structures = dict(reg.structures)
    if zero_name not in scratch.predicates:
        scratch.register_predicate(_literal_info(zero_name, ("x",), build_zero("x")))
    scratch.register_structure(sd)
    body = _default_one_body(scratch, tag, zero_name)
    ctx = EvalContext(scratch, caches if caches is not None else SharedCaches())
    one = eval_pred(ctx, body)
    out["one"] = one
    return out


def install_structure(reg: Registry, decl: StructureDecl, caches=None) -> StructureDef:
    """Validate and register a Structure directive, adding numeric defaults."""
    defs = []
    for (opname, ct) in decl.defs:
        info = reg.predicate(ct.target)
        if len(ct.slots) != info.arity:
            raise TypecheckError(
                f"template {ct} does not match {ct.target!r}/{info.arity}"
            )
        for slot in ct.slots:
            if slot is not None and slot not in decl.params:
                raise TypecheckError(
                    f"template {ct}: {slot!r} is not a parameter of {decl.name!r}"
                )
        defs.append((opname, ct))
    sd = StructureDef(decl.name, tuple(decl.params), tuple(defs))

    if sd.is_numeric():
        defaults = build_defaults(reg, sd, caches)
        if sd.lookup("equal") is None:
            name = f"__{sd.name}_equal"
            if not reg.has_predicate(name):
                reg.register_predicate(
                    PredicateInfo(
                        name, (Param("x"), Param("y")), literal=defaults["equal"]
                    )
                )
            sd = sd.with_def("equal", CallTemplate(name, (None, None)))
        if sd.lookup("zero") is None:
            name = f"__{sd.name}_zero"
            if not reg.has_predicate(name):
                reg.register_predicate(
                    PredicateInfo(name, (Param("x"),), literal=defaults["zero"])
                )
            sd = sd.with_def("zero", CallTemplate(name, (None,)))
        if sd.lookup("one") is None:
            name = f"__{sd.name}_one"
            if not reg.has_predicate(name):
                reg.register_predicate(
                    PredicateInfo(name, (Param("x"),), literal=defaults["one"])
                )
            sd = sd.with_def("one", CallTemplate(name, (None,)))

    reg.register_structure(sd)
    return sd


def prelude_dir():
    """Directory holding prelude.pn and the shipped .aut files."""
    return resources.files("omegaprove") / "data"
