"""Command-line driver: run source files, print verdicts and metrics.

Each file is an independent program: the prelude (binary naturals, the
Thue-Morse word, the `nat` structure) is loaded first unless --no-prelude is
given, then every item runs in order. `Restrict` updates the ambient typing
of variable names for the rest of the file, `Structure` registers a
numeration structure, `Theorem` decides a closed predicate, `#load` binds an
automaton file to a predicate name, and `#save_aut` writes a predicate's
compiled automaton back out.

Exit status: 0 when every theorem is TRUE, 1 when some theorem is FALSE,
2 on any error.
"""
from __future__ import annotations

import argparse
import csv as _csv
import io
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import autio, stdlib
from .complement import DEFAULT_STATE_BUDGET
from .desugar import desugar_pred
from .errors import OpenFormulaError, ParseError, ProverError
from .evaluator import EvalContext, SharedCaches, decide_theorem, instantiate_predicate
from .parser import parse
from .syntax import (
    LoadDecl,
    Param,
    PredicateDef,
    Program,
    RestrictDecl,
    SaveDecl,
    StructureDecl,
    TheoremDecl,
    free_vars,
)
from .typecheck import PredicateInfo, Registry, check_definition, check_prop
from .varmaps import fresh_var, rename_var

CSV_HEADER = "name,verdict,complexity,atoms,runtime_s,max_states,max_edges,final_states,final_edges"


@dataclass
class RunOptions:
    no_prelude: bool = False
    csv: bool = False
    state_budget: int = DEFAULT_STATE_BUDGET
    timeout: float = 300.0
    echo: bool = True


@dataclass
class ReportRow:
    name: str
    verdict: str
    complexity: str
    atoms: int
    runtime_s: float
    max_states: int
    max_edges: int
    final_states: int
    final_edges: int


@dataclass
class RunReport:
    rows: list = field(default_factory=list)

    @property
    def any_false(self) -> bool:
        return any(r.verdict == "FALSE" for r in self.rows)


class ProgramRunner:
    """Executes one program (plus the prelude) in source order."""

    def __init__(self, options: RunOptions):
        self.options = options
        self.registry = Registry()
        self.caches = SharedCaches()
        self.restrictions: dict = {}
        self.report = RunReport()
        if not options.no_prelude:
            self._load_prelude()

    # -- infrastructure -----------------------------------------------------

    def _echo(self, message: str):
        if self.options.echo and not self.options.csv:
            print(message)

    def _load_prelude(self):
        base = stdlib.prelude_dir()
        text = (base / "prelude.pn").read_text(encoding="utf-8")
        self._run_program(parse(text), base)

    def _arities(self) -> dict:
        return {name: info.arity for name, info in self.registry.predicates.items()}

    # -- entry points --------------------------------------------------------

    def run_path(self, path) -> RunReport:
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        self.run_source(text, path.parent)
        return self.report

    def run_source(self, text: str, base_dir=None) -> RunReport:
        self._run_program(parse(text), base_dir if base_dir is not None else Path("."))
        return self.report

    def _run_program(self, program: Program, base_dir):
        for item in program.items:
            self._run_item(item, base_dir)

    # -- items ----------------------------------------------------------------

    def _run_item(self, item, base_dir):
        if isinstance(item, RestrictDecl):
            info = self.registry.predicate(item.ty.name)
            if info.arity != len(item.ty.args) + 1:
                raise ProverError(
                    f"Restrict type {item.ty} needs {info.arity - 1} parameters"
                )
            for v in item.vars:
                self.restrictions[v] = item.ty
        elif isinstance(item, StructureDecl):
            stdlib.install_structure(self.registry, item, self.caches)
        elif isinstance(item, PredicateDef):
            formals = tuple(
                Param(p.name, p.ty or self.restrictions.get(p.name))
                for p in item.params
            )
            scope = {p.name: p.ty for p in formals if p.ty is not None}
            body = desugar_pred(
                item.body, self.restrictions, scope=scope, arities=self._arities()
            )
            checked = check_definition(self.registry, item.name, formals, body)
            self.registry.register_predicate(
                PredicateInfo(item.name, formals, body=checked)
            )
        elif isinstance(item, TheoremDecl):
            self._run_theorem(item)
        elif isinstance(item, LoadDecl):
            self._load_automaton(item, base_dir)
        elif isinstance(item, SaveDecl):
            info = self.registry.predicate(item.name)
            ctx = EvalContext(self.registry, self.caches, self.options.state_budget)
            va = instantiate_predicate(ctx, item.name)
            autio.save_file(Path(item.path), va)
        else:
            raise ProverError(f"cannot execute item {item!r}")

    def _run_theorem(self, item: TheoremDecl):
        body = desugar_pred(item.body, self.restrictions, arities=self._arities())
        free = free_vars(body)
        if free:
            raise OpenFormulaError(sorted(free))
        checked = check_prop(self.registry, {}, body)
        deadline = (
            time.perf_counter() + self.options.timeout
            if self.options.timeout and self.options.timeout > 0
            else None
        )
        ctx = EvalContext(
            self.registry, self.caches, self.options.state_budget, deadline
        )
        verdict, metrics = decide_theorem(ctx, item.name, checked)
        row = ReportRow(
            name=item.name,
            verdict="TRUE" if verdict else "FALSE",
            complexity=metrics.quantifier_blocks,
            atoms=metrics.atoms,
            runtime_s=metrics.runtime_seconds,
            max_states=metrics.max_states,
            max_edges=metrics.max_edges,
            final_states=metrics.final_states,
            final_edges=metrics.final_edges,
        )
        self.report.rows.append(row)
        self._echo(
            f"{item.name or '(unnamed)'}: {row.verdict} ({row.runtime_s:.2f} s)"
        )

    def _load_automaton(self, item: LoadDecl, base_dir):
        try:
            text = (base_dir / item.path).read_text(encoding="utf-8")
        except (FileNotFoundError, OSError) as exc:
            raise ProverError(f"cannot load {item.path!r}: {exc}") from None
        va = autio.parse_document(text)
        doc_order = _document_var_order(text)
        if len(doc_order) != len(item.params):
            raise ProverError(
                f"#load {item.name!r}: document has {len(doc_order)} variables, "
                f"declaration names {len(item.params)}"
            )
        taken = set(va.automaton.aps) | set(item.params)
        temps = []
        for docvar in doc_order:
            tmp, tmp_aps = fresh_var(len(va.varmap[docvar]), taken=taken)
            taken.add(tmp)
            taken.update(tmp_aps)
            va = rename_var(va, docvar, tmp, tmp_aps)
            temps.append(tmp)
        for tmp, formal in zip(temps, item.params):
            n = len(va.varmap[tmp])
            aps = (formal,) if n == 1 else tuple(f"{formal}_{i}" for i in range(n))
            va = rename_var(va, tmp, formal, aps)
        self.registry.register_predicate(
            PredicateInfo(
                item.name, tuple(Param(p) for p in item.params), literal=va
            )
        )


def _document_var_order(text: str) -> list:
    order = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line.startswith("var "):
            order.append(line[4:].partition(":")[0].strip())
    return order


# ---------------------------------------------------------------------------
# Reports


def report_format(report: RunReport, mode: str = "human") -> str:
    if mode == "csv":
        out = io.StringIO()
        writer = _csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for r in report.rows:
            writer.writerow(
                [
                    r.name,
                    r.verdict,
                    r.complexity,
                    r.atoms,
                    f"{r.runtime_s:.3f}",
                    r.max_states,
                    r.max_edges,
                    r.final_states,
                    r.final_edges,
                ]
            )
        return out.getvalue()
    if mode != "human":
        raise ProverError(f"unknown report mode {mode!r}")
    headers = [
        "name", "verdict", "complexity", "atoms", "runtime_s",
        "max_states", "max_edges", "final_states", "final_edges",
    ]
    table = [headers]
    for r in report.rows:
        table.append(
            [
                r.name or "(unnamed)",
                r.verdict,
                r.complexity or "-",
                str(r.atoms),
                f"{r.runtime_s:.3f}",
                str(r.max_states),
                str(r.max_edges),
                str(r.final_states),
                str(r.final_edges),
            ]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = []
    for row in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def run_file(path, options: Optional[RunOptions] = None):
    """Execute one file; returns (RunReport, exit_status)."""
    options = options or RunOptions()
    runner = ProgramRunner(options)
    try:
        report = runner.run_path(path)
    except FileNotFoundError:
        print(f"error: no such file: {path}", file=sys.stderr)
        return runner.report, 2
    except ProverError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return runner.report, 2
    return report, (1 if report.any_false else 0)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="omegaprove",
        description="Decide first-order theorems over omega-automatic structures.",
    )
    ap.add_argument("files", nargs="+", help="source files (.pn)")
    ap.add_argument(
        "--no-prelude",
        action="store_true",
        help="do not load the built-in numeration and word automata",
    )
    ap.add_argument("--csv", action="store_true", help="emit the report as CSV")
    ap.add_argument(
        "--state-budget",
        type=int,
        default=DEFAULT_STATE_BUDGET,
        metavar="N",
        help="abort complementation beyond N states (default %(default)s)",
    )
    ap.add_argument(
        "--timeout",
        type=float,
        default=300.0,
        metavar="S",
        help="per-theorem time limit in seconds, 0 disables (default %(default)s)",
    )
    args = ap.parse_args(argv)

    options = RunOptions(
        no_prelude=args.no_prelude,
        csv=args.csv,
        state_budget=args.state_budget,
        timeout=args.timeout,
    )
    combined = RunReport()
    status = 0
    for path in args.files:
        report, code = run_file(path, options)
        combined.rows.extend(report.rows)
        status = max(status, code)
    output = report_format(combined, "csv" if args.csv else "human")
    print(output, end="")
    return status


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
