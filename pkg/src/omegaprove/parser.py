"""Lexer and recursive-descent parser for `.pn` source files.

Statements end with `.`; comments run from `//` to end of line. The predicate
grammar uses `&`, `|`, `!`, `<=>`, `exists`/`forall` binders, `if ... then
...`, comparisons over arithmetic expressions, predicate calls, and word
indexing `P[e]` / `P[e..e]`. The parser resolves the parenthesis ambiguity
between expressions and predicates by trying a comparison first and
backtracking.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .syntax import (
    CallTemplate,
    E,
    EAdd,
    ECall,
    EInt,
    EMul,
    ESub,
    EVar,
    LoadDecl,
    Param,
    PAnd,
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
    PredicateDef,
    Program,
    RestrictDecl,
    SaveDecl,
    StructureDecl,
    TheoremDecl,
    TypeTag,
    WordIndex,
)

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>//[^\n]*)
    | (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<hash>\#[A-Za-z_][A-Za-z0-9_]*)
    | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<int>\d+)
    | (?P<op>:=|<=>|<=|>=|!=|\.\.|[(){}\[\],.:<>=&|!+\-*])
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "Restrict",
    "Structure",
    "Theorem",
    "defining",
    "is",
    "are",
    "in",
    "if",
    "then",
    "exists",
    "forall",
    "true",
    "false",
}


@dataclass(frozen=True)
class Token:
    kind: str  # 'name' | 'int' | 'string' | 'op' | 'hash' | 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, m.start() - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = m.start() + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text=None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def at_name(self, text: str) -> bool:
        return self.at("name", text)

    def accept(self, kind: str, text=None):
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str, text=None) -> Token:
        tok = self.peek()
        if not self.at(kind, text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.column)
        return self.advance()

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column)

    # -- program ----------------------------------------------------------

    def program(self) -> Program:
        items = []
        while not self.at("eof"):
            items.append(self.item())
        return Program(tuple(items))

    def item(self):
        if self.at_name("Restrict"):
            return self.restrict()
        if self.at_name("Structure"):
            return self.structure()
        if self.at_name("Theorem"):
            return self.theorem()
        if self.at("hash"):
            return self.hash_directive()
        if self.at("name"):
            return self.predicate_def()
        self.fail(f"expected a directive or definition, found {self.peek().text!r}")

    def ident(self) -> str:
        tok = self.expect("name")
        if tok.text in KEYWORDS:
            raise ParseError(f"{tok.text!r} is a reserved word", tok.line, tok.column)
        return tok.text

    def namelist(self) -> list:
        names = [self.ident()]
        while self.accept("op", ","):
            names.append(self.ident())
        return names

    def typetag(self) -> TypeTag:
        name = self.ident()
        args = ()
        if self.accept("op", "("):
            if not self.at("op", ")"):
                args = tuple(self.namelist())
            self.expect("op", ")")
        return TypeTag(name, args)

    def restrict(self) -> RestrictDecl:
        self.expect("name", "Restrict")
        names = self.namelist()
        if not (self.accept("name", "is") or self.accept("name", "are")):
            self.fail("expected 'is' or 'are'")
        ty = self.typetag()
        self.expect("op", ".")
        return RestrictDecl(tuple(names), ty)

    def structure(self) -> StructureDecl:
        self.expect("name", "Structure")
        tag = self.typetag()
        self.expect("name", "defining")
        self.expect("op", "{")
        defs = []
        while not self.at("op", "}"):
            key = self.string()
            self.expect("op", ":")
            defs.append((key, self.call_template()))
            if not self.accept("op", ","):
                break
        self.expect("op", "}")
        self.accept("op", ".")
        return StructureDecl(tag.name, tag.args, tuple(defs))

    def call_template(self) -> CallTemplate:
        target = self.ident()
        self.expect("op", "(")
        slots = []
        if not self.at("op", ")"):
            while True:
                if self.accept("op", "*"):
                    slots.append(None)
                else:
                    tok = self.expect("name")
                    slots.append(None if tok.text == "any" else tok.text)
                if not self.accept("op", ","):
                    break
        self.expect("op", ")")
        return CallTemplate(target, tuple(slots))

    def string(self) -> str:
        tok = self.expect("string")
        body = tok.text[1:-1]
        return body.replace('\\"', '"').replace("\\\\", "\\")

    def theorem(self) -> TheoremDecl:
        self.expect("name", "Theorem")
        self.expect("op", "(")
        name = self.string()
        self.expect("op", ",")
        self.expect("op", "{")
        body = self.pred()
        self.expect("op", "}")
        self.expect("op", ")")
        self.expect("op", ".")
        return TheoremDecl(name, body)

    def hash_directive(self):
        tok = self.expect("hash")
        if tok.text == "#load":
            path = self.string()
            self.expect("name", "as")
            name = self.ident()
            self.expect("op", "(")
            params = ()
            if not self.at("op", ")"):
                params = tuple(self.namelist())
            self.expect("op", ")")
            self.expect("op", ".")
            return LoadDecl(path, name, params)
        if tok.text == "#save_aut":
            path = self.string()
            name = self.ident()
            self.expect("op", ".")
            return SaveDecl(path, name)
        raise ParseError(f"unknown directive {tok.text!r}", tok.line, tok.column)

    def predicate_def(self) -> PredicateDef:
        name = self.ident()
        self.expect("op", "(")
        params = []
        if not self.at("op", ")"):
            while True:
                pname = self.ident()
                ty = None
                if self.accept("op", ":") or self.accept("name", "is"):
                    ty = self.typetag()
                params.append(Param(pname, ty))
                if not self.accept("op", ","):
                    break
        self.expect("op", ")")
        self.expect("op", ":=")
        body = self.pred()
        self.expect("op", ".")
        seen = set()
        for p in params:
            if p.name in seen:
                self.fail(f"duplicate parameter {p.name!r} in {name}")
            seen.add(p.name)
        return PredicateDef(name, tuple(params), body)

    # -- predicates --------------------------------------------------------

    def pred(self) -> Pred:
        return self.iff_pred()

    def iff_pred(self) -> Pred:
        left = self.or_pred()
        while self.accept("op", "<=>"):
            right = self.or_pred()
            left = PIff(left, right)
        return left

    def or_pred(self) -> Pred:
        left = self.and_pred()
        while self.accept("op", "|"):
            left = POr(left, self.and_pred())
        return left

    def and_pred(self) -> Pred:
        left = self.unary_pred()
        while self.accept("op", "&"):
            left = PAnd(left, self.unary_pred())
        return left

    def unary_pred(self) -> Pred:
        if self.accept("op", "!"):
            return PNot(self.unary_pred())
        if self.at_name("exists") or self.at_name("forall"):
            return self.quantifier()
        if self.at_name("if"):
            self.advance()
            cond = self.pred()
            self.expect("name", "then")
            then = self.pred()
            return POr(PNot(cond), then)
        return self.atom_pred()

    def quantifier(self) -> Pred:
        kw = self.advance().text
        names = self.namelist()
        ty = None
        if (
            self.accept("name", "is")
            or self.accept("name", "are")
            or self.accept("name", "in")
            or self.accept("op", ":")
        ):
            ty = self.typetag()
        self.expect("op", ".")
        body = self.pred()
        cls = PExists if kw == "exists" else PForall
        for name in reversed(names):
            body = cls(name, ty, body)
        return body

    _RELOPS = ("<=>",)  # never comparison ops

    def atom_pred(self) -> Pred:
        tok = self.peek()
        if self.accept("name", "true"):
            return PTrue()
        if self.accept("name", "false"):
            return PFalse()
        # word indexing: NAME '[' ...
        if tok.kind == "name" and self.tokens[self.pos + 1].text == "[" and (
            tok.text not in KEYWORDS
        ):
            return self.word_form()
        # try a comparison (covers every expression-led form)
        mark = self.pos
        try:
            return self.comparison()
        except ParseError:
            self.pos = mark
        if self.accept("op", "("):
            inner = self.pred()
            self.expect("op", ")")
            return inner
        self.fail(f"expected a predicate, found {tok.text or 'end of input'!r}")

    def comparison(self) -> Pred:
        left = self.expr()
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("<", "=", "<=", ">", ">=", "!="):
            self.advance()
            right = self.expr()
            return self._relation(tok.text, left, right)
        if isinstance(left, ECall):
            return PCall(left.name, left.args)
        self.fail("expected a relational operator")

    @staticmethod
    def _relation(op: str, a: E, b: E) -> Pred:
        if op == "<":
            return PLess(a, b)
        if op == "=":
            return PEqual(a, b)
        if op == "<=":
            return POr(PLess(a, b), PEqual(a, b))
        if op == ">":
            return PLess(b, a)
        if op == ">=":
            return POr(PLess(b, a), PEqual(a, b))
        if op == "!=":
            return PNot(PEqual(a, b))
        raise AssertionError(op)

    def word_form(self) -> Pred:
        lword = self.ident()
        self.expect("op", "[")
        i = self.expr()
        if self.accept("op", ".."):
            j = self.expr()
            self.expect("op", "]")
            self.expect("op", "=")
            rword = self.ident()
            self.expect("op", "[")
            k = self.expr()
            self.expect("op", "..")
            l = self.expr()
            self.expect("op", "]")
            return PFactorEq(lword, i, j, rword, k, l)
        self.expect("op", "]")
        left = WordIndex(lword, i)
        if self.accept("op", "="):
            negated = False
        elif self.accept("op", "!="):
            negated = True
        else:
            self.fail("expected '=' or '!=' after word index")
        if self.at("int"):
            tok = self.advance()
            if tok.text not in ("0", "1"):
                raise ParseError(
                    "a word letter must be 0 or 1", tok.line, tok.column
                )
            return PWordEq(left, int(tok.text), negated)
        rword = self.ident()
        self.expect("op", "[")
        j = self.expr()
        self.expect("op", "]")
        return PWordEq(left, WordIndex(rword, j), negated)

    # -- expressions -------------------------------------------------------

    def expr(self) -> E:
        left = self.term()
        while True:
            if self.accept("op", "+"):
                left = EAdd(left, self.term())
            elif self.accept("op", "-"):
                left = ESub(left, self.term())
            else:
                return left

    def term(self) -> E:
        left = self.expr_atom()
        while self.accept("op", "*"):
            right = self.expr_atom()
            if isinstance(left, EInt) and isinstance(right, EInt):
                left = EInt(left.value * right.value)
            elif isinstance(left, EInt):
                left = EMul(left.value, right)
            elif isinstance(right, EInt):
                left = EMul(right.value, left)
            else:
                self.fail("multiplication needs a literal factor")
        return left

    def expr_atom(self) -> E:
        if self.at("int"):
            return EInt(int(self.advance().text))
        if self.at("name") and self.peek().text not in KEYWORDS:
            name = self.advance().text
            if self.accept("op", "("):
                args = []
                if not self.at("op", ")"):
                    args.append(self.expr())
                    while self.accept("op", ","):
                        args.append(self.expr())
                self.expect("op", ")")
                return ECall(name, tuple(args))
            return EVar(name)
        if self.accept("op", "("):
            inner = self.expr()
            self.expect("op", ")")
            return inner
        self.fail(f"expected an expression, found {self.peek().text or 'end of input'!r}")


def parse(text: str) -> Program:
    """Parse a whole source file."""
    return _Parser(text).program()


def parse_pred(text: str) -> Pred:
    """Parse a single predicate (used by tests and tools)."""
    p = _Parser(text)
    body = p.pred()
    if not p.at("eof"):
        p.fail("trailing input after predicate")
    return body
