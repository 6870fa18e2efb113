"""Text syntax for terms, judgments, and whole derivation documents.

Hand-written tokenizer and recursive-descent parser.  The grammar mirrors
the printer exactly, so printing and reparsing is the identity on every
well-sorted term, and the canonical document form round-trips up to node
ids.  All errors carry a 1-based, end-exclusive source span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DerivError
from .document import (
    AbbrevDef,
    DerivNode,
    DerivationDoc,
    FEEDBACK_FULL,
    FEEDBACK_SILENT,
    RULE_HOLE,
    Applied,
    RuleApp,
    SubtreeDef,
    SubtreeUse,
    validate_document,
)
from .systems import get_system
from .terms import (
    Abbrev,
    And,
    App,
    Atom,
    Bind,
    BoolLit,
    Ctx,
    Entail,
    EvalJ,
    Falsum,
    Fun,
    Hole,
    If,
    Implies,
    JHole,
    Judgment,
    KIND_ENTAIL,
    KIND_EVAL,
    KIND_TYPING,
    Let,
    Not,
    NumLit,
    Or,
    Plus,
    TArrow,
    TBool,
    TNum,
    Term,
    Typing,
    Var,
    check_judgment,
)


@dataclass(frozen=True)
class SrcSpan:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class ParseError(DerivError):
    def __init__(self, message: str, span: SrcSpan, progress: int = 0):
        self.span = span
        self.progress = progress
        super().__init__(message)


RESERVED = frozenset(
    "fun let in if then else true false Num Bool evalto "
    "by use def subtree derive system feedback".split())

_TOKEN_RE = re.compile(
    r"""(?P<WS>[ \t\r\n]+)
      | (?P<COMMENT>\#[^\n]*)
      | (?P<NUM>\d+)
      | (?P<FALSUM>_\|_)
      | (?P<WORD>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<SYM>\|-|/\\|\\/|=>|->|[()\[\],:+?$=~])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # NUM | WORD | SYM | EOF
    text: str
    span: SrcSpan


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    toks: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SrcSpan(line, col, line, col + 1)
            raise ParseError(f"stray character {text[pos]!r}", span)
        kind = m.lastgroup
        lexeme = m.group()
        if kind in ("WS", "COMMENT"):
            nl = lexeme.count("\n")
            if nl:
                line += nl
                col = len(lexeme) - lexeme.rfind("\n")
            else:
                col += len(lexeme)
        else:
            span = SrcSpan(line, col, line, col + len(lexeme))
            if kind == "FALSUM":
                kind = "SYM"
            toks.append(Token(kind, lexeme, span))
            col += len(lexeme)
        pos = m.end()
    toks.append(Token("EOF", "", SrcSpan(line, col, line, col)))
    return toks


class _P:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def at_sym(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "SYM" and t.text == text

    def at_word(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "WORD" and t.text == text

    def save(self) -> int:
        return self.i

    def restore(self, i: int) -> None:
        self.i = i

    def error(self, expected: str) -> "ParseError":
        t = self.peek()
        found = repr(t.text) if t.kind != "EOF" else "end of input"
        return ParseError(f"expected {expected}, found {found}", t.span, self.i)

    def expect_sym(self, text: str) -> Token:
        if not self.at_sym(text):
            raise self.error(f"{text!r}")
        return self.next()

    def expect_word(self, text: str) -> Token:
        if not self.at_word(text):
            raise self.error(f"{text!r}")
        return self.next()

    def ident(self, what: str = "a name") -> str:
        t = self.peek()
        if t.kind != "WORD" or t.text in RESERVED:
            raise self.error(what)
        self.next()
        return t.text

    def expect_eof(self) -> None:
        if self.peek().kind != "EOF":
            raise self.error("end of input")


# --------------------------------------------------------------------------
# expressions


def _expr(p: _P) -> Term:
    t = p.peek()
    if t.kind == "WORD":
        if t.text == "fun":
            return _fun(p)
        if t.text == "let":
            return _let(p)
        if t.text == "if":
            return _if(p)
    return _plus(p)


def _plus(p: _P) -> Term:
    left = _app(p)
    while p.at_sym("+"):
        p.next()
        left = Plus(left, _app(p))
    return left


def _app(p: _P) -> Term:
    f = _expr_atom(p)
    while _starts_expr_atom(p):
        f = App(f, _expr_atom(p))
    return f


def _starts_expr_atom(p: _P) -> bool:
    t = p.peek()
    if t.kind == "NUM":
        return True
    if t.kind == "WORD":
        return t.text in ("true", "false") or t.text not in RESERVED
    return t.kind == "SYM" and t.text in ("(", "?", "$")


def _expr_atom(p: _P) -> Term:
    t = p.peek()
    if t.kind == "NUM":
        p.next()
        return NumLit(int(t.text))
    if t.kind == "WORD":
        if t.text == "true":
            p.next()
            return BoolLit(True)
        if t.text == "false":
            p.next()
            return BoolLit(False)
        if t.text not in RESERVED:
            p.next()
            return Var(t.text)
        raise p.error("an expression")
    if p.at_sym("("):
        p.next()
        e = _expr(p)
        p.expect_sym(")")
        return e
    if p.at_sym("?"):
        p.next()
        return Hole()
    if p.at_sym("$"):
        p.next()
        return Abbrev(p.ident("an abbreviation name"))
    raise p.error("an expression")


def _fun(p: _P) -> Term:
    p.expect_word("fun")
    name = p.ident("a parameter name")
    p.expect_sym(":")
    # The annotation is read greedily, giving arrows back until one is left
    # to separate the body: in `fun f:Num -> Num -> f 1` the type is
    # Num -> Num and the body is f 1.
    atoms = [_type_atom(p)]
    saves: list[int] = []
    while p.at_sym("->"):
        mark = p.save()
        p.next()
        try:
            atoms.append(_type_atom(p))
        except ParseError:
            p.restore(mark)
            break
        saves.append(mark)
    if not p.at_sym("->") and len(atoms) > 1:
        p.restore(saves[-1])
        atoms.pop()
    p.expect_sym("->")
    body = _expr(p)
    ty = atoms[-1]
    for a in reversed(atoms[:-1]):
        ty = TArrow(a, ty)
    return Fun(name, ty, body)


def _let(p: _P) -> Term:
    p.expect_word("let")
    name = p.ident("a variable name")
    p.expect_sym("=")
    bound = _expr(p)
    p.expect_word("in")
    return Let(name, bound, _expr(p))


def _if(p: _P) -> Term:
    p.expect_word("if")
    cond = _expr(p)
    p.expect_word("then")
    then_branch = _expr(p)
    p.expect_word("else")
    return If(cond, then_branch, _expr(p))


# --------------------------------------------------------------------------
# types


def _type(p: _P) -> Term:
    left = _type_atom(p)
    if p.at_sym("->"):
        p.next()
        return TArrow(left, _type(p))
    return left


def _type_atom(p: _P) -> Term:
    if p.at_word("Num"):
        p.next()
        return TNum()
    if p.at_word("Bool"):
        p.next()
        return TBool()
    if p.at_sym("("):
        p.next()
        t = _type(p)
        p.expect_sym(")")
        return t
    if p.at_sym("?"):
        p.next()
        return Hole()
    if p.at_sym("$"):
        p.next()
        return Abbrev(p.ident("an abbreviation name"))
    raise p.error("a type")


# --------------------------------------------------------------------------
# propositions


def _prop(p: _P) -> Term:
    left = _or(p)
    if p.at_sym("=>"):
        p.next()
        return Implies(left, _prop(p))
    return left


def _or(p: _P) -> Term:
    left = _and(p)
    while p.at_sym("\\/"):
        p.next()
        left = Or(left, _and(p))
    return left


def _and(p: _P) -> Term:
    left = _neg(p)
    while p.at_sym("/\\"):
        p.next()
        left = And(left, _neg(p))
    return left


def _neg(p: _P) -> Term:
    if p.at_sym("~"):
        p.next()
        return Not(_neg(p))
    return _prop_atom(p)


def _prop_atom(p: _P) -> Term:
    t = p.peek()
    if t.kind == "SYM" and t.text == "_|_":
        p.next()
        return Falsum()
    if t.kind == "WORD" and t.text not in RESERVED:
        p.next()
        return Atom(t.text)
    if p.at_sym("("):
        p.next()
        inner = _prop(p)
        p.expect_sym(")")
        return inner
    if p.at_sym("?"):
        p.next()
        return Hole()
    if p.at_sym("$"):
        p.next()
        return Abbrev(p.ident("an abbreviation name"))
    raise p.error("a proposition")


# --------------------------------------------------------------------------
# contexts and judgments


def _binding(p: _P) -> Term:
    if p.at_sym("?"):
        p.next()
        return Hole()
    name = p.ident("a variable name")
    p.expect_sym(":")
    return Bind(name, _type(p))


def _ctx(p: _P, flavor: str) -> Term:
    if p.at_sym("?"):
        p.next()
        return Hole()
    if p.at_sym("$"):
        p.next()
        return Abbrev(p.ident("an abbreviation name"))
    p.expect_sym("[")
    entries: list[Term] = []
    if not p.at_sym("]"):
        while True:
            if flavor == "ctx.typing":
                entries.append(_binding(p))
            else:
                entries.append(_prop(p))
            if not p.at_sym(","):
                break
            p.next()
    p.expect_sym("]")
    return Ctx(tuple(entries))


def _judgment(p: _P, kind: str) -> Judgment:
    if p.at_sym("?") and p.peek(1).kind == "EOF":
        p.next()
        return JHole()
    if kind == KIND_TYPING:
        ctx = _ctx(p, "ctx.typing")
        p.expect_sym("|-")
        e = _expr(p)
        p.expect_sym(":")
        return Typing(ctx, e, _type(p))
    if kind == KIND_EVAL:
        e = _expr(p)
        p.expect_word("evalto")
        return EvalJ(e, _expr(p))
    if kind == KIND_ENTAIL:
        ctx = _ctx(p, "ctx.logic")
        p.expect_sym("|-")
        return Entail(ctx, _prop(p))
    raise ValueError(f"unknown judgment kind {kind!r}")


_TERM_PARSERS: dict[str, Callable[[_P], Term]] = {
    "expr": _expr,
    "type": _type,
    "prop": _prop,
    "binding": _binding,
    "ctx.typing": lambda p: _ctx(p, "ctx.typing"),
    "ctx.logic": lambda p: _ctx(p, "ctx.logic"),
}


def parse_term(text: str, kind: str, line: int = 1, col: int = 1) -> Term:
    """Parse one term of the given sort; raises ParseError."""
    p = _P(tokenize(text, line, col))
    if kind == "num":
        t = _expr(p)
        if not isinstance(t, (NumLit, Hole, Abbrev)):
            raise ParseError("expected a numeral", p.toks[0].span)
    else:
        fn = _TERM_PARSERS.get(kind)
        if fn is None:
            raise ValueError(f"unknown term sort {kind!r}")
        t = fn(p)
    p.expect_eof()
    return t


def parse_judgment(text: str, kind: str, line: int = 1, col: int = 1) -> Judgment:
    p = _P(tokenize(text, line, col))
    j = _judgment(p, kind)
    p.expect_eof()
    return j


# --------------------------------------------------------------------------
# documents


_BY_RE = re.compile(r"\bby\b")
_USE_RE = re.compile(r"use\s+([A-Za-z_][A-Za-z0-9_']*)\Z")


@dataclass
class _Line:
    no: int
    indent: int
    content: str


@dataclass
class _MNode:
    id: str
    judgment: Judgment
    applied: Applied
    span: SrcSpan
    depth: int
    children: list["_MNode"] = field(default_factory=list)


def _freeze(n: _MNode, spans: dict[str, SrcSpan]) -> DerivNode:
    spans[n.id] = n.span
    return DerivNode(n.id, n.judgment, n.applied,
                     tuple(_freeze(c, spans) for c in n.children))


def _line_span(line_no: int, start_col: int, text: str) -> SrcSpan:
    return SrcSpan(line_no, start_col, line_no, start_col + len(text))


def _try_term_kinds(text: str, kinds: tuple[str, ...], line: int, col: int) -> Term:
    best: Optional[ParseError] = None
    for k in kinds:
        try:
            return parse_term(text, k, line, col)
        except ParseError as e:
            if best is None or e.progress >= best.progress:
                best = e
    assert best is not None
    raise best


class _DocParser:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        self.system = None
        self.system_id = ""
        self.feedback = FEEDBACK_FULL
        self.feedback_seen = False
        self.prelude: list[AbbrevDef] = []
        self.defs: dict[str, Term] = {}
        self.subtrees: list[SubtreeDef] = []
        self.sub_names: set[str] = set()
        self.root: Optional[DerivNode] = None
        self.spans: dict[str, SrcSpan] = {}
        self.counter = 0
        # open block state
        self.block: Optional[str] = None  # subtree name or "derive"
        self.block_root: Optional[_MNode] = None
        self.stack: list[_MNode] = []

    def fail(self, msg: str, line_no: int, col: int = 1, text: str = "") -> ParseError:
        return ParseError(msg, _line_span(line_no, col, text or " "))

    # -- block lifecycle

    def close_block(self, line_no: int) -> None:
        if self.block is None:
            return
        if self.block_root is None:
            raise self.fail("empty derivation block", line_no)
        tree = _freeze(self.block_root, self.spans)
        if self.block == "derive":
            self.root = tree
        else:
            self.subtrees.append(SubtreeDef(self.block, tree))
            self.sub_names.add(self.block)
        self.block = None
        self.block_root = None
        self.stack = []

    def open_block(self, name: str, line_no: int) -> None:
        self.close_block(line_no)
        if self.root is not None:
            raise self.fail("the derive block must come last", line_no)
        self.block = name
        self.block_root = None
        self.stack = []

    # -- headers

    def header(self, ln: _Line) -> None:
        # System ids contain hyphens, which are not term tokens, so the
        # system line is handled textually before anything is tokenized.
        first = ln.content.split(None, 1)[0]
        if first == "system":
            if self.system is not None:
                raise self.fail("system may only appear once, first", ln.no, 1, ln.content)
            self.system_id = ln.content[len("system"):].strip()
            if not self.system_id:
                raise self.fail("expected a system name", ln.no, 1, ln.content)
            try:
                self.system = get_system(self.system_id)
            except DerivError as e:
                raise self.fail(str(e), ln.no, 1, ln.content)
            return

        if self.system is None:
            raise self.fail("the document must start with a system line", ln.no, 1, ln.content)

        p = _P(tokenize(ln.content, ln.no, 1))
        t = p.peek()
        if t.kind != "WORD":
            raise p.error("a document keyword")

        if t.text == "feedback":
            if self.feedback_seen or self.block is not None or self.root is not None:
                raise self.fail("feedback may only appear once, before any block", ln.no)
            p.next()
            flag = p.peek()
            if flag.kind != "WORD" or flag.text not in (FEEDBACK_FULL, FEEDBACK_SILENT):
                raise p.error("'full' or 'silent'")
            p.next()
            p.expect_eof()
            self.feedback = flag.text
            self.feedback_seen = True
            return

        if t.text == "def":
            if self.block is not None or self.subtrees or self.root is not None:
                raise self.fail("definitions must precede derivation blocks", ln.no)
            p.next()
            name_tok = p.peek()
            name = p.ident("an abbreviation name")
            eq = p.expect_sym("=")
            if name in self.defs:
                raise ParseError(f"name {name!r} is already defined", name_tok.span)
            rest_col = eq.span.end_col
            rest = ln.content[rest_col - 1:]
            if not rest.strip():
                raise ParseError("expected a term after '='", eq.span)
            kinds = (("ctx.typing", "type", "expr") if self.system.kind in (KIND_TYPING, KIND_EVAL)
                     else ("ctx.logic", "prop"))
            term = _try_term_kinds(rest, kinds, ln.no, rest_col)
            try:
                from .document import _expand
                self.defs[name] = _expand(term, self.defs)
            except DerivError as e:
                raise self.fail(str(e), ln.no, rest_col, rest)
            self.prelude.append(AbbrevDef(name, term))
            return

        if t.text == "subtree":
            p.next()
            name_tok = p.peek()
            name = p.ident("a subtree name")
            p.expect_sym(":")
            p.expect_eof()
            if name in self.sub_names:
                raise ParseError(f"name {name!r} is already defined", name_tok.span)
            self.open_block(name, ln.no)
            return

        if t.text == "derive":
            p.next()
            p.expect_sym(":")
            p.expect_eof()
            self.open_block("derive", ln.no)
            return

        raise p.error("one of system, feedback, def, subtree, derive")

    # -- tree lines

    def tree_line(self, ln: _Line) -> None:
        if self.block is None:
            raise self.fail("indented line outside a derivation block",
                            ln.no, ln.indent + 1, ln.content)
        if ln.indent % 2:
            raise self.fail("indentation must be in steps of two spaces",
                            ln.no, 1, ln.content)
        depth = ln.indent // 2
        if self.block_root is None:
            if depth != 1:
                raise self.fail("the first line of a block must be indented two spaces",
                                ln.no, 1, ln.content)
        else:
            if depth > self.stack[-1].depth + 1:
                raise self.fail("indentation jumps more than one level",
                                ln.no, 1, ln.content)
        while self.stack and self.stack[-1].depth >= depth:
            self.stack.pop()
        if depth > 1 and not self.stack:
            raise self.fail("indentation jumps more than one level", ln.no, 1, ln.content)
        if depth == 1 and self.block_root is not None:
            raise self.fail("a block can only have one root line", ln.no, 1, ln.content)
        parent = self.stack[-1] if self.stack else None
        if parent is not None and isinstance(parent.applied, SubtreeUse):
            raise self.fail("a subtree reference takes no premises",
                            ln.no, ln.indent + 1, ln.content)

        m = _BY_RE.search(ln.content)
        jtext = ln.content[:m.start()] if m else ln.content
        rtext = ln.content[m.end():].strip() if m else None
        if not jtext.strip():
            raise self.fail("missing judgment", ln.no, ln.indent + 1, "by")

        if jtext.strip() == "?":
            judgment: Judgment = JHole()
        else:
            judgment = parse_judgment(jtext.rstrip(), self.system.kind, ln.no, ln.indent + 1)
            try:
                from .document import _expand
                from dataclasses import replace as _dc_replace
                from .terms import JUDGMENT_SLOTS
                updates = {s: _expand(getattr(judgment, s), self.defs)
                           for s in JUDGMENT_SLOTS[type(judgment)]}
                check_judgment(_dc_replace(judgment, **updates), self.system.kind)
            except DerivError as e:
                raise ParseError(str(e), _line_span(ln.no, ln.indent + 1, jtext.rstrip()))

        applied: Applied = RULE_HOLE
        if rtext is not None and rtext != "?":
            use = _USE_RE.fullmatch(rtext)
            if use:
                target = use.group(1)
                if target not in self.sub_names:
                    raise self.fail(f"unknown subtree {target!r}", ln.no,
                                    ln.indent + 1, ln.content)
                applied = SubtreeUse(target)
            elif rtext == "" or rtext == "use" or rtext.startswith("use "):
                raise self.fail("expected a rule name or subtree reference after by",
                                ln.no, ln.indent + 1, ln.content)
            else:
                applied = RuleApp(rtext)

        node = _MNode(f"n{self.counter}", judgment, applied,
                      _line_span(ln.no, ln.indent + 1, ln.content), depth)
        self.counter += 1
        if parent is None:
            self.block_root = node
        else:
            parent.children.append(node)
        self.stack.append(node)

    # -- driver

    def run(self) -> tuple[DerivationDoc, dict[str, SrcSpan]]:
        last_no = 1
        for no, raw in enumerate(self.lines, 1):
            last_no = no
            hash_at = raw.find("#")
            if hash_at >= 0:
                raw = raw[:hash_at]
            if not raw.strip():
                continue
            if "\t" in raw[:len(raw) - len(raw.lstrip())]:
                raise self.fail("tabs are not allowed in indentation", no, 1, raw)
            indent = len(raw) - len(raw.lstrip(" "))
            content = raw[indent:].rstrip()
            if indent == 0:
                self.header(_Line(no, 0, content))
            else:
                self.tree_line(_Line(no, indent, content))
        self.close_block(last_no)
        if self.system is None:
            raise self.fail("the document must start with a system line", last_no)
        if self.root is None:
            raise self.fail("missing derive block", last_no)
        doc = DerivationDoc(self.system_id, self.feedback, tuple(self.prelude),
                            tuple(self.subtrees), self.root, self.counter)
        try:
            validate_document(doc)
        except DerivError as e:
            raise ParseError(str(e), SrcSpan(1, 1, 1, 2))
        return doc, self.spans


def parse_document_with_spans(text: str) -> tuple[DerivationDoc, dict[str, SrcSpan]]:
    return _DocParser(text).run()


def parse_document(text: str) -> DerivationDoc:
    return _DocParser(text).run()[0]
