"""Canonical text rendering for terms and judgments.

The printer emits minimal parentheses per the precedence tables the parser
uses, so ``parse(print(t)) = t`` for every well-sorted term.  Output is built
from :class:`Piece` values so callers that need annotated spans (rule
documentation, UI highlighting) can keep the mapping from characters back to
term paths; plain callers just join the text.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .terms import (
    Abbrev, And, App, Atom, Bind, BoolLit, Ctx, EvalJ, Entail, Falsum, Fun,
    Hole, If, Implies, JHole, Judgment, Let, Not, NumLit, Or, Path, Plus,
    Subst, TArrow, TBool, TNum, Term, Typing, Var,
)


@dataclass(frozen=True)
class Piece:
    """One run of output text tied to the innermost term that produced it.

    ``metavar`` is set when the text stands for a schema metavariable
    occurrence (rule documentation rendering).
    """
    text: str
    path: Path
    metavar: Optional[str] = None


# Precedence levels; higher binds tighter.  A child is parenthesized when its
# own level is below the minimum its position requires.
_EXPR_PREC = {Fun: 0, Let: 0, If: 0, Plus: 1, App: 2}
_PROP_PREC = {Implies: 0, Or: 1, And: 2, Not: 3}
_TYPE_PREC = {TArrow: 0}
_ATOM = 9


def _prec(t: Term) -> int:
    for table in (_EXPR_PREC, _PROP_PREC, _TYPE_PREC):
        p = table.get(type(t))
        if p is not None:
            return p
    return _ATOM


def _name_text(name) -> str:
    # Metavar objects in schema positions render as their name.
    return name if isinstance(name, str) else name.name


def _name_meta(name) -> Optional[str]:
    return None if isinstance(name, str) else name.name


def term_pieces(t: Term, min_prec: int = 0, path: Path = ()) -> list[Piece]:
    out: list[Piece] = []
    _pieces(t, min_prec, path, out)
    return out


def _lit(out: list[Piece], text: str, path: Path, metavar: Optional[str] = None) -> None:
    out.append(Piece(text, path, metavar))


def _pieces(t: Term, min_prec: int, path: Path, out: list[Piece]) -> None:
    # Schema-only forms are registered lazily to avoid import cycles.
    from .rules import CtxExt, MetaRef

    if isinstance(t, MetaRef):
        _lit(out, t.var.name, path, t.var.name)
        return

    wrap = _prec(t) < min_prec
    if wrap:
        _lit(out, "(", path)

    if isinstance(t, Var):
        _lit(out, _name_text(t.name), path, _name_meta(t.name))
    elif isinstance(t, NumLit):
        if isinstance(t.value, int):
            _lit(out, str(t.value), path)
        else:
            _lit(out, t.value.name, path, t.value.name)
    elif isinstance(t, BoolLit):
        _lit(out, "true" if t.value else "false", path)
    elif isinstance(t, Plus):
        _pieces(t.left, 1, path + (0,), out)
        _lit(out, " + ", path)
        _pieces(t.right, 2, path + (1,), out)
    elif isinstance(t, If):
        _lit(out, "if ", path)
        _pieces(t.cond, 0, path + (0,), out)
        _lit(out, " then ", path)
        _pieces(t.then_branch, 0, path + (1,), out)
        _lit(out, " else ", path)
        _pieces(t.else_branch, 0, path + (2,), out)
    elif isinstance(t, Fun):
        _lit(out, "fun ", path)
        _lit(out, _name_text(t.param), path, _name_meta(t.param))
        _lit(out, ":", path)
        _pieces(t.param_ty, 0, path + (0,), out)
        _lit(out, " -> ", path)
        _pieces(t.body, 0, path + (1,), out)
    elif isinstance(t, App):
        _pieces(t.func, 2, path + (0,), out)
        _lit(out, " ", path)
        _pieces(t.arg, 3, path + (1,), out)
    elif isinstance(t, Let):
        _lit(out, "let ", path)
        _lit(out, _name_text(t.name), path, _name_meta(t.name))
        _lit(out, " = ", path)
        _pieces(t.bound, 0, path + (0,), out)
        _lit(out, " in ", path)
        _pieces(t.body, 0, path + (1,), out)
    elif isinstance(t, TNum):
        _lit(out, "Num", path)
    elif isinstance(t, TBool):
        _lit(out, "Bool", path)
    elif isinstance(t, TArrow):
        _pieces(t.arg, 1, path + (0,), out)
        _lit(out, " -> ", path)
        _pieces(t.result, 0, path + (1,), out)
    elif isinstance(t, Atom):
        _lit(out, t.name, path)
    elif isinstance(t, And):
        _pieces(t.left, 2, path + (0,), out)
        _lit(out, " /\\ ", path)
        _pieces(t.right, 3, path + (1,), out)
    elif isinstance(t, Or):
        _pieces(t.left, 1, path + (0,), out)
        _lit(out, " \\/ ", path)
        _pieces(t.right, 2, path + (1,), out)
    elif isinstance(t, Implies):
        _pieces(t.left, 1, path + (0,), out)
        _lit(out, " => ", path)
        _pieces(t.right, 0, path + (1,), out)
    elif isinstance(t, Not):
        _lit(out, "~", path)
        _pieces(t.operand, 3, path + (0,), out)
    elif isinstance(t, Falsum):
        _lit(out, "_|_", path)
    elif isinstance(t, Ctx):
        _lit(out, "[", path)
        for i, e in enumerate(t.entries):
            if i:
                _lit(out, ", ", path)
            _pieces(e, 0, path + (i,), out)
        _lit(out, "]", path)
    elif isinstance(t, Bind):
        _lit(out, _name_text(t.name), path, _name_meta(t.name))
        _lit(out, ":", path)
        _pieces(t.ty, 0, path + (0,), out)
    elif isinstance(t, Hole):
        _lit(out, "?", path)
    elif isinstance(t, Abbrev):
        _lit(out, "$" + t.name, path)
    elif isinstance(t, Subst):
        # Verifier-internal form; shown in rule docs, never parsed back.
        _lit(out, "[", path)
        _pieces(t.value, 0, path + (1,), out)
        _lit(out, "/", path)
        _lit(out, _name_text(t.var), path, _name_meta(t.var))
        _lit(out, "]", path)
        _pieces(t.body, 3, path + (0,), out)
    elif isinstance(t, CtxExt):
        _pieces(t.base, 0, path + (0,), out)
        _lit(out, ", ", path)
        _pieces(t.entry, 0, path + (1,), out)
    else:
        raise TypeError(f"unprintable term {t!r}")

    if wrap:
        _lit(out, ")", path)


def judgment_pieces(j: Judgment) -> list[Piece]:
    out: list[Piece] = []
    if isinstance(j, JHole):
        _lit(out, "?", ())
    elif isinstance(j, Typing):
        _pieces(j.ctx, 0, (0,), out)
        _lit(out, " |- ", ())
        _pieces(j.expr, 0, (1,), out)
        _lit(out, " : ", ())
        _pieces(j.ty, 0, (2,), out)
    elif isinstance(j, EvalJ):
        _pieces(j.expr, 0, (0,), out)
        _lit(out, " evalto ", ())
        _pieces(j.value, 0, (1,), out)
    elif isinstance(j, Entail):
        _pieces(j.ctx, 0, (0,), out)
        _lit(out, " |- ", ())
        _pieces(j.prop, 0, (1,), out)
    else:
        raise TypeError(f"unprintable judgment {j!r}")
    return out


def print_term(t: Term) -> str:
    return "".join(p.text for p in term_pieces(t))


def print_judgment(j: Judgment) -> str:
    return "".join(p.text for p in judgment_pieces(j))


# Head phrases for error messages: what kind of thing a constructor is.
_PHRASES: dict[type, str] = {
    Var: "a variable",
    NumLit: "a number",
    BoolLit: "a boolean literal",
    Plus: "an addition",
    If: "an if-expression",
    Fun: "a function term",
    App: "an application",
    Let: "a let-expression",
    TNum: "the type Num",
    TBool: "the type Bool",
    TArrow: "a function type",
    Atom: "an atomic proposition",
    And: "a conjunction",
    Or: "a disjunction",
    Implies: "an implication",
    Not: "a negation",
    Falsum: "absurdity",
    Ctx: "a context",
    Bind: "a binding",
    Hole: "a hole",
    Abbrev: "an abbreviation",
    Subst: "a substitution",
}

# Leaves read better printed than described.
_PRINT_AS_FOUND = (Var, NumLit, BoolLit, TNum, TBool, Atom, Falsum, Ctx, Hole, Abbrev)


def head_phrase(t: Term) -> str:
    from .rules import CtxExt, MetaRef
    if isinstance(t, MetaRef):
        return t.var.name
    if isinstance(t, CtxExt):
        return "a non-empty context"
    return _PHRASES.get(type(t), "a term")


def describe_found(t: Term) -> str:
    """How a subject subterm is cited in an error message."""
    if isinstance(t, _PRINT_AS_FOUND):
        return print_term(t)
    return head_phrase(t)
