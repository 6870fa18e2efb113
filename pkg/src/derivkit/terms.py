"""Unified term and judgment representation with typed holes.

One ``Term`` tree covers every sort the built-in systems need: expressions,
types, propositions, contexts, plus the editor forms (``Hole``, ``Abbrev``,
``Subst``).  Judgments wrap terms into complete claims.  Everything here is
immutable and every operation is a pure function, so values can be shared
freely.

Comparison is three-valued (:func:`eq3`): holes block a decision instead of
failing it, which is what lets partially built derivations stay checkable.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Iterator, Optional, Union

from .errors import OpenValue, PathOutOfRange, SortMismatch

if TYPE_CHECKING:
    from .rules import Metavar

# A path is a sequence of 0-based child indices.  On a judgment the first
# step selects the slot (Typing: 0=ctx, 1=expr, 2=ty; Eval: 0=expr, 1=value;
# Entail: 0=ctx, 1=prop).
Path = tuple[int, ...]


class Term:
    """Base class of all term constructors."""

    __slots__ = ()


# --- expression forms -------------------------------------------------------

@dataclass(frozen=True)
class Var(Term):
    """Variable reference: x"""
    name: "str | Metavar"


@dataclass(frozen=True)
class NumLit(Term):
    """Integer literal (arbitrary precision): 42"""
    value: "int | Metavar"


@dataclass(frozen=True)
class BoolLit(Term):
    """Boolean literal: true / false"""
    value: bool


@dataclass(frozen=True)
class Plus(Term):
    """Addition: e1 + e2"""
    left: Term
    right: Term


@dataclass(frozen=True)
class If(Term):
    """Conditional: if e1 then e2 else e3"""
    cond: Term
    then_branch: Term
    else_branch: Term


@dataclass(frozen=True)
class Fun(Term):
    """Function literal: fun x : T -> e"""
    param: "str | Metavar"
    param_ty: Term
    body: Term


@dataclass(frozen=True)
class App(Term):
    """Application: e1 e2"""
    func: Term
    arg: Term


@dataclass(frozen=True)
class Let(Term):
    """Let binding: let x = e1 in e2"""
    name: "str | Metavar"
    bound: Term
    body: Term


# --- type forms --------------------------------------------------------------

@dataclass(frozen=True)
class TNum(Term):
    """Number type: Num"""


@dataclass(frozen=True)
class TBool(Term):
    """Boolean type: Bool"""


@dataclass(frozen=True)
class TArrow(Term):
    """Function type: T1 -> T2"""
    arg: Term
    result: Term


# --- proposition forms -------------------------------------------------------

@dataclass(frozen=True)
class Atom(Term):
    """Atomic proposition: A"""
    name: str


@dataclass(frozen=True)
class And(Term):
    r"""Conjunction: p /\ q"""
    left: Term
    right: Term


@dataclass(frozen=True)
class Or(Term):
    r"""Disjunction: p \/ q"""
    left: Term
    right: Term


@dataclass(frozen=True)
class Implies(Term):
    """Implication: p => q"""
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Term):
    """Negation: ~p"""
    operand: Term


@dataclass(frozen=True)
class Falsum(Term):
    """Absurdity: _|_"""


# --- context forms -----------------------------------------------------------

@dataclass(frozen=True)
class Bind(Term):
    """Typed context entry: x : T.  Only legal directly inside a Ctx."""
    name: "str | Metavar"
    ty: Term


@dataclass(frozen=True)
class Ctx(Term):
    """Ordered context: [x : Num, y : Bool] or [A, A => B].

    Entries are ``Bind`` terms (typing), bare propositions (logic), or
    holes.  Duplicate names are allowed; the rightmost binding shadows.
    """
    entries: tuple[Term, ...] = ()


# --- editor forms ------------------------------------------------------------

@dataclass(frozen=True)
class Hole(Term):
    """Anonymous typed hole: ?"""


@dataclass(frozen=True)
class Abbrev(Term):
    """Reference to a prelude definition: $name"""
    name: str


@dataclass(frozen=True)
class Subst(Term):
    """Pending substitution [v/x]e.

    Never appears in user-authored judgments; the verifier produces it when
    instantiating rule premises that substitute an argument into a body.
    """
    body: Term
    var: "str | Metavar"
    value: Term


# --- judgments ---------------------------------------------------------------

class Judgment:
    """Base class of complete claims."""

    __slots__ = ()


@dataclass(frozen=True)
class Typing(Judgment):
    """ctx |- e : T"""
    ctx: Term
    expr: Term
    ty: Term


@dataclass(frozen=True)
class EvalJ(Judgment):
    """e evalto v"""
    expr: Term
    value: Term


@dataclass(frozen=True)
class Entail(Judgment):
    """ctx |- p"""
    ctx: Term
    prop: Term


@dataclass(frozen=True)
class JHole(Judgment):
    """A judgment that is entirely a hole."""


JUDGMENT_SLOTS: dict[type, tuple[str, ...]] = {
    Typing: ("ctx", "expr", "ty"),
    EvalJ: ("expr", "value"),
    Entail: ("ctx", "prop"),
    JHole: (),
}

# Judgment kind names, used by rule systems and the parser.
KIND_TYPING = "typing"
KIND_EVAL = "eval"
KIND_ENTAIL = "entail"

JUDGMENT_KIND: dict[type, str] = {Typing: KIND_TYPING, EvalJ: KIND_EVAL, Entail: KIND_ENTAIL}
KIND_CLASS = {v: k for k, v in JUDGMENT_KIND.items()}


# --- three-valued results ----------------------------------------------------

@dataclass(frozen=True)
class Yes:
    """Definite success; ``value`` carries a payload for lookups."""
    value: Optional[Term] = None


@dataclass(frozen=True)
class No:
    """Definite failure; ``witness`` is the first mismatching position."""
    witness: Path = ()


@dataclass(frozen=True)
class Unknown:
    """Undecided; ``holes`` are the positions that blocked the decision."""
    holes: tuple[Path, ...] = ((),)


TriBool = Union[Yes, No, Unknown]


# --- generic structure access --------------------------------------------------

# Child fields per constructor, in path-index order.  Ctx is special-cased
# (variable arity).  Non-child fields (names, literal values) belong to the
# head and are compared as part of it.
_CHILD_FIELDS: dict[type, tuple[str, ...]] = {
    Var: (), NumLit: (), BoolLit: (), TNum: (), TBool: (),
    Atom: (), Falsum: (), Hole: (), Abbrev: (),
    Plus: ("left", "right"),
    If: ("cond", "then_branch", "else_branch"),
    Fun: ("param_ty", "body"),
    App: ("func", "arg"),
    Let: ("bound", "body"),
    TArrow: ("arg", "result"),
    And: ("left", "right"),
    Or: ("left", "right"),
    Implies: ("left", "right"),
    Not: ("operand",),
    Bind: ("ty",),
    Subst: ("body", "value"),
}


def register_term_form(cls: type, child_fields: tuple[str, ...]) -> None:
    """Register extra constructors (rule-schema forms) for generic walks."""
    _CHILD_FIELDS[cls] = child_fields


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Ctx):
        return t.entries
    names = _CHILD_FIELDS[type(t)]
    return tuple(getattr(t, n) for n in names)


def with_child(t: Term, index: int, child: Term) -> Term:
    if isinstance(t, Ctx):
        entries = list(t.entries)
        entries[index] = child
        return Ctx(tuple(entries))
    field = _CHILD_FIELDS[type(t)][index]
    return dataclasses.replace(t, **{field: child})


def head_key(t: Term):
    """Everything that identifies a node except its children.

    Two terms with equal head keys have the same constructor, the same
    literal payload (names, numbers, booleans) and the same arity.
    """
    if isinstance(t, Ctx):
        return (Ctx, len(t.entries))
    child_names = _CHILD_FIELDS[type(t)]
    extras = tuple(
        getattr(t, f.name)
        for f in dataclasses.fields(t)
        if f.name not in child_names
    )
    return (type(t), extras)


def subterms(t: Term, prefix: Path = ()) -> Iterator[tuple[Path, Term]]:
    """All (path, subterm) pairs in preorder, the term itself included."""
    yield prefix, t
    for i, c in enumerate(children(t)):
        yield from subterms(c, prefix + (i,))


# --- path operations -----------------------------------------------------------

def _slot_terms(j: Judgment) -> tuple[Term, ...]:
    return tuple(getattr(j, n) for n in JUDGMENT_SLOTS[type(j)])


def subterm_at_term(t: Term, path: Path, _prefix: Path = ()) -> Term:
    cur = t
    for depth, i in enumerate(path):
        cs = children(cur)
        if i < 0 or i >= len(cs):
            raise PathOutOfRange(_prefix + tuple(path), _prefix + tuple(path[:depth]))
        cur = cs[i]
    return cur


def subterm_at(j: Judgment, p: Path) -> Term:
    """The subterm of ``j`` at ``p``; a judgment itself is not a term."""
    p = tuple(p)
    if not p:
        raise PathOutOfRange(p, ())
    slots = _slot_terms(j)
    if p[0] >= len(slots):
        raise PathOutOfRange(p, ())
    return subterm_at_term(slots[p[0]], p[1:], p[:1])


def replace_in_term(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    cs = children(t)
    if i < 0 or i >= len(cs):
        raise PathOutOfRange(path)
    return with_child(t, i, replace_in_term(cs[i], path[1:], new))


def replace_at(j: Judgment, p: Path, t: Term) -> Judgment:
    """A copy of ``j`` with the subterm at ``p`` replaced by ``t``.

    The replacement must fit the sort the position requires; placing, say, a
    type where an expression belongs raises :class:`SortMismatch`.
    """
    p = tuple(p)
    if not p:
        raise PathOutOfRange(p, ())
    subterm_at(j, p)  # validates the path
    expected = sort_at(j, p)
    if not well_sorted(t, expected):
        raise SortMismatch(expected, describe_sort(t))
    slot_name = JUDGMENT_SLOTS[type(j)][p[0]]
    new_slot = replace_in_term(getattr(j, slot_name), p[1:], t)
    return dataclasses.replace(j, **{slot_name: new_slot})


# --- sorts ----------------------------------------------------------------------

SORT_EXPR = "expr"
SORT_TYPE = "type"
SORT_PROP = "prop"
SORT_CTX = "ctx"
SORT_VALUE = "value"   # the expression subset that evaluation results live in
SORT_NAME = "name"
SORT_NUM = "num"       # numeric literals only (T-Num style premiseless rules)
# Contexts come in two flavors; entries of the first are bindings, of the
# second bare propositions.
SORT_CTX_TYPING = "ctx.typing"
SORT_CTX_LOGIC = "ctx.logic"
SORT_BINDING = "binding"

_HEAD_SORT: dict[type, str] = {
    Var: SORT_EXPR, NumLit: SORT_EXPR, BoolLit: SORT_EXPR, Plus: SORT_EXPR,
    If: SORT_EXPR, Fun: SORT_EXPR, App: SORT_EXPR, Let: SORT_EXPR, Subst: SORT_EXPR,
    TNum: SORT_TYPE, TBool: SORT_TYPE, TArrow: SORT_TYPE,
    Atom: SORT_PROP, And: SORT_PROP, Or: SORT_PROP, Implies: SORT_PROP,
    Not: SORT_PROP, Falsum: SORT_PROP,
}

_CHILD_SORTS: dict[type, tuple[str, ...]] = {
    Plus: (SORT_EXPR, SORT_EXPR),
    If: (SORT_EXPR, SORT_EXPR, SORT_EXPR),
    Fun: (SORT_TYPE, SORT_EXPR),
    App: (SORT_EXPR, SORT_EXPR),
    Let: (SORT_EXPR, SORT_EXPR),
    Subst: (SORT_EXPR, SORT_EXPR),
    TArrow: (SORT_TYPE, SORT_TYPE),
    And: (SORT_PROP, SORT_PROP),
    Or: (SORT_PROP, SORT_PROP),
    Implies: (SORT_PROP, SORT_PROP),
    Not: (SORT_PROP,),
    Bind: (SORT_TYPE,),
}

# Judgment slot sorts, in path-index order.
SLOT_SORTS: dict[type, tuple[str, ...]] = {
    Typing: (SORT_CTX_TYPING, SORT_EXPR, SORT_TYPE),
    EvalJ: (SORT_EXPR, SORT_EXPR),
    Entail: (SORT_CTX_LOGIC, SORT_PROP),
}

# Hooks let the rule module teach the sort checker about schema-only forms.
_SORT_HOOKS: dict[type, Callable[[Term, str], bool]] = {}


def register_sort_hook(cls: type, hook: Callable[[Term, str], bool]) -> None:
    _SORT_HOOKS[cls] = hook


def describe_sort(t: Term) -> str:
    if isinstance(t, Hole):
        return "hole"
    if isinstance(t, Abbrev):
        return "abbrev"
    if isinstance(t, Ctx):
        return SORT_CTX
    if isinstance(t, Bind):
        return SORT_BINDING
    if type(t) in _SORT_HOOKS:
        return "pattern"
    return _HEAD_SORT.get(type(t), "unknown")


def well_sorted(t: Term, sort: str) -> bool:
    """Deep sort check.  Holes and abbreviation references fit any sort;
    abbreviations are validated against their expansion at the document
    level."""
    if isinstance(t, (Hole, Abbrev)):
        return True
    hook = _SORT_HOOKS.get(type(t))
    if hook is not None:
        return hook(t, sort)
    if isinstance(t, Ctx):
        if sort == SORT_CTX_TYPING:
            ok = lambda e: isinstance(e, Bind) and well_sorted(e.ty, SORT_TYPE)
        elif sort == SORT_CTX_LOGIC:
            ok = lambda e: well_sorted(e, SORT_PROP)
        elif sort == SORT_CTX:
            ok = lambda e: (isinstance(e, Bind) and well_sorted(e.ty, SORT_TYPE)
                            or well_sorted(e, SORT_PROP))
        else:
            return False
        return all(isinstance(e, (Hole, Abbrev)) or ok(e) for e in t.entries)
    if isinstance(t, Bind):
        return sort in (SORT_BINDING,) and well_sorted(t.ty, SORT_TYPE)
    if sort == SORT_VALUE:
        return is_value(t) and well_sorted(t, SORT_EXPR)
    if sort == SORT_NUM:
        return isinstance(t, NumLit)
    if _HEAD_SORT.get(type(t)) != sort:
        return False
    kinds = _CHILD_SORTS.get(type(t), ())
    return all(well_sorted(c, s) for c, s in zip(children(t), kinds))


def sort_at(j: Judgment, p: Path) -> str:
    """The sort a replacement must have at position ``p`` of ``j``."""
    sort = SLOT_SORTS[type(j)][p[0]]
    cur = subterm_at(j, p[:1])
    for i in p[1:]:
        if isinstance(cur, Ctx):
            sort = SORT_BINDING if sort == SORT_CTX_TYPING else SORT_PROP
        elif isinstance(cur, Bind):
            sort = SORT_TYPE
        else:
            sort = _CHILD_SORTS[type(cur)][i]
        cur = children(cur)[i]
    return sort


def check_judgment(j: Judgment, kind: str) -> None:
    """Raise :class:`SortMismatch` unless ``j`` is well-formed for ``kind``."""
    if isinstance(j, JHole):
        return
    actual = JUDGMENT_KIND[type(j)]
    if actual != kind:
        raise SortMismatch(f"{kind} judgment", f"{actual} judgment")
    for t, want in zip(_slot_terms(j), SLOT_SORTS[type(j)]):
        if not well_sorted(t, want):
            raise SortMismatch(want, describe_sort(t))


# --- holes and variables ---------------------------------------------------------

def hole_paths(t: Term, prefix: Path = ()) -> list[Path]:
    out = []
    for p, s in subterms(t, prefix):
        if isinstance(s, Hole):
            out.append(p)
    return out


def contains_hole(t: Term) -> bool:
    return any(isinstance(s, Hole) for _, s in subterms(t))


def judgment_hole_paths(j: Judgment) -> list[Path]:
    if isinstance(j, JHole):
        return [()]
    out: list[Path] = []
    for i, t in enumerate(_slot_terms(j)):
        out.extend(hole_paths(t, (i,)))
    return out


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name} if isinstance(t.name, str) else set()
    if isinstance(t, Fun):
        inner = free_vars(t.body) - {t.param}
        return inner | free_vars(t.param_ty)
    if isinstance(t, Let):
        return free_vars(t.bound) | (free_vars(t.body) - {t.name})
    if isinstance(t, Subst):
        return free_vars(t.value) | (free_vars(t.body) - {t.var})
    out: set[str] = set()
    for c in children(t):
        out |= free_vars(c)
    return out


def is_closed(t: Term) -> bool:
    return not free_vars(t)


def is_value(t: Term) -> bool:
    return isinstance(t, (NumLit, BoolLit, Fun))


# --- three-valued equality ---------------------------------------------------------

def eq3(a: Term, b: Term) -> TriBool:
    """Structural equality that tolerates holes.

    ``Yes`` when the terms are identical and hole-free at every compared
    position.  ``No(p)`` with the leftmost-outermost definitely mismatching
    position.  ``Unknown(hs)`` when every discrepancy sits under a hole on
    either side.  Names compare exactly; there is no alpha-equivalence.
    Abbreviations must be expanded by the caller first.
    """
    mismatch: list[Path] = []
    holes: list[Path] = []

    def walk(x: Term, y: Term, path: Path) -> None:
        if mismatch:
            return
        if isinstance(x, Hole) or isinstance(y, Hole):
            holes.append(path)
            return
        if head_key(x) != head_key(y):
            mismatch.append(path)
            return
        for i, (cx, cy) in enumerate(zip(children(x), children(y))):
            walk(cx, cy, path + (i,))

    walk(a, b, ())
    if mismatch:
        return No(mismatch[0])
    if holes:
        return Unknown(tuple(holes))
    return Yes()


def eq3_judgment(a: Judgment, b: Judgment) -> TriBool:
    """Slot-wise :func:`eq3`; a judgment hole on either side is Unknown."""
    if isinstance(a, JHole) or isinstance(b, JHole):
        return Unknown(((),))
    if type(a) is not type(b):
        return No(())
    mismatch: Optional[Path] = None
    holes: list[Path] = []
    for i, (x, y) in enumerate(zip(_slot_terms(a), _slot_terms(b))):
        r = eq3(x, y)
        if isinstance(r, No):
            mismatch = (i,) + r.witness
            break
        if isinstance(r, Unknown):
            holes.extend((i,) + h for h in r.holes)
    if mismatch is not None:
        return No(mismatch)
    if holes:
        return Unknown(tuple(holes))
    return Yes()


# --- substitution -------------------------------------------------------------------

def substitute(body: Term, name: str, value: Term) -> Term:
    """Capture-avoiding substitution [value/name]body.

    ``value`` must be closed and hole-free (a runtime value), so capture
    cannot occur and no renaming is ever needed.  Binders of the same name
    shadow: the walk stops at ``Fun``/``Let``/``Subst`` binding ``name``.
    """
    if contains_hole(value) or not is_closed(value):
        raise OpenValue(f"cannot substitute an open value for {name!r}")

    def walk(t: Term) -> Term:
        if isinstance(t, Var):
            return value if t.name == name else t
        if isinstance(t, Fun) and t.param == name:
            return t
        if isinstance(t, Let):
            bound = walk(t.bound)
            inner = t.body if t.name == name else walk(t.body)
            return Let(t.name, bound, inner)
        if isinstance(t, Subst):
            val = walk(t.value)
            inner = t.body if t.var == name else walk(t.body)
            return Subst(inner, t.var, val)
        out = t
        for i, c in enumerate(children(t)):
            new = walk(c)
            if new is not c:
                out = with_child(out, i, new)
        return out

    return walk(body)


# --- context lookup -----------------------------------------------------------------

def ctx_lookup(ctx: Term, key: "str | Term") -> TriBool:
    """Three-valued lookup in a context.

    With a name (or ``Var``) key: rightmost binding wins; a hole entry to
    the right of every definite binding makes the answer Unknown, a hole
    inside the candidate type does too.  With a proposition key: membership
    up to :func:`eq3` over all entries.
    Paths in the result are relative to the context term.
    """
    if isinstance(key, Var) and isinstance(key.name, str):
        key = key.name
    if isinstance(ctx, Hole):
        return Unknown(((),))
    if not isinstance(ctx, Ctx):
        return Unknown(((),))

    if isinstance(key, str):
        for i in range(len(ctx.entries) - 1, -1, -1):
            e = ctx.entries[i]
            if isinstance(e, Hole):
                return Unknown(((i,),))
            if isinstance(e, Bind) and e.name == key:
                hs = hole_paths(e.ty, (i, 0))
                if hs:
                    return Unknown(tuple(hs))
                return Yes(e.ty)
        return No(())

    unknown: list[Path] = []
    for i, e in enumerate(ctx.entries):
        if isinstance(e, Hole):
            unknown.append((i,))
            continue
        if isinstance(e, Bind):
            continue
        r = eq3(e, key)
        if isinstance(r, Yes):
            return Yes(e)
        if isinstance(r, Unknown):
            unknown.extend((i,) + h for h in r.holes)
    if unknown:
        return Unknown(tuple(unknown))
    return No(())
