"""Inference rules as schemas, and three-valued matching against judgments.

A rule schema is an ordinary judgment whose terms may contain metavariable
occurrences (:class:`MetaRef` at term positions, :class:`Metavar` objects in
name and numeral fields) plus the context-extension pattern :class:`CtxExt`
for premises of the form ``Γ, x:T |- ...``.

Matching walks pattern and subject together, threading a binding environment:
the first hole-free occurrence of a metavariable binds it, later occurrences
are compared with hole-tolerant equality.  Every definite conflict is
collected (not just the first), and every conflict remembers where the
conflicting binding was established so errors can be reported at both ends.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Union

from .errors import OpenValue, UnknownCategory, UnknownRule
from .printer import describe_found, head_phrase, judgment_pieces, print_term
from .terms import (
    Atom, Bind, BoolLit, Ctx, Fun, Hole, JHole, Judgment, JUDGMENT_KIND,
    JUDGMENT_SLOTS, KIND_CLASS, Let, NumLit, No, Path, SLOT_SORTS, SORT_CTX,
    SORT_CTX_LOGIC, SORT_CTX_TYPING, SORT_PROP, SORT_BINDING, Subst, Term,
    TriBool, Unknown, Var, Yes, children, ctx_lookup, eq3, hole_paths,
    is_value, register_sort_hook, register_term_form, subterms,
    subterm_at_term, substitute, well_sorted, with_child, _CHILD_SORTS,
)


@dataclass(frozen=True)
class Metavar:
    """A schema variable: name plus the sort of terms it may bind."""
    name: str
    sort: str  # expr | type | prop | ctx | value | name | num


@dataclass(frozen=True)
class MetaRef(Term):
    """Occurrence of a metavariable at a term position."""
    var: Metavar


@dataclass(frozen=True)
class CtxExt(Term):
    """Context-extension pattern: base context plus one rightmost entry."""
    base: Term
    entry: Term


register_term_form(MetaRef, ())
register_term_form(CtxExt, ("base", "entry"))
register_sort_hook(MetaRef, lambda t, s: True)
register_sort_hook(
    CtxExt, lambda t, s: s in (SORT_CTX, SORT_CTX_TYPING, SORT_CTX_LOGIC))


# --- side conditions -----------------------------------------------------------

@dataclass(frozen=True)
class Lookup:
    """Context lookup: `ctx(key) = result`, or membership when result is None."""
    ctx: str
    key: str
    result: Optional[str]


@dataclass(frozen=True)
class Arith:
    """Numeric constraint: result = left + right."""
    result: str
    left: str
    right: str


@dataclass(frozen=True)
class IsValue:
    """The bound term must be a value (number, boolean, or function literal)."""
    arg: str


SideCond = Union[Lookup, Arith, IsValue]


def render_side_condition(c: SideCond) -> str:
    if isinstance(c, Lookup):
        if c.result is None:
            return f"{c.key} in {c.ctx}"
        return f"{c.ctx}({c.key}) = {c.result}"
    if isinstance(c, Arith):
        return f"{c.result} = {c.left} + {c.right}"
    return f"{c.arg} value"


def _side_metavars(c: SideCond) -> tuple[str, ...]:
    if isinstance(c, Lookup):
        return (c.ctx, c.key) + (() if c.result is None else (c.result,))
    if isinstance(c, Arith):
        return (c.result, c.left, c.right)
    return (c.arg,)


# --- loci ------------------------------------------------------------------------

@dataclass(frozen=True)
class Conclusion:
    pass


@dataclass(frozen=True)
class Premise:
    index: int


@dataclass(frozen=True)
class RuleApplication:
    pass


@dataclass(frozen=True)
class SideCondition:
    index: int


Locus = Union[Conclusion, Premise, RuleApplication, SideCondition]

CONCLUSION = Conclusion()
RULE_APPLICATION = RuleApplication()


def locus_str(locus: Locus) -> str:
    if isinstance(locus, Conclusion):
        return "conclusion"
    if isinstance(locus, Premise):
        return f"premise:{locus.index}"
    if isinstance(locus, SideCondition):
        return f"side:{locus.index}"
    return "rule"


# --- rules and systems -------------------------------------------------------------

Bindings = dict  # metavar name -> Term | str | int


@dataclass(frozen=True)
class Rule:
    name: str
    category: str
    conclusion: Judgment
    premises: tuple[Judgment, ...]
    side_conditions: tuple[SideCond, ...]
    doc_text: str
    metavars: tuple[Metavar, ...]  # first-occurrence order; index = color

    @property
    def arity(self) -> int:
        return len(self.premises)

    def color_of(self, metavar_name: str) -> Optional[int]:
        for i, m in enumerate(self.metavars):
            if m.name == metavar_name:
                return i
        return None


def _collect_metavars(j: Judgment, seen: dict[str, Metavar], order: list[Metavar]) -> None:
    def note(mv: Metavar) -> None:
        prev = seen.get(mv.name)
        if prev is None:
            seen[mv.name] = mv
            order.append(mv)
        elif prev.sort != mv.sort:
            raise ValueError(
                f"metavar {mv.name} used at two sorts: {prev.sort}, {mv.sort}")

    def walk(t: Term) -> None:
        if isinstance(t, MetaRef):
            note(t.var)
            return
        for f in (getattr(t, "name", None), getattr(t, "value", None),
                  getattr(t, "param", None), getattr(t, "var", None)):
            if isinstance(f, Metavar):
                note(f)
        for c in children(t):
            walk(c)

    if isinstance(j, JHole):
        return
    for n in JUDGMENT_SLOTS[type(j)]:
        walk(getattr(j, n))


def rule(name: str, category: str, conclusion: Judgment,
         premises: tuple[Judgment, ...] = (),
         side_conditions: tuple[SideCond, ...] = (),
         doc: str = "") -> Rule:
    """Build a Rule, deriving the metavariable list (and so the color
    assignment) from first-occurrence order in conclusion then premises."""
    if not name or any(ch.isspace() for ch in name) or name == "?" or name.startswith("use "):
        raise ValueError(f"bad rule name {name!r}")
    seen: dict[str, Metavar] = {}
    order: list[Metavar] = []
    _collect_metavars(conclusion, seen, order)
    for p in premises:
        _collect_metavars(p, seen, order)
    for c in side_conditions:
        for mname in _side_metavars(c):
            if mname not in seen:
                raise ValueError(
                    f"rule {name}: side condition uses unknown metavar {mname}")
    return Rule(name, category, conclusion, tuple(premises),
                tuple(side_conditions), doc, tuple(order))


class RuleSystem:
    """An ordered collection of rules sharing one judgment kind."""

    def __init__(self, system_id: str, kind: str, rules: tuple[Rule, ...],
                 categories: tuple[str, ...]):
        self.id = system_id
        self.kind = kind
        self.rules = tuple(rules)
        self.categories = tuple(categories)
        self._by_name = {}
        for r in self.rules:
            if r.name in self._by_name:
                raise ValueError(f"duplicate rule name {r.name}")
            if r.category not in self.categories:
                raise ValueError(f"rule {r.name}: unknown category {r.category}")
            self._by_name[r.name] = r
            _audit_rule(r, kind)

    def get(self, name: str) -> Rule:
        r = self._by_name.get(name)
        if r is None:
            raise UnknownRule(name)
        return r

    def has(self, name: str) -> bool:
        return name in self._by_name


def _audit_rule(r: Rule, kind: str) -> None:
    """Well-formedness walk: judgment kinds agree with the system, every
    metavariable occurrence sits at a position its sort allows, and schemas
    contain no holes or abbreviations."""
    want = KIND_CLASS[kind]
    for j in (r.conclusion,) + r.premises:
        if not isinstance(j, want):
            raise ValueError(f"rule {r.name}: judgment kind mismatch")
        for slot_name, sort in zip(JUDGMENT_SLOTS[type(j)], SLOT_SORTS[type(j)]):
            _audit_term(r, getattr(j, slot_name), sort)
    for c in r.side_conditions:
        sorts = {m.name: m.sort for m in r.metavars}
        if isinstance(c, Lookup):
            ok = (sorts[c.ctx] == "ctx"
                  and sorts[c.key] in ("name", "prop")
                  and (c.result is None or sorts[c.result] in ("type", "prop")))
        elif isinstance(c, Arith):
            ok = all(sorts[m] == "num" for m in (c.result, c.left, c.right))
        else:
            ok = sorts[c.arg] in ("value", "expr")
        if not ok:
            raise ValueError(f"rule {r.name}: side condition sorts are off")


def _compat(mv_sort: str, pos_sort: str) -> bool:
    if pos_sort in (SORT_CTX_TYPING, SORT_CTX_LOGIC, SORT_CTX):
        return mv_sort == "ctx"
    if pos_sort == "expr":
        return mv_sort in ("expr", "value", "num")
    return mv_sort == pos_sort


def _audit_term(r: Rule, t: Term, pos_sort: str) -> None:
    if isinstance(t, MetaRef):
        if not _compat(t.var.sort, pos_sort):
            raise ValueError(
                f"rule {r.name}: {t.var.name} ({t.var.sort}) at a {pos_sort} position")
        return
    if isinstance(t, (Hole,)) or type(t).__name__ == "Abbrev":
        raise ValueError(f"rule {r.name}: schemas may not contain {t!r}")
    for fname in ("name", "param", "var"):
        v = getattr(t, fname, None)
        if isinstance(v, Metavar) and v.sort != "name":
            raise ValueError(f"rule {r.name}: {v.name} must have sort name")
    if isinstance(t, NumLit) and isinstance(t.value, Metavar) and t.value.sort != "num":
        raise ValueError(f"rule {r.name}: {t.value.name} must have sort num")
    if isinstance(t, CtxExt):
        _audit_term(r, t.base, pos_sort)
        entry_sort = SORT_BINDING if pos_sort != SORT_CTX_LOGIC else SORT_PROP
        _audit_term(r, t.entry, entry_sort)
        return
    if isinstance(t, Ctx):
        entry_sort = SORT_BINDING if pos_sort != SORT_CTX_LOGIC else SORT_PROP
        for e in t.entries:
            _audit_term(r, e, entry_sort)
        return
    if isinstance(t, Bind):
        _audit_term(r, t.ty, "type")
        return
    kinds = _CHILD_SORTS.get(type(t), ())
    for c, s in zip(children(t), kinds):
        _audit_term(r, c, s)


# --- match results ------------------------------------------------------------------

@dataclass(frozen=True)
class Matched:
    bindings: Bindings


@dataclass(frozen=True)
class Mismatch:
    path: Path
    expected: str
    found: str


@dataclass(frozen=True)
class Blocked:
    holes: tuple[Path, ...]


MatchResult = Union[Matched, Mismatch, Blocked]


@dataclass
class MismatchInfo:
    """One definite conflict, with enough context for two-ended reporting."""
    locus: Locus
    path: Path
    expected: str
    found: str
    pattern_path: Path
    origin: Optional[tuple[Locus, Path]] = None


@dataclass
class BlockedInfo:
    locus: Locus
    paths: tuple[Path, ...]
    note: str = ""


class MatchState:
    """Bindings plus everything learned while matching one rule application."""

    def __init__(self, seed: Optional[Bindings] = None):
        self.bindings: Bindings = dict(seed) if seed else {}
        self.origins: dict[str, tuple[Locus, Path]] = {}
        self.mismatches: list[MismatchInfo] = []
        self.blocked: list[BlockedInfo] = []
        self.kind: str = ""

    def mismatch(self, locus: Locus, path: Path, expected: str, found: str,
                 pattern_path: Path, origin: Optional[tuple[Locus, Path]] = None) -> None:
        self.mismatches.append(
            MismatchInfo(locus, path, expected, found, pattern_path, origin))

    def block(self, locus: Locus, paths: tuple[Path, ...], note: str = "") -> None:
        self.blocked.append(BlockedInfo(locus, paths, note))


_SORT_PHRASES = {
    "expr": "an expression", "type": "a type", "prop": "a proposition",
    "ctx": "a context", "value": "a value", "name": "a name", "num": "a number",
}

_KIND_PHRASES = {
    "typing": "a typing judgment", "eval": "an evaluation judgment",
    "entail": "an entailment judgment",
}


def _sort_for(mv_sort: str, kind: str) -> str:
    if mv_sort == "ctx":
        return SORT_CTX_TYPING if kind == "typing" else SORT_CTX_LOGIC
    return mv_sort


def is_ground(t: Term) -> bool:
    """No metavariable occurrences and no pattern-only constructors."""
    for _, s in subterms(t):
        if isinstance(s, (MetaRef, CtxExt, Subst)):
            return False
        for fname in ("name", "param", "var", "value"):
            if isinstance(getattr(s, fname, None), Metavar):
                return False
    return True


def _describe_pattern(pat: Term, b: Bindings) -> str:
    inst = instantiate_term(pat, b)
    if is_ground(inst):
        return print_term(inst)
    return head_phrase(pat)


def match_judgment_into(pattern: Judgment, subject: Judgment, locus: Locus,
                        st: MatchState) -> None:
    if isinstance(subject, JHole):
        st.block(locus, ((),), "the judgment is still a hole")
        return
    if type(pattern) is not type(subject):
        st.mismatch(locus, (), _KIND_PHRASES[JUDGMENT_KIND[type(pattern)]],
                    _KIND_PHRASES[JUDGMENT_KIND[type(subject)]], ())
        return
    st.kind = JUDGMENT_KIND[type(pattern)]
    for i, name in enumerate(JUDGMENT_SLOTS[type(pattern)]):
        _match_term(getattr(pattern, name), getattr(subject, name),
                    locus, (i,), st)


def _match_name(pat_name, subj_name: str, locus: Locus, path: Path,
                st: MatchState) -> None:
    if isinstance(pat_name, str):
        if pat_name != subj_name:
            st.mismatch(locus, path, pat_name, subj_name, path)
        return
    name = pat_name.name
    if name in st.bindings:
        bound = st.bindings[name]
        if bound != subj_name:
            origin = st.origins.get(name)
            st.mismatch(locus, path, str(bound), str(subj_name), path, origin)
    else:
        st.bindings[name] = subj_name
        st.origins[name] = (locus, path)


def _match_numeral(pat_value, subj_value: int, locus: Locus, path: Path,
                   st: MatchState) -> None:
    if isinstance(pat_value, int):
        if pat_value != subj_value:
            st.mismatch(locus, path, str(pat_value), str(subj_value), path)
        return
    name = pat_value.name
    if name in st.bindings:
        bound = st.bindings[name]
        if bound != subj_value:
            origin = st.origins.get(name)
            st.mismatch(locus, path, str(bound), str(subj_value), path, origin)
    else:
        st.bindings[name] = subj_value
        st.origins[name] = (locus, path)


def _match_metaref(mv: Metavar, subj: Term, locus: Locus, path: Path,
                   st: MatchState) -> None:
    name = mv.name
    if name in st.bindings:
        bound = st.bindings[name]
        if not isinstance(bound, Term):
            # numerals bound through NumLit patterns may recur as bare refs
            bound = NumLit(bound) if isinstance(bound, int) else Var(bound)
        r = eq3(bound, subj)
        if isinstance(r, No):
            w = r.witness
            exp = subterm_at_term(bound, w)
            got = subterm_at_term(subj, w)
            origin = st.origins.get(name)
            st.mismatch(locus, path + w, describe_found(exp), describe_found(got),
                        path, (origin[0], origin[1] + w) if origin else None)
        elif isinstance(r, Unknown):
            st.block(locus, tuple(path + h for h in r.holes))
        return
    hs = hole_paths(subj)
    if hs:
        st.block(locus, tuple(path + h for h in hs))
        return
    if not well_sorted(subj, _sort_for(mv.sort, st.kind)):
        st.mismatch(locus, path, _SORT_PHRASES[mv.sort], describe_found(subj), path)
        return
    st.bindings[name] = subj
    st.origins[name] = (locus, path)


def _match_term(pat: Term, subj: Term, locus: Locus, path: Path,
                st: MatchState) -> None:
    if isinstance(pat, MetaRef):
        _match_metaref(pat.var, subj, locus, path, st)
        return

    if isinstance(pat, Subst):
        inst = instantiate_term(pat, st.bindings)
        if isinstance(inst, Subst):
            st.block(locus, (), "a substitution is still pending here")
            return
        before = len(st.mismatches)
        _match_term(inst, subj, locus, path, st)
        for m in st.mismatches[before:]:
            m.pattern_path = path
        return

    if isinstance(pat, CtxExt):
        if isinstance(subj, Hole):
            st.block(locus, (path,))
            return
        if not isinstance(subj, Ctx):
            st.mismatch(locus, path, "a context", describe_found(subj), path)
            return
        if not subj.entries:
            st.mismatch(locus, path, _describe_pattern(pat, st.bindings),
                        describe_found(subj), path)
            return
        # entry indices of the shortened context line up with the subject's
        _match_term(pat.base, Ctx(subj.entries[:-1]), locus, path, st)
        _match_term(pat.entry, subj.entries[-1], locus,
                    path + (len(subj.entries) - 1,), st)
        return

    if isinstance(subj, Hole):
        st.block(locus, (path,))
        return

    if type(pat) is not type(subj):
        st.mismatch(locus, path, _describe_pattern(pat, st.bindings),
                    describe_found(subj), path)
        return

    if isinstance(pat, Var):
        _match_name(pat.name, subj.name, locus, path, st)
        return
    if isinstance(pat, NumLit):
        _match_numeral(pat.value, subj.value, locus, path, st)
        return
    if isinstance(pat, BoolLit):
        if pat.value != subj.value:
            st.mismatch(locus, path, print_term(pat), print_term(subj), path)
        return
    if isinstance(pat, Atom):
        if pat.name != subj.name:
            st.mismatch(locus, path, pat.name, subj.name, path)
        return
    if isinstance(pat, (Fun, Let)):
        _match_name(pat.param if isinstance(pat, Fun) else pat.name,
                    subj.param if isinstance(subj, Fun) else subj.name,
                    locus, path, st)
    elif isinstance(pat, Bind):
        _match_name(pat.name, subj.name, locus, path, st)
    elif isinstance(pat, Ctx):
        if len(pat.entries) != len(subj.entries):
            st.mismatch(locus, path, _describe_pattern(pat, st.bindings),
                        print_term(subj), path)
            return

    for i, (pc, sc) in enumerate(zip(children(pat), children(subj))):
        _match_term(pc, sc, locus, path + (i,), st)


def match_schema(schema: Judgment, subject: Judgment,
                 seed: Optional[Bindings] = None) -> MatchResult:
    """Match one judgment schema against one subject judgment.

    Definite conflicts win over blocking holes; with neither, the subject
    matched and the (possibly extended) bindings are returned.
    """
    st = MatchState(seed)
    match_judgment_into(schema, subject, CONCLUSION, st)
    if st.mismatches:
        m = st.mismatches[0]
        return Mismatch(m.path, m.expected, m.found)
    if st.blocked:
        holes: list[Path] = []
        for b in st.blocked:
            holes.extend(b.paths)
        return Blocked(tuple(holes))
    return Matched(st.bindings)


# --- instantiation --------------------------------------------------------------------

def instantiate_term(t: Term, b: Bindings) -> Term:
    if isinstance(t, MetaRef):
        v = b.get(t.var.name)
        if v is None:
            return t
        if isinstance(v, Term):
            return v
        return NumLit(v) if isinstance(v, int) else Var(v)

    def name_of(x):
        if isinstance(x, Metavar):
            got = b.get(x.name)
            return got if isinstance(got, str) else x
        return x

    if isinstance(t, Var):
        return Var(name_of(t.name))
    if isinstance(t, NumLit):
        if isinstance(t.value, Metavar):
            got = b.get(t.value.name)
            return NumLit(got) if isinstance(got, int) else t
        return t
    if isinstance(t, Fun):
        return Fun(name_of(t.param), instantiate_term(t.param_ty, b),
                   instantiate_term(t.body, b))
    if isinstance(t, Let):
        return Let(name_of(t.name), instantiate_term(t.bound, b),
                   instantiate_term(t.body, b))
    if isinstance(t, Bind):
        return Bind(name_of(t.name), instantiate_term(t.ty, b))
    if isinstance(t, Subst):
        body = instantiate_term(t.body, b)
        var = name_of(t.var)
        value = instantiate_term(t.value, b)
        if isinstance(var, str) and is_ground(body) and is_ground(value):
            try:
                return substitute(body, var, value)
            except OpenValue:
                pass
        return Subst(body, var, value)
    if isinstance(t, CtxExt):
        base = instantiate_term(t.base, b)
        entry = instantiate_term(t.entry, b)
        if isinstance(base, Ctx) and is_ground(entry):
            return Ctx(base.entries + (entry,))
        return CtxExt(base, entry)
    if isinstance(t, Ctx):
        return Ctx(tuple(instantiate_term(e, b) for e in t.entries))

    out = t
    for i, c in enumerate(children(t)):
        new = instantiate_term(c, b)
        if new is not c:
            out = with_child(out, i, new)
    return out


def instantiate(schema: Judgment, b: Bindings) -> Judgment:
    if isinstance(schema, JHole):
        return schema
    updates = {n: instantiate_term(getattr(schema, n), b)
               for n in JUDGMENT_SLOTS[type(schema)]}
    return dataclasses.replace(schema, **updates)


# --- side-condition checking ----------------------------------------------------------

def check_side_into(c: SideCond, index: int, st: MatchState) -> None:
    locus = SideCondition(index)
    b = st.bindings

    if isinstance(c, Arith):
        vals = [b.get(m) for m in (c.result, c.left, c.right)]
        if any(v is None for v in vals):
            st.block(locus, (), f"{render_side_condition(c)} is not determined yet")
            return
        r, a, x = vals
        if r != a + x:
            origin = st.origins.get(c.result)
            st.mismatch(locus, (), str(a + x), str(r), (), origin)
        return

    if isinstance(c, IsValue):
        v = b.get(c.arg)
        if v is None:
            st.block(locus, (), f"{render_side_condition(c)} is not determined yet")
            return
        if isinstance(v, int) or (isinstance(v, Term) and is_value(v)):
            return
        # a bare hole could still become a value; only a non-value head
        # is a definite failure
        if isinstance(v, Hole):
            st.block(locus, (), f"{render_side_condition(c)} is not determined yet")
            return
        found = describe_found(v) if isinstance(v, Term) else str(v)
        st.mismatch(locus, (), "a value", found, (), st.origins.get(c.arg))
        return

    ctx_v = b.get(c.ctx)
    key_v = b.get(c.key)
    if ctx_v is None or key_v is None:
        st.block(locus, (), f"{render_side_condition(c)} is not determined yet")
        return
    ctx_origin = st.origins.get(c.ctx)
    r = ctx_lookup(ctx_v, key_v)
    if isinstance(r, Unknown):
        if ctx_origin is not None:
            st.block(ctx_origin[0], tuple(ctx_origin[1] + h for h in r.holes))
        else:
            st.block(locus, ())
        return
    if isinstance(r, No):
        if isinstance(key_v, str):
            expected = f"a binding for {key_v}"
            found = "no binding"
        else:
            expected = print_term(key_v)
            found = "no matching assumption"
        st.mismatch(locus, (), expected, found, ())
        if ctx_origin is not None:
            st.mismatch(ctx_origin[0], ctx_origin[1], expected,
                        print_term(ctx_v) if isinstance(ctx_v, Term) else str(ctx_v),
                        ctx_origin[1])
        return
    # Yes: bind or compare the result metavar
    if c.result is None:
        return
    payload = r.value
    if c.result in b:
        bound = b[c.result]
        rr = eq3(bound, payload)
        if isinstance(rr, No):
            w = rr.witness
            origin = st.origins.get(c.result)
            st.mismatch(locus, (), describe_found(subterm_at_term(bound, w)),
                        describe_found(subterm_at_term(payload, w)), (),
                        (origin[0], origin[1] + w) if origin else None)
        elif isinstance(rr, Unknown):
            origin = st.origins.get(c.result)
            if origin is not None:
                st.block(origin[0], tuple(origin[1] + h for h in rr.holes))
            else:
                st.block(locus, ())
    else:
        b[c.result] = payload
        st.origins[c.result] = (locus, ())


def check_side_condition(c: SideCond, b: Bindings) -> TriBool:
    """Standalone three-valued side-condition check; may bind the result
    metavar of a Lookup into ``b``."""
    st = MatchState()
    st.bindings = b
    check_side_into(c, 0, st)
    if st.mismatches:
        return No(())
    if st.blocked:
        return Unknown(())
    return Yes()


# --- listing and documentation -----------------------------------------------------------

def list_rules(system: RuleSystem, query: str = "",
               category: Optional[str] = None) -> list[Rule]:
    """Rules whose name or doc text contains the query, grouped by category
    in declaration order."""
    if category is not None and category not in system.categories:
        raise UnknownCategory(category)
    q = query.lower()
    out = []
    for cat in system.categories:
        if category is not None and cat != category:
            continue
        for r in system.rules:
            if r.category != cat:
                continue
            if q and q not in r.name.lower() and q not in r.doc_text.lower():
                continue
            out.append(r)
    return out


@dataclass(frozen=True)
class DocSpan:
    text: str
    path: Path
    metavar: Optional[str] = None
    color: Optional[int] = None
    bound: Optional[str] = None


@dataclass(frozen=True)
class DocLine:
    part: str  # conclusion | premise:i | side:i
    text: str
    spans: tuple[DocSpan, ...]


@dataclass(frozen=True)
class RuleDoc:
    name: str
    category: str
    doc_text: str
    conclusion: DocLine
    premises: tuple[DocLine, ...]
    side_conditions: tuple[DocLine, ...]


def _bound_text(v) -> str:
    if isinstance(v, Term):
        return print_term(v)
    return str(v)


def _doc_line(rule_: Rule, part: str, schema: Judgment,
              b: Optional[Bindings]) -> DocLine:
    spans: list[DocSpan] = []
    for p in judgment_pieces(schema):
        color = rule_.color_of(p.metavar) if p.metavar else None
        bound = None
        if p.metavar and b and p.metavar in b:
            bound = _bound_text(b[p.metavar])
        prev = spans[-1] if spans else None
        if (prev is not None and prev.metavar == p.metavar
                and prev.path == p.path):
            spans[-1] = dataclasses.replace(prev, text=prev.text + p.text)
        else:
            spans.append(DocSpan(p.text, p.path, p.metavar, color, bound))
    return DocLine(part, "".join(s.text for s in spans), tuple(spans))


def _side_line(rule_: Rule, index: int, c: SideCond,
               b: Optional[Bindings]) -> DocLine:
    parts: list[tuple[str, Optional[str]]] = []
    if isinstance(c, Lookup):
        if c.result is None:
            parts = [(c.key, c.key), (" in ", None), (c.ctx, c.ctx)]
        else:
            parts = [(c.ctx, c.ctx), ("(", None), (c.key, c.key),
                     (") = ", None), (c.result, c.result)]
    elif isinstance(c, Arith):
        parts = [(c.result, c.result), (" = ", None), (c.left, c.left),
                 (" + ", None), (c.right, c.right)]
    else:
        parts = [(c.arg, c.arg), (" value", None)]
    spans = []
    for text, mv in parts:
        bound = _bound_text(b[mv]) if (mv and b and mv in b) else None
        spans.append(DocSpan(text, (), mv, rule_.color_of(mv) if mv else None, bound))
    return DocLine(f"side:{index}", "".join(s.text for s in spans), tuple(spans))


def rule_doc(r: Rule, b: Optional[Bindings] = None) -> RuleDoc:
    """Render a rule's schema as annotated spans; deterministic, and when
    bindings are supplied every metavariable span carries the bound term's
    printed form."""
    return RuleDoc(
        name=r.name,
        category=r.category,
        doc_text=r.doc_text,
        conclusion=_doc_line(r, "conclusion", r.conclusion, b),
        premises=tuple(_doc_line(r, f"premise:{i}", p, b)
                       for i, p in enumerate(r.premises)),
        side_conditions=tuple(_side_line(r, i, c, b)
                              for i, c in enumerate(r.side_conditions)),
    )
