"""Persistent derivation documents and the edit commands that transform them.

A document is immutable: every edit validates its inputs against the current
document and then builds a new one, so a failed edit leaves no trace.  Node
ids are handed out by a counter stored on the document, which makes the id
of every node created by an edit a deterministic function of (document,
command).  ``invert_edit`` leans on that determinism.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Union

from .errors import (
    BadName,
    BadPath,
    DuplicateName,
    ForwardSubtreeRef,
    NameInUse,
    PathOutOfRange,
    SortMismatch,
    UnboundAbbrev,
    UnknownNode,
    UnknownRule,
    UnknownSubtree,
)
from .systems import get_system
from .terms import (
    Abbrev,
    Ctx,
    Hole,
    JHole,
    Judgment,
    Path,
    SORT_CTX_LOGIC,
    SORT_CTX_TYPING,
    SORT_EXPR,
    SORT_PROP,
    SORT_TYPE,
    Term,
    check_judgment,
    children,
    replace_at,
    sort_at,
    subterm_at,
    subterms,
    well_sorted,
    with_child,
)

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")

FEEDBACK_FULL = "full"
FEEDBACK_SILENT = "silent"


# --------------------------------------------------------------------------
# tree structure


@dataclass(frozen=True)
class RuleApp:
    """The node claims to be an instance of the named rule."""

    name: str


@dataclass(frozen=True)
class SubtreeUse:
    """The node delegates its judgment to a named subtree."""

    name: str


@dataclass(frozen=True)
class RuleHole:
    """No rule chosen yet."""


Applied = Union[RuleApp, SubtreeUse, RuleHole]

RULE_HOLE = RuleHole()


@dataclass(frozen=True)
class DerivNode:
    id: str
    judgment: Judgment
    applied: Applied = RULE_HOLE
    children: tuple["DerivNode", ...] = ()


@dataclass(frozen=True)
class AbbrevDef:
    name: str
    term: Term


@dataclass(frozen=True)
class SubtreeDef:
    name: str
    tree: DerivNode


@dataclass(frozen=True)
class DerivationDoc:
    system_id: str
    feedback: str
    prelude: tuple[AbbrevDef, ...]
    subtrees: tuple[SubtreeDef, ...]
    root: DerivNode
    next_id: int


ROOT_OWNER = "root"


def new_document(system_id: str, feedback: str = FEEDBACK_FULL) -> DerivationDoc:
    get_system(system_id)
    if feedback not in (FEEDBACK_FULL, FEEDBACK_SILENT):
        raise BadName(feedback)
    root = DerivNode("n0", JHole())
    return DerivationDoc(system_id, feedback, (), (), root, 1)


# --------------------------------------------------------------------------
# traversal

def iter_owner_nodes(tree: DerivNode) -> Iterator[DerivNode]:
    yield tree
    for c in tree.children:
        yield from iter_owner_nodes(c)


def iter_nodes(doc: DerivationDoc) -> Iterator[tuple[str, DerivNode]]:
    """All nodes with the name of the tree that owns them.

    Subtrees come first, in definition order, then the root tree; the owner
    of root-tree nodes is ``"root"``.
    """
    for sd in doc.subtrees:
        for n in iter_owner_nodes(sd.tree):
            yield sd.name, n
    for n in iter_owner_nodes(doc.root):
        yield ROOT_OWNER, n


def owner_tree(doc: DerivationDoc, owner: str) -> DerivNode:
    if owner == ROOT_OWNER:
        return doc.root
    for sd in doc.subtrees:
        if sd.name == owner:
            return sd.tree
    raise UnknownSubtree(owner)


def _locate(tree: DerivNode, node_id: str) -> Optional[list[int]]:
    if tree.id == node_id:
        return []
    for i, c in enumerate(tree.children):
        sub = _locate(c, node_id)
        if sub is not None:
            return [i] + sub
    return None


def find_node(doc: DerivationDoc, node_id: str) -> tuple[str, DerivNode]:
    """Return (owner, node) or raise UnknownNode."""
    for owner, n in iter_nodes(doc):
        if n.id == node_id:
            return owner, n
    raise UnknownNode(node_id)


def parent_of(doc: DerivationDoc, node_id: str) -> Optional[DerivNode]:
    for _, n in iter_nodes(doc):
        for c in n.children:
            if c.id == node_id:
                return n
    return None


def node_path_name(doc: DerivationDoc, node_id: str) -> str:
    """Stable display name: owner plus child indices, e.g. ``root.0.1``."""
    owner, _ = find_node(doc, node_id)
    steps = _locate(owner_tree(doc, owner), node_id)
    assert steps is not None
    return ".".join([owner] + [str(i) for i in steps])


def _rewrite(tree: DerivNode, node_id: str, fn) -> Optional[DerivNode]:
    if tree.id == node_id:
        return fn(tree)
    for i, c in enumerate(tree.children):
        new_c = _rewrite(c, node_id, fn)
        if new_c is not None:
            kids = tree.children[:i] + (new_c,) + tree.children[i + 1:]
            return replace(tree, children=kids)
    return None


def _rewrite_node(doc: DerivationDoc, node_id: str, fn) -> DerivationDoc:
    new_root = _rewrite(doc.root, node_id, fn)
    if new_root is not None:
        return replace(doc, root=new_root)
    for i, sd in enumerate(doc.subtrees):
        new_tree = _rewrite(sd.tree, node_id, fn)
        if new_tree is not None:
            subs = doc.subtrees[:i] + (SubtreeDef(sd.name, new_tree),) + doc.subtrees[i + 1:]
            return replace(doc, subtrees=subs)
    raise UnknownNode(node_id)


# --------------------------------------------------------------------------
# abbreviations


def expansion_map(doc: DerivationDoc) -> dict[str, Term]:
    """Fully expanded definition for each abbreviation name."""
    out: dict[str, Term] = {}
    for d in doc.prelude:
        out[d.name] = _expand(d.term, out)
    return out


def _expand(t: Term, defs: dict[str, Term]) -> Term:
    if isinstance(t, Abbrev):
        if t.name not in defs:
            raise UnboundAbbrev(t.name)
        return defs[t.name]
    kids = children(t)
    if isinstance(t, Ctx):
        return Ctx(tuple(_expand(e, defs) for e in kids))
    out = t
    for i, c in enumerate(kids):
        nc = _expand(c, defs)
        if nc is not c:
            out = with_child(out, i, nc)
    return out


def expand_abbrevs(doc: DerivationDoc, t: Term) -> Term:
    return _expand(t, expansion_map(doc))


def expand_judgment(doc: DerivationDoc, j: Judgment, defs: Optional[dict[str, Term]] = None) -> Judgment:
    if isinstance(j, JHole):
        return j
    if defs is None:
        defs = expansion_map(doc)
    updates = {}
    from .terms import JUDGMENT_SLOTS
    for slot in JUDGMENT_SLOTS[type(j)]:
        cur = getattr(j, slot)
        new = _expand(cur, defs)
        if new is not cur:
            updates[slot] = new
    return replace(j, **updates) if updates else j


def resolve_subtree(doc: DerivationDoc, name: str) -> SubtreeDef:
    for sd in doc.subtrees:
        if sd.name == name:
            return sd
    raise UnknownSubtree(name)


def subtree_index(doc: DerivationDoc, name: str) -> int:
    for i, sd in enumerate(doc.subtrees):
        if sd.name == name:
            return i
    raise UnknownSubtree(name)


# --------------------------------------------------------------------------
# edit commands


@dataclass(frozen=True)
class SetRule:
    node: str
    rule: str


@dataclass(frozen=True)
class ClearRule:
    node: str


@dataclass(frozen=True)
class AddPremise:
    node: str
    position: int


@dataclass(frozen=True)
class RemovePremise:
    node: str
    position: int


@dataclass(frozen=True)
class SetJudgment:
    node: str
    judgment: Judgment


@dataclass(frozen=True)
class EditJudgment:
    node: str
    path: Path
    term: Term


@dataclass(frozen=True)
class FillHole:
    node: str
    path: Path
    term: Term


@dataclass(frozen=True)
class MakeHole:
    node: str
    path: Path


@dataclass(frozen=True)
class DefineAbbrev:
    name: str
    term: Term
    # position is only meaningful when undoing a removal; None appends.
    position: Optional[int] = None


@dataclass(frozen=True)
class RemoveAbbrev:
    name: str


@dataclass(frozen=True)
class DefineSubtree:
    name: str
    position: Optional[int] = None


@dataclass(frozen=True)
class RemoveSubtree:
    name: str


@dataclass(frozen=True)
class InsertSubtreeRef:
    node: str
    subtree: str


@dataclass(frozen=True)
class SetFeedback:
    flag: str


EditCommand = Union[
    SetRule, ClearRule, AddPremise, RemovePremise,
    SetJudgment, EditJudgment, FillHole, MakeHole,
    DefineAbbrev, RemoveAbbrev, DefineSubtree, RemoveSubtree,
    InsertSubtreeRef, SetFeedback,
]


@dataclass(frozen=True)
class EditOutcome:
    doc: DerivationDoc
    created: tuple[str, ...] = ()
    removed: tuple[str, ...] = ()


def _check_name(name: str) -> None:
    if not _NAME_RE.match(name or ""):
        raise BadName(name)


def _fresh_nodes(doc: DerivationDoc, count: int) -> tuple[tuple[DerivNode, ...], int]:
    nodes = tuple(DerivNode(f"n{doc.next_id + i}", JHole()) for i in range(count))
    return nodes, doc.next_id + count


def _checked_judgment_edit(doc: DerivationDoc, j: Judgment, path: Path, term: Term) -> Judgment:
    """Replace j[path] with term, checking sorts on the abbrev-expanded term."""
    try:
        expected = sort_at(j, path)
    except PathOutOfRange:
        raise BadPath(f"no position {list(path)} in this judgment")
    _reject_schema_forms(term)
    expanded = expand_abbrevs(doc, term)
    if not well_sorted(expanded, expected):
        from .terms import describe_sort
        raise SortMismatch(expected, describe_sort(expanded))
    return replace_at(j, path, term)


def _judgment_terms(j: Judgment) -> tuple[Term, ...]:
    if isinstance(j, JHole):
        return ()
    from .terms import JUDGMENT_SLOTS
    return tuple(getattr(j, slot) for slot in JUDGMENT_SLOTS[type(j)])


def _abbrev_names_used(doc: DerivationDoc) -> set[str]:
    used: set[str] = set()

    def scan(t: Term) -> None:
        for _, s in subterms(t):
            if isinstance(s, Abbrev):
                used.add(s.name)

    for d in doc.prelude:
        scan(d.term)
    for _, n in iter_nodes(doc):
        for t in _judgment_terms(n.judgment):
            scan(t)
    return used


def _reject_schema_forms(t: Term) -> None:
    """Documents hold concrete terms; rule-schema forms may not leak in.

    Subst is also rejected: it only exists inside rule premises and has no
    document syntax, so admitting it would break text round-trips.
    """
    from .rules import CtxExt, MetaRef, Metavar
    from .terms import Subst
    for _, s in subterms(t):
        if isinstance(s, (MetaRef, CtxExt)):
            raise SortMismatch("a concrete term", "a rule pattern")
        if isinstance(s, Subst):
            raise SortMismatch("a concrete term", "a pending substitution")
        for field in ("name", "param", "var", "value"):
            if isinstance(getattr(s, field, None), Metavar):
                raise SortMismatch("a concrete term", "a rule pattern")


def apply_command(doc: DerivationDoc, cmd: EditCommand) -> EditOutcome:
    """Apply one edit, returning the new document plus created/removed ids.

    Raises a DerivError subclass and leaves the document untouched when the
    command does not fit the current state.
    """
    system = get_system(doc.system_id)

    if isinstance(cmd, SetRule):
        rule = system.get(cmd.rule)
        _, node = find_node(doc, cmd.node)
        if node.children:
            new_doc = _rewrite_node(doc, cmd.node, lambda n: replace(n, applied=RuleApp(cmd.rule)))
            return EditOutcome(new_doc)
        kids, nid = _fresh_nodes(doc, rule.arity)
        new_doc = _rewrite_node(
            doc, cmd.node, lambda n: replace(n, applied=RuleApp(cmd.rule), children=kids))
        return EditOutcome(replace(new_doc, next_id=nid), created=tuple(k.id for k in kids))

    if isinstance(cmd, ClearRule):
        find_node(doc, cmd.node)
        new_doc = _rewrite_node(doc, cmd.node, lambda n: replace(n, applied=RULE_HOLE))
        return EditOutcome(new_doc)

    if isinstance(cmd, AddPremise):
        _, node = find_node(doc, cmd.node)
        if isinstance(node.applied, SubtreeUse):
            raise BadPath("a subtree reference takes no premises")
        if not (0 <= cmd.position <= len(node.children)):
            raise BadPath(f"premise position {cmd.position} out of range")
        (kid,), nid = _fresh_nodes(doc, 1)
        kids = node.children[:cmd.position] + (kid,) + node.children[cmd.position:]
        new_doc = _rewrite_node(doc, cmd.node, lambda n: replace(n, children=kids))
        return EditOutcome(replace(new_doc, next_id=nid), created=(kid.id,))

    if isinstance(cmd, RemovePremise):
        _, node = find_node(doc, cmd.node)
        if not (0 <= cmd.position < len(node.children)):
            raise BadPath(f"premise position {cmd.position} out of range")
        gone = tuple(n.id for n in iter_owner_nodes(node.children[cmd.position]))
        kids = node.children[:cmd.position] + node.children[cmd.position + 1:]
        new_doc = _rewrite_node(doc, cmd.node, lambda n: replace(n, children=kids))
        return EditOutcome(new_doc, removed=gone)

    if isinstance(cmd, SetJudgment):
        _, node = find_node(doc, cmd.node)
        if not isinstance(cmd.judgment, JHole):
            for t in _judgment_terms(cmd.judgment):
                _reject_schema_forms(t)
            check_judgment(expand_judgment(doc, cmd.judgment), system.kind)
        new_doc = _rewrite_node(doc, cmd.node, lambda n: replace(n, judgment=cmd.judgment))
        return EditOutcome(new_doc)

    if isinstance(cmd, (EditJudgment, FillHole, MakeHole)):
        _, node = find_node(doc, cmd.node)
        if not cmd.path:
            raise BadPath("the empty path addresses the whole judgment; use SetJudgment")
        if isinstance(node.judgment, JHole):
            raise BadPath("the judgment is a hole; set it first")
        if isinstance(cmd, FillHole):
            try:
                cur = subterm_at(node.judgment, cmd.path)
            except PathOutOfRange:
                raise BadPath(f"no position {list(cmd.path)} in this judgment")
            if not isinstance(cur, Hole):
                raise BadPath(f"position {list(cmd.path)} is not a hole")
        term = Hole() if isinstance(cmd, MakeHole) else cmd.term
        new_j = _checked_judgment_edit(doc, node.judgment, cmd.path, term)
        new_doc = _rewrite_node(doc, cmd.node, lambda n: replace(n, judgment=new_j))
        return EditOutcome(new_doc)

    if isinstance(cmd, DefineAbbrev):
        _check_name(cmd.name)
        if any(d.name == cmd.name for d in doc.prelude):
            raise DuplicateName(cmd.name)
        _reject_schema_forms(cmd.term)
        expanded = _expand(cmd.term, expansion_map(doc))
        if not any(well_sorted(expanded, s) for s in
                   (SORT_EXPR, SORT_TYPE, SORT_PROP, SORT_CTX_TYPING, SORT_CTX_LOGIC)):
            from .terms import describe_sort
            raise SortMismatch("a definable term", describe_sort(expanded))
        pos = len(doc.prelude) if cmd.position is None else cmd.position
        if not (0 <= pos <= len(doc.prelude)):
            raise BadPath(f"prelude position {pos} out of range")
        prelude = doc.prelude[:pos] + (AbbrevDef(cmd.name, cmd.term),) + doc.prelude[pos:]
        return EditOutcome(replace(doc, prelude=prelude))

    if isinstance(cmd, RemoveAbbrev):
        if not any(d.name == cmd.name for d in doc.prelude):
            raise UnboundAbbrev(cmd.name)
        if cmd.name in _abbrev_names_used(doc):
            raise NameInUse(cmd.name)
        prelude = tuple(d for d in doc.prelude if d.name != cmd.name)
        return EditOutcome(replace(doc, prelude=prelude))

    if isinstance(cmd, DefineSubtree):
        _check_name(cmd.name)
        if any(sd.name == cmd.name for sd in doc.subtrees):
            raise DuplicateName(cmd.name)
        (tree,), nid = _fresh_nodes(doc, 1)
        pos = len(doc.subtrees) if cmd.position is None else cmd.position
        if not (0 <= pos <= len(doc.subtrees)):
            raise BadPath(f"subtree position {pos} out of range")
        subs = doc.subtrees[:pos] + (SubtreeDef(cmd.name, tree),) + doc.subtrees[pos:]
        return EditOutcome(replace(doc, subtrees=subs, next_id=nid), created=(tree.id,))

    if isinstance(cmd, RemoveSubtree):
        sd = resolve_subtree(doc, cmd.name)
        for _, n in iter_nodes(doc):
            if isinstance(n.applied, SubtreeUse) and n.applied.name == cmd.name:
                raise NameInUse(cmd.name)
        gone = tuple(n.id for n in iter_owner_nodes(sd.tree))
        subs = tuple(s for s in doc.subtrees if s.name != cmd.name)
        return EditOutcome(replace(doc, subtrees=subs), removed=gone)

    if isinstance(cmd, InsertSubtreeRef):
        owner, node = find_node(doc, cmd.node)
        target = subtree_index(doc, cmd.subtree)
        if owner != ROOT_OWNER and subtree_index(doc, owner) <= target:
            raise ForwardSubtreeRef(cmd.subtree)
        gone = tuple(n.id for c in node.children for n in iter_owner_nodes(c))
        new_doc = _rewrite_node(
            doc, cmd.node, lambda n: replace(n, applied=SubtreeUse(cmd.subtree), children=()))
        return EditOutcome(new_doc, removed=gone)

    if isinstance(cmd, SetFeedback):
        if cmd.flag not in (FEEDBACK_FULL, FEEDBACK_SILENT):
            raise BadName(cmd.flag)
        return EditOutcome(replace(doc, feedback=cmd.flag))

    raise TypeError(f"not an edit command: {cmd!r}")


# --------------------------------------------------------------------------
# affected nodes

def _subtree_refs(doc: DerivationDoc, name: str) -> list[str]:
    out = []
    for _, n in iter_nodes(doc):
        if isinstance(n.applied, SubtreeUse) and n.applied.name == name:
            out.append(n.id)
    return out


def affected_nodes(doc: DerivationDoc, cmd: EditCommand) -> set[str]:
    """Ids whose status can change when cmd is applied to doc.

    The ids refer to the document *after* the edit; deterministic id
    allocation lets callers apply the edit separately and reuse this set.
    """
    out = apply_command(doc, cmd)
    after = out.doc

    if isinstance(cmd, (DefineAbbrev, RemoveAbbrev, SetFeedback)):
        return set()

    seeds: set[str] = set(out.created)
    target = getattr(cmd, "node", None)
    if target is not None:
        seeds.add(target)
        parent = parent_of(after, target)
        if parent is not None:
            seeds.add(parent.id)

    # A change inside a subtree can flip every node that references it,
    # which can sit inside another subtree, and so on.
    owner_of = {n.id: owner for owner, n in iter_nodes(after)}
    parent_id = {}
    for _, n in iter_nodes(after):
        for c in n.children:
            parent_id[c.id] = n.id

    frontier = set(seeds)
    seen_subtrees: set[str] = set()
    while frontier:
        next_frontier: set[str] = set()
        for nid in frontier:
            owner = owner_of.get(nid)
            if owner is None or owner == ROOT_OWNER or owner in seen_subtrees:
                continue
            seen_subtrees.add(owner)
            for ref in _subtree_refs(after, owner):
                if ref not in seeds:
                    seeds.add(ref)
                    next_frontier.add(ref)
                p = parent_id.get(ref)
                if p is not None and p not in seeds:
                    seeds.add(p)
                    next_frontier.add(p)
        frontier = next_frontier
    return seeds


# --------------------------------------------------------------------------
# inversion

def _set_applied_cmds(scratch: DerivationDoc, node_id: str,
                      applied: Applied, want_children: int) -> tuple[list[EditCommand], DerivationDoc]:
    """Commands that give node_id the requested applied form and child count.

    The node is assumed to currently have no rule of interest; children are
    adjusted afterwards so rebuilds can fill them in.
    """
    cmds: list[EditCommand] = []

    def run(c: EditCommand) -> None:
        nonlocal scratch
        cmds.append(c)
        scratch = apply_command(scratch, c).doc

    if isinstance(applied, SubtreeUse):
        run(InsertSubtreeRef(node_id, applied.name))
        return cmds, scratch
    if isinstance(applied, RuleApp):
        run(SetRule(node_id, applied.name))
    elif isinstance(applied, RuleHole):
        _, cur = find_node(scratch, node_id)
        if not isinstance(cur.applied, RuleHole):
            run(ClearRule(node_id))
    _, cur = find_node(scratch, node_id)
    have = len(cur.children)
    while have > want_children:
        run(RemovePremise(node_id, want_children))
        have -= 1
    while have < want_children:
        run(AddPremise(node_id, have))
        have += 1
    return cmds, scratch


def _rebuild_cmds(scratch: DerivationDoc, node_id: str,
                  snapshot: DerivNode) -> tuple[list[EditCommand], DerivationDoc]:
    """Commands that turn the fresh hole node node_id into snapshot."""
    cmds: list[EditCommand] = []

    def run(c: EditCommand) -> None:
        nonlocal scratch
        cmds.append(c)
        scratch = apply_command(scratch, c).doc

    if not isinstance(snapshot.judgment, JHole):
        run(SetJudgment(node_id, snapshot.judgment))
    sub, scratch = _set_applied_cmds(scratch, node_id, snapshot.applied, len(snapshot.children))
    cmds.extend(sub)
    _, cur = find_node(scratch, node_id)
    for kid_now, kid_then in zip(cur.children, snapshot.children):
        sub, scratch = _rebuild_cmds(scratch, kid_now.id, kid_then)
        cmds.extend(sub)
    return cmds, scratch


def invert_edit(doc: DerivationDoc, cmd: EditCommand) -> list[EditCommand]:
    """Commands that undo cmd when applied to apply_command(doc, cmd).doc.

    Requires cmd to be valid for doc.  Node ids allocated while undoing are
    deterministic, so the returned commands reference ids that will exist by
    the time each command runs.
    """
    after = apply_command(doc, cmd).doc

    if isinstance(cmd, SetRule):
        _, before = find_node(doc, cmd.node)
        cmds, scratch = [], after
        if not before.children:
            _, now = find_node(after, cmd.node)
            for _ in now.children:
                cmds.append(RemovePremise(cmd.node, 0))
                scratch = apply_command(scratch, cmds[-1]).doc
        sub, _ = _set_applied_cmds(scratch, cmd.node, before.applied, len(before.children))
        cmds.extend(sub)
        return cmds

    if isinstance(cmd, ClearRule):
        _, before = find_node(doc, cmd.node)
        if isinstance(before.applied, RuleHole):
            return []
        cmds, _ = _set_applied_cmds(after, cmd.node, before.applied, len(before.children))
        return cmds

    if isinstance(cmd, AddPremise):
        return [RemovePremise(cmd.node, cmd.position)]

    if isinstance(cmd, RemovePremise):
        _, before = find_node(doc, cmd.node)
        snapshot = before.children[cmd.position]
        first = AddPremise(cmd.node, cmd.position)
        out = apply_command(after, first)
        cmds, _ = _rebuild_cmds(out.doc, out.created[0], snapshot)
        return [first] + cmds

    if isinstance(cmd, SetJudgment):
        _, before = find_node(doc, cmd.node)
        return [SetJudgment(cmd.node, before.judgment)]

    if isinstance(cmd, (EditJudgment, FillHole)):
        _, before = find_node(doc, cmd.node)
        old = subterm_at(before.judgment, cmd.path)
        if isinstance(old, Hole):
            return [MakeHole(cmd.node, cmd.path)]
        return [EditJudgment(cmd.node, cmd.path, old)]

    if isinstance(cmd, MakeHole):
        _, before = find_node(doc, cmd.node)
        old = subterm_at(before.judgment, cmd.path)
        if isinstance(old, Hole):
            return []
        return [FillHole(cmd.node, cmd.path, old)]

    if isinstance(cmd, DefineAbbrev):
        return [RemoveAbbrev(cmd.name)]

    if isinstance(cmd, RemoveAbbrev):
        for i, d in enumerate(doc.prelude):
            if d.name == cmd.name:
                return [DefineAbbrev(d.name, d.term, position=i)]
        raise UnboundAbbrev(cmd.name)

    if isinstance(cmd, DefineSubtree):
        return [RemoveSubtree(cmd.name)]

    if isinstance(cmd, RemoveSubtree):
        i = subtree_index(doc, cmd.name)
        sd = doc.subtrees[i]
        first = DefineSubtree(cmd.name, position=i)
        out = apply_command(after, first)
        cmds, _ = _rebuild_cmds(out.doc, out.created[0], sd.tree)
        return [first] + cmds

    if isinstance(cmd, InsertSubtreeRef):
        _, before = find_node(doc, cmd.node)
        scratch = after
        cmds: list[EditCommand] = []
        sub, scratch = _set_applied_cmds(scratch, cmd.node, before.applied, len(before.children))
        cmds.extend(sub)
        _, now = find_node(scratch, cmd.node)
        for kid_now, kid_then in zip(now.children, before.children):
            sub, scratch = _rebuild_cmds(scratch, kid_now.id, kid_then)
            cmds.extend(sub)
        return cmds

    if isinstance(cmd, SetFeedback):
        return [SetFeedback(doc.feedback)]

    raise TypeError(f"not an edit command: {cmd!r}")


# --------------------------------------------------------------------------
# canonical text form


def _applied_text(applied: Applied) -> str:
    if isinstance(applied, RuleApp):
        return applied.name
    if isinstance(applied, SubtreeUse):
        return f"use {applied.name}"
    return "?"


def _tree_lines(tree: DerivNode, depth: int, out: list[str]) -> None:
    from .printer import print_judgment
    indent = "  " * depth
    out.append(f"{indent}{print_judgment(tree.judgment)}  by {_applied_text(tree.applied)}")
    for c in tree.children:
        _tree_lines(c, depth + 1, out)


def print_document(doc: DerivationDoc) -> str:
    """Canonical text form; parsing it back yields an equal document
    (up to node ids)."""
    from .printer import print_term
    lines = [f"system {doc.system_id}"]
    if doc.feedback != FEEDBACK_FULL:
        lines.append(f"feedback {doc.feedback}")
    lines.append("")
    if doc.prelude:
        for d in doc.prelude:
            lines.append(f"def {d.name} = {print_term(d.term)}")
        lines.append("")
    for sd in doc.subtrees:
        lines.append(f"subtree {sd.name}:")
        _tree_lines(sd.tree, 1, lines)
        lines.append("")
    lines.append("derive:")
    _tree_lines(doc.root, 1, lines)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# whole-document validation (used after parsing)


def validate_document(doc: DerivationDoc) -> None:
    system = get_system(doc.system_id)
    if doc.feedback not in (FEEDBACK_FULL, FEEDBACK_SILENT):
        raise BadName(doc.feedback)

    seen: set[str] = set()
    for d in doc.prelude:
        _check_name(d.name)
        if d.name in seen:
            raise DuplicateName(d.name)
        seen.add(d.name)
    defs = expansion_map(doc)  # raises UnboundAbbrev on forward refs

    names: set[str] = set()
    for sd in doc.subtrees:
        _check_name(sd.name)
        if sd.name in names:
            raise DuplicateName(sd.name)
        names.add(sd.name)

    order = {sd.name: i for i, sd in enumerate(doc.subtrees)}
    ids: set[str] = set()
    for owner, n in iter_nodes(doc):
        if n.id in ids:
            raise DuplicateName(n.id)
        ids.add(n.id)
        if isinstance(n.applied, SubtreeUse):
            if n.children:
                raise BadPath("a subtree reference takes no premises")
            if n.applied.name not in order:
                raise UnknownSubtree(n.applied.name)
            if owner != ROOT_OWNER and order[owner] <= order[n.applied.name]:
                raise ForwardSubtreeRef(n.applied.name)
        if isinstance(n.applied, RuleApp) and not system.has(n.applied.name):
            # tolerated: the verifier reports it per node
            pass
        if not isinstance(n.judgment, JHole):
            check_judgment(expand_judgment(doc, n.judgment, defs), system.kind)
