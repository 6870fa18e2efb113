"""Per-node verification and document-level status folding.

Classification is local: a node's status depends on its own judgment, the
rule it claims, and the judgments (not the statuses) of its children.  A
referenced subtree contributes its root judgment and its own summary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .document import (
    DerivNode,
    DerivationDoc,
    EditCommand,
    ROOT_OWNER,
    RuleHole,
    SubtreeUse,
    affected_nodes,
    apply_command,
    expand_judgment,
    expansion_map,
    iter_owner_nodes,
)
from .printer import describe_found, print_judgment
from .rules import (
    CONCLUSION,
    Locus,
    MatchState,
    Premise,
    RULE_APPLICATION,
    SideCondition,
    check_side_into,
    locus_str,
    match_judgment_into,
)
from .systems import get_system
from .terms import Judgment, No, Path, Unknown, eq3_judgment, subterm_at
from .errors import UnknownNode

COMPLETE_CORRECT = "CompleteCorrect"
INCOMPLETE = "Incomplete"
HAS_ERRORS = "HasErrors"


@dataclass(frozen=True)
class VerifyError:
    """A localized defect: the position that is wrong and why."""

    node_id: str
    locus: Locus
    path: Path
    expected: str
    found: str
    message: str
    pattern_path: Optional[Path] = None


@dataclass(frozen=True)
class Obligation:
    """What still has to be filled in before the node can be judged."""

    node_id: str
    locus: Locus
    paths: tuple[Path, ...]
    statement: str


@dataclass(frozen=True)
class Correct:
    bindings: dict


@dataclass(frozen=True)
class Incorrect:
    errors: tuple[VerifyError, ...]
    bindings: dict


@dataclass(frozen=True)
class Indeterminate:
    obligations: tuple[Obligation, ...]
    bindings: dict


NodeStatus = Union[Correct, Incorrect, Indeterminate]

_STATUS_NAMES = {Correct: "correct", Incorrect: "incorrect", Indeterminate: "indeterminate"}


def status_name(s: NodeStatus) -> str:
    return _STATUS_NAMES[type(s)]


def fold_status(statuses: Iterable[NodeStatus]) -> str:
    worst = COMPLETE_CORRECT
    for s in statuses:
        if isinstance(s, Incorrect):
            return HAS_ERRORS
        if isinstance(s, Indeterminate):
            worst = INCOMPLETE
    return worst


@dataclass
class DocReport:
    statuses: dict[str, NodeStatus]
    owners: dict[str, str]
    summaries: dict[str, str]
    tree_status: str


# --------------------------------------------------------------------------
# one node


def _message(expected: str, found: str) -> str:
    return f"Expected {expected}, but found {found}."


_DEFAULT_OBLIGATION = {
    "Conclusion": "the conclusion still has holes",
    "Premise": "premise {i} still has holes",
    "SideCondition": "side condition {i} is not determined yet",
    "RuleApplication": "no rule has been chosen",
}


def _obligation_statement(locus: Locus, note: str) -> str:
    if note:
        return note
    if isinstance(locus, Premise):
        return _DEFAULT_OBLIGATION["Premise"].format(i=locus.index + 1)
    if isinstance(locus, SideCondition):
        return _DEFAULT_OBLIGATION["SideCondition"].format(i=locus.index + 1)
    return _DEFAULT_OBLIGATION[type(locus).__name__]


def _errors_from_state(node_id: str, st: MatchState) -> list[VerifyError]:
    out: list[VerifyError] = []
    seen: set = set()
    for m in st.mismatches:
        entries = [(m.locus, m.path, m.expected, m.found, m.pattern_path)]
        if m.origin is not None and m.origin != (m.locus, m.path):
            # The conflicting binding is equally suspect: report its site too,
            # with the roles of the two values swapped.
            entries.append((m.origin[0], m.origin[1], m.found, m.expected, None))
        for locus, path, exp, fnd, ppath in entries:
            key = (locus_str(locus), path, exp, fnd)
            if key in seen:
                continue
            seen.add(key)
            out.append(VerifyError(node_id, locus, path, exp, fnd,
                                   _message(exp, fnd), ppath))
    return out


def _obligations_from_state(node_id: str, st: MatchState) -> list[Obligation]:
    out: list[Obligation] = []
    seen: set = set()
    for b in st.blocked:
        stmt = _obligation_statement(b.locus, b.note)
        key = (locus_str(b.locus), b.paths, stmt)
        if key in seen:
            continue
        seen.add(key)
        out.append(Obligation(node_id, b.locus, b.paths, stmt))
    return out


def _subtree_use_status(doc: DerivationDoc, defs: dict, node: DerivNode,
                        name: str, sub_info: dict) -> NodeStatus:
    info = sub_info.get(name)
    if info is None:
        if any(sd.name == name for sd in doc.subtrees):
            msg = f"subtree {name} is defined later and cannot be referenced here"
        else:
            msg = f"subtree {name} is not defined"
        err = VerifyError(node.id, RULE_APPLICATION, (), "a defined subtree", name, msg)
        return Incorrect((err,), {})

    root_j, summary = info
    here = expand_judgment(doc, node.judgment, defs)
    eq = eq3_judgment(here, root_j)

    errors: list[VerifyError] = []
    if isinstance(eq, No):
        w = eq.witness
        if w:
            exp = describe_found(subterm_at(root_j, w))
            fnd = describe_found(subterm_at(here, w))
        else:
            exp = print_judgment(root_j)
            fnd = print_judgment(here)
        errors.append(VerifyError(node.id, CONCLUSION, w, exp, fnd, _message(exp, fnd)))
    if summary == HAS_ERRORS:
        errors.append(VerifyError(
            node.id, RULE_APPLICATION, (), "a correct subtree",
            f"errors inside {name}", f"subtree {name} has errors"))
    if errors:
        return Incorrect(tuple(errors), {})

    obls: list[Obligation] = []
    if isinstance(eq, Unknown):
        obls.append(Obligation(node.id, CONCLUSION, eq.holes,
                               f"holes remain between this judgment and subtree {name}"))
    if summary == INCOMPLETE:
        obls.append(Obligation(node.id, RULE_APPLICATION, (),
                               f"subtree {name} is not finished"))
    if obls:
        return Indeterminate(tuple(obls), {})
    return Correct({})


def _rule_app_status(doc: DerivationDoc, system, defs: dict, node: DerivNode,
                     name: str) -> NodeStatus:
    if not system.has(name):
        err = VerifyError(node.id, RULE_APPLICATION, (),
                          f"a rule of {system.id}", name,
                          f"unknown rule {name!r}")
        return Incorrect((err,), {})
    rule = system.get(name)

    st = MatchState()
    st.kind = system.kind
    subject = expand_judgment(doc, node.judgment, defs)
    match_judgment_into(rule.conclusion, subject, CONCLUSION, st)

    k, m = rule.arity, len(node.children)
    arity_error: Optional[VerifyError] = None
    if m != k:
        arity_error = VerifyError(
            node.id, RULE_APPLICATION, (), f"{k} premises", f"{m} premises",
            f"rule {rule.name} expects {k} premises, found {m}")
    else:
        for i, child in enumerate(node.children):
            match_judgment_into(rule.premises[i],
                                expand_judgment(doc, child.judgment, defs),
                                Premise(i), st)
        for i, sc in enumerate(rule.side_conditions):
            check_side_into(sc, i, st)

    errors = _errors_from_state(node.id, st)
    if arity_error is not None:
        errors.append(arity_error)
    bindings = dict(st.bindings)
    if errors:
        return Incorrect(tuple(errors), bindings)
    if st.blocked:
        return Indeterminate(tuple(_obligations_from_state(node.id, st)), bindings)
    return Correct(bindings)


def node_status(doc: DerivationDoc, system, defs: dict, sub_info: dict,
                node: DerivNode) -> NodeStatus:
    applied = node.applied
    if isinstance(applied, RuleHole):
        obl = Obligation(node.id, RULE_APPLICATION, ((),),
                         _DEFAULT_OBLIGATION["RuleApplication"])
        return Indeterminate((obl,), {})
    if isinstance(applied, SubtreeUse):
        return _subtree_use_status(doc, defs, node, applied.name, sub_info)
    return _rule_app_status(doc, system, defs, node, applied.name)


# --------------------------------------------------------------------------
# whole document


def verify_document(doc: DerivationDoc) -> DocReport:
    system = get_system(doc.system_id)
    defs = expansion_map(doc)
    statuses: dict[str, NodeStatus] = {}
    owners: dict[str, str] = {}
    summaries: dict[str, str] = {}
    sub_info: dict[str, tuple[Judgment, str]] = {}

    def do_tree(owner: str, tree: DerivNode) -> None:
        for n in iter_owner_nodes(tree):
            owners[n.id] = owner
            statuses[n.id] = node_status(doc, system, defs, sub_info, n)
        summaries[owner] = fold_status(
            statuses[n.id] for n in iter_owner_nodes(tree))

    for sd in doc.subtrees:
        do_tree(sd.name, sd.tree)
        sub_info[sd.name] = (expand_judgment(doc, sd.tree.judgment, defs),
                             summaries[sd.name])
    do_tree(ROOT_OWNER, doc.root)

    return DocReport(statuses, owners, summaries, fold_status(statuses.values()))


def verify_node(doc: DerivationDoc, node_id: str) -> NodeStatus:
    """Convenience wrapper: the status one full verification gives node_id."""
    report = verify_document(doc)
    if node_id not in report.statuses:
        raise UnknownNode(node_id)
    return report.statuses[node_id]


def verify_nodes(doc: DerivationDoc, prev: DocReport, ids: set[str]) -> DocReport:
    """Re-verify only ``ids`` (plus nodes unseen by ``prev``), reusing every
    other status from ``prev``.  Summaries are refolded from scratch."""
    system = get_system(doc.system_id)
    defs = expansion_map(doc)
    statuses: dict[str, NodeStatus] = {}
    owners: dict[str, str] = {}
    summaries: dict[str, str] = {}
    sub_info: dict[str, tuple[Judgment, str]] = {}

    def do_tree(owner: str, tree: DerivNode) -> None:
        for n in iter_owner_nodes(tree):
            owners[n.id] = owner
            if n.id in ids or n.id not in prev.statuses:
                statuses[n.id] = node_status(doc, system, defs, sub_info, n)
            else:
                statuses[n.id] = prev.statuses[n.id]
        summaries[owner] = fold_status(
            statuses[n.id] for n in iter_owner_nodes(tree))

    for sd in doc.subtrees:
        do_tree(sd.name, sd.tree)
        sub_info[sd.name] = (expand_judgment(doc, sd.tree.judgment, defs),
                             summaries[sd.name])
    do_tree(ROOT_OWNER, doc.root)

    return DocReport(statuses, owners, summaries, fold_status(statuses.values()))


def apply_edit(doc: DerivationDoc, cmd: EditCommand,
               prev_report: Optional[DocReport] = None
               ) -> tuple[DerivationDoc, DocReport, set[str]]:
    """Validate and apply one edit, then re-verify what it could have changed.

    Returns the new document, its report, and the re-verified node ids.
    With no ``prev_report`` the whole document is verified.
    """
    delta = affected_nodes(doc, cmd)
    out = apply_command(doc, cmd)
    if prev_report is None:
        report = verify_document(out.doc)
    else:
        report = verify_nodes(out.doc, prev_report, delta)
    return out.doc, report, delta
