import pytest

from derivkit import (
    AddPremise,
    BadName,
    BadPath,
    ClearRule,
    Ctx,
    DefineAbbrev,
    DefineSubtree,
    DerivError,
    DuplicateName,
    EditJudgment,
    EvalJ,
    FillHole,
    ForwardSubtreeRef,
    Hole,
    InsertSubtreeRef,
    JHole,
    MakeHole,
    NameInUse,
    NumLit,
    Plus,
    RemoveAbbrev,
    RemovePremise,
    RemoveSubtree,
    RuleApp,
    RuleHole,
    SetFeedback,
    SetJudgment,
    SetRule,
    SortMismatch,
    SubtreeUse,
    TNum,
    UnknownNode,
    UnknownRule,
    affected_nodes,
    apply_command,
    find_node,
    invert_edit,
    new_document,
    parse_document,
    print_document,
    verify_document,
    verify_nodes,
)
from gen import random_command, random_script


def build(*cmds, system="alfa-eval"):
    doc = new_document(system)
    for c in cmds:
        doc = apply_command(doc, c).doc
    return doc


def test_new_document():
    doc = new_document("alfa-eval")
    assert isinstance(doc.root.judgment, JHole)
    assert isinstance(doc.root.applied, RuleHole)
    assert doc.root.id == "n0"


def test_set_rule_creates_arity_holes():
    doc = build(SetJudgment("n0", EvalJ(Plus(NumLit(1), NumLit(2)), NumLit(3))),
                SetRule("n0", "E-Plus"))
    assert [c.id for c in doc.root.children] == ["n1", "n2"]
    assert all(isinstance(c.judgment, JHole) for c in doc.root.children)
    # setting another rule on a node that already has children keeps them
    doc2 = apply_command(doc, SetRule("n0", "E-Num")).doc
    assert [c.id for c in doc2.root.children] == ["n1", "n2"]


def test_clear_rule_keeps_children():
    doc = build(SetJudgment("n0", EvalJ(Plus(NumLit(1), NumLit(2)), NumLit(3))),
                SetRule("n0", "E-Plus"),
                ClearRule("n0"))
    assert isinstance(doc.root.applied, RuleHole)
    assert len(doc.root.children) == 2


def test_deterministic_ids():
    a = build(SetJudgment("n0", EvalJ(NumLit(1), NumLit(1))), SetRule("n0", "E-Plus"))
    b = build(SetJudgment("n0", EvalJ(NumLit(1), NumLit(1))), SetRule("n0", "E-Plus"))
    assert print_document(a) == print_document(b)
    assert a.next_id == b.next_id == 3


def test_add_remove_premise():
    doc = build(SetJudgment("n0", EvalJ(NumLit(1), NumLit(1))),
                SetRule("n0", "E-Num"),
                AddPremise("n0", 0))
    assert len(doc.root.children) == 1
    doc = apply_command(doc, RemovePremise("n0", 0)).doc
    assert doc.root.children == ()
    with pytest.raises(BadPath):
        apply_command(doc, RemovePremise("n0", 0))


def test_judgment_edits():
    doc = build(SetJudgment("n0", EvalJ(Plus(NumLit(1), NumLit(2)), NumLit(3))))
    doc = apply_command(doc, EditJudgment("n0", (1,), NumLit(4))).doc
    assert doc.root.judgment.value == NumLit(4)
    doc = apply_command(doc, MakeHole("n0", (1,))).doc
    assert doc.root.judgment.value == Hole()
    doc = apply_command(doc, FillHole("n0", (1,), NumLit(3))).doc
    assert doc.root.judgment.value == NumLit(3)
    with pytest.raises(BadPath):
        apply_command(doc, FillHole("n0", (1,), NumLit(3)))  # not a hole now
    with pytest.raises(BadPath):
        apply_command(doc, EditJudgment("n0", (), NumLit(3)))  # whole judgment
    with pytest.raises(SortMismatch):
        apply_command(doc, EditJudgment("n0", (1,), TNum()))


def test_unknowns():
    doc = new_document("alfa-eval")
    with pytest.raises(UnknownNode):
        apply_command(doc, SetRule("n9", "E-Num"))
    with pytest.raises(UnknownRule):
        apply_command(doc, SetRule("n0", "T-Var"))


def test_abbrevs():
    doc = build(DefineAbbrev("G", Ctx(())), system="alfa-typing")
    assert [a.name for a in doc.prelude] == ["G"]
    with pytest.raises(DuplicateName):
        apply_command(doc, DefineAbbrev("G", Ctx(())))
    with pytest.raises(BadName):
        apply_command(doc, DefineAbbrev("9bad", Ctx(())))
    doc = apply_command(doc, RemoveAbbrev("G")).doc
    assert doc.prelude == ()


def test_remove_abbrev_in_use():
    from derivkit import Abbrev, Typing, Var

    doc = build(DefineAbbrev("G", Ctx(())), system="alfa-typing")
    doc = apply_command(
        doc, SetJudgment("n0", Typing(Abbrev("G"), NumLit(1), TNum()))).doc
    with pytest.raises(NameInUse):
        apply_command(doc, RemoveAbbrev("G"))


def test_subtrees():
    doc = build(DefineSubtree("S"), system="prop-nd")
    assert [s.name for s in doc.subtrees] == ["S"]
    sub_root = doc.subtrees[0].tree.id
    with pytest.raises(NameInUse):
        # referencing then removing is rejected
        d2 = apply_command(doc, InsertSubtreeRef("n0", "S")).doc
        apply_command(d2, RemoveSubtree("S"))
    # a subtree cannot reference itself or later ones
    with pytest.raises(ForwardSubtreeRef):
        apply_command(doc, InsertSubtreeRef(sub_root, "S"))


def test_subtree_ref_on_root():
    from derivkit import Atom, Entail

    j = Entail(Ctx((Atom("A"),)), Atom("A"))
    doc = build(DefineSubtree("S"),
                SetJudgment("n0", j),
                SetRule("n0", "Asm"),
                InsertSubtreeRef("n0", "S"),
                system="prop-nd")
    _, node = find_node(doc, "n0")
    assert node.applied == SubtreeUse("S")
    assert node.children == ()


def test_add_premise_on_subtree_use():
    doc = build(DefineSubtree("S"), InsertSubtreeRef("n0", "S"), system="prop-nd")
    with pytest.raises(BadPath):
        apply_command(doc, AddPremise("n0", 0))


def test_feedback_flag():
    doc = build(SetFeedback("silent"))
    assert doc.feedback == "silent"
    with pytest.raises(DerivError):
        apply_command(doc, SetFeedback("loud"))


# --- inversion -------------------------------------------------------------


def test_invert_each_command(rng):
    for _ in range(120):
        doc, _ = random_script(rng, steps=8)
        cmd = random_command(rng, doc)
        if cmd is None:
            continue
        inverse = invert_edit(doc, cmd)
        after = apply_command(doc, cmd).doc
        back = after
        for inv in inverse:
            back = apply_command(back, inv).doc
        assert print_document(back) == print_document(doc), (cmd, inverse)


def test_invert_remove_premise_restores_subtree_refs():
    from derivkit import Atom, Entail

    j = Entail(Ctx((Atom("A"),)), Atom("A"))
    doc = build(DefineSubtree("S"),
                SetJudgment("n0", j),
                SetRule("n0", "Asm"),
                AddPremise("n0", 0),
                system="prop-nd")
    kid = doc.root.children[0].id
    doc = apply_command(doc, InsertSubtreeRef(kid, "S")).doc
    cmd = RemovePremise("n0", 0)
    inverse = invert_edit(doc, cmd)
    after = apply_command(doc, cmd).doc
    for inv in inverse:
        after = apply_command(after, inv).doc
    assert print_document(after) == print_document(doc)


# --- affected nodes ---------------------------------------------------------


def test_affected_nodes_cover_status_changes(rng):
    for _ in range(150):
        doc, _ = random_script(rng, steps=8)
        cmd = random_command(rng, doc)
        if cmd is None:
            continue
        before = verify_document(doc)
        touched = affected_nodes(doc, cmd)
        after_doc = apply_command(doc, cmd).doc
        truth = verify_document(after_doc)
        incremental = verify_nodes(after_doc, before, touched)
        assert incremental.statuses == truth.statuses, cmd
        assert incremental.tree_status == truth.tree_status
        assert incremental.summaries == truth.summaries


def test_validate_roundtrip_after_edits(rng):
    for _ in range(60):
        doc, _ = random_script(rng, steps=10)
        text = print_document(doc)
        assert print_document(parse_document(text)) == text
