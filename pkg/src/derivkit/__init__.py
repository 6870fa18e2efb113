"""Rule-based derivation trees with live verification.

Build typing, evaluation, and natural-deduction derivations node by node,
leave holes anywhere, and get per-node feedback after every edit: each node
is correct, incorrect with localized errors, or indeterminate with the
obligations that remain open.
"""

from .errors import (
    BadName,
    BadPath,
    DerivError,
    DuplicateName,
    ForwardSubtreeRef,
    NameInUse,
    NothingToRedo,
    NothingToUndo,
    OpenValue,
    PathOutOfRange,
    SortMismatch,
    UnboundAbbrev,
    UnknownCategory,
    UnknownNode,
    UnknownRule,
    UnknownSession,
    UnknownSubtree,
    UnknownSystem,
)
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
    Let,
    No,
    Not,
    NumLit,
    Or,
    Plus,
    Subst,
    TArrow,
    TBool,
    TNum,
    Term,
    TriBool,
    Typing,
    Unknown,
    Var,
    Yes,
    children,
    ctx_lookup,
    eq3,
    eq3_judgment,
    free_vars,
    hole_paths,
    is_closed,
    is_value,
    judgment_hole_paths,
    replace_at,
    sort_at,
    substitute,
    subterm_at,
    well_sorted,
)
from .printer import print_judgment, print_term
from .rules import (
    Arith,
    Blocked,
    Conclusion,
    CtxExt,
    IsValue,
    Locus,
    Lookup,
    Matched,
    MetaRef,
    Metavar,
    Mismatch,
    Premise,
    Rule,
    RuleApplication,
    RuleSystem,
    SideCondition,
    list_rules,
    locus_str,
    match_schema,
    rule,
    rule_doc,
)
from .systems import SYSTEMS, get_system
from .document import (
    AddPremise,
    ClearRule,
    DefineAbbrev,
    DefineSubtree,
    DerivNode,
    DerivationDoc,
    EditJudgment,
    FillHole,
    InsertSubtreeRef,
    MakeHole,
    RemoveAbbrev,
    RemovePremise,
    RemoveSubtree,
    RuleApp,
    RuleHole,
    SetFeedback,
    SetJudgment,
    SetRule,
    SubtreeUse,
    affected_nodes,
    apply_command,
    find_node,
    invert_edit,
    new_document,
    print_document,
)
from .parser import (
    ParseError,
    parse_document,
    parse_document_with_spans,
    parse_judgment,
    parse_term,
)
from .verify import (
    COMPLETE_CORRECT,
    HAS_ERRORS,
    INCOMPLETE,
    Correct,
    DocReport,
    Incorrect,
    Indeterminate,
    Obligation,
    VerifyError,
    apply_edit,
    fold_status,
    status_name,
    verify_document,
    verify_node,
    verify_nodes,
)
from .report import render_human, render_summary, report_json
from .service import create_app

__version__ = "0.1.0"
