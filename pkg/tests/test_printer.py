import pytest

from derivkit import (
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
    Let,
    Not,
    NumLit,
    Or,
    Plus,
    TArrow,
    TBool,
    TNum,
    Typing,
    Var,
    parse_judgment,
    parse_term,
    print_judgment,
    print_term,
)
from gen import gen_judgment

A, B, C = Atom("A"), Atom("B"), Atom("C")

CASES = [
    (Plus(Plus(NumLit(1), NumLit(2)), NumLit(3)), "1 + 2 + 3"),
    (Plus(NumLit(1), Plus(NumLit(2), NumLit(3))), "1 + (2 + 3)"),
    (App(App(Var("f"), Var("x")), Var("y")), "f x y"),
    (App(Var("f"), App(Var("g"), Var("x"))), "f (g x)"),
    (App(Fun("x", TNum(), Var("x")), NumLit(1)), "(fun x:Num -> x) 1"),
    (Fun("x", TNum(), Plus(Var("x"), NumLit(1))), "fun x:Num -> x + 1"),
    (Fun("f", TArrow(TNum(), TBool()), Var("f")), "fun f:Num -> Bool -> f"),
    (Let("x", NumLit(1), Plus(Var("x"), Var("x"))), "let x = 1 in x + x"),
    (Plus(NumLit(1), Hole()), "1 + ?"),
    (If(BoolLit(True), NumLit(1), NumLit(2)), "if true then 1 else 2"),
    (Plus(If(BoolLit(True), NumLit(1), NumLit(2)), NumLit(3)),
     "(if true then 1 else 2) + 3"),
    (TArrow(TArrow(TNum(), TNum()), TBool()), "(Num -> Num) -> Bool"),
    (TArrow(TNum(), TArrow(TNum(), TBool())), "Num -> Num -> Bool"),
    (Implies(A, Implies(B, A)), "A => B => A"),
    (Implies(Implies(A, B), A), "(A => B) => A"),
    (And(Or(A, B), C), r"(A \/ B) /\ C"),
    (Or(A, And(B, C)), r"A \/ B /\ C"),
    (Not(Not(A)), "~~A"),
    (Not(Implies(A, B)), "~(A => B)"),
    (And(A, And(B, C)), r"A /\ (B /\ C)"),
    (Falsum(), "_|_"),
    (Abbrev("G"), "$G"),
    (Ctx(()), "[]"),
    (Ctx((Bind("x", TNum()), Bind("y", TArrow(TNum(), TNum())))),
     "[x:Num, y:Num -> Num]"),
    (Ctx((A, Implies(A, B))), "[A, A => B]"),
]


@pytest.mark.parametrize("term,text", CASES)
def test_exact_form(term, text):
    assert print_term(term) == text


PARSE_SORT = {
    "expr": ("1 + 2 + 3", "f x y", "(fun x:Num -> x) 1", "let x = 1 in x + x"),
    "type": ("(Num -> Num) -> Bool", "Num -> Num -> Bool"),
    "prop": ("A => B => A", r"(A \/ B) /\ C", "~~A", "~(A => B)"),
}


@pytest.mark.parametrize("term,text", CASES)
def test_printed_form_reparses(term, text):
    for sort in ("expr", "type", "prop", "ctx.typing", "ctx.logic"):
        try:
            back = parse_term(text, sort)
        except Exception:
            continue
        if back == term:
            return
    pytest.fail(f"printed form {text!r} did not reparse to the original")


def test_judgment_forms():
    assert print_judgment(Typing(Ctx(()), NumLit(1), TNum())) == "[] |- 1 : Num"
    assert print_judgment(EvalJ(Plus(NumLit(1), NumLit(2)), NumLit(3))) == "1 + 2 evalto 3"
    assert print_judgment(Entail(Ctx((A,)), Or(A, B))) == r"[A] |- A \/ B"
    assert print_judgment(JHole()) == "?"


def test_judgment_roundtrip_random(rng):
    kinds = {"typing": "typing", "eval": "eval", "entail": "entail"}
    for _ in range(500):
        kind = rng.choice(list(kinds))
        j = gen_judgment(rng, kind)
        assert parse_judgment(print_judgment(j), kind) == j


def test_no_redundant_parens(rng):
    # every '(' in printed output is needed: stripping any one pair either
    # breaks the parse or changes the tree
    import re

    for _ in range(120):
        j = gen_judgment(rng, "eval")
        text = print_judgment(j)
        opens = [m.start() for m in re.finditer(r"\(", text)]
        for o in opens:
            depth = 0
            for i in range(o, len(text)):
                if text[i] == "(":
                    depth += 1
                elif text[i] == ")":
                    depth -= 1
                    if depth == 0:
                        stripped = text[:o] + text[o + 1:i] + text[i + 1:]
                        break
            try:
                back = parse_judgment(stripped, "eval")
            except Exception:
                continue
            assert back != j, f"parens removable in {text!r} -> {stripped!r}"
