"""The built-in rule systems: typing, big-step evaluation, natural deduction.

Schemas are written with explicit constructors; the search texts are phrased
so the rule panel's substring queries land on the intended groups.
"""

from __future__ import annotations

from .errors import UnknownSystem
from .rules import (
    Arith, CtxExt, Lookup, MetaRef, Metavar, Rule, RuleSystem, rule,
)
from .terms import (
    And, App, Bind, BoolLit, Entail, EvalJ, Falsum, Fun, If, Implies, Let,
    Not, NumLit, Or, Plus, Subst, TArrow, TBool, TNum, Typing, Var,
)


def _m(name: str, sort: str) -> MetaRef:
    return MetaRef(Metavar(name, sort))


def _typing_rules() -> tuple[Rule, ...]:
    G = _m("Γ", "ctx")
    x = Metavar("x", "name")
    n = Metavar("n", "num")
    T = _m("T", "type")
    T1 = _m("T1", "type")
    T2 = _m("T2", "type")
    M = _m("M", "expr")
    N = _m("N", "expr")
    e = _m("e", "expr")
    e1 = _m("e1", "expr")
    e2 = _m("e2", "expr")
    e3 = _m("e3", "expr")
    F = _m("F", "expr")
    E = _m("E", "expr")
    cat = "Typing"
    return (
        rule("T-Var", cat,
             Typing(G, Var(x), T),
             side_conditions=(Lookup("Γ", "x", "T"),),
             doc="A variable has the type given by its rightmost context binding."),
        rule("T-Num", cat,
             Typing(G, NumLit(n), TNum()),
             doc="A numeric literal has type Num in any context."),
        rule("T-True", cat,
             Typing(G, BoolLit(True), TBool()),
             doc="The literal true has type Bool."),
        rule("T-False", cat,
             Typing(G, BoolLit(False), TBool()),
             doc="The literal false has type Bool."),
        rule("T-Plus", cat,
             Typing(G, Plus(M, N), TNum()),
             premises=(Typing(G, M, TNum()), Typing(G, N, TNum())),
             doc="An addition has type Num when both operands do."),
        rule("T-If", cat,
             Typing(G, If(e1, e2, e3), T),
             premises=(Typing(G, e1, TBool()),
                       Typing(G, e2, T),
                       Typing(G, e3, T)),
             doc="A conditional tests a Bool; both branches share one type."),
        rule("T-Lam", cat,
             Typing(G, Fun(x, T1, e), TArrow(T1, T2)),
             premises=(Typing(CtxExt(G, Bind(x, T1)), e, T2),),
             doc="A function literal has an arrow type, parameter "
                 "annotation to body type."),
        rule("T-App", cat,
             Typing(G, App(F, E), T2),
             premises=(Typing(G, F, TArrow(T1, T2)), Typing(G, E, T1)),
             doc="Applying a function of type T1 -> T2 to a T1 argument "
                 "yields T2."),
        rule("T-Let", cat,
             Typing(G, Let(x, e1, e2), T2),
             premises=(Typing(G, e1, T1),
                       Typing(CtxExt(G, Bind(x, T1)), e2, T2)),
             doc="A let body is typed under the context extended with the "
                 "bound name's type."),
    )


def _eval_rules() -> tuple[Rule, ...]:
    x = Metavar("x", "name")
    n = Metavar("n", "num")
    n1 = Metavar("n1", "num")
    n2 = Metavar("n2", "num")
    T = _m("T", "type")
    e = _m("e", "expr")
    e1 = _m("e1", "expr")
    e2 = _m("e2", "expr")
    e3 = _m("e3", "expr")
    v = _m("v", "value")
    v1 = _m("v1", "value")
    v2 = _m("v2", "value")
    cat = "Evaluation"
    return (
        rule("E-Num", cat,
             EvalJ(NumLit(n), NumLit(n)),
             doc="A numeric literal evaluates to itself."),
        rule("E-True", cat,
             EvalJ(BoolLit(True), BoolLit(True)),
             doc="The literal true evaluates to itself."),
        rule("E-False", cat,
             EvalJ(BoolLit(False), BoolLit(False)),
             doc="The literal false evaluates to itself."),
        rule("E-Fun", cat,
             EvalJ(Fun(x, T, e), Fun(x, T, e)),
             doc="A function literal is already a value; it evaluates to "
                 "itself."),
        rule("E-Plus", cat,
             EvalJ(Plus(e1, e2), NumLit(n)),
             premises=(EvalJ(e1, NumLit(n1)), EvalJ(e2, NumLit(n2))),
             side_conditions=(Arith("n", "n1", "n2"),),
             doc="Evaluates both operands to numbers; the result is their "
                 "sum."),
        rule("E-IfTrue", cat,
             EvalJ(If(e1, e2, e3), v),
             premises=(EvalJ(e1, BoolLit(True)), EvalJ(e2, v)),
             doc="When the test evaluates to true, the conditional takes "
                 "the then branch."),
        rule("E-IfFalse", cat,
             EvalJ(If(e1, e2, e3), v),
             premises=(EvalJ(e1, BoolLit(False)), EvalJ(e3, v)),
             doc="When the test evaluates to false, the conditional takes "
                 "the else branch."),
        rule("E-App", cat,
             EvalJ(App(e1, e2), v),
             premises=(EvalJ(e1, Fun(x, T, e)),
                       EvalJ(e2, v2),
                       EvalJ(Subst(e, x, v2), v)),
             doc="Evaluates the function position to a function literal, "
                 "the argument to a value, then the body with the argument "
                 "substituted for the parameter."),
        rule("E-Let", cat,
             EvalJ(Let(x, e1, e2), v),
             premises=(EvalJ(e1, v1), EvalJ(Subst(e2, x, v1), v)),
             doc="Evaluates the bound expression to a value, then the body "
                 "with that value substituted for the name."),
    )


def _prop_rules() -> tuple[Rule, ...]:
    G = _m("Γ", "ctx")
    phi = _m("φ", "prop")
    psi = _m("ψ", "prop")
    chi = _m("χ", "prop")
    cat = "Propositional"
    return (
        rule("Asm", cat,
             Entail(G, phi),
             side_conditions=(Lookup("Γ", "φ", None),),
             doc="Closes a goal that is already among the assumptions."),
        rule("∧I", cat,
             Entail(G, And(phi, psi)),
             premises=(Entail(G, phi), Entail(G, psi)),
             doc="Proves a conjunction: establish the left part and the "
                 "right part separately."),
        rule("∧E1", cat,
             Entail(G, phi),
             premises=(Entail(G, And(phi, psi)),),
             doc="From a proof of p and q, keeps the left part p."),
        rule("∧E2", cat,
             Entail(G, psi),
             premises=(Entail(G, And(phi, psi)),),
             doc="From a proof of p and q, keeps the right part q."),
        rule("→I", cat,
             Entail(G, Implies(phi, psi)),
             premises=(Entail(CtxExt(G, phi), psi),),
             doc="Proves an implication by assuming its left side."),
        rule("→E", cat,
             Entail(G, psi),
             premises=(Entail(G, Implies(phi, psi)), Entail(G, phi)),
             doc="Modus ponens: from p => q together with p, concludes q."),
        rule("∨I1", cat,
             Entail(G, Or(phi, psi)),
             premises=(Entail(G, phi),),
             doc="Proves a disjunction from its left part."),
        rule("∨I2", cat,
             Entail(G, Or(phi, psi)),
             premises=(Entail(G, psi),),
             doc="Proves a disjunction from its right part."),
        rule("∨E", cat,
             Entail(G, chi),
             premises=(Entail(G, Or(phi, psi)),
                       Entail(CtxExt(G, phi), chi),
                       Entail(CtxExt(G, psi), chi)),
             doc="Case split on a disjunction: the goal must follow from "
                 "either part."),
        rule("¬I", cat,
             Entail(G, Not(phi)),
             premises=(Entail(CtxExt(G, phi), Falsum()),),
             doc="Proves a negation: assuming the proposition must lead to "
                 "absurdity."),
        rule("¬E", cat,
             Entail(G, Falsum()),
             premises=(Entail(G, phi), Entail(G, Not(phi))),
             doc="From a proposition together with its negation, concludes "
                 "absurdity."),
        rule("⊥E", cat,
             Entail(G, phi),
             premises=(Entail(G, Falsum()),),
             doc="From absurdity, concludes anything."),
    )


ALFA_TYPING = RuleSystem("alfa-typing", "typing", _typing_rules(), ("Typing",))
ALFA_EVAL = RuleSystem("alfa-eval", "eval", _eval_rules(), ("Evaluation",))
PROP_ND = RuleSystem("prop-nd", "entail", _prop_rules(), ("Propositional",))

SYSTEMS: dict[str, RuleSystem] = {
    s.id: s for s in (ALFA_TYPING, ALFA_EVAL, PROP_ND)
}


def get_system(system_id: str) -> RuleSystem:
    s = SYSTEMS.get(system_id)
    if s is None:
        raise UnknownSystem(system_id)
    return s
