/**
 * Hand-built payloads in the exact shape the service emits, so renderer
 * and model tests run without a server. The integration suite checks the
 * same render paths against live responses.
 */

import type {
  NodeView,
  RuleDocPayload,
  SessionState,
} from "../src/protocol.js";

export function node(partial: Partial<NodeView> & { id: string }): NodeView {
  return {
    path: partial.id,
    judgment: "?",
    applied: { kind: "hole" },
    children: [],
    status: "indeterminate",
    errors: [],
    obligations: [],
    ...partial,
  };
}

/** `1 + 2 evalto 3` by E-Plus over two E-Num leaves, all correct. */
export function plusState(): SessionState {
  const nodes: Record<string, NodeView> = {
    n0: node({
      id: "n0",
      path: "root",
      judgment: "1 + 2 evalto 3",
      applied: { kind: "rule", name: "E-Plus" },
      children: ["n1", "n2"],
      status: "correct",
    }),
    n1: node({
      id: "n1",
      path: "root.0",
      judgment: "1 evalto 1",
      applied: { kind: "rule", name: "E-Num" },
      status: "correct",
    }),
    n2: node({
      id: "n2",
      path: "root.1",
      judgment: "2 evalto 2",
      applied: { kind: "rule", name: "E-Num" },
      status: "correct",
    }),
  };
  return {
    session: "s1",
    system: "alfa-eval",
    feedback: "full",
    tree_status: "CompleteCorrect",
    summaries: { root: "CompleteCorrect" },
    prelude: [],
    subtrees: [],
    root: "n0",
    nodes,
    can_undo: false,
    can_redo: false,
  };
}

/** E-Plus schema documentation with the bindings of plusState's root. */
export function plusDoc(): RuleDocPayload {
  const mv = (text: string, path: number[], color: number, bound: string) => ({
    text,
    path,
    metavar: text,
    color,
    bound,
  });
  const lit = (text: string) => ({
    text,
    path: [],
    metavar: null,
    color: null,
    bound: null,
  });
  return {
    name: "E-Plus",
    category: "Evaluation",
    doc_text: "Evaluates both operands to numbers; the result is their sum.",
    conclusion: {
      part: "conclusion",
      text: "e1 + e2 evalto n",
      spans: [mv("e1", [0, 0], 0, "1"), lit(" + "), mv("e2", [0, 1], 1, "2"), lit(" evalto "), mv("n", [1], 4, "3")],
    },
    premises: [
      {
        part: "premise:0",
        text: "e1 evalto n1",
        spans: [mv("e1", [0], 0, "1"), lit(" evalto "), mv("n1", [1], 2, "1")],
      },
      {
        part: "premise:1",
        text: "e2 evalto n2",
        spans: [mv("e2", [0], 1, "2"), lit(" evalto "), mv("n2", [1], 3, "2")],
      },
    ],
    side_conditions: [
      {
        part: "side:0",
        text: "n = n1 + n2",
        spans: [mv("n", [], 4, "3"), lit(" = "), mv("n1", [], 2, "1"), lit(" + "), mv("n2", [], 3, "2")],
      },
    ],
    links: [],
  };
}
