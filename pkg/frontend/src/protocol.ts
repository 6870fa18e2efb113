/**
 * Wire types for the derivation service.
 *
 * These mirror the JSON the service emits field for field; the client
 * performs no verification of its own, it only displays what the
 * service reports.
 */

export type AppliedRef =
  | { kind: "rule"; name: string }
  | { kind: "subtree"; name: string }
  | { kind: "hole" };

export interface NodeError {
  locus: string; // "conclusion" | "premise:i" | "side:i" | "rule"
  path: number[];
  expected: string;
  found: string;
  message: string;
}

export interface NodeObligation {
  locus: string;
  paths: number[][];
  statement: string;
}

export interface NodeView {
  id: string;
  path: string;
  judgment: string;
  applied: AppliedRef;
  children: string[];
  status: string; // correct|incorrect|indeterminate, or resolved|unresolved in silent mode
  errors: NodeError[];
  obligations: NodeObligation[];
}

export interface SessionState {
  session: string;
  system: string;
  feedback: string; // "full" | "silent"
  tree_status: string; // "CompleteCorrect" | "Incomplete" | "HasErrors"
  summaries: Record<string, string>;
  prelude: { name: string; term: string }[];
  subtrees: { name: string; root: string }[];
  root: string;
  nodes: Record<string, NodeView>;
  can_undo: boolean;
  can_redo: boolean;
}

export interface RuleListing {
  name: string;
  category: string;
  doc_text: string;
  arity: number;
  conclusion: string;
  premises: string[];
  side_conditions: string[];
}

export interface RulesPayload {
  system: string;
  rules: RuleListing[];
}

export interface DocSpan {
  text: string;
  path: number[];
  metavar: string | null;
  color: number | null;
  bound: string | null;
}

export interface DocLine {
  part: string; // "conclusion" | "premise:i" | "side:i"
  text: string;
  spans: DocSpan[];
}

export interface DocLink {
  locus: string;
  pattern_path: number[];
  message: string;
}

export interface RuleDocPayload {
  name: string;
  category: string;
  doc_text: string;
  conclusion: DocLine;
  premises: DocLine[];
  side_conditions: DocLine[];
  links?: DocLink[]; // present only for ?node= requests
}

export interface ExportPayload {
  text: string;
  report: unknown;
}

export interface ErrorBody {
  error: string;
  message: string;
  span?: { line: number; col: number; end_line: number; end_col: number };
}

/** Commands accepted by POST /sessions/{id}/edits. */
export type EditCommand =
  | { command: "SetJudgment"; node: string; judgment: string }
  | { command: "EditJudgment"; node: string; path: number[]; term: string }
  | { command: "FillHole"; node: string; path: number[]; term: string }
  | { command: "MakeHole"; node: string; path: number[] }
  | { command: "SetRule"; node: string; rule: string }
  | { command: "ClearRule"; node: string }
  | { command: "AddPremise"; node: string; position: number }
  | { command: "RemovePremise"; node: string; position: number }
  | { command: "DefineAbbrev"; name: string; term: string }
  | { command: "RemoveAbbrev"; name: string }
  | { command: "DefineSubtree"; name: string }
  | { command: "RemoveSubtree"; name: string }
  | { command: "InsertSubtreeRef"; node: string; subtree: string }
  | { command: "SetFeedback"; flag: string };
