/**
 * Pure HTML builders for every pane. Nothing in here touches the DOM or
 * the network, so the whole rendering contract is unit-testable as
 * string in, string out.
 *
 * Status handling is deliberately permissive: an unknown status string
 * renders with neutral styling rather than crashing, and error detail is
 * emitted only for an explicit "incorrect" status, so silent-mode
 * sessions (statuses "resolved"/"unresolved") can never leak
 * expected/found text no matter what else the payload carries.
 */

import { colorClass } from "./colors.js";
import type {
  DocLine,
  NodeView,
  RuleDocPayload,
  RuleListing,
  RulesPayload,
  SessionState,
} from "./protocol.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// ---------------------------------------------------------------------------
// status badges

interface BadgeSpec {
  cls: string;
  glyph: string;
  label: string;
}

const BADGES: Record<string, BadgeSpec> = {
  correct: { cls: "b-ok", glyph: "✓", label: "correct" },
  incorrect: { cls: "b-err", glyph: "✗", label: "incorrect" },
  indeterminate: { cls: "b-hole", glyph: "?", label: "open" },
  resolved: { cls: "b-ok", glyph: "✓", label: "resolved" },
  unresolved: { cls: "b-flat", glyph: "•", label: "unresolved" },
};

const NEUTRAL_BADGE: BadgeSpec = { cls: "b-flat", glyph: "·", label: "unknown" };

export function badgeFor(status: string): BadgeSpec {
  return BADGES[status] ?? NEUTRAL_BADGE;
}

export function renderBadge(node: NodeView): string {
  const b = badgeFor(node.status);
  const notes = node.obligations.map((o) => o.statement).join("; ");
  const title = notes ? `${b.label}: ${notes}` : b.label;
  return `<span class="badge ${b.cls}" title="${escapeHtml(title)}">${b.glyph}</span>`;
}

// ---------------------------------------------------------------------------
// judgment text decoration

export interface Decoration {
  start: number;
  end: number;
  cls: string;
  mv?: string;
}

/**
 * Assign bound metavariable spans to occurrences of their bound text in
 * a concrete judgment, scanning left to right so repeated values land on
 * successive occurrences. Spans whose text cannot be found decorate
 * nothing; rendering must survive any judgment.
 */
export function outlineDecorations(judgment: string, line: DocLine): Decoration[] {
  const out: Decoration[] = [];
  let cursor = 0;
  for (const span of line.spans) {
    if (!span.metavar || span.bound === null || span.color === null) continue;
    const at = judgment.indexOf(span.bound, cursor);
    if (at < 0) continue;
    out.push({
      start: at,
      end: at + span.bound.length,
      cls: `mv-outline ${colorClass(span.color)}`,
      mv: span.metavar,
    });
    cursor = at + span.bound.length;
  }
  return out;
}

const WORDISH = /[A-Za-z0-9_]/;

function cleanBoundary(text: string, start: number, end: number): boolean {
  const before = start === 0 ? "" : text[start - 1];
  const after = end >= text.length ? "" : text[end];
  const inner = text.slice(start, end);
  if (!WORDISH.test(inner[0] ?? "") && !WORDISH.test(inner[inner.length - 1] ?? "")) {
    return true;
  }
  return !(before && WORDISH.test(before)) && !(after && WORDISH.test(after));
}

/**
 * Best-effort red mark on the offending subterm: the reported `found`
 * text is searched for at a token boundary. Errors whose found side is
 * descriptive prose simply mark nothing here; the row styling and the
 * sidebar still carry them.
 */
export function errorDecorations(judgment: string, node: NodeView): Decoration[] {
  if (node.status !== "incorrect") return [];
  const out: Decoration[] = [];
  for (const err of node.errors) {
    let from = 0;
    while (from <= judgment.length) {
      const at = judgment.indexOf(err.found, from);
      if (at < 0) break;
      if (cleanBoundary(judgment, at, at + err.found.length)) {
        out.push({ start: at, end: at + err.found.length, cls: "err-span" });
        break;
      }
      from = at + 1;
    }
  }
  return out;
}

/** Escape `text` and wrap the given non-overlapping ranges in spans. */
export function renderDecorated(text: string, decorations: Decoration[]): string {
  const sorted = [...decorations].sort((a, b) => a.start - b.start || b.end - a.end);
  let html = "";
  let pos = 0;
  for (const d of sorted) {
    if (d.start < pos || d.end > text.length) continue; // drop overlaps
    html += escapeHtml(text.slice(pos, d.start));
    const mv = d.mv ? ` data-mv="${escapeHtml(d.mv)}"` : "";
    html += `<span class="${d.cls}"${mv}>${escapeHtml(text.slice(d.start, d.end))}</span>`;
    pos = d.end;
  }
  html += escapeHtml(text.slice(pos));
  return html;
}

// ---------------------------------------------------------------------------
// derivation tree

export interface TreeOptions {
  selection?: string;
  /** judgment decorations per node id (metavariable outlines) */
  outlines?: Map<string, Decoration[]>;
}

function appliedChip(node: NodeView): string {
  const a = node.applied;
  if (a.kind === "rule") return `<span class="rule-chip">by ${escapeHtml(a.name)}</span>`;
  if (a.kind === "subtree") {
    return `<span class="rule-chip subtree-chip">use ${escapeHtml(a.name)}</span>`;
  }
  return `<span class="rule-chip hole-chip">by ?</span>`;
}

export function renderNodeRow(node: NodeView, opts: TreeOptions = {}): string {
  const classes = ["node-row", `st-${badgeFor(node.status).cls}`];
  if (node.id === opts.selection) classes.push("selected");
  const decorations = [
    ...(opts.outlines?.get(node.id) ?? []),
    ...errorDecorations(node.judgment, node),
  ];
  const judgment = renderDecorated(node.judgment, decorations);
  let warn = "";
  if (node.status === "incorrect" && node.errors.length > 0) {
    const msgs = node.errors.map((e) => `${e.locus}: ${e.message}`).join("\n");
    warn = `<span class="err-icon" title="${escapeHtml(msgs)}">⚠</span>`;
  }
  return (
    `<div class="node-row-wrap" data-node-row="${escapeHtml(node.id)}">` +
    `<div class="${classes.join(" ")}" data-node="${escapeHtml(node.id)}">` +
    `${renderBadge(node)}<span class="judgment">${judgment}</span>` +
    `${appliedChip(node)}${warn}</div></div>`
  );
}

function renderNodeBlock(state: SessionState, id: string, opts: TreeOptions): string {
  const node = state.nodes[id];
  if (!node) return "";
  let inner = "";
  if (node.children.length > 0) {
    const kids = node.children.map((c) => renderNodeBlock(state, c, opts)).join("");
    inner = `<div class="premises">${kids}</div><div class="infer-bar"></div>`;
  }
  return `<div class="deriv-node" data-block="${escapeHtml(id)}">${inner}${renderNodeRow(node, opts)}</div>`;
}

/** The main derivation plus one labelled block per named subtree. */
export function renderTree(state: SessionState, opts: TreeOptions = {}): string {
  let html = "";
  for (const st of state.subtrees) {
    html +=
      `<div class="subtree-def"><div class="subtree-label">subtree ${escapeHtml(st.name)}</div>` +
      renderNodeBlock(state, st.root, opts) +
      `</div>`;
  }
  html += renderNodeBlock(state, state.root, opts);
  return html;
}

/**
 * Metavariable outlines for the selected node: conclusion spans decorate
 * the node's own judgment, premise spans decorate the matching child's.
 */
export function treeOutlines(
  state: SessionState,
  nodeId: string,
  doc: RuleDocPayload,
): Map<string, Decoration[]> {
  const out = new Map<string, Decoration[]>();
  const node = state.nodes[nodeId];
  if (!node) return out;
  out.set(nodeId, outlineDecorations(node.judgment, doc.conclusion));
  doc.premises.forEach((line, i) => {
    const childId = node.children[i];
    const child = childId ? state.nodes[childId] : undefined;
    if (!child) return;
    out.set(childId, outlineDecorations(child.judgment, line));
  });
  return out;
}

// ---------------------------------------------------------------------------
// rule panel

export interface RulePanelOptions {
  activeRule?: string;
}

export function renderRulePanel(payload: RulesPayload, opts: RulePanelOptions = {}): string {
  if (payload.rules.length === 0) {
    return `<div class="empty-note">No rules match.</div>`;
  }
  const byCat = new Map<string, RuleListing[]>();
  for (const r of payload.rules) {
    const bucket = byCat.get(r.category) ?? [];
    bucket.push(r);
    byCat.set(r.category, bucket);
  }
  let html = "";
  for (const [cat, rules] of byCat) {
    html += `<div class="rule-cat">${escapeHtml(cat)}</div>`;
    for (const r of rules) {
      const active = r.name === opts.activeRule ? " active" : "";
      html +=
        `<button class="rule-item${active}" data-rule="${escapeHtml(r.name)}">` +
        `<span class="rule-name">${escapeHtml(r.name)}</span>` +
        `<span class="rule-preview">${escapeHtml(r.conclusion)}</span></button>`;
    }
  }
  return html;
}

// ---------------------------------------------------------------------------
// sidebar documentation

function renderDocLine(label: string, line: DocLine): string {
  const decorations: Decoration[] = [];
  let pos = 0;
  for (const span of line.spans) {
    const start = line.text.indexOf(span.text, pos);
    if (start < 0) continue;
    pos = start + span.text.length;
    if (span.metavar && span.color !== null) {
      decorations.push({
        start,
        end: pos,
        cls: `mv ${colorClass(span.color)}`,
        mv: span.metavar,
      });
    }
  }
  return (
    `<div class="doc-line"><span class="doc-part">${escapeHtml(label)}</span>` +
    `<code>${renderDecorated(line.text, decorations)}</code></div>`
  );
}

function boundEntries(doc: RuleDocPayload): { mv: string; color: number; bound: string }[] {
  const seen = new Map<string, { mv: string; color: number; bound: string }>();
  const lines = [doc.conclusion, ...doc.premises, ...doc.side_conditions];
  for (const line of lines) {
    for (const s of line.spans) {
      if (s.metavar && s.bound !== null && s.color !== null && !seen.has(s.metavar)) {
        seen.set(s.metavar, { mv: s.metavar, color: s.color, bound: s.bound });
      }
    }
  }
  return [...seen.values()];
}

export interface SidebarOptions {
  /** node the documentation was fetched for, when selection is a node */
  node?: NodeView;
  silent?: boolean;
}

export function renderSidebar(doc: RuleDocPayload | null, opts: SidebarOptions = {}): string {
  if (!doc) {
    return `<div class="empty-note">Select a node with a rule, or a rule in the panel, to see its documentation.</div>`;
  }
  let html =
    `<div class="doc-head"><span class="doc-rule">${escapeHtml(doc.name)}</span>` +
    `<span class="doc-cat">[${escapeHtml(doc.category)}]</span></div>` +
    `<p class="doc-text">${escapeHtml(doc.doc_text)}</p>`;

  doc.premises.forEach((p, i) => {
    html += renderDocLine(`premise ${i + 1}`, p);
  });
  doc.side_conditions.forEach((sc, i) => {
    html += renderDocLine(`when ${i + 1}`, sc);
  });
  html += renderDocLine("concludes", doc.conclusion);

  const bound = boundEntries(doc);
  if (bound.length > 0) {
    html += `<div class="doc-part">here</div><ul class="bind-list">`;
    for (const b of bound) {
      html +=
        `<li><span class="mv ${colorClass(b.color)}" data-mv="${escapeHtml(b.mv)}">` +
        `${escapeHtml(b.mv)}</span> = <code>${escapeHtml(b.bound)}</code></li>`;
    }
    html += `</ul>`;
  }

  for (const link of doc.links ?? []) {
    html +=
      `<div class="doc-link" data-locus="${escapeHtml(link.locus)}">` +
      `${escapeHtml(link.message)}</div>`;
  }

  const node = opts.node;
  if (node && node.status === "incorrect" && !opts.silent) {
    html += `<div class="doc-part">errors</div><ul class="error-list">`;
    for (const e of node.errors) {
      html +=
        `<li class="error-item"><span class="err-locus">${escapeHtml(e.locus)}</span> ` +
        `${escapeHtml(e.message)}</li>`;
    }
    html += `</ul>`;
  }
  if (node && node.obligations.length > 0) {
    html += `<div class="doc-part">still open</div><ul class="obligation-list">`;
    for (const o of node.obligations) {
      html += `<li>${escapeHtml(o.statement)}</li>`;
    }
    html += `</ul>`;
  }
  return html;
}

// ---------------------------------------------------------------------------
// prelude and subtree panel

export function renderPrelude(state: SessionState): string {
  let html = `<div class="pane-label">prelude</div>`;
  if (state.prelude.length === 0) {
    html += `<div class="empty-note">No abbreviations.</div>`;
  }
  for (const a of state.prelude) {
    html +=
      `<div class="prelude-item"><code>$${escapeHtml(a.name)} = ${escapeHtml(a.term)}</code>` +
      `<button class="mini-btn" data-remove-abbrev="${escapeHtml(a.name)}">remove</button></div>`;
  }
  html += `<div class="pane-label">subtrees</div>`;
  if (state.subtrees.length === 0) {
    html += `<div class="empty-note">No named subtrees.</div>`;
  }
  for (const st of state.subtrees) {
    const status = state.nodes[st.root]?.status ?? "unknown";
    const b = badgeFor(status);
    html +=
      `<div class="prelude-item"><span class="badge ${b.cls}">${b.glyph}</span>` +
      `<code>${escapeHtml(st.name)}</code>` +
      `<button class="mini-btn" data-insert-subtree="${escapeHtml(st.name)}">use here</button>` +
      `<button class="mini-btn" data-remove-subtree="${escapeHtml(st.name)}">remove</button></div>`;
  }
  return html;
}

// ---------------------------------------------------------------------------
// selected-node editor (the drop-down under the tree)

/**
 * Editing affordances for the selected node: its judgment, one input per
 * open hole the verifier reported in the conclusion, and the premise
 * judgments a freshly chosen rule created.
 */
export function renderEditor(state: SessionState, nodeId: string): string {
  const node = state.nodes[nodeId];
  if (!node) return "";
  let html =
    `<div class="pane-label">selected: <code>${escapeHtml(node.path)}</code></div>` +
    `<div class="editor-row"><label>judgment</label>` +
    `<input class="judgment-input" data-set-judgment="${escapeHtml(node.id)}" ` +
    `value="${escapeHtml(node.judgment)}"><span class="hint">edit and press Enter</span></div>`;

  const holePaths: number[][] = [];
  for (const o of node.obligations) {
    if (o.locus === "conclusion") holePaths.push(...o.paths);
  }
  for (const p of holePaths) {
    html +=
      `<div class="editor-row"><label>hole at ${escapeHtml(p.join("."))}</label>` +
      `<input class="hole-input" data-fill-node="${escapeHtml(node.id)}" ` +
      `data-fill-path="${escapeHtml(JSON.stringify(p))}" placeholder="term"></div>`;
  }

  node.children.forEach((cid, i) => {
    const child = state.nodes[cid];
    if (!child) return;
    html +=
      `<div class="editor-row premise-slot"><label>premise ${i + 1}</label>` +
      `<input class="judgment-input" data-set-judgment="${escapeHtml(cid)}" ` +
      `value="${escapeHtml(child.judgment)}"></div>`;
  });
  return html;
}
