/**
 * Browser wiring: owns the DOM, one ServiceClient, and one EditQueue.
 * Every mutation goes through the queue so a second click while an edit
 * is in flight waits instead of racing it.
 */

import { EditQueue, ServiceClient, ServiceError } from "./api.js";
import {
  categoriesOf,
  debounce,
  liveSelection,
  patchPlan,
  type ViewState,
} from "./model.js";
import type { EditCommand, RuleDocPayload, SessionState } from "./protocol.js";
import {
  renderEditor,
  renderNodeRow,
  renderPrelude,
  renderRulePanel,
  renderSidebar,
  renderTree,
  treeOutlines,
  type Decoration,
  type TreeOptions,
} from "./render.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const params = new URLSearchParams(location.search);
const serviceBase = params.get("service") ?? "";
const client = new ServiceClient(serviceBase);
const queue = new EditQueue();

let view: ViewState | null = null;
let currentDoc: RuleDocPayload | null = null;
let activeRule: string | null = null;
let outlines: Map<string, Decoration[]> = new Map();

// ---------------------------------------------------------------------------
// rendering

function treeOpts(): TreeOptions {
  return { selection: view?.selection, outlines };
}

function renderAll(): void {
  if (!view) return;
  el("tree-pane").innerHTML = renderTree(view.state, treeOpts());
  renderChrome();
}

function renderChrome(): void {
  if (!view) return;
  const s = view.state;
  const pill = el("status-pill");
  pill.textContent = s.tree_status;
  pill.className = `pill pill-${s.tree_status}`;
  (el("undo-btn") as HTMLButtonElement).disabled = !s.can_undo;
  (el("redo-btn") as HTMLButtonElement).disabled = !s.can_redo;
  (el("silent-toggle") as HTMLInputElement).checked = s.feedback === "silent";
  el("prelude-pane").innerHTML = renderPrelude(s);
  el("editor-pane").innerHTML = renderEditor(s, view.selection);
  el("sidebar").innerHTML = renderSidebar(currentDoc, {
    node: s.nodes[view.selection],
    silent: s.feedback === "silent",
  });
  el("app").classList.toggle("busy", queue.pending > 0);
}

function patchRows(ids: string[]): void {
  if (!view) return;
  for (const id of ids) {
    const holder = document.querySelector(`[data-node-row="${CSS.escape(id)}"]`);
    const node = view.state.nodes[id];
    if (!holder || !node) continue;
    holder.outerHTML = renderNodeRow(node, treeOpts());
  }
}

function applyState(next: SessionState): void {
  if (!view) {
    view = { state: next, selection: next.root, query: "", category: null, pendingEdits: 0 };
    renderAll();
    return;
  }
  const plan = patchPlan(view.state, next);
  view.state = next;
  view.selection = liveSelection(next, view.selection);
  if (plan.kind === "tree") {
    el("tree-pane").innerHTML = renderTree(next, treeOpts());
  } else {
    patchRows(plan.ids);
  }
  renderChrome();
}

// ---------------------------------------------------------------------------
// service calls

function toast(message: string): void {
  const box = el("toast");
  box.textContent = message;
  box.classList.add("show");
  setTimeout(() => box.classList.remove("show"), 4000);
}

function submitEdit(cmd: EditCommand): Promise<void> {
  return queue
    .submit(() => client.edit(mustSession(), cmd))
    .then((state) => {
      applyState(state);
      return refreshDoc();
    })
    .catch((e) => {
      toast(e instanceof ServiceError ? `${e.code}: ${e.message}` : String(e));
      renderChrome();
    });
}

function mustSession(): string {
  if (!view) throw new Error("no session yet");
  return view.state.session;
}

/** Sidebar follows the selection: bound schema for a rule node, bare
 * schema when only a panel rule is active, empty state otherwise. */
async function refreshDoc(): Promise<void> {
  if (!view) return;
  const node = view.state.nodes[view.selection];
  try {
    if (node && node.applied.kind === "rule") {
      currentDoc = await client.docForNode(mustSession(), node.id);
      outlines = treeOutlines(view.state, node.id, currentDoc);
    } else if (activeRule) {
      currentDoc = await client.docForRule(mustSession(), activeRule);
      outlines = new Map();
    } else {
      currentDoc = null;
      outlines = new Map();
    }
  } catch {
    currentDoc = null;
    outlines = new Map();
  }
  el("tree-pane").innerHTML = renderTree(view.state, treeOpts());
  renderChrome();
}

function setSelection(id: string): void {
  if (!view || !view.state.nodes[id]) return;
  view.selection = id;
  void refreshDoc();
}

const fetchRules = debounce(() => {
  if (!view) return;
  client
    .rules(mustSession(), view.query, view.category ?? undefined)
    .then((payload) => {
      el("rule-list").innerHTML = renderRulePanel(payload, {
        activeRule: activeRule ?? undefined,
      });
    })
    .catch((e) => toast(String(e)));
}, 200);

function loadCategories(): void {
  client
    .rules(mustSession())
    .then((payload) => {
      const select = el<HTMLSelectElement>("category-select");
      const cats = categoriesOf(payload.rules);
      select.innerHTML =
        `<option value="">all categories</option>` +
        cats.map((c) => `<option>${c}</option>`).join("");
      el("rule-list").innerHTML = renderRulePanel(payload);
    })
    .catch((e) => toast(String(e)));
}

// ---------------------------------------------------------------------------
// event wiring

function wireEvents(): void {
  el("tree-pane").addEventListener("click", (ev) => {
    const row = (ev.target as HTMLElement).closest("[data-node]");
    if (row) setSelection(row.getAttribute("data-node") ?? "");
  });

  el("rule-list").addEventListener("click", (ev) => {
    const item = (ev.target as HTMLElement).closest("[data-rule]");
    if (!item || !view) return;
    activeRule = item.getAttribute("data-rule");
    const node = view.state.nodes[view.selection];
    if (node && activeRule) {
      void submitEdit({ command: "SetRule", node: node.id, rule: activeRule });
    }
  });

  el<HTMLInputElement>("rule-query").addEventListener("input", (ev) => {
    if (!view) return;
    view.query = (ev.target as HTMLInputElement).value;
    fetchRules();
  });

  el<HTMLSelectElement>("category-select").addEventListener("change", (ev) => {
    if (!view) return;
    view.category = (ev.target as HTMLSelectElement).value || null;
    fetchRules();
  });

  el("editor-pane").addEventListener("keydown", (ev) => {
    if (ev.key !== "Enter") return;
    const input = ev.target as HTMLInputElement;
    const setNode = input.getAttribute("data-set-judgment");
    if (setNode) {
      void submitEdit({ command: "SetJudgment", node: setNode, judgment: input.value });
      return;
    }
    const fillNode = input.getAttribute("data-fill-node");
    const fillPath = input.getAttribute("data-fill-path");
    if (fillNode && fillPath) {
      void submitEdit({
        command: "FillHole",
        node: fillNode,
        path: JSON.parse(fillPath) as number[],
        term: input.value,
      });
    }
  });

  el("prelude-pane").addEventListener("click", (ev) => {
    const t = ev.target as HTMLElement;
    const insert = t.getAttribute("data-insert-subtree");
    if (insert && view) {
      void submitEdit({ command: "InsertSubtreeRef", node: view.selection, subtree: insert });
    }
    const rmSub = t.getAttribute("data-remove-subtree");
    if (rmSub) void submitEdit({ command: "RemoveSubtree", name: rmSub });
    const rmAbb = t.getAttribute("data-remove-abbrev");
    if (rmAbb) void submitEdit({ command: "RemoveAbbrev", name: rmAbb });
  });

  el("add-premise-btn").addEventListener("click", () => {
    if (!view) return;
    const node = view.state.nodes[view.selection];
    void submitEdit({
      command: "AddPremise",
      node: view.selection,
      position: node ? node.children.length : 0,
    });
  });

  el("add-subtree-btn").addEventListener("click", () => {
    const name = prompt("subtree name");
    if (name) void submitEdit({ command: "DefineSubtree", name });
  });

  el("add-abbrev-btn").addEventListener("click", () => {
    const name = prompt("abbreviation name");
    if (!name) return;
    const term = prompt(`term for $${name}`);
    if (term) void submitEdit({ command: "DefineAbbrev", name, term });
  });

  el("undo-btn").addEventListener("click", () => {
    void queue
      .submit(() => client.undo(mustSession()))
      .then((s) => {
        applyState(s);
        return refreshDoc();
      })
      .catch((e) => toast(String(e)));
  });

  el("redo-btn").addEventListener("click", () => {
    void queue
      .submit(() => client.redo(mustSession()))
      .then((s) => {
        applyState(s);
        return refreshDoc();
      })
      .catch((e) => toast(String(e)));
  });

  el<HTMLInputElement>("silent-toggle").addEventListener("change", (ev) => {
    const flag = (ev.target as HTMLInputElement).checked ? "silent" : "full";
    void submitEdit({ command: "SetFeedback", flag });
  });

  el("export-btn").addEventListener("click", () => {
    client
      .exportDocument(mustSession())
      .then((payload) => {
        el<HTMLTextAreaElement>("export-text").value = payload.text;
        el("export-overlay").classList.add("show");
      })
      .catch((e) => toast(String(e)));
  });

  el("export-close").addEventListener("click", () => {
    el("export-overlay").classList.remove("show");
  });

  // hovering an error link highlights the tree row it talks about
  el("sidebar").addEventListener("mouseover", (ev) => {
    const link = (ev.target as HTMLElement).closest("[data-locus]");
    if (!link || !view) return;
    const locus = link.getAttribute("data-locus") ?? "";
    const node = view.state.nodes[view.selection];
    if (!node) return;
    let target = node.id;
    const m = /^premise:(\d+)$/.exec(locus);
    if (m) target = node.children[Number(m[1])] ?? node.id;
    document
      .querySelector(`[data-node="${CSS.escape(target)}"]`)
      ?.classList.add("linked");
  });
  el("sidebar").addEventListener("mouseout", () => {
    document.querySelectorAll(".linked").forEach((n) => n.classList.remove("linked"));
  });
}

// ---------------------------------------------------------------------------
// startup

function startSession(init: { system: string } | { document: string }): void {
  client
    .createSession(init)
    .then((state) => {
      el("start-overlay").classList.remove("show");
      applyState(state);
      loadCategories();
      return refreshDoc();
    })
    .catch((e) => {
      toast(e instanceof ServiceError ? `${e.code}: ${e.message}` : String(e));
    });
}

function wireStart(): void {
  document.querySelectorAll("[data-system]").forEach((btn) => {
    btn.addEventListener("click", () => {
      startSession({ system: btn.getAttribute("data-system") ?? "" });
    });
  });
  el("open-document-btn").addEventListener("click", () => {
    const text = el<HTMLTextAreaElement>("document-text").value;
    if (text.trim()) startSession({ document: text });
  });
  el("start-overlay").classList.add("show");
}

wireEvents();
wireStart();
