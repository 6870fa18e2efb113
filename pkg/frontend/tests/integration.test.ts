/**
 * End-to-end checks against a live service instance. The suite starts
 * `derivkit serve` on a spare port, drives it exactly the way the
 * browser client does, and renders the responses with the real
 * renderers. Covered here:
 *
 *   - a SetRule edit on a 50-node document round-trips (request sent,
 *     delta applied, badges re-rendered) in under 200 ms;
 *   - sidebar metavariable colors equal the tree outline colors for
 *     every bound metavariable;
 *   - silent feedback renders no expected/found detail anywhere.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EditQueue, ServiceClient, ServiceError } from "../src/api.js";
import { patchPlan } from "../src/model.js";
import type { SessionState } from "../src/protocol.js";
import {
  renderNodeRow,
  renderSidebar,
  renderTree,
  treeOutlines,
} from "../src/render.js";

const PORT = 8791;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const client = new ServiceClient(BASE);

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/sessions/warmup/state`);
      if (res.status === 404) return; // service is answering
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("service did not come up within 20s");
}

beforeAll(async () => {
  server = spawn("derivkit", ["serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill();
});

// ---------------------------------------------------------------------------
// document builders

/**
 * A complete, correct typing derivation with exactly 50 nodes:
 * if true then (1 + 1 + ... + 1) else 0, where the sum has 24 ones.
 * One T-If, one T-True, one T-Num for the else branch, 23 T-Plus and
 * 24 T-Num for the chain: 3 + 47 = 50.
 */
function fiftyNodeDocument(): string {
  const ones = (n: number) => Array(n).fill("1").join(" + ");
  const lines = [
    "system alfa-typing",
    "",
    "derive:",
    `  [] |- if true then ${ones(24)} else 0 : Num  by T-If`,
    "    [] |- true : Bool  by T-True",
  ];
  for (let n = 24; n >= 2; n--) {
    const indent = "  ".repeat(2 + (24 - n));
    lines.push(`${indent}[] |- ${ones(n)} : Num  by T-Plus`);
  }
  const deepest = "  ".repeat(2 + 23);
  lines.push(`${deepest}[] |- 1 : Num  by T-Num`);
  for (let n = 2; n <= 24; n++) {
    const indent = "  ".repeat(2 + (24 - n));
    lines.push(`${indent}  [] |- 1 : Num  by T-Num`);
  }
  lines.push("    [] |- 0 : Num  by T-Num");
  return lines.join("\n") + "\n";
}

const PLUS_DOC = [
  "system alfa-eval",
  "",
  "derive:",
  "  1 + 2 evalto 3  by E-Plus",
  "    1 evalto 1  by E-Num",
  "    2 evalto 2  by E-Num",
  "",
].join("\n");

const SILENT_BAD_DOC = [
  "system alfa-eval",
  "feedback silent",
  "",
  "derive:",
  "  1 + 2 evalto 4  by E-Plus",
  "    1 evalto 1  by E-Num",
  "    2 evalto 2  by E-Num",
  "",
].join("\n");

function nodesByJudgment(state: SessionState, judgment: string): string[] {
  return Object.values(state.nodes)
    .filter((n) => n.judgment === judgment)
    .map((n) => n.id);
}

// ---------------------------------------------------------------------------

describe("editing round-trip", () => {
  it("applies SetRule on a 50-node document in under 200 ms", async () => {
    const state = await client.createSession({ document: fiftyNodeDocument() });
    expect(Object.keys(state.nodes).length).toBe(50);
    expect(state.tree_status).toBe("CompleteCorrect");

    const victim = nodesByJudgment(state, "[] |- 0 : Num")[0];
    expect(victim).toBeTruthy();

    const started = performance.now();
    const next = await client.edit(state.session, {
      command: "SetRule",
      node: victim,
      rule: "T-False",
    });
    const plan = patchPlan(state, next);
    expect(plan).toEqual({ kind: "rows", ids: [victim] }); // single-row delta
    const badges = new Map(
      (plan as { ids: string[] }).ids.map((id) => [id, renderNodeRow(next.nodes[id])]),
    );
    const elapsed = performance.now() - started;

    expect(badges.get(victim)).toContain("b-err"); // badge reflects the new status
    expect(next.nodes[victim].status).toBe("incorrect");
    expect(next.tree_status).toBe("HasErrors");
    expect(elapsed).toBeLessThan(200);
  });

  it("queues concurrent edits so one is in flight at a time", async () => {
    const state = await client.createSession({ document: PLUS_DOC });
    const queue = new EditQueue();
    const holes = [0, 1].map((i) =>
      queue.submit(() =>
        client.edit(state.session, {
          command: "MakeHole",
          node: state.root,
          path: [0, i],
        }),
      ),
    );
    const [a, b] = await Promise.all(holes);
    // both edits landed, in order, each against the latest document
    expect(a.nodes[a.root].judgment).toBe("? + 2 evalto 3");
    expect(b.nodes[b.root].judgment).toBe("? + ? evalto 3");
  });
});

describe("sidebar and tree color agreement", () => {
  it("gives every bound metavariable the same color in both panes", async () => {
    const state = await client.createSession({ document: PLUS_DOC });
    const doc = await client.docForNode(state.session, state.root);

    const boundMvs = new Set<string>();
    for (const line of [doc.conclusion, ...doc.premises, ...doc.side_conditions]) {
      for (const s of line.spans) {
        if (s.metavar && s.bound !== null) boundMvs.add(s.metavar);
      }
    }
    expect(boundMvs.size).toBe(5); // e1 e2 n1 n2 n

    const sidebar = renderSidebar(doc, { node: state.nodes[state.root] });
    const outlines = treeOutlines(state, state.root, doc);
    const tree = renderTree(state, { selection: state.root, outlines });

    const collect = (html: string, re: RegExp) => {
      const colors = new Map<string, Set<string>>();
      for (const m of html.matchAll(re)) {
        const set = colors.get(m[2]) ?? new Set();
        set.add(m[1]);
        colors.set(m[2], set);
      }
      return colors;
    };
    const sidebarColors = collect(sidebar, /class="mv (mv-c\d+)" data-mv="([^"]+)"/g);
    const treeColors = collect(tree, /class="mv-outline (mv-c\d+)" data-mv="([^"]+)"/g);

    for (const mv of boundMvs) {
      const inSidebar = sidebarColors.get(mv);
      const inTree = treeColors.get(mv);
      expect(inSidebar, `sidebar colors for ${mv}`).toBeTruthy();
      expect(inTree, `tree outline for ${mv}`).toBeTruthy();
      expect(inSidebar!.size).toBe(1); // one color per metavariable
      expect(inTree!.size).toBe(1);
      expect([...inTree!][0]).toBe([...inSidebar!][0]);
    }
  });
});

describe("silent feedback", () => {
  it("renders no expected/found detail anywhere", async () => {
    const state = await client.createSession({ document: SILENT_BAD_DOC });
    expect(state.feedback).toBe("silent");
    expect(state.tree_status).toBe("HasErrors"); // overall verdict stays honest

    const root = state.nodes[state.root];
    expect(root.status).toBe("unresolved");
    expect(root.errors).toEqual([]); // service withholds detail

    const doc = await client.docForNode(state.session, state.root);
    expect(doc.links ?? []).toEqual([]);

    const tree = renderTree(state, { selection: state.root });
    const sidebar = renderSidebar(doc, { node: root, silent: true });
    for (const html of [tree, sidebar]) {
      expect(html).not.toContain("Expected");
      expect(html).not.toContain("but found");
      expect(html).not.toContain("err-span");
      expect(html).not.toContain("err-icon");
    }
    expect(tree).not.toContain("b-err"); // unresolved is neutral, not red
    expect(tree).toContain("b-flat");
  });

  it("switching feedback back restores full detail", async () => {
    const state = await client.createSession({ document: SILENT_BAD_DOC });
    const next = await client.edit(state.session, { command: "SetFeedback", flag: "full" });
    const root = next.nodes[next.root];
    expect(root.status).toBe("incorrect");
    expect(root.errors.length).toBeGreaterThan(0);
    expect(renderTree(next)).toContain("err-icon");
  });
});

describe("structural affordances", () => {
  it("adds premises, defines subtrees, and references them", async () => {
    let state = await client.createSession({ system: "prop-nd" });
    state = await client.edit(state.session, {
      command: "SetJudgment",
      node: state.root,
      judgment: "[A /\\ B] |- B /\\ A",
    });
    state = await client.edit(state.session, {
      command: "SetRule",
      node: state.root,
      rule: "∧I",
    });
    expect(state.nodes[state.root].children.length).toBe(2);

    // name a subtree, prove it, and use it from the main derivation
    state = await client.edit(state.session, { command: "DefineSubtree", name: "asm" });
    const subRoot = state.subtrees.find((s) => s.name === "asm")!.root;
    state = await client.edit(state.session, {
      command: "SetJudgment",
      node: subRoot,
      judgment: "[A /\\ B] |- A /\\ B",
    });
    state = await client.edit(state.session, {
      command: "SetRule",
      node: subRoot,
      rule: "Asm",
    });
    expect(state.summaries["asm"]).toBe("CompleteCorrect");

    const [left, right] = state.nodes[state.root].children;
    state = await client.edit(state.session, {
      command: "SetJudgment",
      node: left,
      judgment: "[A /\\ B] |- B",
    });
    state = await client.edit(state.session, { command: "SetRule", node: left, rule: "∧E2" });
    const leftChild = state.nodes[left].children[0];
    state = await client.edit(state.session, {
      command: "SetJudgment",
      node: leftChild,
      judgment: "[A /\\ B] |- A /\\ B",
    });
    state = await client.edit(state.session, {
      command: "InsertSubtreeRef",
      node: leftChild,
      subtree: "asm",
    });
    expect(state.nodes[leftChild].applied).toEqual({ kind: "subtree", name: "asm" });
    expect(renderTree(state)).toContain("use asm");

    // finish the right half the long way
    state = await client.edit(state.session, {
      command: "SetJudgment",
      node: right,
      judgment: "[A /\\ B] |- A",
    });
    state = await client.edit(state.session, { command: "SetRule", node: right, rule: "∧E1" });
    const rightChild = state.nodes[right].children[0];
    state = await client.edit(state.session, {
      command: "SetJudgment",
      node: rightChild,
      judgment: "[A /\\ B] |- A /\\ B",
    });
    state = await client.edit(state.session, { command: "SetRule", node: rightChild, rule: "Asm" });
    expect(state.tree_status).toBe("CompleteCorrect");

    // add-premise affordance: a fresh hole child appears
    const before = state.nodes[rightChild].children.length;
    state = await client.edit(state.session, {
      command: "AddPremise",
      node: rightChild,
      position: before,
    });
    const added = state.nodes[rightChild].children[before];
    expect(state.nodes[added].judgment).toBe("?");
    expect(renderTree(state)).toContain(`data-node="${added}"`);

    // a rejected edit changes nothing
    const err = await client
      .edit(state.session, { command: "SetRule", node: added, rule: "NoSuchRule" })
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    const after = await client.getState(state.session);
    expect(after.nodes[added].applied).toEqual({ kind: "hole" });
  });

  it("undo and redo walk the edit history", async () => {
    let state = await client.createSession({ system: "alfa-eval" });
    expect(state.can_undo).toBe(false);
    state = await client.edit(state.session, {
      command: "SetJudgment",
      node: state.root,
      judgment: "1 evalto 1",
    });
    expect(state.can_undo).toBe(true);
    state = await client.undo(state.session);
    expect(state.nodes[state.root].judgment).toBe("?");
    expect(state.can_redo).toBe(true);
    state = await client.redo(state.session);
    expect(state.nodes[state.root].judgment).toBe("1 evalto 1");
  });
});

describe("rule panel data", () => {
  it("searches rules by name and doc text", async () => {
    const state = await client.createSession({ system: "prop-nd" });
    const all = await client.rules(state.session);
    expect(all.rules.length).toBe(12);

    const hits = await client.rules(state.session, "and");
    const names = hits.rules.map((r) => r.name);
    for (const want of ["∧I", "∧E1", "∧E2"]) {
      expect(names).toContain(want);
    }
    for (const r of hits.rules) {
      const hay = (r.name + " " + r.doc_text).toLowerCase();
      expect(hay).toContain("and");
    }
  });
});
