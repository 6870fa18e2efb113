import { describe, expect, it } from "vitest";

import {
  badgeFor,
  errorDecorations,
  escapeHtml,
  outlineDecorations,
  renderDecorated,
  renderEditor,
  renderNodeRow,
  renderPrelude,
  renderRulePanel,
  renderSidebar,
  renderTree,
  treeOutlines,
} from "../src/render.js";
import { node, plusDoc, plusState } from "./fixtures.js";

describe("badges", () => {
  it("maps the three verification statuses", () => {
    expect(badgeFor("correct").cls).toBe("b-ok");
    expect(badgeFor("incorrect").cls).toBe("b-err");
    expect(badgeFor("indeterminate").cls).toBe("b-hole");
  });

  it("maps the silent-mode statuses without red styling", () => {
    expect(badgeFor("resolved").cls).toBe("b-ok");
    expect(badgeFor("unresolved").cls).toBe("b-flat");
  });

  it("is neutral on anything unknown", () => {
    expect(badgeFor("surprise").cls).toBe("b-flat");
  });
});

describe("renderDecorated", () => {
  it("escapes markup in plain judgments", () => {
    expect(renderDecorated('x < "y" & z', [])).toBe("x &lt; &quot;y&quot; &amp; z");
  });

  it("wraps ranges and escapes inside them", () => {
    const html = renderDecorated("a & b", [{ start: 0, end: 1, cls: "mv mv-c0", mv: "e" }]);
    expect(html).toBe(`<span class="mv mv-c0" data-mv="e">a</span> &amp; b`);
  });

  it("drops overlapping ranges instead of producing broken markup", () => {
    const html = renderDecorated("abcdef", [
      { start: 0, end: 4, cls: "x" },
      { start: 2, end: 6, cls: "y" },
    ]);
    expect(html).toBe(`<span class="x">abcd</span>ef`);
  });
});

describe("outlineDecorations", () => {
  it("finds each bound value left to right", () => {
    const doc = plusDoc();
    const decs = outlineDecorations("1 + 2 evalto 3", doc.conclusion);
    expect(decs.map((d) => [d.mv, d.start, d.end])).toEqual([
      ["e1", 0, 1],
      ["e2", 4, 5],
      ["n", 13, 14],
    ]);
  });

  it("assigns repeated values to successive occurrences", () => {
    const line = {
      part: "conclusion",
      text: "v evalto v",
      spans: [
        { text: "v", path: [0], metavar: "v", color: 0, bound: "7" },
        { text: " evalto ", path: [], metavar: null, color: null, bound: null },
        { text: "v", path: [1], metavar: "v", color: 0, bound: "7" },
      ],
    };
    const decs = outlineDecorations("7 evalto 7", line);
    expect(decs.map((d) => d.start)).toEqual([0, 9]);
  });

  it("silently skips values that do not occur", () => {
    const doc = plusDoc();
    expect(outlineDecorations("true evalto true", doc.conclusion)).toEqual([]);
  });
});

describe("errorDecorations", () => {
  const bad = node({
    id: "n0",
    judgment: "1 + 2 evalto 4",
    status: "incorrect",
    applied: { kind: "rule", name: "E-Plus" },
    errors: [
      {
        locus: "side:0",
        path: [1],
        expected: "3",
        found: "4",
        message: "Expected 3, but found 4.",
      },
    ],
  });

  it("marks the offending literal", () => {
    expect(errorDecorations(bad.judgment, bad)).toEqual([
      { start: 13, end: 14, cls: "err-span" },
    ]);
  });

  it("respects token boundaries", () => {
    const n = { ...bad, judgment: "14 + 2 evalto 4" };
    const decs = errorDecorations(n.judgment, n);
    expect(decs).toEqual([{ start: 14, end: 15, cls: "err-span" }]);
  });

  it("marks nothing for prose descriptions", () => {
    const n = {
      ...bad,
      errors: [{ ...bad.errors[0], found: "a let-expression" }],
    };
    expect(errorDecorations(n.judgment, n)).toEqual([]);
  });

  it("never marks nodes that are not incorrect", () => {
    const n = { ...bad, status: "unresolved" };
    expect(errorDecorations(n.judgment, n)).toEqual([]);
  });
});

describe("renderNodeRow", () => {
  it("shows badge, judgment, and rule chip", () => {
    const html = renderNodeRow(plusState().nodes.n0);
    expect(html).toContain('data-node="n0"');
    expect(html).toContain("b-ok");
    expect(html).toContain("1 + 2 evalto 3");
    expect(html).toContain("by E-Plus");
  });

  it("marks the selection", () => {
    const html = renderNodeRow(plusState().nodes.n1, { selection: "n1" });
    expect(html).toContain("selected");
  });

  it("adds a warning icon with the error messages", () => {
    const bad = node({
      id: "n0",
      judgment: "1 + 2 evalto 4",
      status: "incorrect",
      applied: { kind: "rule", name: "E-Plus" },
      errors: [
        {
          locus: "side:0",
          path: [],
          expected: "3",
          found: "4",
          message: "Expected 3, but found 4.",
        },
      ],
    });
    const html = renderNodeRow(bad);
    expect(html).toContain("err-icon");
    expect(html).toContain("side:0: Expected 3, but found 4.");
  });

  it("renders holes and subtree references by kind", () => {
    expect(renderNodeRow(node({ id: "h" }))).toContain("by ?");
    const use = node({ id: "u", applied: { kind: "subtree", name: "S" }, status: "correct" });
    expect(renderNodeRow(use)).toContain("use S");
  });
});

describe("renderTree", () => {
  it("nests premises above their conclusion", () => {
    const html = renderTree(plusState());
    const premises = html.indexOf('data-block="n1"');
    const conclusion = html.indexOf('data-node="n0"');
    expect(premises).toBeGreaterThan(-1);
    expect(premises).toBeLessThan(conclusion);
    expect(html).toContain("infer-bar");
  });

  it("renders named subtrees as labelled blocks", () => {
    const s = plusState();
    s.nodes.n9 = node({ id: "n9", path: "S", judgment: "[A] |- A" });
    s.subtrees = [{ name: "S", root: "n9" }];
    const html = renderTree(s);
    expect(html).toContain("subtree S");
    expect(html).toContain('data-block="n9"');
  });

  it("applies outline decorations to the judgments they target", () => {
    const s = plusState();
    const outlines = treeOutlines(s, "n0", plusDoc());
    const html = renderTree(s, { selection: "n0", outlines });
    expect(html).toContain('class="mv-outline mv-c0" data-mv="e1"');
    expect(html).toContain('class="mv-outline mv-c2" data-mv="n1"');
  });
});

describe("treeOutlines", () => {
  it("maps conclusion spans to the node and premise spans to children", () => {
    const s = plusState();
    const map = treeOutlines(s, "n0", plusDoc());
    expect([...map.keys()].sort()).toEqual(["n0", "n1", "n2"]);
    expect(map.get("n0")!.map((d) => d.mv)).toEqual(["e1", "e2", "n"]);
    expect(map.get("n1")!.map((d) => d.mv)).toEqual(["e1", "n1"]);
    expect(map.get("n2")!.map((d) => d.mv)).toEqual(["e2", "n2"]);
  });

  it("uses the same color class the sidebar uses for each metavariable", () => {
    const s = plusState();
    const doc = plusDoc();
    const sidebar = renderSidebar(doc, { node: s.nodes.n0 });
    const map = treeOutlines(s, "n0", doc);
    for (const decs of map.values()) {
      for (const d of decs) {
        const color = / (mv-c\d+)/.exec(d.cls)![1];
        expect(sidebar).toContain(`class="mv ${color}" data-mv="${d.mv}"`);
      }
    }
  });
});

describe("renderRulePanel", () => {
  const payload = {
    system: "prop-nd",
    rules: [
      { name: "∧I", category: "Propositional", doc_text: "", arity: 2, conclusion: "Γ |- φ /\\ ψ", premises: [], side_conditions: [] },
      { name: "∧E1", category: "Propositional", doc_text: "", arity: 1, conclusion: "Γ |- φ", premises: [], side_conditions: [] },
    ],
  };

  it("groups rules under their category heading", () => {
    const html = renderRulePanel(payload);
    expect(html.indexOf("Propositional")).toBeLessThan(html.indexOf("∧I"));
    expect(html).toContain('data-rule="∧I"');
    expect(html).toContain("Γ |- φ /\\ ψ");
  });

  it("marks the active rule and handles empty listings", () => {
    expect(renderRulePanel(payload, { activeRule: "∧E1" })).toContain("active");
    expect(renderRulePanel({ system: "x", rules: [] })).toContain("No rules match");
  });
});

describe("renderSidebar", () => {
  it("prompts when nothing is selected", () => {
    expect(renderSidebar(null)).toContain("Select a node");
  });

  it("renders schema lines with colored metavariable spans", () => {
    const html = renderSidebar(plusDoc());
    expect(html).toContain("E-Plus");
    expect(html).toContain('class="mv mv-c0" data-mv="e1"');
    expect(html).toContain("premise 1");
    expect(html).toContain("when 1");
    expect(html).toContain("concludes");
  });

  it("lists bound values once per metavariable", () => {
    const html = renderSidebar(plusDoc());
    expect(html).toContain("= <code>1</code>");
    expect((html.match(/data-mv="n1"/g) ?? []).length).toBeGreaterThan(0);
  });

  it("shows error detail only outside silent mode", () => {
    const doc = plusDoc();
    const bad = node({
      id: "n0",
      judgment: "1 + 2 evalto 4",
      status: "incorrect",
      applied: { kind: "rule", name: "E-Plus" },
      errors: [
        {
          locus: "side:0",
          path: [],
          expected: "3",
          found: "4",
          message: "Expected 3, but found 4.",
        },
      ],
    });
    const loud = renderSidebar(doc, { node: bad });
    expect(loud).toContain("Expected 3, but found 4.");

    const silentNode = { ...bad, status: "unresolved", errors: [] };
    const silent = renderSidebar(doc, { node: silentNode, silent: true });
    expect(silent).not.toContain("Expected");
    expect(silent).not.toContain("but found");
  });

  it("renders cross-link entries for error loci", () => {
    const doc = plusDoc();
    doc.links = [
      { locus: "premise:0", pattern_path: [0], message: "Expected 1, but found 2." },
    ];
    const html = renderSidebar(doc);
    expect(html).toContain('data-locus="premise:0"');
  });

  it("lists open obligations", () => {
    const holey = node({
      id: "n0",
      judgment: "1 + ? evalto 3",
      applied: { kind: "rule", name: "E-Plus" },
      obligations: [
        { locus: "conclusion", paths: [[0, 1]], statement: "the conclusion still has holes" },
      ],
    });
    const html = renderSidebar(plusDoc(), { node: holey });
    expect(html).toContain("still open");
    expect(html).toContain("the conclusion still has holes");
  });
});

describe("renderEditor", () => {
  it("offers the judgment and one input per conclusion hole", () => {
    const s = plusState();
    s.nodes.n0 = {
      ...s.nodes.n0,
      judgment: "1 + ? evalto 3",
      status: "indeterminate",
      obligations: [
        { locus: "conclusion", paths: [[0, 1]], statement: "the conclusion still has holes" },
      ],
    };
    const html = renderEditor(s, "n0");
    expect(html).toContain('data-set-judgment="n0"');
    expect(html).toContain('data-fill-path="[0,1]"');
    expect(html).toContain("premise 1");
    expect(html).toContain('data-set-judgment="n1"');
  });

  it("renders nothing for a vanished node", () => {
    expect(renderEditor(plusState(), "nope")).toBe("");
  });
});

describe("renderPrelude", () => {
  it("lists abbreviations and subtrees with their statuses", () => {
    const s = plusState();
    s.prelude = [{ name: "G", term: "[b:Bool]" }];
    s.nodes.n9 = node({ id: "n9", judgment: "[A] |- A", status: "correct" });
    s.subtrees = [{ name: "S", root: "n9" }];
    const html = renderPrelude(s);
    expect(html).toContain("$G = [b:Bool]");
    expect(html).toContain('data-insert-subtree="S"');
    expect(html).toContain('data-remove-abbrev="G"');
    expect(html).toContain("b-ok");
  });
});

describe("escapeHtml", () => {
  it("escapes the four dangerous characters", () => {
    expect(escapeHtml(`<a href="x">&`)).toBe("&lt;a href=&quot;x&quot;&gt;&amp;");
  });
});
