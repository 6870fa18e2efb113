import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { categoriesOf, debounce, liveSelection, patchPlan } from "../src/model.js";
import { node, plusState } from "./fixtures.js";

describe("patchPlan", () => {
  it("returns an empty row list when nothing changed", () => {
    const a = plusState();
    const b = plusState();
    expect(patchPlan(a, b)).toEqual({ kind: "rows", ids: [] });
  });

  it("names exactly the node a content edit touched", () => {
    const a = plusState();
    const b = plusState();
    b.nodes.n2 = { ...b.nodes.n2, judgment: "4 evalto 4", status: "incorrect" };
    expect(patchPlan(a, b)).toEqual({ kind: "rows", ids: ["n2"] });
  });

  it("treats a status flip as a row update", () => {
    const a = plusState();
    const b = plusState();
    b.nodes.n0 = { ...b.nodes.n0, status: "indeterminate" };
    const plan = patchPlan(a, b);
    expect(plan).toEqual({ kind: "rows", ids: ["n0"] });
  });

  it("rebuilds the tree when a node gains children", () => {
    const a = plusState();
    const b = plusState();
    b.nodes.n3 = node({ id: "n3" });
    b.nodes.n1 = { ...b.nodes.n1, children: ["n3"] };
    expect(patchPlan(a, b).kind).toBe("tree");
  });

  it("rebuilds the tree when a subtree is defined", () => {
    const a = plusState();
    const b = plusState();
    b.nodes.n9 = node({ id: "n9", path: "S" });
    b.subtrees = [{ name: "S", root: "n9" }];
    expect(patchPlan(a, b).kind).toBe("tree");
  });
});

describe("liveSelection", () => {
  it("keeps a selection that still exists", () => {
    expect(liveSelection(plusState(), "n2")).toBe("n2");
  });

  it("falls back to the root when the node is gone", () => {
    expect(liveSelection(plusState(), "n99")).toBe("n0");
    expect(liveSelection(plusState(), null)).toBe("n0");
  });
});

describe("categoriesOf", () => {
  it("preserves first-seen order without duplicates", () => {
    const rules = [
      { category: "Evaluation" },
      { category: "Evaluation" },
      { category: "Typing" },
      { category: "Evaluation" },
    ];
    expect(categoriesOf(rules)).toEqual(["Evaluation", "Typing"]);
  });
});

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("fires once with the last arguments after the wait", () => {
    const calls: string[] = [];
    const f = debounce((q: string) => calls.push(q), 100);
    f("a");
    f("ab");
    f("abc");
    vi.advanceTimersByTime(99);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(1);
    expect(calls).toEqual(["abc"]);
  });
});
