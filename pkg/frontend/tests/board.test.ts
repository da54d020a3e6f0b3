import { describe, expect, it } from "vitest";

import {
  applyMutation,
  boardFromSnapshot,
  cardLabel,
  validateThemeName,
} from "../src/board.js";
import type { BoardState } from "../src/board.js";
import type { ThemesSnapshot } from "../src/types.js";

const snapshot: ThemesSnapshot = {
  format: "genderscope-ledger",
  version: 1,
  run_id: "e16f190e7144",
  revision: 3,
  themes: [
    {
      name: "Care work",
      gender: "F",
      terms: ["nurse", "support"],
      indirect_terms: ["palliative"],
      notes: "frontline care vocabulary",
      created: "",
      modified: "",
    },
    {
      name: "Formal methods",
      gender: "M",
      terms: ["proof"],
      indirect_terms: [],
      notes: "",
      created: "",
      modified: "",
    },
  ],
};

const board = (): BoardState => boardFromSnapshot(snapshot);

describe("boardFromSnapshot", () => {
  it("projects themes to columns with direct cards before indirect", () => {
    const state = board();
    expect(state.revision).toBe(3);
    expect(state.columns.map((c) => c.name)).toEqual(["Care work", "Formal methods"]);
    expect(state.columns[0]!.cards).toEqual([
      { term: "nurse", indirect: false },
      { term: "support", indirect: false },
      { term: "palliative", indirect: true },
    ]);
  });
});

describe("cardLabel", () => {
  it("brackets indirect members when the toggle is on", () => {
    expect(cardLabel("support", true, true)).toBe("[support]");
  });

  it("drops brackets when the toggle is off", () => {
    expect(cardLabel("support", true, false)).toBe("support");
  });

  it("never brackets direct members", () => {
    expect(cardLabel("nurse", false, true)).toBe("nurse");
  });
});

describe("validateThemeName", () => {
  it("rejects duplicates with an inline message", () => {
    expect(validateThemeName(board(), "Care work")).toMatch(/already exists/);
  });

  it("rejects blank names", () => {
    expect(validateThemeName(board(), "   ")).toBe("theme name required");
  });

  it("accepts a fresh name", () => {
    expect(validateThemeName(board(), "Qualitative methods")).toBeNull();
  });
});

describe("applyMutation", () => {
  it("creates an empty column", () => {
    const state = applyMutation(board(), {
      kind: "create",
      name: "Qualitative methods",
      gender: "F",
      notes: "",
    });
    expect(state.columns.at(-1)).toEqual({
      name: "Qualitative methods",
      gender: "F",
      notes: "",
      cards: [],
    });
  });

  it("moves a direct assignment out of every other same-gender column", () => {
    const start = applyMutation(board(), {
      kind: "create",
      name: "Qualitative methods",
      gender: "F",
      notes: "",
    });
    const state = applyMutation(start, {
      kind: "assign",
      term: "nurse",
      theme: "Qualitative methods",
      gender: "F",
      direct: true,
    });
    const care = state.columns.find((c) => c.name === "Care work")!;
    const target = state.columns.find((c) => c.name === "Qualitative methods")!;
    expect(care.cards.map((c) => c.term)).not.toContain("nurse");
    expect(target.cards).toEqual([{ term: "nurse", indirect: false }]);
  });

  it("leaves other-gender columns alone on direct assignment", () => {
    const state = applyMutation(board(), {
      kind: "assign",
      term: "proof",
      theme: "Care work",
      gender: "F",
      direct: true,
    });
    const methods = state.columns.find((c) => c.name === "Formal methods")!;
    expect(methods.cards.map((c) => c.term)).toContain("proof");
  });

  it("turns a direct member indirect in place", () => {
    const state = applyMutation(board(), {
      kind: "assign",
      term: "support",
      theme: "Care work",
      gender: "F",
      direct: false,
    });
    const care = state.columns.find((c) => c.name === "Care work")!;
    expect(care.cards.find((c) => c.term === "support")).toEqual({
      term: "support",
      indirect: true,
    });
  });

  it("creates the column when assigning into an unknown theme", () => {
    const state = applyMutation(board(), {
      kind: "assign",
      term: "interview",
      theme: "Qualitative methods",
      gender: "F",
      direct: true,
    });
    const target = state.columns.find((c) => c.name === "Qualitative methods");
    expect(target?.cards).toEqual([{ term: "interview", indirect: false }]);
  });

  it("removes a term from one column only", () => {
    const state = applyMutation(board(), {
      kind: "remove",
      theme: "Care work",
      term: "palliative",
    });
    const care = state.columns.find((c) => c.name === "Care work")!;
    expect(care.cards.map((c) => c.term)).toEqual(["nurse", "support"]);
  });

  it("renames a column and keeps its cards", () => {
    const state = applyMutation(board(), {
      kind: "rename",
      theme: "Care work",
      rename: "Caregiving",
    });
    const renamed = state.columns.find((c) => c.name === "Caregiving")!;
    expect(renamed.cards.length).toBe(3);
    expect(state.columns.some((c) => c.name === "Care work")).toBe(false);
  });

  it("updates notes", () => {
    const state = applyMutation(board(), {
      kind: "notes",
      theme: "Formal methods",
      notes: "proof-centric vocabulary",
    });
    expect(state.columns.find((c) => c.name === "Formal methods")!.notes).toBe(
      "proof-centric vocabulary",
    );
  });

  it("deletes a column", () => {
    const state = applyMutation(board(), { kind: "delete", theme: "Care work" });
    expect(state.columns.map((c) => c.name)).toEqual(["Formal methods"]);
  });

  it("never touches the revision locally", () => {
    const state = applyMutation(board(), { kind: "delete", theme: "Care work" });
    expect(state.revision).toBe(3);
  });
});
