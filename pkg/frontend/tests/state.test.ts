import { describe, expect, it } from "vitest";
import { ApiError } from "../src/api.js";
import {
  DEFAULT_FORM, applyGenerate, applySwap, applySwapError, requiredPositions,
  toGenerateRequest, validateForm,
} from "../src/state.js";
import type { FormState } from "../src/state.js";
import type {
  GenerateResponse, ServiceErrorBody, SwapResponse,
} from "../src/types.js";
import { fixture } from "./helpers.js";

const generateFx = fixture<GenerateResponse>("generate_redundant.json");
const swapFx = fixture<SwapResponse>("swap_ok.json");
const exhaustedFx = fixture<ServiceErrorBody>("swap_exhausted.json");

function form(overrides: Partial<FormState>): FormState {
  return { ...DEFAULT_FORM, requiredColors: [], requiredShapes: [], ...overrides };
}

describe("validateForm", () => {
  it("accepts the defaults", () => {
    expect(validateForm(form({}))).toEqual({});
  });

  it("rejects n outside [2, 10] and non-integers", () => {
    for (const bad of ["1", "11", "0", "-3", "2.5", "six", ""]) {
      expect(validateForm(form({ n: bad }))).toHaveProperty("n");
    }
    for (const ok of ["2", "10", "7"]) {
      expect(validateForm(form({ n: ok }))).toEqual({});
    }
  });

  it("rejects more required entries than categories", () => {
    const picks = [4, 9, 12].map((id) => (
      { input: "#000000", colorId: id, poolHex: "#000000" }));
    const f = form({ n: "2", requiredColors: picks });
    expect(validateForm(f)).toHaveProperty("requiredColors");
    expect(validateForm(form({ n: "3", requiredColors: picks }))).toEqual({});
    const shapes = form({ n: "2", requiredShapes: [1, 2, 3] });
    expect(validateForm(shapes)).toHaveProperty("requiredShapes");
  });

  it("rejects duplicate required entries", () => {
    const dup = [
      { input: "#111111", colorId: 4, poolHex: "#111111" },
      { input: "#111112", colorId: 4, poolHex: "#111111" },
    ];
    expect(validateForm(form({ requiredColors: dup })))
      .toHaveProperty("requiredColors");
    expect(validateForm(form({ requiredShapes: [2, 2] })))
      .toHaveProperty("requiredShapes");
  });

  it("rejects bad k and seed", () => {
    expect(validateForm(form({ k: "0" }))).toHaveProperty("k");
    expect(validateForm(form({ k: "21" }))).toHaveProperty("k");
    expect(validateForm(form({ seed: "x" }))).toHaveProperty("seed");
    expect(validateForm(form({ seed: "-5" }))).toEqual({});
  });
});

describe("toGenerateRequest", () => {
  it("builds the wire body from a valid form", () => {
    const f = form({
      encoding: "redundant", n: "4", k: "3", seed: "1",
      requiredColors: [{ input: "#6f9e26", colorId: 23, poolHex: "#6f9e26" }],
      requiredShapes: [0],
    });
    expect(toGenerateRequest(f)).toEqual({
      encoding: "redundant", n: 4, k: 3, seed: 1,
      constraints: {
        required_colors: [23], required_shapes: [0], required_markers: [],
        excluded_colors: [], excluded_shapes: [],
      },
    });
  });
});

describe("results reducers", () => {
  it("applyGenerate keeps the service ranking untouched", () => {
    const state = applyGenerate(generateFx);
    expect(state.sessionId).toBe(generateFx.session_id);
    expect(state.cards).toHaveLength(3);
    expect(state.cards.map((c) => c.palette.rank)).toEqual([1, 2, 3]);
    expect(state.cards.map((c) => c.palette.score))
      .toEqual(generateFx.palettes.map((p) => p.score));
    expect(state.cards.every((c) => !c.exhausted && c.error === null)).toBe(true);
    expect(state.note).toBeNull();
  });

  it("applyGenerate carries the advisory note through", () => {
    const auto = fixture<GenerateResponse>("generate_auto_n2.json");
    const state = applyGenerate(auto);
    expect(state.note).toBe("redundancy shows no benefit at 2 categories");
  });

  it("applySwap replaces the card and records the score delta", () => {
    const state = applyGenerate(generateFx);
    const next = applySwap(state, 0, swapFx);
    expect(next.cards[0].palette).toEqual(swapFx.palette);
    expect(next.cards[0].lastDelta).toBeCloseTo(
      swapFx.palette.score - generateFx.palettes[0].score, 12);
    expect(next.cards[0].lastDelta!).toBeLessThanOrEqual(0);
    expect(next.cards[1].palette).toEqual(generateFx.palettes[1]);
    expect(next.sessionId).toBe(swapFx.session_id);
  });

  it("applySwapError marks exhausted_alternatives as terminal", () => {
    const state = applyGenerate(generateFx);
    const err = new ApiError(409, exhaustedFx.error.code,
      exhaustedFx.error.message);
    const next = applySwapError(state, 1, err);
    expect(next.cards[1].exhausted).toBe(true);
    expect(next.cards[1].error).toBe(
      "no feasible replacement for position 0");
    expect(next.cards[0].exhausted).toBe(false);
  });

  it("applySwapError keeps other errors non-terminal", () => {
    const state = applyGenerate(generateFx);
    const next = applySwapError(
      state, 0, new ApiError(404, "unknown_id", "no such session"));
    expect(next.cards[0].exhausted).toBe(false);
    expect(next.cards[0].error).toBe("no such session");
  });
});

describe("requiredPositions", () => {
  it("flags entries holding required colors or shapes", () => {
    const palette = generateFx.palettes[0];
    expect([...requiredPositions(palette, [23], [])]).toEqual([2]);
    expect([...requiredPositions(palette, [], [1])]).toEqual([1]);
    expect([...requiredPositions(palette, [18], [17])].sort())
      .toEqual([1, 3]);
    expect(requiredPositions(palette, [], []).size).toBe(0);
  });
});
