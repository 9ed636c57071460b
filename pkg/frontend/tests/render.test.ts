import { describe, expect, it } from "vitest";
import { ApiError } from "../src/api.js";
import {
  escapeHtml, heatColor, renderCard, renderHeatmap, renderResults,
  shapeGlyphSvg,
} from "../src/render.js";
import { applyGenerate, applySwap, applySwapError } from "../src/state.js";
import type {
  CatalogShape, GenerateResponse, MatrixResponse, SwapResponse,
} from "../src/types.js";
import { fixture } from "./helpers.js";

const generateFx = fixture<GenerateResponse>("generate_redundant.json");
const swapFx = fixture<SwapResponse>("swap_ok.json");
const { shapes } = fixture<{ shapes: CatalogShape[] }>("shapes.json");
const shapesById = new Map(shapes.map((s) => [s.id, s]));

describe("escapeHtml", () => {
  it("escapes markup-significant characters", () => {
    expect(escapeHtml('<b a="1">&</b>'))
      .toBe("&lt;b a=&quot;1&quot;&gt;&amp;&lt;/b&gt;");
  });
});

describe("shapeGlyphSvg", () => {
  it("styles glyphs by fill class like stimulus marks", () => {
    const byClass = new Map(shapes.map((s) => [s.fill_class, s]));
    const filled = shapeGlyphSvg(byClass.get("filled")!, "#112233");
    expect(filled).toContain('fill="#112233" stroke="none"');
    const unfilled = shapeGlyphSvg(byClass.get("unfilled")!, "#112233");
    expect(unfilled).toContain('fill="#ffffff" stroke="#112233"');
    const open = shapeGlyphSvg(byClass.get("open")!, "#112233");
    expect(open).toContain('fill="none" stroke="#112233"');
    expect(open).toContain('viewBox="0 0 1 1"');
  });
});

describe("renderResults", () => {
  it("renders cards in service rank order with exact scores", () => {
    const state = applyGenerate(generateFx);
    const html = renderResults(state, shapesById, [], []);
    const ranks = [...html.matchAll(/#(\d+)<\/span>/g)].map((m) => m[1]);
    expect(ranks).toEqual(["1", "2", "3"]);
    for (const p of generateFx.palettes) {
      expect(html).toContain(`score ${p.score.toFixed(4)}`);
    }
    const first = html.indexOf(`score ${generateFx.palettes[0].score.toFixed(4)}`);
    const last = html.indexOf(`score ${generateFx.palettes[2].score.toFixed(4)}`);
    expect(first).toBeGreaterThanOrEqual(0);
    expect(first).toBeLessThan(last);
  });

  it("shows swatches and glyphs for every entry", () => {
    const state = applyGenerate(generateFx);
    const html = renderResults(state, shapesById, [], []);
    for (const entry of generateFx.palettes[0].entries) {
      expect(html).toContain(`background:${entry.hex}`);
      expect(html).toContain(`aria-label="${entry.shape}"`);
    }
  });

  it("disables the swap affordance only for required entries", () => {
    const state = applyGenerate(generateFx);
    const html = renderCard(state.cards[0], 0, shapesById, new Set([2]));
    const buttons = [...html.matchAll(/<button class="swap-btn"[^>]*>/g)]
      .map((m) => m[0]);
    expect(buttons).toHaveLength(4);
    expect(buttons[2]).toContain("disabled");
    expect(buttons[0]).not.toContain("disabled");
    expect(buttons[1]).not.toContain("disabled");
    expect(buttons[3]).not.toContain("disabled");
  });

  it("shows the score delta after a swap", () => {
    const state = applySwap(applyGenerate(generateFx), 0, swapFx);
    const html = renderCard(state.cards[0], 0, shapesById, new Set());
    const delta = swapFx.palette.score - generateFx.palettes[0].score;
    expect(html).toContain(`${delta.toFixed(4)} from swap`);
  });

  it("renders the terminal notice and disables swaps when exhausted", () => {
    const err = new ApiError(409, "exhausted_alternatives",
      "no feasible replacement for position 0");
    const state = applySwapError(applyGenerate(generateFx), 0, err);
    const html = renderCard(state.cards[0], 0, shapesById, new Set());
    expect(html).toContain("notice terminal");
    expect(html).toContain("no feasible replacement for position 0");
    const buttons = [...html.matchAll(/<button class="swap-btn"[^>]*>/g)];
    expect(buttons.every((m) => m[0].includes("disabled"))).toBe(true);
  });

  it("surfaces the auto-encoding note verbatim", () => {
    const auto = fixture<GenerateResponse>("generate_auto_n2.json");
    const html = renderResults(applyGenerate(auto), shapesById, [], []);
    expect(html).toContain("redundancy shows no benefit at 2 categories");
  });

  it("renders a placeholder before any generation", () => {
    expect(renderResults(null, shapesById, [], [])).toContain("placeholder");
  });
});

describe("renderHeatmap", () => {
  const matrix = fixture<MatrixResponse>("matrix_color_all.json");

  it("renders a symmetric table over all labels", () => {
    const html = renderHeatmap(matrix);
    const k = matrix.labels.length;
    expect([...html.matchAll(/<tr>/g)]).toHaveLength(k + 1);
    // full coverage fixture: every off-diagonal cell observed, none missing
    expect([...html.matchAll(/<td /g)]).toHaveLength(k * k);
    expect(html).not.toContain('class="missing"');
    expect([...html.matchAll(/class="diag"/g)]).toHaveLength(k);
    expect(html).toContain("66 observed pairs");
  });

  it("shows each cell's accuracy and trials in both triangles", () => {
    const html = renderHeatmap(matrix);
    const [, , a, trials] = matrix.cells[0];
    const title = `title="${(a * 100).toFixed(1)}% over ${trials} trials"`;
    const hits = html.split(title).length - 1;
    expect(hits).toBeGreaterThanOrEqual(2);
  });

  it("leaves unobserved pairs blank instead of zero", () => {
    const sparse: MatrixResponse = {
      version: 1, axis: "color", bin: "all", labels: [0, 1, 2],
      cells: [[0, 1, 0.75, 10]],
    };
    const html = renderHeatmap(sparse);
    expect([...html.matchAll(/class="missing"/g)]).toHaveLength(4);
    // missing cells are empty, not rendered as 0% accuracy
    expect([...html.matchAll(/<td class="missing"[^>]*><\/td>/g)])
      .toHaveLength(4);
  });

  it("maps accuracy monotonically onto the heat ramp", () => {
    expect(heatColor(0.5)).toBe("rgb(255,255,255)");
    expect(heatColor(1.0)).toBe("rgb(24,90,200)");
    const mid = heatColor(0.75);
    expect(mid).not.toBe(heatColor(0.5));
    expect(mid).not.toBe(heatColor(1.0));
  });
});
