import type { CatalogShape, MatrixResponse, PaletteEntry } from "./types.js";
import type { CardState, RequiredColorPick, ResultsState } from "./state.js";

export function escapeHtml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * Inline SVG glyph for a shape, styled exactly like stimulus marks:
 * filled shapes use the color as fill, unfilled get a white fill with a
 * colored outline, open shapes are stroke-only.
 */
export function shapeGlyphSvg(shape: CatalogShape, hex: string,
                              sizePx = 18): string {
  let style: string;
  if (shape.fill_class === "filled") {
    style = `fill="${hex}" stroke="none"`;
  } else if (shape.fill_class === "unfilled") {
    style = `fill="#ffffff" stroke="${hex}" stroke-width="0.22"`;
  } else {
    style = `fill="none" stroke="${hex}" stroke-width="0.22" `
      + 'stroke-linecap="round"';
  }
  return `<svg class="glyph" width="${sizePx}" height="${sizePx}" `
    + `viewBox="0 0 1 1" role="img" aria-label="${escapeHtml(shape.name)}">`
    + `<path d="${escapeHtml(shape.path)}" ${style}/></svg>`;
}

function entryHtml(entry: PaletteEntry, position: number, disabled: boolean,
                   shapesById: Map<number, CatalogShape>): string {
  const bits: string[] = [];
  if (entry.hex !== undefined) {
    bits.push(`<span class="swatch" style="background:${entry.hex}" `
      + `title="${entry.hex}"></span>`);
  }
  if (entry.shape_id !== undefined) {
    const shape = shapesById.get(entry.shape_id);
    const hex = entry.hex ?? "#333333";
    if (shape) bits.push(shapeGlyphSvg(shape, hex));
  }
  const label = entry.shape !== undefined
    ? escapeHtml(entry.shape)
    : (entry.hex ?? "");
  bits.push(`<span class="entry-label">${label}</span>`);
  const disAttr = disabled
    ? ' disabled title="required by your constraints"' : "";
  bits.push(`<button class="swap-btn" data-position="${position}"`
    + `${disAttr}>swap</button>`);
  return `<li class="entry">${bits.join("")}</li>`;
}

function componentsTooltip(components: Record<string, number>): string {
  const rows = Object.entries(components)
    .map(([k, v]) => `${k}: ${v.toFixed(4)}`).join("\n");
  return escapeHtml(rows);
}

export function renderCard(card: CardState, index: number,
                           shapesById: Map<number, CatalogShape>,
                           required: Set<number>): string {
  const p = card.palette;
  const parts: string[] = [];
  parts.push(`<article class="card" data-card="${index}">`);
  parts.push('<header class="card-head">'
    + `<span class="rank">#${p.rank}</span>`
    + `<span class="score" title="${componentsTooltip(p.components)}">`
    + `score ${p.score.toFixed(4)}</span>`);
  if (card.lastDelta !== null) {
    const sign = card.lastDelta >= 0 ? "+" : "";
    parts.push(`<span class="delta">${sign}${card.lastDelta.toFixed(4)} `
      + "from swap</span>");
  }
  parts.push("</header>");
  const disableAll = card.exhausted || card.swapPending;
  parts.push('<ul class="entries">');
  p.entries.forEach((entry, i) => {
    parts.push(entryHtml(entry, i, disableAll || required.has(i), shapesById));
  });
  parts.push("</ul>");
  if (card.exhausted) {
    parts.push('<p class="notice terminal">No more alternatives: '
      + `${escapeHtml(card.error ?? "swap options exhausted")}</p>`);
  } else if (card.error) {
    parts.push(`<p class="notice error">${escapeHtml(card.error)}</p>`);
  }
  parts.push(`<button class="preview-btn" data-card="${index}">preview</button>`);
  parts.push("</article>");
  return parts.join("");
}

export function renderResults(results: ResultsState | null,
                              shapesById: Map<number, CatalogShape>,
                              requiredColors: RequiredColorPick[],
                              requiredShapes: number[]): string {
  if (results === null) {
    return '<p class="placeholder">Set your constraints and generate.</p>';
  }
  const parts: string[] = [];
  if (results.note) {
    parts.push(`<p class="notice note">${escapeHtml(results.note)}</p>`);
  }
  const colorIds = requiredColors.map((p) => p.colorId);
  results.cards.forEach((card, i) => {
    const required = new Set<number>();
    card.palette.entries.forEach((entry, pos) => {
      if (entry.color_id !== undefined
          && colorIds.includes(entry.color_id)) required.add(pos);
      if (entry.shape_id !== undefined
          && requiredShapes.includes(entry.shape_id)) required.add(pos);
    });
    parts.push(renderCard(card, i, shapesById, required));
  });
  return parts.join("");
}

export function renderRequiredColorChips(picks: RequiredColorPick[]): string {
  if (picks.length === 0) return '<span class="muted">none</span>';
  return picks.map((p, i) =>
    `<span class="chip"><span class="swatch" style="background:${p.poolHex}">`
    + `</span> ${escapeHtml(p.input)} &rarr; ${p.poolHex}`
    + `<button class="chip-remove" data-pick="${i}">&times;</button></span>`,
  ).join("");
}

export function renderFormErrors(errors: Record<string, string>): string {
  return Object.entries(errors)
    .map(([field, msg]) =>
      `<p class="field-error" data-field="${field}">${escapeHtml(msg)}</p>`)
    .join("");
}

export function renderErrorBanner(message: string): string {
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}

/** Blend white → a saturated blue by accuracy in [0.5, 1]. */
export function heatColor(acc: number): string {
  const t = Math.max(0, Math.min(1, (acc - 0.5) / 0.5));
  const mix = (a: number, b: number) => Math.round(a + (b - a) * t);
  return `rgb(${mix(255, 24)},${mix(255, 90)},${mix(255, 200)})`;
}

function labelText(label: number | number[]): string {
  return Array.isArray(label) ? label.join("/") : String(label);
}

/**
 * Symmetric heatmap table from a matrix response. Cells hold indices into
 * `labels`; pairs without evidence stay blank (missing, never zero).
 */
export function renderHeatmap(matrix: MatrixResponse): string {
  const k = matrix.labels.length;
  const acc: Array<Array<[number, number] | null>> =
    Array.from({ length: k }, () => Array(k).fill(null));
  for (const [i, j, a, trials] of matrix.cells) {
    acc[i][j] = [a, trials];
    acc[j][i] = [a, trials];
  }
  const parts: string[] = ['<table class="heatmap"><thead><tr><th></th>'];
  for (const label of matrix.labels) {
    parts.push(`<th>${escapeHtml(labelText(label))}</th>`);
  }
  parts.push("</tr></thead><tbody>");
  for (let i = 0; i < k; i++) {
    parts.push(`<tr><th>${escapeHtml(labelText(matrix.labels[i]))}</th>`);
    for (let j = 0; j < k; j++) {
      const cell = acc[i][j];
      if (i === j) {
        parts.push('<td class="diag"></td>');
      } else if (cell === null) {
        parts.push('<td class="missing" title="no evidence"></td>');
      } else {
        const [a, trials] = cell;
        parts.push(`<td style="background:${heatColor(a)}" `
          + `title="${(a * 100).toFixed(1)}% over ${trials} trials">`
          + `${(a * 100).toFixed(0)}</td>`);
      }
    }
    parts.push("</tr>");
  }
  parts.push("</tbody></table>");
  parts.push(`<p class="muted">${matrix.cells.length} observed pairs, `
    + `axis ${matrix.axis}, bin ${matrix.bin}</p>`);
  return parts.join("");
}
