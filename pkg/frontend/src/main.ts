import { ApiClient, ApiError } from "./api.js";
import { nearestPoolColor } from "./nearest.js";
import {
  DEFAULT_FORM, applyGenerate, applySwap, applySwapError, toGenerateRequest,
  validateForm,
} from "./state.js";
import type { FormState, ResultsState } from "./state.js";
import {
  renderErrorBanner, renderFormErrors, renderHeatmap,
  renderRequiredColorChips, renderResults,
} from "./render.js";
import type { CatalogShape, PoolColor } from "./types.js";

const api = new ApiClient();

const form: FormState = { ...DEFAULT_FORM, requiredColors: [], requiredShapes: [] };
let results: ResultsState | null = null;
let colors: PoolColor[] = [];
let shapesById = new Map<number, CatalogShape>();
let selectedCard = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function redrawForm(): void {
  const errors = validateForm(form);
  el("form-errors").innerHTML = renderFormErrors(errors);
  el<HTMLButtonElement>("generate-btn").disabled =
    Object.keys(errors).length > 0;
  el("required-colors").innerHTML =
    renderRequiredColorChips(form.requiredColors);
}

function redrawResults(): void {
  el("results").innerHTML = renderResults(
    results, shapesById, form.requiredColors, form.requiredShapes);
}

function showBanner(message: string): void {
  el("banner").innerHTML = renderErrorBanner(message);
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    const where = err.field ? ` (${err.field})` : "";
    return `${err.code}${where}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

async function refreshPreview(): Promise<void> {
  const pane = el("preview");
  if (!results || results.cards.length === 0) {
    pane.innerHTML = '<p class="placeholder">Generate a palette to preview.</p>';
    return;
  }
  const card = results.cards[Math.min(selectedCard, results.cards.length - 1)];
  pane.innerHTML = '<p class="placeholder">loading preview…</p>';
  try {
    const seed = parseInt(form.seed, 10) || 0;
    pane.innerHTML = await api.preview(card.palette.n, seed, card.palette);
  } catch (err) {
    pane.innerHTML = renderErrorBanner(describe(err));
  }
}

async function refreshHeatmap(): Promise<void> {
  const axis = el<HTMLSelectElement>("matrix-axis").value;
  const bin = el<HTMLSelectElement>("matrix-bin").value;
  const pane = el("heatmap");
  pane.innerHTML = '<p class="placeholder">loading matrix…</p>';
  try {
    pane.innerHTML = renderHeatmap(await api.getMatrix(axis, bin));
  } catch (err) {
    pane.innerHTML = renderErrorBanner(describe(err));
  }
}

async function onGenerate(): Promise<void> {
  el("banner").innerHTML = "";
  const btn = el<HTMLButtonElement>("generate-btn");
  btn.disabled = true;
  try {
    results = applyGenerate(await api.generate(toGenerateRequest(form)));
    selectedCard = 0;
    redrawResults();
    await refreshPreview();
  } catch (err) {
    showBanner(describe(err));
  } finally {
    redrawForm();
  }
}

async function onSwap(cardIndex: number, position: number): Promise<void> {
  if (!results) return;
  const card = results.cards[cardIndex];
  if (card.swapPending) return; // serialize swaps per card
  card.swapPending = true;
  redrawResults();
  try {
    const resp = await api.swap(results.sessionId, card.palette, position);
    results = applySwap(results, cardIndex, resp);
  } catch (err) {
    results = applySwapError(results, cardIndex, err);
  }
  redrawResults();
  if (cardIndex === selectedCard) await refreshPreview();
}

function onAddRequiredColor(): void {
  const input = el<HTMLInputElement>("required-color-input");
  const pick = nearestPoolColor(input.value, colors);
  if (!pick) {
    el("form-errors").innerHTML = renderFormErrors(
      { requiredColors: "enter a hex color like #1f77b4" });
    return;
  }
  form.requiredColors.push(
    { input: input.value.trim(), colorId: pick.id, poolHex: pick.hex });
  input.value = "";
  redrawForm();
}

function wire(): void {
  for (const id of ["encoding", "n", "k", "seed"] as const) {
    const input = el<HTMLInputElement | HTMLSelectElement>(`field-${id}`);
    input.addEventListener("input", () => {
      (form as unknown as Record<string, string>)[id] = input.value;
      redrawForm();
    });
  }
  el("add-color-btn").addEventListener("click", onAddRequiredColor);
  el("required-colors").addEventListener("click", (ev) => {
    const btn = (ev.target as HTMLElement).closest<HTMLElement>(".chip-remove");
    if (!btn) return;
    form.requiredColors.splice(Number(btn.dataset.pick), 1);
    redrawForm();
  });
  el("generate-btn").addEventListener("click", () => { void onGenerate(); });
  el("results").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const cardEl = target.closest<HTMLElement>(".card");
    if (!cardEl) return;
    const cardIndex = Number(cardEl.dataset.card);
    const swapBtn = target.closest<HTMLButtonElement>(".swap-btn");
    if (swapBtn && !swapBtn.disabled) {
      void onSwap(cardIndex, Number(swapBtn.dataset.position));
      return;
    }
    if (target.closest(".preview-btn")) {
      selectedCard = cardIndex;
      void refreshPreview();
    }
  });
  el("matrix-axis").addEventListener("change", () => { void refreshHeatmap(); });
  el("matrix-bin").addEventListener("change", () => { void refreshHeatmap(); });
}

async function init(): Promise<void> {
  wire();
  redrawForm();
  try {
    const [colorResp, shapeResp] = await Promise.all(
      [api.getColors(), api.getShapes()]);
    colors = colorResp.colors;
    shapesById = new Map(shapeResp.shapes.map((s) => [s.id, s]));
  } catch (err) {
    showBanner(describe(err));
  }
  await refreshHeatmap();
}

document.addEventListener("DOMContentLoaded", () => { void init(); });
