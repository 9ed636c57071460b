import type {
  EncodingName, GenerateRequest, GenerateResponse, ScoredPalette, SwapResponse,
} from "./types.js";
import { ApiError } from "./api.js";

/** One required color picked via hex input, mapped to its pool swatch. */
export interface RequiredColorPick {
  input: string;       // what the user typed
  colorId: number;     // nearest pool representative
  poolHex: string;     // the representative's hex, shown as "mapped to"
}

export interface FormState {
  encoding: EncodingName | "auto";
  n: string;           // raw input; validated to an integer in [2, 10]
  k: string;
  seed: string;
  requiredColors: RequiredColorPick[];
  requiredShapes: number[];
}

export const DEFAULT_FORM: FormState = {
  encoding: "auto",
  n: "6",
  k: "3",
  seed: "0",
  requiredColors: [],
  requiredShapes: [],
};

export interface CardState {
  palette: ScoredPalette;
  /** score change from the most recent swap on this card, if any */
  lastDelta: number | null;
  /** set once the service reports exhausted_alternatives for this card */
  exhausted: boolean;
  error: string | null;
  swapPending: boolean;
}

export interface ResultsState {
  sessionId: string | null;
  cards: CardState[];
  note: string | null;
}

function intField(raw: string): number | null {
  if (!/^-?\d+$/.test(raw.trim())) return null;
  return parseInt(raw, 10);
}

/** Per-field validation messages; an empty map means the form may submit. */
export function validateForm(form: FormState): Record<string, string> {
  const errors: Record<string, string> = {};
  const n = intField(form.n);
  if (n === null || n < 2 || n > 10) {
    errors.n = "category count must be a whole number from 2 to 10";
  }
  const k = intField(form.k);
  if (k === null || k < 1 || k > 20) {
    errors.k = "number of palettes must be a whole number from 1 to 20";
  }
  if (intField(form.seed) === null) {
    errors.seed = "seed must be a whole number";
  }
  if (n !== null) {
    if (form.requiredColors.length > n) {
      errors.requiredColors = `at most ${n} required colors for ${n} categories`;
    }
    if (form.requiredShapes.length > n) {
      errors.requiredShapes = `at most ${n} required shapes for ${n} categories`;
    }
  }
  const ids = form.requiredColors.map((p) => p.colorId);
  if (new Set(ids).size !== ids.length) {
    errors.requiredColors = "required colors must be distinct";
  }
  if (new Set(form.requiredShapes).size !== form.requiredShapes.length) {
    errors.requiredShapes = "required shapes must be distinct";
  }
  return errors;
}

/** Build the request body from a form that passed validation. */
export function toGenerateRequest(form: FormState): GenerateRequest {
  return {
    encoding: form.encoding,
    n: parseInt(form.n, 10),
    k: parseInt(form.k, 10),
    seed: parseInt(form.seed, 10),
    constraints: {
      required_colors: form.requiredColors.map((p) => p.colorId),
      required_shapes: form.requiredShapes.slice(),
      required_markers: [],
      excluded_colors: [],
      excluded_shapes: [],
    },
  };
}

export function applyGenerate(resp: GenerateResponse): ResultsState {
  return {
    sessionId: resp.session_id,
    cards: resp.palettes.map((p) => ({
      palette: p,
      lastDelta: null,
      exhausted: false,
      error: null,
      swapPending: false,
    })),
    note: resp.note ?? null,
  };
}

export function applySwap(state: ResultsState, cardIndex: number,
                          resp: SwapResponse): ResultsState {
  const cards = state.cards.slice();
  const prev = cards[cardIndex];
  cards[cardIndex] = {
    palette: resp.palette,
    lastDelta: resp.palette.score - prev.palette.score,
    exhausted: false,
    error: null,
    swapPending: false,
  };
  return { ...state, sessionId: resp.session_id, cards };
}

export function applySwapError(state: ResultsState, cardIndex: number,
                               err: unknown): ResultsState {
  const cards = state.cards.slice();
  const prev = cards[cardIndex];
  if (err instanceof ApiError && err.code === "exhausted_alternatives") {
    cards[cardIndex] = {
      ...prev, exhausted: true, error: err.message, swapPending: false,
    };
  } else {
    const message = err instanceof Error ? err.message : String(err);
    cards[cardIndex] = { ...prev, error: message, swapPending: false };
  }
  return { ...state, cards };
}

/**
 * Positions in a palette that hold a required color or shape. The swap
 * affordance is disabled for these entries.
 */
export function requiredPositions(palette: ScoredPalette,
                                  requiredColorIds: number[],
                                  requiredShapeIds: number[]): Set<number> {
  const out = new Set<number>();
  palette.entries.forEach((entry, i) => {
    if (entry.color_id !== undefined
        && requiredColorIds.includes(entry.color_id)) out.add(i);
    if (entry.shape_id !== undefined
        && requiredShapeIds.includes(entry.shape_id)) out.add(i);
  });
  return out;
}
