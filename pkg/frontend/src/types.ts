/** Wire types mirroring the palettekit service responses. The UI never
 * recomputes any of these values; it only displays them. */

export type EncodingName = "color_only" | "shape_only" | "redundant";

export interface PoolColor {
  id: number;
  hex: string;
  L: number;
  a: number;
  b: number;
  name: string;
  manual: boolean;
}

export interface CatalogShape {
  id: number;
  name: string;
  path: string;
  fill_class: "filled" | "unfilled" | "open";
  source_tool: string;
}

export interface PaletteEntry {
  color_id?: number;
  hex?: string;
  shape_id?: number;
  shape?: string;
}

export interface ScoredPalette {
  encoding: EncodingName;
  n: number;
  entries: PaletteEntry[];
  score: number;
  components: Record<string, number>;
  rank: number;
}

export interface GenerateResponse {
  session_id: string;
  encoding: EncodingName;
  palettes: ScoredPalette[];
  note?: string;
}

export interface SwapResponse {
  session_id: string;
  palette: ScoredPalette;
  excluded_colors: number[];
  excluded_shapes: number[];
}

export interface MatrixResponse {
  version: number;
  axis: "color" | "shape" | "marker";
  bin: "all" | "small" | "medium" | "large";
  labels: Array<number | number[]>;
  /** [i, j, accuracy, trials] with i/j indices into labels */
  cells: Array<[number, number, number, number]>;
}

export interface ConstraintsBody {
  required_colors: number[];
  required_shapes: number[];
  required_markers: number[][];
  excluded_colors: number[];
  excluded_shapes: number[];
}

export interface GenerateRequest {
  encoding: EncodingName | "auto";
  n: number;
  k: number;
  seed: number;
  constraints: ConstraintsBody;
}

export interface ServiceErrorBody {
  error: { code: string; message: string; field?: string };
}
