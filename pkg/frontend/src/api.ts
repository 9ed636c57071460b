import type {
  CatalogShape, GenerateRequest, GenerateResponse, MatrixResponse,
  PoolColor, ScoredPalette, ServiceErrorBody, SwapResponse,
} from "./types.js";

/** Structured error raised for every non-2xx service response. */
export class ApiError extends Error {
  status: number;
  code: string;
  field?: string;

  constructor(status: number, code: string, message: string, field?: string) {
    super(message);
    this.status = status;
    this.code = code;
    this.field = field;
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let code = "unknown_error";
  let message = `request failed with status ${res.status}`;
  let field: string | undefined;
  try {
    const body = (await res.json()) as ServiceErrorBody;
    if (body.error) {
      code = body.error.code;
      message = body.error.message;
      field = body.error.field;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(res.status, code, message, field);
}

async function getJson<T>(fetcher: typeof fetch, url: string): Promise<T> {
  const res = await fetcher(url);
  if (!res.ok) throw await parseError(res);
  return (await res.json()) as T;
}

export class ApiClient {
  private base: string;
  private fetcher: typeof fetch;

  constructor(base = "", fetcher: typeof fetch = fetch) {
    this.base = base.replace(/\/$/, "");
    this.fetcher = fetcher;
  }

  getColors(): Promise<{ colors: PoolColor[] }> {
    return getJson(this.fetcher, `${this.base}/api/colors`);
  }

  getShapes(): Promise<{ shapes: CatalogShape[] }> {
    return getJson(this.fetcher, `${this.base}/api/shapes`);
  }

  getMatrix(axis: string, bin: string): Promise<MatrixResponse> {
    const q = new URLSearchParams({ axis, bin });
    return getJson(this.fetcher, `${this.base}/api/matrix?${q}`);
  }

  async generate(body: GenerateRequest): Promise<GenerateResponse> {
    const res = await this.fetcher(`${this.base}/api/palettes/generate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as GenerateResponse;
  }

  async swap(sessionId: string | null, palette: ScoredPalette,
             position: number): Promise<SwapResponse> {
    const res = await this.fetcher(`${this.base}/api/palettes/swap`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        session_id: sessionId,
        palette: { encoding: palette.encoding, entries: palette.entries },
        position,
      }),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as SwapResponse;
  }

  /** URL for the server-rendered SVG preview of a palette at count n. */
  previewUrl(n: number, seed: number, palette: ScoredPalette | null,
             engagement = false): string {
    const q = new URLSearchParams({ n: String(n), seed: String(seed) });
    if (palette) {
      q.set("encoding", palette.encoding);
      const colors = palette.entries
        .filter((e) => e.color_id !== undefined)
        .map((e) => e.color_id).join(",");
      const shapes = palette.entries
        .filter((e) => e.shape_id !== undefined)
        .map((e) => e.shape_id).join(",");
      if (colors) q.set("colors", colors);
      if (shapes) q.set("shapes", shapes);
    }
    if (engagement) q.set("engagement", "true");
    return `${this.base}/api/stimulus/preview?${q}`;
  }

  async preview(n: number, seed: number, palette: ScoredPalette | null,
                engagement = false): Promise<string> {
    const res = await this.fetcher(this.previewUrl(n, seed, palette, engagement));
    if (!res.ok) throw await parseError(res);
    return res.text();
  }
}
