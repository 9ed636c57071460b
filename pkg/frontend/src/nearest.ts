import type { PoolColor } from "./types.js";

/** Parse "#rgb" or "#rrggbb" into [r, g, b] in 0–255, or null if malformed. */
export function parseHex(hex: string): [number, number, number] | null {
  const m = /^#?([0-9a-fA-F]{3}|[0-9a-fA-F]{6})$/.exec(hex.trim());
  if (!m) return null;
  let s = m[1];
  if (s.length === 3) s = s.split("").map((c) => c + c).join("");
  return [
    parseInt(s.slice(0, 2), 16),
    parseInt(s.slice(2, 4), 16),
    parseInt(s.slice(4, 6), 16),
  ];
}

/**
 * Map a free-form hex input to the closest pool swatch for constraint entry.
 * This is a display-level convenience (Euclidean distance in RGB); the pool
 * id it returns is what actually constrains generation on the server.
 */
export function nearestPoolColor(hex: string,
                                 colors: PoolColor[]): PoolColor | null {
  const rgb = parseHex(hex);
  if (!rgb || colors.length === 0) return null;
  let best: PoolColor | null = null;
  let bestDist = Infinity;
  for (const c of colors) {
    const crgb = parseHex(c.hex);
    if (!crgb) continue;
    const d = (rgb[0] - crgb[0]) ** 2 + (rgb[1] - crgb[1]) ** 2
      + (rgb[2] - crgb[2]) ** 2;
    if (d < bestDist) {
      bestDist = d;
      best = c;
    }
  }
  return best;
}
