import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

export function fixture<T>(name: string): T {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf8")) as T;
}

export function fixtureText(name: string): string {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return readFileSync(path, "utf8");
}

/** A fetch stub that replies from a routing table keyed by method+path. */
export function fakeFetch(
  routes: Record<string, { status: number; body: unknown }>,
): { fetcher: typeof fetch; calls: Array<{ url: string; init?: RequestInit }> } {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const fetcher = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls.push({ url, init });
    const method = init?.method ?? "GET";
    const key = `${method} ${url}`;
    const route = routes[key] ?? routes[url];
    if (!route) throw new Error(`no fake route for ${key}`);
    const body = typeof route.body === "string"
      ? route.body : JSON.stringify(route.body);
    return new Response(body, {
      status: route.status,
      headers: { "content-type": typeof route.body === "string"
        ? "image/svg+xml" : "application/json" },
    });
  }) as typeof fetch;
  return { fetcher, calls };
}
