/** App configuration: nothing but the gateway base URL. */

export interface StudioConfig {
  baseUrl: string;
}

/**
 * Resolve the base URL from, in order: an explicit `GATEWAY_URL` global
 * (set by the hosting page), an `?api=` query parameter, or same-origin.
 */
export function resolveConfig(
  globals: { GATEWAY_URL?: unknown } = globalThis as { GATEWAY_URL?: unknown },
  search: string = typeof location === "undefined" ? "" : location.search,
): StudioConfig {
  if (typeof globals.GATEWAY_URL === "string" && globals.GATEWAY_URL !== "") {
    return { baseUrl: stripSlash(globals.GATEWAY_URL) };
  }
  const fromQuery = new URLSearchParams(search).get("api");
  return { baseUrl: fromQuery ? stripSlash(fromQuery) : "" };
}

function stripSlash(url: string): string {
  return url.endsWith("/") ? url.slice(0, -1) : url;
}
