/** Store behavior: error states, optimistic edits, and conflict handling. */

import net from "node:net";
import { describe, expect, it } from "vitest";

import { GatewayClient, GatewayError } from "../src/api/client.js";
import { GalleryStore } from "../src/state/gallery.js";
import { SelectionsStore } from "../src/state/selections.js";
import { gatewayUrl, jsonResponse } from "./helpers.js";

function fakeFetch(
  handler: (url: string, init?: RequestInit) => Response | Promise<Response>,
): typeof fetch {
  return ((input: RequestInfo | URL, init?: RequestInit) => {
    const url =
      typeof input === "string" ? input : input instanceof URL ? input.toString() : input.url;
    return Promise.resolve(handler(url, init));
  }) as typeof fetch;
}

async function closedPort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        probe.close(() => reject(new Error("no port")));
      }
    });
  });
}

describe("gallery store", () => {
  it("shows an explicit empty state for an empty catalog", async () => {
    const client = new GatewayClient({
      baseUrl: "http://fake",
      fetchImpl: fakeFetch(() =>
        jsonResponse({ total: 0, offset: 0, limit: 16, items: [] }),
      ),
    });
    const gallery = new GalleryStore(client);
    const view = await gallery.browse();
    expect(view.empty).toBe(true);
    expect(view.thumbnails).toHaveLength(0);
    expect(view.pageCount).toBe(0);
  });

  it("surfaces an unreachable service as an error, with no view", async () => {
    const port = await closedPort();
    const client = new GatewayClient({ baseUrl: `http://127.0.0.1:${port}` });
    const gallery = new GalleryStore(client);
    await expect(gallery.browse()).rejects.toThrow();
    expect(gallery.view).toBeNull();
    expect(gallery.error).not.toBeNull();
    expect(gallery.stale).toBe(false);
  });

  it("marks the previous page stale when a refresh fails, never fresh", async () => {
    let calls = 0;
    const client = new GatewayClient({
      baseUrl: "http://fake",
      fetchImpl: fakeFetch(() => {
        calls += 1;
        if (calls > 1) throw new TypeError("fetch failed");
        return jsonResponse({
          total: 2,
          offset: 0,
          limit: 16,
          items: [
            {
              id: "a",
              index: 0,
              seed: 1,
              created_at: "e0",
              lr_url: "/candidates/a/image?kind=lr",
              sr_url: "/candidates/a/image?kind=sr",
            },
            {
              id: "b",
              index: 1,
              seed: 1,
              created_at: "e0",
              lr_url: "/candidates/b/image?kind=lr",
              sr_url: "/candidates/b/image?kind=sr",
            },
          ],
        });
      }),
    });
    const gallery = new GalleryStore(client);
    const first = await gallery.browse();
    expect(gallery.stale).toBe(false);

    await expect(gallery.browse()).rejects.toThrow();
    expect(gallery.view).toEqual(first); // old data retained…
    expect(gallery.stale).toBe(true); // …but flagged, not shown as fresh
    expect(gallery.error).toContain("fetch failed");
  });
});

describe("selections store", () => {
  it("rejects out-of-range ratings client-side without a request", async () => {
    let mutations = 0;
    const client = new GatewayClient({
      baseUrl: "http://fake",
      fetchImpl: fakeFetch((url, init) => {
        if (init?.method === "POST") {
          mutations += 1;
          throw new Error(`unexpected network mutation to ${url}`);
        }
        return jsonResponse({ name: "s", revision: 0, entries: {} });
      }),
    });
    const store = new SelectionsStore(client);
    await store.open("s");

    await expect(store.shortlist("c1", 9)).rejects.toThrow(RangeError);
    await expect(store.shortlist("c1", -1)).rejects.toThrow(RangeError);
    await expect(store.shortlist("c1", 2.5)).rejects.toThrow(RangeError);
    expect(mutations).toBe(0);
  });

  it("export posts exactly the selected ids", async () => {
    let sheetBody: unknown = null;
    const client = new GatewayClient({
      baseUrl: "http://fake",
      fetchImpl: fakeFetch((url, init) => {
        if (url.endsWith("/sheets")) {
          sheetBody = JSON.parse(String(init?.body));
          return new Response(new Uint8Array([1, 2, 3]).buffer, { status: 200 });
        }
        return jsonResponse({
          name: "s",
          revision: 2,
          entries: { c01: { rating: 3, note: "" }, c02: { rating: 5, note: "x" } },
        });
      }),
    });
    const store = new SelectionsStore(client);
    await store.open("s");

    const bytes = await store.exportSheet(2);
    expect(Array.from(bytes)).toEqual([1, 2, 3]);
    expect(sheetBody).toEqual({ ids: ["c01", "c02"], columns: 2 });
  });

  it("refuses to export an empty selection", async () => {
    const client = new GatewayClient({
      baseUrl: "http://fake",
      fetchImpl: fakeFetch(() => jsonResponse({ name: "s", revision: 0, entries: {} })),
    });
    const store = new SelectionsStore(client);
    await store.open("s");
    await expect(store.exportSheet(3)).rejects.toThrow(/empty/);
  });

  it("two clients mutating the same set: one wins, the other sees the conflict", async () => {
    const url = gatewayUrl();
    const page = await new GatewayClient({ baseUrl: url }).listCandidates(0, 2);
    const idA = page.items[0]!.id;
    const idB = page.items[1]!.id;

    const storeA = new SelectionsStore(new GatewayClient({ baseUrl: url }));
    const storeB = new SelectionsStore(new GatewayClient({ baseUrl: url }));
    await storeA.open("conflict-set");
    await storeB.open("conflict-set");
    const baseRevision = storeA.doc!.revision;

    // A commits first and wins.
    await storeA.shortlist(idA, 5, "winner");
    expect(storeA.doc!.revision).toBe(baseRevision + 1);

    // B still holds the old revision; its edit must be refused.
    const failure = await storeB.shortlist(idB, 3).then(
      () => null,
      (error) => error,
    );
    expect(failure).toBeInstanceOf(GatewayError);
    expect((failure as GatewayError).code).toBe("revision_conflict");

    // B was reloaded to the server's current state: A's edit, not B's.
    expect(storeB.conflict).toEqual({
      expected: baseRevision,
      current: baseRevision + 1,
    });
    expect(storeB.doc!.revision).toBe(baseRevision + 1);
    expect(storeB.doc!.entries[idA]).toEqual({ rating: 5, note: "winner" });
    expect(storeB.doc!.entries[idB]).toBeUndefined();

    // Retrying against the reloaded revision now succeeds.
    await storeB.shortlist(idB, 3);
    expect(storeB.doc!.revision).toBe(baseRevision + 2);
    expect(storeB.doc!.entries[idB]).toEqual({ rating: 3, note: "" });
  });
});
