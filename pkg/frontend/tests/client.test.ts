/** Contract tests for the client and flows beyond the acceptance checks. */

import { describe, expect, it } from "vitest";

import { GatewayClient, GatewayError } from "../src/api/client.js";
import { ExploreStore } from "../src/state/explore.js";
import { GalleryStore } from "../src/state/gallery.js";
import { bytesEqual, gatewayUrl } from "./helpers.js";

const client = new GatewayClient({ baseUrl: gatewayUrl() });

describe("gateway client contract", () => {
  it("reports a healthy gateway with generation enabled", async () => {
    const health = await client.health();
    expect(health.status).toBe("ok");
    expect(health.candidates).toBeGreaterThanOrEqual(64);
    expect(health.generation_enabled).toBe(true);
  });

  it("gallery page contents equal the raw API response", async () => {
    const gallery = new GalleryStore(client, 10);
    const view = await gallery.browse(20, 10);
    const raw = await client.listCandidates(20, 10);

    expect(view.thumbnails).toHaveLength(raw.items.length);
    view.thumbnails.forEach((thumb, i) => {
      const record = raw.items[i]!;
      expect(thumb.id).toBe(record.id);
      expect(thumb.index).toBe(record.index);
      expect(thumb.srUrl).toBe(record.sr_url);
      expect(thumb.lrUrl).toBe(record.lr_url);
    });
  });

  it("steps=7 filmstrip returns 7 frames in request order", async () => {
    const page = await client.listCandidates(2, 2);
    const explore = new ExploreStore(client);
    const path = await explore.explore(page.items[0]!.id, page.items[1]!.id, 7, "spherical");
    expect(path.frames).toHaveLength(7);
    expect(path.frames.map((f) => f.index)).toEqual([0, 1, 2, 3, 4, 5, 6]);
  });

  it("steps=2 filmstrip shows exactly the two originals", async () => {
    const page = await client.listCandidates(6, 2);
    const from = page.items[0]!;
    const to = page.items[1]!;
    const explore = new ExploreStore(client);
    const path = await explore.explore(from.id, to.id, 2, "linear");
    expect(path.frames).toHaveLength(2);
    const a = await client.fetchImage(path.frames[0]!.srUrl);
    const b = await client.fetchImage(path.frames[1]!.srUrl);
    expect(bytesEqual(a, await client.fetchImage(from.sr_url))).toBe(true);
    expect(bytesEqual(b, await client.fetchImage(to.sr_url))).toBe(true);
  });

  it("a promoted frame appears in the gallery after refresh", async () => {
    const page = await client.listCandidates(0, 2);
    const explore = new ExploreStore(client);
    const path = await explore.explore(page.items[0]!.id, page.items[1]!.id, 3, "linear");
    const middle = path.frames[1]!;

    const totalBefore = (await client.listCandidates(0, 0)).total;
    const promoted = await explore.promote(middle);
    expect(promoted.latent).toEqual(middle.latent);
    expect(explore.lastPromoted?.id).toBe(promoted.id);

    const gallery = new GalleryStore(client, 16);
    const lastPage = await gallery.browse(totalBefore, 16);
    expect(lastPage.total).toBe(totalBefore + 1);
    expect(lastPage.thumbnails.map((t) => t.id)).toContain(promoted.id);

    // The promoted record is a first-class candidate with full provenance.
    const detail = await client.getCandidate(promoted.id);
    expect(detail.latent).toEqual(middle.latent);
    expect(detail.sr_sha256).toBe(promoted.sr_sha256);
  });

  it("surfaces server error codes verbatim", async () => {
    const missing = await client.getCandidate("no-such-id").then(
      () => null,
      (error) => error,
    );
    expect(missing).toBeInstanceOf(GatewayError);
    expect((missing as GatewayError).status).toBe(404);
    expect((missing as GatewayError).code).toBe("not_found");

    const invalid = await client
      .mutateSelection("errs", 0, { x: { rating: 9, note: "" } })
      .then(
        () => null,
        (error) => error,
      );
    expect(invalid).toBeInstanceOf(GatewayError);
    expect((invalid as GatewayError).status).toBe(422);
    expect((invalid as GatewayError).code).toBe("invalid_request");
  });
});
