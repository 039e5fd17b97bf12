/** Gallery view: paged candidate grid with quick-rating into a selection. */

import type { GatewayClient } from "../api/client.js";
import type { Thumbnail } from "../api/types.js";
import type { GalleryStore } from "../state/gallery.js";
import { MAX_RATING, type SelectionsStore } from "../state/selections.js";
import { clear, el } from "./dom.js";

export class GalleryViewRenderer {
  constructor(
    private readonly client: GatewayClient,
    private readonly gallery: GalleryStore,
    private readonly selections: SelectionsStore,
  ) {}

  /** Rebuild the view inside `root` from current store state. */
  render(root: HTMLElement): void {
    clear(root);
    const view = this.gallery.view;

    if (this.gallery.error) {
      root.append(
        el("div", {
          className: "banner error",
          text: `Gateway error: ${this.gallery.error}`,
          attrs: { role: "alert" },
        }),
      );
    }

    if (!view) {
      if (!this.gallery.error) {
        root.append(el("p", { className: "muted", text: "Loading candidates…" }));
      }
      return;
    }

    if (view.empty) {
      root.append(
        el("p", {
          className: "empty-state",
          text: "No candidates yet — run the pipeline or POST /generate to fill the catalog.",
        }),
      );
      return;
    }

    if (this.gallery.stale) {
      root.append(
        el("div", {
          className: "banner stale",
          text: "Showing the last loaded page — refresh failed, data may be stale.",
        }),
      );
    }

    const pager = el(
      "nav",
      { className: "pager" },
      el("button", {
        text: "← Prev",
        attrs: view.offset === 0 ? { disabled: "" } : {},
        on: { click: () => void this.gallery.prev().catch(() => undefined) },
      }),
      el("span", {
        className: "page-label",
        text: `Page ${view.pageIndex + 1} of ${Math.max(1, view.pageCount)} — ${view.total} candidates`,
      }),
      el("button", {
        text: "Next →",
        attrs: view.offset + view.limit >= view.total ? { disabled: "" } : {},
        on: { click: () => void this.gallery.next().catch(() => undefined) },
      }),
    );
    root.append(pager);

    const grid = el("div", { className: "grid" });
    for (const thumb of view.thumbnails) grid.append(this.renderThumb(thumb));
    root.append(grid);
  }

  private renderThumb(thumb: Thumbnail): HTMLElement {
    const img = el("img", {
      className: "thumb-img",
      attrs: {
        src: this.client.url(thumb.srUrl),
        alt: `candidate ${thumb.id}`,
        loading: "lazy",
      },
    });
    const stars = el("div", { className: "stars" });
    for (let rating = 1; rating <= MAX_RATING; rating++) {
      stars.append(
        el("button", {
          className: "star",
          text: "★",
          attrs: { title: `rate ${rating}`, "data-rating": String(rating) },
          on: {
            click: () => void this.selections.shortlist(thumb.id, rating).catch(() => undefined),
          },
        }),
      );
    }
    return el(
      "figure",
      { className: "thumb", attrs: { "data-id": thumb.id } },
      img,
      el("figcaption", { text: thumb.id }),
      stars,
    );
  }
}
