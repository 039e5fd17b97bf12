/** Explore view: interpolation filmstrips and neighborhood fans with promote-to-catalog. */

import type { GatewayClient } from "../api/client.js";
import type { ExploreStore } from "../state/explore.js";
import type { PathFrame } from "../api/types.js";
import { clear, el } from "./dom.js";

export class ExploreViewRenderer {
  constructor(
    private readonly client: GatewayClient,
    private readonly explore: ExploreStore,
    private readonly onPromoted: () => void,
  ) {}

  render(root: HTMLElement): void {
    clear(root);

    if (this.explore.error) {
      root.append(
        el("div", {
          className: "banner error",
          text: `Exploration failed: ${this.explore.error}`,
          attrs: { role: "alert" },
        }),
      );
    }

    root.append(this.renderPathForm(), this.renderNeighborhoodForm());

    const path = this.explore.path;
    if (path) {
      root.append(
        el("h3", {
          text: `${path.mode} path ${path.fromId} → ${path.toId} (${path.steps} steps)`,
        }),
      );
      const strip = el("div", { className: "filmstrip" });
      for (const frame of path.frames) strip.append(this.renderFrame(frame));
      root.append(strip);
    }

    const hood = this.explore.neighborhood;
    if (hood) {
      root.append(
        el("h3", {
          text: `neighborhood of ${hood.centerId} (radius ${hood.radius})`,
        }),
      );
      const strip = el("div", { className: "filmstrip" });
      for (const frame of hood.frames) strip.append(this.renderFrame(frame));
      root.append(strip);
    }

    const promoted = this.explore.lastPromoted;
    if (promoted) {
      root.append(
        el("div", {
          className: "banner ok",
          text: `Promoted as ${promoted.id} — it now appears in the gallery.`,
        }),
      );
    }
  }

  private renderPathForm(): HTMLElement {
    const fromInput = el("input", { attrs: { placeholder: "from id", size: "12" } });
    const toInput = el("input", { attrs: { placeholder: "to id", size: "12" } });
    const stepsInput = el("input", {
      attrs: { type: "number", value: "5", min: "2", max: "64" },
    });
    const modeSelect = el(
      "select",
      {},
      el("option", { text: "linear", attrs: { value: "linear" } }),
      el("option", { text: "spherical", attrs: { value: "spherical" } }),
    );
    return el(
      "form",
      {
        className: "explore-form",
        on: {
          submit: (ev) => {
            ev.preventDefault();
            const steps = Number.parseInt(stepsInput.value, 10) || 5;
            const mode = modeSelect.value === "spherical" ? "spherical" : "linear";
            void this.explore
              .explore(fromInput.value.trim(), toInput.value.trim(), steps, mode)
              .catch(() => undefined);
          },
        },
      },
      el("label", { text: "Interpolate" }),
      fromInput,
      toInput,
      stepsInput,
      modeSelect,
      el("button", { text: "Go", attrs: { type: "submit" } }),
    );
  }

  private renderNeighborhoodForm(): HTMLElement {
    const idInput = el("input", { attrs: { placeholder: "center id", size: "12" } });
    const radiusInput = el("input", {
      attrs: { type: "number", value: "0.5", step: "0.1", min: "0" },
    });
    const countInput = el("input", {
      attrs: { type: "number", value: "6", min: "1", max: "32" },
    });
    return el(
      "form",
      {
        className: "explore-form",
        on: {
          submit: (ev) => {
            ev.preventDefault();
            const radius = Number.parseFloat(radiusInput.value) || 0.5;
            const count = Number.parseInt(countInput.value, 10) || 6;
            void this.explore
              .exploreNeighborhood(idInput.value.trim(), radius, count)
              .catch(() => undefined);
          },
        },
      },
      el("label", { text: "Neighborhood" }),
      idInput,
      radiusInput,
      countInput,
      el("button", { text: "Sample", attrs: { type: "submit" } }),
    );
  }

  private renderFrame(frame: PathFrame): HTMLElement {
    const cell = el("figure", { className: "frame", attrs: { "data-index": String(frame.index) } });
    if (frame.failed) {
      cell.append(el("div", { className: "frame-placeholder", text: "render failed" }));
    } else {
      cell.append(
        el("img", {
          className: "frame-img",
          attrs: { src: this.client.url(frame.srUrl), alt: `frame ${frame.index}` },
          on: {
            error: () => {
              this.explore.markFrameFailed(frame);
            },
          },
        }),
      );
    }
    cell.append(
      el("figcaption", { text: `#${frame.index}` }),
      el("button", {
        className: "promote",
        text: "Promote",
        on: {
          click: () =>
            void this.explore
              .promote(frame)
              .then(() => this.onPromoted())
              .catch(() => undefined),
        },
      }),
    );
    return cell;
  }
}
