/** Selections view: named shortlist editing with optimistic-concurrency feedback. */

import type { GatewayClient } from "../api/client.js";
import { MAX_RATING, type SelectionsStore } from "../state/selections.js";
import { clear, downloadBytes, el } from "./dom.js";

export class SelectionsViewRenderer {
  constructor(
    private readonly client: GatewayClient,
    private readonly selections: SelectionsStore,
  ) {}

  render(root: HTMLElement): void {
    clear(root);

    const conflict = this.selections.conflict;
    if (conflict) {
      root.append(
        el(
          "div",
          { className: "banner error", attrs: { role: "alert" } },
          el("span", {
            text:
              `Edit conflict: you had revision ${conflict.expected} but the server is at ` +
              `${conflict.current}. The latest state has been reloaded; please retry your edit.`,
          }),
          el("button", {
            text: "Dismiss",
            on: { click: () => this.selections.clearConflict() },
          }),
        ),
      );
    } else if (this.selections.error) {
      root.append(
        el("div", {
          className: "banner error",
          text: `Selection update failed: ${this.selections.error}`,
          attrs: { role: "alert" },
        }),
      );
    }

    root.append(this.renderPicker());

    const doc = this.selections.doc;
    if (!doc) {
      root.append(el("p", { className: "muted", text: "Open or create a selection set." }));
      return;
    }

    root.append(
      el("h3", { text: `${doc.name} — revision ${doc.revision}` }),
    );

    const ids = this.selections.selectedIds();
    if (ids.length === 0) {
      root.append(el("p", { className: "empty-state", text: "Nothing shortlisted yet." }));
    } else {
      const list = el("table", { className: "selection-table" });
      for (const id of ids) {
        const entry = doc.entries[id];
        if (!entry) continue;
        list.append(this.renderEntry(id, entry.rating, entry.note));
      }
      root.append(list);
      root.append(this.renderExportControls(ids.length));
    }
  }

  private renderPicker(): HTMLElement {
    const nameInput = el("input", { attrs: { placeholder: "selection name", size: "16" } });
    const picker = el(
      "form",
      {
        className: "selection-picker",
        on: {
          submit: (ev) => {
            ev.preventDefault();
            const name = nameInput.value.trim();
            if (name) void this.selections.open(name).catch(() => undefined);
          },
        },
      },
      nameInput,
      el("button", { text: "Open", attrs: { type: "submit" } }),
    );
    const known = this.selections.knownNames;
    if (known.length > 0) {
      const list = el("span", { className: "known-names", text: "existing: " });
      for (const name of known) {
        list.append(
          el("button", {
            className: "link",
            text: name,
            attrs: { type: "button" },
            on: { click: () => void this.selections.open(name).catch(() => undefined) },
          }),
        );
      }
      picker.append(list);
    }
    return picker;
  }

  private renderEntry(id: string, rating: number, note: string): HTMLElement {
    const img = el("img", {
      className: "selection-img",
      attrs: { src: this.client.url(`/candidates/${id}/image?kind=sr`), alt: id },
    });
    const stars = el("td", { className: "stars" });
    for (let value = 1; value <= MAX_RATING; value++) {
      stars.append(
        el("button", {
          className: value <= rating ? "star filled" : "star",
          text: "★",
          on: {
            click: () => void this.selections.shortlist(id, value, note).catch(() => undefined),
          },
        }),
      );
    }
    const noteInput = el("input", {
      className: "note",
      attrs: { value: note, placeholder: "note" },
    });
    noteInput.addEventListener("change", () => {
      void this.selections.shortlist(id, rating, noteInput.value).catch(() => undefined);
    });
    return el(
      "tr",
      { attrs: { "data-id": id } },
      el("td", {}, img),
      el("td", { text: id }),
      stars,
      el("td", {}, noteInput),
      el(
        "td",
        {},
        el("button", {
          text: "Remove",
          on: { click: () => void this.selections.unshortlist(id).catch(() => undefined) },
        }),
      ),
    );
  }

  private renderExportControls(count: number): HTMLElement {
    const columnsInput = el("input", {
      attrs: { type: "number", value: "4", min: "1", max: "16" },
    });
    return el(
      "div",
      { className: "export-controls" },
      el("label", { text: `Export ${count} shortlisted as contact sheet, columns:` }),
      columnsInput,
      el("button", {
        text: "Download sheet",
        on: {
          click: () => {
            const columns = Number.parseInt(columnsInput.value, 10) || 4;
            void this.selections
              .exportSheet(columns)
              .then((bytes) => {
                const name = this.selections.doc?.name ?? "selection";
                downloadBytes(bytes, `${name}-sheet.png`, "image/png");
              })
              .catch(() => undefined);
          },
        },
      }),
    );
  }
}
