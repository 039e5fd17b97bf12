/** App shell: tabbed SPA over the gateway API with hash routing. */

import { GatewayClient } from "./api/client.js";
import { resolveConfig } from "./config.js";
import { ExploreStore } from "./state/explore.js";
import { GalleryStore } from "./state/gallery.js";
import { SelectionsStore } from "./state/selections.js";
import { clear, el } from "./views/dom.js";
import { ExploreViewRenderer } from "./views/explore.js";
import { GalleryViewRenderer } from "./views/gallery.js";
import { SelectionsViewRenderer } from "./views/selections.js";

const TABS = ["gallery", "explore", "selections"] as const;
type Tab = (typeof TABS)[number];

const DEFAULT_SELECTION = "shortlist";

function currentTab(): Tab {
  const hash = location.hash.replace(/^#/, "");
  return (TABS as readonly string[]).includes(hash) ? (hash as Tab) : "gallery";
}

export function startApp(root: HTMLElement): void {
  const config = resolveConfig();
  const client = new GatewayClient({ baseUrl: config.baseUrl });

  const gallery = new GalleryStore(client);
  const selections = new SelectionsStore(client);
  const explore = new ExploreStore(client);

  const galleryView = new GalleryViewRenderer(client, gallery, selections);
  const exploreView = new ExploreViewRenderer(client, explore, () => {
    // A promoted frame becomes a real candidate; re-fetch the current page.
    void gallery.browse(gallery.view?.offset ?? 0).catch(() => undefined);
  });
  const selectionsView = new SelectionsViewRenderer(client, selections);

  const healthLabel = el("span", { className: "health", text: "connecting…" });
  const tabLinks = new Map<Tab, HTMLAnchorElement>();
  const nav = el("nav", { className: "tabs" });
  for (const tab of TABS) {
    const link = el("a", { text: tab, attrs: { href: `#${tab}` } });
    tabLinks.set(tab, link);
    nav.append(link);
  }
  const header = el(
    "header",
    { className: "topbar" },
    el("h1", { text: "chair studio" }),
    nav,
    healthLabel,
  );
  const content = el("main", { className: "content" });

  function render(): void {
    const tab = currentTab();
    for (const [name, link] of tabLinks) {
      if (name === tab) link.setAttribute("aria-current", "page");
      else link.removeAttribute("aria-current");
    }
    clear(content);
    if (tab === "gallery") galleryView.render(content);
    else if (tab === "explore") exploreView.render(content);
    else selectionsView.render(content);
  }

  gallery.subscribe(render);
  explore.subscribe(render);
  selections.subscribe(() => {
    const name = selections.doc?.name ?? null;
    if (gallery.activeSelection !== name) gallery.setActiveSelection(name);
    render();
  });
  window.addEventListener("hashchange", render);

  root.append(header, content);
  render();

  void client
    .health()
    .then((h) => {
      healthLabel.textContent = `${h.candidates} candidates — generation ${
        h.generation_enabled ? "on" : "off"
      }`;
    })
    .catch(() => {
      healthLabel.textContent = "gateway unreachable";
    });
  void gallery.browse().catch(() => undefined);
  // Open a default set up front so gallery star-rating works immediately.
  void selections.open(DEFAULT_SELECTION).catch(() => undefined);
  void selections.refreshNames().catch(() => undefined);
}

/* Boot when loaded as the page's module script. */
if (typeof document !== "undefined") {
  const mount = document.getElementById("app");
  if (mount) startApp(mount);
}
