// DOM glue: hash routing, event delegation, and the 2-second job poll.
// Everything interesting lives in state.ts and render.ts; this file only
// wires them to the page.

import { ApiClient } from "./api.js";
import { App, decodeHash, encodeSearchHash } from "./state.js";
import { renderIngestView, renderRecordView, renderSearchView } from "./render.js";

declare global {
  interface Window {
    METALAKE_API_BASE?: string;
  }
}

const apiBase = window.METALAKE_API_BASE ?? "";
const api = new ApiClient(apiBase);

const outlet = document.getElementById("view") as HTMLElement;
const searchInput = document.getElementById("search-input") as HTMLInputElement;
const modeSelect = document.getElementById("search-mode") as HTMLSelectElement;

let currentView: "search" | "record" | "ingest" = "search";

const app = new App(api, () => render());

function render() {
  if (currentView === "record") {
    outlet.innerHTML = renderRecordView(app.state);
  } else if (currentView === "ingest") {
    outlet.innerHTML = renderIngestView(app.state);
    bindSourceForm();
  } else {
    outlet.innerHTML = renderSearchView(app.state);
  }
  for (const link of document.querySelectorAll(".nav-link")) {
    link.classList.toggle(
      "nav-active",
      (link as HTMLAnchorElement).dataset.view === currentView,
    );
  }
}

function syncSearchUrl() {
  const hash = encodeSearchHash(app.state);
  if (window.location.hash !== hash) {
    history.replaceState(null, "", hash);
  }
}

async function routeTo(hash: string) {
  const { route, apply } = decodeHash(hash || "#/search");
  apply(app);
  currentView = route.view;
  if (route.view === "record") {
    render();
    await app.openRecord(route.id);
  } else if (route.view === "ingest") {
    render();
    await app.loadSources();
  } else {
    searchInput.value = app.state.activeQuery.text;
    modeSelect.value = app.state.activeQuery.mode;
    render();
    if (
      app.state.activeQuery.text ||
      Object.keys(app.state.activeQuery.filters).length
    ) {
      await app.runSearch();
    }
  }
}

function bindSourceForm() {
  const form = document.getElementById("source-form") as HTMLFormElement | null;
  if (!form) return;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const username = String(data.get("username") ?? "");
    const password = String(data.get("password") ?? "");
    await app.registerSource({
      location: String(data.get("location") ?? ""),
      protocol: String(data.get("protocol") ?? ""),
      encoding: String(data.get("encoding") ?? "XML"),
      format: String(data.get("format") ?? ""),
      dataSteward: String(data.get("dataSteward") ?? ""),
      oaiSet: String(data.get("oaiSet") ?? "") || undefined,
      oaiMetadataPrefix: String(data.get("oaiMetadataPrefix") ?? "") || undefined,
      credentials: username && password ? { username, password } : undefined,
    });
  });
}

document.getElementById("search-form")?.addEventListener("submit", async (event) => {
  event.preventDefault();
  app.setQuery(modeSelect.value as "fulltext" | "filter", searchInput.value.trim());
  await app.runSearch();
  syncSearchUrl();
});

document.body.addEventListener("click", async (event) => {
  const target = (event.target as HTMLElement).closest("[data-action]");
  if (!(target instanceof HTMLElement)) return;
  const action = target.dataset.action;
  if (action === "facet") {
    event.preventDefault();
    await app.applyFacet(target.dataset.field!, target.dataset.value!);
    syncSearchUrl();
  } else if (action === "clear-facet") {
    event.preventDefault();
    await app.clearFacet(target.dataset.field!);
    syncSearchUrl();
  } else if (action === "page") {
    event.preventDefault();
    await app.setPage(Number(target.dataset.page));
    syncSearchUrl();
  } else if (action === "trigger") {
    event.preventDefault();
    await app.triggerIngest(target.dataset.ref!);
  }
});

window.addEventListener("hashchange", () => void routeTo(window.location.hash));

// job rows poll every 2 seconds until terminal
setInterval(() => {
  if (currentView === "ingest" && app.hasRunningJobs()) {
    void app.refreshJobs();
  }
}, 2000);

void routeTo(window.location.hash);
