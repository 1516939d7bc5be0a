// Pure HTML renderers: ViewState in, markup string out.  main.ts swaps the
// strings into the page; tests assert on them directly, no DOM required.

import type { ViewState } from "./state.js";
import type { RelatedEntry } from "./types.js";

export function escapeHtml(value: unknown): string {
  return String(value ?? "")
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

const FACET_LABELS: Record<string, string> = {
  resourceType: "Resource type",
  publicationYear: "Year",
  language: "Language",
  source: "Source",
  ingestFormat: "Format",
  dataSteward: "Data steward",
};

export function renderToast(state: ViewState): string {
  if (!state.toast) return "";
  return `<div class="toast" role="status">${escapeHtml(state.toast)}</div>`;
}

function renderFacetSidebar(state: ViewState): string {
  const active = state.activeQuery.filters;
  const blocks: string[] = [];
  for (const [field, values] of Object.entries(state.facetCounts)) {
    const entries = Object.entries(values);
    if (entries.length === 0) continue;
    entries.sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]));
    const items = entries
      .map(([value, count]) => {
        const selected = active[field] === value ? " facet-active" : "";
        return (
          `<li><a href="#" class="facet-value${selected}" data-action="facet"` +
          ` data-field="${escapeHtml(field)}" data-value="${escapeHtml(value)}">` +
          `${escapeHtml(value)} <span class="facet-count">${count}</span></a></li>`
        );
      })
      .join("");
    blocks.push(
      `<section class="facet-block"><h3>${escapeHtml(FACET_LABELS[field] ?? field)}</h3>` +
        `<ul>${items}</ul></section>`,
    );
  }
  return `<aside class="facet-sidebar">${blocks.join("")}</aside>`;
}

function renderActiveFilters(state: ViewState): string {
  const chips = Object.entries(state.activeQuery.filters)
    .map(
      ([field, value]) =>
        `<button class="chip" data-action="clear-facet" data-field="${escapeHtml(field)}">` +
        `${escapeHtml(field)}: ${escapeHtml(value)} ✕</button>`,
    )
    .join("");
  return chips ? `<div class="active-filters">${chips}</div>` : "";
}

function renderSearchError(state: ViewState): string {
  if (state.validationMessage) {
    return `<p class="inline-validation">${escapeHtml(state.validationMessage)}</p>`;
  }
  if (!state.searchError) return "";
  const position = state.searchError.meta?.position;
  const where = position !== undefined ? ` (at position ${escapeHtml(position)})` : "";
  return (
    `<div class="error-banner">${escapeHtml(state.searchError.title)}` +
    `${state.searchError.detail ? ": " + escapeHtml(state.searchError.detail) : ""}${where}</div>`
  );
}

export function renderSearchView(state: ViewState): string {
  const rows = state.hits
    .map((hit) => {
      const a = hit.attributes;
      const creators = a.creators.length
        ? `<span class="creators">${escapeHtml(a.creators.join("; "))}</span>`
        : "";
      const year = a.publicationYear ? ` (${a.publicationYear})` : "";
      const kind = a.resourceType
        ? `<span class="badge">${escapeHtml(a.resourceType)}</span>`
        : "";
      return (
        `<li class="hit"><a href="#/record/${encodeURIComponent(hit.id)}" class="hit-title">` +
        `${escapeHtml(a.title ?? hit.id)}</a>${year} ${kind} ${creators}` +
        `<div class="hit-source">${escapeHtml(a.source)}</div></li>`
      );
    })
    .join("");
  const total =
    state.total !== null ? `<p class="total">${state.total} result(s)</p>` : "";
  const pageSize = state.pageSize;
  const lastPage = state.total !== null ? Math.max(1, Math.ceil(state.total / pageSize)) : 1;
  const pager =
    state.total !== null && state.total > pageSize
      ? `<nav class="pager">` +
        `<button data-action="page" data-page="${state.currentPage - 1}" ${
          state.currentPage <= 1 ? "disabled" : ""
        }>previous</button>` +
        `<span>page ${state.currentPage} / ${lastPage}</span>` +
        `<button data-action="page" data-page="${state.currentPage + 1}" ${
          state.currentPage >= lastPage ? "disabled" : ""
        }>next</button></nav>`
      : "";
  return (
    `<div class="search-layout">${renderFacetSidebar(state)}` +
    `<main class="results">${renderSearchError(state)}${renderActiveFilters(state)}` +
    `${total}<ul class="hits">${rows}</ul>${pager}</main></div>`
  );
}

function renderRelated(entries: RelatedEntry[]): string {
  if (entries.length === 0) return "<p>No relations.</p>";
  const outgoing = entries.filter((e) => e.direction === "out");
  const incoming = entries.filter((e) => e.direction === "in");
  const section = (title: string, list: RelatedEntry[]) =>
    list.length
      ? `<h4>${title}</h4><ul class="relations">` +
        list
          .map(
            (e) =>
              `<li><span class="badge">${escapeHtml(e.label)}</span> ` +
              `<a href="#/record/${encodeURIComponent(e.id)}" data-action="open-record"` +
              ` data-id="${escapeHtml(e.id)}">${escapeHtml(e.id)}</a>` +
              ` <span class="category">${escapeHtml(e.category)}</span></li>`,
          )
          .join("") +
        "</ul>"
      : "";
  return section("Outgoing", outgoing) + section("Incoming", incoming);
}

export function renderRecordView(state: ViewState): string {
  if (state.recordError) {
    return `<div class="error-banner">${escapeHtml(state.recordError.title)}</div>`;
  }
  const record = state.selectedRecord;
  if (!record) return `<p class="loading">Loading…</p>`;
  const a = record.attributes;
  const d = a.descriptive;
  const rows: [string, unknown][] = [
    ["Title", d.title],
    ["Creators", d.creators.map((c) => c.name).join("; ")],
    ["Publisher", d.publisher],
    ["Year", d.publicationYear],
    ["Type", d.resourceType],
    ["Identifiers", d.identifiers.map((i) => `${i.scheme} ${i.value}`).join(", ")],
    ["Description", d.description],
    ["Subjects", d.subjects.join(", ")],
    ["Language", d.language],
    ["Rights", d.rights],
    ["License", d.license],
    ["Location", a.technical.location],
    ["Media format", a.technical.format],
    ["Source", a.processual.source],
    ["Origin id", a.processual.originalIdentifier],
    ["Ingest format", a.processual.ingestFormat],
    ["Data steward", a.processual.dataSteward],
    ["Created", a.processual.createdAt],
    ["Modified", a.processual.modifiedAt],
    ["Views", a.social.viewCount],
    ["Quality score", a.social.qualityScore],
  ];
  const table = rows
    .filter(([, value]) => value !== null && value !== "" && value !== undefined)
    .map(
      ([label, value]) =>
        `<tr><th>${escapeHtml(label)}</th><td>${escapeHtml(value)}</td></tr>`,
    )
    .join("");
  const related = record.relationships?.related ?? [];
  return (
    `<article class="record"><h2>${escapeHtml(d.title ?? record.id)}</h2>` +
    `<p class="record-id">${escapeHtml(record.id)}</p>` +
    `<table class="record-fields">${table}</table>` +
    `<section class="relations-panel">${renderRelated(related)}</section>` +
    `<details class="raw-panel"><summary>Raw payload (${escapeHtml(
      a.raw.mediaType,
    )})</summary><pre class="raw-xml">${escapeHtml(a.raw.payload)}</pre></details>` +
    `</article>`
  );
}

export function renderIngestView(state: ViewState): string {
  const fieldError = (name: string) =>
    state.sourceFieldErrors[name]
      ? `<span class="field-error" data-field="${escapeHtml(name)}">${escapeHtml(
          state.sourceFieldErrors[name],
        )}</span>`
      : "";
  const sourceRows = state.sources
    .map(
      (source) =>
        `<tr><td>${escapeHtml(source.attributes.location)}</td>` +
        `<td>${escapeHtml(source.attributes.protocol)}</td>` +
        `<td>${escapeHtml(source.attributes.format)}</td>` +
        `<td>${escapeHtml(source.attributes.dataSteward)}</td>` +
        `<td><button data-action="trigger" data-ref="${escapeHtml(source.id)}">ingest</button></td></tr>`,
    )
    .join("");
  const jobRows = state.jobsPanel
    .map((row) => {
      const c = row.attributes.counts;
      const errors = row.attributes.errors.length
        ? `<div class="job-errors">${row.attributes.errors
            .map(([ident, message]) => `${escapeHtml(ident)}: ${escapeHtml(message)}`)
            .join("<br>")}</div>`
        : "";
      return (
        `<tr class="job job-${escapeHtml(row.attributes.state)}"><td>${escapeHtml(row.id)}</td>` +
        `<td>${escapeHtml(row.attributes.sourceRef)}</td>` +
        `<td class="job-state">${escapeHtml(row.attributes.state)}</td>` +
        `<td>seen ${c.seen} / loaded ${c.loaded} / skipped ${c.skipped} / failed ${c.failed}</td>` +
        `<td>${errors}</td></tr>`
      );
    })
    .join("");
  return (
    `<div class="ingest-layout">${renderToast(state)}` +
    `<section class="source-form"><h2>Register source</h2>` +
    `<form id="source-form">` +
    `<label>Location <input name="location" required> ${fieldError("location")}</label>` +
    `<label>Protocol <select name="protocol"><option>OAI-PMH</option><option>GET</option><option>S3</option></select> ${fieldError("protocol")}</label>` +
    `<label>Encoding <select name="encoding"><option>XML</option></select> ${fieldError("encoding")}</label>` +
    `<label>Format <select name="format"><option>DataCite</option><option>DublinCore</option><option>LIDO</option><option>MARC</option><option>MODS</option></select> ${fieldError("format")}</label>` +
    `<label>Data steward <input name="dataSteward"> ${fieldError("dataSteward")}</label>` +
    `<label>Username <input name="username" autocomplete="off"> ${fieldError("credentials")}</label>` +
    `<label>Password <input name="password" type="password" autocomplete="off"></label>` +
    `<label>OAI set <input name="oaiSet"></label>` +
    `<label>Metadata prefix <input name="oaiMetadataPrefix"></label>` +
    `<button type="submit">Register</button></form></section>` +
    `<section class="sources"><h2>Sources</h2><table>${sourceRows}</table></section>` +
    `<section class="jobs"><h2>Jobs</h2><table class="jobs-table">${jobRows}</table></section>` +
    `</div>`
  );
}

export function renderNotFound(): string {
  return `<div class="error-banner">That record does not exist.</div>`;
}
