// View state and its transitions.  No metadata is ever computed here: every
// rendered value originates from an API response.  Overlapping searches are
// deduplicated by a sequence number; stale responses are discarded.

import type { ApiClient, SearchRequest } from "./api.js";
import type {
  ApiError,
  FacetCounts,
  JobAttributes,
  RecordResource,
  Resource,
  SearchHitAttributes,
  SourceAttributes,
  SourceForm,
} from "./types.js";

export type SearchMode = "fulltext" | "facet" | "filter";

export interface ActiveQuery {
  mode: SearchMode;
  text: string;
  filters: Record<string, string>;
}

export interface JobRow {
  id: string;
  attributes: JobAttributes;
}

export interface ViewState {
  activeQuery: ActiveQuery;
  currentPage: number;
  pageSize: number;
  total: number | null;
  hits: Resource<SearchHitAttributes>[];
  facetCounts: FacetCounts;
  searchError: ApiError | null;
  validationMessage: string | null;
  selectedRecord: RecordResource | null;
  recordError: ApiError | null;
  sources: Resource<SourceAttributes>[];
  sourceFieldErrors: Record<string, string>;
  toast: string | null;
  jobsPanel: JobRow[];
}

export function initialState(): ViewState {
  return {
    activeQuery: { mode: "fulltext", text: "", filters: {} },
    currentPage: 1,
    pageSize: 20,
    total: null,
    hits: [],
    facetCounts: {},
    searchError: null,
    validationMessage: null,
    selectedRecord: null,
    recordError: null,
    sources: [],
    sourceFieldErrors: {},
    toast: null,
    jobsPanel: [],
  };
}

function firstError(errors: ApiError[] | undefined): ApiError {
  return errors?.[0] ?? { status: "0", title: "unexpected response" };
}

export class App {
  state: ViewState = initialState();
  private searchSeq = 0;

  constructor(
    private api: ApiClient,
    private onChange: (state: ViewState) => void = () => {},
  ) {}

  private changed() {
    this.onChange(this.state);
  }

  setQuery(mode: SearchMode, text: string) {
    this.state.activeQuery.mode = mode;
    this.state.activeQuery.text = text;
    this.state.currentPage = 1;
    this.changed();
  }

  async runSearch(): Promise<void> {
    const { mode, text, filters } = this.state.activeQuery;
    const request: SearchRequest = {
      filters,
      page: this.state.currentPage,
      pageSize: this.state.pageSize,
    };
    if (mode === "fulltext" && text) request.q = text;
    if (mode === "filter" && text) request.query = text;
    const hasFilters = Object.keys(filters).length > 0;
    if (!request.q && !request.query && !hasFilters) {
      // inline validation: an empty query never reaches the API
      this.state.validationMessage = "enter a search term or pick a facet";
      this.state.searchError = null;
      this.changed();
      return;
    }
    this.state.validationMessage = null;
    const seq = ++this.searchSeq;
    const response = await this.api.search(request);
    if (seq !== this.searchSeq) return; // a newer search superseded this one
    if (response.status !== 200 || !response.body.data) {
      this.state.searchError = firstError(response.body.errors);
      this.state.hits = [];
      this.state.total = null;
      this.state.facetCounts = {};
    } else {
      this.state.searchError = null;
      this.state.hits = response.body.data;
      const meta = response.body.meta ?? {};
      this.state.total = (meta.total as number) ?? null;
      this.state.facetCounts = (meta.facetCounts as FacetCounts) ?? {};
    }
    this.changed();
  }

  async applyFacet(field: string, value: string): Promise<void> {
    this.state.activeQuery.filters[field] = value;
    this.state.currentPage = 1;
    await this.runSearch();
  }

  async clearFacet(field: string): Promise<void> {
    delete this.state.activeQuery.filters[field];
    this.state.currentPage = 1;
    await this.runSearch();
  }

  async setPage(page: number): Promise<void> {
    this.state.currentPage = Math.max(1, page);
    await this.runSearch();
  }

  async openRecord(id: string): Promise<void> {
    const response = await this.api.record(id);
    if (response.status !== 200 || !response.body.data) {
      this.state.recordError = firstError(response.body.errors);
      this.state.selectedRecord = null;
    } else {
      this.state.recordError = null;
      this.state.selectedRecord = response.body.data;
    }
    this.changed();
  }

  async loadSources(): Promise<void> {
    const response = await this.api.sources();
    if (response.status === 200 && response.body.data) {
      this.state.sources = response.body.data;
      this.changed();
    }
  }

  async registerSource(form: SourceForm): Promise<boolean> {
    const response = await this.api.registerSource(form);
    if (response.status === 201 && response.body.data) {
      this.state.sourceFieldErrors = {};
      this.state.toast = `source registered: ${response.body.data.id}`;
      await this.loadSources();
      return true;
    }
    const fieldErrors: Record<string, string> = {};
    for (const error of response.body.errors ?? []) {
      const pointer = error.source?.pointer;
      if (pointer) {
        fieldErrors[pointer.replace(/^\//, "")] = error.detail ?? error.title;
      }
    }
    this.state.sourceFieldErrors = fieldErrors;
    if (Object.keys(fieldErrors).length === 0) {
      this.state.toast = firstError(response.body.errors).title;
    }
    this.changed();
    return false;
  }

  async triggerIngest(sourceRef: string): Promise<void> {
    const response = await this.api.triggerIngest(sourceRef);
    if (response.status === 202 && response.body.data) {
      this.state.jobsPanel.push({
        id: response.body.data.id,
        attributes: response.body.data.attributes,
      });
      this.state.toast = null;
    } else {
      this.state.toast = firstError(response.body.errors).title;
    }
    this.changed();
  }

  /** One poll round over watched jobs; the UI calls this every 2 seconds. */
  async refreshJobs(): Promise<void> {
    let moved = false;
    for (const row of this.state.jobsPanel) {
      if (row.attributes.state === "done" || row.attributes.state === "failed") {
        continue;
      }
      const response = await this.api.job(row.id);
      if (response.status === 200 && response.body.data) {
        row.attributes = response.body.data.attributes;
        moved = true;
      }
    }
    if (moved) this.changed();
  }

  hasRunningJobs(): boolean {
    return this.state.jobsPanel.some(
      (row) => row.attributes.state !== "done" && row.attributes.state !== "failed",
    );
  }
}

// ---------------------------------------------------------------------------
// Hash-route (de)serialization, kept pure so views stay URL-addressable.

export type Route =
  | { view: "search" }
  | { view: "record"; id: string }
  | { view: "ingest" };

export function encodeSearchHash(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.activeQuery.text) {
    params.set(state.activeQuery.mode === "filter" ? "query" : "q", state.activeQuery.text);
  }
  for (const [field, value] of Object.entries(state.activeQuery.filters)) {
    params.set(`f.${field}`, value);
  }
  if (state.currentPage > 1) params.set("page", String(state.currentPage));
  const suffix = params.toString();
  return suffix ? `#/search?${suffix}` : "#/search";
}

export function decodeHash(hash: string): { route: Route; apply: (app: App) => void } {
  const clean = hash.replace(/^#\/?/, "");
  if (clean.startsWith("record/")) {
    const id = decodeURIComponent(clean.slice("record/".length));
    return { route: { view: "record", id }, apply: () => {} };
  }
  if (clean.startsWith("ingest")) {
    return { route: { view: "ingest" }, apply: () => {} };
  }
  const query = clean.includes("?") ? clean.slice(clean.indexOf("?") + 1) : "";
  const params = new URLSearchParams(query);
  return {
    route: { view: "search" },
    apply: (app: App) => {
      const q = params.get("q");
      const filterExpr = params.get("query");
      if (filterExpr) {
        app.state.activeQuery.mode = "filter";
        app.state.activeQuery.text = filterExpr;
      } else {
        app.state.activeQuery.mode = "fulltext";
        app.state.activeQuery.text = q ?? "";
      }
      app.state.activeQuery.filters = {};
      for (const [key, value] of params.entries()) {
        if (key.startsWith("f.")) app.state.activeQuery.filters[key.slice(2)] = value;
      }
      app.state.currentPage = Number(params.get("page") ?? "1") || 1;
    },
  };
}
