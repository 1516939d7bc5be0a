// Thin fetch wrapper around the documented /api/v1 endpoints.

import type {
  Envelope,
  JobAttributes,
  RecordResource,
  Resource,
  SearchHitAttributes,
  SourceAttributes,
  SourceForm,
} from "./types.js";

export interface ApiResponse<T> {
  status: number;
  body: Envelope<T>;
}

export interface SearchRequest {
  q?: string;
  query?: string;
  filters?: Record<string, string>;
  page?: number;
  pageSize?: number;
}

export class ApiClient {
  requestCount = 0;

  constructor(private base: string) {}

  private async get<T>(path: string): Promise<ApiResponse<T>> {
    this.requestCount += 1;
    const res = await fetch(this.base + path);
    return { status: res.status, body: (await res.json()) as Envelope<T> };
  }

  private async post<T>(path: string, payload: unknown): Promise<ApiResponse<T>> {
    this.requestCount += 1;
    const res = await fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    return { status: res.status, body: (await res.json()) as Envelope<T> };
  }

  ready() {
    return this.get<Resource<{ status: string }>>("/api/v1/ready");
  }

  search(req: SearchRequest) {
    const params = new URLSearchParams();
    if (req.q) params.set("q", req.q);
    if (req.query) params.set("query", req.query);
    for (const [field, value] of Object.entries(req.filters ?? {})) {
      params.set(`filter[${field}]`, value);
    }
    if (req.page) params.set("page[number]", String(req.page));
    if (req.pageSize) params.set("page[size]", String(req.pageSize));
    return this.get<Resource<SearchHitAttributes>[]>(`/api/v1/search?${params}`);
  }

  record(id: string) {
    return this.get<RecordResource>(`/api/v1/metadata/${encodeURIComponent(id)}`);
  }

  sources() {
    return this.get<Resource<SourceAttributes>[]>("/api/v1/sources");
  }

  registerSource(form: SourceForm) {
    return this.post<Resource<SourceAttributes>>("/api/v1/sources", form);
  }

  triggerIngest(sourceRef: string, since?: string) {
    const payload: Record<string, string> = { sourceRef };
    if (since) payload.since = since;
    return this.post<Resource<JobAttributes>>("/api/v1/ingest", payload);
  }

  job(jobId: string) {
    return this.get<Resource<JobAttributes>>(
      `/api/v1/ingest/${encodeURIComponent(jobId)}`,
    );
  }

  stats() {
    return this.get<Resource<Record<string, unknown>>>("/api/v1/stats");
  }
}
