// Wire types for the /api/v1 JSON:API envelopes.  Everything shown in the
// UI comes verbatim from these; the client never derives metadata itself.

export interface ApiErrorSource {
  pointer?: string;
  parameter?: string;
}

export interface ApiError {
  status: string;
  title: string;
  detail?: string;
  source?: ApiErrorSource;
  meta?: Record<string, unknown>;
}

export interface Envelope<T> {
  data?: T;
  errors?: ApiError[];
  links: { self: string; describedby: string };
  meta?: Record<string, unknown>;
}

export interface Resource<A> {
  type: string;
  id: string;
  attributes: A;
}

export interface SearchHitAttributes {
  title: string | null;
  creators: string[];
  publicationYear: number | null;
  resourceType: string | null;
  source: string;
  score?: number | null;
}

export type FacetCounts = Record<string, Record<string, number>>;

export interface RelatedEntry {
  label: string;
  category: string;
  direction: "out" | "in";
  id: string;
}

export interface RecordAttributes {
  descriptive: {
    title: string | null;
    creators: { name: string; identifier: string | null }[];
    publisher: string | null;
    publicationYear: number | null;
    resourceType: string | null;
    identifiers: { scheme: string; value: string }[];
    description: string | null;
    subjects: string[];
    language: string | null;
    rights: string | null;
    license: string | null;
  };
  technical: {
    location: string | null;
    format: string | null;
    size: number | null;
    checksum: { algorithm: string; digest: string } | null;
  };
  processual: {
    recordId: string;
    source: string;
    originalIdentifier: string;
    createdAt: string;
    modifiedAt: string;
    dataSteward: string;
    ingestFormat: string;
  };
  social: { keywords: string[]; viewCount: number; qualityScore: number };
  raw: { payload: string; encoding: string; mediaType: string };
}

export interface RecordResource extends Resource<RecordAttributes> {
  relationships?: { related: RelatedEntry[] };
}

export interface SourceAttributes {
  ref: string;
  location: string;
  protocol: string;
  encoding: string;
  format: string;
  dataSteward: string;
  hasCredentials?: boolean;
  oaiSet?: string | null;
  oaiMetadataPrefix?: string;
}

export interface JobAttributes {
  sourceRef: string;
  state: string;
  counts: { seen: number; loaded: number; skipped: number; failed: number };
  startedAt?: string | null;
  finishedAt?: string | null;
  errors: [string, string][];
  resumptionCursor?: string | null;
  phaseLog: [string, string][];
  edgesCreated?: number;
}

export interface SourceForm {
  location: string;
  protocol: string;
  format: string;
  dataSteward: string;
  encoding?: string;
  oaiSet?: string;
  oaiMetadataPrefix?: string;
  credentials?: { username: string; password: string };
}
