"""JSON-only HTTP API: queries (records, search, stats) and commands
(register source, trigger ingest), all wrapped in self-describing envelopes.

Every response body is either {data, links, meta} or {errors, links}, never
both data and errors; links.describedby names the JSON Schema the body
validates against.  XML exists only on the ingest side - requests and
responses here are exclusively JSON.
"""

from __future__ import annotations

import contextlib
from datetime import date

from fastapi import FastAPI, Request
from fastapi.exceptions import HTTPException, RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import (
    Conflict,
    FilterSyntaxError,
    InvalidInput,
    MetalakeError,
    NotFound,
)
from ..ingest import JobRegistry, SourceRegistry
from ..ingest.sources import source_from_dict, source_to_dict
from ..model import is_valid_record_id, record_to_dict
from ..store import MAX_PAGE_SIZE, Store
from .schemas import SCHEMAS, schema_url

JSONAPI_MEDIA = "application/vnd.api+json"
_JSON_MEDIA_TYPES = ("application/json", "application/vnd.api+json")

SEARCH_HIT_TYPE = "search-hit"


def _error_body(request, errors):
    return {
        "errors": errors,
        "links": {"self": str(request.url), "describedby": schema_url("error")},
    }


def _error_response(request, status: int, title: str, detail=None, source=None,
                    meta=None):
    error = {"status": str(status), "title": title}
    if detail:
        error["detail"] = detail
    if source:
        error["source"] = source
    if meta:
        error["meta"] = meta
    return JSONResponse(
        _error_body(request, [error]), status_code=status, media_type=JSONAPI_MEDIA
    )


def _job_resource(job) -> dict:
    return {
        "type": "ingest-job",
        "id": job.jobId,
        "attributes": {
            "sourceRef": job.source.ref,
            "state": job.state,
            "counts": {
                "seen": job.counts.seen,
                "loaded": job.counts.loaded,
                "skipped": job.counts.skipped,
                "failed": job.counts.failed,
            },
            "startedAt": job.startedAt.isoformat() if job.startedAt else None,
            "finishedAt": job.finishedAt.isoformat() if job.finishedAt else None,
            "errors": [[ident, message] for ident, message in job.errors],
            "resumptionCursor": job.resumptionCursor,
            "phaseLog": [[state, ts] for state, ts in job.phaseLog],
            "edgesCreated": job.edgesCreated,
        },
    }


def _source_resource(source) -> dict:
    attributes = source_to_dict(source)
    ref = attributes.pop("ref")
    return {"type": "source", "id": ref, "attributes": dict(attributes, ref=ref)}


def create_app(
    store: Store,
    sources: SourceRegistry = None,
    jobs: JobRegistry = None,
    token: str = None,
    static_dir=None,
) -> FastAPI:
    sources = sources if sources is not None else SourceRegistry()
    jobs = jobs if jobs is not None else JobRegistry(store)

    @contextlib.asynccontextmanager
    async def lifespan(app):
        app.state.ready = True
        yield
        app.state.ready = False

    app = FastAPI(title="metalake", version="0.1.0", lifespan=lifespan,
                  openapi_url=None, docs_url=None, redoc_url=None)
    app.state.ready = False
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
    )

    def respond(request, data, schema_name, status=200, meta=None):
        body = {
            "data": data,
            "links": {
                "self": str(request.url),
                "describedby": schema_url(schema_name),
            },
        }
        if meta is not None:
            body["meta"] = meta
        return JSONResponse(body, status_code=status, media_type=JSONAPI_MEDIA)

    # -- error translation ---------------------------------------------------

    @app.exception_handler(MetalakeError)
    async def metalake_error_handler(request, exc):
        if isinstance(exc, FilterSyntaxError):
            return _error_response(
                request, 400, "filter expression syntax error", str(exc),
                source={"parameter": "query"}, meta={"position": exc.position},
            )
        if isinstance(exc, NotFound):
            return _error_response(request, 404, "not found", str(exc))
        if isinstance(exc, Conflict):
            return _error_response(request, 409, "conflict", str(exc))
        if isinstance(exc, InvalidInput):
            return _error_response(request, 400, "invalid input", str(exc.args[0]))
        return _error_response(request, 500, "internal error", str(exc))

    @app.exception_handler(HTTPException)
    async def http_exception_handler(request, exc):
        return _error_response(request, exc.status_code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request, exc):
        return _error_response(request, 400, "invalid request", str(exc))

    # -- command-side guards --------------------------------------------------

    async def command_body(request: Request) -> dict:
        if token:
            header = request.headers.get("authorization", "")
            if header != "Bearer %s" % token:
                raise HTTPException(401, "missing or wrong bearer token")
        content_type = request.headers.get("content-type", "").split(";")[0].strip()
        if content_type not in _JSON_MEDIA_TYPES:
            raise HTTPException(415, "request bodies must be JSON")
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, "request body is not valid JSON") from None
        if not isinstance(body, dict):
            raise HTTPException(400, "request body must be a JSON object")
        return body

    # -- queries ---------------------------------------------------------------

    @app.get("/api/v1/ready")
    async def ready(request: Request):
        if not request.app.state.ready:
            return respond(
                request,
                {"type": "status", "id": "ready", "attributes": {"status": "unavailable"}},
                "ready",
                status=503,
            )
        return respond(
            request,
            {"type": "status", "id": "ready", "attributes": {"status": "ok"}},
            "ready",
        )

    @app.get("/api/v1/metadata/{record_id}")
    async def get_metadata(record_id: str, request: Request):
        if not is_valid_record_id(record_id):
            return _error_response(
                request, 400, "malformed record id",
                "record ids are 11 base64url characters",
            )
        record = store.get_record(record_id, count_view=True)
        if record is None:
            return _error_response(request, 404, "no such record", record_id)
        related = []
        for edge, _other in store.neighbors(record_id, "both"):
            direction = "out" if edge.src == record_id else "in"
            related.append(
                {
                    "label": edge.label.value,
                    "category": edge.category.value,
                    "direction": direction,
                    "id": edge.dst if direction == "out" else edge.src,
                }
            )
        data = {
            "type": "metadata-record",
            "id": record_id,
            "attributes": record_to_dict(record),
            "relationships": {"related": related},
        }
        return respond(request, data, "metadata-record")

    @app.get("/api/v1/search")
    async def search(request: Request):
        params = request.query_params
        q = params.get("q")
        query = params.get("query")
        filters = {}
        for key in params.keys():
            if key.startswith("filter[") and key.endswith("]"):
                filters[key[7:-1]] = params.get(key)
        if q and query:
            return _error_response(
                request, 400, "q and query are mutually exclusive"
            )
        if not q and not query and not filters:
            return _error_response(
                request, 400, "give at least one of q, query, or filter[...]"
            )
        try:
            page = int(params.get("page[number]", "1"))
            page_size = int(params.get("page[size]", "20"))
        except ValueError:
            return _error_response(request, 400, "pagination must be numeric")
        if page < 1 or not 1 <= page_size <= MAX_PAGE_SIZE:
            return _error_response(
                request, 400,
                "page must be >= 1 and page size in [1, %d]" % MAX_PAGE_SIZE,
            )

        scores = {}
        order = None
        candidate_sets = []
        if q:
            scored = store.fulltext_scores(q)
            order = [rid for rid, _ in scored]
            scores = dict(scored)
            candidate_sets.append(set(order))
        if query:
            candidate_sets.append(set(store.filter_match_ids(query)))
        if filters:
            candidate_sets.append(set(store.facet_match_ids(filters)))
        final = candidate_sets[0]
        for candidate in candidate_sets[1:]:
            final &= candidate
        ordered = [rid for rid in order if rid in final] if order is not None else sorted(final)

        total = len(ordered)
        facet_counts = store.facet_counts(ordered)
        start = (page - 1) * page_size
        hits = []
        for rid in ordered[start : start + page_size]:
            record = store.get_record(rid)
            d = record.descriptive
            attributes = {
                "title": d.title,
                "creators": [c.name for c in d.creators],
                "publicationYear": d.publicationYear,
                "resourceType": d.resourceType.value if d.resourceType else None,
                "source": record.processual.source,
            }
            if q:
                attributes["score"] = scores.get(rid)
            hits.append({"type": SEARCH_HIT_TYPE, "id": rid, "attributes": attributes})
        meta = {
            "total": total,
            "page": {"number": page, "size": page_size},
            "facetCounts": facet_counts,
        }
        return respond(request, hits, "search-results", meta=meta)

    @app.get("/api/v1/stats")
    async def stats(request: Request):
        return respond(
            request,
            {"type": "stats", "id": "current", "attributes": store.stats()},
            "stats",
        )

    @app.get("/api/v1/sources")
    async def list_sources(request: Request):
        data = [_source_resource(source) for source in sources.list()]
        return respond(request, data, "source-list", meta={"total": len(data)})

    # -- commands ----------------------------------------------------------------

    @app.post("/api/v1/sources", status_code=201)
    async def register_source(request: Request):
        body = await command_body(request)
        try:
            source = source_from_dict(body)
        except InvalidInput as exc:
            issues = exc.args[1] if len(exc.args) > 1 else []
            errors = [
                {
                    "status": "422",
                    "title": "invalid source configuration",
                    "detail": "%s: %s" % (field, message),
                    "source": {"pointer": "/%s" % field},
                }
                for field, message in issues
            ] or [{"status": "422", "title": "invalid source configuration"}]
            return JSONResponse(
                _error_body(request, errors), status_code=422, media_type=JSONAPI_MEDIA
            )
        sources.add(source)  # Conflict -> 409 via handler
        return respond(request, _source_resource(source), "source", status=201)

    @app.post("/api/v1/ingest", status_code=202)
    async def trigger_ingest(request: Request):
        body = await command_body(request)
        ref = body.get("sourceRef")
        if not isinstance(ref, str) or not ref:
            return _error_response(
                request, 400, "sourceRef is required",
                source={"pointer": "/sourceRef"},
            )
        source = sources.get(ref)  # NotFound -> 404 via handler
        since = None
        raw_since = body.get("since")
        if raw_since:
            try:
                since = date.fromisoformat(str(raw_since)[:10])
            except ValueError:
                return _error_response(
                    request, 400, "since must be an ISO date",
                    source={"pointer": "/since"},
                )
        job = jobs.trigger(source, since=since, incremental=since is None)
        return respond(request, _job_resource(job), "ingest-job", status=202)

    @app.get("/api/v1/ingest/{job_id}")
    async def get_job(job_id: str, request: Request):
        job = jobs.get(job_id)
        if job is None:
            return _error_response(request, 404, "no such job", job_id)
        return respond(request, _job_resource(job), "ingest-job")

    # -- self-description ----------------------------------------------------------

    @app.get("/api/v1/schemas")
    async def list_schemas(request: Request):
        data = [
            {
                "type": "schema",
                "id": name,
                "attributes": {"url": schema_url(name)},
            }
            for name in sorted(SCHEMAS)
        ]
        return respond(request, data, "schema-list", meta={"total": len(data)})

    @app.get("/api/v1/schemas/{name}")
    async def get_schema(name: str, request: Request):
        if name not in SCHEMAS:
            return _error_response(request, 404, "no such schema", name)
        return JSONResponse(SCHEMAS[name], media_type="application/json")

    @app.get("/api/v1/openapi")
    async def openapi_document():
        return JSONResponse(app.openapi(), media_type="application/json")

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="webui")

    return app
