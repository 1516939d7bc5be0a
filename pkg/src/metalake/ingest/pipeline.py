"""The record pipeline: extract, partially transform, load, then link.

Each harvested record passes through verbatim-raw capture, crosswalk,
cleaning, id derivation, quality scoring, and an atomic upsert; linking
runs once at the end over the loaded batch.  Job state only moves forward
through pending, extracting, transforming, loading, linking, done (failed
may be jumped to from anywhere); the phase log records each entry.

Per-record error isolation: a payload that fails its crosswalk is counted
failed and skipped, the run continues.  Transport or protocol failures
abort the run with state failed, keeping everything already loaded.
"""

from __future__ import annotations

import threading
import traceback
import unicodedata
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Optional

from ..errors import Conflict, FormatMismatch, ParseFailure, ValidationFailed
from ..model import (
    MetadataRecord,
    ProcessualBlock,
    RawBlock,
    RelationEdge,
    RelationLabel,
    SocialBlock,
    compute_record_id,
    now_utc,
    quality_score,
)
from ..store import Store
from .harvest import DEFAULT_TRANSPORT, fetch_get, fetch_s3, harvest_oaipmh
from .sources import Protocol, SourceConfig

_STATES = ("pending", "extracting", "transforming", "loading", "linking", "done", "failed")


@dataclass
class IngestCounts:
    seen: int = 0
    loaded: int = 0
    skipped: int = 0
    failed: int = 0

    def as_tuple(self):
        return (self.seen, self.loaded, self.skipped, self.failed)


@dataclass
class IngestJob:
    jobId: str
    source: SourceConfig
    state: str = "pending"
    counts: IngestCounts = field(default_factory=IngestCounts)
    startedAt: Optional[datetime] = None
    finishedAt: Optional[datetime] = None
    errors: list = field(default_factory=list)
    resumptionCursor: Optional[str] = None
    phaseLog: list = field(default_factory=list)
    edgesCreated: int = 0

    def enter(self, state: str) -> None:
        # states only move forward; re-entering the current one is a no-op
        if state == self.state:
            return
        if state != "failed" and _STATES.index(state) < _STATES.index(self.state):
            return
        self.state = state
        self.phaseLog.append((state, now_utc().isoformat()))

    @property
    def terminal(self) -> bool:
        return self.state in ("done", "failed")


def new_job(source: SourceConfig) -> IngestJob:
    return IngestJob(jobId="job-%s" % uuid.uuid4().hex[:12], source=source)


def _clean_text(value):
    if value is None:
        return None
    value = unicodedata.normalize("NFC", value.strip())
    return value or None


def _clean_parsed(parsed):
    """Data cleaning: trim, NFC-normalize, drop empty strings."""
    d = parsed.descriptive
    cleaned = replace(
        d,
        title=_clean_text(d.title),
        creators=tuple(
            replace(c, name=_clean_text(c.name) or "", identifier=_clean_text(c.identifier))
            for c in d.creators
            if _clean_text(c.name)
        ),
        publisher=_clean_text(d.publisher),
        identifiers=tuple(i for i in d.identifiers if _clean_text(i.value)),
        description=_clean_text(d.description),
        subjects=tuple(s for s in (_clean_text(s) for s in d.subjects) if s),
        language=_clean_text(d.language),
        rights=_clean_text(d.rights),
        license=_clean_text(d.license),
    )
    return replace(parsed, descriptive=cleaned)


def _extract_stream(source: SourceConfig, since, settings, job: IngestJob):
    if source.protocol is Protocol.OAIPMH:
        def on_cursor(token):
            job.resumptionCursor = token

        return harvest_oaipmh(source, since=since, settings=settings, on_cursor=on_cursor)
    if source.protocol is Protocol.GET:
        return fetch_get(source, settings=settings)
    return fetch_s3(source, settings=settings)


def run_pipeline(
    source: SourceConfig,
    store: Store,
    since=None,
    settings=DEFAULT_TRANSPORT,
    job: Optional[IngestJob] = None,
    crosswalk=None,
) -> IngestJob:
    """Run one ingest for a source; returns the completed (or failed) job."""
    from .. import parsers  # local import keeps module load cheap

    crosswalk = crosswalk or parsers.crosswalk
    job = job or new_job(source)
    job.startedAt = now_utc()
    job.enter("extracting")
    loaded_ids = []
    try:
        for item in _extract_stream(source, since, settings, job):
            job.counts.seen += 1
            if item.error is not None:
                job.counts.failed += 1
                job.errors.append((item.original_identifier, item.error))
                continue
            if item.deleted or not item.payload:
                job.counts.skipped += 1
                continue

            job.enter("transforming")
            try:
                parsed = _clean_parsed(crosswalk(source.format, item.payload))
            except (ParseFailure, FormatMismatch) as exc:
                job.counts.failed += 1
                job.errors.append((item.original_identifier, str(exc)))
                continue

            record_id = compute_record_id(source.location, item.original_identifier)
            descriptive = parsed.descriptive
            if not descriptive.title:
                # raw-only degenerate mode must still be storable
                descriptive = replace(descriptive, title=item.original_identifier)
            now = now_utc()
            record = MetadataRecord(
                descriptive=descriptive,
                technical=parsed.technical,
                processual=ProcessualBlock(
                    recordId=record_id,
                    source=source.location,
                    originalIdentifier=item.original_identifier,
                    createdAt=now,
                    modifiedAt=now,
                    dataSteward=source.dataSteward,
                    ingestFormat=source.format,
                ),
                social=SocialBlock(keywords=descriptive.subjects),
                raw=RawBlock(payload=item.payload),
            )
            record = replace(
                record, social=replace(record.social, qualityScore=quality_score(record))
            )

            job.enter("loading")
            declared = tuple(
                (rel.scheme.value, rel.value, rel.label.value)
                for rel in parsed.embedded_relations
            )
            try:
                store.upsert_record(record, declared_relations=declared)
            except ValidationFailed as exc:
                job.counts.failed += 1
                job.errors.append((item.original_identifier, str(exc)))
                continue
            loaded_ids.append(record_id)
            job.counts.loaded += 1
    except Exception as exc:
        job.errors.append(("", "%s: %s" % (type(exc).__name__, exc)))
        job.enter("failed")
        job.finishedAt = now_utc()
        return job

    job.enter("linking")
    job.edgesCreated = link_records(store, loaded_ids)
    job.enter("done")
    job.finishedAt = now_utc()
    return job


def link_records(store: Store, batch_ids) -> int:
    """Resolve declared relations against stored identifiers, both ways:
    batch records pointing at anything stored, and anything stored pointing
    at batch records.  Unmatched declarations stay persisted for later runs.
    Returns the number of edges created."""
    created = 0
    batch = set(batch_ids)
    for rid in sorted(batch):
        for scheme, value, label in store.declared_relations(rid):
            for target in sorted(store.find_by_identifier(scheme, value)):
                if target == rid:
                    continue
                edge = RelationEdge(rid, RelationLabel(label), target)
                if store.add_edge(edge) == "created":
                    created += 1
    for owner, (scheme, value, label) in store.iter_declared():
        if owner in batch:
            continue
        for target in sorted(store.find_by_identifier(scheme, value)):
            if target in batch and target != owner:
                edge = RelationEdge(owner, RelationLabel(label), target)
                if store.add_edge(edge) == "created":
                    created += 1
    return created


class JobRegistry:
    """Job bookkeeping: at most one running pipeline per source, async
    execution for the API, and last-success times for incremental harvests."""

    def __init__(self, store: Store, settings=DEFAULT_TRANSPORT):
        self._store = store
        self._settings = settings
        self._lock = threading.Lock()
        self._jobs: dict[str, IngestJob] = {}
        self._running: dict[str, str] = {}
        self._last_success: dict = {}

    def get(self, job_id: str) -> Optional[IngestJob]:
        with self._lock:
            return self._jobs.get(job_id)

    def jobs(self) -> list:
        with self._lock:
            return sorted(self._jobs.values(), key=lambda j: j.jobId)

    def effective_since(self, source: SourceConfig, since, incremental: bool):
        if since is not None or not incremental:
            return since
        last = self._last_success.get(source.ref)
        return last.date() if last is not None else None

    def trigger(
        self, source: SourceConfig, since=None, incremental: bool = True,
        asynchronous: bool = True,
    ) -> IngestJob:
        with self._lock:
            running_id = self._running.get(source.ref)
            if running_id is not None and not self._jobs[running_id].terminal:
                raise Conflict("a job is already running for %s" % source.ref)
            job = new_job(source)
            self._jobs[job.jobId] = job
            self._running[source.ref] = job.jobId
        effective = self.effective_since(source, since, incremental)

        def run():
            started = now_utc()
            try:
                run_pipeline(
                    source, self._store, since=effective,
                    settings=self._settings, job=job,
                )
            except Exception:  # defensive: run_pipeline shouldn't raise
                job.errors.append(("", traceback.format_exc(limit=1)))
                job.enter("failed")
                job.finishedAt = now_utc()
            finally:
                with self._lock:
                    if job.state == "done":
                        self._last_success[source.ref] = started
                    self._running.pop(source.ref, None)

        if asynchronous:
            thread = threading.Thread(target=run, name=job.jobId, daemon=True)
            thread.start()
        else:
            run()
        return job
