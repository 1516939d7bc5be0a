"""Embedded graph store: document vertices, labeled edges, search indexes.

Persistence is an append-only JSONL log (one fsynced line per committed
record or edge, so a hard kill never leaves half a record) plus an index
snapshot written on clean shutdown; recovery after a crash replays the log
and rebuilds every index from the vertices.  Index contents are always
exactly derivable from the vertices - rebuild_indexes() restores that
equality from scratch at any time.

Concurrency contract: a single re-entrant lock serializes writers; readers
take the same lock briefly and always observe fully applied operations.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import re
import threading
from pathlib import Path
from typing import Iterator

from . import filterquery
from .errors import IntegrityViolation, InvalidInput, NotFound, ValidationFailed
from .model import (
    MetadataRecord,
    RelationEdge,
    RelationLabel,
    now_utc,
    record_from_dict,
    record_to_dict,
    validate_record,
)

DEFAULT_PAGE_SIZE = 20
MAX_PAGE_SIZE = 100

_WORD_RE = re.compile(r"\w+", re.UNICODE)

_LOG_NAME = "records.log"
_SNAPSHOT_NAME = "indexes.json"

# Enumerable record fields served as search facets.
FACET_FIELDS = (
    "resourceType",
    "publicationYear",
    "language",
    "source",
    "ingestFormat",
    "dataSteward",
)

_FACET_GETTERS = {
    "resourceType": lambda rec: (
        rec.descriptive.resourceType.value if rec.descriptive.resourceType else None
    ),
    "publicationYear": lambda rec: (
        str(rec.descriptive.publicationYear)
        if rec.descriptive.publicationYear is not None
        else None
    ),
    "language": lambda rec: rec.descriptive.language,
    "source": lambda rec: rec.processual.source,
    "ingestFormat": lambda rec: rec.processual.ingestFormat.value,
    "dataSteward": lambda rec: rec.processual.dataSteward,
}


def tokenize(text: str) -> list:
    """Lowercase Unicode word segmentation; no stemming, no stop words."""
    return [token.lower() for token in _WORD_RE.findall(text)]


def indexed_text(record: MetadataRecord) -> str:
    d = record.descriptive
    parts = [
        d.title or "",
        d.description or "",
        " ".join(d.subjects),
        " ".join(record.social.keywords),
        " ".join(c.name for c in d.creators),
        d.publisher or "",
    ]
    return " ".join(parts)


def _check_page(page: int, page_size: int) -> None:
    if not isinstance(page, int) or page < 1:
        raise InvalidInput("page must be a positive integer")
    if not isinstance(page_size, int) or not 1 <= page_size <= MAX_PAGE_SIZE:
        raise InvalidInput("page_size must be in [1, %d]" % MAX_PAGE_SIZE)


class Store:
    """The data tier.  Pass path=None for an ephemeral in-memory store."""

    def __init__(self, path=None, fsync: bool = True):
        self._lock = threading.RLock()
        self._records: dict[str, MetadataRecord] = {}
        self._edges: set[RelationEdge] = set()
        self._declared: dict[str, tuple] = {}
        self._token_index: dict[str, dict[str, int]] = {}
        self._facet_index: dict[str, dict[str, set]] = {f: {} for f in FACET_FIELDS}
        self._ident_index: dict[tuple, set] = {}
        self._fsync = fsync
        self._path = Path(path) if path is not None else None
        self._log = None
        if self._path is not None:
            self._open_on_disk()

    # -- lifecycle ----------------------------------------------------------

    def _open_on_disk(self) -> None:
        self._path.mkdir(parents=True, exist_ok=True)
        log_path = self._path / _LOG_NAME
        log_size = 0
        if log_path.exists():
            log_size = self._replay(log_path)
        if not self._load_snapshot(log_size):
            self.rebuild_indexes()
        self._log = open(log_path, "ab")

    def _replay(self, log_path: Path) -> int:
        """Apply every complete log line; a truncated tail (crash mid-append)
        is discarded.  Returns the number of bytes consumed."""
        consumed = 0
        with open(log_path, "rb") as fh:
            for line in fh:
                if not line.endswith(b"\n"):
                    break
                try:
                    event = json.loads(line)
                except ValueError:
                    break
                op = event["op"]
                if op == "record":
                    record = record_from_dict(event["record"])
                    rid = record.processual.recordId
                    self._records[rid] = record
                    if "declared" in event:
                        self._declared[rid] = tuple(
                            tuple(item) for item in event["declared"]
                        )
                elif op == "edge":
                    self._edges.add(
                        RelationEdge(
                            event["from"], RelationLabel(event["label"]), event["to"]
                        )
                    )
                elif op == "view":
                    rec = self._records.get(event["id"])
                    if rec is not None:
                        self._records[event["id"]] = dataclasses.replace(
                            rec,
                            social=dataclasses.replace(
                                rec.social, viewCount=rec.social.viewCount + 1
                            ),
                        )
                consumed += len(line)
        if log_path.stat().st_size != consumed:
            # drop the torn tail so future appends start on a clean line
            with open(log_path, "r+b") as fh:
                fh.truncate(consumed)
        return consumed

    def _load_snapshot(self, log_size: int) -> bool:
        if self._path is None:
            return False
        snap_path = self._path / _SNAPSHOT_NAME
        if not snap_path.exists():
            return False
        try:
            snap = json.loads(snap_path.read_text("utf-8"))
        except ValueError:
            return False
        if snap.get("log_size") != log_size:
            return False
        self._token_index = {
            token: dict(postings) for token, postings in snap["tokens"].items()
        }
        self._facet_index = {
            field: {value: set(ids) for value, ids in values.items()}
            for field, values in snap["facets"].items()
        }
        self._ident_index = {
            (scheme, value): set(ids) for scheme, value, ids in snap["identifiers"]
        }
        return True

    def _write_snapshot(self) -> None:
        snap = {
            "log_size": (self._path / _LOG_NAME).stat().st_size,
            "tokens": self._token_index,
            "facets": {
                field: {value: sorted(ids) for value, ids in values.items()}
                for field, values in self._facet_index.items()
            },
            "identifiers": [
                [scheme, value, sorted(ids)]
                for (scheme, value), ids in self._ident_index.items()
            ],
        }
        tmp = self._path / (_SNAPSHOT_NAME + ".tmp")
        tmp.write_text(json.dumps(snap), "utf-8")
        os.replace(tmp, self._path / _SNAPSHOT_NAME)

    def close(self) -> None:
        with self._lock:
            if self._log is not None:
                self._log.flush()
                os.fsync(self._log.fileno())
                self._write_snapshot()
                self._log.close()
                self._log = None

    def _append(self, event: dict, durable: bool = True) -> None:
        if self._log is None:
            return
        self._log.write(json.dumps(event, ensure_ascii=False).encode("utf-8") + b"\n")
        self._log.flush()
        if durable and self._fsync:
            os.fsync(self._log.fileno())

    # -- index maintenance --------------------------------------------------

    def _index_record(self, record: MetadataRecord) -> None:
        rid = record.processual.recordId
        counts: dict[str, int] = {}
        for token in tokenize(indexed_text(record)):
            counts[token] = counts.get(token, 0) + 1
        for token, count in counts.items():
            self._token_index.setdefault(token, {})[rid] = count
        for field, getter in _FACET_GETTERS.items():
            value = getter(record)
            if value is not None:
                self._facet_index[field].setdefault(value, set()).add(rid)
        for ident in record.descriptive.identifiers:
            self._ident_index.setdefault((ident.scheme.value, ident.value), set()).add(
                rid
            )

    def _unindex_record(self, record: MetadataRecord) -> None:
        rid = record.processual.recordId
        for token in set(tokenize(indexed_text(record))):
            postings = self._token_index.get(token)
            if postings is not None:
                postings.pop(rid, None)
                if not postings:
                    del self._token_index[token]
        for field, getter in _FACET_GETTERS.items():
            value = getter(record)
            if value is not None:
                ids = self._facet_index[field].get(value)
                if ids is not None:
                    ids.discard(rid)
                    if not ids:
                        del self._facet_index[field][value]
        for ident in record.descriptive.identifiers:
            key = (ident.scheme.value, ident.value)
            ids = self._ident_index.get(key)
            if ids is not None:
                ids.discard(rid)
                if not ids:
                    del self._ident_index[key]

    def rebuild_indexes(self) -> None:
        """Drop and recompute all indexes from the vertices."""
        with self._lock:
            self._token_index = {}
            self._facet_index = {f: {} for f in FACET_FIELDS}
            self._ident_index = {}
            for record in self._records.values():
                self._index_record(record)

    # -- vertices -----------------------------------------------------------

    def upsert_record(self, record: MetadataRecord, declared_relations=None) -> str:
        """Insert or update the vertex under record.processual.recordId.

        Returns "created" or "updated".  On update the existing createdAt and
        viewCount survive and modifiedAt becomes now.  declared_relations
        (tuples of (scheme, value, label) strings) replace the stored set
        when given; None leaves it untouched.
        """
        report = validate_record(record)
        if report:
            raise ValidationFailed(report)
        rid = record.processual.recordId
        with self._lock:
            existing = self._records.get(rid)
            if existing is not None:
                record = dataclasses.replace(
                    record,
                    processual=dataclasses.replace(
                        record.processual,
                        createdAt=existing.processual.createdAt,
                        modifiedAt=now_utc(),
                    ),
                    social=dataclasses.replace(
                        record.social, viewCount=existing.social.viewCount
                    ),
                )
                self._unindex_record(existing)
            self._records[rid] = record
            self._index_record(record)
            event = {"op": "record", "record": record_to_dict(record)}
            if declared_relations is not None:
                declared = tuple(tuple(rel) for rel in declared_relations)
                self._declared[rid] = declared
                event["declared"] = [list(rel) for rel in declared]
            self._append(event)
            return "updated" if existing is not None else "created"

    def get_record(self, record_id: str, count_view: bool = False):
        """The stored vertex, or None.  With count_view the stored view
        counter increments by one; the returned record shows the value
        from before the increment."""
        with self._lock:
            record = self._records.get(record_id)
            if record is None:
                return None
            if count_view:
                self._records[record_id] = dataclasses.replace(
                    record,
                    social=dataclasses.replace(
                        record.social, viewCount=record.social.viewCount + 1
                    ),
                )
                self._append({"op": "view", "id": record_id}, durable=False)
            return record

    def __contains__(self, record_id: str) -> bool:
        with self._lock:
            return record_id in self._records

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def record_ids(self) -> list:
        with self._lock:
            return sorted(self._records)

    # -- edges --------------------------------------------------------------

    def add_edge(self, edge: RelationEdge) -> str:
        """Add a labeled edge; duplicate triples collapse.  Returns
        "created" or "exists"."""
        if edge.src == edge.dst:
            raise InvalidInput("self-loops are not allowed")
        with self._lock:
            if edge.src not in self._records or edge.dst not in self._records:
                raise IntegrityViolation(
                    "both endpoints must be stored before the edge"
                )
            if edge in self._edges:
                return "exists"
            self._edges.add(edge)
            self._append(
                {"op": "edge", "from": edge.src, "label": edge.label.value, "to": edge.dst}
            )
            return "created"

    def neighbors(self, record_id: str, direction: str = "both", label=None) -> list:
        """Matching (edge, opposite-endpoint record) pairs, ordered by
        (label, opposite id) for determinism."""
        if direction not in ("out", "in", "both"):
            raise InvalidInput("direction must be out, in, or both")
        with self._lock:
            if record_id not in self._records:
                raise NotFound("unknown record id: %s" % record_id)
            matches = []
            for edge in self._edges:
                if label is not None and edge.label is not label:
                    continue
                if direction in ("out", "both") and edge.src == record_id:
                    matches.append((edge, edge.dst))
                if direction in ("in", "both") and edge.dst == record_id:
                    matches.append((edge, edge.src))
            matches.sort(key=lambda pair: (pair[0].label.value, pair[1]))
            return [(edge, self._records[other]) for edge, other in matches]

    def edge_count(self) -> int:
        with self._lock:
            return len(self._edges)

    def edges(self) -> set:
        with self._lock:
            return set(self._edges)

    # -- declared relations (persisted for cross-run link generation) -------

    def declared_relations(self, record_id: str) -> tuple:
        with self._lock:
            return self._declared.get(record_id, ())

    def iter_declared(self) -> Iterator[tuple]:
        with self._lock:
            items = [(rid, rels) for rid, rels in self._declared.items()]
        for rid, rels in items:
            for rel in rels:
                yield rid, rel

    def find_by_identifier(self, scheme: str, value: str) -> set:
        with self._lock:
            return set(self._ident_index.get((scheme, value), ()))

    # -- search -------------------------------------------------------------

    def fulltext_scores(self, query: str) -> list:
        """All (record_id, score) hits for an AND-semantics token search,
        ranked by tf-idf with idf = ln(1 + N/df), score descending and
        record id ascending on ties."""
        tokens = sorted(set(tokenize(query)))
        if not tokens:
            raise InvalidInput("query is empty after tokenization")
        with self._lock:
            postings = []
            for token in tokens:
                entry = self._token_index.get(token)
                if not entry:
                    return []
                postings.append(entry)
            candidates = set(postings[0])
            for entry in postings[1:]:
                candidates &= set(entry)
            n_records = len(self._records)
            scored = []
            for rid in candidates:
                score = 0.0
                for token, entry in zip(tokens, postings):
                    idf = math.log(1.0 + n_records / len(entry))
                    score += entry[rid] * idf
                scored.append((rid, score))
            scored.sort(key=lambda pair: (-pair[1], pair[0]))
            return scored

    def search_fulltext(
        self, query: str, page: int = 1, page_size: int = DEFAULT_PAGE_SIZE
    ):
        """One page of fulltext_scores; returns (total, hits)."""
        _check_page(page, page_size)
        scored = self.fulltext_scores(query)
        start = (page - 1) * page_size
        return len(scored), scored[start : start + page_size]

    def facet_match_ids(self, filters: dict) -> list:
        """Sorted ids in the intersection of per-filter sets (no filters =
        every record).  Filter values compare as strings."""
        for field in filters:
            if field not in FACET_FIELDS:
                raise InvalidInput("unknown facet field: %r" % field)
        with self._lock:
            if filters:
                sets = [
                    self._facet_index[field].get(str(value), set())
                    for field, value in filters.items()
                ]
                result = set(sets[0])
                for other in sets[1:]:
                    result &= other
            else:
                result = set(self._records)
            return sorted(result)

    def search_facets(
        self, filters: dict, page: int = 1, page_size: int = DEFAULT_PAGE_SIZE
    ):
        """One page of the filtered id set plus facet value counts computed
        over the whole filtered set.

        Returns (total, [record ids], {field: {value: count}}).
        """
        _check_page(page, page_size)
        with self._lock:
            ordered = self.facet_match_ids(filters)
            counts = self._facet_counts(ordered)
        start = (page - 1) * page_size
        return len(ordered), ordered[start : start + page_size], counts

    def _facet_counts(self, record_ids) -> dict:
        counts: dict = {field: {} for field in FACET_FIELDS}
        for rid in record_ids:
            record = self._records[rid]
            for field, getter in _FACET_GETTERS.items():
                value = getter(record)
                if value is not None:
                    per_value = counts[field]
                    per_value[value] = per_value.get(value, 0) + 1
        return counts

    def facet_counts(self, record_ids) -> dict:
        with self._lock:
            return self._facet_counts([rid for rid in record_ids if rid in self._records])

    def filter_match_ids(self, expr) -> list:
        """Sorted ids satisfying a filter expression (text or parsed);
        plain brute-force evaluation over every vertex."""
        if isinstance(expr, str):
            expr = filterquery.parse_filter(expr)
        with self._lock:
            return [
                rid
                for rid in sorted(self._records)
                if filterquery.evaluate(expr, self._records[rid])
            ]

    def filter_query(
        self, expr, page: int = 1, page_size: int = DEFAULT_PAGE_SIZE
    ):
        """One page of filter_match_ids; returns (total, [record ids])."""
        _check_page(page, page_size)
        matched = self.filter_match_ids(expr)
        start = (page - 1) * page_size
        return len(matched), matched[start : start + page_size]

    # -- stats --------------------------------------------------------------

    def stats(self) -> dict:
        with self._lock:
            per_source: dict = {}
            per_format: dict = {}
            for record in self._records.values():
                src = record.processual.source
                fmt = record.processual.ingestFormat.value
                per_source[src] = per_source.get(src, 0) + 1
                per_format[fmt] = per_format.get(fmt, 0) + 1
            return {
                "recordCount": len(self._records),
                "edgeCount": len(self._edges),
                "perSourceCounts": per_source,
                "perFormatCounts": per_format,
            }
