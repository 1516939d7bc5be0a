"""Self-served JSON Schemas: one per request and response body.

Every API envelope's links.describedby points at /api/v1/schemas/<name>,
and the test suite validates each live response against the schema it
advertises, so these documents are contracts, not decoration.
"""

from __future__ import annotations

from ..model import IdentifierScheme, RelationCategory, RelationLabel, ResourceType, SourceFormat

RECORD_ID_PATTERN = "^[A-Za-z0-9_-]{11}$"

_STR = {"type": "string"}
_STR_OR_NULL = {"type": ["string", "null"]}
_INT_OR_NULL = {"type": ["integer", "null"]}

_LINKS = {
    "type": "object",
    "required": ["self", "describedby"],
    "properties": {"self": _STR, "describedby": _STR},
    "additionalProperties": False,
}

_ERROR_OBJECT = {
    "type": "object",
    "required": ["status", "title"],
    "properties": {
        "status": _STR,
        "title": _STR,
        "detail": _STR,
        "source": {
            "type": "object",
            "properties": {"pointer": _STR, "parameter": _STR},
            "additionalProperties": False,
        },
        "meta": {"type": "object"},
    },
    "additionalProperties": False,
}


def _envelope(data_schema: dict) -> dict:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["data", "links"],
        "properties": {
            "data": data_schema,
            "links": _LINKS,
            "meta": {"type": "object"},
        },
        "additionalProperties": False,
    }


def _resource(type_name: str, attributes: dict, extra: dict = None) -> dict:
    properties = {
        "type": {"const": type_name},
        "id": _STR,
        "attributes": attributes,
    }
    if extra:
        properties.update(extra)
    return {
        "type": "object",
        "required": ["type", "id", "attributes"],
        "properties": properties,
        "additionalProperties": False,
    }


_RECORD_ATTRIBUTES = {
    "type": "object",
    "required": ["descriptive", "technical", "processual", "social", "raw"],
    "additionalProperties": False,
    "properties": {
        "descriptive": {
            "type": "object",
            "required": ["title"],
            "additionalProperties": False,
            "properties": {
                "title": _STR_OR_NULL,
                "creators": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["name"],
                        "properties": {"name": _STR, "identifier": _STR_OR_NULL},
                        "additionalProperties": False,
                    },
                },
                "publisher": _STR_OR_NULL,
                "publicationYear": _INT_OR_NULL,
                "resourceType": {
                    "enum": [t.value for t in ResourceType] + [None]
                },
                "identifiers": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["scheme", "value"],
                        "properties": {
                            "scheme": {"enum": [s.value for s in IdentifierScheme]},
                            "value": _STR,
                        },
                        "additionalProperties": False,
                    },
                },
                "description": _STR_OR_NULL,
                "subjects": {"type": "array", "items": _STR},
                "language": _STR_OR_NULL,
                "rights": _STR_OR_NULL,
                "license": _STR_OR_NULL,
            },
        },
        "technical": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "location": _STR_OR_NULL,
                "format": _STR_OR_NULL,
                "size": {"type": ["integer", "null"], "minimum": 0},
                "checksum": {
                    "type": ["object", "null"],
                    "required": ["algorithm", "digest"],
                    "properties": {"algorithm": _STR, "digest": _STR},
                    "additionalProperties": False,
                },
            },
        },
        "processual": {
            "type": "object",
            "required": [
                "recordId",
                "source",
                "originalIdentifier",
                "createdAt",
                "modifiedAt",
                "dataSteward",
                "ingestFormat",
            ],
            "additionalProperties": False,
            "properties": {
                "recordId": {"type": "string", "pattern": RECORD_ID_PATTERN},
                "source": _STR,
                "originalIdentifier": _STR,
                "createdAt": _STR,
                "modifiedAt": _STR,
                "dataSteward": _STR,
                "ingestFormat": {"enum": [f.value for f in SourceFormat]},
            },
        },
        "social": {
            "type": "object",
            "required": ["keywords", "viewCount", "qualityScore"],
            "additionalProperties": False,
            "properties": {
                "keywords": {"type": "array", "items": _STR},
                "viewCount": {"type": "integer", "minimum": 0},
                "qualityScore": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "raw": {
            "type": "object",
            "required": ["payload", "encoding", "mediaType"],
            "additionalProperties": False,
            "properties": {
                "payload": _STR,
                "encoding": {"const": "XML"},
                "mediaType": _STR,
            },
        },
    },
}

_RELATIONSHIPS = {
    "type": "object",
    "required": ["related"],
    "additionalProperties": False,
    "properties": {
        "related": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "category", "direction", "id"],
                "additionalProperties": False,
                "properties": {
                    "label": {"enum": [l.value for l in RelationLabel]},
                    "category": {"enum": [c.value for c in RelationCategory]},
                    "direction": {"enum": ["out", "in"]},
                    "id": {"type": "string", "pattern": RECORD_ID_PATTERN},
                },
            },
        }
    },
}

_SEARCH_HIT_ATTRIBUTES = {
    "type": "object",
    "required": ["title", "creators", "publicationYear", "resourceType", "source"],
    "additionalProperties": False,
    "properties": {
        "title": _STR_OR_NULL,
        "creators": {"type": "array", "items": _STR},
        "publicationYear": _INT_OR_NULL,
        "resourceType": _STR_OR_NULL,
        "source": _STR,
        "score": {"type": ["number", "null"]},
    },
}

_SOURCE_ATTRIBUTES = {
    "type": "object",
    "required": ["ref", "location", "protocol", "encoding", "format", "dataSteward"],
    "additionalProperties": False,
    "properties": {
        "ref": _STR,
        "location": _STR,
        "protocol": {"enum": ["OAI-PMH", "GET", "S3"]},
        "encoding": {"const": "XML"},
        "format": {"enum": [f.value for f in SourceFormat]},
        "dataSteward": _STR,
        "hasCredentials": {"type": "boolean"},
        "oaiSet": _STR_OR_NULL,
        "oaiMetadataPrefix": _STR,
    },
}

_PAIR_OF_STRINGS = {
    "type": "array",
    "items": _STR,
    "minItems": 2,
    "maxItems": 2,
}

_JOB_ATTRIBUTES = {
    "type": "object",
    "required": ["sourceRef", "state", "counts", "errors", "phaseLog"],
    "additionalProperties": False,
    "properties": {
        "sourceRef": _STR,
        "state": {
            "enum": [
                "pending",
                "extracting",
                "transforming",
                "loading",
                "linking",
                "done",
                "failed",
            ]
        },
        "counts": {
            "type": "object",
            "required": ["seen", "loaded", "skipped", "failed"],
            "additionalProperties": False,
            "properties": {
                "seen": {"type": "integer", "minimum": 0},
                "loaded": {"type": "integer", "minimum": 0},
                "skipped": {"type": "integer", "minimum": 0},
                "failed": {"type": "integer", "minimum": 0},
            },
        },
        "startedAt": _STR_OR_NULL,
        "finishedAt": _STR_OR_NULL,
        "errors": {"type": "array", "items": _PAIR_OF_STRINGS},
        "resumptionCursor": _STR_OR_NULL,
        "phaseLog": {"type": "array", "items": _PAIR_OF_STRINGS},
        "edgesCreated": {"type": "integer", "minimum": 0},
    },
}

_STATS_ATTRIBUTES = {
    "type": "object",
    "required": ["recordCount", "edgeCount", "perSourceCounts", "perFormatCounts"],
    "additionalProperties": False,
    "properties": {
        "recordCount": {"type": "integer", "minimum": 0},
        "edgeCount": {"type": "integer", "minimum": 0},
        "perSourceCounts": {
            "type": "object",
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "perFormatCounts": {
            "type": "object",
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
    },
}

SCHEMAS = {
    "ready": _envelope(
        _resource(
            "status",
            {
                "type": "object",
                "required": ["status"],
                "properties": {"status": {"enum": ["ok", "unavailable"]}},
                "additionalProperties": False,
            },
        )
    ),
    "metadata-record": _envelope(
        _resource(
            "metadata-record",
            _RECORD_ATTRIBUTES,
            extra={"relationships": _RELATIONSHIPS},
        )
    ),
    "search-results": _envelope(
        {"type": "array", "items": _resource("search-hit", _SEARCH_HIT_ATTRIBUTES)}
    ),
    "source": _envelope(_resource("source", _SOURCE_ATTRIBUTES)),
    "source-list": _envelope(
        {"type": "array", "items": _resource("source", _SOURCE_ATTRIBUTES)}
    ),
    "ingest-job": _envelope(_resource("ingest-job", _JOB_ATTRIBUTES)),
    "stats": _envelope(_resource("stats", _STATS_ATTRIBUTES)),
    "schema-list": _envelope(
        {
            "type": "array",
            "items": _resource(
                "schema",
                {
                    "type": "object",
                    "required": ["url"],
                    "properties": {"url": _STR},
                    "additionalProperties": False,
                },
            ),
        }
    ),
    "error": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["errors", "links"],
        "properties": {
            "errors": {"type": "array", "items": _ERROR_OBJECT, "minItems": 1},
            "links": _LINKS,
            "meta": {"type": "object"},
        },
        "additionalProperties": False,
    },
    "source-request": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["location", "protocol", "format", "dataSteward"],
        "properties": {
            "location": _STR,
            "protocol": {"enum": ["OAI-PMH", "OAIPMH", "GET", "S3"]},
            "encoding": {"const": "XML"},
            "format": {"enum": [f.value for f in SourceFormat]},
            "dataSteward": _STR,
            "credentials": {
                "type": "object",
                "properties": {
                    "username": _STR,
                    "password": _STR,
                    "accessKey": _STR,
                    "secretKey": _STR,
                },
                "additionalProperties": False,
            },
            "oaiSet": _STR_OR_NULL,
            "oaiMetadataPrefix": _STR_OR_NULL,
        },
        "additionalProperties": False,
    },
    "ingest-request": {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["sourceRef"],
        "properties": {
            "sourceRef": _STR,
            "since": {"type": ["string", "null"], "format": "date"},
        },
        "additionalProperties": False,
    },
}


def schema_url(name: str) -> str:
    return "/api/v1/schemas/%s" % name
