"""Unified record schema: the graph's vertex and edge vocabulary.

A stored record is one vertex of the metadata graph.  It carries five
attribute blocks (descriptive, technical, processual, social, raw); labeled
edges between records carry one of a fixed eight-label relation vocabulary.
Everything in this module is an immutable value; all operations are pure.
"""

from __future__ import annotations

import base64
import re
import unicodedata
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Optional

import xxhash

from .errors import InvalidInput

# 11 characters of the base64url alphabet, no padding; decodes to 8 bytes.
RECORD_ID_RE = re.compile(r"^[A-Za-z0-9_-]{11}$")

# Joins the two hash inputs; U+001F (unit separator) cannot occur in URLs,
# so the canonical string is injective per source.
_ID_SEPARATOR = ""

_HEX_RE = re.compile(r"^[0-9a-f]+$")

# Digest length in hex characters for algorithms we can check.
_DIGEST_LENGTHS = {
    "md5": 32,
    "sha1": 40,
    "sha224": 56,
    "sha256": 64,
    "sha384": 96,
    "sha512": 128,
    "crc32": 8,
    "xxh64": 16,
}


class ResourceType(Enum):
    """General resource categorization (DataCite 4.5 resourceTypeGeneral values)."""

    Audiovisual = "Audiovisual"
    Award = "Award"
    Book = "Book"
    BookChapter = "BookChapter"
    Collection = "Collection"
    ComputationalNotebook = "ComputationalNotebook"
    ConferencePaper = "ConferencePaper"
    ConferenceProceeding = "ConferenceProceeding"
    DataPaper = "DataPaper"
    Dataset = "Dataset"
    Dissertation = "Dissertation"
    Event = "Event"
    Image = "Image"
    Instrument = "Instrument"
    InteractiveResource = "InteractiveResource"
    Journal = "Journal"
    JournalArticle = "JournalArticle"
    Model = "Model"
    OutputManagementPlan = "OutputManagementPlan"
    PeerReview = "PeerReview"
    PhysicalObject = "PhysicalObject"
    Preprint = "Preprint"
    Project = "Project"
    Report = "Report"
    Service = "Service"
    Software = "Software"
    Sound = "Sound"
    Standard = "Standard"
    StudyRegistration = "StudyRegistration"
    Text = "Text"
    Workflow = "Workflow"
    Other = "Other"


_RESOURCE_TYPE_LOOKUP = {name.lower(): member for name, member in ResourceType.__members__.items()}


def map_resource_type(value: Optional[str]) -> Optional[ResourceType]:
    """Map a free-text type onto the enum; unknown non-empty values become Other."""
    if value is None:
        return None
    key = re.sub(r"[^a-z0-9]", "", value.lower())
    if not key:
        return None
    return _RESOURCE_TYPE_LOOKUP.get(key, ResourceType.Other)


class IdentifierScheme(Enum):
    DOI = "DOI"
    URN = "URN"
    Handle = "Handle"
    ISBN = "ISBN"
    ISSN = "ISSN"
    URL = "URL"
    other = "other"


_SCHEME_LOOKUP = {name.lower(): member for name, member in IdentifierScheme.__members__.items()}


def map_identifier_scheme(value: Optional[str]) -> IdentifierScheme:
    """Map a scheme/type attribute onto the enum; unknown values become `other`."""
    if not value:
        return IdentifierScheme.other
    key = value.strip().lower()
    if key in ("uri", "url"):
        return IdentifierScheme.URL
    return _SCHEME_LOOKUP.get(key, IdentifierScheme.other)


def sniff_identifier_scheme(value: str) -> IdentifierScheme:
    """Guess the scheme from the identifier value itself (DublinCore has no attribute)."""
    if value.startswith("10."):
        return IdentifierScheme.DOI
    if value.lower().startswith("urn:"):
        return IdentifierScheme.URN
    if value.startswith("http"):
        return IdentifierScheme.URL
    return IdentifierScheme.other


class SourceFormat(Enum):
    """Supported source metadata formats; one crosswalk exists per member."""

    DataCite = "DataCite"
    DublinCore = "DublinCore"
    LIDO = "LIDO"
    MARC = "MARC"
    MODS = "MODS"


class RawEncoding(Enum):
    XML = "XML"


class RelationCategory(Enum):
    grouping = "grouping"
    similarity = "similarity"
    parenthood = "parenthood"


class RelationLabel(Enum):
    """The eight-member edge label vocabulary."""

    HasPart = "HasPart"
    IsPartOf = "IsPartOf"
    IsVersionOf = "IsVersionOf"
    HasVersion = "HasVersion"
    IsVariantFormOf = "IsVariantFormOf"
    IsIdenticalTo = "IsIdenticalTo"
    IsDerivedFrom = "IsDerivedFrom"
    IsSourceOf = "IsSourceOf"


_RELATION_CATEGORY = {
    RelationLabel.HasPart: RelationCategory.grouping,
    RelationLabel.IsPartOf: RelationCategory.grouping,
    RelationLabel.IsVersionOf: RelationCategory.similarity,
    RelationLabel.HasVersion: RelationCategory.similarity,
    RelationLabel.IsVariantFormOf: RelationCategory.similarity,
    RelationLabel.IsIdenticalTo: RelationCategory.similarity,
    RelationLabel.IsDerivedFrom: RelationCategory.parenthood,
    RelationLabel.IsSourceOf: RelationCategory.parenthood,
}


def relation_category(label) -> RelationCategory:
    """Return the fixed category of an edge label.

    Accepts a RelationLabel or its string name; anything outside the
    eight-member vocabulary raises InvalidInput.
    """
    if isinstance(label, str):
        try:
            label = RelationLabel(label)
        except ValueError:
            raise InvalidInput("unknown relation label: %r" % label) from None
    if not isinstance(label, RelationLabel):
        raise InvalidInput("unknown relation label: %r" % (label,))
    return _RELATION_CATEGORY[label]


@dataclass(frozen=True)
class Creator:
    name: str
    identifier: Optional[str] = None


@dataclass(frozen=True)
class Identifier:
    scheme: IdentifierScheme
    value: str


@dataclass(frozen=True)
class Checksum:
    algorithm: str
    digest: str


@dataclass(frozen=True)
class DescriptiveBlock:
    """Content description; field set derived from the DataCite 4.5 kernel."""

    title: Optional[str] = None
    creators: tuple[Creator, ...] = ()
    publisher: Optional[str] = None
    publicationYear: Optional[int] = None
    resourceType: Optional[ResourceType] = None
    identifiers: tuple[Identifier, ...] = ()
    description: Optional[str] = None
    subjects: tuple[str, ...] = ()
    language: Optional[str] = None
    rights: Optional[str] = None
    license: Optional[str] = None


@dataclass(frozen=True)
class TechnicalBlock:
    """Properties of the underlying dataset (location spans the virtual lake)."""

    location: Optional[str] = None
    format: Optional[str] = None
    size: Optional[int] = None
    checksum: Optional[Checksum] = None


@dataclass(frozen=True)
class ProcessualBlock:
    """Provenance of the record itself: source, origin id, timestamps."""

    recordId: str
    source: str
    originalIdentifier: str
    createdAt: datetime
    modifiedAt: datetime
    dataSteward: str
    ingestFormat: SourceFormat


@dataclass(frozen=True)
class SocialBlock:
    """Discoverability and usage: keywords, view counter, quality score."""

    keywords: tuple[str, ...] = ()
    viewCount: int = 0
    qualityScore: float = 0.0


@dataclass(frozen=True)
class RawBlock:
    """The originally ingested payload, byte-exact; never normalized."""

    payload: str
    encoding: RawEncoding = RawEncoding.XML
    mediaType: str = "application/xml"


@dataclass(frozen=True)
class MetadataRecord:
    """One graph vertex: five attribute blocks over a fixed flat label set."""

    descriptive: DescriptiveBlock
    technical: TechnicalBlock
    processual: ProcessualBlock
    social: SocialBlock
    raw: RawBlock


@dataclass(frozen=True)
class RelationEdge:
    """Ordered labeled edge between two stored records (no self-loops)."""

    src: str
    label: RelationLabel
    dst: str

    @property
    def category(self) -> RelationCategory:
        return _RELATION_CATEGORY[self.label]


# The ten optional descriptive fields counted by quality_score (title is mandatory).
OPTIONAL_DESCRIPTIVE_FIELDS = (
    "creators",
    "publisher",
    "publicationYear",
    "resourceType",
    "identifiers",
    "description",
    "subjects",
    "language",
    "rights",
    "license",
)


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def now_utc() -> datetime:
    return datetime.now(timezone.utc)


def compute_record_id(source: str, original_identifier: str) -> str:
    """Derive the record id: unpadded base64url of the big-endian xxh64 digest
    (seed 0) over `source + U+001F + original_identifier`.

    Stable under descriptive edits and injective per source, so re-ingest
    of the same origin record lands on the same vertex.
    """
    if not original_identifier:
        raise InvalidInput("original_identifier must be non-empty")
    data = (source + _ID_SEPARATOR + original_identifier).encode("utf-8")
    digest = xxhash.xxh64(data, seed=0).intdigest().to_bytes(8, "big")
    return base64.urlsafe_b64encode(digest).decode("ascii").rstrip("=")


def is_valid_record_id(value: str) -> bool:
    return isinstance(value, str) and RECORD_ID_RE.match(value) is not None


ValidationReport = list  # list of (field-path, violation) pairs


def validate_record(record: MetadataRecord) -> ValidationReport:
    """Check every type invariant; returns all violations, not just the first."""
    report: list[tuple[str, str]] = []
    d, t, p, s, r = (
        record.descriptive,
        record.technical,
        record.processual,
        record.social,
        record.raw,
    )

    if not d.title:
        report.append(("descriptive.title", "empty"))
    for i, ident in enumerate(d.identifiers):
        if not isinstance(ident.scheme, IdentifierScheme):
            report.append(("descriptive.identifiers[%d].scheme" % i, "unknown"))
        if not ident.value:
            report.append(("descriptive.identifiers[%d].value" % i, "empty"))
    if d.resourceType is not None and not isinstance(d.resourceType, ResourceType):
        report.append(("descriptive.resourceType", "unknown"))
    if d.publicationYear is not None and not isinstance(d.publicationYear, int):
        report.append(("descriptive.publicationYear", "not-integer"))

    if t.size is not None and t.size < 0:
        report.append(("technical.size", "negative"))
    if t.checksum is not None:
        if not t.checksum.algorithm:
            report.append(("technical.checksum.algorithm", "empty"))
        digest = t.checksum.digest
        if not digest or not _HEX_RE.match(digest):
            report.append(("technical.checksum.digest", "not-hex"))
        else:
            expected = _DIGEST_LENGTHS.get(t.checksum.algorithm.lower())
            if expected is not None and len(digest) != expected:
                report.append(("technical.checksum.digest", "wrong-length"))

    if not is_valid_record_id(p.recordId):
        report.append(("processual.recordId", "malformed"))
    if not p.originalIdentifier:
        report.append(("processual.originalIdentifier", "empty"))
    if p.modifiedAt < p.createdAt:
        report.append(("processual.modifiedAt", "before-createdAt"))

    if s.viewCount < 0:
        report.append(("social.viewCount", "negative"))
    if not 0.0 <= s.qualityScore <= 1.0:
        report.append(("social.qualityScore", "out-of-range"))

    if not r.payload:
        report.append(("raw.payload", "empty"))

    return report


def quality_score(record: MetadataRecord) -> float:
    """Descriptive completeness: populated optional fields / 10.

    A list field counts as populated iff non-empty; scalars iff not None.
    """
    populated = 0
    for name in OPTIONAL_DESCRIPTIVE_FIELDS:
        value = getattr(record.descriptive, name)
        if isinstance(value, tuple):
            if value:
                populated += 1
        elif value is not None:
            populated += 1
    return populated / len(OPTIONAL_DESCRIPTIVE_FIELDS)


# ---------------------------------------------------------------------------
# JSON codec (store log, API attributes) and the flattened field table.

def _ts_to_iso(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


def _ts_from_iso(value: str) -> datetime:
    return datetime.fromisoformat(value)


def descriptive_to_dict(d: DescriptiveBlock) -> dict:
    return {
        "title": d.title,
        "creators": [
            {"name": c.name, "identifier": c.identifier} for c in d.creators
        ],
        "publisher": d.publisher,
        "publicationYear": d.publicationYear,
        "resourceType": d.resourceType.value if d.resourceType else None,
        "identifiers": [
            {"scheme": i.scheme.value, "value": i.value} for i in d.identifiers
        ],
        "description": d.description,
        "subjects": list(d.subjects),
        "language": d.language,
        "rights": d.rights,
        "license": d.license,
    }


def technical_to_dict(t: TechnicalBlock) -> dict:
    return {
        "location": t.location,
        "format": t.format,
        "size": t.size,
        "checksum": (
            {"algorithm": t.checksum.algorithm, "digest": t.checksum.digest}
            if t.checksum
            else None
        ),
    }


def record_to_dict(record: MetadataRecord) -> dict:
    p, s, r = (record.processual, record.social, record.raw)
    return {
        "descriptive": descriptive_to_dict(record.descriptive),
        "technical": technical_to_dict(record.technical),
        "processual": {
            "recordId": p.recordId,
            "source": p.source,
            "originalIdentifier": p.originalIdentifier,
            "createdAt": _ts_to_iso(p.createdAt),
            "modifiedAt": _ts_to_iso(p.modifiedAt),
            "dataSteward": p.dataSteward,
            "ingestFormat": p.ingestFormat.value,
        },
        "social": {
            "keywords": list(s.keywords),
            "viewCount": s.viewCount,
            "qualityScore": s.qualityScore,
        },
        "raw": {
            "payload": r.payload,
            "encoding": r.encoding.value,
            "mediaType": r.mediaType,
        },
    }


def record_from_dict(data: dict) -> MetadataRecord:
    d = data["descriptive"]
    t = data["technical"]
    p = data["processual"]
    s = data["social"]
    r = data["raw"]
    return MetadataRecord(
        descriptive=DescriptiveBlock(
            title=d.get("title"),
            creators=tuple(
                Creator(c["name"], c.get("identifier")) for c in d.get("creators", [])
            ),
            publisher=d.get("publisher"),
            publicationYear=d.get("publicationYear"),
            resourceType=(
                ResourceType(d["resourceType"]) if d.get("resourceType") else None
            ),
            identifiers=tuple(
                Identifier(IdentifierScheme(i["scheme"]), i["value"])
                for i in d.get("identifiers", [])
            ),
            description=d.get("description"),
            subjects=tuple(d.get("subjects", [])),
            language=d.get("language"),
            rights=d.get("rights"),
            license=d.get("license"),
        ),
        technical=TechnicalBlock(
            location=t.get("location"),
            format=t.get("format"),
            size=t.get("size"),
            checksum=(
                Checksum(t["checksum"]["algorithm"], t["checksum"]["digest"])
                if t.get("checksum")
                else None
            ),
        ),
        processual=ProcessualBlock(
            recordId=p["recordId"],
            source=p["source"],
            originalIdentifier=p["originalIdentifier"],
            createdAt=_ts_from_iso(p["createdAt"]),
            modifiedAt=_ts_from_iso(p["modifiedAt"]),
            dataSteward=p["dataSteward"],
            ingestFormat=SourceFormat(p["ingestFormat"]),
        ),
        social=SocialBlock(
            keywords=tuple(s.get("keywords", [])),
            viewCount=s.get("viewCount", 0),
            qualityScore=s.get("qualityScore", 0.0),
        ),
        raw=RawBlock(
            payload=r["payload"],
            encoding=RawEncoding(r.get("encoding", "XML")),
            mediaType=r.get("mediaType", "application/xml"),
        ),
    )


def _creators_names(record):
    return tuple(c.name for c in record.descriptive.creators)


def _identifier_values(record):
    return tuple(i.value for i in record.descriptive.identifiers)


# Flattened record schema: dotted path -> accessor returning a JSON-ish value
# (None, str, int, float, or tuple of str).  This is the closed field-path
# vocabulary for filter expressions.
FLATTENED_FIELDS: dict = {
    "descriptive.title": lambda rec: rec.descriptive.title,
    "descriptive.creators": _creators_names,
    "descriptive.publisher": lambda rec: rec.descriptive.publisher,
    "descriptive.publicationYear": lambda rec: rec.descriptive.publicationYear,
    "descriptive.resourceType": lambda rec: (
        rec.descriptive.resourceType.value if rec.descriptive.resourceType else None
    ),
    "descriptive.identifiers": _identifier_values,
    "descriptive.description": lambda rec: rec.descriptive.description,
    "descriptive.subjects": lambda rec: rec.descriptive.subjects,
    "descriptive.language": lambda rec: rec.descriptive.language,
    "descriptive.rights": lambda rec: rec.descriptive.rights,
    "descriptive.license": lambda rec: rec.descriptive.license,
    "technical.location": lambda rec: rec.technical.location,
    "technical.format": lambda rec: rec.technical.format,
    "technical.size": lambda rec: rec.technical.size,
    "technical.checksum.algorithm": lambda rec: (
        rec.technical.checksum.algorithm if rec.technical.checksum else None
    ),
    "technical.checksum.digest": lambda rec: (
        rec.technical.checksum.digest if rec.technical.checksum else None
    ),
    "processual.recordId": lambda rec: rec.processual.recordId,
    "processual.source": lambda rec: rec.processual.source,
    "processual.originalIdentifier": lambda rec: rec.processual.originalIdentifier,
    "processual.createdAt": lambda rec: _ts_to_iso(rec.processual.createdAt),
    "processual.modifiedAt": lambda rec: _ts_to_iso(rec.processual.modifiedAt),
    "processual.dataSteward": lambda rec: rec.processual.dataSteward,
    "processual.ingestFormat": lambda rec: rec.processual.ingestFormat.value,
    "social.keywords": lambda rec: rec.social.keywords,
    "social.viewCount": lambda rec: rec.social.viewCount,
    "social.qualityScore": lambda rec: rec.social.qualityScore,
    "raw.payload": lambda rec: rec.raw.payload,
    "raw.encoding": lambda rec: rec.raw.encoding.value,
    "raw.mediaType": lambda rec: rec.raw.mediaType,
}
