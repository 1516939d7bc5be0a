"""Shared record factories for the test suite."""

from __future__ import annotations

from datetime import datetime, timezone

from metalake.model import (
    Checksum,
    Creator,
    DescriptiveBlock,
    Identifier,
    IdentifierScheme,
    MetadataRecord,
    ProcessualBlock,
    RawBlock,
    ResourceType,
    SocialBlock,
    SourceFormat,
    TechnicalBlock,
    compute_record_id,
)

TS = datetime(2026, 1, 15, 12, 0, 0, tzinfo=timezone.utc)


def make_record(
    source="https://example.org/oai",
    original_identifier="oai:example:1",
    title="Example record",
    steward="jane",
    fmt=SourceFormat.DublinCore,
    descriptive=None,
    technical=None,
    social=None,
    payload="<oai_dc:dc xmlns:oai_dc='http://www.openarchives.org/OAI/2.0/oai_dc/'/>",
    created=TS,
    modified=TS,
) -> MetadataRecord:
    rid = compute_record_id(source, original_identifier)
    return MetadataRecord(
        descriptive=descriptive or DescriptiveBlock(title=title),
        technical=technical or TechnicalBlock(),
        processual=ProcessualBlock(
            recordId=rid,
            source=source,
            originalIdentifier=original_identifier,
            createdAt=created,
            modifiedAt=modified,
            dataSteward=steward,
            ingestFormat=fmt,
        ),
        social=social or SocialBlock(),
        raw=RawBlock(payload=payload),
    )


def full_descriptive(title="Complete record") -> DescriptiveBlock:
    """All ten optional descriptive fields populated."""
    return DescriptiveBlock(
        title=title,
        creators=(Creator("Doe, Jane", "https://orcid.org/0000-0000-0000-0001"),),
        publisher="Example Press",
        publicationYear=2024,
        resourceType=ResourceType.Dataset,
        identifiers=(Identifier(IdentifierScheme.DOI, "10.1000/example"),),
        description="A record with everything filled in.",
        subjects=("testing",),
        language="en",
        rights="CC BY 4.0",
        license="CC-BY-4.0",
    )


def checksum_record(algorithm, digest):
    return make_record(
        original_identifier="oai:example:ck",
        technical=TechnicalBlock(checksum=Checksum(algorithm, digest)),
    )


def datacite_payload(identifier, title, related=()):
    """A DataCite document declaring optional relations, usable as a payload."""
    rels = "".join(
        '<relatedIdentifier relatedIdentifierType="DOI" relationType="%s">%s'
        "</relatedIdentifier>" % (label, value)
        for label, value in related
    )
    related_block = "<relatedIdentifiers>%s</relatedIdentifiers>" % rels if rels else ""
    return (
        '<resource xmlns="http://datacite.org/schema/kernel-4">'
        '<identifier identifierType="DOI">%s</identifier>'
        "<titles><title>%s</title></titles>%s</resource>"
        % (identifier, title, related_block)
    )


_WORDS = (
    "climate data model survey archive coastal sediment census manuscript "
    "herbarium spectra telescope glacier harvest index particle genome "
    "lexicon pottery votive treaty ballad almanac ledger atlas"
).split()

_LANGS = ("en", "de", "fr", "fi", None)
_TYPES = (
    ResourceType.Dataset,
    ResourceType.Text,
    ResourceType.Image,
    ResourceType.Software,
    None,
)
_SOURCES = (
    "https://alpha.example/oai",
    "https://beta.example/records",
    "https://gamma.example/s3",
)
_STEWARDS = ("jane", "omar", "liselotte")
_FORMATS = (SourceFormat.DublinCore, SourceFormat.DataCite, SourceFormat.MODS)


def generate_corpus(n, seed=1234):
    """Deterministic varied records for search-oracle comparisons."""
    import random

    rng = random.Random(seed)
    records = []
    for i in range(n):
        title_words = rng.sample(_WORDS, rng.randint(1, 4))
        source = rng.choice(_SOURCES)
        fmt = rng.choice(_FORMATS)
        descriptive = DescriptiveBlock(
            title=" ".join(title_words),
            creators=tuple(
                Creator("Creator %d" % rng.randint(1, 40))
                for _ in range(rng.randint(0, 2))
            ),
            publisher=rng.choice((None, "Press A", "Press B")),
            publicationYear=rng.choice((None, rng.randint(1900, 2026))),
            resourceType=rng.choice(_TYPES),
            identifiers=(
                Identifier(IdentifierScheme.DOI, "10.9999/corpus.%d" % i),
            ),
            description=rng.choice(
                (None, " ".join(rng.sample(_WORDS, rng.randint(2, 6))))
            ),
            subjects=tuple(rng.sample(_WORDS, rng.randint(0, 3))),
            language=rng.choice(_LANGS),
        )
        records.append(
            make_record(
                source=source,
                original_identifier="corpus:%d" % i,
                steward=rng.choice(_STEWARDS),
                fmt=fmt,
                descriptive=descriptive,
                social=SocialBlock(keywords=descriptive.subjects),
                payload="<c xmlns='urn:corpus'>%d</c>" % i,
            )
        )
    return records
