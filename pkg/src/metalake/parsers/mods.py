"""MODS crosswalk (titleInfo, name, originInfo, subject/topic, relatedItem host)."""

from __future__ import annotations

from ..model import (
    Creator,
    DescriptiveBlock,
    Identifier,
    RelationLabel,
    TechnicalBlock,
    map_identifier_scheme,
    map_resource_type,
    nfc,
)
from ..xmlutil import text_of
from .fields import EmbeddedRelation, ParsedFields, extract_year

NS = "http://www.loc.gov/mods/v3"


def _q(name):
    return "{%s}%s" % (NS, name)


def _clean(el):
    value = text_of(el)
    return nfc(value) if value else None


def parse(root) -> ParsedFields:
    title = None
    title_info = root.find(_q("titleInfo"))
    if title_info is not None:
        main = _clean(title_info.find(_q("title")))
        sub = _clean(title_info.find(_q("subTitle")))
        if main and sub:
            title = "%s: %s" % (main, sub)
        else:
            title = main or sub

    creators = []
    for name_el in root.findall(_q("name")):
        parts = [
            _clean(part) for part in name_el.findall(_q("namePart"))
        ]
        parts = [p for p in parts if p]
        if parts:
            creators.append(Creator(" ".join(parts)))

    publisher = None
    year = None
    for origin in root.findall(_q("originInfo")):
        if publisher is None:
            publisher = _clean(origin.find(_q("publisher")))
        if year is None:
            for issued in origin.findall(_q("dateIssued")):
                year = extract_year(text_of(issued))
                if year is not None:
                    break

    subjects = []
    for subject in root.findall(_q("subject")):
        for topic in subject.findall(_q("topic")):
            value = _clean(topic)
            if value:
                subjects.append(value)

    language = None
    lang_el = root.find(_q("language"))
    if lang_el is not None:
        language = _clean(lang_el.find(_q("languageTerm")))

    identifiers = []
    for el in root.findall(_q("identifier")):
        value = _clean(el)
        if value:
            identifiers.append(Identifier(map_identifier_scheme(el.get("type")), value))

    location_url = None
    location = root.find(_q("location"))
    if location is not None:
        location_url = _clean(location.find(_q("url")))

    relations = []
    for item in root.findall(_q("relatedItem")):
        if item.get("type") != "host":
            continue
        ident = item.find(_q("identifier"))
        value = _clean(ident)
        if value:
            relations.append(
                EmbeddedRelation(
                    map_identifier_scheme(ident.get("type")),
                    value,
                    RelationLabel.IsPartOf,
                )
            )

    descriptive = DescriptiveBlock(
        title=title,
        creators=tuple(creators),
        publisher=publisher,
        publicationYear=year,
        resourceType=map_resource_type(_clean(root.find(_q("typeOfResource")))),
        identifiers=tuple(identifiers),
        description=_clean(root.find(_q("abstract"))),
        subjects=tuple(subjects),
        language=language,
        rights=_clean(root.find(_q("accessCondition"))),
    )
    technical = TechnicalBlock(location=location_url)
    return ParsedFields(descriptive, technical, tuple(relations))
