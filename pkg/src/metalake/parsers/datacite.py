"""DataCite 4.5 kernel crosswalk.

The richest mapping: the unified schema is itself derived from this kernel,
so most elements carry over one-to-one.  relatedIdentifiers whose
relationType falls inside the edge vocabulary become embedded relations;
all other relation types are dropped.
"""

from __future__ import annotations

import re

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

NS = "http://datacite.org/schema/kernel-4"

_SIZE_RE = re.compile(r"^\s*(\d+)\s*(bytes)?\s*$", re.IGNORECASE)


def _q(name):
    return "{%s}%s" % (NS, name)


def _clean(el):
    value = text_of(el)
    return nfc(value) if value else None


def parse(root) -> ParsedFields:
    identifiers = []
    for el in root.findall(_q("identifier")):
        value = _clean(el)
        if value:
            identifiers.append(
                Identifier(map_identifier_scheme(el.get("identifierType")), value)
            )

    title = None
    titles = root.find(_q("titles"))
    if titles is not None:
        for el in titles.findall(_q("title")):
            title = _clean(el)
            if title:
                break

    creators = []
    creators_el = root.find(_q("creators"))
    if creators_el is not None:
        for creator in creators_el.findall(_q("creator")):
            name = _clean(creator.find(_q("creatorName")))
            if name:
                creators.append(
                    Creator(name, _clean(creator.find(_q("nameIdentifier"))))
                )

    resource_type = None
    rt = root.find(_q("resourceType"))
    if rt is not None:
        resource_type = map_resource_type(rt.get("resourceTypeGeneral"))

    description = None
    descriptions = root.find(_q("descriptions"))
    if descriptions is not None:
        for el in descriptions.findall(_q("description")):
            description = _clean(el)
            if description:
                break

    subjects = []
    subjects_el = root.find(_q("subjects"))
    if subjects_el is not None:
        for el in subjects_el.findall(_q("subject")):
            value = _clean(el)
            if value:
                subjects.append(value)

    rights = None
    license_id = None
    rights_list = root.find(_q("rightsList"))
    if rights_list is not None:
        first = rights_list.find(_q("rights"))
        if first is not None:
            rights = _clean(first)
            license_id = first.get("rightsIdentifier")

    size = None
    sizes = root.find(_q("sizes"))
    if sizes is not None:
        first = sizes.find(_q("size"))
        if first is not None and first.text:
            match = _SIZE_RE.match(first.text)
            if match:
                size = int(match.group(1))

    media_format = None
    formats = root.find(_q("formats"))
    if formats is not None:
        media_format = _clean(formats.find(_q("format")))

    relations = []
    related = root.find(_q("relatedIdentifiers"))
    if related is not None:
        for el in related.findall(_q("relatedIdentifier")):
            value = _clean(el)
            relation_type = el.get("relationType")
            if not value or relation_type not in RelationLabel.__members__:
                continue
            relations.append(
                EmbeddedRelation(
                    map_identifier_scheme(el.get("relatedIdentifierType")),
                    value,
                    RelationLabel[relation_type],
                )
            )

    descriptive = DescriptiveBlock(
        title=title,
        creators=tuple(creators),
        publisher=_clean(root.find(_q("publisher"))),
        publicationYear=extract_year(text_of(root.find(_q("publicationYear")))),
        resourceType=resource_type,
        identifiers=tuple(identifiers),
        description=description,
        subjects=tuple(subjects),
        language=_clean(root.find(_q("language"))),
        rights=rights,
        license=license_id,
    )
    technical = TechnicalBlock(format=media_format, size=size)
    return ParsedFields(descriptive, technical, tuple(relations))
