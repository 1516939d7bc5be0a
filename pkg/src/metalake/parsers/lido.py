"""LIDO crosswalk, deliberately minimal: title, record id, work type,
repository as publisher, subject terms, and the first linked resource."""

from __future__ import annotations

from ..model import (
    DescriptiveBlock,
    Identifier,
    IdentifierScheme,
    TechnicalBlock,
    map_resource_type,
    nfc,
)
from ..xmlutil import text_of
from .fields import ParsedFields

NS = "http://www.lido-schema.org"


def _q(name):
    return "{%s}%s" % (NS, name)


def _clean(el):
    value = text_of(el)
    return nfc(value) if value else None


def _first_descendant_text(scope, name):
    if scope is None:
        return None
    for el in scope.iter(_q(name)):
        value = _clean(el)
        if value:
            return value
    return None


def parse(root) -> ParsedFields:
    title = None
    for descriptive_md in root.iter(_q("descriptiveMetadata")):
        for title_set in descriptive_md.iter(_q("titleSet")):
            title = _clean(title_set.find(_q("appellationValue")))
            if title:
                break
        if title:
            break

    identifiers = []
    for wrap in root.iter(_q("recordWrap")):
        for record_id in wrap.findall(_q("recordID")):
            value = _clean(record_id)
            if value:
                identifiers.append(Identifier(IdentifierScheme.other, value))

    resource_type = None
    for work_type in root.iter(_q("objectWorkType")):
        term = _first_descendant_text(work_type, "term")
        if term:
            resource_type = map_resource_type(term)
            break

    publisher = None
    for wrap in root.iter(_q("repositoryWrap")):
        for body in wrap.iter(_q("legalBodyName")):
            publisher = _clean(body.find(_q("appellationValue"))) or _clean(body)
            if publisher:
                break
        if publisher:
            break

    subjects = []
    for wrap in root.iter(_q("subjectWrap")):
        for term in wrap.iter(_q("term")):
            value = _clean(term)
            if value:
                subjects.append(value)

    location = None
    for wrap in root.iter(_q("resourceWrap")):
        location = _first_descendant_text(wrap, "linkResource")
        if location:
            break

    descriptive = DescriptiveBlock(
        title=title,
        publisher=publisher,
        resourceType=resource_type,
        identifiers=tuple(identifiers),
        subjects=tuple(subjects),
    )
    return ParsedFields(descriptive, TechnicalBlock(location=location))
