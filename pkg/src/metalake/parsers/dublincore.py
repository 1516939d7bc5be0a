"""Dublin Core (oai_dc) crosswalk.

Container root is oai_dc:dc; the fifteen-element vocabulary lives in the
plain dc namespace.  Scheme of dc:identifier values is sniffed from the
value itself; dc:relation maps only when prefixed "ispartof:".
"""

from __future__ import annotations

from ..model import (
    Creator,
    DescriptiveBlock,
    Identifier,
    RelationLabel,
    TechnicalBlock,
    map_resource_type,
    nfc,
    sniff_identifier_scheme,
)
from .fields import EmbeddedRelation, ParsedFields, extract_year

DC_NS = "http://purl.org/dc/elements/1.1/"

_RELATION_PREFIX = "ispartof:"


def _texts(root, name):
    out = []
    for el in root.iter("{%s}%s" % (DC_NS, name)):
        if el.text and el.text.strip():
            out.append(nfc(el.text.strip()))
    return out


def _first(root, name):
    values = _texts(root, name)
    return values[0] if values else None


def parse(root) -> ParsedFields:
    year = None
    for candidate in _texts(root, "date"):
        year = extract_year(candidate)
        if year is not None:
            break

    type_text = _first(root, "type")

    identifiers = tuple(
        Identifier(sniff_identifier_scheme(v), v) for v in _texts(root, "identifier")
    )

    relations = []
    for value in _texts(root, "relation"):
        if value.startswith(_RELATION_PREFIX):
            target = value[len(_RELATION_PREFIX):].strip()
            if target:
                relations.append(
                    EmbeddedRelation(
                        sniff_identifier_scheme(target), target, RelationLabel.IsPartOf
                    )
                )

    descriptive = DescriptiveBlock(
        title=_first(root, "title"),
        creators=tuple(Creator(name) for name in _texts(root, "creator")),
        publisher=_first(root, "publisher"),
        publicationYear=year,
        resourceType=map_resource_type(type_text),
        identifiers=identifiers,
        description=_first(root, "description"),
        subjects=tuple(_texts(root, "subject")),
        language=_first(root, "language"),
        rights=_first(root, "rights"),
    )
    technical = TechnicalBlock(format=_first(root, "format"))
    return ParsedFields(descriptive, technical, tuple(relations))
