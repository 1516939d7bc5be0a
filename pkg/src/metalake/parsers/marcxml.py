"""MARCXML (slim) crosswalk.

Field/subfield selections:
  245 $a [+ " " + $b]   title           100/700 $a   creators
  260/264 $b            publisher       008 [7:11]   publicationYear
  520 $a                description     650 $a       subjects
  041 $a                language        020/022 $a   ISBN/ISSN identifiers
  856 $u                location        leader[6]    resourceType
  773 $w                IsPartOf embedded relation
"""

from __future__ import annotations

from ..model import (
    Creator,
    DescriptiveBlock,
    Identifier,
    IdentifierScheme,
    RelationLabel,
    ResourceType,
    TechnicalBlock,
    nfc,
)
from ..xmlutil import text_of
from .fields import EmbeddedRelation, ParsedFields

NS = "http://www.loc.gov/MARC21/slim"

_LEADER_TYPES = {
    "a": ResourceType.Text,
    "e": ResourceType.Image,
    "g": ResourceType.Audiovisual,
}


def _q(name):
    return "{%s}%s" % (NS, name)


def _clean(el):
    value = text_of(el)
    return nfc(value) if value else None


def _subfields(datafield, code):
    out = []
    for sf in datafield.findall(_q("subfield")):
        if sf.get("code") == code:
            value = _clean(sf)
            if value:
                out.append(value)
    return out


def parse(root) -> ParsedFields:
    # A GET body may hand us a whole collection; take its first record.
    if root.tag == _q("collection"):
        record = root.find(_q("record"))
        if record is None:
            return ParsedFields()
        root = record

    fields: dict[str, list] = {}
    for df in root.findall(_q("datafield")):
        fields.setdefault(df.get("tag") or "", []).append(df)

    def first_subfield(tag, code):
        for df in fields.get(tag, []):
            values = _subfields(df, code)
            if values:
                return values[0]
        return None

    def all_subfields(tag, code):
        out = []
        for df in fields.get(tag, []):
            out.extend(_subfields(df, code))
        return out

    title = None
    for df in fields.get("245", []):
        a = _subfields(df, "a")
        b = _subfields(df, "b")
        if a:
            title = a[0] + (" " + b[0] if b else "")
        elif b:
            title = b[0]
        if title:
            break

    creators = [Creator(name) for name in all_subfields("100", "a")]
    creators += [Creator(name) for name in all_subfields("700", "a")]

    publisher = first_subfield("260", "b") or first_subfield("264", "b")

    year = None
    for cf in root.findall(_q("controlfield")):
        if cf.get("tag") == "008" and cf.text:
            digits = cf.text[7:11]
            if len(digits) == 4 and digits.isdigit():
                year = int(digits)
            break

    resource_type = None
    leader = root.find(_q("leader"))
    if leader is not None and leader.text and len(leader.text) > 6:
        resource_type = _LEADER_TYPES.get(leader.text[6], ResourceType.Other)

    identifiers = [
        Identifier(IdentifierScheme.ISBN, v) for v in all_subfields("020", "a")
    ]
    identifiers += [
        Identifier(IdentifierScheme.ISSN, v) for v in all_subfields("022", "a")
    ]

    relations = [
        EmbeddedRelation(IdentifierScheme.other, v, RelationLabel.IsPartOf)
        for v in all_subfields("773", "w")
    ]

    descriptive = DescriptiveBlock(
        title=title,
        creators=tuple(creators),
        publisher=publisher,
        publicationYear=year,
        resourceType=resource_type,
        identifiers=tuple(identifiers),
        description=first_subfield("520", "a"),
        subjects=tuple(all_subfields("650", "a")),
        language=first_subfield("041", "a"),
    )
    technical = TechnicalBlock(location=first_subfield("856", "u"))
    return ParsedFields(descriptive, technical, tuple(relations))
