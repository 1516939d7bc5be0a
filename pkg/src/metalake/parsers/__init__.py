"""Format crosswalks: partial transformation of source XML into the unified schema.

Each supported format maps onto a partially populated descriptive + technical
block pair plus any relations the payload declares toward other records.
Anything a crosswalk cannot map is left empty and survives only in the raw
payload; crosswalks never guess and never mutate their input.
"""

from __future__ import annotations

from ..errors import FormatMismatch
from ..model import SourceFormat
from ..xmlutil import namespace_of, parse_xml
from . import datacite, dublincore, lido, marcxml, mods
from .fields import EmbeddedRelation, ParsedFields

__all__ = [
    "EmbeddedRelation",
    "ParsedFields",
    "SourceFormat",
    "NAMESPACES",
    "crosswalk",
    "detect_namespace",
]


# Canonical root namespace per format; also used to sanity-check payloads
# against the declared source format.
NAMESPACES = {
    SourceFormat.DublinCore: "http://www.openarchives.org/OAI/2.0/oai_dc/",
    SourceFormat.DataCite: "http://datacite.org/schema/kernel-4",
    SourceFormat.MODS: "http://www.loc.gov/mods/v3",
    SourceFormat.MARC: "http://www.loc.gov/MARC21/slim",
    SourceFormat.LIDO: "http://www.lido-schema.org",
}

_FORMAT_BY_NAMESPACE = {ns: fmt for fmt, ns in NAMESPACES.items()}

_PARSERS = {
    SourceFormat.DublinCore: dublincore.parse,
    SourceFormat.DataCite: datacite.parse,
    SourceFormat.MODS: mods.parse,
    SourceFormat.MARC: marcxml.parse,
    SourceFormat.LIDO: lido.parse,
}


def crosswalk(format: SourceFormat, xml: str) -> ParsedFields:
    """Map one payload of the declared format onto ParsedFields.

    Raises ParseFailure on malformed XML and FormatMismatch when the root
    namespace is not the declared format's.  Well-formed documents of the
    right namespace never fail, however sparse: missing elements simply
    leave fields empty.
    """
    root = parse_xml(xml)
    ns = namespace_of(root)
    if ns != NAMESPACES[format]:
        raise FormatMismatch(
            "expected %s root namespace %r, found %r" % (format.value, NAMESPACES[format], ns)
        )
    return _PARSERS[format](root)


def detect_namespace(xml: str):
    """Format whose canonical namespace matches the document root, or None."""
    root = parse_xml(xml)
    return _FORMAT_BY_NAMESPACE.get(namespace_of(root))
