"""Hardened XML parsing for payloads harvested from untrusted remotes.

Two rules, enforced before any tree is built: no document type declarations
(so no DTD fetches and no entity definitions beyond the five predefined),
and no external entity references.  A separate expat pass exposes byte-exact
subtree spans so raw payloads can be stored verbatim, never re-serialized.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
import xml.parsers.expat as expat
from typing import Callable, Optional

from .errors import ParseFailure


def _prescan(data: bytes) -> None:
    parser = expat.ParserCreate()

    def forbid_doctype(*args):
        raise ParseFailure(
            "document type declarations are not allowed",
            parser.CurrentLineNumber,
            parser.CurrentColumnNumber,
        )

    parser.StartDoctypeDeclHandler = forbid_doctype
    parser.EntityDeclHandler = forbid_doctype
    parser.ExternalEntityRefHandler = lambda *args: 0
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise ParseFailure(
            expat.errors.messages[exc.code], exc.lineno, exc.offset + 1
        ) from None


def parse_xml(text) -> ET.Element:
    """Parse untrusted XML into an Element tree.

    Raises ParseFailure (with 1-based line/column) on malformed input,
    DOCTYPE declarations, or entity definitions.
    """
    data = text.encode("utf-8") if isinstance(text, str) else text
    _prescan(data)
    return ET.fromstring(data)


def namespace_of(element: ET.Element) -> str:
    tag = element.tag
    if tag.startswith("{"):
        return tag[1:].split("}", 1)[0]
    return ""


def local_name(tag: str) -> str:
    return tag.split("}", 1)[1] if tag.startswith("{") else tag


def text_of(element: Optional[ET.Element]) -> Optional[str]:
    """Direct text content, whitespace-trimmed; None when absent or blank."""
    if element is None or element.text is None:
        return None
    stripped = element.text.strip()
    return stripped or None


def _scan_tag_end(data: bytes, index: int) -> int:
    """Index just past the '>' closing the tag starting at `index` ('<').

    Quote-aware: '>' inside attribute values is legal and must be skipped.
    """
    quote = None
    i = index
    while i < len(data):
        c = data[i : i + 1]
        if quote is not None:
            if c == quote:
                quote = None
        elif c in (b'"', b"'"):
            quote = c
        elif c == b">":
            return i + 1
        i += 1
    raise ParseFailure("unterminated tag")


def element_byte_spans(
    data: bytes, select: Callable[[tuple], bool]
) -> list[tuple[int, int]]:
    """Byte spans [start, end) of elements chosen by `select`.

    `select` is called at each element start with the path as a tuple of
    (namespace, localname) pairs, root first; it may keep its own state.
    Once an element is selected, its descendants are not offered.  Spans
    cover the element's full serialized form, byte-identical to the input.
    """
    parser = expat.ParserCreate(namespace_separator=" ")
    spans: list[tuple[int, int]] = []
    path: list[tuple[str, str]] = []
    selected_depth: Optional[int] = None
    selected_start = 0

    def split(name: str) -> tuple[str, str]:
        if " " in name:
            ns, local = name.split(" ", 1)
            return ns, local
        return "", name

    def on_start(name, attrs):
        nonlocal selected_depth, selected_start
        path.append(split(name))
        if selected_depth is None and select(tuple(path)):
            selected_depth = len(path)
            selected_start = parser.CurrentByteIndex

    def on_end(name):
        nonlocal selected_depth
        if selected_depth is not None and len(path) == selected_depth:
            start_tag_end = _scan_tag_end(data, selected_start)
            if data[start_tag_end - 2 : start_tag_end] == b"/>":
                end = start_tag_end
            else:
                end = _scan_tag_end(data, parser.CurrentByteIndex)
            spans.append((selected_start, end))
            selected_depth = None
        path.pop()

    parser.StartElementHandler = on_start
    parser.EndElementHandler = on_end
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise ParseFailure(
            expat.errors.messages[exc.code], exc.lineno, exc.offset + 1
        ) from None
    return spans
