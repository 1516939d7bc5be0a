"""Record extraction over OAI-PMH, plain GET, and anonymous S3.

Payloads are sliced out of the wire bytes (never re-serialized) so the
stored raw metadata stays byte-identical to what the source sent.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, Optional
from urllib.parse import quote, urlparse

import requests

from ..errors import ProtocolFailure, TransportFailure
from ..parsers import NAMESPACES
from ..xmlutil import element_byte_spans, namespace_of, parse_xml, text_of
from .sources import SourceConfig

OAI_NS = "http://www.openarchives.org/OAI/2.0/"


@dataclass
class HarvestedRecord:
    original_identifier: str
    payload: str
    datestamp: Optional[str] = None
    deleted: bool = False
    error: Optional[str] = None


@dataclass(frozen=True)
class TransportSettings:
    """3 retries with 1s/2s/4s backoff, 30s per request, like any polite harvester."""

    timeout: float = 30.0
    retries: int = 3
    backoff: float = 1.0


DEFAULT_TRANSPORT = TransportSettings()


def http_get(url, params=None, settings: TransportSettings = DEFAULT_TRANSPORT,
             session=None) -> requests.Response:
    """GET with retries on connection errors and 5xx responses.

    Returns the 2xx response; anything else becomes TransportFailure.
    """
    client = session or requests
    last_error = None
    for attempt in range(settings.retries + 1):
        if attempt:
            time.sleep(settings.backoff * 2 ** (attempt - 1))
        try:
            response = client.get(url, params=params, timeout=settings.timeout)
        except requests.RequestException as exc:
            last_error = "connection failed: %s" % exc
            continue
        if 200 <= response.status_code < 300:
            return response
        last_error = "HTTP %d from %s" % (response.status_code, response.url)
        if response.status_code < 500:
            break
    raise TransportFailure(last_error)


def _oai(name):
    return "{%s}%s" % (OAI_NS, name)


def check_oaipmh_connectivity(
    source: SourceConfig, settings: TransportSettings = DEFAULT_TRANSPORT
) -> str:
    """Issue Identify against the source; returns the repository name.

    Raises TransportFailure/ProtocolFailure like the harvest itself would."""
    response = http_get(source.location, params={"verb": "Identify"}, settings=settings)
    root = parse_xml(response.content)
    error = root.find(_oai("error"))
    if error is not None:
        raise ProtocolFailure(
            "OAI-PMH error %s" % error.get("code", ""), code=error.get("code")
        )
    return text_of(root.find(".//%s" % _oai("repositoryName"))) or ""


class _FirstMetadataChild:
    """Span selector: the first child element of each record's metadata."""

    def __init__(self):
        self.armed = False

    def __call__(self, path):
        if len(path) >= 2 and path[-1] == (OAI_NS, "metadata") and path[-2][1] == "record":
            self.armed = True
            return False
        if self.armed and len(path) >= 2 and path[-2] == (OAI_NS, "metadata"):
            self.armed = False
            return True
        return False


def harvest_oaipmh(
    source: SourceConfig,
    since=None,
    settings: TransportSettings = DEFAULT_TRANSPORT,
    on_cursor=None,
) -> Iterator[HarvestedRecord]:
    """ListRecords stream, following resumption tokens until exhaustion.

    Deleted records are yielded with an empty payload.  `noRecordsMatch`
    is an empty stream, not an error; other OAI error codes raise
    ProtocolFailure.  on_cursor (when given) receives each resumption
    token as paging proceeds.
    """
    session = requests.Session()
    params = {"verb": "ListRecords", "metadataPrefix": source.metadata_prefix}
    if since is not None:
        params["from"] = since.isoformat()[:10]
    if source.oaiSet:
        params["set"] = source.oaiSet

    while True:
        response = http_get(source.location, params=params, settings=settings,
                            session=session)
        data = response.content
        root = parse_xml(data)

        error = root.find(_oai("error"))
        if error is not None:
            code = error.get("code", "")
            if code == "noRecordsMatch":
                return
            raise ProtocolFailure(
                "OAI-PMH error %s: %s" % (code, text_of(error) or ""), code=code
            )

        spans = iter(element_byte_spans(data, _FirstMetadataChild()))
        for record_el in root.iter(_oai("record")):
            header = record_el.find(_oai("header"))
            if header is None:
                continue
            identifier = text_of(header.find(_oai("identifier"))) or ""
            datestamp = text_of(header.find(_oai("datestamp")))
            deleted = header.get("status") == "deleted"
            metadata = record_el.find(_oai("metadata"))
            payload = ""
            if metadata is not None and len(metadata) > 0:
                start, end = next(spans)
                if not deleted:
                    payload = data[start:end].decode("utf-8")
            yield HarvestedRecord(identifier, payload, datestamp, deleted=deleted)

        token_el = root.find(".//%s" % _oai("resumptionToken"))
        token = text_of(token_el)
        if not token:
            return
        if on_cursor is not None:
            on_cursor(token)
        params = {"verb": "ListRecords", "resumptionToken": token}


def fetch_get(
    source: SourceConfig, settings: TransportSettings = DEFAULT_TRANSPORT
) -> Iterator[HarvestedRecord]:
    """One GET of the source location.

    A body whose root is in the declared format's namespace is one record;
    otherwise each direct child in that namespace is a record, identified
    as location#<1-based index>.
    """
    response = http_get(source.location, settings=settings)
    data = response.content
    root = parse_xml(data)
    format_ns = NAMESPACES[source.format]
    if namespace_of(root) == format_ns:
        yield HarvestedRecord(source.location, data.decode("utf-8"))
        return
    spans = element_byte_spans(
        data, lambda path: len(path) == 2 and path[-1][0] == format_ns
    )
    for index, (start, end) in enumerate(spans, 1):
        yield HarvestedRecord(
            "%s#%d" % (source.location, index), data[start:end].decode("utf-8")
        )


def _parse_s3_location(location: str):
    parsed = urlparse(location)
    parts = [p for p in parsed.path.split("/") if p]
    if not parts:
        raise TransportFailure("S3 location must name a bucket: %s" % location)
    endpoint = "%s://%s" % (parsed.scheme, parsed.netloc)
    return endpoint, parts[0], "/".join(parts[1:])


def fetch_s3(
    source: SourceConfig, settings: TransportSettings = DEFAULT_TRANSPORT
) -> Iterator[HarvestedRecord]:
    """ListObjectsV2 over path-style URLs (anonymous), then GET per .xml key.

    Listing failures abort; a failed object GET yields a record carrying
    the error so the pipeline can count it without aborting the run.
    """
    endpoint, bucket, prefix = _parse_s3_location(source.location)
    session = requests.Session()
    list_url = "%s/%s" % (endpoint, bucket)

    keys = []
    token = None
    while True:
        params = {"list-type": "2"}
        if prefix:
            params["prefix"] = prefix
        if token:
            params["continuation-token"] = token
        response = http_get(list_url, params=params, settings=settings, session=session)
        root = parse_xml(response.content)
        ns = namespace_of(root)

        def q(name):
            return "{%s}%s" % (ns, name) if ns else name

        for contents in root.iter(q("Contents")):
            key = text_of(contents.find(q("Key")))
            if key:
                keys.append(key)
        truncated = (text_of(root.find(q("IsTruncated"))) or "").lower() == "true"
        token = text_of(root.find(q("NextContinuationToken")))
        if not truncated or not token:
            break

    for key in keys:
        if not key.endswith(".xml"):
            continue
        object_url = "%s/%s/%s" % (endpoint, bucket, quote(key, safe="/"))
        try:
            response = http_get(object_url, settings=settings, session=session)
        except TransportFailure as exc:
            yield HarvestedRecord(key, "", error=str(exc))
            continue
        yield HarvestedRecord(key, response.content.decode("utf-8"))
