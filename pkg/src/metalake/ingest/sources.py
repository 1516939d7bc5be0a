"""Source descriptions and the runtime source registry.

A source is the quadruple (location, protocol, encoding, format) plus the
mandatory data steward and optional credentials.  Sources are referenced
everywhere by "<location>#<format-lowercase>", matching the uniqueness key
(location, format); the bare location works when unambiguous.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional
from urllib.parse import urlparse

import yaml

from ..errors import Conflict, InvalidInput, NotFound
from ..model import RawEncoding, SourceFormat


class Protocol(Enum):
    OAIPMH = "OAI-PMH"
    GET = "GET"
    S3 = "S3"


_PROTOCOL_ALIASES = {"OAI-PMH": Protocol.OAIPMH, "OAIPMH": Protocol.OAIPMH}

DEFAULT_OAI_PREFIX = {
    SourceFormat.DublinCore: "oai_dc",
    SourceFormat.DataCite: "datacite",
    SourceFormat.MODS: "mods",
    SourceFormat.MARC: "marcxml",
    SourceFormat.LIDO: "lido",
}


@dataclass(frozen=True)
class Credentials:
    username: str
    password: str = field(repr=False, default="")


@dataclass(frozen=True)
class SourceConfig:
    location: str
    protocol: Protocol
    format: SourceFormat
    dataSteward: str
    encoding: RawEncoding = RawEncoding.XML
    credentials: Optional[Credentials] = None
    oaiSet: Optional[str] = None
    oaiMetadataPrefix: Optional[str] = None

    @property
    def metadata_prefix(self) -> str:
        return self.oaiMetadataPrefix or DEFAULT_OAI_PREFIX[self.format]

    @property
    def ref(self) -> str:
        return "%s#%s" % (self.location, self.format.value.lower())

    def problems(self) -> list:
        """Field-level validation issues as (field, message) pairs."""
        issues = []
        parsed = urlparse(self.location)
        if not parsed.scheme or not parsed.netloc:
            issues.append(("location", "must be an absolute URL"))
        if not self.dataSteward:
            issues.append(("dataSteward", "a data steward must be named"))
        return issues


def source_from_dict(data: dict) -> SourceConfig:
    """Build a SourceConfig from config-file / API field names.

    Raises InvalidInput carrying (field, message) pairs in .args[1] when
    required fields are missing or enum values are unknown.
    """
    issues = []

    location = data.get("location")
    if not isinstance(location, str) or not location:
        issues.append(("location", "required"))
        location = ""

    protocol = None
    raw_protocol = data.get("protocol")
    if isinstance(raw_protocol, str):
        protocol = _PROTOCOL_ALIASES.get(raw_protocol.upper())
        if protocol is None:
            try:
                protocol = Protocol(raw_protocol)
            except ValueError:
                pass
    if protocol is None:
        issues.append(("protocol", "one of OAI-PMH, GET, S3"))

    fmt = None
    raw_format = data.get("format")
    if isinstance(raw_format, str):
        try:
            fmt = SourceFormat(raw_format)
        except ValueError:
            pass
    if fmt is None:
        issues.append(("format", "one of %s" % ", ".join(f.value for f in SourceFormat)))

    encoding = RawEncoding.XML
    raw_encoding = data.get("encoding", "XML")
    try:
        encoding = RawEncoding(raw_encoding)
    except ValueError:
        issues.append(("encoding", "only XML is supported"))

    steward = data.get("dataSteward")
    if not isinstance(steward, str) or not steward:
        issues.append(("dataSteward", "a data steward must be named"))
        steward = ""

    credentials = None
    raw_credentials = data.get("credentials")
    if raw_credentials is not None:
        if isinstance(raw_credentials, dict):
            username = raw_credentials.get("username") or raw_credentials.get("accessKey")
            password = raw_credentials.get("password") or raw_credentials.get("secretKey")
            if username and password:
                credentials = Credentials(username, password)
            else:
                issues.append(("credentials", "need username/accessKey and password/secretKey"))
        else:
            issues.append(("credentials", "must be an object"))

    if issues:
        raise InvalidInput("invalid source configuration", issues)

    source = SourceConfig(
        location=location,
        protocol=protocol,
        format=fmt,
        dataSteward=steward,
        encoding=encoding,
        credentials=credentials,
        oaiSet=data.get("oaiSet"),
        oaiMetadataPrefix=data.get("oaiMetadataPrefix"),
    )
    issues = source.problems()
    if issues:
        raise InvalidInput("invalid source configuration", issues)
    return source


def source_to_dict(source: SourceConfig) -> dict:
    """Public view of a source; secrets are never echoed."""
    return {
        "ref": source.ref,
        "location": source.location,
        "protocol": source.protocol.value,
        "encoding": source.encoding.value,
        "format": source.format.value,
        "dataSteward": source.dataSteward,
        "hasCredentials": source.credentials is not None,
        "oaiSet": source.oaiSet,
        "oaiMetadataPrefix": source.metadata_prefix,
    }


class SourceRegistry:
    """Runtime source list: seeded from the config file, extensible via API."""

    def __init__(self, sources=()):
        self._lock = threading.Lock()
        self._sources: dict[str, SourceConfig] = {}
        for source in sources:
            self.add(source)

    def add(self, source: SourceConfig) -> SourceConfig:
        with self._lock:
            if source.ref in self._sources:
                raise Conflict("source already registered: %s" % source.ref)
            self._sources[source.ref] = source
            return source

    def get(self, ref: str) -> SourceConfig:
        with self._lock:
            if ref in self._sources:
                return self._sources[ref]
            # bare location accepted when it maps to exactly one source
            matches = [s for s in self._sources.values() if s.location == ref]
            if len(matches) == 1:
                return matches[0]
            if len(matches) > 1:
                raise Conflict(
                    "location matches several sources; use <location>#<format>"
                )
            raise NotFound("unknown source: %s" % ref)

    def list(self) -> list:
        with self._lock:
            return [self._sources[ref] for ref in sorted(self._sources)]


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8343
    data_dir: Optional[str] = None
    token: Optional[str] = None
    sources: list = field(default_factory=list)


def load_config(path) -> ServiceConfig:
    """Read the service configuration document (YAML; JSON is valid YAML)."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise InvalidInput("configuration root must be a mapping")
    sources = [source_from_dict(entry) for entry in raw.get("sources", [])]
    return ServiceConfig(
        host=raw.get("host", "127.0.0.1"),
        port=int(raw.get("port", 8343)),
        data_dir=raw.get("data_dir"),
        token=raw.get("token"),
        sources=sources,
    )
