"""Output value types shared by all crosswalks."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..model import DescriptiveBlock, IdentifierScheme, RelationLabel, TechnicalBlock

_YEAR_RE = re.compile(r"\d{4}")


@dataclass(frozen=True)
class EmbeddedRelation:
    """A relation the payload declares, keyed by the target's public identifier."""

    scheme: IdentifierScheme
    value: str
    label: RelationLabel


@dataclass(frozen=True)
class ParsedFields:
    descriptive: DescriptiveBlock = field(default_factory=DescriptiveBlock)
    technical: TechnicalBlock = field(default_factory=TechnicalBlock)
    embedded_relations: tuple[EmbeddedRelation, ...] = ()


def extract_year(value: Optional[str]) -> Optional[int]:
    """First run of four consecutive digits; date fields are free text."""
    if not value:
        return None
    match = _YEAR_RE.search(value)
    return int(match.group(0)) if match else None
