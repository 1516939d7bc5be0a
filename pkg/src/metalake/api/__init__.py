"""Presentation tier: the JSON-only HTTP API."""

from .app import create_app
from .schemas import SCHEMAS, schema_url

__all__ = ["create_app", "SCHEMAS", "schema_url"]
