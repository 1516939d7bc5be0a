"""metalake: harvest, unify, store, and serve plain-text metadata records.

Records arrive as XML from OAI-PMH, HTTP GET, or S3 sources, are partially
crosswalked into one discipline-agnostic schema while keeping the raw
payload byte-exact, live in an embedded labeled graph with full-text and
facet indexes, and are served through a JSON-only HTTP API.
"""

__version__ = "0.1.0"
