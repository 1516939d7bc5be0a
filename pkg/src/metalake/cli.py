"""Service binary: serve the API, run one ingest, or export a record.

The configuration path comes from --config or the METALAKE_CONFIG
environment variable; without either, a built-in default (ephemeral
store, no sources) is used for serve.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .api import create_app
from .api.schemas import schema_url
from .errors import MetalakeError
from .ingest import JobRegistry, ServiceConfig, SourceRegistry, load_config, run_pipeline
from .model import record_to_dict
from .store import Store

CONFIG_ENV_VAR = "METALAKE_CONFIG"


def _resolve_config(path) -> ServiceConfig:
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if path:
        return load_config(path)
    return ServiceConfig()


def _open_store(config: ServiceConfig) -> Store:
    return Store(config.data_dir) if config.data_dir else Store()


def cmd_serve(args) -> int:
    import uvicorn

    config = _resolve_config(args.config)
    store = _open_store(config)
    sources = SourceRegistry(config.sources)
    jobs = JobRegistry(store)
    app = create_app(
        store, sources, jobs, token=config.token, static_dir=args.static_dir
    )
    host = args.host or config.host
    port = args.port or config.port
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    finally:
        store.close()
    return 0


def cmd_ingest(args) -> int:
    config = _resolve_config(args.config)
    store = _open_store(config)
    sources = SourceRegistry(config.sources)
    try:
        source = sources.get(args.source)
        job = run_pipeline(source, store, since=args.since)
    finally:
        store.close()
    summary = {
        "jobId": job.jobId,
        "source": source.ref,
        "state": job.state,
        "counts": {
            "seen": job.counts.seen,
            "loaded": job.counts.loaded,
            "skipped": job.counts.skipped,
            "failed": job.counts.failed,
        },
        "edgesCreated": job.edgesCreated,
        "errors": job.errors,
    }
    json.dump(summary, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0 if job.state == "done" else 1


def cmd_export(args) -> int:
    config = _resolve_config(args.config)
    store = _open_store(config)
    try:
        record = store.get_record(args.id)
        if record is None:
            sys.stderr.write("no such record: %s\n" % args.id)
            return 1
        related = []
        for edge, _other in store.neighbors(args.id, "both"):
            direction = "out" if edge.src == args.id else "in"
            related.append(
                {
                    "label": edge.label.value,
                    "category": edge.category.value,
                    "direction": direction,
                    "id": edge.dst if direction == "out" else edge.src,
                }
            )
    finally:
        store.close()
    document = {
        "data": {
            "type": "metadata-record",
            "id": args.id,
            "attributes": record_to_dict(record),
            "relationships": {"related": related},
        },
        "links": {
            "self": "/api/v1/metadata/%s" % args.id,
            "describedby": schema_url("metadata-record"),
        },
    }
    json.dump(document, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metalake", description="metadata-lake service"
    )
    parser.add_argument("--config", help="path to the service configuration file")
    commands = parser.add_subparsers(dest="command", required=True)

    serve = commands.add_parser("serve", help="run the HTTP API server")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--static-dir", default=None, help="serve a web UI from here")
    serve.set_defaults(func=cmd_serve)

    ingest = commands.add_parser("ingest", help="run one ingest pipeline and exit")
    ingest.add_argument("--source", required=True, help="source ref or location")
    ingest.add_argument("--since", default=None, help="ISO date for incremental harvest")
    ingest.set_defaults(func=cmd_ingest)

    export = commands.add_parser("export", help="print one record as JSON")
    export.add_argument("--id", required=True, help="11-character record id")
    export.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "ingest" and args.since:
        from datetime import date

        args.since = date.fromisoformat(args.since)
    try:
        return args.func(args)
    except MetalakeError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
