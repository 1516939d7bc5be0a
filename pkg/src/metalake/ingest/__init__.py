"""Import half of the application tier: sources, harvesters, pipelines."""

from .sources import Credentials, Protocol, ServiceConfig, SourceConfig, SourceRegistry, load_config
from .harvest import (
    HarvestedRecord,
    TransportSettings,
    check_oaipmh_connectivity,
    fetch_get,
    fetch_s3,
    harvest_oaipmh,
)
from .pipeline import IngestJob, JobRegistry, link_records, run_pipeline

__all__ = [
    "Credentials",
    "Protocol",
    "ServiceConfig",
    "SourceConfig",
    "SourceRegistry",
    "load_config",
    "HarvestedRecord",
    "TransportSettings",
    "check_oaipmh_connectivity",
    "fetch_get",
    "fetch_s3",
    "harvest_oaipmh",
    "IngestJob",
    "JobRegistry",
    "link_records",
    "run_pipeline",
]
