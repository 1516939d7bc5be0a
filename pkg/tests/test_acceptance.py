"""Acceptance suite: one test per criterion, each printing a pass/fail line
(see conftest).  Tolerances and runtime budgets are pinned here, nowhere else.
"""

import json
import os
import random
import signal
import string
import subprocess
import sys
import time
from datetime import date
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

from metalake.api import create_app
from metalake.cli import main as cli_main
from metalake.ingest import (
    JobRegistry,
    Protocol,
    SourceConfig,
    SourceRegistry,
    TransportSettings,
    run_pipeline,
)
from metalake.model import (
    RelationLabel,
    ResourceType,
    SourceFormat,
    compute_record_id,
    is_valid_record_id,
    record_to_dict,
)
from metalake.store import Store
from metalake.testing import GetSimulator, OaiSimulator, S3Simulator, SimRecord
from metalake.testing.simulators import oai_payload_dc, s3_location
from helpers import datacite_payload, generate_corpus
from oracles import facet_scan_oracle, fulltext_oracle, record_id_oracle

FIXTURES = Path(__file__).parent / "fixtures"
FAST = TransportSettings(timeout=10.0, retries=1, backoff=0.0)

FORMAT_DIRS = {
    SourceFormat.DublinCore: "dublincore",
    SourceFormat.DataCite: "datacite",
    SourceFormat.MODS: "mods",
    SourceFormat.MARC: "marcxml",
    SourceFormat.LIDO: "lido",
}


def _client(store, sources=None, jobs=None):
    app = create_app(
        store,
        sources if sources is not None else SourceRegistry(),
        jobs if jobs is not None else JobRegistry(store, settings=FAST),
    )
    return TestClient(app)


# -- criterion: record-id contract -------------------------------------------


def test_record_id_contract_10k_oracle_bitexact_under_5s():
    rng = random.Random(20260809)
    alphabet = string.ascii_letters + string.digits + ":/._-"

    def rand_text(min_len, max_len):
        return "".join(
            rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len))
        )

    pairs = [(rand_text(0, 60), rand_text(1, 60)) for _ in range(10_000)]
    started = time.perf_counter()
    first_pass = []
    for source, ident in pairs:
        rid = compute_record_id(source, ident)
        assert len(rid) == 11 and is_valid_record_id(rid)
        assert rid == record_id_oracle(source, ident)
        first_pass.append(rid)
    second_pass = [compute_record_id(s, i) for s, i in pairs]
    assert second_pass == first_pass
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, "record-id criterion took %.2fs" % elapsed


# -- criterion: crosswalk golden files + raw fidelity through the API --------


def test_crosswalk_golden_files_and_raw_fidelity_via_api():
    from test_parsers import parsed_to_dict
    from metalake.parsers import crosswalk

    store = Store()
    bodies = {}
    expected_payloads = {}
    fixture_count = 0
    for fmt, dirname in FORMAT_DIRS.items():
        for xml_path in sorted((FIXTURES / dirname).glob("*.xml")):
            fixture_count += 1
            xml = xml_path.read_text("utf-8")
            expected = json.loads(
                xml_path.with_suffix("").with_suffix(".expected.json").read_text("utf-8")
            )
            assert parsed_to_dict(crosswalk(fmt, xml)) == expected, xml_path
            bodies["/%s/%s" % (dirname, xml_path.name)] = (
                200,
                "application/xml",
                xml_path.read_bytes(),
            )
    assert fixture_count == 15

    sim = GetSimulator(bodies)
    try:
        for fmt, dirname in FORMAT_DIRS.items():
            for xml_path in sorted((FIXTURES / dirname).glob("*.xml")):
                location = "%s/%s/%s" % (sim.url, dirname, xml_path.name)
                source = SourceConfig(
                    location=location, protocol=Protocol.GET, format=fmt,
                    dataSteward="jane",
                )
                job = run_pipeline(source, store, settings=FAST)
                assert job.state == "done" and job.counts.loaded == 1, xml_path
                expected_payloads[compute_record_id(location, location)] = (
                    xml_path.read_bytes()
                )
    finally:
        sim.close()

    with _client(store) as client:
        for rid, file_bytes in expected_payloads.items():
            response = client.get("/api/v1/metadata/%s" % rid)
            assert response.status_code == 200
            payload = response.json()["data"]["attributes"]["raw"]["payload"]
            assert payload.encode("utf-8") == file_bytes


# -- criterion: EtLT pipeline on the OAI-PMH simulator ------------------------


def test_etlt_pipeline_25_records_3_requests_idempotent_under_10s():
    records = [
        SimRecord("oai:sim:%d" % n, oai_payload_dc("Record %d" % n))
        for n in range(25)
    ]
    sim = OaiSimulator(records, page_size=10)
    started = time.perf_counter()
    try:
        store = Store()
        source = SourceConfig(
            location=sim.url, protocol=Protocol.OAIPMH,
            format=SourceFormat.DublinCore, dataSteward="jane",
        )
        job = run_pipeline(source, store, settings=FAST)
        assert job.state == "done"
        assert job.counts.as_tuple() == (25, 25, 0, 0)
        assert len(sim.list_records_requests()) == 3  # 2 resumption tokens

        stats_before = store.stats()
        rerun = run_pipeline(source, store, settings=FAST)
        assert rerun.state == "done"
        assert store.stats() == stats_before
    finally:
        sim.close()
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, "EtLT criterion took %.2fs" % elapsed


# -- criterion: search oracle equivalence on a 1,000-record corpus ------------


def test_search_oracles_on_1000_record_corpus_under_60s():
    started = time.perf_counter()
    store = Store()
    for record in generate_corpus(1000, seed=424242):
        store.upsert_record(record)
    assert len(store) == 1000
    dicts = {rid: record_to_dict(store.get_record(rid)) for rid in store.record_ids()}

    # facets: exact match with the linear-scan oracle
    for filters in (
        {},
        {"language": "en"},
        {"language": "de", "resourceType": "Dataset"},
        {"dataSteward": "omar"},
        {"ingestFormat": "DataCite", "source": "https://alpha.example/oai"},
        {"publicationYear": "1999"},
    ):
        expected_ids, expected_counts = facet_scan_oracle(dicts, filters)
        total, ids, counts = store.search_facets(filters, page_size=100)
        assert total == len(expected_ids)
        assert ids == expected_ids[:100]
        assert counts == expected_counts

    # filter queries: exact match with hand-written predicates
    filter_cases = [
        (
            'descriptive.publicationYear >= 2000 AND descriptive.language = "en"',
            lambda rec: rec["descriptive"]["publicationYear"] is not None
            and rec["descriptive"]["publicationYear"] >= 2000
            and rec["descriptive"]["language"] == "en",
        ),
        (
            'descriptive.resourceType = "Dataset" OR descriptive.resourceType = "Text"',
            lambda rec: rec["descriptive"]["resourceType"] in ("Dataset", "Text"),
        ),
        (
            'NOT descriptive.title ~ "data"',
            lambda rec: "data" not in rec["descriptive"]["title"].lower(),
        ),
        (
            'descriptive.subjects = "climate" AND NOT descriptive.publisher = "Press A"',
            lambda rec: "climate" in rec["descriptive"]["subjects"]
            and rec["descriptive"]["publisher"] != "Press A",
        ),
    ]
    for expr, predicate in filter_cases:
        expected = [rid for rid in sorted(dicts) if predicate(dicts[rid])]
        assert store.filter_match_ids(expr) == expected, expr

    # full-text: scores within 1e-9 of the brute-force tf-idf oracle
    for query in ("data", "climate survey", "archive census", "glacier"):
        expected = fulltext_oracle(dicts, query)
        got = store.fulltext_scores(query)
        assert [rid for rid, _ in got] == [rid for rid, _ in expected], query
        for (_, score), (_, want) in zip(got, expected):
            assert score == pytest.approx(want, abs=1e-9)

    # pagination laws at the pinned page sizes
    full_ids = store.facet_match_ids({})
    full_hits = store.fulltext_scores("data")
    for page_size in (1, 7, 20, 100):
        collected = []
        page = 1
        while True:
            total, ids, _ = store.search_facets({}, page=page, page_size=page_size)
            assert total == len(full_ids)
            if not ids:
                break
            collected.extend(ids)
            page += 1
        assert collected == full_ids
        assert len(set(collected)) == len(collected)

        collected_hits = []
        page = 1
        while True:
            total, hits = store.search_fulltext("data", page=page, page_size=page_size)
            assert total == len(full_hits)
            if not hits:
                break
            collected_hits.extend(hits)
            page += 1
        assert collected_hits == full_hits

    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, "search criterion took %.2fs" % elapsed


# -- criterion: link generation including the deferred case -------------------


def test_link_generation_chain_with_deferred_edge():
    store = Store()

    def ingest(payloads, tag):
        sim = OaiSimulator(
            [SimRecord("oai:%s:%d" % (tag, n), p) for n, p in enumerate(payloads)]
        )
        try:
            source = SourceConfig(
                location=sim.url, protocol=Protocol.OAIPMH,
                format=SourceFormat.DataCite, dataSteward="jane",
            )
            job = run_pipeline(source, store, settings=FAST)
        finally:
            sim.close()
        assert job.state == "done"
        return job

    first = ingest(
        [
            datacite_payload("10.5/a", "A", related=[("IsPartOf", "10.5/b")]),
            datacite_payload(
                "10.5/b", "B", related=[("IsDerivedFrom", "10.5/c")]
            ),
        ],
        "one",
    )
    by_doi = {
        doi: next(iter(store.find_by_identifier("DOI", doi)))
        for doi in ("10.5/a", "10.5/b")
    }
    edges_now = {(e.src, e.label, e.dst) for e in store.edges()}
    assert first.edgesCreated == 1
    assert edges_now == {(by_doi["10.5/a"], RelationLabel.IsPartOf, by_doi["10.5/b"])}

    second = ingest([datacite_payload("10.5/c", "C")], "two")
    assert second.edgesCreated == 1
    by_doi["10.5/c"] = next(iter(store.find_by_identifier("DOI", "10.5/c")))
    edges_after = {(e.src, e.label, e.dst) for e in store.edges()}
    assert edges_after == {
        (by_doi["10.5/a"], RelationLabel.IsPartOf, by_doi["10.5/b"]),
        (by_doi["10.5/b"], RelationLabel.IsDerivedFrom, by_doi["10.5/c"]),
    }


# -- criterion: API self-description walk -------------------------------------


def test_api_self_description_walk_and_openapi_route_census():
    store = Store()
    for record in generate_corpus(10, seed=2):
        store.upsert_record(record)
    rid = store.record_ids()[0]
    sim = OaiSimulator([SimRecord("oai:w:1", oai_payload_dc("Walk"))])
    try:
        with _client(store) as client:
            ref = client.post(
                "/api/v1/sources",
                json={
                    "location": sim.url,
                    "protocol": "OAI-PMH",
                    "format": "DublinCore",
                    "dataSteward": "jane",
                },
            ).json()["data"]["id"]
            job_id = client.post(
                "/api/v1/ingest", json={"sourceRef": ref}
            ).json()["data"]["id"]
            probes = [
                client.get("/api/v1/ready"),
                client.get("/api/v1/metadata/%s" % rid),
                client.get("/api/v1/metadata/bad"),
                client.get("/api/v1/metadata/AAAAAAAAAAA"),
                client.get("/api/v1/search", params={"q": "data"}),
                client.get("/api/v1/search", params={"filter[language]": "en"}),
                client.get(
                    "/api/v1/search",
                    params={"query": 'descriptive.publicationYear >= 1900'},
                ),
                client.get("/api/v1/search"),
                client.get("/api/v1/sources"),
                client.get("/api/v1/stats"),
                client.get("/api/v1/schemas"),
                client.get("/api/v1/ingest/%s" % job_id),
                client.get("/api/v1/ingest/nope"),
                client.post("/api/v1/sources", json={}),
                client.post("/api/v1/ingest", json={"sourceRef": "nope"}),
            ]
            for response in probes:
                body = response.json()
                assert ("data" in body) != ("errors" in body)
                schema = client.get(body["links"]["describedby"])
                assert schema.status_code == 200
                jsonschema.validate(body, schema.json())

            document = client.get("/api/v1/openapi").json()
            from fastapi.routing import APIRoute

            implemented = {
                route.path
                for route in client.app.routes
                if isinstance(route, APIRoute)
            }
            assert set(document["paths"]) == implemented
    finally:
        sim.close()


# -- criterion: Table-1 feature suite, one test per claimed Yes ---------------


def _loaded_store_and_ids():
    store = Store()
    sim = OaiSimulator(
        [
            SimRecord(
                "oai:t:1",
                oai_payload_dc(
                    "Tabular climate data",
                    extra="<dc:type>Dataset</dc:type><dc:subject>climate</dc:subject>",
                ),
            )
        ]
    )
    try:
        source = SourceConfig(
            location=sim.url, protocol=Protocol.OAIPMH,
            format=SourceFormat.DublinCore, dataSteward="jane",
        )
        job = run_pipeline(source, store, settings=FAST)
    finally:
        sim.close()
    assert job.counts.loaded == 1
    return store, store.record_ids()[0], job


def test_table1_semantic_enrichment_resource_type_categorized():
    store, rid, _ = _loaded_store_and_ids()
    assert store.get_record(rid).descriptive.resourceType is ResourceType.Dataset


def test_table1_data_indexing_fulltext_hit():
    store, rid, _ = _loaded_store_and_ids()
    total, hits = store.search_fulltext("climate")
    assert total == 1 and hits[0][0] == rid


def test_table1_link_generation_edge_from_identifiers():
    store = Store()
    sim = OaiSimulator(
        [
            SimRecord("oai:l:1", datacite_payload("10.6/p", "Parent")),
            SimRecord(
                "oai:l:2", datacite_payload("10.6/c", "Child", related=[("IsPartOf", "10.6/p")])
            ),
        ]
    )
    try:
        source = SourceConfig(
            location=sim.url, protocol=Protocol.OAIPMH,
            format=SourceFormat.DataCite, dataSteward="jane",
        )
        job = run_pipeline(source, store, settings=FAST)
    finally:
        sim.close()
    assert job.edgesCreated == 1
    assert store.edge_count() == 1


def test_table1_data_polymorphism_raw_and_refined_retrievable():
    store, rid, _ = _loaded_store_and_ids()
    with _client(store) as client:
        attrs = client.get("/api/v1/metadata/%s" % rid).json()["data"]["attributes"]
    assert attrs["descriptive"]["title"] == "Tabular climate data"  # refined
    assert attrs["raw"]["payload"].startswith("<oai_dc:dc")  # raw


def test_table1_usage_tracking_view_count_increments():
    store, rid, _ = _loaded_store_and_ids()
    with _client(store) as client:
        first = client.get("/api/v1/metadata/%s" % rid).json()
        second = client.get("/api/v1/metadata/%s" % rid).json()
    assert first["data"]["attributes"]["social"]["viewCount"] == 0
    assert second["data"]["attributes"]["social"]["viewCount"] == 1


def test_table1_metadata_flexibility_sparse_record_loads():
    store = Store()
    bare = '<oai_dc:dc xmlns:oai_dc="http://www.openarchives.org/OAI/2.0/oai_dc/"/>'
    sim = OaiSimulator([SimRecord("oai:f:sparse", bare)])
    try:
        source = SourceConfig(
            location=sim.url, protocol=Protocol.OAIPMH,
            format=SourceFormat.DublinCore, dataSteward="jane",
        )
        job = run_pipeline(source, store, settings=FAST)
    finally:
        sim.close()
    assert job.counts.as_tuple() == (1, 1, 0, 0)
    record = store.get_record(store.record_ids()[0])
    assert record.raw.payload == bare
    assert record.social.qualityScore == 0.0


def test_table1_multiple_zones_raw_and_refined_coexist():
    store, rid, _ = _loaded_store_and_ids()
    record = store.get_record(rid)
    assert record.raw.payload  # raw zone: byte-exact payload
    assert record.descriptive.title and record.processual.recordId  # refined zone


def test_table1_metadata_interoperability_json_export(tmp_path, capsys):
    import yaml

    sim = OaiSimulator([SimRecord("oai:x:1", oai_payload_dc("Exported"))])
    try:
        config = {
            "data_dir": str(tmp_path / "lake"),
            "sources": [
                {
                    "location": sim.url,
                    "protocol": "OAI-PMH",
                    "format": "DublinCore",
                    "dataSteward": "jane",
                }
            ],
        }
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump(config), "utf-8")
        assert cli_main(["--config", str(path), "ingest", "--source", sim.url]) == 0
        capsys.readouterr()
        rid = compute_record_id(sim.url, "oai:x:1")
        assert cli_main(["--config", str(path), "export", "--id", rid]) == 0
    finally:
        sim.close()
    document = json.loads(capsys.readouterr().out)
    assert document["data"]["attributes"]["raw"]["payload"] == oai_payload_dc("Exported")


def test_table1_initial_automatic_labeling_is_final_pipeline_step():
    _, _, job = _loaded_store_and_ids()
    phases = [state for state, _ in job.phaseLog]
    assert phases.index("linking") == len(phases) - 2  # right before done
    assert phases[-1] == "done"
    assert phases.index("loading") < phases.index("linking")


# -- criterion: FAIR feature set ----------------------------------------------


def test_fair_findability_three_search_modes():
    store = Store()
    for record in generate_corpus(50, seed=31):
        store.upsert_record(record)
    with _client(store) as client:
        fulltext = client.get("/api/v1/search", params={"q": "data"})
        facets = client.get("/api/v1/search", params={"filter[language]": "en"})
        query = client.get(
            "/api/v1/search", params={"query": "descriptive.publicationYear >= 1900"}
        )
    for response in (fulltext, facets, query):
        assert response.status_code == 200
        assert "data" in response.json()


def test_fair_accessibility_standard_selfexplaining_documented():
    store = Store()
    with _client(store) as client:
        response = client.get("/api/v1/stats")
        body = response.json()
        # A1: standard envelope shape
        assert response.headers["content-type"].startswith("application/vnd.api+json")
        assert "data" in body and "links" in body
        # A2: self-explaining via resolvable describedby schema
        schema = client.get(body["links"]["describedby"])
        assert schema.status_code == 200
        jsonschema.validate(body, schema.json())
        # A3: documented via the served OpenAPI document
        openapi = client.get("/api/v1/openapi")
        assert openapi.status_code == 200
        assert openapi.json()["openapi"].startswith("3.")


def _fixture_docs(fmt):
    dirname = FORMAT_DIRS[fmt]
    return [
        path.read_text("utf-8").strip()
        for path in sorted((FIXTURES / dirname).glob("*.xml"))[:2]
    ]


def test_fair_interoperability_protocol_format_matrix():
    outcomes = {}
    for fmt in SourceFormat:
        docs = _fixture_docs(fmt)

        oai = OaiSimulator(
            [SimRecord("oai:m:%d" % n, doc) for n, doc in enumerate(docs)]
        )
        try:
            job = run_pipeline(
                SourceConfig(location=oai.url, protocol=Protocol.OAIPMH,
                             format=fmt, dataSteward="jane"),
                Store(), settings=FAST,
            )
            outcomes[("OAI-PMH", fmt.value)] = job.counts.as_tuple()
        finally:
            oai.close()

        body = ("<batch>%s</batch>" % "".join(docs)).encode("utf-8")
        get = GetSimulator({"/batch.xml": (200, "application/xml", body)})
        try:
            job = run_pipeline(
                SourceConfig(location=get.url + "/batch.xml", protocol=Protocol.GET,
                             format=fmt, dataSteward="jane"),
                Store(), settings=FAST,
            )
            outcomes[("GET", fmt.value)] = job.counts.as_tuple()
        finally:
            get.close()

        s3 = S3Simulator(
            "lake", {"a.xml": docs[0].encode("utf-8"), "b.xml": docs[1].encode("utf-8")}
        )
        try:
            job = run_pipeline(
                SourceConfig(location=s3_location(s3), protocol=Protocol.S3,
                             format=fmt, dataSteward="jane"),
                Store(), settings=FAST,
            )
            outcomes[("S3", fmt.value)] = job.counts.as_tuple()
        finally:
            s3.close()

    assert len(outcomes) == 15
    for combo, counts in outcomes.items():
        assert counts == (2, 2, 0, 0), combo


def test_fair_reusability_repo_lint():
    script = Path(__file__).parent.parent / "scripts" / "repo_lint.py"
    result = subprocess.run(
        [sys.executable, str(script)], capture_output=True, text=True
    )
    assert result.returncode == 0, result.stdout + result.stderr


# -- criterion: durability across a hard kill ---------------------------------


def test_durability_ingest_100_records_kill_reopen_identical(tmp_path):
    from _durability_child import digest

    records = []
    for i in range(100):
        related = [("IsPartOf", "10.8/%d" % (i - 1))] if i else []
        records.append(
            SimRecord(
                "oai:d:%d" % i,
                datacite_payload("10.8/%d" % i, "durability record %d" % i, related),
            )
        )
    sim = OaiSimulator(records, page_size=40)
    data_dir = tmp_path / "lake"
    child_script = Path(__file__).parent / "_durability_child.py"
    try:
        child = subprocess.Popen(
            [sys.executable, str(child_script), str(data_dir), sim.url],
            stdout=subprocess.PIPE,
            text=True,
        )
        try:
            line = child.stdout.readline()
            assert line, "child produced no digest"
            reported = json.loads(line)
        finally:
            os.kill(child.pid, signal.SIGKILL)
            child.wait()
    finally:
        sim.close()

    assert reported["state"] == "done"
    assert tuple(reported["job"]) == (100, 100, 0, 0)
    assert reported["digest"]["stats"]["edgeCount"] == 99

    reopened = Store(data_dir)
    try:
        assert digest(reopened) == reported["digest"]
    finally:
        reopened.close()
