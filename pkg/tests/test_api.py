"""HTTP API: envelopes, search modes, commands, self-description."""

import time

import jsonschema
import pytest
from fastapi.testclient import TestClient

from metalake.api import create_app
from metalake.api.schemas import SCHEMAS
from metalake.ingest import JobRegistry, SourceRegistry, TransportSettings
from metalake.model import RelationEdge, RelationLabel
from metalake.store import Store
from metalake.testing import OaiSimulator, SimRecord
from metalake.testing.simulators import oai_payload_dc
from helpers import generate_corpus

JSONAPI = "application/vnd.api+json"
FAST = TransportSettings(timeout=5.0, retries=1, backoff=0.0)


@pytest.fixture()
def oai_sim():
    records = [
        SimRecord("oai:sim:%d" % n, oai_payload_dc("Record %d" % n))
        for n in range(25)
    ]
    sim = OaiSimulator(records, page_size=10)
    yield sim
    sim.close()


@pytest.fixture()
def stack(oai_sim):
    store = Store()
    for record in generate_corpus(40, seed=11):
        store.upsert_record(record)
    ids = store.record_ids()
    store.add_edge(RelationEdge(ids[0], RelationLabel.IsPartOf, ids[1]))
    sources = SourceRegistry()
    jobs = JobRegistry(store, settings=FAST)
    app = create_app(store, sources, jobs)
    with TestClient(app) as client:
        yield client, store, sources, oai_sim


def check_envelope(client, response):
    """Validate a response against the schema its describedby link names."""
    body = response.json()
    assert response.headers["content-type"].startswith(JSONAPI)
    assert ("data" in body) != ("errors" in body)
    schema_ref = body["links"]["describedby"]
    schema = client.get(schema_ref).json()
    jsonschema.validate(body, schema)
    return body


class TestReady:
    def test_ok_after_startup(self, stack):
        client, *_ = stack
        response = client.get("/api/v1/ready")
        assert response.status_code == 200
        body = check_envelope(client, response)
        assert body["data"]["attributes"]["status"] == "ok"

    def test_503_before_startup(self):
        app = create_app(Store())
        client = TestClient(app)  # no lifespan: startup never ran
        response = client.get("/api/v1/ready")
        assert response.status_code == 503


class TestMetadataEndpoint:
    def test_full_record_with_relationships(self, stack):
        client, store, *_ = stack
        ids = store.record_ids()
        response = client.get("/api/v1/metadata/%s" % ids[0])
        assert response.status_code == 200
        body = check_envelope(client, response)
        attrs = body["data"]["attributes"]
        assert attrs["raw"]["payload"] == store.get_record(ids[0]).raw.payload
        related = body["data"]["relationships"]["related"]
        assert related == [
            {
                "label": "IsPartOf",
                "category": "grouping",
                "direction": "out",
                "id": ids[1],
            }
        ]

    def test_view_count_increments_per_fetch(self, stack):
        client, store, *_ = stack
        rid = store.record_ids()[5]
        first = client.get("/api/v1/metadata/%s" % rid).json()
        second = client.get("/api/v1/metadata/%s" % rid).json()
        assert first["data"]["attributes"]["social"]["viewCount"] == 0
        assert second["data"]["attributes"]["social"]["viewCount"] == 1

    def test_malformed_id_400(self, stack):
        client, *_ = stack
        response = client.get("/api/v1/metadata/abc")
        assert response.status_code == 400
        check_envelope(client, response)

    def test_unknown_id_404(self, stack):
        client, *_ = stack
        response = client.get("/api/v1/metadata/AAAAAAAAAAA")
        assert response.status_code == 404
        check_envelope(client, response)


class TestSearchEndpoint:
    def test_fulltext_delegates_to_store(self, stack):
        client, store, *_ = stack
        response = client.get("/api/v1/search", params={"q": "data"})
        assert response.status_code == 200
        body = check_envelope(client, response)
        expected = store.fulltext_scores("data")
        assert body["meta"]["total"] == len(expected)
        assert [hit["id"] for hit in body["data"]] == [
            rid for rid, _ in expected[:20]
        ]

    def test_facet_filters_match_store(self, stack):
        client, store, *_ = stack
        response = client.get(
            "/api/v1/search",
            params={"filter[language]": "en", "filter[resourceType]": "Dataset"},
        )
        body = check_envelope(client, response)
        expected = store.facet_match_ids(
            {"language": "en", "resourceType": "Dataset"}
        )
        assert body["meta"]["total"] == len(expected)
        assert [hit["id"] for hit in body["data"]] == expected[:20]
        assert body["meta"]["facetCounts"] == store.facet_counts(expected)

    def test_filter_query_mode(self, stack):
        client, store, *_ = stack
        expr = 'descriptive.publicationYear >= 2000 AND descriptive.language = "en"'
        response = client.get("/api/v1/search", params={"query": expr})
        body = check_envelope(client, response)
        assert [hit["id"] for hit in body["data"]] == store.filter_match_ids(expr)[:20]

    def test_fulltext_intersects_with_filters(self, stack):
        client, store, *_ = stack
        response = client.get(
            "/api/v1/search", params={"q": "data", "filter[language]": "en"}
        )
        body = check_envelope(client, response)
        in_order = [rid for rid, _ in store.fulltext_scores("data")]
        filtered = set(store.facet_match_ids({"language": "en"}))
        expected = [rid for rid in in_order if rid in filtered]
        assert [hit["id"] for hit in body["data"]] == expected[:20]
        assert body["meta"]["total"] == len(expected)

    def test_errors(self, stack):
        client, *_ = stack
        assert client.get("/api/v1/search").status_code == 400
        assert (
            client.get("/api/v1/search", params={"q": "x", "query": "x"}).status_code
            == 400
        )
        response = client.get("/api/v1/search", params={"filter[badfield]": "x"})
        assert response.status_code == 400
        check_envelope(client, response)

    def test_filter_syntax_error_carries_position(self, stack):
        client, *_ = stack
        response = client.get(
            "/api/v1/search", params={"query": 'descriptive.title = '}
        )
        assert response.status_code == 400
        body = check_envelope(client, response)
        assert body["errors"][0]["meta"]["position"] == 20


class TestSourceCommands:
    def _source_body(self, sim_url):
        return {
            "location": sim_url,
            "protocol": "OAI-PMH",
            "format": "DublinCore",
            "dataSteward": "jane",
        }

    def test_register_valid_source(self, stack):
        client, _, _, sim = stack
        response = client.post("/api/v1/sources", json=self._source_body(sim.url))
        assert response.status_code == 201
        body = check_envelope(client, response)
        assert body["data"]["attributes"]["dataSteward"] == "jane"

    def test_missing_steward_422_names_field(self, stack):
        client, _, _, sim = stack
        body = self._source_body(sim.url)
        del body["dataSteward"]
        response = client.post("/api/v1/sources", json=body)
        assert response.status_code == 422
        payload = check_envelope(client, response)
        assert any(
            error.get("source", {}).get("pointer") == "/dataSteward"
            for error in payload["errors"]
        )

    def test_duplicate_source_409(self, stack):
        client, _, _, sim = stack
        body = self._source_body(sim.url)
        assert client.post("/api/v1/sources", json=body).status_code == 201
        response = client.post("/api/v1/sources", json=body)
        assert response.status_code == 409
        check_envelope(client, response)

    def test_non_json_body_rejected(self, stack):
        client, *_ = stack
        response = client.post(
            "/api/v1/sources",
            content=b"<source/>",
            headers={"content-type": "application/xml"},
        )
        assert response.status_code == 415
        check_envelope(client, response)

    def test_secrets_not_echoed(self, stack):
        client, _, _, sim = stack
        body = self._source_body(sim.url)
        body["location"] = sim.url + "/other"
        body["credentials"] = {"username": "ak", "password": "supersecret"}
        response = client.post("/api/v1/sources", json=body)
        assert response.status_code == 201
        assert "supersecret" not in response.text
        listing = client.get("/api/v1/sources")
        assert "supersecret" not in listing.text
        check_envelope(client, listing)


class TestIngestCommands:
    def _register(self, client, sim):
        body = {
            "location": sim.url,
            "protocol": "OAI-PMH",
            "format": "DublinCore",
            "dataSteward": "jane",
        }
        response = client.post("/api/v1/sources", json=body)
        assert response.status_code == 201
        return response.json()["data"]["id"]

    def _poll(self, client, job_id, deadline=15.0):
        waited = 0.0
        while waited < deadline:
            body = client.get("/api/v1/ingest/%s" % job_id).json()
            state = body["data"]["attributes"]["state"]
            if state in ("done", "failed"):
                return body
            time.sleep(0.05)
            waited += 0.05
        raise AssertionError("job did not finish")

    def test_trigger_poll_done(self, stack):
        client, store, _, sim = stack
        ref = self._register(client, sim)
        response = client.post("/api/v1/ingest", json={"sourceRef": ref})
        assert response.status_code == 202
        body = check_envelope(client, response)
        job_id = body["data"]["id"]
        final = self._poll(client, job_id)
        counts = final["data"]["attributes"]["counts"]
        assert (counts["seen"], counts["loaded"], counts["skipped"], counts["failed"]) == (25, 25, 0, 0)
        assert store.stats()["recordCount"] == 40 + 25

    def test_unknown_source_404(self, stack):
        client, *_ = stack
        response = client.post("/api/v1/ingest", json={"sourceRef": "nope"})
        assert response.status_code == 404
        check_envelope(client, response)

    def test_unknown_job_404(self, stack):
        client, *_ = stack
        response = client.get("/api/v1/ingest/job-doesnotexist")
        assert response.status_code == 404
        check_envelope(client, response)

    def test_conflict_while_running(self, oai_sim):
        # a slow simulator keeps the first job busy
        real = oai_sim.respond

        def slow(path, query):
            time.sleep(0.3)
            return real(path, query)

        oai_sim.respond = slow
        store = Store()
        sources = SourceRegistry()
        jobs = JobRegistry(store, settings=FAST)
        app = create_app(store, sources, jobs)
        with TestClient(app) as client:
            body = {
                "location": oai_sim.url,
                "protocol": "OAI-PMH",
                "format": "DublinCore",
                "dataSteward": "jane",
            }
            ref = client.post("/api/v1/sources", json=body).json()["data"]["id"]
            first = client.post("/api/v1/ingest", json={"sourceRef": ref})
            assert first.status_code == 202
            second = client.post("/api/v1/ingest", json={"sourceRef": ref})
            assert second.status_code == 409
            check_envelope(client, second)
            job_id = first.json()["data"]["id"]
            waited = 0.0
            while waited < 20:
                state = client.get("/api/v1/ingest/%s" % job_id).json()["data"]["attributes"]["state"]
                if state in ("done", "failed"):
                    break
                time.sleep(0.1)
                waited += 0.1
            assert state == "done"


class TestCors:
    def test_gets_are_cross_origin_readable(self, stack):
        client, *_ = stack
        response = client.get(
            "/api/v1/stats", headers={"origin": "http://elsewhere.example"}
        )
        assert response.headers.get("access-control-allow-origin") == "*"


class TestStats:
    def test_stats_envelope(self, stack):
        client, store, *_ = stack
        response = client.get("/api/v1/stats")
        body = check_envelope(client, response)
        attrs = body["data"]["attributes"]
        assert attrs == store.stats()
        assert sum(attrs["perSourceCounts"].values()) == attrs["recordCount"]


class TestSelfDescription:
    def test_schema_list_includes_metadata_record(self, stack):
        client, *_ = stack
        response = client.get("/api/v1/schemas")
        body = check_envelope(client, response)
        names = [item["id"] for item in body["data"]]
        assert "metadata-record" in names
        assert sorted(names) == sorted(SCHEMAS)

    def test_unknown_schema_404(self, stack):
        client, *_ = stack
        assert client.get("/api/v1/schemas/nope").status_code == 404

    def test_every_endpoint_response_validates(self, stack):
        client, store, _, sim = stack
        rid = store.record_ids()[0]
        ref = client.post(
            "/api/v1/sources",
            json={
                "location": sim.url,
                "protocol": "OAI-PMH",
                "format": "DublinCore",
                "dataSteward": "jane",
            },
        ).json()["data"]["id"]
        job = client.post("/api/v1/ingest", json={"sourceRef": ref}).json()
        job_id = job["data"]["id"]
        probes = [
            client.get("/api/v1/ready"),
            client.get("/api/v1/metadata/%s" % rid),
            client.get("/api/v1/metadata/abc"),
            client.get("/api/v1/metadata/AAAAAAAAAAA"),
            client.get("/api/v1/search", params={"q": "data"}),
            client.get("/api/v1/search", params={"filter[language]": "en"}),
            client.get("/api/v1/search", params={"query": 'descriptive.language = "en"'}),
            client.get("/api/v1/search"),
            client.get("/api/v1/sources"),
            client.get("/api/v1/stats"),
            client.get("/api/v1/schemas"),
            client.get("/api/v1/ingest/%s" % job_id),
            client.get("/api/v1/ingest/missing-job"),
            client.post("/api/v1/sources", json={"location": "x"}),
        ]
        for response in probes:
            check_envelope(client, response)

    def test_openapi_lists_every_route(self, stack):
        client, *_ = stack
        document = client.get("/api/v1/openapi").json()
        from fastapi.routing import APIRoute

        app = client.app
        implemented = {
            route.path for route in app.routes if isinstance(route, APIRoute)
        }
        assert set(document["paths"]) == implemented

    def test_request_schemas_served(self, stack):
        client, *_ = stack
        for name in ("source-request", "ingest-request"):
            response = client.get("/api/v1/schemas/%s" % name)
            assert response.status_code == 200
            assert response.headers["content-type"].startswith("application/json")


def _strip_volatile(value):
    """Remove view counters and timestamps so replays compare equal."""
    volatile = {"viewCount", "createdAt", "modifiedAt", "startedAt", "finishedAt"}
    if isinstance(value, dict):
        return {
            k: _strip_volatile(v) for k, v in value.items() if k not in volatile
        }
    if isinstance(value, list):
        return [_strip_volatile(v) for v in value]
    return value


class TestStatelessness:
    def test_replay_against_restarted_server(self, tmp_path):
        store = Store(tmp_path / "lake")
        for record in generate_corpus(15, seed=21):
            store.upsert_record(record)
        rid = store.record_ids()[0]
        sequence = [
            ("/api/v1/search", {"q": "data"}),
            ("/api/v1/search", {"filter[language]": "en"}),
            ("/api/v1/search", {"query": "descriptive.publicationYear >= 1900"}),
            ("/api/v1/metadata/%s" % rid, None),
            ("/api/v1/stats", None),
            ("/api/v1/schemas", None),
        ]

        def replay(client):
            responses = []
            for path, params in sequence:
                response = client.get(path, params=params)
                responses.append((response.status_code, _strip_volatile(response.json())))
            return responses

        with TestClient(create_app(store)) as client:
            first = replay(client)
        store.close()

        reopened = Store(tmp_path / "lake")
        with TestClient(create_app(reopened)) as client:
            second = replay(client)
        reopened.close()
        assert second == first


class TestAuth:
    def test_token_guards_commands_only(self, oai_sim):
        store = Store()
        app = create_app(store, SourceRegistry(), JobRegistry(store), token="sesame")
        with TestClient(app) as client:
            assert client.get("/api/v1/stats").status_code == 200
            body = {
                "location": oai_sim.url,
                "protocol": "OAI-PMH",
                "format": "DublinCore",
                "dataSteward": "jane",
            }
            denied = client.post("/api/v1/sources", json=body)
            assert denied.status_code == 401
            allowed = client.post(
                "/api/v1/sources",
                json=body,
                headers={"authorization": "Bearer sesame"},
            )
            assert allowed.status_code == 201
