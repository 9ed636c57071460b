import json
import subprocess
import sys

import pytest
from fastapi.testclient import TestClient

from palettekit.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


# ---------------------------------------------------------------------------
# Catalog endpoints
# ---------------------------------------------------------------------------

def test_get_colors(client, pool):
    res = client.get("/api/colors")
    assert res.status_code == 200
    colors = res.json()["colors"]
    assert len(colors) == 39
    assert colors[0]["id"] == 0
    assert colors[0]["hex"] == pool.by_id[0].hex
    assert {"id", "hex", "L", "a", "b", "name", "manual"} <= set(colors[0])
    assert sum(c["manual"] for c in colors) == 2


def test_get_shapes(client, shape_catalog):
    res = client.get("/api/shapes")
    assert res.status_code == 200
    shapes = res.json()["shapes"]
    assert len(shapes) == 39
    assert shapes[0]["path"] == shape_catalog.by_id[0].glyph
    assert {s["fill_class"] for s in shapes} == {"filled", "unfilled", "open"}


def test_get_matrix(client):
    res = client.get("/api/matrix", params={"axis": "color"})
    assert res.status_code == 200
    data = res.json()
    assert data["axis"] == "color"
    res = client.get("/api/matrix", params={"axis": "marker", "bin": "small"})
    assert res.status_code == 200
    assert res.json()["bin"] == "small"


def test_get_matrix_errors(client):
    res = client.get("/api/matrix", params={"axis": "bogus"})
    assert res.status_code == 400
    assert res.json()["error"]["code"] == "invalid_argument"
    assert res.json()["error"]["field"] == "axis"
    res = client.get("/api/matrix", params={"axis": "color", "bin": "huge"})
    assert res.status_code == 400
    res = client.get("/api/matrix")  # axis missing entirely
    assert res.status_code == 400
    assert res.json()["error"]["code"] == "malformed_request"


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def test_generate_redundant(client):
    res = client.post("/api/palettes/generate",
                      json={"encoding": "redundant", "n": 4, "k": 3})
    assert res.status_code == 200
    data = res.json()
    assert data["encoding"] == "redundant"
    assert len(data["session_id"]) == 32
    assert len(data["palettes"]) == 3
    assert [p["rank"] for p in data["palettes"]] == [1, 2, 3]
    top = data["palettes"][0]
    assert len(top["entries"]) == 4
    for e in top["entries"]:
        assert {"color_id", "hex", "shape_id", "shape"} <= set(e)
    assert set(top["components"]) == {
        "marker_pair_mean", "marker_individual_mean", "color_pair_mean",
        "shape_pair_mean", "lightness_variance", "shape_type_mix"}


def test_generate_auto_notes(client):
    res = client.post("/api/palettes/generate", json={"n": 2})
    assert res.status_code == 200
    data = res.json()
    assert data["encoding"] == "color_only"
    assert "redundancy" in data["note"]
    res = client.post("/api/palettes/generate", json={"n": 6, "k": 1})
    assert res.json()["encoding"] == "redundant"
    assert "note" not in res.json()


def test_generate_deterministic(client):
    body = {"encoding": "redundant", "n": 5, "seed": 4}
    a = client.post("/api/palettes/generate", json=body).json()
    b = client.post("/api/palettes/generate", json=body).json()
    a.pop("session_id")
    b.pop("session_id")
    assert a == b


def test_generate_respects_constraints(client):
    res = client.post("/api/palettes/generate", json={
        "encoding": "color_only", "n": 3,
        "constraints": {"required_colors": [0], "excluded_colors": [1]}})
    assert res.status_code == 200
    for p in res.json()["palettes"]:
        ids = {e["color_id"] for e in p["entries"]}
        assert 0 in ids and 1 not in ids


def test_generate_error_codes(client):
    res = client.post("/api/palettes/generate", json={"n": 99})
    assert res.status_code == 400
    assert res.json()["error"]["code"] == "invalid_argument"

    res = client.post("/api/palettes/generate", json={"encoding": "x", "n": 4})
    assert res.status_code == 400

    res = client.post("/api/palettes/generate", json={"n": "not-a-number"})
    assert res.status_code == 400
    assert res.json()["error"]["code"] == "malformed_request"

    res = client.post("/api/palettes/generate", json={
        "n": 4, "constraints": {"required_colors": [999]}})
    assert res.status_code == 404
    assert res.json()["error"]["code"] == "unknown_id"

    res = client.post("/api/palettes/generate", json={
        "encoding": "color_only", "n": 2,
        "constraints": {"required_colors": [0, 1, 2]}})
    assert res.status_code == 409
    assert res.json()["error"]["code"] == "infeasible_constraints"

    res = client.post("/api/palettes/generate", json={
        "encoding": "redundant", "n": 4,
        "constraints": {"required_colors": [38]}})  # outside demo coverage
    assert res.status_code in (409, 422)


# ---------------------------------------------------------------------------
# Swap and sessions
# ---------------------------------------------------------------------------

def test_swap_flow(client):
    gen = client.post("/api/palettes/generate",
                      json={"encoding": "redundant", "n": 3, "k": 1}).json()
    sid = gen["session_id"]
    top = gen["palettes"][0]
    old = top["entries"][0]
    res = client.post("/api/palettes/swap", json={
        "session_id": sid,
        "palette": {"encoding": "redundant", "entries": top["entries"]},
        "position": 0})
    assert res.status_code == 200
    out = res.json()
    assert out["session_id"] == sid
    assert old["color_id"] in out["excluded_colors"]
    assert old["shape_id"] in out["excluded_shapes"]
    new = out["palette"]["entries"][0]
    assert (new["color_id"], new["shape_id"]) != (old["color_id"], old["shape_id"])


def test_swap_without_session_creates_one(client):
    gen = client.post("/api/palettes/generate",
                      json={"encoding": "color_only", "n": 3, "k": 1}).json()
    res = client.post("/api/palettes/swap", json={
        "palette": gen["palettes"][0], "position": 1})
    assert res.status_code == 200
    assert len(res.json()["session_id"]) == 32


def test_swap_until_exhausted(client):
    """Exclusions accumulate in the session until a 409 terminal state."""
    gen = client.post("/api/palettes/generate", json={
        "encoding": "color_only", "n": 3, "k": 1}).json()
    sid = gen["session_id"]
    palette = gen["palettes"][0]
    statuses = []
    for _ in range(15):
        res = client.post("/api/palettes/swap", json={
            "session_id": sid, "palette": palette, "position": 0})
        statuses.append(res.status_code)
        if res.status_code != 200:
            break
        palette = res.json()["palette"]
    assert statuses[-1] == 409
    assert res.json()["error"]["code"] == "exhausted_alternatives"
    assert statuses.count(200) >= 1


def test_swap_error_codes(client):
    gen = client.post("/api/palettes/generate",
                      json={"encoding": "color_only", "n": 3, "k": 1}).json()
    palette = gen["palettes"][0]
    res = client.post("/api/palettes/swap", json={
        "session_id": "deadbeef", "palette": palette, "position": 0})
    assert res.status_code == 404
    assert res.json()["error"]["code"] == "unknown_id"

    res = client.post("/api/palettes/swap", json={
        "palette": palette, "position": 7})
    assert res.status_code == 400

    res = client.post("/api/palettes/swap", json={
        "palette": {"encoding": "color_only",
                    "entries": [{"color_id": 999}, {"color_id": 1}]},
        "position": 0})
    assert res.status_code == 404

    res = client.post("/api/palettes/swap", json={"position": 0})
    assert res.status_code == 400
    assert res.json()["error"]["code"] == "malformed_request"


def test_session_ttl_eviction():
    app = create_app(session_ttl=0.0)
    c = TestClient(app)
    gen = c.post("/api/palettes/generate",
                 json={"encoding": "color_only", "n": 3, "k": 1}).json()
    res = c.post("/api/palettes/swap", json={
        "session_id": gen["session_id"],
        "palette": gen["palettes"][0], "position": 0})
    assert res.status_code == 404  # evicted immediately at ttl=0


# ---------------------------------------------------------------------------
# Stimulus preview
# ---------------------------------------------------------------------------

def test_preview_plain(client):
    res = client.get("/api/stimulus/preview", params={"n": 3, "seed": 5})
    assert res.status_code == 200
    assert res.headers["content-type"].startswith("image/svg+xml")
    assert res.text.count('class="mark"') == 60
    again = client.get("/api/stimulus/preview", params={"n": 3, "seed": 5})
    assert again.text == res.text


def test_preview_with_palette(client, pool):
    res = client.get("/api/stimulus/preview", params={
        "n": 2, "encoding": "redundant", "colors": "0,1", "shapes": "0,1"})
    assert res.status_code == 200
    assert pool.by_id[0].hex in res.text


def test_preview_engagement(client):
    res = client.get("/api/stimulus/preview", params={"n": 2, "engagement": True})
    assert res.status_code == 200
    res = client.get("/api/stimulus/preview", params={"n": 5, "engagement": True})
    assert res.status_code == 400  # engagement checks are 2-3 categories


def test_preview_errors(client):
    res = client.get("/api/stimulus/preview", params={"n": 99})
    assert res.status_code == 400
    res = client.get("/api/stimulus/preview", params={"n": 2, "colors": "999,1"})
    assert res.status_code == 404
    res = client.get("/api/stimulus/preview", params={
        "n": 3, "encoding": "color_only", "colors": "0,1"})
    assert res.status_code == 400  # palette size mismatch


# ---------------------------------------------------------------------------
# CLI/service agreement
# ---------------------------------------------------------------------------

def test_service_matches_cli(client, demo_evidence_dir):
    """Byte-identical palette ranking between the two entry points."""
    res = client.post("/api/palettes/generate", json={
        "encoding": "redundant", "n": 4, "k": 5, "seed": 2}).json()
    proc = subprocess.run(
        [sys.executable, "-m", "palettekit.cli", "generate", "--type",
         "redundant", "--n", "4", "--k", "5", "--seed", "2",
         "--evidence", str(demo_evidence_dir)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    cli_palettes = json.loads(proc.stdout)["palettes"]
    assert cli_palettes == res["palettes"]
