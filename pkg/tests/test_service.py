"""Session service: HTTP flows, websocket stream, audit endpoint."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from conftest import TWO_VOTERS

from sela import flip_bit_in_export, parse_script, run_scenario, reference_code
from sela.service import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(workdir=tmp_path / "sessions")
    with TestClient(app) as test_client:
        yield test_client


def create_session(client, zone=1, section=2, **extra) -> str:
    response = client.post(
        "/sessions", json={"zone": zone, "section": section, **extra}
    )
    assert response.status_code == 201
    return response.json()["id"]


def pollworker(client, sid, action, expect=200):
    response = client.post(f"/sessions/{sid}/pollworker", json={"action": action})
    assert response.status_code == expect, response.text
    return response.json()


def voter(client, sid, contest, keys, expect=200):
    response = client.post(
        f"/sessions/{sid}/voter", json={"contest": contest, "keys": keys}
    )
    assert response.status_code == expect, response.text
    return response.json()


def open_session(client, sid):
    pollworker(client, sid, "init")
    pollworker(client, sid, "zeresima")
    pollworker(client, sid, "annotate_ata")
    pollworker(client, sid, "section")


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope").status_code == 404


def test_malformed_body_is_400(client):
    sid = create_session(client)
    response = client.post(f"/sessions/{sid}/voter", json={"contest": "x"})
    assert response.status_code == 400


def test_voter_keys_drive_the_displays(client):
    sid = create_session(client)
    open_session(client, sid)
    pollworker(client, sid, "open_voter")

    state = voter(client, sid, 1, "1")
    assert state["sela_visor"] == "00001"
    state = voter(client, sid, 1, "3")
    assert state["sela_visor"] == "00013"
    assert state["ue_display"] == "13"
    assert state["phase"] == "VOTER_OPEN"

    state = voter(client, sid, 1, "CONFIRMA")
    assert state["sela_visor"] == ""
    assert state["ue_display"] == ""


def test_corrige_clears_both_displays(client):
    sid = create_session(client)
    open_session(client, sid)
    pollworker(client, sid, "open_voter")
    voter(client, sid, 1, "42")
    state = voter(client, sid, 1, "CORRIGE")
    assert state["sela_visor"] == ""
    assert state["ue_display"] == ""


def test_blank_and_null_keys(client):
    sid = create_session(client)
    open_session(client, sid)
    pollworker(client, sid, "open_voter")
    state = voter(client, sid, 1, "BRANCO")
    assert state["sela_visor"] == "BBBBB"
    assert state["ue_display"] == "BRANCO"
    voter(client, sid, 1, "CONFIRMA")
    state = voter(client, sid, 2, "NULO")
    assert state["sela_visor"] == "NNNNN"


def test_voter_outside_voting_phase_is_409(client):
    sid = create_session(client)
    response = client.post(
        f"/sessions/{sid}/voter", json={"contest": 1, "keys": "1"}
    )
    assert response.status_code == 409
    assert response.json()["detail"] == "ERR_BAD_PHASE"


def test_corrige_without_pending_is_409(client):
    sid = create_session(client)
    open_session(client, sid)
    pollworker(client, sid, "open_voter")
    response = client.post(
        f"/sessions/{sid}/voter", json={"contest": 1, "keys": "CORRIGE"}
    )
    assert response.status_code == 409
    assert response.json()["detail"] == "ERR_NO_PENDING"


def test_sixth_digit_is_rejected(client):
    sid = create_session(client)
    open_session(client, sid)
    pollworker(client, sid, "open_voter")
    voter(client, sid, 1, "99999")
    voter(client, sid, 1, "9", expect=400)


def test_finalize_shows_digest_page_and_artifacts(client):
    sid = create_session(client)
    open_session(client, sid)
    pollworker(client, sid, "open_voter")
    voter(client, sid, 1, "13")
    voter(client, sid, 1, "CONFIRMA")
    pollworker(client, sid, "close_voter")
    state = pollworker(client, sid, "finalize")
    assert state["phase"] == "FINALIZED_AUDIT"
    assert state["sela_visor"].startswith("1:")
    assert len(state["digest_pages"]) == 10
    pollworker(client, sid, "annotate_ata")

    artifacts = client.get(f"/sessions/{sid}/artifacts").json()
    assert artifacts["bu"].startswith("BU-V1")
    assert "1;13;1" in artifacts["bu"]
    assert "FINAL=" in artifacts["ata"]
    assert artifacts["export_hex"]


def test_annotate_outside_digest_phases_is_409(client):
    sid = create_session(client)
    pollworker(client, sid, "init")
    response = client.post(
        f"/sessions/{sid}/pollworker", json={"action": "annotate_ata"}
    )
    assert response.status_code == 409


def test_stream_events_are_ordered_and_gap_free(client):
    sid = create_session(client)
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        snapshot = ws.receive_json()
        assert snapshot["phase"] == "POWERED"
        last = snapshot["seq"]

        open_session(client, sid)
        pollworker(client, sid, "open_voter")
        voter(client, sid, 1, "13")

        seen_visors = []
        for _ in range(7):
            event = ws.receive_json()
            assert event["seq"] == last + 1
            last = event["seq"]
            seen_visors.append(event["sela_visor"])
        # two digit presses arrive as two distinct vote events
        assert "00001" in seen_visors
        assert seen_visors[-1] == "00013"


def test_api_run_matches_scripted_run(client, tmp_path):
    code = reference_code()
    scripted = run_scenario(parse_script(TWO_VOTERS), code)

    sid = create_session(client, zone=1, section=2)
    open_session(client, sid)
    for _ in range(2):
        pollworker(client, sid, "open_voter")
        voter(client, sid, 1, "13")
        voter(client, sid, 1, "CONFIRMA")
        pollworker(client, sid, "close_voter")
    pollworker(client, sid, "finalize")
    pollworker(client, sid, "annotate_ata")

    artifacts = client.get(f"/sessions/{sid}/artifacts").json()
    assert artifacts["bu"] == scripted.bu.render()
    assert artifacts["ata"] == scripted.ata.render()
    assert bytes.fromhex(artifacts["export_hex"]) == scripted.export_image

    # artifacts were persisted to the working directory
    persisted = list((tmp_path / "sessions").glob("*.selamem"))
    assert len(persisted) == 1
    assert persisted[0].read_bytes() == scripted.export_image


def test_audit_endpoint_with_session_reference(client):
    sid = create_session(client)
    open_session(client, sid)
    pollworker(client, sid, "open_voter")
    voter(client, sid, 1, "13")
    voter(client, sid, 1, "CONFIRMA")
    pollworker(client, sid, "close_voter")
    pollworker(client, sid, "finalize")
    pollworker(client, sid, "annotate_ata")

    report = client.post("/audit", json={"session_id": sid}).json()
    assert report["overall"] == "OK"
    assert len(report["findings"]) == 5


def test_audit_endpoint_detects_tampered_export(client):
    sid = create_session(client)
    open_session(client, sid)
    pollworker(client, sid, "open_voter")
    voter(client, sid, 1, "13")
    voter(client, sid, 1, "CONFIRMA")
    pollworker(client, sid, "close_voter")
    pollworker(client, sid, "finalize")
    pollworker(client, sid, "annotate_ata")

    artifacts = client.get(f"/sessions/{sid}/artifacts").json()
    tampered = flip_bit_in_export(
        bytes.fromhex(artifacts["export_hex"]), 20, 1, fix_crc=True
    )
    report = client.post("/audit", json={
        "session_id": sid, "export_hex": tampered.hex(),
    }).json()
    assert report["overall"] == "DIGEST_MISMATCH"


def test_audit_endpoint_needs_enough_inputs(client):
    response = client.post("/audit", json={"bu_text": "BU-V1"})
    assert response.status_code == 400
