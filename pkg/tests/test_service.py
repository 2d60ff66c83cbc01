from __future__ import annotations

import json
import random
import threading
import urllib.error
import urllib.request
from pathlib import Path

import pytest

from cskit.errors import AuthorizationError, ConflictError
from cskit.service import TOKEN_HEADER, AnnotationService, make_server
from cskit.tournament import Verdict, assign, schedule


def letters_text(rng: random.Random) -> str:
    return " ".join(
        "".join(rng.choice("bcdfghjklmnpqrtuvwxz") for _ in range(rng.randint(3, 8)))
        for _ in range(rng.randint(3, 10))
    )


def small_setup(tmp_path: Path, n_sources: int = 4, systems=("m1", "m2", "m3")):
    sources = [f"src-{i:03d}" for i in range(n_sources)]
    comparisons = schedule(sources, list(systems))
    rng = random.Random(99)
    texts = {
        (source, system): letters_text(rng) for source in sources for system in systems
    }
    per = len(comparisons) // 2
    annotators = ["tok-alpha", "tok-beta"]
    assignment = assign(comparisons, annotators, per, seed=1)
    service = AnnotationService(
        comparisons=comparisons,
        assignment=assignment,
        texts=texts,
        log_path=tmp_path / "judgments.log",
        seed=11,
    )
    return service, comparisons, texts, assignment


class TestServing:
    def test_fresh_annotator_gets_pending_task(self, tmp_path):
        service, _, _, assignment = small_setup(tmp_path, n_sources=4, systems=("m1", "m2"))
        task = service.next_task("tok-alpha")
        assert task is not None
        assert task.state == "pending"
        assert task.task_id == assignment["tok-alpha"][0]

    def test_exhausted_annotator_gets_none(self, tmp_path):
        service, _, _, assignment = small_setup(tmp_path, n_sources=4, systems=("m1", "m2"))
        for task_id in assignment["tok-alpha"]:
            service.submit_judgment(task_id, "tie", "tok-alpha")
        assert service.next_task("tok-alpha") is None

    def test_unknown_annotator_rejected(self, tmp_path):
        service, _, _, _ = small_setup(tmp_path)
        with pytest.raises(AuthorizationError):
            service.next_task("tok-ghost")

    def test_left_right_order_stable_across_restart(self, tmp_path):
        service, comparisons, texts, assignment = small_setup(tmp_path)
        first = service.next_task("tok-alpha")
        service.close()
        reborn = AnnotationService(
            comparisons=comparisons,
            assignment=assignment,
            texts=texts,
            log_path=tmp_path / "judgments.log",
            seed=11,
        )
        second = reborn.next_task("tok-alpha")
        assert (first.left_text, first.right_text) == (second.left_text, second.right_text)

    def test_blind_payload_has_no_system_or_source_fields(self, tmp_path):
        service, _, _, _ = small_setup(tmp_path)
        payload = service.next_task("tok-alpha").payload()
        assert set(payload) == {"task_id", "left_text", "right_text"}


class TestSubmission:
    def test_left_verdict_mapped_through_concealed_order(self, tmp_path):
        service, comparisons, texts, _ = small_setup(tmp_path)
        task = service.next_task("tok-alpha")
        comparison = next(c for c in comparisons if c.id == task.task_id)
        judgment = service.submit_judgment(task.task_id, "left", "tok-alpha")
        expected = Verdict.A if service.left_is_a(task.task_id) else Verdict.B
        assert judgment.verdict is expected
        # The left text really is the text of the system the verdict credits.
        credited = (
            comparison.system_a if judgment.verdict is Verdict.A else comparison.system_b
        )
        assert texts[(comparison.source_id, credited)] == task.left_text

    def test_tie_recorded_as_tie(self, tmp_path):
        service, _, _, assignment = small_setup(tmp_path)
        task_id = assignment["tok-beta"][0]
        assert service.submit_judgment(task_id, "tie", "tok-beta").verdict is Verdict.TIE

    def test_double_submission_conflicts(self, tmp_path):
        service, _, _, assignment = small_setup(tmp_path)
        task_id = assignment["tok-alpha"][0]
        service.submit_judgment(task_id, "right", "tok-alpha")
        with pytest.raises(ConflictError):
            service.submit_judgment(task_id, "left", "tok-alpha")

    def test_foreign_task_rejected(self, tmp_path):
        service, _, _, assignment = small_setup(tmp_path)
        foreign = assignment["tok-beta"][0]
        with pytest.raises(AuthorizationError):
            service.submit_judgment(foreign, "left", "tok-alpha")

    def test_bad_verdict_rejected(self, tmp_path):
        service, _, _, assignment = small_setup(tmp_path)
        with pytest.raises(ValueError):
            service.submit_judgment(assignment["tok-alpha"][0], "both", "tok-alpha")


class TestDurability:
    def test_restart_replays_identical_state(self, tmp_path):
        service, comparisons, texts, assignment = small_setup(tmp_path)
        rng = random.Random(3)
        submitted = {}
        for annotator in assignment:
            for task_id in assignment[annotator][:5]:
                verdict = rng.choice(["left", "right", "tie"])
                submitted[task_id] = service.submit_judgment(task_id, verdict, annotator)
        before = service.results()
        service.close()  # crash point: nothing after the last ack survives

        reborn = AnnotationService(
            comparisons=comparisons,
            assignment=assignment,
            texts=texts,
            log_path=tmp_path / "judgments.log",
            seed=11,
        )
        assert reborn.results().points == before.points
        assert reborn.progress()["global"]["judged"] == len(submitted)
        for task_id, judgment in submitted.items():
            with pytest.raises(ConflictError):
                reborn.submit_judgment(task_id, "tie", judgment.annotator_id)

    def test_torn_final_line_is_dropped_silently(self, tmp_path):
        service, comparisons, texts, assignment = small_setup(tmp_path)
        service.submit_judgment(assignment["tok-alpha"][0], "left", "tok-alpha")
        service.close()
        log = tmp_path / "judgments.log"
        with open(log, "a", encoding="utf-8") as handle:
            handle.write('{"comparison_id": "src-0')  # crash mid-write
        reborn = AnnotationService(
            comparisons=comparisons,
            assignment=assignment,
            texts=texts,
            log_path=log,
            seed=11,
        )
        assert reborn.progress()["global"]["judged"] == 1

    def test_progress_counts_consistent(self, tmp_path):
        service, _, _, assignment = small_setup(tmp_path)
        assert service.progress()["global"]["judged"] == 0
        for task_id in assignment["tok-alpha"][:3]:
            service.submit_judgment(task_id, "tie", "tok-alpha")
        progress = service.progress()
        assert progress["global"]["judged"] == 3
        assert progress["annotators"]["tok-alpha"]["judged"] == 3
        assert progress["annotators"]["tok-beta"]["judged"] == 0


class TestPlacementBalance:
    def test_both_orders_occur_within_binomial_bounds(self, tmp_path):
        sources = [f"src-{i:03d}" for i in range(200)]
        comparisons = schedule(sources, ["m1", "m2"])
        rng = random.Random(0)
        texts = {(s, m): letters_text(rng) for s in sources for m in ("m1", "m2")}
        service = AnnotationService(
            comparisons=comparisons,
            assignment={"tok": [c.id for c in comparisons]},
            texts=texts,
            log_path=tmp_path / "j.log",
            seed=11,
        )
        lefts = sum(service.left_is_a(c.id) for c in comparisons)
        # 99% binomial bounds for n=200, p=0.5: 100 +/- 2.576*sqrt(50).
        assert 81 <= lefts <= 119


@pytest.fixture
def http_service(tmp_path):
    service, comparisons, texts, assignment = small_setup(tmp_path)
    server = make_server(service, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield base, service, comparisons, texts, assignment
    server.shutdown()
    server.server_close()
    service.close()


def http_get(url: str, token: str | None = None):
    request = urllib.request.Request(url)
    if token:
        request.add_header(TOKEN_HEADER, token)
    try:
        with urllib.request.urlopen(request) as response:
            body = response.read().decode("utf-8")
            return response.status, body
    except urllib.error.HTTPError as err:
        return err.code, err.read().decode("utf-8")


def http_post(url: str, body: dict, token: str | None = None):
    request = urllib.request.Request(
        url,
        data=json.dumps(body).encode("utf-8"),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    if token:
        request.add_header(TOKEN_HEADER, token)
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, response.read().decode("utf-8")
    except urllib.error.HTTPError as err:
        return err.code, err.read().decode("utf-8")


class TestHttpApi:
    def test_next_task_roundtrip(self, http_service):
        base, *_ = http_service
        status, body = http_get(f"{base}/api/tasks/next", token="tok-alpha")
        assert status == 200
        payload = json.loads(body)
        assert set(payload) == {"task_id", "left_text", "right_text"}

    def test_unknown_token_401(self, http_service):
        base, *_ = http_service
        status, _ = http_get(f"{base}/api/tasks/next", token="tok-ghost")
        assert status == 401

    def test_judgment_created_then_conflict(self, http_service):
        base, *_ = http_service
        _, body = http_get(f"{base}/api/tasks/next", token="tok-alpha")
        task_id = json.loads(body)["task_id"]
        status, _ = http_post(
            f"{base}/api/judgments", {"task_id": task_id, "verdict": "left"}, "tok-alpha"
        )
        assert status == 201
        status, _ = http_post(
            f"{base}/api/judgments", {"task_id": task_id, "verdict": "left"}, "tok-alpha"
        )
        assert status == 409

    def test_foreign_task_403(self, http_service):
        base, _, _, _, assignment = http_service
        foreign = assignment["tok-beta"][0]
        status, _ = http_post(
            f"{base}/api/judgments", {"task_id": foreign, "verdict": "tie"}, "tok-alpha"
        )
        assert status == 403

    def test_exhausted_queue_204(self, http_service):
        base, service, _, _, assignment = http_service
        for task_id in assignment["tok-alpha"]:
            service.submit_judgment(task_id, "tie", "tok-alpha")
        status, _ = http_get(f"{base}/api/tasks/next", token="tok-alpha")
        assert status == 204

    def test_progress_scopes_to_token(self, http_service):
        base, service, _, _, assignment = http_service
        service.submit_judgment(assignment["tok-alpha"][0], "tie", "tok-alpha")
        status, body = http_get(f"{base}/api/progress", token="tok-alpha")
        assert status == 200
        payload = json.loads(body)
        assert payload["annotator"]["judged"] == 1
        anonymous = json.loads(http_get(f"{base}/api/progress")[1])
        assert "annotator" not in anonymous
        assert "annotators" not in anonymous  # tokens never enumerated over HTTP

    def test_results_reflect_judgments(self, http_service):
        base, service, comparisons, _, assignment = http_service
        task_id = assignment["tok-alpha"][0]
        service.submit_judgment(task_id, "left", "tok-alpha")
        status, body = http_get(f"{base}/api/results")
        assert status == 200
        table = json.loads(body)["systems"]
        assert sum(row["points"] for row in table) == 1.0

    def test_guidelines_served(self, http_service):
        base, *_ = http_service
        status, body = http_get(f"{base}/api/guidelines")
        assert status == 200
        assert "tie" in body.lower()

    def test_blindness_scan_of_served_responses(self, http_service):
        base, service, comparisons, texts, assignment = http_service
        system_ids = {s for c in comparisons for s in c.systems()}
        scanned = 0
        for annotator in assignment:
            for _ in list(assignment[annotator]):
                status, body = http_get(f"{base}/api/tasks/next", token=annotator)
                assert status == 200
                for system_id in system_ids:
                    assert system_id not in body
                payload = json.loads(body)
                assert "source" not in payload
                scanned += 1
                service.submit_judgment(payload["task_id"], "tie", annotator)
        assert scanned == len(comparisons)
