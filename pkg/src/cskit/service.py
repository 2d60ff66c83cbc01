"""Blind pairwise annotation service: task serving and durable judgments.

State is an append-only judgment log plus a static assignment; a restart
replays the log, so no acknowledged judgment is ever lost and no
database is needed. Annotators identify themselves with a bearer token
and only ever see two texts; system identities and the source English
sentence stay concealed.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Mapping, Sequence

from .errors import AuthorizationError, ConflictError, SchemaError, UnknownIdError
from .tournament import Comparison, Judgment, ScoreTable, Verdict, score

DEFAULT_GUIDELINES = """\
Pairwise comparison guidelines

You will see two sentences at a time. Both are supposed to mix English
and Spanish in a natural, informal register. Pick the better one.

Apply these criteria in order; move to the next only when the previous
one does not separate the two sentences:

1. Language mixing. A sentence with words in both languages beats a
   monolingual one, always. Between two mixed sentences, prefer the one
   whose switches feel natural, at points where neither language's
   grammar breaks.

2. Content and fluency. The sentence should be understandable as a
   whole, keep a consistent meaning, and get agreement and verb
   conjugation right.

3. Form. Use repetitions, uncommon typos, wrong punctuation, or stray
   characters to break otherwise even matchups.

These sentences come from informal, social-media-style text. Casual
spelling and common typos are expected and are not errors by themselves.

Avoid ties. Declare one only when both sentences are equally unusable
(for example, both are fully monolingual) or they are exactly identical.
If no criterion separates them, choose the one you would rather read.
"""


@dataclass(frozen=True)
class ServedTask:
    task_id: str
    left_text: str
    right_text: str
    annotator_id: str
    state: str  # "pending" | "judged"

    def payload(self) -> dict:
        """The annotator-facing body; conceals systems and source text."""
        return {
            "task_id": self.task_id,
            "left_text": self.left_text,
            "right_text": self.right_text,
        }


class AnnotationService:
    """In-memory view over the assignment and the judgment log."""

    def __init__(
        self,
        comparisons: Sequence[Comparison],
        assignment: Mapping[str, Sequence[str]],
        texts: Mapping[tuple[str, str], str],
        log_path: str | Path,
        seed: int = 0,
        guidelines: str = DEFAULT_GUIDELINES,
    ):
        self._comparisons = {c.id: c for c in comparisons}
        self._assignment = {a: list(ids) for a, ids in assignment.items()}
        self._owner: dict[str, str] = {}
        for annotator, comparison_ids in self._assignment.items():
            for comparison_id in comparison_ids:
                if comparison_id not in self._comparisons:
                    raise UnknownIdError(
                        f"assignment references unknown comparison {comparison_id!r}"
                    )
                self._owner[comparison_id] = annotator
        for comparison in self._comparisons.values():
            for system in comparison.systems():
                if (comparison.source_id, system) not in texts:
                    raise UnknownIdError(
                        f"no text for source {comparison.source_id!r} "
                        f"/ system {system!r}"
                    )
        self._texts = dict(texts)
        self._seed = seed
        self.guidelines = guidelines
        self._lock = threading.Lock()
        self._judgments: dict[str, Judgment] = {}
        self._log_path = Path(log_path)
        self._replay()
        self._log = open(self._log_path, "a", encoding="utf-8")

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        lines = self._log_path.read_text(encoding="utf-8").splitlines()
        for index, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                judgment = Judgment(
                    comparison_id=record["comparison_id"],
                    verdict=Verdict(record["verdict"]),
                    annotator_id=record["annotator_id"],
                    timestamp=float(record["timestamp"]),
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                if index == len(lines) - 1:
                    # Torn final line from a crash mid-write; it was never
                    # acknowledged, so dropping it is correct.
                    continue
                raise SchemaError(
                    f"{self._log_path}:{index + 1}: corrupt judgment record ({exc})"
                ) from exc
            self._judgments.setdefault(judgment.comparison_id, judgment)

    def close(self) -> None:
        self._log.close()

    # -- serving ---------------------------------------------------------

    def knows_annotator(self, annotator_id: str) -> bool:
        return annotator_id in self._assignment

    def left_is_a(self, task_id: str) -> bool:
        """Presentation order: a pure function of the seed and the task id."""
        return random.Random(f"{self._seed}|{task_id}").random() < 0.5

    def _served(self, comparison: Comparison, annotator_id: str, state: str) -> ServedTask:
        text_a = self._texts[(comparison.source_id, comparison.system_a)]
        text_b = self._texts[(comparison.source_id, comparison.system_b)]
        if self.left_is_a(comparison.id):
            left, right = text_a, text_b
        else:
            left, right = text_b, text_a
        return ServedTask(
            task_id=comparison.id,
            left_text=left,
            right_text=right,
            annotator_id=annotator_id,
            state=state,
        )

    def next_task(self, annotator_id: str) -> ServedTask | None:
        if annotator_id not in self._assignment:
            raise AuthorizationError(f"unknown annotator {annotator_id!r}")
        with self._lock:
            for comparison_id in self._assignment[annotator_id]:
                if comparison_id not in self._judgments:
                    return self._served(
                        self._comparisons[comparison_id], annotator_id, "pending"
                    )
        return None

    def submit_judgment(
        self, task_id: str, verdict: str, annotator_id: str
    ) -> Judgment:
        """Record one verdict durably; the write is fsynced before returning."""
        if annotator_id not in self._assignment:
            raise AuthorizationError(f"unknown annotator {annotator_id!r}")
        if task_id not in self._comparisons:
            raise UnknownIdError(f"unknown task {task_id!r}")
        if self._owner.get(task_id) != annotator_id:
            raise AuthorizationError(
                f"task {task_id!r} is not assigned to annotator {annotator_id!r}"
            )
        if verdict == "tie":
            mapped = Verdict.TIE
        elif verdict in ("left", "right"):
            left_a = self.left_is_a(task_id)
            chose_left = verdict == "left"
            mapped = Verdict.A if chose_left == left_a else Verdict.B
        else:
            raise ValueError(f"verdict must be left, right, or tie, got {verdict!r}")
        judgment = Judgment(
            comparison_id=task_id,
            verdict=mapped,
            annotator_id=annotator_id,
            timestamp=time.time(),
        )
        with self._lock:
            if task_id in self._judgments:
                raise ConflictError(f"task {task_id!r} already judged")
            self._log.write(
                json.dumps(
                    {
                        "comparison_id": judgment.comparison_id,
                        "verdict": judgment.verdict.value,
                        "annotator_id": judgment.annotator_id,
                        "timestamp": judgment.timestamp,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
            self._log.flush()
            os.fsync(self._log.fileno())
            self._judgments[task_id] = judgment
        return judgment

    # -- reporting -------------------------------------------------------

    def progress(self) -> dict:
        with self._lock:
            per_annotator = {}
            for annotator, comparison_ids in self._assignment.items():
                judged = sum(1 for c in comparison_ids if c in self._judgments)
                per_annotator[annotator] = {
                    "judged": judged,
                    "total": len(comparison_ids),
                }
            return {
                "global": {
                    "judged": len(self._judgments),
                    "total": len(self._comparisons),
                },
                "annotators": per_annotator,
            }

    def results(self) -> ScoreTable:
        with self._lock:
            judgments = list(self._judgments.values())
        return score(judgments, list(self._comparisons.values()))


TOKEN_HEADER = "X-Annotator-Token"


class _Handler(BaseHTTPRequestHandler):
    service: AnnotationService
    ui_dir: Path | None = None

    # -- plumbing --------------------------------------------------------

    def log_message(self, format: str, *args) -> None:  # noqa: A002
        pass  # keep test output and long annotation runs quiet

    def _send_json(self, status: int, body: dict) -> None:
        data = json.dumps(body, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _send_text(self, status: int, text: str, content_type: str = "text/plain") -> None:
        data = text.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", f"{content_type}; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _token(self) -> str | None:
        return self.headers.get(TOKEN_HEADER)

    # -- routes ----------------------------------------------------------

    def do_OPTIONS(self) -> None:  # CORS preflight for the browser UI
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header(
            "Access-Control-Allow-Headers", f"Content-Type, {TOKEN_HEADER}"
        )
        self.end_headers()

    def do_GET(self) -> None:
        path = self.path.split("?", 1)[0]
        if path == "/api/tasks/next":
            self._get_next_task()
        elif path == "/api/progress":
            self._get_progress()
        elif path == "/api/results":
            self._get_results()
        elif path == "/api/guidelines":
            self._send_text(200, self.service.guidelines)
        elif self.ui_dir is not None:
            self._serve_static(path)
        else:
            self._send_json(404, {"error": "not found"})

    def _get_next_task(self) -> None:
        token = self._token()
        if not token or not self.service.knows_annotator(token):
            self._send_json(401, {"error": "unknown annotator token"})
            return
        task = self.service.next_task(token)
        if task is None:
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            return
        self._send_json(200, task.payload())

    def _get_progress(self) -> None:
        progress = self.service.progress()
        token = self._token()
        body: dict = {"global": progress["global"]}
        if token and token in progress["annotators"]:
            body["annotator"] = progress["annotators"][token]
        self._send_json(200, body)

    def _get_results(self) -> None:
        table = self.service.results()
        self._send_json(
            200,
            {
                "systems": [
                    {"system": system, "points": points, "rank": rank}
                    for rank, system, points in table.ranking()
                ]
            },
        )

    def do_POST(self) -> None:
        path = self.path.split("?", 1)[0]
        if path != "/api/judgments":
            self._send_json(404, {"error": "not found"})
            return
        token = self._token()
        if not token or not self.service.knows_annotator(token):
            self._send_json(401, {"error": "unknown annotator token"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length).decode("utf-8"))
            task_id = body["task_id"]
            verdict = body["verdict"]
        except (ValueError, KeyError):
            self._send_json(400, {"error": "body must be {task_id, verdict}"})
            return
        try:
            self.service.submit_judgment(task_id, verdict, token)
        except ConflictError:
            self._send_json(409, {"error": "task already judged"})
            return
        except AuthorizationError:
            self._send_json(403, {"error": "task not assigned to this annotator"})
            return
        except (UnknownIdError, ValueError) as exc:
            self._send_json(400, {"error": str(exc)})
            return
        self._send_json(201, {"task_id": task_id, "recorded": True})

    # -- static UI -------------------------------------------------------

    _CONTENT_TYPES = {
        ".html": "text/html",
        ".js": "text/javascript",
        ".css": "text/css",
        ".map": "application/json",
    }

    def _serve_static(self, path: str) -> None:
        assert self.ui_dir is not None
        relative = path.lstrip("/") or "index.html"
        target = (self.ui_dir / relative).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        content_type = self._CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send_text(200, target.read_text(encoding="utf-8"), content_type)


def make_server(
    service: AnnotationService,
    port: int = 0,
    host: str = "127.0.0.1",
    ui_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    """Bind (but do not start) the HTTP server; port 0 picks a free port."""
    handler = type(
        "BoundHandler",
        (_Handler,),
        {"service": service, "ui_dir": Path(ui_dir) if ui_dir else None},
    )
    return ThreadingHTTPServer((host, port), handler)
