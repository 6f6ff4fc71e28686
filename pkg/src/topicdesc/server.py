"""HTTP annotation service.

Endpoints:

* ``GET /api/health`` — liveness plus output/record counts.
* ``GET /api/task`` — a randomly selected output this annotator may still
  rate, with the remaining eligible count; 204 when none are left.
* ``POST /api/annotation`` — body ``{output_id, quality, usefulness,
  efficiency[, annotator]}``; persists three records atomically.
* ``GET /api/report?metric=...&kind=...`` — agreement + histogram report.

Errors are ``{"code", "message"}`` with machine-readable codes
(out_of_range, duplicate, unknown_output, exhausted, missing_annotator,
insufficient_data).

Annotator identity is the client network address by default; the ``token``
identity mode instead requires an explicit ``annotator`` value (query
parameter or POST body field) for deployments where addresses collide.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .agreement import (
    METRIC_KINDS,
    METRICS,
    RATING_VALUES,
    build_matrix,
    distribution_report,
    format_share,
    krippendorff_alpha,
)
from .fileio import InputError, read_descriptors, read_topics
from .store import AnnotationStore, StudyOutput, SubmissionError

IDENTITY_MODES = ("address", "token")


@dataclass(frozen=True)
class StudyConfig:
    target_annotations_per_output: int = 10
    identity_mode: str = "address"
    random_seed: int | None = None
    metrics: tuple[str, ...] = field(default=METRICS)

    def validate(self) -> None:
        if self.target_annotations_per_output < 1:
            raise ValueError("target_annotations_per_output must be >= 1")
        if self.identity_mode not in IDENTITY_MODES:
            raise ValueError(f"unknown identity mode: {self.identity_mode!r}")


@dataclass(frozen=True)
class AnnotationTask:
    output_id: str
    display_kind: str
    display_text: str
    remaining_count: int

    def to_dict(self) -> dict:
        return {
            "output_id": self.output_id,
            "display_kind": self.display_kind,
            "display_text": self.display_text,
            "remaining_count": self.remaining_count,
        }


def load_study(
    store: AnnotationStore,
    topics_paths: list[str],
    descriptors_paths: list[str],
) -> int:
    """Register both output kinds from pipeline files; idempotent.

    Token-list outputs display the non-stemmed token forms; extended
    outputs display the descriptor label. Returns the number of outputs
    registered in this call.
    """
    registered = 0
    for path in topics_paths:
        records, dataset = read_topics(path)
        label = dataset or "corpus"
        for rec in records:
            display = ", ".join(rec["display_tokens"])
            if not display:
                raise InputError(f"{path}: topic {rec['topic_id']} has no tokens")
            store.register_output(
                f"{label}:token_list:{rec['topic_id']}",
                "token_list",
                display,
                label,
            )
            registered += 1
    for path in descriptors_paths:
        records, dataset = read_descriptors(path)
        label = dataset or "corpus"
        for rec in records:
            store.register_output(
                f"{label}:extended:{rec['topic_id']}",
                "extended",
                rec["label"],
                label,
            )
            registered += 1
    return registered


class StudyService:
    """Protocol logic between the HTTP layer and the store."""

    def __init__(self, store: AnnotationStore, config: StudyConfig):
        config.validate()
        self.store = store
        self.config = config
        self._rng = (
            random.Random(config.random_seed)
            if config.random_seed is not None
            else random.Random()
        )

    def next_task(self, annotator_id: str) -> AnnotationTask | None:
        eligible = self.store.eligible_outputs(
            annotator_id, self.config.target_annotations_per_output
        )
        if not eligible:
            return None
        choice: StudyOutput = self._rng.choice(eligible)
        return AnnotationTask(
            output_id=choice.output_id,
            display_kind=choice.kind,
            display_text=choice.display_text,
            remaining_count=len(eligible),
        )

    def submit(self, annotator_id: str, output_id: str, ratings: dict[str, int]):
        self.store.submit(
            annotator_id,
            output_id,
            ratings,
            self.config.target_annotations_per_output,
        )

    def report(self, metric: str, metric_kind: str) -> dict:
        records = self.store.all_records()
        matrix = build_matrix(records, metric)
        agreement = krippendorff_alpha(matrix, metric_kind)
        counts = distribution_report(records).get(metric, [0] * len(RATING_VALUES))
        total = sum(counts)
        shares = [format_share(c, total) for c in counts] if total else []
        payload = {"metric": metric}
        payload.update(agreement.to_dict())
        payload["distribution"] = counts
        payload["shares"] = shares
        return payload


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


_SUBMISSION_STATUS = {
    "out_of_range": 400,
    "unknown_output": 404,
    "duplicate": 409,
    "exhausted": 409,
}


def create_app(service: StudyService, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="topicdesc annotation service")
    identity_mode = service.config.identity_mode

    def resolve_annotator(request: Request, body: dict | None = None):
        if identity_mode == "address":
            client = request.client
            return client.host if client else "unknown"
        value = None
        if body is not None:
            value = body.get("annotator")
        if not value:
            value = request.query_params.get("annotator")
        return value or None

    @app.get("/api/health")
    def health() -> dict:
        return {
            "status": "ok",
            "outputs": service.store.output_count(),
            "records": service.store.record_count(),
        }

    @app.get("/api/task")
    def task(request: Request):
        annotator = resolve_annotator(request)
        if annotator is None:
            return _error(400, "missing_annotator",
                          "token identity mode requires ?annotator=")
        found = service.next_task(annotator)
        if found is None:
            return Response(status_code=204)
        return JSONResponse(content=found.to_dict())

    @app.post("/api/annotation")
    async def annotation(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "out_of_range", "body must be a JSON object")
        if not isinstance(body, dict):
            return _error(400, "out_of_range", "body must be a JSON object")
        annotator = resolve_annotator(request, body)
        if annotator is None:
            return _error(400, "missing_annotator",
                          "token identity mode requires an annotator value")
        output_id = body.get("output_id")
        if not isinstance(output_id, str) or not output_id:
            return _error(400, "out_of_range", "output_id must be a non-empty string")
        ratings = {}
        for metric in METRICS:
            if metric not in body:
                return _error(400, "out_of_range", f"missing rating for {metric!r}")
            ratings[metric] = body[metric]
        try:
            service.submit(annotator, output_id, ratings)
        except SubmissionError as exc:
            return _error(_SUBMISSION_STATUS[exc.code], exc.code, str(exc))
        return JSONResponse(
            status_code=201,
            content={"status": "accepted", "output_id": output_id},
        )

    @app.get("/api/report")
    def report(request: Request):
        metric = request.query_params.get("metric", METRICS[0])
        kind = request.query_params.get("kind", "ordinal")
        if metric not in METRICS:
            return _error(400, "out_of_range", f"metric must be one of {METRICS}")
        if kind not in METRIC_KINDS:
            return _error(400, "out_of_range", f"kind must be one of {METRIC_KINDS}")
        try:
            payload = service.report(metric, kind)
        except ValueError as exc:
            return _error(409, "insufficient_data", str(exc))
        return JSONResponse(content=payload)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
