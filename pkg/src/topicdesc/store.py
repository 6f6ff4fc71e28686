"""Single-file sqlite persistence for study outputs and annotation records.

The whole annotation protocol hinges on one transactional operation:
:meth:`AnnotationStore.submit` checks the per-output cap and the
one-submission-per-annotator rule and inserts the three metric rows inside a
single immediate transaction, so concurrent duplicates can never both land.
A ``UNIQUE (output_id, annotator_id, metric)`` constraint backstops the
check at the schema level.

The records table carries nothing beyond output id, annotator id, metric,
rating, and timestamp.
"""

from __future__ import annotations

import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime, timezone

from .agreement import METRICS, RATING_VALUES, AnnotationRecord

OUTPUT_KINDS = ("token_list", "extended")


class SubmissionError(Exception):
    """Protocol violation; ``code`` is the machine-readable error name."""

    code = "error"


class UnknownOutput(SubmissionError):
    code = "unknown_output"


class DuplicateSubmission(SubmissionError):
    code = "duplicate"


class OutputExhausted(SubmissionError):
    code = "exhausted"


class RatingOutOfRange(SubmissionError):
    code = "out_of_range"


@dataclass(frozen=True)
class StudyOutput:
    output_id: str
    kind: str
    display_text: str
    dataset_id: str


_SCHEMA = """
CREATE TABLE IF NOT EXISTS outputs (
    output_id    TEXT PRIMARY KEY,
    kind         TEXT NOT NULL CHECK (kind IN ('token_list', 'extended')),
    display_text TEXT NOT NULL,
    dataset_id   TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS annotations (
    output_id    TEXT NOT NULL,
    annotator_id TEXT NOT NULL,
    metric       TEXT NOT NULL,
    rating       INTEGER NOT NULL CHECK (rating BETWEEN 0 AND 4),
    timestamp    TEXT NOT NULL,
    UNIQUE (output_id, annotator_id, metric)
);
"""


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class AnnotationStore:
    """Thread-safe store over a single sqlite file (or ':memory:')."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._conn = sqlite3.connect(
            path, check_same_thread=False, isolation_level=None
        )
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute("PRAGMA foreign_keys=ON")
        with self._lock:
            self._conn.executescript(_SCHEMA)

    def close(self) -> None:
        self._conn.close()

    # -- outputs -----------------------------------------------------------

    def register_output(
        self, output_id: str, kind: str, display_text: str, dataset_id: str
    ) -> None:
        if kind not in OUTPUT_KINDS:
            raise ValueError(f"unknown output kind: {kind!r}")
        if not display_text:
            raise ValueError(f"output {output_id!r} has empty display text")
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO outputs VALUES (?, ?, ?, ?)",
                (output_id, kind, display_text, dataset_id),
            )

    def outputs(self) -> list[StudyOutput]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT output_id, kind, display_text, dataset_id"
                " FROM outputs ORDER BY output_id"
            ).fetchall()
        return [StudyOutput(*row) for row in rows]

    def output_count(self) -> int:
        with self._lock:
            (n,) = self._conn.execute("SELECT COUNT(*) FROM outputs").fetchone()
        return n

    def get_output(self, output_id: str) -> StudyOutput | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT output_id, kind, display_text, dataset_id"
                " FROM outputs WHERE output_id = ?",
                (output_id,),
            ).fetchone()
        return StudyOutput(*row) if row else None

    # -- submissions -------------------------------------------------------

    def submit(
        self,
        annotator_id: str,
        output_id: str,
        ratings: dict[str, int],
        target: int,
        timestamp: str | None = None,
    ) -> None:
        """Persist one annotator's three ratings for one output, atomically.

        Raises RatingOutOfRange / UnknownOutput / DuplicateSubmission /
        OutputExhausted; on any failure nothing is persisted.
        """
        if set(ratings) != set(METRICS):
            raise RatingOutOfRange(
                f"ratings must cover exactly {', '.join(METRICS)}"
            )
        for metric, value in ratings.items():
            if (
                not isinstance(value, int)
                or isinstance(value, bool)
                or value not in RATING_VALUES
            ):
                raise RatingOutOfRange(f"{metric} rating {value!r} not in 0..4")
        if not annotator_id:
            raise ValueError("annotator_id must be non-empty")
        stamp = timestamp if timestamp is not None else _utc_now()

        with self._lock:
            self._conn.execute("BEGIN IMMEDIATE")
            try:
                row = self._conn.execute(
                    "SELECT 1 FROM outputs WHERE output_id = ?", (output_id,)
                ).fetchone()
                if row is None:
                    raise UnknownOutput(f"unknown output: {output_id!r}")
                (dup,) = self._conn.execute(
                    "SELECT COUNT(*) FROM annotations"
                    " WHERE output_id = ? AND annotator_id = ?",
                    (output_id, annotator_id),
                ).fetchone()
                if dup:
                    raise DuplicateSubmission(
                        f"{annotator_id!r} already rated {output_id!r}"
                    )
                (done,) = self._conn.execute(
                    "SELECT COUNT(DISTINCT annotator_id) FROM annotations"
                    " WHERE output_id = ?",
                    (output_id,),
                ).fetchone()
                if done >= target:
                    raise OutputExhausted(
                        f"{output_id!r} already has {done} submissions"
                    )
                self._conn.executemany(
                    "INSERT INTO annotations VALUES (?, ?, ?, ?, ?)",
                    [
                        (output_id, annotator_id, metric, ratings[metric], stamp)
                        for metric in METRICS
                    ],
                )
            except BaseException:
                self._conn.execute("ROLLBACK")
                raise
            else:
                self._conn.execute("COMMIT")

    # -- queries -----------------------------------------------------------

    def submission_count(self, output_id: str) -> int:
        with self._lock:
            (n,) = self._conn.execute(
                "SELECT COUNT(DISTINCT annotator_id) FROM annotations"
                " WHERE output_id = ?",
                (output_id,),
            ).fetchone()
        return n

    def eligible_outputs(self, annotator_id: str, target: int) -> list[StudyOutput]:
        """Outputs under the cap that this annotator has not yet rated."""
        with self._lock:
            rows = self._conn.execute(
                """
                SELECT o.output_id, o.kind, o.display_text, o.dataset_id
                FROM outputs o
                WHERE (SELECT COUNT(DISTINCT a.annotator_id)
                       FROM annotations a WHERE a.output_id = o.output_id) < ?
                  AND NOT EXISTS (SELECT 1 FROM annotations a
                                  WHERE a.output_id = o.output_id
                                    AND a.annotator_id = ?)
                ORDER BY o.output_id
                """,
                (target, annotator_id),
            ).fetchall()
        return [StudyOutput(*row) for row in rows]

    def all_records(self) -> list[AnnotationRecord]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT output_id, annotator_id, metric, rating, timestamp"
                " FROM annotations ORDER BY rowid"
            ).fetchall()
        return [AnnotationRecord(*row) for row in rows]

    def record_count(self) -> int:
        with self._lock:
            (n,) = self._conn.execute("SELECT COUNT(*) FROM annotations").fetchone()
        return n

    def column_names(self) -> tuple[str, ...]:
        """Schema introspection (used to verify the store holds nothing
        beyond the documented fields)."""
        with self._lock:
            rows = self._conn.execute("PRAGMA table_info(annotations)").fetchall()
        return tuple(row[1] for row in rows)
