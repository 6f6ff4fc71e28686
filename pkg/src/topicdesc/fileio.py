"""Readers and writers for every pipeline artifact.

Formats:

* corpus — CSV with an ``id,dataset_id,text`` header (``dataset_id``
  optional), or JSON-lines with the same fields; auto-detected.
* token lists — JSON-lines: a header record carrying format/version, the
  dataset label, the stoplist name and the stem -> display-form map,
  followed by one ``{"doc_id", "tokens"}`` record per document.
* model — one canonical JSON object (config, doc_ids, vocabulary, phi,
  theta, display_map, dataset). Written with sorted keys and compact
  separators so identical runs produce identical bytes.
* topics report — JSON-lines: header, then ``{"topic_id", "tokens",
  "display_tokens"}`` per topic.
* descriptors — JSON-lines: header, then ``{"topic_id", "label",
  "miscellaneous", "top_tokens", "keywords"}`` per topic.
* agreement report — one canonical JSON object.

All files are UTF-8. Readers raise :class:`InputError` for anything
unreadable or structurally wrong.
"""

from __future__ import annotations

import csv
import io
import json
import os
from typing import Iterable, Sequence

import numpy as np

from .agreement import AgreementReport
from .descriptor import TopicDescriptor
from .lda import LdaConfig, TopicModel, TopicTokenList

FORMAT_TOKENS = "topicdesc-tokens"
FORMAT_MODEL = "topicdesc-model"
FORMAT_TOPICS = "topicdesc-topics"
FORMAT_DESCRIPTORS = "topicdesc-descriptors"
FORMAT_AGREEMENT = "topicdesc-agreement"
FORMAT_VERSION = 1


class InputError(Exception):
    """An input file is missing, malformed, or of the wrong format."""


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not valid UTF-8: {exc}") from exc


def _write_text(path: str, text: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _parse_json_line(path: str, line_no: int, line: str) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
    if not isinstance(record, dict):
        raise InputError(f"{path}:{line_no}: expected an object")
    return record


def _check_header(path: str, record: dict, expected_format: str) -> dict:
    got = record.get("format")
    if got != expected_format:
        raise InputError(
            f"{path}: expected format {expected_format!r}, found {got!r}"
        )
    version = record.get("version")
    if version != FORMAT_VERSION:
        raise InputError(f"{path}: unsupported version {version!r}")
    return record


# ---------------------------------------------------------------------------
# corpus


def read_corpus(path: str):
    """Load documents from CSV or JSON-lines, whichever the file is."""
    from .preprocess import Document

    text = _read_text(path)
    stripped = text.lstrip()
    if not stripped:
        raise InputError(f"{path}: corpus file is empty")

    documents: list[Document] = []
    seen_ids: set[str] = set()

    def add(doc_id, dataset_id, doc_text, where: str) -> None:
        if not isinstance(doc_id, str) or not doc_id:
            raise InputError(f"{where}: document id must be a non-empty string")
        if not isinstance(doc_text, str):
            raise InputError(f"{where}: text must be a string")
        if doc_id in seen_ids:
            raise InputError(f"{where}: duplicate document id {doc_id!r}")
        seen_ids.add(doc_id)
        documents.append(Document(id=doc_id, text=doc_text, dataset_id=dataset_id or ""))

    if stripped.startswith("{"):
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            record = _parse_json_line(path, line_no, line)
            if "id" not in record or "text" not in record:
                raise InputError(f"{path}:{line_no}: record needs 'id' and 'text'")
            add(record["id"], record.get("dataset_id", ""), record["text"],
                f"{path}:{line_no}")
    else:
        reader = csv.DictReader(io.StringIO(text))
        fields = reader.fieldnames or []
        if "id" not in fields or "text" not in fields:
            raise InputError(f"{path}: CSV header must include 'id' and 'text'")
        for line_no, row in enumerate(reader, start=2):
            if row.get("id") is None or row.get("text") is None:
                raise InputError(f"{path}:{line_no}: short row")
            add(row["id"], row.get("dataset_id", ""), row["text"], f"{path}:{line_no}")

    if not documents:
        raise InputError(f"{path}: corpus contains no documents")
    return documents


# ---------------------------------------------------------------------------
# token lists


def write_token_lists(
    path: str,
    token_lists,
    *,
    dataset: str,
    stoplist_name: str,
    display_map: dict[str, str],
) -> None:
    lines = [
        _dumps(
            {
                "format": FORMAT_TOKENS,
                "version": FORMAT_VERSION,
                "dataset": dataset,
                "stoplist": stoplist_name,
                "display_map": display_map,
            }
        )
    ]
    for tl in token_lists:
        lines.append(_dumps({"doc_id": tl.doc_id, "tokens": list(tl.tokens)}))
    _write_text(path, "\n".join(lines) + "\n")


def read_token_lists(path: str):
    """Returns (token_lists, dataset, display_map)."""
    from .preprocess import TokenList

    text = _read_text(path)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"{path}: empty token-list file")
    header = _check_header(path, _parse_json_line(path, 1, lines[0]), FORMAT_TOKENS)
    display_map = header.get("display_map", {})
    if not isinstance(display_map, dict):
        raise InputError(f"{path}: display_map must be an object")
    dataset = header.get("dataset", "")
    token_lists = []
    for line_no, line in enumerate(lines[1:], start=2):
        record = _parse_json_line(path, line_no, line)
        if "doc_id" not in record or "tokens" not in record:
            raise InputError(f"{path}:{line_no}: record needs 'doc_id' and 'tokens'")
        tokens = record["tokens"]
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise InputError(f"{path}:{line_no}: tokens must be a list of strings")
        token_lists.append(TokenList(doc_id=record["doc_id"], tokens=tuple(tokens)))
    return token_lists, dataset, display_map


# ---------------------------------------------------------------------------
# model


def write_model(
    path: str, model: TopicModel, *, dataset: str, display_map: dict[str, str]
) -> None:
    cfg = model.config
    payload = {
        "format": FORMAT_MODEL,
        "version": FORMAT_VERSION,
        "dataset": dataset,
        "config": {
            "n_topics": cfg.n_topics,
            "doc_topic_prior": cfg.alpha,
            "topic_word_prior": cfg.beta,
            "n_iterations": cfg.n_iterations,
            "random_seed": cfg.random_seed,
            "top_n_tokens": cfg.top_n_tokens,
        },
        "doc_ids": list(model.doc_ids),
        "vocabulary": list(model.vocabulary),
        "phi": model.phi.tolist(),
        "theta": model.theta.tolist(),
        "display_map": display_map,
    }
    _write_text(path, _dumps(payload) + "\n")


def read_model(path: str):
    """Returns (model, dataset, display_map)."""
    text = _read_text(path)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise InputError(f"{path}: expected a JSON object")
    _check_header(path, payload, FORMAT_MODEL)
    try:
        cfg_rec = payload["config"]
        config = LdaConfig(
            n_topics=cfg_rec["n_topics"],
            doc_topic_prior=cfg_rec["doc_topic_prior"],
            topic_word_prior=cfg_rec["topic_word_prior"],
            n_iterations=cfg_rec["n_iterations"],
            random_seed=cfg_rec["random_seed"],
            top_n_tokens=cfg_rec["top_n_tokens"],
        )
        model = TopicModel(
            phi=np.array(payload["phi"], dtype=np.float64),
            theta=np.array(payload["theta"], dtype=np.float64),
            vocabulary=tuple(payload["vocabulary"]),
            doc_ids=tuple(payload["doc_ids"]),
            config=config,
        )
        dataset = payload.get("dataset", "")
        display_map = payload.get("display_map", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed model file: {exc}") from exc
    if model.phi.ndim != 2 or model.theta.ndim != 2:
        raise InputError(f"{path}: phi/theta must be 2-d")
    if model.phi.shape != (config.n_topics, len(model.vocabulary)):
        raise InputError(f"{path}: phi shape mismatch")
    if model.theta.shape != (len(model.doc_ids), config.n_topics):
        raise InputError(f"{path}: theta shape mismatch")
    return model, dataset, display_map


# ---------------------------------------------------------------------------
# topic token report


def write_topics(
    path: str,
    topics: Sequence[TopicTokenList],
    *,
    dataset: str,
    display_map: dict[str, str],
) -> None:
    lines = [
        _dumps(
            {
                "format": FORMAT_TOPICS,
                "version": FORMAT_VERSION,
                "dataset": dataset,
                "n_topics": len(topics),
            }
        )
    ]
    for topic in topics:
        display = [display_map.get(tok, tok) for tok in topic.tokens]
        lines.append(
            _dumps(
                {
                    "topic_id": topic.topic_id,
                    "tokens": list(topic.tokens),
                    "display_tokens": display,
                }
            )
        )
    _write_text(path, "\n".join(lines) + "\n")


def read_topics(path: str):
    """Returns (records, dataset) where each record is a dict."""
    text = _read_text(path)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"{path}: empty topics file")
    header = _check_header(path, _parse_json_line(path, 1, lines[0]), FORMAT_TOPICS)
    records = []
    for line_no, line in enumerate(lines[1:], start=2):
        record = _parse_json_line(path, line_no, line)
        for fieldname in ("topic_id", "tokens", "display_tokens"):
            if fieldname not in record:
                raise InputError(f"{path}:{line_no}: record needs {fieldname!r}")
        records.append(record)
    if not records:
        raise InputError(f"{path}: topics file has no topic records")
    return records, header.get("dataset", "")


# ---------------------------------------------------------------------------
# descriptors


def write_descriptors(
    path: str,
    descriptors: Sequence[TopicDescriptor],
    *,
    dataset: str,
    top_tokens: dict[int, Sequence[str]],
) -> None:
    lines = [
        _dumps(
            {
                "format": FORMAT_DESCRIPTORS,
                "version": FORMAT_VERSION,
                "dataset": dataset,
                "n_topics": len(descriptors),
            }
        )
    ]
    for desc in descriptors:
        lines.append(
            _dumps(
                {
                    "topic_id": desc.topic_id,
                    "label": desc.label,
                    "miscellaneous": desc.is_miscellaneous,
                    "top_tokens": list(top_tokens.get(desc.topic_id, ())),
                    "keywords": [
                        {"phrase": phrase, "score": score, "intersection": inter}
                        for phrase, score, inter in desc.contributing_keywords
                    ],
                }
            )
        )
    _write_text(path, "\n".join(lines) + "\n")


def read_descriptors(path: str):
    """Returns (records, dataset) where each record is a dict."""
    text = _read_text(path)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"{path}: empty descriptor file")
    header = _check_header(
        path, _parse_json_line(path, 1, lines[0]), FORMAT_DESCRIPTORS
    )
    records = []
    for line_no, line in enumerate(lines[1:], start=2):
        record = _parse_json_line(path, line_no, line)
        for fieldname in ("topic_id", "label", "miscellaneous"):
            if fieldname not in record:
                raise InputError(f"{path}:{line_no}: record needs {fieldname!r}")
        records.append(record)
    if not records:
        raise InputError(f"{path}: descriptor file has no topic records")
    return records, header.get("dataset", "")


# ---------------------------------------------------------------------------
# agreement report


def write_agreement_report(
    path: str,
    reports: dict[str, AgreementReport],
    distribution: dict[str, list[int]],
    shares: dict[str, list[str]],
) -> None:
    payload = {
        "format": FORMAT_AGREEMENT,
        "version": FORMAT_VERSION,
        "reports": {metric: rep.to_dict() for metric, rep in reports.items()},
        "distribution": distribution,
        "shares": shares,
    }
    _write_text(path, _dumps(payload) + "\n")


def read_agreement_report(path: str) -> dict:
    text = _read_text(path)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise InputError(f"{path}: expected a JSON object")
    _check_header(path, payload, FORMAT_AGREEMENT)
    return payload


# ---------------------------------------------------------------------------
# annotation record export (append-only log form)


def write_annotation_records(path: str, records: Iterable) -> None:
    lines = []
    for rec in records:
        lines.append(
            _dumps(
                {
                    "output_id": rec.output_id,
                    "annotator_id": rec.annotator_id,
                    "metric": rec.metric,
                    "rating": rec.rating,
                    "timestamp": rec.timestamp,
                }
            )
        )
    _write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_annotation_records(path: str):
    from .agreement import AnnotationRecord

    text = _read_text(path)
    records = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        record = _parse_json_line(path, line_no, line)
        try:
            records.append(
                AnnotationRecord(
                    output_id=record["output_id"],
                    annotator_id=record["annotator_id"],
                    metric=record["metric"],
                    rating=record["rating"],
                    timestamp=record.get("timestamp", ""),
                )
            )
        except KeyError as exc:
            raise InputError(f"{path}:{line_no}: missing field {exc}") from exc
    return records
