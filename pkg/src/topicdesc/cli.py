"""Command-line pipeline: preprocess -> model -> describe -> serve, plus
agreement reporting over collected annotations.

Every stage reads only the files the previous stage wrote. Configuration
resolution order: command-line flag, then ``TOPICDESC_*`` environment
variable, then the ``--config`` JSON file, then the built-in default.

Exit codes: 0 success, 2 unreadable/malformed input, 3 invalid
configuration or values, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .agreement import (
    METRIC_KINDS,
    METRICS,
    build_matrix,
    distribution_report,
    format_distribution,
    format_share,
    krippendorff_alpha,
)
from .descriptor import describe_all
from .fileio import (
    InputError,
    read_annotation_records,
    read_corpus,
    read_model,
    read_token_lists,
    write_agreement_report,
    write_descriptors,
    write_model,
    write_token_lists,
    write_topics,
)
from .lda import LdaConfig, all_top_tokens, fit
from .preprocess import build_display_map, load_stoplist, preprocess_corpus
from .rake import SCORING_MODES, RakeConfig
from .server import IDENTITY_MODES, StudyConfig, StudyService, create_app, load_study
from .store import AnnotationStore

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4

ENV_PREFIX = "TOPICDESC_"

DEFAULT_BIND = "127.0.0.1:8000"


class _Settings:
    """Flag > environment > config file > default."""

    def __init__(self, args: argparse.Namespace, config_path: str | None):
        self.args = args
        self.config: dict = {}
        if config_path:
            try:
                with open(config_path, "r", encoding="utf-8") as fh:
                    loaded = json.load(fh)
            except OSError as exc:
                raise InputError(f"cannot read config {config_path}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise InputError(f"invalid config JSON: {exc}") from exc
            if not isinstance(loaded, dict):
                raise InputError("config file must hold a JSON object")
            self.config = loaded

    def get(self, name: str, default=None, cast=None):
        key = name.replace("-", "_")
        value = getattr(self.args, key, None)
        if value is None:
            env = os.environ.get(ENV_PREFIX + key.upper())
            if env is not None:
                value = env
            elif key in self.config:
                value = self.config[key]
        if value is None:
            return default
        if cast is not None:
            try:
                return cast(value)
            except (TypeError, ValueError) as exc:
                raise ValueError(f"invalid value for --{name}: {value!r}") from exc
        return value


def _choice(settings: _Settings, name: str, default: str, allowed) -> str:
    value = settings.get(name, default)
    if value not in allowed:
        raise ValueError(f"--{name} must be one of {tuple(allowed)}, got {value!r}")
    return value


def _dataset_label(settings: _Settings, fallback_path: str) -> str:
    label = settings.get("dataset")
    if label:
        return str(label)
    stem = os.path.basename(fallback_path)
    for suffix in (".jsonl", ".json", ".csv", ".txt"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
            break
    return stem or "corpus"


# ---------------------------------------------------------------------------
# commands


def cmd_preprocess(settings: _Settings) -> int:
    corpus_path = settings.get("corpus")
    out_path = settings.get("out")
    if not corpus_path or not out_path:
        raise ValueError("preprocess requires --corpus and --out")
    documents = read_corpus(corpus_path)
    stoplist = load_stoplist(settings.get("stoplist"))
    token_lists = preprocess_corpus(documents, stoplist)
    display_map = build_display_map(documents, stoplist)
    write_token_lists(
        out_path,
        token_lists,
        dataset=_dataset_label(settings, corpus_path),
        stoplist_name=stoplist.source_name,
        display_map=display_map,
    )
    kept = sum(1 for tl in token_lists if not tl.is_empty)
    print(f"preprocessed {len(documents)} documents ({kept} non-empty) -> {out_path}")
    return EXIT_OK


def cmd_model(settings: _Settings) -> int:
    tokens_path = settings.get("tokens")
    out_path = settings.get("out")
    if not tokens_path or not out_path:
        raise ValueError("model requires --tokens and --out")
    token_lists, dataset, display_map = read_token_lists(tokens_path)
    config = LdaConfig(
        n_topics=settings.get("topics", 10, int),
        n_iterations=settings.get("iterations", 1000, int),
        random_seed=settings.get("seed", 0, int),
        top_n_tokens=settings.get("top_n", 10, int),
    )
    config.validate()
    model = fit(token_lists, config)
    write_model(out_path, model, dataset=dataset, display_map=display_map)
    report_path = settings.get("report")
    if not report_path:
        base = out_path[:-5] if out_path.endswith(".json") else out_path
        report_path = base + ".topics.jsonl"
    write_topics(
        report_path,
        all_top_tokens(model),
        dataset=dataset,
        display_map=display_map,
    )
    print(
        f"fitted {config.n_topics} topics over {len(model.doc_ids)} documents"
        f" -> {out_path}, {report_path}"
    )
    return EXIT_OK


def cmd_describe(settings: _Settings) -> int:
    model_path = settings.get("model")
    corpus_path = settings.get("corpus")
    out_path = settings.get("out")
    if not model_path or not corpus_path or not out_path:
        raise ValueError("describe requires --model, --corpus and --out")
    model, dataset, _display_map = read_model(model_path)
    documents = read_corpus(corpus_path)
    stoplist = load_stoplist(settings.get("stoplist"))
    rake_config = RakeConfig(
        stoplist=stoplist,
        scoring_mode=_choice(settings, "scoring-mode", "ratio", SCORING_MODES),
    )
    descriptors = describe_all(model, documents, rake_config)
    tokens = {t.topic_id: t.tokens for t in all_top_tokens(model)}
    write_descriptors(out_path, descriptors, dataset=dataset, top_tokens=tokens)
    named = sum(1 for d in descriptors if not d.is_miscellaneous)
    print(f"described {len(descriptors)} topics ({named} named) -> {out_path}")
    return EXIT_OK


def cmd_serve(settings: _Settings) -> int:
    descriptors = settings.get("descriptors") or []
    reports = settings.get("report") or []
    store_path = settings.get("store")
    if not store_path or (not descriptors and not reports):
        raise ValueError("serve requires --store and --descriptors/--report files")
    bind = settings.get("bind", DEFAULT_BIND)
    host, _, port_text = str(bind).rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"--bind must be host:port, got {bind!r}")
    config = StudyConfig(
        target_annotations_per_output=settings.get("target", 10, int),
        identity_mode=_choice(settings, "identity", "address", IDENTITY_MODES),
        random_seed=settings.get("seed", None, int),
    )
    config.validate()
    store = AnnotationStore(store_path)
    count = load_study(store, list(reports), list(descriptors))
    app = create_app(StudyService(store, config), ui_dir=settings.get("ui"))
    print(f"loaded {count} outputs ({store.output_count()} total); serving on {bind}")
    import uvicorn

    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return EXIT_OK


def cmd_agreement(settings: _Settings) -> int:
    store_path = settings.get("store")
    records_path = settings.get("records")
    if bool(store_path) == bool(records_path):
        raise ValueError("agreement requires exactly one of --store or --records")
    if store_path:
        if not os.path.exists(store_path):
            raise InputError(f"cannot read {store_path}: no such file")
        store = AnnotationStore(store_path)
        try:
            records = store.all_records()
        finally:
            store.close()
    else:
        records = read_annotation_records(records_path)
    if not records:
        raise ValueError("no annotation records to analyse")
    kind = _choice(settings, "metric-kind", "ordinal", METRIC_KINDS)

    reports = {}
    for metric in METRICS:
        matrix = build_matrix(records, metric)
        if sum(len(r) for r in matrix.ratings if len(r) >= 2) >= 2:
            reports[metric] = krippendorff_alpha(matrix, kind)
    if not reports:
        raise ValueError("no metric has two or more pairable ratings")
    table = distribution_report(records)
    counts = {metric: table.get(metric, [0] * 5) for metric in METRICS}
    shares = {
        metric: [format_share(c, sum(row)) for c in row] if sum(row) else []
        for metric, row in counts.items()
    }

    print(format_distribution({m: counts[m] for m in METRICS if sum(counts[m])}))
    for metric, report in reports.items():
        flag = " (degenerate: unanimous)" if report.degenerate else ""
        print(
            f"alpha[{metric}, {report.metric_kind}] = {report.alpha:.6f}"
            f" over {report.n_units} units,"
            f" {report.n_pairable_values} pairable values{flag}"
        )
    out_path = settings.get("out")
    if out_path:
        write_agreement_report(out_path, reports, counts, shares)
        print(f"report -> {out_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicdesc",
        description="Survey-response topic modelling with human-readable "
        "topic descriptors and an annotation service.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file with default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="normalise, tokenise, stop and stem a corpus")
    p.add_argument("--corpus", help="corpus file (CSV or JSON-lines)")
    p.add_argument("--stoplist", help="stoplist file (default: packaged list)")
    p.add_argument("--dataset", help="dataset label (default: corpus file stem)")
    p.add_argument("--out", help="token-list file to write")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("model", help="fit the topic model over token lists")
    p.add_argument("--tokens", help="token-list file from preprocess")
    p.add_argument("--topics", type=int, help="number of topics K (default 10)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--iterations", type=int, help="sampling sweeps (default 1000)")
    p.add_argument("--top-n", type=int, help="tokens per topic report row (default 10)")
    p.add_argument("--out", help="model file to write")
    p.add_argument("--report", help="topic token report file (default: <out>.topics.jsonl)")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("describe", help="derive a descriptor for every topic")
    p.add_argument("--model", help="model file from the model stage")
    p.add_argument("--corpus", help="original corpus file (raw text for phrases)")
    p.add_argument("--stoplist", help="stoplist file (default: packaged list)")
    p.add_argument("--scoring-mode", choices=sorted(SCORING_MODES),
                   help="keyword scoring mode (default ratio)")
    p.add_argument("--out", help="descriptor file to write")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--descriptors", nargs="+", help="descriptor files (one per dataset)")
    p.add_argument("--report", nargs="+", help="topic token report files (one per dataset)")
    p.add_argument("--store", help="sqlite store file")
    p.add_argument("--bind", help=f"host:port (default {DEFAULT_BIND})")
    p.add_argument("--target", type=int, help="annotations per output (default 10)")
    p.add_argument("--identity", choices=IDENTITY_MODES,
                   help="annotator identity source (default address)")
    p.add_argument("--seed", type=int, help="task selection seed (default: entropy)")
    p.add_argument("--ui", help="static directory to serve at / (optional)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("agreement", help="agreement + distribution report")
    p.add_argument("--store", help="sqlite store file")
    p.add_argument("--records", help="annotation records file (JSON-lines export)")
    p.add_argument("--metric-kind", choices=METRIC_KINDS,
                   help="difference function (default ordinal)")
    p.add_argument("--out", help="report file to write (optional)")
    p.set_defaults(func=cmd_agreement)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    try:
        settings = _Settings(args, getattr(args, "config", None))
        return args.func(settings)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
