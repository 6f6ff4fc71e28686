"""Store and service tests: transactional submission semantics (duplicates,
caps, atomicity) including under concurrency, restart durability, study
loading, task selection, and the full HTTP protocol surface."""

import json
import threading

import pytest
from fastapi.testclient import TestClient

from topicdesc.fileio import InputError
from topicdesc.server import (
    AnnotationTask,
    StudyConfig,
    StudyService,
    create_app,
    load_study,
)
from topicdesc.store import (
    AnnotationStore,
    DuplicateSubmission,
    OutputExhausted,
    RatingOutOfRange,
    UnknownOutput,
)

RATINGS = {"quality": 3, "usefulness": 4, "efficiency": 2}


def make_store(path=":memory:", outputs=3):
    store = AnnotationStore(path)
    for i in range(outputs):
        store.register_output(f"ds:token_list:{i}", "token_list",
                              f"tokens {i}", "ds")
    return store


def write_study_files(tmp_path, dataset="ds1", topics=2):
    topics_path = tmp_path / f"{dataset}.topics.jsonl"
    descs_path = tmp_path / f"{dataset}.descriptors.jsonl"
    with open(topics_path, "w") as fh:
        fh.write(json.dumps({"format": "topicdesc-topics", "version": 1,
                             "dataset": dataset, "n_topics": topics}) + "\n")
        for k in range(topics):
            fh.write(json.dumps({"topic_id": k, "tokens": [f"tok{k}"],
                                 "display_tokens": [f"token{k}"]}) + "\n")
    with open(descs_path, "w") as fh:
        fh.write(json.dumps({"format": "topicdesc-descriptors", "version": 1,
                             "dataset": dataset, "n_topics": topics}) + "\n")
        for k in range(topics):
            fh.write(json.dumps({"topic_id": k, "label": f"Label {k}",
                                 "miscellaneous": False, "top_tokens": [],
                                 "keywords": []}) + "\n")
    return str(topics_path), str(descs_path)


# -- store ------------------------------------------------------------------


def test_submit_persists_three_records():
    store = make_store()
    store.submit("alice", "ds:token_list:0", RATINGS, target=10)
    records = store.all_records()
    assert len(records) == 3
    assert {r.metric: r.rating for r in records} == RATINGS
    assert all(r.annotator_id == "alice" and r.timestamp for r in records)


def test_submit_rejects_duplicates_and_keeps_store_unchanged():
    store = make_store()
    store.submit("alice", "ds:token_list:0", RATINGS, target=10)
    with pytest.raises(DuplicateSubmission):
        store.submit("alice", "ds:token_list:0",
                     {"quality": 0, "usefulness": 0, "efficiency": 0}, target=10)
    assert store.record_count() == 3
    assert store.all_records()[0].rating == RATINGS["quality"]


def test_submit_validates_before_touching_the_store():
    store = make_store()
    cases = [
        ({"quality": 5, "usefulness": 0, "efficiency": 0}, RatingOutOfRange),
        ({"quality": -1, "usefulness": 0, "efficiency": 0}, RatingOutOfRange),
        ({"quality": True, "usefulness": 0, "efficiency": 0}, RatingOutOfRange),
        ({"quality": 1, "usefulness": 1}, RatingOutOfRange),
        ({"quality": 1, "usefulness": 1, "efficiency": 1, "extra": 1},
         RatingOutOfRange),
    ]
    for ratings, exc in cases:
        with pytest.raises(exc):
            store.submit("alice", "ds:token_list:0", ratings, target=10)
    with pytest.raises(UnknownOutput):
        store.submit("alice", "ds:nope:9", RATINGS, target=10)
    assert store.record_count() == 0


def test_cap_enforced_sequentially():
    store = make_store(outputs=1)
    for i in range(5):
        store.submit(f"a{i}", "ds:token_list:0", RATINGS, target=5)
    with pytest.raises(OutputExhausted):
        store.submit("late", "ds:token_list:0", RATINGS, target=5)
    assert store.submission_count("ds:token_list:0") == 5


def test_concurrent_duplicates_accept_exactly_one(tmp_path):
    store = AnnotationStore(str(tmp_path / "c.sqlite"))
    store.register_output("o", "token_list", "text", "ds")
    results = []
    barrier = threading.Barrier(20)

    def attempt():
        barrier.wait()
        try:
            store.submit("same-annotator", "o", RATINGS, target=100)
            results.append("ok")
        except DuplicateSubmission:
            results.append("dup")

    threads = [threading.Thread(target=attempt) for _ in range(20)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results.count("ok") == 1
    assert store.record_count() == 3


def test_concurrent_annotators_never_exceed_cap(tmp_path):
    store = AnnotationStore(str(tmp_path / "cap.sqlite"))
    store.register_output("o", "extended", "label", "ds")
    accepted, rejected = [], []
    barrier = threading.Barrier(15)

    def attempt(name):
        barrier.wait()
        try:
            store.submit(name, "o", RATINGS, target=10)
            accepted.append(name)
        except OutputExhausted:
            rejected.append(name)

    threads = [threading.Thread(target=attempt, args=(f"a{i}",))
               for i in range(15)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(accepted) == 10 and len(rejected) == 5
    assert store.submission_count("o") == 10


def test_restart_round_trip(tmp_path):
    path = str(tmp_path / "persist.sqlite")
    store = make_store(path)
    store.submit("alice", "ds:token_list:1", RATINGS, target=10)
    before = store.all_records()
    store.close()
    reopened = AnnotationStore(path)
    assert reopened.all_records() == before
    assert reopened.output_count() == 3


def test_store_schema_carries_only_documented_fields():
    store = make_store()
    assert store.column_names() == (
        "output_id", "annotator_id", "metric", "rating", "timestamp")


def test_eligible_outputs_excludes_rated_and_full():
    store = make_store(outputs=3)
    store.submit("alice", "ds:token_list:0", RATINGS, target=2)
    eligible = [o.output_id for o in store.eligible_outputs("alice", target=2)]
    assert eligible == ["ds:token_list:1", "ds:token_list:2"]
    store.submit("bob", "ds:token_list:1", RATINGS, target=2)
    store.submit("carol", "ds:token_list:1", RATINGS, target=2)
    eligible = [o.output_id for o in store.eligible_outputs("dan", target=2)]
    assert eligible == ["ds:token_list:0", "ds:token_list:2"]


def test_register_output_validation():
    store = AnnotationStore(":memory:")
    with pytest.raises(ValueError):
        store.register_output("o", "picture", "text", "ds")
    with pytest.raises(ValueError):
        store.register_output("o", "extended", "", "ds")


# -- study loading ----------------------------------------------------------


def test_load_study_registers_both_kinds(tmp_path):
    topics, descs = write_study_files(tmp_path, topics=10)
    store = AnnotationStore(":memory:")
    n = load_study(store, [topics], [descs])
    assert n == 20 and store.output_count() == 20
    kinds = {o.kind for o in store.outputs()}
    assert kinds == {"token_list", "extended"}
    token = store.get_output("ds1:token_list:0")
    assert token.display_text == "token0"
    extended = store.get_output("ds1:extended:3")
    assert extended.display_text == "Label 3"


def test_load_study_two_datasets(tmp_path):
    t1, d1 = write_study_files(tmp_path, dataset="ds1", topics=10)
    t2, d2 = write_study_files(tmp_path, dataset="ds2", topics=10)
    store = AnnotationStore(":memory:")
    assert load_study(store, [t1, t2], [d1, d2]) == 40  # 2 kinds x 10 x 2


def test_load_study_is_idempotent(tmp_path):
    topics, descs = write_study_files(tmp_path)
    store = AnnotationStore(":memory:")
    load_study(store, [topics], [descs])
    before = store.outputs()
    load_study(store, [topics], [descs])
    assert store.outputs() == before


def test_load_study_rejects_empty_files(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text('{"format": "topicdesc-descriptors", "version": 1}\n')
    with pytest.raises(InputError):
        load_study(AnnotationStore(":memory:"), [], [str(path)])


# -- task selection ---------------------------------------------------------


def service(store, **kw):
    kw.setdefault("random_seed", 13)
    return StudyService(store, StudyConfig(**kw))


def test_next_task_fresh_study_counts_everything():
    svc = service(make_store(outputs=3))
    task = svc.next_task("alice")
    assert isinstance(task, AnnotationTask)
    assert task.remaining_count == 3
    assert task.display_text.startswith("tokens")


def test_next_task_returns_the_only_under_target_output():
    store = make_store(outputs=2)
    svc = service(store, target_annotations_per_output=2)
    # fill output 0 completely, output 1 partially (9-of-10 analogue)
    store.submit("a1", "ds:token_list:0", RATINGS, target=2)
    store.submit("a2", "ds:token_list:0", RATINGS, target=2)
    store.submit("a3", "ds:token_list:1", RATINGS, target=2)
    task = svc.next_task("fresh")
    assert task.output_id == "ds:token_list:1"
    assert task.remaining_count == 1


def test_next_task_exhausted_when_annotator_rated_all():
    store = make_store(outputs=2)
    svc = service(store)
    for output in ("ds:token_list:0", "ds:token_list:1"):
        store.submit("alice", output, RATINGS, target=10)
    assert svc.next_task("alice") is None
    assert svc.next_task("bob") is not None


def test_next_task_selection_is_seed_deterministic():
    picks1 = [service(make_store(outputs=5), random_seed=99).next_task("a").output_id
              for _ in range(3)]
    assert len(set(picks1)) == 1


# -- HTTP API ---------------------------------------------------------------


def client_for(store=None, **kw):
    store = store or make_store()
    svc = service(store, **kw)
    return TestClient(create_app(svc)), store


def test_health_endpoint():
    client, _ = client_for()
    body = client.get("/api/health").json()
    assert body == {"status": "ok", "outputs": 3, "records": 0}


def test_task_and_submission_flow():
    client, store = client_for()
    task = client.get("/api/task")
    assert task.status_code == 200
    body = task.json()
    assert set(body) == {"output_id", "display_kind", "display_text",
                         "remaining_count"}
    reply = client.post("/api/annotation", json={
        "output_id": body["output_id"], **RATINGS})
    assert reply.status_code == 201
    assert reply.json() == {"status": "accepted", "output_id": body["output_id"]}
    assert store.record_count() == 3
    # identity defaults to the client network address
    assert store.all_records()[0].annotator_id == "testclient"


def test_http_error_codes():
    client, _ = client_for()
    task = client.get("/api/task").json()

    reply = client.post("/api/annotation", json={
        "output_id": task["output_id"], "quality": 5, "usefulness": 0,
        "efficiency": 0})
    assert (reply.status_code, reply.json()["code"]) == (400, "out_of_range")

    reply = client.post("/api/annotation", json={
        "output_id": "ds:token_list:0", "quality": 1, "usefulness": 1})
    assert (reply.status_code, reply.json()["code"]) == (400, "out_of_range")

    reply = client.post("/api/annotation", json={
        "output_id": "missing:extended:0", **RATINGS})
    assert (reply.status_code, reply.json()["code"]) == (404, "unknown_output")

    client.post("/api/annotation", json={"output_id": "ds:token_list:0", **RATINGS})
    reply = client.post("/api/annotation", json={
        "output_id": "ds:token_list:0", **RATINGS})
    assert (reply.status_code, reply.json()["code"]) == (409, "duplicate")

    reply = client.post("/api/annotation", content=b"not json")
    assert reply.status_code == 400


def test_http_exhausted_cap_is_an_error():
    store = make_store(outputs=1)
    client, _ = client_for(store, target_annotations_per_output=1)
    store.submit("someone-else", "ds:token_list:0", RATINGS, target=1)
    reply = client.post("/api/annotation", json={
        "output_id": "ds:token_list:0", **RATINGS})
    assert (reply.status_code, reply.json()["code"]) == (409, "exhausted")


def test_http_task_204_when_done():
    store = make_store(outputs=1)
    client, _ = client_for(store)
    task = client.get("/api/task").json()
    client.post("/api/annotation", json={"output_id": task["output_id"], **RATINGS})
    assert client.get("/api/task").status_code == 204


def test_token_identity_mode():
    store = make_store()
    svc = StudyService(store, StudyConfig(identity_mode="token", random_seed=1))
    client = TestClient(create_app(svc))

    reply = client.get("/api/task")
    assert (reply.status_code, reply.json()["code"]) == (400, "missing_annotator")
    reply = client.post("/api/annotation", json={
        "output_id": "ds:token_list:0", **RATINGS})
    assert (reply.status_code, reply.json()["code"]) == (400, "missing_annotator")

    task = client.get("/api/task?annotator=kim").json()
    reply = client.post("/api/annotation?annotator=kim", json={
        "output_id": task["output_id"], **RATINGS})
    assert reply.status_code == 201
    assert store.all_records()[0].annotator_id == "kim"
    # body field works too
    reply = client.post("/api/annotation", json={
        "annotator": "kim", "output_id": "ds:token_list:1", **RATINGS})
    assert reply.status_code == 201


def test_report_endpoint():
    store = make_store(outputs=2)
    for name, quality in (("a", 4), ("b", 4), ("c", 3)):
        store.submit(name, "ds:token_list:0",
                     {"quality": quality, "usefulness": 2, "efficiency": 1},
                     target=10)
        store.submit(name, "ds:token_list:1",
                     {"quality": quality, "usefulness": 2, "efficiency": 1},
                     target=10)
    client, _ = client_for(store)
    reply = client.get("/api/report?metric=quality&kind=ordinal")
    assert reply.status_code == 200
    body = reply.json()
    assert body["metric"] == "quality" and body["metric_kind"] == "ordinal"
    assert body["n_units"] == 2 and sum(body["distribution"]) == 6
    assert client.get("/api/report?metric=style").status_code == 400
    assert client.get("/api/report?metric=quality&kind=likert").status_code == 400

    empty_client, _ = client_for()
    reply = empty_client.get("/api/report?metric=quality")
    assert (reply.status_code, reply.json()["code"]) == (409, "insufficient_data")


def test_ui_mount_serves_static_files(tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>rate</title>")
    store = make_store()
    svc = service(store)
    client = TestClient(create_app(svc, ui_dir=str(tmp_path)))
    reply = client.get("/")
    assert reply.status_code == 200 and "rate" in reply.text
    assert client.get("/api/health").status_code == 200
