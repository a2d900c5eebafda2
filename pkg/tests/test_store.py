"""Knowledge base: storage, selection, blacklist, and journal replay."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trustrep import (
    FeedbackCategory,
    FeedbackRecord,
    InvalidValueError,
    JournalError,
    KnowledgeBase,
    load_store,
)
from trustrep.errors import (
    DuplicateFeedbackError,
    InvalidSelectionSizeError,
    UnknownUserError,
)

T0 = 1_700_000_000

TEXTS = {
    FeedbackCategory.POSITIVE: "the battery is great.",
    FeedbackCategory.NEGATIVE: "the screen is terrible.",
    FeedbackCategory.MITIGATED: "the camera is great. the speaker is poor.",
    FeedbackCategory.CONTRADICTORY: "the battery is great. the battery is terrible.",
}


def make_feedback(fid, category=FeedbackCategory.POSITIVE, product="p1", author="seed",
                  trust=5.0, created=T0, appreciation=4.0):
    if category is FeedbackCategory.CONTRADICTORY:
        trust = -10.0
    return FeedbackRecord(
        feedback_id=fid,
        product_id=product,
        author_id=author,
        text=TEXTS[category],
        category=category,
        trustworthiness=trust,
        created_at=created,
        appreciation=appreciation,
    )


def test_store_feedback_round_trips():
    store = KnowledgeBase()
    record = make_feedback("f1")
    assert store.store_feedback(record) == "f1"
    assert store.get_feedback("f1") == record
    assert store.get_feedback("f1").text == record.text
    assert store.feedbacks_for_product("p1") == [record]
    assert store.feedbacks_for_product("p1", FeedbackCategory.POSITIVE) == [record]
    assert store.feedbacks_for_product("p1", FeedbackCategory.NEGATIVE) == []


def test_store_feedback_rejects_duplicates_and_bad_records():
    store = KnowledgeBase()
    store.store_feedback(make_feedback("f1"))
    with pytest.raises(DuplicateFeedbackError):
        store.store_feedback(make_feedback("f1"))
    with pytest.raises(InvalidValueError):
        make_feedback("f2", trust=11)
    with pytest.raises(InvalidValueError):
        FeedbackRecord(
            feedback_id="f3", product_id="p1", author_id="a", text="x.",
            category=FeedbackCategory.CONTRADICTORY, trustworthiness=-3,
            created_at=T0, appreciation=3.0,
        )


@pytest.mark.parametrize("k", [3, 11, 0, -1])
def test_selection_size_bounds(k):
    store = KnowledgeBase()
    with pytest.raises(InvalidSelectionSizeError):
        store.select_prefabricated("p1", k)


def test_selection_round_robin_takes_newest_of_each_category():
    store = KnowledgeBase()
    # 3 per category; higher suffix = more recent
    for category in FeedbackCategory:
        for i in range(3):
            store.store_feedback(make_feedback(
                f"{category.value[:3].lower()}-{i}", category=category, created=T0 + i,
            ))
    selection = store.select_prefabricated("p1", 4)
    assert not selection.thin
    assert [f.feedback_id for f in selection.records] == [
        "pos-2", "neg-2", "mit-2", "con-2",
    ]
    # a second pass continues in category order with the next-newest items
    selection10 = store.select_prefabricated("p1", 10)
    assert [f.feedback_id for f in selection10.records] == [
        "pos-2", "neg-2", "mit-2", "con-2",
        "pos-1", "neg-1", "mit-1", "con-1",
        "pos-0", "neg-0",
    ]


def test_selection_tie_break_is_feedback_id_ascending():
    store = KnowledgeBase()
    for fid in ("b", "a", "c"):
        store.store_feedback(make_feedback(fid, created=T0))
    selection = store.select_prefabricated("p1", 4)
    assert [f.feedback_id for f in selection.records] == ["a", "b", "c"]
    assert selection.thin


def test_selection_thin_when_stock_is_short():
    store = KnowledgeBase()
    store.store_feedback(make_feedback("f1"))
    store.store_feedback(make_feedback("f2", category=FeedbackCategory.NEGATIVE))
    selection = store.select_prefabricated("p1", 4)
    assert selection.thin
    assert {f.feedback_id for f in selection.records} == {"f1", "f2"}


def test_selection_unknown_product_is_empty_thin():
    store = KnowledgeBase()
    selection = store.select_prefabricated("nope", 4)
    assert selection.records == ()
    assert selection.thin


def test_selection_excludes_requesting_author_and_never_duplicates():
    store = KnowledgeBase()
    for i in range(6):
        store.store_feedback(make_feedback(f"own-{i}", author="alice", created=T0 + i))
    for i in range(6):
        store.store_feedback(make_feedback(f"other-{i}", author="bob", created=T0 + i))
    selection = store.select_prefabricated("p1", 10, exclude_author="alice")
    ids = [f.feedback_id for f in selection.records]
    assert all(fid.startswith("other-") for fid in ids)
    assert len(ids) == len(set(ids)) == 6


def test_selection_is_deterministic():
    store = KnowledgeBase()
    for category in FeedbackCategory:
        for i in range(3):
            store.store_feedback(make_feedback(f"{category.value}-{i}", category=category, created=T0 + i))
    first = store.select_prefabricated("p1", 7)
    second = store.select_prefabricated("p1", 7)
    assert first == second


def test_blacklist_window_arithmetic_and_boundaries():
    store = KnowledgeBase()
    store.create_user("u1", T0)
    assert store.is_blacklisted("u1", T0) is False
    user = store.blacklist_user("u1", T0, 86400)
    assert user.blacklist_until == T0 + 86400
    assert store.is_blacklisted("u1", T0 + 86399) is True
    assert store.is_blacklisted("u1", T0 + 86400) is False
    assert store.is_blacklisted("u1", T0 + 86401) is False
    assert store.blacklist_remaining("u1", T0 + 86000) == 400


def test_blacklist_requires_known_user_and_positive_ttl():
    store = KnowledgeBase()
    with pytest.raises(UnknownUserError):
        store.blacklist_user("ghost", T0, 60)
    with pytest.raises(UnknownUserError):
        store.is_blacklisted("ghost", T0)
    store.create_user("u1", T0)
    with pytest.raises(InvalidValueError):
        store.blacklist_user("u1", T0, 0)


def test_journal_round_trip_many_random_records(tmp_path):
    path = tmp_path / "journal.jsonl"
    rng = random.Random(1234)
    store = KnowledgeBase(journal_path=path)
    categories = list(FeedbackCategory)
    for i in range(100):
        category = rng.choice(categories)
        store.store_feedback(make_feedback(
            f"f{i:03d}",
            category=category,
            product=f"p{rng.randrange(4)}",
            author=f"a{rng.randrange(10)}",
            trust=rng.uniform(-10, 10),
            created=T0 + rng.randrange(10_000),
            appreciation=rng.uniform(1, 5),
        ))
    for i in range(10):
        store.create_user(f"u{i}", T0 + i)
        if i % 3 == 0:
            store.blacklist_user(f"u{i}", T0 + 100, 3600)
    store.close()

    loaded = load_store(path)
    assert loaded.snapshot() == store.snapshot()
    assert loaded.journal == store.journal


def test_load_absent_file_yields_empty_store(tmp_path):
    store = load_store(tmp_path / "missing.jsonl")
    assert store.snapshot() == {"users": {}, "feedbacks": {}, "aggregates": {}, "sessions": {}}
    assert store.journal == []


def test_in_memory_journal_replays_to_the_same_store():
    store = KnowledgeBase()
    store.create_user("u1", T0)
    store.store_feedback(make_feedback("f1"))
    store.blacklist_user("u1", T0, 60)
    replayed = KnowledgeBase.replay(store.journal)
    assert replayed.snapshot() == store.snapshot()
    assert replayed.journal == store.journal


def test_truncated_last_line_errors_with_line_number(tmp_path):
    path = tmp_path / "journal.jsonl"
    store = KnowledgeBase(journal_path=path)
    store.create_user("u1", T0)
    store.store_feedback(make_feedback("f1"))
    store.close()
    content = path.read_text(encoding="utf-8")
    cut = content.rstrip("\n")[:-10]
    path.write_text(cut, encoding="utf-8")
    with pytest.raises(JournalError) as excinfo:
        load_store(path)
    assert excinfo.value.line_number == 2
    assert "line 2" in str(excinfo.value)


def test_corrupt_middle_line_names_the_line(tmp_path):
    path = tmp_path / "journal.jsonl"
    store = KnowledgeBase(journal_path=path)
    store.create_user("u1", T0)
    store.create_user("u2", T0)
    store.close()
    lines = path.read_text(encoding="utf-8").splitlines()
    lines.insert(1, '{"kind": "wormhole"}')
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(JournalError) as excinfo:
        load_store(path)
    assert excinfo.value.line_number == 2


def test_journal_records_use_contracted_kinds(tmp_path):
    path = tmp_path / "journal.jsonl"
    store = KnowledgeBase(journal_path=path)
    store.create_user("u1", T0)
    store.store_feedback(make_feedback("f1"))
    store.blacklist_user("u1", T0, 60)
    store.close()
    kinds = [json.loads(line)["kind"] for line in path.read_text().splitlines()]
    assert kinds == ["user", "feedback", "blacklist"]
    allowed = {"user", "feedback", "vote", "aggregate", "session", "blacklist"}
    assert set(kinds) <= allowed


@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_journal_replay_idempotent_for_generated_stores(tmp_path_factory, data):
    path = tmp_path_factory.mktemp("j") / "journal.jsonl"
    store = KnowledgeBase(journal_path=path)
    n_users = data.draw(st.integers(min_value=0, max_value=5))
    for i in range(n_users):
        store.create_user(f"u{i}", T0 + i)
    n_feedbacks = data.draw(st.integers(min_value=0, max_value=8))
    for i in range(n_feedbacks):
        category = data.draw(st.sampled_from(list(FeedbackCategory)))
        trust = data.draw(st.floats(min_value=-10, max_value=10, allow_nan=False))
        store.store_feedback(make_feedback(f"f{i}", category=category, trust=trust,
                                           created=T0 + i))
    store.close()
    reloaded = load_store(path)
    assert reloaded.snapshot() == store.snapshot()
