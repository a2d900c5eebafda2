"""Persistent store for users, feedbacks, product aggregates, sessions, and
the blacklist, backed by an append-only journal.

The journal is line-delimited JSON, one change record per line, each with a
``kind`` field in {user, feedback, vote, aggregate, session, blacklist} and
integer UTC-second timestamps. Every mutation builds a record, applies it to
the in-memory maps, then appends it, so replaying a journal from empty
reproduces the maps exactly.

Two records are composite so that a journal cut at any line boundary never
leaves partial state behind:
  - a vote record carries the voter's resulting trust degree;
  - the session record written at finalization embeds the session's stored
    feedback and (when the rating is included) the updated aggregate. A
    journal that ends before that line replays to a store where the session
    is still open and the product aggregate untouched.

Concurrency: single writer, many readers. ``lock`` serializes mutations;
readers may hold on to the immutable records they fetched.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from pathlib import Path

from .domain import (
    CATEGORY_ORDER,
    SELECTION_MAX,
    SELECTION_MIN,
    SESSION_TRANSITIONS,
    FeedbackCategory,
    FeedbackRecord,
    ProductAggregate,
    ReviewSession,
    SessionState,
    UserRecord,
    Vote,
    VoteChoice,
    new_user,
)
from .errors import (
    DuplicateFeedbackError,
    DuplicateSessionError,
    DuplicateUserError,
    DuplicateVoteError,
    InvalidSelectionSizeError,
    InvalidValueError,
    JournalError,
    UnknownFeedbackError,
    UnknownSessionError,
    UnknownUserError,
)

DEFAULT_BLACKLIST_TTL = 86400

JOURNAL_KINDS = ("user", "feedback", "vote", "aggregate", "session", "blacklist")


@dataclass(frozen=True)
class Selection:
    """Result of serving prefabricated feedbacks for one product."""

    records: tuple[FeedbackRecord, ...]
    thin: bool


class KnowledgeBase:
    """In-memory maps plus the append-only journal behind them."""

    def __init__(self, journal_path: str | Path | None = None):
        self.users: dict[str, UserRecord] = {}
        self.feedbacks: dict[str, FeedbackRecord] = {}
        self.aggregates: dict[str, ProductAggregate] = {}
        self.sessions: dict[str, ReviewSession] = {}
        self.journal: list[dict] = []
        self.lock = threading.RLock()
        self._journal_path = Path(journal_path) if journal_path is not None else None
        self._journal_file = None

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeBase":
        """Replay the journal at ``path`` (absent file -> empty store).

        The returned store appends further changes to the same file.
        """
        store = cls(journal_path=path)
        path = Path(path)
        if not path.exists():
            return store
        with path.open("r", encoding="utf-8") as fh:
            for line_number, line in enumerate(fh, start=1):
                store._replay_line(line, line_number)
        return store

    @classmethod
    def replay(cls, records: list[dict]) -> "KnowledgeBase":
        """Rebuild a store from an in-memory record sequence."""
        store = cls()
        for line_number, record in enumerate(records, start=1):
            try:
                store._apply(record)
            except Exception as exc:
                raise JournalError(line_number, str(exc)) from exc
            store.journal.append(record)
        return store

    def _replay_line(self, line: str, line_number: int) -> None:
        stripped = line.strip()
        if stripped == "":
            raise JournalError(line_number, "blank line")
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise JournalError(line_number, f"invalid JSON ({exc.msg})") from exc
        try:
            self._apply(record)
        except JournalError:
            raise
        except Exception as exc:
            raise JournalError(line_number, str(exc)) from exc
        self.journal.append(record)

    def close(self) -> None:
        if self._journal_file is not None:
            self._journal_file.close()
            self._journal_file = None

    def __enter__(self) -> "KnowledgeBase":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def snapshot(self) -> dict:
        """Copies of the four entity maps, for equality checks."""
        return {
            "users": dict(self.users),
            "feedbacks": dict(self.feedbacks),
            "aggregates": dict(self.aggregates),
            "sessions": dict(self.sessions),
        }

    # -- commit machinery --------------------------------------------------

    def _commit(self, record: dict) -> None:
        self._apply(record)
        self.journal.append(record)
        if self._journal_path is not None:
            if self._journal_file is None:
                self._journal_file = self._journal_path.open("a", encoding="utf-8")
            self._journal_file.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")
            self._journal_file.flush()

    def _apply(self, record: dict) -> None:
        kind = record.get("kind")
        if kind == "user":
            self.users[record["user_id"]] = _user_from(record)
        elif kind == "blacklist":
            user = self.users.get(record["user_id"])
            if user is None:
                raise InvalidValueError(f"blacklist for unknown user {record['user_id']!r}")
            self.users[user.user_id] = replace(user, blacklist_until=record["blacklist_until"])
        elif kind == "feedback":
            feedback = _feedback_from(record)
            if feedback.feedback_id in self.feedbacks:
                raise DuplicateFeedbackError(f"feedback {feedback.feedback_id!r} already stored")
            self.feedbacks[feedback.feedback_id] = feedback
        elif kind == "vote":
            self._apply_vote(record)
        elif kind == "aggregate":
            aggregate = _aggregate_from(record)
            self.aggregates[aggregate.product_id] = aggregate
        elif kind == "session":
            self._apply_session(record)
        else:
            raise InvalidValueError(f"unknown record kind {kind!r}")

    def _apply_vote(self, record: dict) -> None:
        session = self.sessions.get(record["session_id"])
        if session is None:
            raise InvalidValueError(f"vote for unknown session {record['session_id']!r}")
        vote = Vote(
            user_id=record["user_id"],
            feedback_id=record["feedback_id"],
            choice=VoteChoice(record["choice"]),
            cast_at=record["cast_at"],
        )
        if session.state is not SessionState.VOTING:
            raise InvalidValueError(f"session {session.session_id!r} is not voting")
        if any(v.feedback_id == vote.feedback_id for v in session.votes):
            raise DuplicateVoteError(f"feedback {vote.feedback_id!r} already voted")
        user = self.users.get(vote.user_id)
        if user is None:
            raise InvalidValueError(f"vote by unknown user {vote.user_id!r}")
        self.sessions[session.session_id] = replace(session, votes=session.votes + (vote,))
        self.users[user.user_id] = replace(user, trust_degree=record["trust_after"])

    def _apply_session(self, record: dict) -> None:
        state = SessionState(record["state"])
        existing = self.sessions.get(record["session_id"])
        if existing is None:
            session = ReviewSession(
                session_id=record["session_id"],
                user_id=record["user_id"],
                product_id=record["product_id"],
                appreciation=record["appreciation"],
                text=record["text"],
                selection=tuple(record["selection"]),
                votes=(),
                state=state,
                thin=record["thin"],
                created_at=record["created_at"],
            )
        else:
            if state not in SESSION_TRANSITIONS[existing.state]:
                raise InvalidValueError(
                    f"illegal session transition {existing.state.value} -> {state.value}"
                )
            session = replace(existing, state=state)
        self.sessions[session.session_id] = session
        if state is SessionState.FINALIZED:
            feedback = _feedback_from(record["feedback"])
            if feedback.feedback_id in self.feedbacks:
                raise DuplicateFeedbackError(f"feedback {feedback.feedback_id!r} already stored")
            self.feedbacks[feedback.feedback_id] = feedback
            if record.get("aggregate") is not None:
                aggregate = _aggregate_from(record["aggregate"])
                self.aggregates[aggregate.product_id] = aggregate

    # -- users -------------------------------------------------------------

    def create_user(self, user_id: str, now: int) -> UserRecord:
        """Register a new participant with trust 0."""
        with self.lock:
            user = new_user(user_id, created_at=now)
            if user.user_id in self.users:
                raise DuplicateUserError(f"user {user_id!r} already registered")
            self._commit(_user_record(user))
            return self.users[user.user_id]

    def get_user(self, user_id: str) -> UserRecord:
        try:
            return self.users[user_id]
        except KeyError:
            raise UnknownUserError(f"unknown user {user_id!r}") from None

    def set_trust(self, user_id: str, trust_degree: float) -> UserRecord:
        """Commit a standalone trust change (outside a vote)."""
        with self.lock:
            user = self.get_user(user_id)
            updated = replace(user, trust_degree=trust_degree)
            self._commit(_user_record(updated))
            return self.users[user_id]

    def blacklist_user(self, user_id: str, now: int, ttl_seconds: int = DEFAULT_BLACKLIST_TTL) -> UserRecord:
        """Open a blacklist window [now, now + ttl) for the user."""
        with self.lock:
            user = self.get_user(user_id)
            if ttl_seconds <= 0:
                raise InvalidValueError("ttl_seconds must be positive")
            self._commit({
                "kind": "blacklist",
                "user_id": user.user_id,
                "blacklist_until": now + ttl_seconds,
            })
            return self.users[user_id]

    def is_blacklisted(self, user_id: str, now: int) -> bool:
        user = self.get_user(user_id)
        return user.blacklist_until is not None and now < user.blacklist_until

    def blacklist_remaining(self, user_id: str, now: int) -> int:
        """Seconds left in the blacklist window, 0 when inactive."""
        user = self.get_user(user_id)
        if user.blacklist_until is None or now >= user.blacklist_until:
            return 0
        return user.blacklist_until - now

    # -- feedbacks ---------------------------------------------------------

    def store_feedback(self, record: FeedbackRecord) -> str:
        """Persist a prefabricated feedback; returns its id."""
        with self.lock:
            if record.feedback_id in self.feedbacks:
                raise DuplicateFeedbackError(f"feedback {record.feedback_id!r} already stored")
            self._commit(_feedback_record(record))
            return record.feedback_id

    def get_feedback(self, feedback_id: str) -> FeedbackRecord:
        try:
            return self.feedbacks[feedback_id]
        except KeyError:
            raise UnknownFeedbackError(f"unknown feedback {feedback_id!r}") from None

    def feedbacks_for_product(
        self, product_id: str, category: FeedbackCategory | None = None
    ) -> list[FeedbackRecord]:
        """Stored feedbacks for a product, newest first, ties by id."""
        pool = [
            f for f in self.feedbacks.values()
            if f.product_id == product_id and (category is None or f.category is category)
        ]
        pool.sort(key=lambda f: (-f.created_at, f.feedback_id))
        return pool

    def select_prefabricated(
        self, product_id: str, k: int, exclude_author: str | None = None
    ) -> Selection:
        """Serve up to ``k`` feedbacks, round-robin across categories.

        Categories cycle in fixed order (Positive, Negative, Mitigated,
        Contradictory), newest first within each, ties broken by feedback id.
        The requesting author's own feedbacks are excluded. Fewer than ``k``
        in stock means everything is served and the result is flagged thin.
        """
        if not isinstance(k, int) or isinstance(k, bool) or not SELECTION_MIN <= k <= SELECTION_MAX:
            raise InvalidSelectionSizeError(
                f"k must be an integer in [{SELECTION_MIN}, {SELECTION_MAX}], got {k!r}"
            )
        queues: dict[FeedbackCategory, list[FeedbackRecord]] = {c: [] for c in CATEGORY_ORDER}
        for feedback in self.feedbacks.values():
            if feedback.product_id != product_id or feedback.author_id == exclude_author:
                continue
            queues[feedback.category].append(feedback)
        for queue in queues.values():
            queue.sort(key=lambda f: (-f.created_at, f.feedback_id))
        picked: list[FeedbackRecord] = []
        cursors = {c: 0 for c in CATEGORY_ORDER}
        while len(picked) < k:
            progressed = False
            for category in CATEGORY_ORDER:
                cursor = cursors[category]
                if cursor < len(queues[category]):
                    picked.append(queues[category][cursor])
                    cursors[category] = cursor + 1
                    progressed = True
                    if len(picked) == k:
                        break
            if not progressed:
                break
        return Selection(records=tuple(picked), thin=len(picked) < k)

    # -- aggregates --------------------------------------------------------

    def get_aggregate(self, product_id: str) -> ProductAggregate:
        """Current aggregate for the product; empty when never rated."""
        return self.aggregates.get(product_id) or ProductAggregate(product_id=product_id)

    def put_aggregate(self, aggregate: ProductAggregate) -> None:
        """Commit a standalone aggregate state (used by seeding/tests)."""
        with self.lock:
            self._commit(_aggregate_record(aggregate))

    # -- sessions ----------------------------------------------------------

    def add_session(self, session: ReviewSession) -> None:
        with self.lock:
            if session.session_id in self.sessions:
                raise DuplicateSessionError(f"session {session.session_id!r} already exists")
            self._commit(_session_record(session))

    def get_session(self, session_id: str) -> ReviewSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def next_session_id(self) -> str:
        n = len(self.sessions) + 1
        while f"s{n:06d}" in self.sessions:
            n += 1
        return f"s{n:06d}"

    def next_feedback_id(self, session_id: str) -> str:
        candidate = f"fb-{session_id}"
        n = 2
        while candidate in self.feedbacks:
            candidate = f"fb-{session_id}-{n}"
            n += 1
        return candidate

    def commit_vote(
        self,
        session_id: str,
        vote: Vote,
        feedtrustworth: float,
        trust_before: float,
        trust_after: float,
    ) -> None:
        """Record one vote and the voter's resulting trust, atomically."""
        with self.lock:
            self._commit({
                "kind": "vote",
                "session_id": session_id,
                "user_id": vote.user_id,
                "feedback_id": vote.feedback_id,
                "choice": vote.choice.value,
                "cast_at": vote.cast_at,
                "feedtrustworth": feedtrustworth,
                "trust_before": trust_before,
                "trust_after": trust_after,
            })

    def commit_finalization(
        self,
        session_id: str,
        feedback: FeedbackRecord,
        aggregate: ProductAggregate | None,
    ) -> ReviewSession:
        """Finalize a session in one journal record.

        ``aggregate`` is None when the rating is excluded from the product
        score; the stored aggregate is then left untouched.
        """
        with self.lock:
            session = self.get_session(session_id)
            record = _session_record(replace(session, state=SessionState.FINALIZED))
            record["feedback"] = _feedback_record(feedback, bare=True)
            record["aggregate"] = _aggregate_record(aggregate, bare=True) if aggregate is not None else None
            self._commit(record)
            return self.sessions[session_id]


def load_store(path: str | Path) -> KnowledgeBase:
    """Replay the journal at ``path`` into a live store."""
    return KnowledgeBase.load(path)


# -- record construction (fixed key order keeps journals byte-stable) ------

def _user_record(user: UserRecord) -> dict:
    return {
        "kind": "user",
        "user_id": user.user_id,
        "trust_degree": user.trust_degree,
        "created_at": user.created_at,
        "blacklist_until": user.blacklist_until,
    }


def _user_from(record: dict) -> UserRecord:
    return UserRecord(
        user_id=record["user_id"],
        trust_degree=record["trust_degree"],
        created_at=record["created_at"],
        blacklist_until=record["blacklist_until"],
    )


def _feedback_record(feedback: FeedbackRecord, bare: bool = False) -> dict:
    record = {
        "kind": "feedback",
        "feedback_id": feedback.feedback_id,
        "product_id": feedback.product_id,
        "author_id": feedback.author_id,
        "text": feedback.text,
        "category": feedback.category.value,
        "trustworthiness": feedback.trustworthiness,
        "created_at": feedback.created_at,
        "appreciation": feedback.appreciation,
    }
    if bare:
        del record["kind"]
    return record


def _feedback_from(record: dict) -> FeedbackRecord:
    return FeedbackRecord(
        feedback_id=record["feedback_id"],
        product_id=record["product_id"],
        author_id=record["author_id"],
        text=record["text"],
        category=FeedbackCategory(record["category"]),
        trustworthiness=record["trustworthiness"],
        created_at=record["created_at"],
        appreciation=record["appreciation"],
    )


def _aggregate_record(aggregate: ProductAggregate, bare: bool = False) -> dict:
    record = {
        "kind": "aggregate",
        "product_id": aggregate.product_id,
        "weighted_sum": aggregate.weighted_sum,
        "coefficient_sum": aggregate.coefficient_sum,
        "rating_count": aggregate.rating_count,
    }
    if bare:
        del record["kind"]
    return record


def _aggregate_from(record: dict) -> ProductAggregate:
    return ProductAggregate(
        product_id=record["product_id"],
        weighted_sum=record["weighted_sum"],
        coefficient_sum=record["coefficient_sum"],
        rating_count=record["rating_count"],
    )


def _session_record(session: ReviewSession) -> dict:
    return {
        "kind": "session",
        "session_id": session.session_id,
        "user_id": session.user_id,
        "product_id": session.product_id,
        "appreciation": session.appreciation,
        "text": session.text,
        "selection": list(session.selection),
        "state": session.state.value,
        "thin": session.thin,
        "created_at": session.created_at,
    }
