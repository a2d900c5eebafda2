"""The reputation pipeline: concordance gate, selection, vote-driven trust
updates, trust clamping, feedback trustworthiness assignment, and the
trust-weighted product score.

Trust deltas follow a banded table on the voted feedback's trustworthiness
magnitude ``m = |ft|``, with half-open bands (lo, hi]:

    (0, 3] -> 0.25    (3, 5] -> 0.5    (5, 7] -> 0.75
    (7, 8] -> 1.0     (8, 9] -> 1.5    (9, 10] -> 2.0

A vote aligned with the stored trustworthiness (like on positive, dislike
on negative) earns +delta, a misaligned vote costs -delta, ft = 0 carries
no evidence and yields 0, and liking a fully contradictory feedback
(ft = -10) overrides the voter's trust straight to -10. Resulting trust is
always clamped to [-10, 10].

A finalized rating enters the product score only while the author's trust
is strictly positive; the score is the running trust-weighted mean of
included appreciations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .domain import (
    APPRECIATION_MAX,
    APPRECIATION_MIN,
    TRUST_MAX,
    TRUST_MIN,
    FeedbackCategory,
    FeedbackRecord,
    ProductAggregate,
    ReviewSession,
    SessionState,
    Vote,
    VoteChoice,
)
from .errors import (
    BlacklistedError,
    DuplicateVoteError,
    IncompleteVotesError,
    InvalidValueError,
    NotInSelectionError,
    WrongStateError,
)
from .store import DEFAULT_BLACKLIST_TTL, KnowledgeBase
from .textanalysis import Lexicon, classify_feedback, test_concordance

DEFAULT_K = 6

#: (upper magnitude bound, delta); bands are half-open (previous bound, bound].
TRUST_BANDS = (
    (3.0, 0.25),
    (5.0, 0.5),
    (7.0, 0.75),
    (8.0, 1.0),
    (9.0, 1.5),
    (10.0, 2.0),
)

ALLOWED_DELTAS = frozenset(
    {0.0} | {d for _, d in TRUST_BANDS} | {-d for _, d in TRUST_BANDS}
)


class AdjustmentKind(str, Enum):
    DELTA = "Delta"
    OVERRIDE = "Override"


@dataclass(frozen=True)
class TrustAdjustment:
    """Outcome of one vote on the voter's trust: a delta or the -10 override."""

    kind: AdjustmentKind
    amount: float

    def __post_init__(self):
        if self.kind is AdjustmentKind.OVERRIDE:
            if self.amount != TRUST_MIN:
                raise InvalidValueError("override adjustment must be -10")
        elif self.amount not in ALLOWED_DELTAS:
            raise InvalidValueError(f"delta {self.amount} is not a band value")


@dataclass(frozen=True)
class VoteOutcome:
    """Everything gathered and decided while processing one vote."""

    user_id: str
    feedback_id: str
    choice: VoteChoice
    feedtrustworth: float
    adjustment: TrustAdjustment
    trust_before: float
    trust_after: float


@dataclass(frozen=True)
class SessionOutcome:
    """Result of finalizing a review session."""

    session_id: str
    final_trust: float
    feedback_trustworthiness: float
    score_included: bool
    new_product_score: float | None


def trust_adjustment(feedtrustworth: float, choice: VoteChoice) -> TrustAdjustment:
    """Map one (feedback trustworthiness, choice) pair to a trust adjustment.

    Liking a contradictory feedback (ft = -10) overrides trust to -10.
    ft = 0 yields a zero delta. Otherwise the band on |ft| fixes the
    magnitude and vote/sign alignment fixes the direction.
    """
    if not TRUST_MIN <= feedtrustworth <= TRUST_MAX:
        raise InvalidValueError(
            f"feedtrustworth {feedtrustworth} outside [{TRUST_MIN}, {TRUST_MAX}]"
        )
    if not isinstance(choice, VoteChoice):
        raise InvalidValueError("choice must be Like or Dislike")
    if feedtrustworth == TRUST_MIN and choice is VoteChoice.LIKE:
        return TrustAdjustment(kind=AdjustmentKind.OVERRIDE, amount=TRUST_MIN)
    if feedtrustworth == 0:
        return TrustAdjustment(kind=AdjustmentKind.DELTA, amount=0.0)
    magnitude = abs(feedtrustworth)
    delta = TRUST_BANDS[-1][1]
    for bound, band_delta in TRUST_BANDS:
        if magnitude <= bound:
            delta = band_delta
            break
    aligned = (choice is VoteChoice.LIKE) == (feedtrustworth > 0)
    return TrustAdjustment(kind=AdjustmentKind.DELTA, amount=delta if aligned else -delta)


def apply_adjustment(trust_before: float, adjustment: TrustAdjustment) -> float:
    """Apply an adjustment and clamp the result to [-10, 10]."""
    if adjustment.kind is AdjustmentKind.OVERRIDE:
        return TRUST_MIN
    return max(TRUST_MIN, min(TRUST_MAX, trust_before + adjustment.amount))


def update_product_score(
    aggregate: ProductAggregate, appreciation: float, trust: float
) -> tuple[ProductAggregate, float | None]:
    """Fold one (appreciation, trust) rating into the product aggregate.

    Non-positive trust is excluded: the aggregate is returned untouched.
    Returns the (possibly unchanged) aggregate and its current score,
    None while unrated.
    """
    if not APPRECIATION_MIN <= appreciation <= APPRECIATION_MAX:
        raise InvalidValueError(
            f"appreciation {appreciation} outside [{APPRECIATION_MIN}, {APPRECIATION_MAX}]"
        )
    if not TRUST_MIN <= trust <= TRUST_MAX:
        raise InvalidValueError(f"trust {trust} outside [{TRUST_MIN}, {TRUST_MAX}]")
    if trust <= 0:
        return aggregate, aggregate.score
    updated = ProductAggregate(
        product_id=aggregate.product_id,
        weighted_sum=aggregate.weighted_sum + appreciation * trust,
        coefficient_sum=aggregate.coefficient_sum + trust,
        rating_count=aggregate.rating_count + 1,
    )
    return updated, updated.score


def submit_review(
    store: KnowledgeBase,
    lexicon: Lexicon,
    user_id: str,
    product_id: str,
    appreciation: float,
    text: str,
    now: int,
    k: int = DEFAULT_K,
    blacklist_ttl: int = DEFAULT_BLACKLIST_TTL,
    session_id: str | None = None,
) -> ReviewSession:
    """Open a review session: gate on concordance, then serve a selection.

    A discordant (rating, text) pair yields a Rejected session and puts the
    user on the blacklist for ``blacklist_ttl`` seconds. A concordant pair
    yields a Voting session whose selection excludes the user's own
    feedbacks. Submissions from blacklisted users are refused outright.
    """
    with store.lock:
        store.get_user(user_id)
        remaining = store.blacklist_remaining(user_id, now)
        if remaining > 0:
            raise BlacklistedError(user_id, remaining)
        # selection size is validated up front so a bad k never blacklists
        selection = store.select_prefabricated(product_id, k, exclude_author=user_id)
        sid = session_id if session_id is not None else store.next_session_id()
        if test_concordance(appreciation, text, lexicon):
            session = ReviewSession(
                session_id=sid,
                user_id=user_id,
                product_id=product_id,
                appreciation=appreciation,
                text=text,
                selection=tuple(f.feedback_id for f in selection.records),
                state=SessionState.VOTING,
                thin=selection.thin,
                created_at=now,
            )
            store.add_session(session)
        else:
            session = ReviewSession(
                session_id=sid,
                user_id=user_id,
                product_id=product_id,
                appreciation=appreciation,
                text=text,
                selection=(),
                state=SessionState.REJECTED,
                thin=False,
                created_at=now,
            )
            store.add_session(session)
            store.blacklist_user(user_id, now, blacklist_ttl)
        return store.get_session(sid)


def _resolve_voting_session(
    store: KnowledgeBase, user_id: str, session_id: str | None
) -> ReviewSession:
    if session_id is not None:
        session = store.get_session(session_id)
        if session.user_id != user_id:
            raise WrongStateError(
                f"session {session_id!r} belongs to user {session.user_id!r}"
            )
        return session
    candidates = [
        s for s in store.sessions.values()
        if s.user_id == user_id and s.state is SessionState.VOTING
    ]
    if not candidates:
        raise WrongStateError(f"user {user_id!r} has no open voting session")
    if len(candidates) > 1:
        raise WrongStateError(
            f"user {user_id!r} has {len(candidates)} open voting sessions; pass session_id"
        )
    return candidates[0]


def process_vote(
    store: KnowledgeBase,
    user_id: str,
    feedback_id: str,
    choice: VoteChoice,
    now: int,
    session_id: str | None = None,
) -> VoteOutcome:
    """Record one like/dislike and commit the voter's trust change.

    The vote must target a feedback served in the user's open voting
    session and not voted on before. Without an explicit ``session_id``
    the user's single open voting session is used.
    """
    with store.lock:
        user = store.get_user(user_id)
        feedback = store.get_feedback(feedback_id)
        session = _resolve_voting_session(store, user_id, session_id)
        if session.state is not SessionState.VOTING:
            raise WrongStateError(
                f"session {session.session_id!r} is {session.state.value}, not Voting"
            )
        if feedback_id not in session.selection:
            raise NotInSelectionError(
                f"feedback {feedback_id!r} was not served in session {session.session_id!r}"
            )
        if any(v.feedback_id == feedback_id for v in session.votes):
            raise DuplicateVoteError(f"feedback {feedback_id!r} already voted in this session")
        adjustment = trust_adjustment(feedback.trustworthiness, choice)
        trust_before = user.trust_degree
        trust_after = apply_adjustment(trust_before, adjustment)
        vote = Vote(user_id=user_id, feedback_id=feedback_id, choice=choice, cast_at=now)
        store.commit_vote(
            session.session_id,
            vote,
            feedtrustworth=feedback.trustworthiness,
            trust_before=trust_before,
            trust_after=trust_after,
        )
        return VoteOutcome(
            user_id=user_id,
            feedback_id=feedback_id,
            choice=choice,
            feedtrustworth=feedback.trustworthiness,
            adjustment=adjustment,
            trust_before=trust_before,
            trust_after=trust_after,
        )


def finalize_session(
    store: KnowledgeBase, lexicon: Lexicon, session_id: str, now: int
) -> SessionOutcome:
    """Close a fully-voted session.

    The user's review is classified and stored with trustworthiness equal
    to their final trust degree (-10 when classified Contradictory), and
    the rating enters the product score only when that trust is strictly
    positive. The whole step lands in one journal record, so a replay
    either sees the full finalization or none of it.
    """
    with store.lock:
        session = store.get_session(session_id)
        if session.state is not SessionState.VOTING:
            raise WrongStateError(
                f"session {session_id!r} is {session.state.value}, not Voting"
            )
        missing = session.unvoted
        if missing:
            raise IncompleteVotesError(list(missing))
        user = store.get_user(session.user_id)
        final_trust = user.trust_degree
        category = classify_feedback(session.text, lexicon)
        trustworthiness = TRUST_MIN if category is FeedbackCategory.CONTRADICTORY else final_trust
        feedback = FeedbackRecord(
            feedback_id=store.next_feedback_id(session.session_id),
            product_id=session.product_id,
            author_id=session.user_id,
            text=session.text,
            category=category,
            trustworthiness=trustworthiness,
            created_at=now,
            appreciation=session.appreciation,
        )
        aggregate, score = update_product_score(
            store.get_aggregate(session.product_id), session.appreciation, final_trust
        )
        included = final_trust > 0
        store.commit_finalization(session_id, feedback, aggregate if included else None)
        return SessionOutcome(
            session_id=session_id,
            final_trust=final_trust,
            feedback_trustworthiness=trustworthiness,
            score_included=included,
            new_product_score=score,
        )
