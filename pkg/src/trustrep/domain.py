"""Core domain types shared by every module.

Conventions:
  - trust degrees and feedback trustworthiness live on the closed scale
    [-10, 10]; product appreciations (star ratings) live on [1, 5];
  - timestamps are integer UTC seconds;
  - identifiers are opaque non-empty strings, never interpreted;
  - records are immutable snapshots. All mutation goes through the
    knowledge base, which swaps in replaced copies, so a record read once
    can be handed to any number of concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import InvalidValueError

TRUST_MIN = -10.0
TRUST_MAX = 10.0
APPRECIATION_MIN = 1.0
APPRECIATION_MAX = 5.0
SELECTION_MIN = 4
SELECTION_MAX = 10


class FeedbackCategory(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    MITIGATED = "Mitigated"
    CONTRADICTORY = "Contradictory"


#: Fixed category order used by the round-robin selection.
CATEGORY_ORDER = (
    FeedbackCategory.POSITIVE,
    FeedbackCategory.NEGATIVE,
    FeedbackCategory.MITIGATED,
    FeedbackCategory.CONTRADICTORY,
)


class VoteChoice(str, Enum):
    LIKE = "Like"
    DISLIKE = "Dislike"


class SessionState(str, Enum):
    SUBMITTED = "Submitted"
    REJECTED = "Rejected"
    VOTING = "Voting"
    FINALIZED = "Finalized"


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidValueError(message)


def _require_id(value: str, name: str) -> None:
    _require(isinstance(value, str) and value.strip() != "", f"{name} must be a non-empty string")


def _require_timestamp(value, name: str) -> None:
    _require(isinstance(value, int) and not isinstance(value, bool), f"{name} must be an integer UTC timestamp")


@dataclass(frozen=True)
class UserRecord:
    """A participant. Fresh users start neutral at trust 0."""

    user_id: str
    trust_degree: float
    created_at: int
    blacklist_until: int | None = None

    def __post_init__(self):
        _require_id(self.user_id, "user_id")
        _require_timestamp(self.created_at, "created_at")
        _require(
            TRUST_MIN <= self.trust_degree <= TRUST_MAX,
            f"trust_degree {self.trust_degree} outside [{TRUST_MIN}, {TRUST_MAX}]",
        )
        object.__setattr__(self, "trust_degree", float(self.trust_degree))
        if self.blacklist_until is not None:
            _require_timestamp(self.blacklist_until, "blacklist_until")
            _require(
                self.blacklist_until >= self.created_at,
                "blacklist_until precedes created_at",
            )


def new_user(user_id: str, created_at: int) -> UserRecord:
    """Build a brand-new user record: neutral trust, no blacklist."""
    return UserRecord(user_id=user_id, trust_degree=0.0, created_at=created_at)


@dataclass(frozen=True)
class FeedbackRecord:
    """A stored review, either prefabricated stock or a finalized submission.

    ``trustworthiness`` mirrors the author's trust degree at the time the
    record was assigned; contradictory content is pinned at -10.
    """

    feedback_id: str
    product_id: str
    author_id: str
    text: str
    category: FeedbackCategory
    trustworthiness: float
    created_at: int
    appreciation: float

    def __post_init__(self):
        _require_id(self.feedback_id, "feedback_id")
        _require_id(self.product_id, "product_id")
        _require_id(self.author_id, "author_id")
        _require(isinstance(self.text, str) and self.text.strip() != "", "text must be non-empty")
        _require(isinstance(self.category, FeedbackCategory), "category must be a FeedbackCategory")
        _require_timestamp(self.created_at, "created_at")
        _require(
            TRUST_MIN <= self.trustworthiness <= TRUST_MAX,
            f"trustworthiness {self.trustworthiness} outside [{TRUST_MIN}, {TRUST_MAX}]",
        )
        if self.category is FeedbackCategory.CONTRADICTORY:
            _require(
                float(self.trustworthiness) == TRUST_MIN,
                "contradictory feedback must carry trustworthiness -10",
            )
        _require(
            APPRECIATION_MIN <= self.appreciation <= APPRECIATION_MAX,
            f"appreciation {self.appreciation} outside [{APPRECIATION_MIN}, {APPRECIATION_MAX}]",
        )
        object.__setattr__(self, "trustworthiness", float(self.trustworthiness))
        object.__setattr__(self, "appreciation", float(self.appreciation))


@dataclass(frozen=True)
class ProductAggregate:
    """Running trust-weighted rating sums for one product.

    ``weighted_sum`` is the sum of appreciation * trust over included
    raters, ``coefficient_sum`` the sum of their trust degrees. Only
    strictly positive trust is ever included, so the derived score is a
    convex combination of appreciations and stays on [1, 5].
    """

    product_id: str
    weighted_sum: float = 0.0
    coefficient_sum: float = 0.0
    rating_count: int = 0

    def __post_init__(self):
        _require_id(self.product_id, "product_id")
        _require(self.rating_count >= 0, "rating_count must be non-negative")
        if self.rating_count == 0:
            _require(
                self.weighted_sum == 0.0 and self.coefficient_sum == 0.0,
                "empty aggregate must have zero sums",
            )
        else:
            _require(self.coefficient_sum > 0.0, "coefficient_sum must be positive when rated")
        object.__setattr__(self, "weighted_sum", float(self.weighted_sum))
        object.__setattr__(self, "coefficient_sum", float(self.coefficient_sum))

    @property
    def score(self) -> float | None:
        """Trust-weighted mean appreciation; None while unrated."""
        if self.rating_count == 0:
            return None
        return self.weighted_sum / self.coefficient_sum


@dataclass(frozen=True)
class Vote:
    """One like/dislike act on a served feedback."""

    user_id: str
    feedback_id: str
    choice: VoteChoice
    cast_at: int

    def __post_init__(self):
        _require_id(self.user_id, "user_id")
        _require_id(self.feedback_id, "feedback_id")
        _require(isinstance(self.choice, VoteChoice), "choice must be Like or Dislike")
        _require_timestamp(self.cast_at, "cast_at")


@dataclass(frozen=True)
class ReviewSession:
    """A user's full review interaction, from submission to finalization.

    ``selection`` is the ordered list of feedback ids served for voting;
    ``thin`` marks selections that could not reach the requested size.
    """

    session_id: str
    user_id: str
    product_id: str
    appreciation: float
    text: str
    selection: tuple[str, ...] = ()
    votes: tuple[Vote, ...] = ()
    state: SessionState = SessionState.SUBMITTED
    thin: bool = False
    created_at: int = 0

    def __post_init__(self):
        _require_id(self.session_id, "session_id")
        _require_id(self.user_id, "user_id")
        _require_id(self.product_id, "product_id")
        _require(
            APPRECIATION_MIN <= self.appreciation <= APPRECIATION_MAX,
            f"appreciation {self.appreciation} outside [{APPRECIATION_MIN}, {APPRECIATION_MAX}]",
        )
        _require(isinstance(self.text, str) and self.text.strip() != "", "text must be non-empty")
        _require(isinstance(self.state, SessionState), "state must be a SessionState")
        _require_timestamp(self.created_at, "created_at")
        object.__setattr__(self, "appreciation", float(self.appreciation))
        _require(
            len(set(self.selection)) == len(self.selection),
            "selection must not contain duplicates",
        )
        voted = [v.feedback_id for v in self.votes]
        _require(len(set(voted)) == len(voted), "at most one vote per feedback")
        _require(
            set(voted) <= set(self.selection),
            "votes must target served feedbacks",
        )
        if self.state is SessionState.FINALIZED:
            _require(
                set(voted) == set(self.selection),
                "finalized session must have one vote per served feedback",
            )

    @property
    def unvoted(self) -> tuple[str, ...]:
        voted = {v.feedback_id for v in self.votes}
        return tuple(fid for fid in self.selection if fid not in voted)


#: Legal session state transitions.
SESSION_TRANSITIONS: dict[SessionState, frozenset[SessionState]] = {
    SessionState.SUBMITTED: frozenset({SessionState.REJECTED, SessionState.VOTING}),
    SessionState.REJECTED: frozenset(),
    SessionState.VOTING: frozenset({SessionState.FINALIZED}),
    SessionState.FINALIZED: frozenset(),
}
