"""Trust-weighted reputation engine for e-commerce reviews."""

from .domain import (
    APPRECIATION_MAX,
    APPRECIATION_MIN,
    CATEGORY_ORDER,
    SELECTION_MAX,
    SELECTION_MIN,
    TRUST_MAX,
    TRUST_MIN,
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
from .engine import (
    DEFAULT_K,
    AdjustmentKind,
    SessionOutcome,
    TrustAdjustment,
    VoteOutcome,
    apply_adjustment,
    finalize_session,
    process_vote,
    submit_review,
    trust_adjustment,
    update_product_score,
)
from .errors import (
    BlacklistedError,
    DuplicateFeedbackError,
    DuplicateUserError,
    DuplicateVoteError,
    IncompleteVotesError,
    InvalidSelectionSizeError,
    InvalidValueError,
    JournalError,
    NotInSelectionError,
    TrustRepError,
    UnknownFeedbackError,
    UnknownSessionError,
    UnknownUserError,
    WrongStateError,
)
from .store import DEFAULT_BLACKLIST_TTL, KnowledgeBase, Selection, load_store
from .textanalysis import (
    Lexicon,
    SentimentReport,
    classify_feedback,
    default_lexicon,
    load_lexicon,
    parse_lexicon,
    sentiment_score,
    test_concordance,
)

__version__ = "0.1.0"
