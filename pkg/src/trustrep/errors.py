"""Exception types shared across the package.

Every rejection carries a stable machine-readable ``code`` so the HTTP
layer can map library errors onto wire errors without string matching.
"""

from __future__ import annotations


class TrustRepError(Exception):
    code = "error"

    @property
    def message(self) -> str:
        return str(self)


class InvalidValueError(TrustRepError):
    code = "invalid_value"


class InvalidSelectionSizeError(InvalidValueError):
    code = "invalid_k"


class DuplicateUserError(TrustRepError):
    code = "duplicate_user"


class DuplicateFeedbackError(TrustRepError):
    code = "duplicate_feedback"


class DuplicateSessionError(TrustRepError):
    code = "duplicate_session"


class DuplicateVoteError(TrustRepError):
    code = "duplicate_vote"


class UnknownUserError(TrustRepError):
    code = "unknown_user"


class UnknownFeedbackError(TrustRepError):
    code = "unknown_feedback"


class UnknownSessionError(TrustRepError):
    code = "unknown_session"


class NotInSelectionError(TrustRepError):
    code = "not_in_selection"


class WrongStateError(TrustRepError):
    code = "wrong_state"


class IncompleteVotesError(TrustRepError):
    """Finalization refused; ``missing`` lists the unvoted feedback ids."""

    code = "incomplete_votes"

    def __init__(self, missing: list[str]):
        super().__init__(f"unvoted feedbacks: {', '.join(missing)}")
        self.missing = list(missing)


class BlacklistedError(TrustRepError):
    """Submission refused while the user's blacklist window is active."""

    code = "blacklisted"

    def __init__(self, user_id: str, retry_after_seconds: int):
        super().__init__(
            f"user {user_id!r} is blacklisted for another {retry_after_seconds} s"
        )
        self.retry_after_seconds = retry_after_seconds


class JournalError(TrustRepError):
    """A journal line could not be parsed or applied; names the line."""

    code = "corrupt_journal"

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"journal line {line_number}: {reason}")
        self.line_number = line_number
