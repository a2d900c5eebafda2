"""HTTP/JSON facade over the reputation engine.

Thin adapters only: every endpoint delegates to the library and echoes the
journaled state. Non-success responses carry exactly one error object of
shape {code, message, retry_after_seconds?}. There is no authentication;
user_id is trusted input, so deploy behind a gateway that owns identity.

In test mode the caller supplies the clock through an ``X-Now`` header
(integer UTC seconds); in production the server clock is used.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from . import engine
from .domain import FeedbackCategory, SessionState, VoteChoice
from .errors import BlacklistedError, TrustRepError
from .store import DEFAULT_BLACKLIST_TTL, KnowledgeBase
from .textanalysis import Lexicon, default_lexicon, load_lexicon

_STATUS_BY_CODE = {
    "invalid_value": 400,
    "invalid_k": 400,
    "invalid_request": 400,
    "blacklisted": 403,
    "unknown_user": 404,
    "unknown_feedback": 404,
    "unknown_session": 404,
    "duplicate_user": 409,
    "duplicate_feedback": 409,
    "duplicate_session": 409,
    "duplicate_vote": 409,
    "not_in_selection": 409,
    "wrong_state": 409,
    "incomplete_votes": 409,
    "discordant": 409,
    "corrupt_journal": 500,
}


@dataclass
class Settings:
    journal_path: str | None = None
    lexicon_path: str | None = None
    blacklist_ttl: int = DEFAULT_BLACKLIST_TTL
    default_k: int = engine.DEFAULT_K
    test_mode: bool = False

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            journal_path=os.environ.get("TRUSTREP_JOURNAL") or None,
            lexicon_path=os.environ.get("TRUSTREP_LEXICON") or None,
            blacklist_ttl=int(os.environ.get("TRUSTREP_BLACKLIST_TTL", DEFAULT_BLACKLIST_TTL)),
            default_k=int(os.environ.get("TRUSTREP_DEFAULT_K", engine.DEFAULT_K)),
            test_mode=os.environ.get("TRUSTREP_TEST_MODE", "") == "1",
        )


class CreateUserBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    user_id: str


class ReviewBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    user_id: str
    product_id: str
    appreciation: float
    text: str
    k: int | None = None


class VoteBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    feedback_id: str
    choice: Literal["Like", "Dislike"]


def _error_payload(code: str, message: str, retry_after_seconds: int | None = None) -> dict:
    payload = {"code": code, "message": message}
    if retry_after_seconds is not None:
        payload["retry_after_seconds"] = retry_after_seconds
    return payload


def _feedback_payload(feedback) -> dict:
    return {
        "feedback_id": feedback.feedback_id,
        "product_id": feedback.product_id,
        "author_id": feedback.author_id,
        "text": feedback.text,
        "category": feedback.category.value,
        "trustworthiness": feedback.trustworthiness,
        "created_at": feedback.created_at,
        "appreciation": feedback.appreciation,
    }


def _session_payload(session, store: KnowledgeBase) -> dict:
    # trustworthiness stays server-side: voters must judge content, not scores
    served = [store.get_feedback(fid) for fid in session.selection]
    return {
        "session_id": session.session_id,
        "user_id": session.user_id,
        "product_id": session.product_id,
        "state": session.state.value,
        "thin": session.thin,
        "selection": [
            {"feedback_id": f.feedback_id, "text": f.text, "category": f.category.value}
            for f in served
        ],
        "votes_cast": len(session.votes),
    }


def create_app(
    settings: Settings | None = None,
    store: KnowledgeBase | None = None,
    lexicon: Lexicon | None = None,
) -> FastAPI:
    settings = settings or Settings()
    if store is None:
        store = (
            KnowledgeBase.load(settings.journal_path)
            if settings.journal_path
            else KnowledgeBase()
        )
    if lexicon is None:
        lexicon = load_lexicon(settings.lexicon_path) if settings.lexicon_path else default_lexicon()

    app = FastAPI(title="trustrep", version="0.1.0")
    # the review console is served from another origin; no credentials in play
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.lexicon = lexicon
    app.state.settings = settings

    def now_of(request: Request) -> int:
        if settings.test_mode:
            header = request.headers.get("x-now")
            if header is not None:
                return int(header)
        return int(time.time())

    @app.exception_handler(TrustRepError)
    async def handle_library_error(request: Request, exc: TrustRepError):
        retry = exc.retry_after_seconds if isinstance(exc, BlacklistedError) else None
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=_error_payload(exc.code, exc.message, retry))

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=_error_payload("invalid_request", str(exc.errors()[:3])),
        )

    @app.post("/users", status_code=201)
    def create_user(body: CreateUserBody, request: Request):
        user = store.create_user(body.user_id, now_of(request))
        return {"user_id": user.user_id, "trust_degree": user.trust_degree}

    @app.post("/reviews", status_code=201)
    def post_review(body: ReviewBody, request: Request):
        session = engine.submit_review(
            store,
            lexicon,
            user_id=body.user_id,
            product_id=body.product_id,
            appreciation=body.appreciation,
            text=body.text,
            now=now_of(request),
            k=body.k if body.k is not None else settings.default_k,
            blacklist_ttl=settings.blacklist_ttl,
        )
        if session.state is SessionState.REJECTED:
            return JSONResponse(
                status_code=409,
                content=_error_payload(
                    "discordant",
                    "rating and review text disagree; submission rejected and user blacklisted",
                    settings.blacklist_ttl,
                ),
            )
        return _session_payload(session, store)

    @app.post("/sessions/{session_id}/votes")
    def post_vote(session_id: str, body: VoteBody, request: Request):
        session = store.get_session(session_id)
        outcome = engine.process_vote(
            store,
            user_id=session.user_id,
            feedback_id=body.feedback_id,
            choice=VoteChoice(body.choice),
            now=now_of(request),
            session_id=session_id,
        )
        return {
            "session_id": session_id,
            "user_id": outcome.user_id,
            "feedback_id": outcome.feedback_id,
            "choice": outcome.choice.value,
            "trust_before": outcome.trust_before,
            "trust_after": outcome.trust_after,
        }

    @app.post("/sessions/{session_id}/finalize")
    def post_finalize(session_id: str, request: Request):
        outcome = engine.finalize_session(store, lexicon, session_id, now_of(request))
        return {
            "session_id": outcome.session_id,
            "final_trust": outcome.final_trust,
            "feedback_trustworthiness": outcome.feedback_trustworthiness,
            "score_included": outcome.score_included,
            "new_product_score": outcome.new_product_score,
        }

    @app.get("/products/{product_id}/score")
    def get_score(product_id: str):
        aggregate = store.get_aggregate(product_id)
        score = aggregate.score
        return {
            "product_id": product_id,
            "score": score if score is not None else "unrated",
            "rating_count": aggregate.rating_count,
        }

    @app.get("/users/{user_id}/trust")
    def get_trust(user_id: str, request: Request):
        user = store.get_user(user_id)
        now = now_of(request)
        remaining = store.blacklist_remaining(user_id, now)
        return {
            "user_id": user.user_id,
            "trust_degree": user.trust_degree,
            "blacklisted": remaining > 0,
            "blacklist_until": user.blacklist_until,
            "retry_after_seconds": remaining if remaining > 0 else None,
        }

    @app.get("/products/{product_id}/feedbacks")
    def get_feedbacks(product_id: str, category: str | None = None):
        parsed = None
        if category is not None:
            try:
                parsed = FeedbackCategory(category)
            except ValueError:
                return JSONResponse(
                    status_code=400,
                    content=_error_payload(
                        "invalid_request",
                        f"category must be one of {[c.value for c in FeedbackCategory]}",
                    ),
                )
        feedbacks = store.feedbacks_for_product(product_id, parsed)
        return {
            "product_id": product_id,
            "feedbacks": [_feedback_payload(f) for f in feedbacks],
        }

    return app
