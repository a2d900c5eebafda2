"""Lexicon-based sentence sentiment, four-way review classification, and
rating/text concordance.

Scoring rules, fixed so results are reproducible:
  - sentences split on ``. ! ? ;``, tokens on non-alphanumerics, lowercased;
  - a sentence's polarity is the sum of lexicon weights of its tokens,
    clamped to [-1, 1]; a weighted token occurring within 3 tokens after a
    negator has its weight sign flipped; tokens acting as negators carry
    no weight of their own;
  - a sentence is polar when |polarity| > 0.1 (single weak tokens stay
    neutral);
  - classification: a shared aspect noun in both a positive and a negative
    sentence means Contradictory; positive and negative sentences about
    different aspects mean Mitigated; otherwise the polar side wins, and
    fully neutral text falls back to Mitigated;
  - concordance maps the [1, 5] rating onto the category: Positive needs
    >= 3.5, Negative needs <= 2.5, Mitigated needs [2, 4], Contradictory
    never concords.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .domain import APPRECIATION_MAX, APPRECIATION_MIN, FeedbackCategory
from .errors import InvalidValueError

NEGATION_WINDOW = 3
POLARITY_DEADBAND = 0.1

_SENTENCE_BREAK = re.compile(r"[.!?;]")
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Lexicon:
    """Token weights in [-1, 1], negator tokens, and aspect nouns.

    A token may appear both as an entry and as a negator; the negator role
    wins while scanning.
    """

    entries: dict[str, float]
    negators: frozenset[str] = frozenset()
    aspect_terms: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.entries:
            raise InvalidValueError("lexicon entries must be non-empty")
        for token, weight in self.entries.items():
            if not -1.0 <= weight <= 1.0:
                raise InvalidValueError(f"lexicon weight for {token!r} outside [-1, 1]")


@dataclass(frozen=True)
class SentenceScore:
    text: str
    polarity: float
    aspect_tokens: frozenset[str]


@dataclass(frozen=True)
class SentimentReport:
    """Per-sentence polarities plus their arithmetic mean."""

    sentence_polarities: tuple[SentenceScore, ...]
    overall: float


def tokenize(sentence: str) -> list[str]:
    return _TOKEN.findall(sentence.lower())


def _require_text(text: str) -> str:
    if not isinstance(text, str) or text.strip() == "":
        raise InvalidValueError("text must be non-empty")
    return text


def _score_sentence(sentence: str, lexicon: Lexicon) -> SentenceScore:
    tokens = tokenize(sentence)
    total = 0.0
    for i, token in enumerate(tokens):
        if token in lexicon.negators:
            continue
        weight = lexicon.entries.get(token)
        if weight is None:
            continue
        window = tokens[max(0, i - NEGATION_WINDOW):i]
        if any(t in lexicon.negators for t in window):
            weight = -weight
        total += weight
    polarity = max(-1.0, min(1.0, total))
    aspects = frozenset(t for t in tokens if t in lexicon.aspect_terms)
    return SentenceScore(text=sentence, polarity=polarity, aspect_tokens=aspects)


def sentiment_score(text: str, lexicon: Lexicon) -> SentimentReport:
    """Score every sentence of ``text`` against ``lexicon``.

    Deterministic: identical (text, lexicon) pairs yield identical reports.
    Rejects text that is empty after trimming.
    """
    _require_text(text)
    sentences = [chunk.strip() for chunk in _SENTENCE_BREAK.split(text)]
    scored = tuple(_score_sentence(s, lexicon) for s in sentences if s)
    if not scored:
        # only separators survived; no sentence carries a claim
        return SentimentReport(sentence_polarities=(), overall=0.0)
    overall = sum(s.polarity for s in scored) / len(scored)
    return SentimentReport(sentence_polarities=scored, overall=overall)


def classify_feedback(text: str, lexicon: Lexicon) -> FeedbackCategory:
    """Assign one of the four review categories to ``text``."""
    report = sentiment_score(text, lexicon)
    positive = [s for s in report.sentence_polarities if s.polarity > POLARITY_DEADBAND]
    negative = [s for s in report.sentence_polarities if s.polarity < -POLARITY_DEADBAND]
    positive_aspects = frozenset().union(*(s.aspect_tokens for s in positive)) if positive else frozenset()
    negative_aspects = frozenset().union(*(s.aspect_tokens for s in negative)) if negative else frozenset()
    if positive_aspects & negative_aspects:
        return FeedbackCategory.CONTRADICTORY
    if positive and negative:
        return FeedbackCategory.MITIGATED
    if positive:
        return FeedbackCategory.POSITIVE
    if negative:
        return FeedbackCategory.NEGATIVE
    return FeedbackCategory.MITIGATED


def test_concordance(appreciation: float, text: str, lexicon: Lexicon) -> bool:
    """True when the numeric rating agrees with the text's classified polarity."""
    if not APPRECIATION_MIN <= appreciation <= APPRECIATION_MAX:
        raise InvalidValueError(
            f"appreciation {appreciation} outside [{APPRECIATION_MIN}, {APPRECIATION_MAX}]"
        )
    category = classify_feedback(text, lexicon)
    if category is FeedbackCategory.POSITIVE:
        return appreciation >= 3.5
    if category is FeedbackCategory.NEGATIVE:
        return appreciation <= 2.5
    if category is FeedbackCategory.MITIGATED:
        return 2.0 <= appreciation <= 4.0
    return False


def parse_lexicon(content: str) -> Lexicon:
    """Parse the tab-separated lexicon format.

    Main section lines are ``token<TAB>weight``; ``[negators]`` and
    ``[aspects]`` sections list one token per line; ``#`` starts a comment.
    """
    entries: dict[str, float] = {}
    negators: set[str] = set()
    aspects: set[str] = set()
    section = "entries"
    for line_number, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in ("negators", "aspects"):
                raise InvalidValueError(f"lexicon line {line_number}: unknown section [{name}]")
            section = name
            continue
        if section == "entries":
            parts = line.split("\t")
            if len(parts) != 2:
                raise InvalidValueError(
                    f"lexicon line {line_number}: expected token<TAB>weight"
                )
            token = parts[0].strip().lower()
            try:
                weight = float(parts[1])
            except ValueError:
                raise InvalidValueError(
                    f"lexicon line {line_number}: weight {parts[1]!r} is not a number"
                ) from None
            if not -1.0 <= weight <= 1.0:
                raise InvalidValueError(f"lexicon line {line_number}: weight outside [-1, 1]")
            entries[token] = weight
        elif section == "negators":
            negators.add(line.lower())
        else:
            aspects.add(line.lower())
    return Lexicon(entries=entries, negators=frozenset(negators), aspect_terms=frozenset(aspects))


def load_lexicon(path: str | Path) -> Lexicon:
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    """The lexicon shipped with the package."""
    content = resources.files("trustrep").joinpath("data/default_lexicon.tsv").read_text("utf-8")
    return parse_lexicon(content)
