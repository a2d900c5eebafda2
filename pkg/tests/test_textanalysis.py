"""Sentiment scoring, classification, concordance, and lexicon parsing."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from trustrep import (
    FeedbackCategory,
    InvalidValueError,
    Lexicon,
    classify_feedback,
    default_lexicon,
    parse_lexicon,
    sentiment_score,
)
from trustrep import test_concordance as check_concordance

CARRY_LEXICON = Lexicon(entries={"easy": 0.5}, negators=frozenset({"not"}))

SCREEN_BATTERY = Lexicon(
    entries={"great": 0.8, "terrible": -0.8},
    aspect_terms=frozenset({"screen", "battery"}),
)


def test_negated_sentence_flips_polarity():
    report = sentiment_score("It is not easy to carry.", CARRY_LEXICON)
    assert [s.polarity for s in report.sentence_polarities] == [-0.5]
    assert report.overall == -0.5


def test_empty_text_rejected():
    for bad in ("", "   ", "\n\t"):
        with pytest.raises(InvalidValueError):
            sentiment_score(bad, CARRY_LEXICON)
        with pytest.raises(InvalidValueError):
            classify_feedback(bad, CARRY_LEXICON)


def test_two_sentence_report_and_mean():
    report = sentiment_score("great screen. terrible battery.", SCREEN_BATTERY)
    assert [s.polarity for s in report.sentence_polarities] == [0.8, -0.8]
    assert report.overall == 0.0
    assert report.sentence_polarities[0].aspect_tokens == frozenset({"screen"})
    assert report.sentence_polarities[1].aspect_tokens == frozenset({"battery"})


def test_negation_window_is_three_tokens():
    lexicon = Lexicon(entries={"easy": 0.5}, negators=frozenset({"not"}))
    # within the window: flipped
    assert sentiment_score("not a b easy", lexicon).overall == -0.5
    # one token past the window: untouched
    assert sentiment_score("not a b c easy", lexicon).overall == 0.5


def test_negator_role_wins_over_entry_weight():
    lexicon = Lexicon(entries={"not": -0.4, "easy": 0.5}, negators=frozenset({"not"}))
    # "not" contributes no weight, it only flips "easy"
    assert sentiment_score("not easy", lexicon).overall == -0.5


def test_sentence_polarity_clamped_to_unit_interval():
    lexicon = Lexicon(entries={"great": 0.8})
    assert sentiment_score("great great great", lexicon).overall == 1.0


def test_classify_negative():
    assert classify_feedback("It is not easy to carry.", CARRY_LEXICON) is FeedbackCategory.NEGATIVE


def test_classify_mitigated_on_distinct_aspects():
    assert (
        classify_feedback("great screen. terrible battery.", SCREEN_BATTERY)
        is FeedbackCategory.MITIGATED
    )


def test_classify_contradictory_on_shared_aspect():
    assert (
        classify_feedback("battery is great. battery is terrible.", SCREEN_BATTERY)
        is FeedbackCategory.CONTRADICTORY
    )


def test_classify_neutral_text_falls_back_to_mitigated():
    assert classify_feedback("it is a box.", SCREEN_BATTERY) is FeedbackCategory.MITIGATED


def test_weak_single_token_stays_neutral():
    lexicon = Lexicon(entries={"ok": 0.1})
    assert classify_feedback("it is ok.", lexicon) is FeedbackCategory.MITIGATED


def test_concordance_examples():
    lexicon = default_lexicon()
    assert check_concordance(5.0, "great screen. works well.", lexicon) is True
    assert check_concordance(1.0, "great screen. works well.", lexicon) is False
    assert check_concordance(3.0, "battery is great. battery is terrible.", lexicon) is False


def test_concordance_bands():
    lexicon = default_lexicon()
    positive = "the camera is excellent."
    negative = "the camera is terrible."
    mitigated = "the camera is excellent. the screen is terrible."
    assert check_concordance(3.5, positive, lexicon) is True
    assert check_concordance(3.4, positive, lexicon) is False
    assert check_concordance(2.5, negative, lexicon) is True
    assert check_concordance(2.6, negative, lexicon) is False
    assert check_concordance(2.0, mitigated, lexicon) is True
    assert check_concordance(4.0, mitigated, lexicon) is True
    assert check_concordance(1.9, mitigated, lexicon) is False
    assert check_concordance(4.1, mitigated, lexicon) is False


def test_concordance_rejects_out_of_range_appreciation():
    with pytest.raises(InvalidValueError):
        check_concordance(0.9, "great screen.", default_lexicon())
    with pytest.raises(InvalidValueError):
        check_concordance(5.1, "great screen.", default_lexicon())


def test_positive_concordance_monotone_in_appreciation():
    lexicon = default_lexicon()
    text = "the camera is excellent."
    values = [3.5 + 0.1 * i for i in range(16)]
    results = [check_concordance(a, text, lexicon) for a in values]
    assert all(results)


_WORDS = st.sampled_from(
    ["great", "terrible", "screen", "battery", "not", "the", "is", "box", "works"]
)


@st.composite
def _texts(draw):
    sentences = draw(st.lists(st.lists(_WORDS, min_size=1, max_size=6), min_size=1, max_size=4))
    return ". ".join(" ".join(words) for words in sentences) + "."


@given(text=_texts())
def test_sentiment_is_deterministic(text):
    lexicon = default_lexicon()
    assert sentiment_score(text, lexicon) == sentiment_score(text, lexicon)


@given(text=_texts())
def test_contradictory_requires_shared_polar_aspect(text):
    lexicon = default_lexicon()
    if classify_feedback(text, lexicon) is not FeedbackCategory.CONTRADICTORY:
        return
    report = sentiment_score(text, lexicon)
    positive_aspects = set()
    negative_aspects = set()
    for sentence in report.sentence_polarities:
        if sentence.polarity > 0.1:
            positive_aspects |= sentence.aspect_tokens
        elif sentence.polarity < -0.1:
            negative_aspects |= sentence.aspect_tokens
    assert positive_aspects & negative_aspects


@given(
    token=st.sampled_from(["great", "terrible", "easy", "excellent", "poor"]),
)
def test_negation_flip_is_symmetric(token):
    lexicon = default_lexicon()
    plain = sentiment_score(token, lexicon).overall
    negated = sentiment_score(f"not {token}", lexicon).overall
    assert negated == -plain
    assert abs(negated) == abs(plain)


def test_parse_lexicon_sections_and_comments():
    lexicon = parse_lexicon(
        "# comment\n"
        "great\t0.8\n"
        "poor\t-0.6\n"
        "\n"
        "[negators]\n"
        "not\n"
        "[aspects]\n"
        "screen\n"
    )
    assert lexicon.entries == {"great": 0.8, "poor": -0.6}
    assert lexicon.negators == frozenset({"not"})
    assert lexicon.aspect_terms == frozenset({"screen"})


def test_parse_lexicon_rejects_bad_lines():
    with pytest.raises(InvalidValueError):
        parse_lexicon("great 0.8\n")  # no tab
    with pytest.raises(InvalidValueError):
        parse_lexicon("great\tmuch\n")
    with pytest.raises(InvalidValueError):
        parse_lexicon("great\t1.5\n")
    with pytest.raises(InvalidValueError):
        parse_lexicon("[bogus]\n")
    with pytest.raises(InvalidValueError):
        parse_lexicon("")


def test_default_lexicon_is_substantial():
    lexicon = default_lexicon()
    assert len(lexicon.entries) >= 50
    assert lexicon.negators
    assert lexicon.aspect_terms
