"""Lexicon parsing and the comment polarity scorer."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from ghreview.sentiment import (
    SentimentLexicon,
    default_lexicon,
    load_lexicon,
    parse_lexicon,
    repo_sentiment,
    score_comment,
    tokenize,
)

# every comment in the corpus fixture with its hand-computed score
FIXTURE_SCORES = {
    "Great work, this looks good to me": 0.75,
    "There is a bug in the error handling, please fix": -0.45,
    "Thanks, works fine now": 1.6 / 3,
    "Thanks for the review": 0.6,
    "I cannot reproduce this crash, unclear": 0.2,
    "Same problem here, annoying failure": -1.6 / 3,
    "Any update on this? Still failing for me": -0.5,
    "Excellent fix, merged": 0.9,
    "Looks wrong, the test is broken": -0.6,
    "Will take another look tomorrow": 0.0,
    "Nice catch, good idea": 0.65,
    "The driver crashes on startup": -0.7,
    "Confirmed, same crash here": -0.7,
    "Pushed a patch, please test": 0.0,
    "This solution is elegant and clean": 0.75,
    "Not great, the latency is worse": -0.7,
    "Benchmarks look fine after the fix": 0.4,
    "Very helpful discussion, thanks": 0.75,
    "This fails on the robot hardware": -0.5,
    "Known limitation of the sensor": -0.4,
    "Closing, duplicate of an older thread": 0.0,
    "Clean implementation, approved": 0.65,
    "This breaks the login flow": -0.6,
    "Still broken after the update": -0.6,
    "Really annoying regression": -0.65,
    "Please add a test to prevent this": 0.0,
    "Sorry, my mistake": -0.45,
    "Good progress, almost done": 0.7,
    "The docs are unclear here": -0.3,
    "Updated the description": 0.0,
}


def test_tokenize_lowercases_and_splits():
    assert tokenize("Looks GOOD to me!") == ["looks", "good", "to", "me"]
    assert tokenize("v1.2-rc3") == ["v1", "2", "rc3"]
    assert tokenize("") == []


def test_bundled_lexicon_loads():
    lex = default_lexicon()
    assert lex.entries and lex.negators and lex.intensifiers
    assert lex.version
    assert all(-1.0 <= v <= 1.0 for v in lex.entries.values())
    # the three vocabularies are disjoint roles
    assert not set(lex.entries) & lex.negators
    assert not set(lex.entries) & set(lex.intensifiers)


def test_parse_lexicon_syntax():
    lex = parse_lexicon("# demo v9\ngood\t0.5\nbad\t-0.5\n!not\n*very\t2.0\n")
    assert lex.version == "demo v9"
    assert lex.entries == {"good": 0.5, "bad": -0.5}
    assert lex.negators == {"not"}
    assert lex.intensifiers == {"very": 2.0}


def test_parse_lexicon_rejects_malformed():
    with pytest.raises(ValueError):
        parse_lexicon("good\n")
    with pytest.raises(ValueError):
        parse_lexicon("*very\n")
    with pytest.raises(ValueError):
        parse_lexicon("loud\t1.5\n")  # polarity out of range


def test_load_lexicon_from_path(tmp_path):
    path = tmp_path / "mini.tsv"
    path.write_text("ok\t0.3\n", encoding="utf-8")
    assert load_lexicon(path).entries == {"ok": 0.3}


def test_worked_examples():
    assert score_comment("Great work, this looks good to me") == pytest.approx(0.75)
    assert score_comment("not great") == pytest.approx(-0.8)


def test_all_fixture_comment_scores():
    for body, expected in FIXTURE_SCORES.items():
        assert score_comment(body) == pytest.approx(expected, abs=1e-12), body


def test_fixture_repo_means(tiny_corpus):
    a, b, c = tiny_corpus.repos
    assert repo_sentiment(a) == (pytest.approx(0.09), 10)
    assert repo_sentiment(b) == (pytest.approx(-0.45 / 11), 11)
    assert repo_sentiment(c) == (pytest.approx(-1.25 / 9), 9)


def test_no_hits_scores_zero():
    assert score_comment("zzz qqq xyzzy") == 0.0
    assert score_comment("") == 0.0


def test_negation_window_is_three_tokens():
    lex = SentimentLexicon(entries={"good": 0.5}, negators={"not"})
    assert score_comment("not good", lex) == -0.5
    assert score_comment("not a b good", lex) == -0.5  # three tokens back
    assert score_comment("not a b c good", lex) == 0.5  # out of the window


def test_intensifier_applies_to_next_token_only():
    lex = SentimentLexicon(entries={"good": 0.4}, intensifiers={"very": 2.0})
    assert score_comment("very good", lex) == 0.8
    assert score_comment("very well good", lex) == 0.4


def test_negated_intensified_token():
    lex = SentimentLexicon(entries={"good": 0.4}, negators={"not"}, intensifiers={"very": 2.0})
    assert score_comment("not very good", lex) == -0.8


def test_clamping():
    lex = SentimentLexicon(entries={"grand": 0.9}, intensifiers={"very": 3.0})
    assert score_comment("very grand", lex) == 1.0
    lex_neg = SentimentLexicon(entries={"awful": -0.9}, intensifiers={"very": 3.0})
    assert score_comment("very awful", lex_neg) == -1.0


# --- properties ------------------------------------------------------------

_WORDS = st.sampled_from(
    "great good bad terrible fine works broken not no very really the a of to it".split()
)


@settings(max_examples=300, deadline=None)
@given(st.lists(_WORDS, min_size=0, max_size=30))
def test_scores_always_in_unit_interval(words):
    score = score_comment(" ".join(words))
    assert -1.0 <= score <= 1.0


def test_random_streams_stay_bounded():
    lex = default_lexicon()
    vocab = list(lex.entries) + list(lex.negators) + list(lex.intensifiers) + ["zz", "q7"]
    rng = random.Random(0)
    for _ in range(2000):
        words = [rng.choice(vocab) for _ in range(rng.randint(0, 25))]
        assert -1.0 <= score_comment(" ".join(words), lex) <= 1.0


def test_sign_symmetry():
    # mirroring every polarity flips the score exactly
    lex = default_lexicon()
    mirrored = SentimentLexicon(
        entries={t: -v for t, v in lex.entries.items()},
        negators=set(lex.negators),
        intensifiers=dict(lex.intensifiers),
        version=lex.version,
    )
    rng = random.Random(1)
    vocab = list(lex.entries) + list(lex.negators) + list(lex.intensifiers)
    for _ in range(500):
        words = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 20)))
        assert score_comment(words, mirrored) == pytest.approx(-score_comment(words, lex), abs=1e-12)


def test_neutral_text_invariance():
    # tokens unknown to the lexicon never move the score
    lex = default_lexicon()
    rng = random.Random(2)
    fillers = ["qqq", "zzz9", "xblorp"]
    sentiments = list(lex.entries)
    for _ in range(200):
        core = [rng.choice(sentiments) for _ in range(rng.randint(1, 6))]
        padded = []
        for token in core:
            padded.extend(rng.choice(fillers) for _ in range(rng.randint(0, 3)))
            padded.append(token)
        # padding with unknown tokens may push negators/intensifiers out of
        # range only if core contained them; plain entries are unaffected
        assert score_comment(" ".join(core), lex) == pytest.approx(
            score_comment(" ".join(padded), lex), abs=1e-12
        )
