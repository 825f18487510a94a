from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from agentreg.corpus import WEB_SEARCH_ANNOTATED_SPANS, synthetic_corpus
from agentreg.rhetoric import (
    STACK_THRESHOLD,
    FeatureReport,
    FramingLevel,
    LexiconError,
    Param,
    ToolDescription,
    analyze,
    classify_level,
    detect_features,
    find_spans,
    parse_lexicon,
)


def report(**counts) -> FeatureReport:
    base = dict(social_proof=0, superlative=0, authority=0, outcome_framing=0, keyword_density=0,
                matched_spans=(), urgency_marker_count=0)
    base.update(counts)
    return FeatureReport(**base)


def test_neutral_web_search_is_l0(pair, lex):
    rep, level = analyze(pair[0], lex)
    assert level == FramingLevel.L0
    assert rep.claim_count == 0
    assert rep.matched_spans == ()


def test_optimized_web_search_counts(pair, lex):
    rep, level = analyze(pair[1], lex)
    assert level == FramingLevel.L4
    assert (rep.superlative, rep.social_proof, rep.authority, rep.outcome_framing) == (4, 2, 2, 7)
    assert rep.keyword_density == 4


def test_annotated_phrases_all_detected(pair, lex):
    found = " | ".join(s.text.lower() for s in find_spans(pair[1].body, lex))
    for phrase in WEB_SEARCH_ANNOTATED_SPANS:
        assert phrase.lower() in found, phrase


def test_superlative_list():
    rep = detect_features("The fastest, best, most accurate search.")
    assert rep.superlative == 3


def test_exempt_phrases_do_not_count():
    rep = detect_features("Returns at most 5 results, best effort delivery, the most recent items.")
    assert rep.superlative == 0


def test_spans_do_not_overlap(pair, lex):
    spans = sorted(find_spans(pair[1].body, lex), key=lambda s: s.start)
    for a, b in zip(spans, spans[1:]):
        assert a.end <= b.start


@pytest.mark.parametrize("counts, level", [
    ({}, FramingLevel.L0),
    ({"authority": 1}, FramingLevel.L1),
    ({"social_proof": 1}, FramingLevel.L1),
    ({"outcome_framing": 1}, FramingLevel.L2),
    ({"social_proof": 1, "authority": 1}, FramingLevel.L2),
    ({"superlative": 1}, FramingLevel.L3),
    ({"superlative": 1, "authority": 1}, FramingLevel.L3),
    ({"superlative": 1, "authority": 1, "social_proof": 1}, FramingLevel.L3),
    ({"superlative": 3}, FramingLevel.L4),
    ({"superlative": 1, "urgency_marker_count": 1}, FramingLevel.L4),
])
def test_classify_level_codebook(counts, level):
    assert classify_level(report(**counts)) == level


def test_urgency_alone_is_not_l0():
    assert classify_level(report(urgency_marker_count=1)) >= FramingLevel.L1


def test_stack_threshold_value():
    assert STACK_THRESHOLD == 3


def test_empty_description_is_l0():
    assert analyze("")[1] == FramingLevel.L0


def test_duplicate_param_names_rejected():
    with pytest.raises(ValueError):
        ToolDescription("t", "t", "body", (Param("q", "string"), Param("q", "int")))


def test_framing_level_parse():
    assert FramingLevel.parse("l3") == FramingLevel.L3
    assert FramingLevel.parse(2) == FramingLevel.L2
    assert str(FramingLevel.L4) == "L4"


def test_overlapping_categories_rejected():
    text = "[lexicon]\nversion = x\n[superlative]\nbest\n[authority]\nbest\n"
    with pytest.raises(LexiconError):
        parse_lexicon(text)


def test_custom_lexicon_round_trip():
    lex = parse_lexicon("[lexicon]\nversion = t1\n[superlative]\nfastest\n[social_proof]\ntrusted by\n")
    assert lex.version == "t1"
    rep = detect_features("Fastest tool, trusted by many.", lex)
    assert (rep.superlative, rep.social_proof) == (1, 1)


def test_synthetic_corpus_levels(lex):
    corpus = synthetic_corpus()
    assert len(corpus) == 50
    for desc, level in corpus:
        assert analyze(desc, lex)[1] == level, desc.id


# Monotonicity: appending a claim never lowers the level.
claims = st.sampled_from(["Trusted by analysts.", "The fastest tool.", "Recommended by experts.",
                          "Delivers reliable output.", "Act now."])


@given(st.lists(claims, max_size=4), claims)
def test_adding_claims_never_lowers_level(base, extra):
    body = "Returns weather data. " + " ".join(base)
    before = analyze(body)[1]
    after = analyze(body + " " + extra)[1]
    assert after >= before


@given(st.lists(claims, max_size=4), st.sampled_from(["The fastest tool.", "Most accurate results.", "Best option."]))
def test_adding_superlative_never_lowers_level(base, sup):
    body = "Returns weather data. " + " ".join(base)
    assert analyze(body + " " + sup)[1] >= analyze(body)[1]


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=200))
def test_detect_features_total(text):
    rep = detect_features(text)
    assert rep.claim_count >= 0
    assert all(0 <= s.start < s.end <= len(text) for s in rep.matched_spans)
    assert all(text[s.start:s.end] == s.text for s in rep.matched_spans)
    assert detect_features(text) == rep
