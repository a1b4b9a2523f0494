import random

import numpy as np
import pytest

from rtt_attack.backends import (
    LanguageId,
    LexiconClassifier,
    PhraseTable,
    TableTranslator,
    hashed_encode,
)
from rtt_attack.constraints import (
    ConstraintSet,
    angular_similarity,
    check_edit_distance,
    check_pos,
    check_pre,
    check_rtt,
    check_sentence_similarity,
    levenshtein,
)
from rtt_attack.text_core import tokenize

from .oracles import oracle_angular, oracle_encode, oracle_levenshtein


class TestCheckPre:
    CS = ConstraintSet()

    def test_stopword_fails(self):
        s = tokenize("the movie")
        assert not check_pre(self.CS, s, 0, frozenset({"the"}), set())

    def test_modified_position_fails(self):
        s = tokenize("the movie")
        assert not check_pre(self.CS, s, 1, frozenset(), {1})

    def test_fresh_content_word_passes(self):
        s = tokenize("the movie")
        assert check_pre(self.CS, s, 1, frozenset({"the"}), set())

    def test_flags_can_disable_both_gates(self):
        cs = ConstraintSet(stopwords_immutable=False, repeat_immutable=False)
        s = tokenize("the movie")
        assert check_pre(cs, s, 0, frozenset({"the"}), {0})


class TestCheckPos:
    LEX = {
        "good": frozenset({"ADJ"}),
        "fine": frozenset({"ADJ"}),
        "run": frozenset({"VERB"}),
        "runner": frozenset({"NOUN"}),
        "fast": frozenset({"ADV"}),
    }

    def test_same_tag_passes(self):
        assert check_pos("good", "fine", self.LEX)

    def test_noun_verb_exception(self):
        assert check_pos("runner", "run", self.LEX)
        assert check_pos("run", "runner", self.LEX)

    def test_disjoint_tags_fail(self):
        assert not check_pos("good", "fast", self.LEX)

    def test_unknown_matches_only_unknown(self):
        assert check_pos("zzz", "qqq", self.LEX)
        assert not check_pos("zzz", "good", self.LEX)


class _FixedEncoder:
    def __init__(self, mapping):
        self.mapping = mapping

    def encode(self, texts):
        return [np.array(self.mapping[t], dtype=np.float64) for t in texts]


class TestSentenceSimilarity:
    def test_identical_sentences_score_one(self):
        s = tokenize("good movie tonight")
        score, ok = check_sentence_similarity(
            s, s, _FixedEncoder({s.text: [1.0, 0.0]}), threshold=1.0
        )
        assert score == pytest.approx(1.0)
        assert ok

    def test_orthogonal_encodings_score_half(self):
        a, b = tokenize("alpha"), tokenize("beta")
        enc = _FixedEncoder({"alpha": [1.0, 0.0], "beta": [0.0, 1.0]})
        score, ok = check_sentence_similarity(a, b, enc, threshold=0.84)
        assert score == pytest.approx(0.5)
        assert not ok

    def test_hashed_encoder_matches_hand_computation(self):
        orig = tokenize("the food was awful during our visit tonight friends agreed")
        cand = tokenize("the food was awfu1 during our visit tonight friends agreed")
        expected = oracle_angular(oracle_encode(orig.text), oracle_encode(cand.text))
        from rtt_attack.backends import HashedEncoder

        score, ok = check_sentence_similarity(orig, cand, HashedEncoder(), threshold=0.84)
        assert score == pytest.approx(expected, abs=1e-12)
        assert ok == (expected >= 0.84)

    def test_angular_similarity_range_and_parallel_case(self):
        u = np.array([0.6, 0.8])
        assert angular_similarity(u, 2.5 * u) == pytest.approx(1.0)
        assert 0.0 <= angular_similarity(u, np.array([-0.6, -0.8])) <= 1.0


class TestEditDistance:
    def test_identical_zero(self):
        assert check_edit_distance("same", "same", 30) == (0, True)

    def test_kitten_sitting(self):
        assert levenshtein("kitten", "sitting") == 3
        assert levenshtein("kitten", "sitting") == oracle_levenshtein("kitten", "sitting")

    def test_bound_is_inclusive(self):
        base = "x" * 31
        distance, ok = check_edit_distance(base, "", 30)
        assert distance == 31
        assert not ok
        assert check_edit_distance("x" * 30, "", 30) == (30, True)

    def test_matches_recursive_oracle_on_random_pairs(self):
        rng = random.Random(7)
        alphabet = "abcd"
        for _ in range(60):
            a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
            b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
            assert levenshtein(a, b) == oracle_levenshtein(a, b)

    def test_symmetry_and_triangle_inequality(self):
        rng = random.Random(11)
        alphabet = "abc"
        for _ in range(60):
            a, b, c = (
                "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 6)))
                for _ in range(3)
            )
            assert levenshtein(a, b) == levenshtein(b, a)
            assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


def two_way(lang, fwd, back):
    return {
        ("en", lang): PhraseTable.from_pairs(fwd),
        (lang, "en"): PhraseTable.from_pairs(back),
    }


class TestCheckRtt:
    # appendix-style miniature: "well" is the positive anchor; "opportune"
    # normalizes to "timely" (positive) while "direful" survives as the still
    # negative "terrible"
    LEX = {"well": 2.0, "opportune": -2.0, "timely": 2.0, "direful": -2.0, "terrible": -2.0}

    def victim(self):
        return LexiconClassifier(lexicon=self.LEX)

    def translator(self):
        tables = {}
        for lang in ("es", "de"):
            tables.update(
                two_way(
                    lang,
                    [("opportune", f"oportuno_{lang}"), ("direful", f"horroroso_{lang}")],
                    [(f"oportuno_{lang}", "timely"), (f"horroroso_{lang}", "terrible")],
                )
            )
        return TableTranslator(tables=tables)

    def test_identity_translator_passes_flipping_candidate(self):
        translator = TableTranslator(tables=two_way("es", [], []))
        cand = tokenize("exceptionally opportune acted")  # flips: score -2
        verdict = check_rtt(cand, 1, [LanguageId("es")], self.victim(), translator)
        assert verdict.passed
        assert verdict.language_results[0].round_tripped_text == cand.text

    def test_surviving_replacement_passes(self):
        cand = tokenize("exceptionally direful acted")
        verdict = check_rtt(cand, 1, [LanguageId("es")], self.victim(), self.translator())
        assert verdict.passed
        assert "terrible" in verdict.language_results[0].round_tripped_text

    def test_normalized_replacement_fails(self):
        cand = tokenize("exceptionally opportune acted")
        verdict = check_rtt(cand, 1, [LanguageId("es")], self.victim(), self.translator())
        assert not verdict.passed
        assert verdict.language_results[0].prediction.label == 1

    def test_passed_is_conjunction_of_languages(self):
        cand = tokenize("exceptionally direful acted")
        verdict = check_rtt(
            cand, 1, [LanguageId("es"), LanguageId("de")], self.victim(), self.translator()
        )
        assert verdict.passed == all(r.passed for r in verdict.language_results)

    def test_anti_monotone_in_language_set(self):
        # failing the pair means the failing language alone also fails, and
        # passing the pair implies every subset passes
        victim, translator = self.victim(), self.translator()
        for word in ("opportune", "direful"):
            cand = tokenize(f"exceptionally {word} acted")
            langs = [LanguageId("es"), LanguageId("de")]
            full = check_rtt(cand, 1, langs, victim, translator)
            for lang in langs:
                single = check_rtt(cand, 1, [lang], victim, translator)
                if full.passed:
                    assert single.passed

    def test_empty_language_list_rejected(self):
        with pytest.raises(ValueError):
            check_rtt(tokenize("x"), 1, [], self.victim(), self.translator())


def test_constraint_set_threshold_domains():
    with pytest.raises(ValueError):
        ConstraintSet(min_sentence_sim=1.5)
    with pytest.raises(ValueError):
        ConstraintSet(max_edit_distance=-1)
    with pytest.raises(ValueError):
        ConstraintSet(max_perturbed_fraction=-0.1)
