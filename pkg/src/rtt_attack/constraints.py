"""Candidate filters: recipe-local constraints plus the round-trip filter.

The round-trip-translation check is the filter that distinguishes this
framework from the attacks it wraps: a candidate only survives if it stays
adversarial after translating out to each seen language and back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backends import Classifier, Encoder, LanguageId, Prediction, Translator, cosine, round_trip
from .text_core import Sentence


@dataclass(frozen=True)
class ConstraintSet:
    """Which filters a recipe applies, and their thresholds."""

    use_pos: bool = False
    min_sentence_sim: float | None = None
    max_edit_distance: int | None = None
    max_perturbed_fraction: float | None = None
    stopwords_immutable: bool = True
    repeat_immutable: bool = True

    def __post_init__(self) -> None:
        if self.min_sentence_sim is not None and not -1.0 <= self.min_sentence_sim <= 1.0:
            raise ValueError(f"min_sentence_sim {self.min_sentence_sim} outside [-1, 1]")
        if self.max_edit_distance is not None and self.max_edit_distance < 0:
            raise ValueError("max_edit_distance must be >= 0")
        if self.max_perturbed_fraction is not None and self.max_perturbed_fraction < 0:
            raise ValueError("max_perturbed_fraction must be >= 0")


@dataclass(frozen=True)
class LanguageResult:
    """Round-trip outcome for one pivot language."""

    language: LanguageId
    round_tripped_text: str
    prediction: Prediction
    passed: bool


@dataclass(frozen=True)
class RttVerdict:
    language_results: tuple[LanguageResult, ...]
    passed: bool


def check_pre(
    constraint_set: ConstraintSet,
    s: Sentence,
    index: int,
    stopwords: frozenset[str],
    modified: frozenset[int] | set[int],
) -> bool:
    """Pre-transformation gate: stopwords and already-modified positions."""
    token = s.tokens[index]
    if constraint_set.stopwords_immutable and token.lower() in stopwords:
        return False
    if constraint_set.repeat_immutable and index in modified:
        return False
    return True


def check_pos(
    orig_word: str,
    cand_word: str,
    pos_lexicon: dict[str, frozenset[str]],
) -> bool:
    """Part-of-speech compatibility: shared tag, or the noun/verb exception.

    Words absent from the lexicon tag as OTHER, and OTHER only matches OTHER.
    """
    other = frozenset({"OTHER"})
    orig_tags = pos_lexicon.get(orig_word.lower(), other)
    cand_tags = pos_lexicon.get(cand_word.lower(), other)
    if orig_tags & cand_tags:
        return True
    if ("NOUN" in orig_tags and "VERB" in cand_tags) or (
        "VERB" in orig_tags and "NOUN" in cand_tags
    ):
        return True
    return False


def angular_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """1 - arccos(cos)/pi: 1 for parallel encodings, 0.5 for orthogonal."""
    return 1.0 - math.acos(cosine(u, v)) / math.pi


def check_sentence_similarity(
    orig: Sentence,
    cand: Sentence,
    encoder: Encoder,
    threshold: float,
) -> tuple[float, bool]:
    u, v = encoder.encode([orig.text, cand.text])
    score = angular_similarity(u, v)
    return score, score >= threshold


def levenshtein(a: str, b: str) -> int:
    """Character-level edit distance (iterative two-row dynamic program)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def check_edit_distance(orig_text: str, cand_text: str, max_dist: int) -> tuple[int, bool]:
    distance = levenshtein(orig_text, cand_text)
    return distance, distance <= max_dist


def check_rtt(
    cand: Sentence,
    orig_label: int,
    seen_langs: list[LanguageId] | tuple[LanguageId, ...],
    victim: Classifier,
    translator: Translator,
) -> RttVerdict:
    """Round-trip the candidate through every seen language and re-classify.

    A language passes when the round-tripped text is still classified away
    from the original label; the verdict passes only if every language does.
    """
    if not seen_langs:
        raise ValueError("seen_langs must be non-empty")
    results = []
    for lang in seen_langs:
        rt_text = round_trip(cand.text, lang, translator)
        pred = victim.classify([rt_text])[0]
        results.append(
            LanguageResult(
                language=lang,
                round_tripped_text=rt_text,
                prediction=pred,
                passed=pred.label != orig_label,
            )
        )
    return RttVerdict(
        language_results=tuple(results),
        passed=all(r.passed for r in results),
    )
