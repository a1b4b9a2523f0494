"""Word importance ranking: which tokens matter most to the victim.

Two black-box ranking methods are provided: input deletion (score a word by
how much removing it moves the true-label probability) and probability
weighted saliency (softmaxed "unk"-masking saliency times the best
single-swap probability drop).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backends import Classifier
from .text_core import Sentence, delete_word, replace_word

UNK_TOKEN = "unk"

# produces replacement words for the token at the given position
CandidateFn = Callable[[Sentence, int], list[str]]


@dataclass(frozen=True)
class ImportanceRanking:
    """Per-token scores plus eligible indices sorted by descending score."""

    scores: dict[int, float]
    order: tuple[int, ...]


def eligible_indices(s: Sentence, stopwords: frozenset[str]) -> list[int]:
    """Token positions that may be perturbed (stopwords are immutable)."""
    return [i for i, tok in enumerate(s.tokens) if tok.lower() not in stopwords]


def _finalize(scores: dict[int, float]) -> ImportanceRanking:
    order = tuple(sorted(scores, key=lambda i: (-scores[i], i)))
    return ImportanceRanking(scores=scores, order=order)


def rank_by_deletion(
    s: Sentence,
    victim: Classifier,
    label: int,
    stopwords: frozenset[str] = frozenset(),
) -> ImportanceRanking:
    """Input-deletion importance.

    A word's score is the drop in true-label probability when it is deleted;
    if the deletion also flips the predicted label, the gain of the newly
    predicted class is added on top.
    """
    if not s.tokens:
        raise ValueError("cannot rank an empty sentence")
    indices = eligible_indices(s, stopwords)
    base = victim.classify([s.text])[0]
    if not indices:
        return _finalize({})
    deleted = [delete_word(s, i) for i in indices]
    preds = victim.classify([d.text for d in deleted])
    scores: dict[int, float] = {}
    for i, pred in zip(indices, preds):
        score = base.class_probabilities[label] - pred.class_probabilities[label]
        if pred.label != base.label:
            other = pred.label
            score += pred.class_probabilities[other] - base.class_probabilities[other]
        scores[i] = score
    return _finalize(scores)


def rank_by_weighted_saliency(
    s: Sentence,
    victim: Classifier,
    label: int,
    transform: CandidateFn,
    stopwords: frozenset[str] = frozenset(),
) -> ImportanceRanking:
    """Probability-weighted saliency importance.

    saliency_i = p_label(S) - p_label(S with w_i -> "unk"); the final score
    is softmax(saliency)_i times the largest drop in p_label achievable by
    any candidate swap at i (0 when the word has no candidates).
    """
    if not s.tokens:
        raise ValueError("cannot rank an empty sentence")
    indices = eligible_indices(s, stopwords)
    if not indices:
        return _finalize({})
    base = victim.classify([s.text])[0]
    p_full = base.class_probabilities[label]

    masked = [replace_word(s, i, UNK_TOKEN) for i in indices]
    masked_preds = victim.classify([m.text for m in masked])
    saliency = np.array(
        [p_full - pred.class_probabilities[label] for pred in masked_preds], dtype=np.float64
    )
    shifted = np.exp(saliency - np.max(saliency))
    softmax = shifted / np.sum(shifted)

    scores: dict[int, float] = {}
    for pos, i in enumerate(indices):
        words = transform(s, i)
        if not words:
            scores[i] = 0.0
            continue
        swapped = [replace_word(s, i, w) for w in words]
        preds = victim.classify([c.text for c in swapped])
        best_gain = max(p_full - pred.class_probabilities[label] for pred in preds)
        scores[i] = float(softmax[pos]) * best_gain
    return _finalize(scores)
