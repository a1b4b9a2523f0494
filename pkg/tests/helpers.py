"""Shared fixture builders for the test suite."""

from __future__ import annotations

import json

from rtt_attack.backends import (
    BackendSuite,
    HashedEncoder,
    LexiconClassifier,
    PhraseTable,
    Prediction,
    TableTranslator,
)
from rtt_attack.resources import EmbeddingStore, ResourceBundle
from rtt_attack.search import AttackOutcome, Perturbation, Resources


def prediction(label: int) -> Prediction:
    probs = (0.9, 0.1) if label == 0 else (0.1, 0.9)
    return Prediction(label=label, confidence=0.9, class_probabilities=probs)


def success_outcome(example_id, original, adversarial, adv_label=0, perturbations=None):
    if perturbations is None:
        perturbations = [Perturbation(0, "a", "b")]
    return AttackOutcome(
        example_id=example_id,
        status="success",
        original_text=original,
        adversarial_text=adversarial,
        orig_prediction=prediction(1 - adv_label),
        adv_prediction=prediction(adv_label),
        perturbations=tuple(perturbations),
        victim_queries=1,
    )


def normalizing_translator(defeats, langs=("es", "de", "fr"), restore_to="nice"):
    """defeats: word -> language codes whose round trip restores ``restore_to``."""
    tables = {}
    for lang in langs:
        fwd, back = [], []
        for word, lang_set in defeats.items():
            pivot = f"{word}_{lang}"
            fwd.append((word, pivot))
            back.append((pivot, restore_to if lang in lang_set else word))
        tables[("en", lang)] = PhraseTable.from_pairs(fwd)
        tables[(lang, "en")] = PhraseTable.from_pairs(back)
    return TableTranslator(tables=tables)


def mini_suite(lexicon, synonyms=None, normalize=None, langs=("es", "de", "fr")):
    """A tiny world: lexicon victim, synonym candidates, normalizing translator.

    ``normalize`` maps words to what the round trip turns them into, shared
    across all languages; everything else survives translation unchanged.
    """
    normalize = normalize or {}
    tables = {}
    vocabulary = set(lexicon) | set(normalize)
    for lang in langs:
        fwd = [(w, f"{w}_{lang}") for w in sorted(vocabulary)]
        back = [(f"{w}_{lang}", normalize.get(w, w)) for w in sorted(vocabulary)]
        tables[("en", lang)] = PhraseTable.from_pairs(fwd)
        tables[(lang, "en")] = PhraseTable.from_pairs(back)
    suite = BackendSuite(
        victim=LexiconClassifier(lexicon=dict(lexicon)),
        translator=TableTranslator(tables=tables),
        encoder=HashedEncoder(),
    )
    resources = Resources(
        bundle=ResourceBundle(
            synonym_table=dict(synonyms or {}), sentiment_lexicon=dict(lexicon)
        ),
        embeddings=EmbeddingStore(dimension=1, entries={}),
    )
    return suite, resources


def write_dataset(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    return path
