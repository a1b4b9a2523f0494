"""Quantitative measures: robustness-to-round-trip and attack quality metrics."""

from __future__ import annotations

import math
import string
from collections import Counter
from dataclasses import dataclass

from .backends import BackendError, Classifier, Encoder, LanguageId, Translator, cosine, round_trip
from .search import AttackOutcome
from .text_core import tokenize

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


@dataclass(frozen=True)
class RobustnessReport:
    """Per-example round-trip flip survival and the derived at-least-k curve.

    ``flip_matrix`` records, per example, which languages kept the flip;
    ``y_at_k[k-1]`` is the fraction of examples whose flip was undone by at
    least k of the m languages.
    """

    n: int
    m: int
    flip_matrix: tuple[tuple[str, frozenset[str]], ...]
    y_at_k: tuple[float, ...]
    error_count: int = 0


def report_from_flip_sets(
    flip_matrix: list[tuple[str, frozenset[str]]],
    langs: list[LanguageId] | tuple[LanguageId, ...],
    error_count: int = 0,
) -> RobustnessReport:
    """Aggregate kept-flip language sets into the at-least-k fractions."""
    m = len(langs)
    n = len(flip_matrix)
    defeat_counts = [m - len(kept) for _, kept in flip_matrix]
    y = tuple(
        (sum(1 for d in defeat_counts if d >= k) / n) if n else 0.0 for k in range(1, m + 1)
    )
    return RobustnessReport(
        n=n, m=m, flip_matrix=tuple(flip_matrix), y_at_k=y, error_count=error_count
    )


def at_least_k_nonrobust(
    outcomes: list[AttackOutcome],
    langs: list[LanguageId] | tuple[LanguageId, ...],
    victim: Classifier,
    translator: Translator,
) -> RobustnessReport:
    """Round-trip every successful adversarial example through every language.

    A language defeats an example when the round-tripped text is no longer
    classified as the adversarial label. Examples that hit backend failures
    are excluded from N and counted in ``error_count``.
    """
    if not langs:
        raise ValueError("langs must be non-empty")
    bad = [o.example_id for o in outcomes if o.status != "success"]
    if bad:
        raise ValueError(f"non-success outcomes in robustness eval: {bad}")
    flip_matrix: list[tuple[str, frozenset[str]]] = []
    errors = 0
    for outcome in outcomes:
        assert outcome.adversarial_text is not None and outcome.adv_prediction is not None
        kept = set()
        try:
            for lang in langs:
                rt_text = round_trip(outcome.adversarial_text, lang, translator)
                pred = victim.classify([rt_text])[0]
                if pred.label == outcome.adv_prediction.label:
                    kept.add(lang.code)
        except BackendError:
            errors += 1
            continue
        flip_matrix.append((outcome.example_id, frozenset(kept)))
    return report_from_flip_sets(flip_matrix, langs, error_count=errors)


def relative_success_rate(
    nmt_outcomes: list[AttackOutcome],
    plain_outcomes: list[AttackOutcome],
) -> float | None:
    """NMT-constrained successes as a percentage of the plain attack's.

    Undefined (None) when the plain attack has no successes at all.
    """
    nmt_ids = [o.example_id for o in nmt_outcomes]
    plain_ids = [o.example_id for o in plain_outcomes]
    if sorted(nmt_ids) != sorted(plain_ids):
        raise ValueError("outcome lists cover different example ids")
    plain_successes = sum(1 for o in plain_outcomes if o.status == "success")
    if plain_successes == 0:
        return None
    nmt_successes = sum(1 for o in nmt_outcomes if o.status == "success")
    return 100.0 * nmt_successes / plain_successes


def _token_set(text: str) -> set[str]:
    out = set()
    for token in tokenize(text).tokens:
        cleaned = token.lower().translate(_PUNCT_TABLE)
        if cleaned:
            out.add(cleaned)
    return out


def jaccard(orig_text: str, adv_text: str) -> float:
    """Set overlap of lowercased, punctuation-stripped tokens; 1.0 when both empty."""
    a, b = _token_set(orig_text), _token_set(adv_text)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(orig_text: str, adv_text: str) -> float:
    """Sentence-level BLEU-4 of the adversarial text against the original.

    Modified n-gram precisions for n=1..4 with add-one smoothing on
    higher-order zero counts, times the brevity penalty. The original text
    is always the reference, so the measure is directional.
    """
    reference = [t.lower() for t in tokenize(orig_text).tokens]
    candidate = [t.lower() for t in tokenize(adv_text).tokens]
    if not reference and not candidate:
        return 1.0
    if not reference or not candidate:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        cand_counts = _ngram_counts(candidate, n)
        total = sum(cand_counts.values())
        ref_counts = _ngram_counts(reference, n)
        matched = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
        if n == 1:
            if matched == 0:
                return 0.0
            precision = matched / total
        elif matched == 0:
            precision = (matched + 1) / (total + 1)
        else:
            precision = matched / total
        log_sum += math.log(precision)
    brevity = 1.0 if len(candidate) >= len(reference) else math.exp(
        1.0 - len(reference) / len(candidate)
    )
    return brevity * math.exp(log_sum / 4.0)


def percent_perturbed(outcome: AttackOutcome) -> float:
    """Perturbed positions as a percentage of the original token count."""
    if outcome.status != "success":
        raise ValueError("percent_perturbed is defined for successful outcomes")
    n_tokens = len(tokenize(outcome.original_text).tokens)
    if n_tokens == 0:
        raise ValueError("original text has no tokens")
    return 100.0 * len(outcome.perturbations) / n_tokens


def encoder_similarity(orig_text: str, adv_text: str, encoder: Encoder) -> float:
    """Raw cosine between the two sentence encodings, clamped to [-1, 1]."""
    u, v = encoder.encode([orig_text, adv_text])
    return cosine(u, v)


def success_rate(outcomes: list[AttackOutcome]) -> float | None:
    """Successes over successes+failures; skipped and errored are excluded."""
    successes = sum(1 for o in outcomes if o.status == "success")
    failures = sum(1 for o in outcomes if o.status == "failed")
    if successes + failures == 0:
        return None
    return 100.0 * successes / (successes + failures)
