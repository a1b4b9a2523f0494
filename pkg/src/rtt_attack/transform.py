"""Replacement-candidate generation: the Top-K words that may replace a token.

Three mechanisms cover the supported recipes: nearest neighbors in a word
embedding space, fixed synonym-table lookup, and character-level
perturbations (typos, homoglyphs). All generation is deterministic given
the word, the configuration, and the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backends import _fnv1a32
from .resources import EmbeddingStore

CHAR_MECHANISMS = frozenset({"insert", "delete", "adjacent_swap", "homoglyph", "random_sub"})

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class CandidateSet:
    """Ordered replacement candidates for one token position."""

    word_index: int
    candidates: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.candidates)

    def __bool__(self) -> bool:
        return bool(self.candidates)


def _dedupe(original: str, words: list[str], limit: int | None) -> tuple[str, ...]:
    """Drop self-replacements and duplicates, keep first occurrences, truncate."""
    seen = set()
    out = []
    orig_lower = original.lower()
    for w in words:
        if not w or w.lower() == orig_lower or w in seen:
            continue
        seen.add(w)
        out.append(w)
        if limit is not None and len(out) >= limit:
            break
    return tuple(out)


def embedding_synonyms(
    word: str,
    k: int,
    min_cos: float,
    store: EmbeddingStore,
    word_index: int = 0,
) -> CandidateSet:
    """The K nearest store words by cosine similarity, floored at ``min_cos``.

    Order is descending similarity with lexicographic tie-breaks; a word
    missing from the store yields an empty set.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    vec = store.lookup(word)
    if vec is None:
        return CandidateSet(word_index, ())
    norm = float(np.linalg.norm(vec))
    scored: list[tuple[float, str]] = []
    for other, other_vec in store.entries.items():
        if other == word.lower():
            continue
        denom = norm * float(np.linalg.norm(other_vec))
        sim = float(np.dot(vec, other_vec)) / denom if denom > 0.0 else 0.0
        if sim >= min_cos:
            scored.append((sim, other))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return CandidateSet(word_index, _dedupe(word, [w for _, w in scored], k))


def synonym_table_candidates(
    word: str,
    k: int,
    table: dict[str, list[str]],
    word_index: int = 0,
) -> CandidateSet:
    """The first K table synonyms in file order, skipping the word itself."""
    if k < 1:
        raise ValueError("k must be >= 1")
    synonyms = table.get(word.lower(), [])
    return CandidateSet(word_index, _dedupe(word, synonyms, k))


def _det_char(seed: int, word: str, position: int, tag: str, counter: int) -> str:
    key = f"{seed}|{word}|{position}|{tag}|{counter}".encode("utf-8")
    return _ALPHABET[_fnv1a32(key) % len(_ALPHABET)]


def char_perturbations(
    word: str,
    mechanisms: frozenset[str],
    homoglyph_map: dict[str, str],
    seed: int,
    limit: int | None = None,
    word_index: int = 0,
) -> CandidateSet:
    """Character-level perturbations of ``word`` in a fixed enumeration order.

    Order: deletions left to right, adjacent swaps per boundary, homoglyph
    substitutions per mappable character, then insertions and random
    substitutions (left to right, characters drawn from a counter-based
    generator keyed by seed, word and position).
    """
    if not word:
        raise ValueError("word must be non-empty")
    unknown = mechanisms - CHAR_MECHANISMS
    if unknown:
        raise ValueError(f"unknown mechanisms {sorted(unknown)}")
    raw: list[str] = []
    if "delete" in mechanisms:
        for i in range(len(word)):
            raw.append(word[:i] + word[i + 1 :])
    if "adjacent_swap" in mechanisms:
        for i in range(len(word) - 1):
            raw.append(word[:i] + word[i + 1] + word[i] + word[i + 2 :])
    if "homoglyph" in mechanisms:
        for i, ch in enumerate(word):
            glyph = homoglyph_map.get(ch)
            if glyph is not None:
                raw.append(word[:i] + glyph + word[i + 1 :])
    if "insert" in mechanisms:
        for i in range(len(word) + 1):
            raw.append(word[:i] + _det_char(seed, word, i, "insert", 0) + word[i:])
    if "random_sub" in mechanisms:
        for i in range(len(word)):
            counter = 0
            ch = _det_char(seed, word, i, "random_sub", counter)
            while ch == word[i]:
                counter += 1
                ch = _det_char(seed, word, i, "random_sub", counter)
            raw.append(word[:i] + ch + word[i + 1 :])
    return CandidateSet(word_index, _dedupe(word, raw, limit))
