"""Lossless word tokenization and immutable sentence editing.

Every other module perturbs text through the :class:`Sentence` type defined
here, so the round-trip guarantee (detokenize(tokenize(t)) == t) is what
keeps perturbation positions well-defined across the whole pipeline.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

_PUNCT = frozenset(string.punctuation)


@dataclass(frozen=True)
class Sentence:
    """A tokenized text plus the inter-token glue needed to rebuild it.

    ``separators`` always has exactly one more entry than ``tokens``:
    ``separators[i]`` precedes ``tokens[i]`` and ``separators[-1]`` is the
    trailing glue. Tokens never contain leading/trailing punctuation or
    whitespace; that lives in the separators.
    """

    tokens: tuple[str, ...]
    separators: tuple[str, ...]
    source_text: str

    def __post_init__(self) -> None:
        if len(self.separators) != len(self.tokens) + 1:
            raise ValueError(
                f"separator count {len(self.separators)} != token count {len(self.tokens)} + 1"
            )
        if any(not t for t in self.tokens):
            raise ValueError("tokens must be non-empty")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str:
        return self.source_text


@dataclass(frozen=True)
class LabeledExample:
    """A classification example: raw text with a binary ground-truth label."""

    id: str
    text: str
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


def tokenize(text: str) -> Sentence:
    """Split ``text`` into word tokens, keeping all glue in separators.

    Words are whitespace-delimited chunks with leading/trailing punctuation
    peeled off into the surrounding separators; interior punctuation (as in
    "beer-fueled") stays inside the token. The split is lossless:
    ``detokenize(tokenize(text)) == text`` for any input.
    """
    tokens: list[str] = []
    separators: list[str] = []
    glue = ""
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            j = i
            while j < n and text[j].isspace():
                j += 1
            glue += text[i:j]
            i = j
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        chunk = text[i:j]
        i = j
        a = 0
        while a < len(chunk) and chunk[a] in _PUNCT:
            a += 1
        b = len(chunk)
        while b > a and chunk[b - 1] in _PUNCT:
            b -= 1
        core = chunk[a:b]
        if core:
            separators.append(glue + chunk[:a])
            tokens.append(core)
            glue = chunk[b:]
        else:
            glue += chunk
    separators.append(glue)
    return Sentence(tuple(tokens), tuple(separators), text)


def detokenize(s: Sentence) -> str:
    parts = [s.separators[0]]
    for token, sep in zip(s.tokens, s.separators[1:]):
        parts.append(token)
        parts.append(sep)
    return "".join(parts)


def _rebuild(tokens: tuple[str, ...], separators: tuple[str, ...]) -> Sentence:
    draft = Sentence(tokens, separators, "")
    text = detokenize(draft)
    return Sentence(tokens, separators, text)


def replace_word(s: Sentence, index: int, word: str) -> Sentence:
    """Return a copy of ``s`` with the token at ``index`` swapped for ``word``.

    The input sentence is never mutated; separators are carried over
    unchanged so only the one token position differs.
    """
    if not 0 <= index < len(s.tokens):
        raise IndexError(f"token index {index} out of range for {len(s.tokens)} tokens")
    if not word:
        raise ValueError("replacement word must be non-empty")
    tokens = s.tokens[:index] + (word,) + s.tokens[index + 1 :]
    return _rebuild(tokens, s.separators)


def delete_word(s: Sentence, index: int) -> Sentence:
    """Return a copy of ``s`` without the token at ``index``.

    The separator *following* the deleted token is dropped with it, so
    "the good movie" minus "good" reads "the movie".
    """
    if not 0 <= index < len(s.tokens):
        raise IndexError(f"token index {index} out of range for {len(s.tokens)} tokens")
    tokens = s.tokens[:index] + s.tokens[index + 1 :]
    separators = s.separators[: index + 1] + s.separators[index + 2 :]
    return _rebuild(tokens, separators)
