"""Victim classifier, translator, and sentence-encoder capabilities.

Three deterministic built-ins (lexicon classifier, phrase-table translator,
hashed encoder) make the whole pipeline reproducible offline; a remote
client exposes the same capabilities over a small HTTP+JSON wire protocol
so real models can be swapped in behind the identical surface.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np
import requests

from .resources import ResourceFormatError, _data_rows
from .text_core import Sentence, tokenize

ENCODER_DIM = 256


class BackendError(Exception):
    """Base class for every backend failure."""


class CapabilityError(BackendError):
    """A capability was asked for something outside its configuration."""


class TransportError(BackendError):
    """The remote endpoint could not be reached (timeout, refused, ...)."""


class RemoteHTTPError(BackendError):
    """The remote endpoint answered with a non-200 status."""

    def __init__(self, status: int, body: str):
        super().__init__(f"remote backend returned HTTP {status}: {body}")
        self.status = status
        self.body = body


class SchemaError(BackendError):
    """The remote endpoint answered 200 with a malformed body."""


@dataclass(frozen=True)
class Prediction:
    """A classifier verdict: label index plus the full probability vector."""

    label: int
    confidence: float
    class_probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = self.class_probabilities
        if not 0 <= self.label < len(probs):
            raise ValueError(f"label {self.label} outside {len(probs)} classes")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {sum(probs)!r}, not 1")
        # the label must attain the maximum (ties allowed, e.g. the 0.5/0.5 case)
        if probs[self.label] < max(probs) - 1e-12:
            raise ValueError(f"label {self.label} does not attain max probability")


@dataclass(frozen=True)
class LanguageId:
    """A two-letter pivot-language code such as "es", "de" or "fr"."""

    code: str

    def __post_init__(self) -> None:
        if len(self.code) != 2 or not self.code.isalpha() or not self.code.islower():
            raise ValueError(f"language code must be two lowercase letters, got {self.code!r}")


class Classifier(Protocol):
    def classify(self, texts: list[str]) -> list[Prediction]: ...


class Translator(Protocol):
    def translate(self, texts: list[str], src: str, tgt: str) -> list[str]: ...

    def supports(self, src: str, tgt: str) -> bool: ...


class Encoder(Protocol):
    def encode(self, texts: list[str]) -> list[np.ndarray]: ...


@dataclass(frozen=True)
class BackendSuite:
    """The three capability handles every attack and metric runs against."""

    victim: Classifier
    translator: Translator
    encoder: Encoder


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def lexicon_classify(texts: list[str], lexicon: dict[str, float]) -> list[Prediction]:
    """Score each text by summed token weights and squash through a logistic.

    Unknown tokens weigh 0; a zero score is the tie case and resolves to the
    positive label (p_pos = 0.5 -> label 1).
    """
    out = []
    for text in texts:
        score = sum(lexicon.get(tok.lower(), 0.0) for tok in tokenize(text).tokens)
        p_pos = _logistic(score)
        label = 1 if p_pos >= 0.5 else 0
        probs = (1.0 - p_pos, p_pos)
        out.append(Prediction(label=label, confidence=probs[label], class_probabilities=probs))
    return out


@dataclass(frozen=True)
class LexiconClassifier:
    lexicon: dict[str, float]

    def classify(self, texts: list[str]) -> list[Prediction]:
        return lexicon_classify(texts, self.lexicon)


@dataclass(frozen=True)
class PhraseTable:
    """Lowercased token-sequence keys mapped to replacement strings."""

    entries: dict[tuple[str, ...], str]
    max_phrase_len: int

    @classmethod
    def from_pairs(cls, pairs: list[tuple[str, str]]) -> "PhraseTable":
        entries = {}
        max_len = 1
        for phrase, replacement in pairs:
            key = tuple(w.lower() for w in phrase.split())
            if not key or not replacement:
                raise ValueError(f"empty phrase or replacement in pair {(phrase, replacement)!r}")
            entries[key] = replacement
            max_len = max(max_len, len(key))
        return cls(entries=entries, max_phrase_len=max_len)


def load_phrase_table(path: str | Path) -> PhraseTable:
    """Load a 2-column TSV of ``phrase -> replacement`` rows."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"phrase table not found: {path}")
    pairs = []
    for lineno, line in _data_rows(path):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ResourceFormatError(f"{path}:{lineno}: phrase rows have exactly 2 columns")
        pairs.append((cols[0].strip(), cols[1].strip()))
    return PhraseTable.from_pairs(pairs)


def _translate_sentence(s: Sentence, table: PhraseTable) -> str:
    parts = [s.separators[0]]
    i = 0
    n = len(s.tokens)
    while i < n:
        match_len = 0
        replacement = ""
        for length in range(min(table.max_phrase_len, n - i), 0, -1):
            key = tuple(t.lower() for t in s.tokens[i : i + length])
            if key in table.entries:
                match_len = length
                replacement = table.entries[key]
                break
        if match_len:
            # multi-word replacements are glued with single spaces; the
            # separator after the matched span is preserved
            parts.append(" ".join(replacement.split()))
            parts.append(s.separators[i + match_len])
            i += match_len
        else:
            parts.append(s.tokens[i])
            parts.append(s.separators[i + 1])
            i += 1
    return "".join(parts)


def table_translate(
    texts: list[str],
    src: str,
    tgt: str,
    tables: dict[tuple[str, str], PhraseTable],
) -> list[str]:
    """Longest-match phrase replacement over each text's token stream.

    Unmapped tokens pass through unchanged, so an empty table is the
    identity translation.
    """
    if (src, tgt) not in tables:
        raise CapabilityError(f"unsupported language pair {src!r} -> {tgt!r}")
    table = tables[(src, tgt)]
    return [_translate_sentence(tokenize(t), table) for t in texts]


@dataclass(frozen=True)
class TableTranslator:
    tables: dict[tuple[str, str], PhraseTable]

    def translate(self, texts: list[str], src: str, tgt: str) -> list[str]:
        return table_translate(texts, src, tgt, self.tables)

    def supports(self, src: str, tgt: str) -> bool:
        return (src, tgt) in self.tables

    def languages(self) -> list[str]:
        """Pivot codes reachable from English in both directions, sorted."""
        return sorted(
            tgt for (src, tgt) in self.tables if src == "en" and (tgt, "en") in self.tables
        )


def round_trip(text: str, lang: LanguageId, translator: Translator) -> str:
    """Translate English -> pivot language -> English."""
    pivot = translator.translate([text], "en", lang.code)[0]
    return translator.translate([pivot], lang.code, "en")[0]


def _fnv1a32(data: bytes) -> int:
    h = 0x811C9DC5
    for byte in data:
        h ^= byte
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


def hashed_encode(texts: list[str]) -> list[np.ndarray]:
    """Deterministic sentence encoder: signed 256-bucket token hashing.

    Each token is FNV-1a hashed; the low bit picks the sign and the next
    eight bits the bucket. Bucket counts are L2-normalized. A text with no
    tokens encodes to the zero vector.
    """
    out = []
    for text in texts:
        vec = np.zeros(ENCODER_DIM, dtype=np.float64)
        for token in tokenize(text).tokens:
            h = _fnv1a32(token.encode("utf-8"))
            sign = 1.0 if (h & 1) == 0 else -1.0
            bucket = (h >> 1) & 0xFF
            vec[bucket] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        out.append(vec)
    return out


@dataclass(frozen=True)
class HashedEncoder:
    def encode(self, texts: list[str]) -> list[np.ndarray]:
        return hashed_encode(texts)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity with the zero-vector rule: any zero encoding -> 0."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(float(np.dot(u, v)) / (nu * nv), -1.0, 1.0))


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def parse_classify_response(body: object, expected: int) -> list[Prediction]:
    _require(isinstance(body, dict) and "predictions" in body, "response missing 'predictions'")
    preds = body["predictions"]
    _require(isinstance(preds, list) and len(preds) == expected,
             f"expected {expected} predictions, got {preds if not isinstance(preds, list) else len(preds)}")
    out = []
    for item in preds:
        _require(isinstance(item, dict) and "label" in item and "probs" in item,
                 "prediction entries need 'label' and 'probs'")
        label, probs = item["label"], item["probs"]
        _require(isinstance(label, int) and not isinstance(label, bool), "'label' must be an int")
        _require(isinstance(probs, list) and all(isinstance(p, (int, float)) for p in probs),
                 "'probs' must be a list of numbers")
        try:
            out.append(Prediction(label=label, confidence=float(probs[label]),
                                  class_probabilities=tuple(float(p) for p in probs)))
        except (ValueError, IndexError) as exc:
            raise SchemaError(f"invalid prediction values: {exc}") from None
    return out


def parse_translate_response(body: object, expected: int) -> list[str]:
    _require(isinstance(body, dict) and "texts" in body, "response missing 'texts'")
    texts = body["texts"]
    _require(isinstance(texts, list) and len(texts) == expected,
             f"expected {expected} texts")
    _require(all(isinstance(t, str) for t in texts), "'texts' must be strings")
    return list(texts)


def parse_encode_response(body: object, expected: int) -> list[np.ndarray]:
    _require(isinstance(body, dict) and "vectors" in body, "response missing 'vectors'")
    vectors = body["vectors"]
    _require(isinstance(vectors, list) and len(vectors) == expected,
             f"expected {expected} vectors")
    out = []
    for vec in vectors:
        _require(isinstance(vec, list) and all(isinstance(x, (int, float)) for x in vec),
                 "vectors must be lists of numbers")
        out.append(np.array(vec, dtype=np.float64))
    return out


@dataclass(frozen=True)
class RemoteBackend:
    """Client half of the wire protocol; one instance covers all three roles.

    Batched requests preserve input order end to end; transport problems,
    non-200 statuses, and malformed bodies raise distinct error types so
    callers can report them accurately.
    """

    endpoint: str
    timeout_ms: int = 30_000
    session: requests.Session = field(default_factory=requests.Session, compare=False)

    def _post(self, path: str, payload: dict) -> object:
        url = self.endpoint.rstrip("/") + path
        try:
            resp = self.session.post(url, json=payload, timeout=self.timeout_ms / 1000.0)
        except requests.Timeout as exc:
            raise TransportError(f"timeout after {self.timeout_ms} ms calling {url}") from exc
        except requests.ConnectionError as exc:
            raise TransportError(f"connection failed for {url}: {exc}") from exc
        if resp.status_code != 200:
            raise RemoteHTTPError(resp.status_code, resp.text)
        try:
            return resp.json()
        except (json.JSONDecodeError, ValueError) as exc:
            raise SchemaError(f"response is not valid JSON: {exc}") from None

    def classify(self, texts: list[str]) -> list[Prediction]:
        body = self._post("/v1/classify", {"texts": texts})
        return parse_classify_response(body, expected=len(texts))

    def translate(self, texts: list[str], src: str, tgt: str) -> list[str]:
        body = self._post("/v1/translate", {"texts": texts, "src": src, "tgt": tgt})
        return parse_translate_response(body, expected=len(texts))

    def supports(self, src: str, tgt: str) -> bool:
        return True  # the remote service owns its language inventory

    def encode(self, texts: list[str]) -> list[np.ndarray]:
        body = self._post("/v1/encode", {"texts": texts})
        return parse_encode_response(body, expected=len(texts))


def remote_suite(endpoint: str, timeout_ms: int = 30_000) -> BackendSuite:
    client = RemoteBackend(endpoint=endpoint, timeout_ms=timeout_ms)
    return BackendSuite(victim=client, translator=client, encoder=client)
