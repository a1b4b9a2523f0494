"""Loaders for the flat-file linguistic resources behind the built-in backends.

All resources are plain UTF-8 text (TSV or space-separated) so runs are
deterministic and fully offline. Loaders are strict: a malformed row is an
error with its line number, never a silent skip.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

POS_TAGS = frozenset({"NOUN", "VERB", "ADJ", "ADV", "OTHER"})

_BUNDLE_KINDS = ("stopwords", "synonyms", "pos", "homoglyphs", "lexicon")


class ResourceFormatError(ValueError):
    """A resource file violates its declared format."""


@dataclass(frozen=True)
class EmbeddingStore:
    """Word vectors of a single dimension, keyed by lowercase word."""

    dimension: int
    entries: dict[str, np.ndarray]

    def lookup(self, word: str) -> np.ndarray | None:
        return self.entries.get(word.lower())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ResourceBundle:
    """The non-embedding lexical tables used by attacks and constraints."""

    stopwords: frozenset[str] = frozenset()
    synonym_table: dict[str, list[str]] = field(default_factory=dict)
    pos_lexicon: dict[str, frozenset[str]] = field(default_factory=dict)
    homoglyph_map: dict[str, str] = field(default_factory=dict)
    sentiment_lexicon: dict[str, float] = field(default_factory=dict)


def _data_rows(path: Path) -> list[tuple[int, str]]:
    """Yield (1-based line number, line) pairs, skipping blanks and # comments."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip() or stripped.lstrip().startswith("#"):
                continue
            rows.append((lineno, stripped))
    return rows


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Load a text embedding file: one ``word v1 v2 ... vd`` entry per line.

    The dimension is inferred from the first entry; every later line must
    match it exactly and every component must be a finite real.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"embedding file not found: {path}")
    entries: dict[str, np.ndarray] = {}
    dimension: int | None = None
    for lineno, line in _data_rows(path):
        parts = line.split()
        if len(parts) < 2:
            raise ResourceFormatError(f"{path}:{lineno}: expected 'word v1 ... vd'")
        word = parts[0].lower()
        try:
            vec = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise ResourceFormatError(f"{path}:{lineno}: unparseable number ({exc})") from None
        if dimension is None:
            dimension = vec.size
        elif vec.size != dimension:
            raise ResourceFormatError(
                f"{path}:{lineno}: dimension {vec.size} != expected {dimension}"
            )
        if not np.all(np.isfinite(vec)):
            raise ResourceFormatError(f"{path}:{lineno}: non-finite component")
        entries[word] = vec
    if dimension is None:
        raise ResourceFormatError(f"{path}: embedding file has no entries")
    return EmbeddingStore(dimension=dimension, entries=entries)


def _load_stopwords(path: Path) -> frozenset[str]:
    words = set()
    for lineno, line in _data_rows(path):
        cols = line.split("\t")
        if len(cols) != 1:
            raise ResourceFormatError(f"{path}:{lineno}: stopword rows have exactly 1 column")
        words.add(cols[0].strip().lower())
    return frozenset(words)


def _load_synonyms(path: Path, table: dict[str, list[str]]) -> None:
    for lineno, line in _data_rows(path):
        cols = line.split("\t")
        if len(cols) < 2:
            raise ResourceFormatError(f"{path}:{lineno}: synonym rows need key + >=1 synonym")
        key = cols[0].strip().lower()
        synonyms = [c.strip() for c in cols[1:]]
        if any(not s for s in synonyms):
            raise ResourceFormatError(f"{path}:{lineno}: empty synonym cell")
        table.setdefault(key, []).extend(synonyms)


def _load_pos(path: Path, lexicon: dict[str, frozenset[str]]) -> None:
    for lineno, line in _data_rows(path):
        cols = line.split("\t")
        if len(cols) < 2:
            raise ResourceFormatError(f"{path}:{lineno}: pos rows need word + >=1 tag")
        key = cols[0].strip().lower()
        tags = {c.strip().upper() for c in cols[1:]}
        bad = tags - POS_TAGS
        if bad:
            raise ResourceFormatError(f"{path}:{lineno}: unknown pos tag(s) {sorted(bad)}")
        lexicon[key] = frozenset(lexicon.get(key, frozenset()) | tags)


def _load_homoglyphs(path: Path, mapping: dict[str, str]) -> None:
    for lineno, line in _data_rows(path):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ResourceFormatError(f"{path}:{lineno}: homoglyph rows have exactly 2 columns")
        src, dst = cols[0], cols[1]
        if len(src) != 1 or len(dst) != 1:
            raise ResourceFormatError(f"{path}:{lineno}: homoglyph cells must be single chars")
        if src == dst:
            raise ResourceFormatError(f"{path}:{lineno}: homoglyph must differ from its key")
        mapping[src] = dst


def _load_lexicon(path: Path, lexicon: dict[str, float]) -> None:
    for lineno, line in _data_rows(path):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ResourceFormatError(f"{path}:{lineno}: lexicon rows have exactly 2 columns")
        try:
            weight = float(cols[1])
        except ValueError:
            raise ResourceFormatError(f"{path}:{lineno}: unparseable weight {cols[1]!r}") from None
        # duplicate keys: last occurrence wins
        lexicon[cols[0].strip().lower()] = weight


def parse_manifest(path: str | Path) -> dict[str, Path]:
    """Parse a ``kind=relative/path`` manifest; paths resolve next to it."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"resource manifest not found: {path}")
    mapping: dict[str, Path] = {}
    for lineno, line in _data_rows(path):
        if "=" not in line:
            raise ResourceFormatError(f"{path}:{lineno}: expected 'kind=path'")
        kind, _, rel = line.partition("=")
        kind = kind.strip()
        if kind not in _BUNDLE_KINDS:
            raise ResourceFormatError(f"{path}:{lineno}: unknown resource kind {kind!r}")
        mapping[kind] = path.parent / rel.strip()
    return mapping


def load_bundle(manifest: str | Path) -> ResourceBundle:
    """Load every table named by the manifest into one immutable bundle."""
    paths = parse_manifest(manifest)
    missing = [k for k in _BUNDLE_KINDS if k not in paths]
    if missing:
        raise ResourceFormatError(f"{manifest}: manifest missing resource kind(s) {missing}")
    for kind, p in paths.items():
        if not p.exists():
            raise FileNotFoundError(f"{kind} file not found: {p}")

    synonym_table: dict[str, list[str]] = {}
    pos_lexicon: dict[str, frozenset[str]] = {}
    homoglyph_map: dict[str, str] = {}
    sentiment_lexicon: dict[str, float] = {}

    stopwords = _load_stopwords(paths["stopwords"])
    _load_synonyms(paths["synonyms"], synonym_table)
    _load_pos(paths["pos"], pos_lexicon)
    _load_homoglyphs(paths["homoglyphs"], homoglyph_map)
    _load_lexicon(paths["lexicon"], sentiment_lexicon)

    return ResourceBundle(
        stopwords=stopwords,
        synonym_table=synonym_table,
        pos_lexicon=pos_lexicon,
        homoglyph_map=homoglyph_map,
        sentiment_lexicon=sentiment_lexicon,
    )
