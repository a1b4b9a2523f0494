"""Assembly of the built-in deterministic world from packaged data files."""

from __future__ import annotations

import json
from importlib import resources as importlib_resources
from pathlib import Path

from .backends import (
    BackendSuite,
    HashedEncoder,
    LexiconClassifier,
    PhraseTable,
    TableTranslator,
    load_phrase_table,
)
from .resources import load_bundle, load_embeddings
from .search import Resources
from .text_core import LabeledExample


def _data_dir() -> Path:
    return Path(str(importlib_resources.files("rtt_attack") / "data"))


def builtin_resources() -> Resources:
    root = _data_dir() / "builtin"
    return Resources(
        bundle=load_bundle(root / "manifest.txt"),
        embeddings=load_embeddings(root / "embeddings.txt"),
    )


def _load_tables() -> dict[tuple[str, str], PhraseTable]:
    tables = {}
    for path in sorted((_data_dir() / "builtin" / "translate").glob("*.tsv")):
        src, _, tgt = path.stem.partition("-")
        tables[(src, tgt)] = load_phrase_table(path)
    return tables


def builtin_suite(resources: Resources | None = None) -> BackendSuite:
    """Victim, translator and encoder backed entirely by packaged data."""
    if resources is None:
        resources = builtin_resources()
    return BackendSuite(
        victim=LexiconClassifier(lexicon=resources.bundle.sentiment_lexicon),
        translator=TableTranslator(tables=_load_tables()),
        encoder=HashedEncoder(),
    )


def builtin_languages() -> list[str]:
    """Pivot codes the built-in translator can round-trip through."""
    return TableTranslator(tables=_load_tables()).languages()


def corpus_path(name: str = "normalization_50") -> Path:
    path = _data_dir() / "corpora" / f"{name}.jsonl"
    if not path.exists():
        raise FileNotFoundError(f"no packaged corpus named {name!r}")
    return path


def load_dataset(path: str | Path) -> list[LabeledExample]:
    """Read a JSONL dataset of ``{"id":..., "text":..., "label":0|1}`` rows."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset not found: {path}")
    examples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc})") from None
            missing = {"id", "text", "label"} - set(row)
            if missing:
                raise ValueError(f"{path}:{lineno}: missing field(s) {sorted(missing)}")
            examples.append(
                LabeledExample(id=str(row["id"]), text=row["text"], label=row["label"])
            )
    return examples
