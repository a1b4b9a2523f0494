"""Model providers behind the wire protocol.

Two providers: a fully deterministic in-process toy (the default, used by
tests and local development) and a transformers-backed provider that loads
real sentiment/translation/encoder checkpoints. Both expose the same three
batch operations and preserve input order.
"""

from __future__ import annotations

import math
from typing import Protocol


class ModelProvider(Protocol):
    def classify(self, texts: list[str]) -> list[tuple[int, list[float]]]: ...

    def translate(self, texts: list[str], src: str, tgt: str) -> list[str]: ...

    def encode(self, texts: list[str]) -> list[list[float]]: ...


class ProviderError(RuntimeError):
    """Startup or request-time provider failure."""


def _fnv1a(data: bytes) -> int:
    h = 0x811C9DC5
    for byte in data:
        h ^= byte
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


_TOY_POLARITY = {
    "good": 2.0, "great": 2.0, "excellent": 2.0, "superb": 2.0, "nice": 1.0,
    "pleasant": 1.0, "fine": 0.5,
    "awful": -2.0, "terrible": -2.0, "horrible": -2.0, "bad": -1.5,
    "boring": -1.5, "poor": -1.0,
}


class ToyProvider:
    """Deterministic stand-in models; no downloads, no randomness.

    Classification is a tiny polarity-sum sentiment model; translation tags
    every text with a reversible pivot marker so round trips are exact;
    encoding is a 64-bucket signed token hash.
    """

    dim = 64

    def classify(self, texts: list[str]) -> list[tuple[int, list[float]]]:
        out = []
        for text in texts:
            score = sum(_TOY_POLARITY.get(w.lower().strip(".,!?"), 0.0) for w in text.split())
            p_pos = 1.0 / (1.0 + math.exp(-score))
            label = 1 if p_pos >= 0.5 else 0
            out.append((label, [1.0 - p_pos, p_pos]))
        return out

    def translate(self, texts: list[str], src: str, tgt: str) -> list[str]:
        marker = f"«{src}:{tgt}» "
        out = []
        for text in texts:
            if text.startswith("«") and "» " in text:
                # returning leg: strip the previous marker
                out.append(text.split("» ", 1)[1])
            else:
                out.append(marker + text)
        return out

    def encode(self, texts: list[str]) -> list[list[float]]:
        out = []
        for text in texts:
            vec = [0.0] * self.dim
            for word in text.split():
                h = _fnv1a(word.encode("utf-8"))
                sign = 1.0 if (h & 1) == 0 else -1.0
                vec[(h >> 1) % self.dim] += sign
            norm = math.sqrt(sum(v * v for v in vec))
            if norm > 0.0:
                vec = [v / norm for v in vec]
            out.append(vec)
        return out


class TransformersProvider:
    """Real models via the transformers ecosystem; greedy decoding throughout.

    Models are loaded lazily per capability and cached. Resolution failures
    surface as ProviderError so the server can refuse to start cleanly.
    """

    def __init__(self, classifier_model: str, translation_family: str,
                 encoder_model: str, device: str = "cpu"):
        self.classifier_model = classifier_model
        self.translation_family = translation_family  # e.g. "Helsinki-NLP/opus-mt-{src}-{tgt}"
        self.encoder_model = encoder_model
        self.device = device
        self._classifier = None
        self._translators: dict[tuple[str, str], object] = {}
        self._encoder = None

    def _load_classifier(self):
        if self._classifier is None:
            try:
                from transformers import pipeline

                self._classifier = pipeline(
                    "text-classification", model=self.classifier_model,
                    device=-1 if self.device == "cpu" else 0, top_k=None,
                )
            except Exception as exc:
                raise ProviderError(f"cannot load classifier {self.classifier_model!r}: {exc}")
        return self._classifier

    def classify(self, texts: list[str]) -> list[tuple[int, list[float]]]:
        results = self._load_classifier()(texts)
        out = []
        for per_text in results:
            ranked = sorted(per_text, key=lambda item: item["label"])
            probs = [float(item["score"]) for item in ranked]
            total = sum(probs)
            probs = [p / total for p in probs]
            label = max(range(len(probs)), key=probs.__getitem__)
            out.append((label, probs))
        return out

    def _load_translator(self, src: str, tgt: str):
        key = (src, tgt)
        if key not in self._translators:
            name = self.translation_family.format(src=src, tgt=tgt)
            try:
                from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

                tokenizer = AutoTokenizer.from_pretrained(name)
                model = AutoModelForSeq2SeqLM.from_pretrained(name)
                self._translators[key] = (tokenizer, model)
            except Exception as exc:
                raise ProviderError(f"cannot load translator {name!r}: {exc}")
        return self._translators[key]

    def translate(self, texts: list[str], src: str, tgt: str) -> list[str]:
        tokenizer, model = self._load_translator(src, tgt)
        batch = tokenizer(texts, return_tensors="pt", padding=True, truncation=True)
        generated = model.generate(**batch, num_beams=1, do_sample=False)
        return tokenizer.batch_decode(generated, skip_special_tokens=True)

    def _load_encoder(self):
        if self._encoder is None:
            try:
                from sentence_transformers import SentenceTransformer

                self._encoder = SentenceTransformer(self.encoder_model, device=self.device)
            except Exception as exc:
                raise ProviderError(f"cannot load encoder {self.encoder_model!r}: {exc}")
        return self._encoder

    def encode(self, texts: list[str]) -> list[list[float]]:
        vectors = self._load_encoder().encode(texts, normalize_embeddings=True)
        return [[float(x) for x in vec] for vec in vectors]
