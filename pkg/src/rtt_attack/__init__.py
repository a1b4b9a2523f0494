"""Round-trip-translation-robust text adversarial attacks.

A greedy word-swap attack framework whose defining filter keeps only
candidates that stay adversarial after translating out to a set of pivot
languages and back, plus the evaluation harness that measures how ordinary
attacks degrade under that same round trip.
"""

from .backends import BackendSuite, LanguageId, Prediction
from .builtin import builtin_languages, builtin_resources, builtin_suite, corpus_path, load_dataset
from .search import (
    AttackConfig,
    AttackOutcome,
    AttackRecipe,
    RECIPE_NAMES,
    Resources,
    attack,
    attack_corpus,
    build_recipe,
)
from .text_core import LabeledExample, Sentence, detokenize, tokenize

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackOutcome",
    "AttackRecipe",
    "BackendSuite",
    "LabeledExample",
    "LanguageId",
    "Prediction",
    "RECIPE_NAMES",
    "Resources",
    "Sentence",
    "attack",
    "attack_corpus",
    "build_recipe",
    "builtin_languages",
    "builtin_resources",
    "builtin_suite",
    "corpus_path",
    "detokenize",
    "load_dataset",
    "tokenize",
    "__version__",
]
