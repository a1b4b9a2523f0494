"""The greedy attack engine: importance ranking, candidate filtering, commit.

For each word in descending importance the engine generates candidates,
keeps the ones that flip the victim, drops any that do not survive
round-trip translation through every seen language (when enabled), applies
the recipe's own constraints, and commits the survivor most similar to the
original sentence. The first committed replacement is by construction an
adversarial success.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import BackendError, BackendSuite, Classifier, Encoder, LanguageId, Prediction
from .constraints import (
    ConstraintSet,
    RttVerdict,
    angular_similarity,
    check_edit_distance,
    check_pos,
    check_pre,
    check_rtt,
    check_sentence_similarity,
)
from .importance import ImportanceRanking, rank_by_deletion, rank_by_weighted_saliency
from .resources import EmbeddingStore, ResourceBundle
from .text_core import LabeledExample, Sentence, replace_word, tokenize
from .transform import (
    CandidateSet,
    char_perturbations,
    embedding_synonyms,
    synonym_table_candidates,
)

RECIPE_NAMES = ("textfooler", "textbugger", "pwws", "deepwordbug")


@dataclass(frozen=True)
class Resources:
    """Everything the built-in world loads from flat files."""

    bundle: ResourceBundle
    embeddings: EmbeddingStore


@dataclass(frozen=True)
class TransformationSpec:
    """Which candidate generators a recipe combines, in generation order."""

    use_embedding: bool = False
    min_embedding_cos: float = 0.5
    use_synonym_table: bool = False
    char_mechanisms: frozenset[str] = frozenset()


@dataclass(frozen=True)
class AttackRecipe:
    name: str
    importance_method: str  # "deletion" or "weighted_saliency"
    transformation: TransformationSpec
    constraint_set: ConstraintSet
    replacement_limit: int = 40

    def __post_init__(self) -> None:
        if self.replacement_limit < 1:
            raise ValueError("replacement_limit must be >= 1")
        if self.importance_method not in ("deletion", "weighted_saliency"):
            raise ValueError(f"unknown importance method {self.importance_method!r}")


def build_recipe(name: str, replacement_limit: int = 40) -> AttackRecipe:
    """Construct one of the four supported recipes with its frozen settings."""
    if name == "textfooler":
        return AttackRecipe(
            name=name,
            importance_method="deletion",
            transformation=TransformationSpec(use_embedding=True, min_embedding_cos=0.5),
            constraint_set=ConstraintSet(use_pos=True, min_sentence_sim=0.5),
            replacement_limit=replacement_limit,
        )
    if name == "textbugger":
        return AttackRecipe(
            name=name,
            importance_method="deletion",
            transformation=TransformationSpec(
                use_embedding=True,
                min_embedding_cos=0.5,
                char_mechanisms=frozenset({"insert", "delete", "adjacent_swap", "homoglyph"}),
            ),
            constraint_set=ConstraintSet(min_sentence_sim=0.84),
            replacement_limit=replacement_limit,
        )
    if name == "pwws":
        return AttackRecipe(
            name=name,
            importance_method="weighted_saliency",
            transformation=TransformationSpec(use_synonym_table=True),
            constraint_set=ConstraintSet(),
            replacement_limit=replacement_limit,
        )
    if name == "deepwordbug":
        return AttackRecipe(
            name=name,
            importance_method="deletion",
            transformation=TransformationSpec(
                char_mechanisms=frozenset({"insert", "delete", "adjacent_swap", "random_sub"}),
            ),
            constraint_set=ConstraintSet(max_edit_distance=30),
            replacement_limit=replacement_limit,
        )
    raise ValueError(f"unknown recipe {name!r}; expected one of {RECIPE_NAMES}")


@dataclass(frozen=True)
class AttackConfig:
    seen_langs: tuple[LanguageId, ...] = ()
    rtt_enabled: bool = True
    seed: int = 0
    query_budget: int | None = None

    def __post_init__(self) -> None:
        if self.rtt_enabled and not self.seen_langs:
            raise ValueError("rtt_enabled requires at least one seen language")
        if self.query_budget is not None and self.query_budget < 1:
            raise ValueError("query_budget must be >= 1 when set")


@dataclass(frozen=True)
class Perturbation:
    position: int
    old: str
    new: str


@dataclass(frozen=True)
class AttackOutcome:
    example_id: str
    status: str  # success | failed | skipped | error
    original_text: str
    adversarial_text: str | None
    orig_prediction: Prediction | None
    adv_prediction: Prediction | None
    perturbations: tuple[Perturbation, ...]
    victim_queries: int
    error: str | None = None


class NoSurvivorsError(ValueError):
    """select_best was handed an empty survivor list."""


class _BudgetExhausted(Exception):
    pass


class _CountingVictim:
    """Order-preserving victim wrapper that enforces the query budget."""

    def __init__(self, victim: Classifier, budget: int | None):
        self._victim = victim
        self._budget = budget
        self.count = 0

    def classify(self, texts: list[str]) -> list[Prediction]:
        if self._budget is not None and self.count + len(texts) > self._budget:
            raise _BudgetExhausted()
        self.count += len(texts)
        return self._victim.classify(texts)


def generate_candidates(
    recipe: AttackRecipe,
    word: str,
    word_index: int,
    resources: Resources,
    seed: int,
) -> CandidateSet:
    """All of the recipe's candidate words for one position, deduplicated
    across generators and truncated to the replacement limit."""
    spec = recipe.transformation
    limit = recipe.replacement_limit
    words: list[str] = []
    if spec.use_embedding:
        words.extend(
            embedding_synonyms(
                word, limit, spec.min_embedding_cos, resources.embeddings
            ).candidates
        )
    if spec.use_synonym_table:
        words.extend(
            synonym_table_candidates(word, limit, resources.bundle.synonym_table).candidates
        )
    if spec.char_mechanisms:
        words.extend(
            char_perturbations(
                word, spec.char_mechanisms, resources.bundle.homoglyph_map, seed, limit=limit
            ).candidates
        )
    seen: set[str] = set()
    merged = []
    for w in words:
        if w not in seen:
            seen.add(w)
            merged.append(w)
        if len(merged) >= limit:
            break
    return CandidateSet(word_index, tuple(merged))


def select_best(
    survivors: list[Sentence],
    orig: Sentence,
    encoder: Encoder,
) -> tuple[int, Sentence]:
    """The survivor most (angular-)similar to the original sentence.

    Ties go to the earliest-generated survivor. Returns (index, sentence)
    so callers can recover per-candidate bookkeeping.
    """
    if not survivors:
        raise NoSurvivorsError("no viable candidate for this word")
    encodings = encoder.encode([orig.text] + [c.text for c in survivors])
    orig_vec = encodings[0]
    best_idx = 0
    best_score = -2.0
    for idx, vec in enumerate(encodings[1:]):
        score = angular_similarity(orig_vec, vec)
        if score > best_score:
            best_score = score
            best_idx = idx
    return best_idx, survivors[best_idx]


def _rank(
    recipe: AttackRecipe,
    s: Sentence,
    victim: Classifier,
    label: int,
    resources: Resources,
    seed: int,
) -> ImportanceRanking:
    stopwords = resources.bundle.stopwords
    if recipe.importance_method == "weighted_saliency":
        def transform(sent: Sentence, index: int) -> list[str]:
            return list(
                generate_candidates(recipe, sent.tokens[index], index, resources, seed).candidates
            )

        return rank_by_weighted_saliency(s, victim, label, transform, stopwords)
    return rank_by_deletion(s, victim, label, stopwords)


def _passes_recipe_constraints(
    recipe: AttackRecipe,
    orig: Sentence,
    cand: Sentence,
    word_index: int,
    n_modified: int,
    resources: Resources,
    encoder: Encoder,
) -> bool:
    cs = recipe.constraint_set
    if cs.use_pos and not check_pos(
        orig.tokens[word_index], cand.tokens[word_index], resources.bundle.pos_lexicon
    ):
        return False
    if cs.min_sentence_sim is not None:
        _, ok = check_sentence_similarity(orig, cand, encoder, cs.min_sentence_sim)
        if not ok:
            return False
    if cs.max_edit_distance is not None:
        _, ok = check_edit_distance(orig.text, cand.text, cs.max_edit_distance)
        if not ok:
            return False
    if cs.max_perturbed_fraction is not None:
        if (n_modified + 1) / len(orig.tokens) > cs.max_perturbed_fraction:
            return False
    return True


def attack(
    example: LabeledExample,
    recipe: AttackRecipe,
    config: AttackConfig,
    backends: BackendSuite,
    resources: Resources,
) -> AttackOutcome:
    """Run the full greedy search against one example.

    Returns a ``skipped`` outcome when the victim already misclassifies the
    original, ``success`` with the adversarial text at the first committed
    replacement, and ``failed`` when every ranked word is exhausted or the
    query budget runs out.
    """
    victim = _CountingVictim(backends.victim, config.query_budget)

    def outcome(**kwargs) -> AttackOutcome:
        base = dict(
            example_id=example.id,
            status="failed",
            original_text=example.text,
            adversarial_text=None,
            orig_prediction=None,
            adv_prediction=None,
            perturbations=(),
            victim_queries=victim.count,
            error=None,
        )
        base.update(kwargs)
        return AttackOutcome(**base)

    try:
        orig_pred = victim.classify([example.text])[0]
    except _BudgetExhausted:
        return outcome(status="failed")
    if orig_pred.label != example.label:
        return outcome(status="skipped", orig_prediction=orig_pred)

    s = tokenize(example.text)
    if not s.tokens:
        return outcome(status="failed", orig_prediction=orig_pred)
    try:
        ranking = _rank(recipe, s, victim, example.label, resources, config.seed)
    except _BudgetExhausted:
        return outcome(status="failed", orig_prediction=orig_pred)

    modified: set[int] = set()
    try:
        for index in ranking.order:
            if not check_pre(
                recipe.constraint_set, s, index, resources.bundle.stopwords, modified
            ):
                continue
            cand_set = generate_candidates(
                recipe, s.tokens[index], index, resources, config.seed
            )
            if not cand_set:
                continue
            cand_sentences = [replace_word(s, index, w) for w in cand_set.candidates]
            preds = victim.classify([c.text for c in cand_sentences])
            flipping = [
                (cand, pred)
                for cand, pred in zip(cand_sentences, preds)
                if pred.label != example.label
            ]
            if config.rtt_enabled:
                flipping = [
                    (cand, pred)
                    for cand, pred in flipping
                    if check_rtt(
                        cand, example.label, config.seen_langs, victim, backends.translator
                    ).passed
                ]
            survivors = [
                (cand, pred)
                for cand, pred in flipping
                if _passes_recipe_constraints(
                    recipe, s, cand, index, len(modified), resources, backends.encoder
                )
            ]
            if not survivors:
                continue
            best_idx, best = select_best([c for c, _ in survivors], s, backends.encoder)
            best_pred = survivors[best_idx][1]
            return outcome(
                status="success",
                adversarial_text=best.text,
                orig_prediction=orig_pred,
                adv_prediction=best_pred,
                perturbations=(
                    Perturbation(
                        position=index, old=s.tokens[index], new=best.tokens[index]
                    ),
                ),
            )
    except _BudgetExhausted:
        return outcome(status="failed", orig_prediction=orig_pred)
    return outcome(status="failed", orig_prediction=orig_pred)


def attack_corpus(
    examples: list[LabeledExample],
    recipe: AttackRecipe,
    config: AttackConfig,
    backends: BackendSuite,
    resources: Resources,
) -> list[AttackOutcome]:
    """Attack every example independently; outcomes keep input order.

    A backend failure on one example is recorded as an ``error`` outcome and
    never aborts the rest of the run.
    """
    outcomes = []
    for example in examples:
        try:
            outcomes.append(attack(example, recipe, config, backends, resources))
        except BackendError as exc:
            outcomes.append(
                AttackOutcome(
                    example_id=example.id,
                    status="error",
                    original_text=example.text,
                    adversarial_text=None,
                    orig_prediction=None,
                    adv_prediction=None,
                    perturbations=(),
                    victim_queries=0,
                    error=str(exc),
                )
            )
    return outcomes


def reverify_rtt(
    outcome: AttackOutcome,
    orig_label: int,
    seen_langs: tuple[LanguageId, ...],
    backends: BackendSuite,
) -> RttVerdict:
    """Post-hoc re-check that a success is still round-trip robust."""
    if outcome.status != "success" or outcome.adversarial_text is None:
        raise ValueError("can only re-verify successful outcomes")
    return check_rtt(
        tokenize(outcome.adversarial_text),
        orig_label,
        list(seen_langs),
        backends.victim,
        backends.translator,
    )
