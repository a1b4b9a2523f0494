"""Experiment drivers: run attacks at desk scale and persist results.

Per-example records are JSONL (one arm per file); aggregate tables are CSV
with a rendered PNG figure written alongside. Every output is byte-stable
given the same configuration and seed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .backends import BackendSuite, LanguageId, Prediction, remote_suite
from .builtin import builtin_resources, builtin_suite, load_dataset
from .metrics import (
    at_least_k_nonrobust,
    bleu,
    encoder_similarity,
    jaccard,
    percent_perturbed,
    relative_success_rate,
    success_rate,
)
from .search import (
    AttackConfig,
    AttackOutcome,
    Perturbation,
    RECIPE_NAMES,
    Resources,
    attack_corpus,
    build_recipe,
)
from . import plotting

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a driver needs to reproduce one experiment run."""

    dataset_path: Path
    recipe_name: str = "textfooler"
    seen_langs: tuple[str, ...] = ("es", "de", "fr")
    eval_langs: tuple[str, ...] = ("es", "de", "fr")
    replacement_limit: int = 40
    replacement_limits: tuple[int, ...] = (1, 5, 10, 20, 40)
    rtt_enabled: bool = True
    backend_mode: str = "builtin"  # builtin | remote
    endpoint: str | None = None
    timeout_ms: int = 30_000
    seed: int = 0
    output_path: Path = Path("results.jsonl")

    def __post_init__(self) -> None:
        if self.recipe_name not in RECIPE_NAMES:
            raise ValueError(f"unknown recipe {self.recipe_name!r}")
        if self.backend_mode not in ("builtin", "remote"):
            raise ValueError(f"backend mode must be builtin or remote, got {self.backend_mode!r}")
        if self.backend_mode == "remote" and not self.endpoint:
            raise ValueError("remote backend mode requires an endpoint")


def make_suite(config: ExperimentConfig) -> tuple[BackendSuite, Resources]:
    """Attack-side resources are always local; backends may be remote.

    Remote suites are probed with one classify call up front so an
    unreachable endpoint fails the whole command (exit code 2) instead of
    erroring every example individually.
    """
    resources = builtin_resources()
    if config.backend_mode == "remote":
        assert config.endpoint is not None
        suite = remote_suite(config.endpoint, config.timeout_ms)
        suite.victim.classify(["backend health probe"])
        return suite, resources
    return builtin_suite(resources), resources


@dataclass(frozen=True)
class ResultRecord:
    """One serialized outcome plus its per-example quality metrics."""

    schema_version: int
    arm: str  # rtt_on | rtt_off
    recipe: str
    outcome: AttackOutcome
    metrics: dict[str, float | None]


def _prediction_to_dict(pred: Prediction | None) -> dict | None:
    if pred is None:
        return None
    return {
        "label": pred.label,
        "confidence": pred.confidence,
        "probs": list(pred.class_probabilities),
    }


def _prediction_from_dict(data: dict | None) -> Prediction | None:
    if data is None:
        return None
    return Prediction(
        label=data["label"],
        confidence=data["confidence"],
        class_probabilities=tuple(data["probs"]),
    )


def record_to_dict(record: ResultRecord) -> dict:
    o = record.outcome
    return {
        "schema_version": record.schema_version,
        "arm": record.arm,
        "recipe": record.recipe,
        "outcome": {
            "example_id": o.example_id,
            "status": o.status,
            "original_text": o.original_text,
            "adversarial_text": o.adversarial_text,
            "orig_prediction": _prediction_to_dict(o.orig_prediction),
            "adv_prediction": _prediction_to_dict(o.adv_prediction),
            "perturbations": [[p.position, p.old, p.new] for p in o.perturbations],
            "victim_queries": o.victim_queries,
            "error": o.error,
        },
        "metrics": record.metrics,
    }


def record_from_dict(data: dict) -> ResultRecord:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported record schema version {data.get('schema_version')!r}")
    o = data["outcome"]
    outcome = AttackOutcome(
        example_id=o["example_id"],
        status=o["status"],
        original_text=o["original_text"],
        adversarial_text=o["adversarial_text"],
        orig_prediction=_prediction_from_dict(o["orig_prediction"]),
        adv_prediction=_prediction_from_dict(o["adv_prediction"]),
        perturbations=tuple(Perturbation(p[0], p[1], p[2]) for p in o["perturbations"]),
        victim_queries=o["victim_queries"],
        error=o["error"],
    )
    return ResultRecord(
        schema_version=data["schema_version"],
        arm=data["arm"],
        recipe=data["recipe"],
        outcome=outcome,
        metrics=dict(data["metrics"]),
    )


def _example_metrics(outcome: AttackOutcome, suite: BackendSuite) -> dict[str, float | None]:
    if outcome.status != "success" or outcome.adversarial_text is None:
        return {"jaccard": None, "encoder_similarity": None, "bleu": None,
                "percent_perturbed": None}
    return {
        "jaccard": jaccard(outcome.original_text, outcome.adversarial_text),
        "encoder_similarity": encoder_similarity(
            outcome.original_text, outcome.adversarial_text, suite.encoder
        ),
        "bleu": bleu(outcome.original_text, outcome.adversarial_text),
        "percent_perturbed": percent_perturbed(outcome),
    }


def build_records(
    outcomes: list[AttackOutcome],
    arm: str,
    recipe_name: str,
    suite: BackendSuite,
) -> list[ResultRecord]:
    return [
        ResultRecord(
            schema_version=SCHEMA_VERSION,
            arm=arm,
            recipe=recipe_name,
            outcome=o,
            metrics=_example_metrics(o, suite),
        )
        for o in outcomes
    ]


def write_records(records: list[ResultRecord], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), ensure_ascii=False) + "\n")


def read_records(path: str | Path) -> list[ResultRecord]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"results file not found: {path}")
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(record_from_dict(json.loads(line)))
    return records


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def _summary_row(arm: str, records: list[ResultRecord],
                 relative: float | None) -> list[str]:
    outcomes = [r.outcome for r in records]
    counts = {
        status: sum(1 for o in outcomes if o.status == status)
        for status in ("success", "failed", "skipped", "error")
    }
    means = {
        key: _mean([r.metrics[key] for r in records if r.metrics[key] is not None])
        for key in ("jaccard", "encoder_similarity", "bleu", "percent_perturbed")
    }
    return [
        arm,
        str(len(records)),
        str(counts["success"]),
        str(counts["failed"]),
        str(counts["skipped"]),
        str(counts["error"]),
        _fmt(success_rate(outcomes)),
        _fmt(relative),
        _fmt(means["jaccard"]),
        _fmt(means["encoder_similarity"]),
        _fmt(means["bleu"]),
        _fmt(means["percent_perturbed"]),
    ]


SUMMARY_HEADER = [
    "arm", "examples", "successes", "failures", "skipped", "errors",
    "success_rate", "relative_success_rate", "mean_jaccard",
    "mean_encoder_similarity", "mean_bleu", "mean_percent_perturbed",
]


def baseline_path(output_path: Path) -> Path:
    return output_path.with_name(output_path.stem + ".baseline" + output_path.suffix)


def summary_path(output_path: Path) -> Path:
    return output_path.with_name(output_path.stem + ".summary.csv")


def run_attack_experiment(
    config: ExperimentConfig,
    suite: BackendSuite | None = None,
    resources: Resources | None = None,
) -> dict[str, Path]:
    """Attack the dataset and persist records plus a summary table.

    With rtt enabled this runs both arms (the rtt-off baseline is needed for
    the relative success rate) and writes the baseline's records next to the
    main results file; with rtt disabled only the plain arm runs.
    """
    if suite is None or resources is None:
        suite, resources = make_suite(config)
    examples = load_dataset(config.dataset_path)
    recipe = build_recipe(config.recipe_name, config.replacement_limit)
    langs = tuple(LanguageId(c) for c in config.seen_langs)

    plain_cfg = AttackConfig(seen_langs=langs, rtt_enabled=False, seed=config.seed)
    plain_outcomes = attack_corpus(examples, recipe, plain_cfg, suite, resources)
    plain_records = build_records(plain_outcomes, "rtt_off", config.recipe_name, suite)

    written: dict[str, Path] = {}
    rows = []
    if config.rtt_enabled:
        rtt_cfg = AttackConfig(seen_langs=langs, rtt_enabled=True, seed=config.seed)
        rtt_outcomes = attack_corpus(examples, recipe, rtt_cfg, suite, resources)
        rtt_records = build_records(rtt_outcomes, "rtt_on", config.recipe_name, suite)
        relative = relative_success_rate(rtt_outcomes, plain_outcomes)
        write_records(rtt_records, config.output_path)
        written["results"] = config.output_path
        write_records(plain_records, baseline_path(config.output_path))
        written["baseline"] = baseline_path(config.output_path)
        rows.append(_summary_row("rtt_on", rtt_records, relative))
        rows.append(_summary_row("rtt_off", plain_records, None))
    else:
        write_records(plain_records, config.output_path)
        written["results"] = config.output_path
        rows.append(_summary_row("rtt_off", plain_records, None))

    out_csv = summary_path(config.output_path)
    _write_csv(out_csv, SUMMARY_HEADER, rows)
    written["summary"] = out_csv
    written["figure"] = plotting.plot_summary(
        SUMMARY_HEADER, rows, out_csv.with_suffix(".png"), title=config.recipe_name
    )
    return written


def run_rtt_robustness_eval(
    results_path: Path,
    eval_langs: tuple[str, ...],
    suite: BackendSuite,
    output_path: Path,
) -> dict[str, Path]:
    """Round-trip every success in a results file and emit the Y(k) curve."""
    records = read_records(results_path)
    successes = [r.outcome for r in records if r.outcome.status == "success"]
    recipe = records[0].recipe if records else "unknown"
    langs = [LanguageId(c) for c in eval_langs]
    rows: list[list] = []
    if successes:
        report = at_least_k_nonrobust(successes, langs, suite.victim, suite.translator)
        rows = [
            [recipe, str(k), _fmt(report.y_at_k[k - 1])]
            for k in range(1, report.m + 1)
        ]
    _write_csv(output_path, ["recipe", "k", "y_at_k"], rows)
    figure = plotting.plot_rtt_eval(rows, output_path.with_suffix(".png"))
    return {"data": output_path, "figure": figure}


def _survival_rate(
    outcomes: list[AttackOutcome],
    lang: LanguageId,
    suite: BackendSuite,
) -> float | None:
    """Fraction of successes still adversarial after one language's round trip."""
    successes = [o for o in outcomes if o.status == "success"]
    if not successes:
        return None
    report = at_least_k_nonrobust(successes, [lang], suite.victim, suite.translator)
    defeated = sum(1 for _, kept in report.flip_matrix if lang.code not in kept)
    return 100.0 * (len(successes) - defeated) / len(successes)


def run_unseen_ablation(
    config: ExperimentConfig,
    suite: BackendSuite | None = None,
    resources: Resources | None = None,
) -> dict[str, Path]:
    """Leave-one-out: attack with two seen languages, score on the third."""
    if len(config.eval_langs) < 3:
        raise ValueError("unseen-language ablation needs at least 3 languages")
    if suite is None or resources is None:
        suite, resources = make_suite(config)
    examples = load_dataset(config.dataset_path)
    recipe = build_recipe(config.recipe_name, config.replacement_limit)
    all_langs = tuple(LanguageId(c) for c in config.eval_langs)

    plain_cfg = AttackConfig(seen_langs=all_langs, rtt_enabled=False, seed=config.seed)
    plain_outcomes = attack_corpus(examples, recipe, plain_cfg, suite, resources)

    rows = []
    for unseen in all_langs:
        seen = tuple(l for l in all_langs if l != unseen)
        nmt_cfg = AttackConfig(seen_langs=seen, rtt_enabled=True, seed=config.seed)
        nmt_outcomes = attack_corpus(examples, recipe, nmt_cfg, suite, resources)
        rows.append([
            "+".join(l.code for l in seen),
            unseen.code,
            _fmt(_survival_rate(nmt_outcomes, unseen, suite)),
            _fmt(_survival_rate(plain_outcomes, unseen, suite)),
        ])
    _write_csv(config.output_path, ["seen_langs", "unseen_lang", "rate_with", "rate_without"], rows)
    figure = plotting.plot_ablation(rows, config.output_path.with_suffix(".png"))
    return {"data": config.output_path, "figure": figure}


def run_replacement_sweep(
    config: ExperimentConfig,
    suite: BackendSuite | None = None,
    resources: Resources | None = None,
) -> dict[str, Path]:
    """Robust (rtt-enabled) success counts as the candidate limit grows."""
    if not config.replacement_limits:
        raise ValueError("replacement_limits must be non-empty")
    if suite is None or resources is None:
        suite, resources = make_suite(config)
    examples = load_dataset(config.dataset_path)
    langs = tuple(LanguageId(c) for c in config.seen_langs)
    rows = []
    for limit in sorted(config.replacement_limits):
        recipe = build_recipe(config.recipe_name, limit)
        cfg = AttackConfig(seen_langs=langs, rtt_enabled=True, seed=config.seed)
        outcomes = attack_corpus(examples, recipe, cfg, suite, resources)
        robust = sum(1 for o in outcomes if o.status == "success")
        rows.append([str(limit), str(robust)])
    _write_csv(config.output_path, ["replacement_limit", "robust_successes"], rows)
    figure = plotting.plot_sweep(rows, config.output_path.with_suffix(".png"))
    return {"data": config.output_path, "figure": figure}
