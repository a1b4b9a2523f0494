import csv

import pytest

from rtt_attack.builtin import corpus_path
from rtt_attack.cli import main
from rtt_attack.experiments import (
    ExperimentConfig,
    baseline_path,
    build_records,
    read_records,
    record_from_dict,
    record_to_dict,
    run_attack_experiment,
    run_replacement_sweep,
    run_rtt_robustness_eval,
    run_unseen_ablation,
    summary_path,
    write_records,
)
from rtt_attack.search import AttackConfig, attack_corpus, build_recipe

from .helpers import mini_suite, normalizing_translator, success_outcome, write_dataset


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def mini_dataset(tmp_path):
    rows = [
        {"id": f"e{i}", "text": "the good movie ran long tonight", "label": 1}
        for i in range(8)
    ] + [
        {"id": "skip", "text": "the good movie ran long tonight", "label": 0},
        {"id": "hard", "text": "the plain movie ran long tonight", "label": 1},
    ]
    return write_dataset(tmp_path / "data.jsonl", rows)


@pytest.fixture
def mini_world_setup():
    # "awful" normalizes back to "good" (blocked by rtt); "lousy" survives
    return mini_suite(
        lexicon={"good": 2.0, "awful": -2.0, "lousy": -2.0},
        synonyms={"good": ["awful", "lousy"]},
        normalize={"awful": "good"},
    )


class TestRecordSerialization:
    def test_round_trip_is_lossless(self, mini_world_setup):
        suite, resources = mini_world_setup
        from rtt_attack.text_core import LabeledExample

        examples = [LabeledExample("e1", "the good movie ran long tonight", 1)]
        outcomes = attack_corpus(
            examples, build_recipe("pwws"), AttackConfig(rtt_enabled=False), suite, resources
        )
        records = build_records(outcomes, "rtt_off", "pwws", suite)
        for record in records:
            assert record_from_dict(record_to_dict(record)) == record

    def test_file_round_trip(self, tmp_path, mini_world_setup):
        suite, resources = mini_world_setup
        from rtt_attack.text_core import LabeledExample

        examples = [
            LabeledExample("e1", "the good movie ran long tonight", 1),
            LabeledExample("skip", "the good movie ran long tonight", 0),
        ]
        outcomes = attack_corpus(
            examples, build_recipe("pwws"), AttackConfig(rtt_enabled=False), suite, resources
        )
        records = build_records(outcomes, "rtt_off", "pwws", suite)
        path = tmp_path / "records.jsonl"
        write_records(records, path)
        assert read_records(path) == records


class TestRunAttackExperiment:
    def config(self, dataset, out, rtt=True):
        return ExperimentConfig(
            dataset_path=dataset,
            recipe_name="pwws",
            seen_langs=("es", "de", "fr"),
            rtt_enabled=rtt,
            output_path=out,
        )

    def test_summary_relative_rate_matches_enumeration(self, tmp_path, mini_dataset, mini_world_setup):
        suite, resources = mini_world_setup
        out = tmp_path / "run.jsonl"
        written = run_attack_experiment(self.config(mini_dataset, out), suite, resources)
        main_records = read_records(written["results"])
        base_records = read_records(written["baseline"])
        nmt_successes = sum(1 for r in main_records if r.outcome.status == "success")
        plain_successes = sum(1 for r in base_records if r.outcome.status == "success")
        rows = read_csv(written["summary"])
        header, rtt_row = rows[0], rows[1]
        relative = float(rtt_row[header.index("relative_success_rate")])
        assert relative == pytest.approx(100.0 * nmt_successes / plain_successes)
        assert rtt_row[header.index("arm")] == "rtt_on"
        assert written["figure"].exists()

    def test_empty_dataset(self, tmp_path, mini_world_setup):
        suite, resources = mini_world_setup
        dataset = tmp_path / "empty.jsonl"
        dataset.write_text("")
        out = tmp_path / "run.jsonl"
        run_attack_experiment(self.config(dataset, out), suite, resources)
        assert read_records(out) == []
        rows = read_csv(summary_path(out))
        assert rows[1][rows[0].index("success_rate")] == ""
        assert rows[1][rows[0].index("relative_success_rate")] == ""

    def test_rtt_off_runs_single_arm(self, tmp_path, mini_dataset, mini_world_setup):
        suite, resources = mini_world_setup
        out = tmp_path / "plain.jsonl"
        written = run_attack_experiment(
            self.config(mini_dataset, out, rtt=False), suite, resources
        )
        assert "baseline" not in written
        rows = read_csv(written["summary"])
        assert len(rows) == 2 and rows[1][0] == "rtt_off"

    def test_run_twice_byte_identical(self, tmp_path, mini_dataset, mini_world_setup):
        suite, resources = mini_world_setup
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name / "run.jsonl"
            run_attack_experiment(self.config(mini_dataset, out), suite, resources)
            outs.append(out)
        for suffix in ("", ".baseline", ".summary"):
            a = outs[0].with_name("run" + suffix + (".csv" if suffix == ".summary" else ".jsonl"))
            b = outs[1].with_name("run" + suffix + (".csv" if suffix == ".summary" else ".jsonl"))
            assert a.read_bytes() == b.read_bytes()


class TestRunRttRobustnessEval:
    def test_identity_translator_gives_zero_rows(self, tmp_path, mini_world_setup):
        suite, resources = mini_world_setup
        records = build_records(
            [success_outcome("a", "nice room", "lousy room")], "rtt_off", "pwws", suite
        )
        results = tmp_path / "r.jsonl"
        write_records(records, results)
        identity = mini_suite(lexicon={"nice": 2.0, "lousy": -2.0})[0]
        out = tmp_path / "eval.csv"
        written = run_rtt_robustness_eval(results, ("es", "de", "fr"), identity, out)
        rows = read_csv(written["data"])
        assert rows[0] == ["recipe", "k", "y_at_k"]
        assert [r[2] for r in rows[1:]] == ["0.000000", "0.000000", "0.000000"]

    def test_enumerated_defeat_sets(self, tmp_path, mini_world_setup):
        suite, _ = mini_world_setup
        outcomes = [
            success_outcome("a", "nice room", "awfulx room"),
            success_outcome("b", "nice room", "awfuly room"),
            success_outcome("c", "nice room", "awfulz room"),
        ]
        records = build_records(outcomes, "rtt_off", "textfooler", suite)
        results = tmp_path / "r.jsonl"
        write_records(records, results)
        eval_suite = mini_suite(
            lexicon={"nice": 2.0, "awfulx": -2.0, "awfuly": -2.0, "awfulz": -2.0}
        )[0]
        translator = normalizing_translator(
            {"awfulx": {"es"}, "awfuly": {"es", "de"}, "awfulz": set()}
        )
        from rtt_attack.backends import BackendSuite

        eval_suite = BackendSuite(
            victim=eval_suite.victim, translator=translator, encoder=eval_suite.encoder
        )
        out = tmp_path / "eval.csv"
        written = run_rtt_robustness_eval(results, ("es", "de", "fr"), eval_suite, out)
        rows = read_csv(written["data"])
        assert [r[2] for r in rows[1:]] == ["0.666667", "0.333333", "0.000000"]

    def test_no_successes_gives_header_only(self, tmp_path, mini_world_setup):
        suite, _ = mini_world_setup
        results = tmp_path / "r.jsonl"
        write_records([], results)
        out = tmp_path / "eval.csv"
        written = run_rtt_robustness_eval(results, ("es", "de", "fr"), suite, out)
        rows = read_csv(written["data"])
        assert rows == [["recipe", "k", "y_at_k"]]
        assert written["figure"].exists()


class TestRunUnseenAblation:
    def config(self, dataset, out):
        return ExperimentConfig(
            dataset_path=dataset,
            recipe_name="pwws",
            seen_langs=("es", "de", "fr"),
            eval_langs=("es", "de", "fr"),
            output_path=out,
        )

    def test_identity_languages_give_hundred_both_sides(self, tmp_path, mini_dataset):
        suite, resources = mini_suite(
            lexicon={"good": 2.0, "awful": -2.0}, synonyms={"good": ["awful"]}
        )
        out = tmp_path / "ablate.csv"
        run_unseen_ablation(self.config(mini_dataset, out), suite, resources)
        rows = read_csv(out)
        assert len(rows) == 4  # header + 3 splits
        for row in rows[1:]:
            assert row[2] == "100.000000"
            assert row[3] == "100.000000"

    def test_shared_normalization_direction(self, tmp_path, mini_dataset, mini_world_setup):
        suite, resources = mini_world_setup
        out = tmp_path / "ablate.csv"
        run_unseen_ablation(self.config(mini_dataset, out), suite, resources)
        rows = read_csv(out)
        assert len(rows) == 4
        for row in rows[1:]:
            assert float(row[2]) >= float(row[3])

    def test_fewer_than_three_languages_rejected(self, tmp_path, mini_dataset):
        config = ExperimentConfig(
            dataset_path=mini_dataset,
            recipe_name="pwws",
            eval_langs=("es", "de"),
            output_path=tmp_path / "x.csv",
        )
        with pytest.raises(ValueError):
            run_unseen_ablation(config)


class TestRunReplacementSweep:
    def test_single_limit_single_row(self, tmp_path, mini_dataset, mini_world_setup):
        suite, resources = mini_world_setup
        config = ExperimentConfig(
            dataset_path=mini_dataset,
            recipe_name="pwws",
            replacement_limits=(1,),
            output_path=tmp_path / "sweep.csv",
        )
        run_replacement_sweep(config, suite, resources)
        rows = read_csv(config.output_path)
        assert len(rows) == 2
        assert rows[1][0] == "1"

    def test_counts_non_decreasing_and_limit_40_present(self, tmp_path, mini_dataset, mini_world_setup):
        suite, resources = mini_world_setup
        config = ExperimentConfig(
            dataset_path=mini_dataset,
            recipe_name="pwws",
            replacement_limits=(1, 2, 40),
            output_path=tmp_path / "sweep.csv",
        )
        run_replacement_sweep(config, suite, resources)
        rows = read_csv(config.output_path)
        counts = [int(r[1]) for r in rows[1:]]
        assert counts == sorted(counts)
        assert rows[-1][0] == "40"
        # limit 1 only reaches the normalizing candidate; limit 2 unlocks the survivor
        assert counts[0] == 0 and counts[1] == 8

    def test_empty_limits_rejected(self, tmp_path, mini_dataset):
        config = ExperimentConfig(
            dataset_path=mini_dataset,
            recipe_name="pwws",
            replacement_limits=(),
            output_path=tmp_path / "x.csv",
        )
        with pytest.raises(ValueError):
            run_replacement_sweep(config)


class TestCli:
    def test_attack_on_packaged_corpus(self, tmp_path):
        out = tmp_path / "run.jsonl"
        code = main([
            "attack", "--dataset", str(corpus_path()), "--recipe", "pwws",
            "--langs", "es,de,fr", "--rtt", "on", "--limit", "40",
            "--backend", "builtin", "--seed", "0", "--out", str(out),
        ])
        assert code == 0
        assert out.exists() and baseline_path(out).exists()
        assert summary_path(out).exists()
        assert summary_path(out).with_suffix(".png").exists()

    def test_unknown_recipe_exits_config(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as info:
            main(["attack", "--dataset", "x.jsonl", "--recipe", "bae",
                  "--out", str(tmp_path / "o.jsonl")])
        assert info.value.code == 1

    def test_missing_dataset_exits_config(self, tmp_path):
        code = main([
            "attack", "--dataset", str(tmp_path / "nope.jsonl"), "--recipe", "pwws",
            "--out", str(tmp_path / "o.jsonl"),
        ])
        assert code == 1

    def test_remote_refused_exits_backend(self, tmp_path):
        code = main([
            "attack", "--dataset", str(corpus_path()), "--recipe", "pwws",
            "--backend", "remote", "--endpoint", "http://127.0.0.1:9",
            "--timeout-ms", "300", "--out", str(tmp_path / "o.jsonl"),
        ])
        assert code == 2

    def test_env_var_overrides_endpoint(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("RTT_ATTACK_ENDPOINT", "http://127.0.0.1:9")
        code = main([
            "attack", "--dataset", str(corpus_path()), "--recipe", "pwws",
            "--backend", "remote", "--endpoint", "http://127.0.0.1:10",
            "--timeout-ms", "300", "--out", str(tmp_path / "o.jsonl"),
        ])
        assert code == 2
        assert "127.0.0.1:9" in capsys.readouterr().err

    def test_eval_rtt_cli(self, tmp_path):
        run_out = tmp_path / "run.jsonl"
        assert main([
            "attack", "--dataset", str(corpus_path()), "--recipe", "textfooler",
            "--rtt", "off", "--out", str(run_out),
        ]) == 0
        eval_out = tmp_path / "eval.csv"
        assert main([
            "eval-rtt", "--results", str(run_out), "--langs", "es,de,fr",
            "--out", str(eval_out),
        ]) == 0
        rows = read_csv(eval_out)
        assert rows[0] == ["recipe", "k", "y_at_k"]
        assert len(rows) == 4
