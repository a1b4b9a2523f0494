"""Command-line surface for running attacks and the evaluation experiments.

Exit codes: 0 on success, 1 for configuration problems (bad flags, missing
files), 2 for backend/transport failures. The RTT_ATTACK_ENDPOINT
environment variable overrides --endpoint.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .backends import BackendError
from .experiments import (
    ExperimentConfig,
    make_suite,
    run_attack_experiment,
    run_replacement_sweep,
    run_rtt_robustness_eval,
    run_unseen_ablation,
)
from .search import RECIPE_NAMES

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BACKEND = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _csv_codes(raw: str) -> tuple[str, ...]:
    return tuple(code.strip() for code in raw.split(",") if code.strip())


def _csv_ints(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(v.strip()) for v in raw.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {raw!r}")


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("builtin", "remote"), default="builtin")
    p.add_argument("--endpoint", default=None, help="remote backend URL")
    p.add_argument("--timeout-ms", type=int, default=30_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rtt-attack",
                     description="Round-trip-translation-robust adversarial attacks")
    sub = parser.add_subparsers(dest="command", required=True)

    attack = sub.add_parser("attack", parents=[], help="run one attack experiment")
    attack.add_argument("--dataset", required=True, type=Path)
    attack.add_argument("--recipe", choices=RECIPE_NAMES, required=True)
    attack.add_argument("--langs", type=_csv_codes, default=("es", "de", "fr"))
    attack.add_argument("--rtt", choices=("on", "off"), default="on")
    attack.add_argument("--limit", type=int, default=40)
    _add_backend_flags(attack)

    eval_rtt = sub.add_parser("eval-rtt", help="round-trip robustness of saved successes")
    eval_rtt.add_argument("--results", required=True, type=Path)
    eval_rtt.add_argument("--langs", type=_csv_codes, default=("es", "de", "fr"))
    _add_backend_flags(eval_rtt)

    ablate = sub.add_parser("ablate-unseen", help="leave-one-language-out ablation")
    ablate.add_argument("--dataset", required=True, type=Path)
    ablate.add_argument("--recipe", choices=RECIPE_NAMES, required=True)
    ablate.add_argument("--langs", type=_csv_codes, default=("es", "de", "fr"))
    ablate.add_argument("--limit", type=int, default=40)
    _add_backend_flags(ablate)

    sweep = sub.add_parser("sweep", help="robust successes vs replacement limit")
    sweep.add_argument("--dataset", required=True, type=Path)
    sweep.add_argument("--recipe", choices=RECIPE_NAMES, required=True)
    sweep.add_argument("--limits", type=_csv_ints, default=(1, 5, 10, 20, 40))
    sweep.add_argument("--langs", type=_csv_codes, default=("es", "de", "fr"))
    _add_backend_flags(sweep)

    return parser


def _config_from_args(args: argparse.Namespace, dataset: Path | None) -> ExperimentConfig:
    endpoint = os.environ.get("RTT_ATTACK_ENDPOINT") or args.endpoint
    return ExperimentConfig(
        dataset_path=dataset if dataset is not None else Path(os.devnull),
        recipe_name=getattr(args, "recipe", "textfooler"),
        seen_langs=args.langs,
        eval_langs=args.langs,
        replacement_limit=getattr(args, "limit", 40),
        replacement_limits=getattr(args, "limits", (1, 5, 10, 20, 40)),
        rtt_enabled=getattr(args, "rtt", "on") == "on",
        backend_mode=args.backend,
        endpoint=endpoint,
        timeout_ms=args.timeout_ms,
        seed=args.seed,
        output_path=args.out,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "attack":
            config = _config_from_args(args, args.dataset)
            written = run_attack_experiment(config)
        elif args.command == "eval-rtt":
            config = _config_from_args(args, None)
            suite, _ = make_suite(config)
            written = run_rtt_robustness_eval(args.results, args.langs, suite, args.out)
        elif args.command == "ablate-unseen":
            config = _config_from_args(args, args.dataset)
            written = run_unseen_ablation(config)
        else:
            config = _config_from_args(args, args.dataset)
            written = run_replacement_sweep(config)
    except BackendError as exc:
        print(f"backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (FileNotFoundError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for kind, path in written.items():
        print(f"wrote {kind}: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
