"""Entry point: configure from flags/environment and serve."""

from __future__ import annotations

import argparse
import os
import sys

import uvicorn

from .app import ShimConfig, build_provider, create_app
from .providers import ProviderError


def parse_config(argv: list[str] | None = None) -> ShimConfig:
    parser = argparse.ArgumentParser(prog="rtt-model-shim")
    parser.add_argument("--provider", choices=("toy", "transformers"),
                        default=os.environ.get("SHIM_PROVIDER", "toy"))
    parser.add_argument("--model-id",
                        default=os.environ.get("MODEL_ID",
                                               ShimConfig.classifier_model))
    parser.add_argument("--translation-family",
                        default=os.environ.get("TRANSLATION_FAMILY",
                                               ShimConfig.translation_family))
    parser.add_argument("--encoder-model",
                        default=os.environ.get("ENCODER_MODEL", ShimConfig.encoder_model))
    parser.add_argument("--device", default=os.environ.get("DEVICE", "cpu"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("PORT", "8008")))
    parser.add_argument("--max-batch", type=int,
                        default=int(os.environ.get("MAX_BATCH", "64")))
    args = parser.parse_args(argv)
    return ShimConfig(
        provider=args.provider,
        classifier_model=args.model_id,
        translation_family=args.translation_family,
        encoder_model=args.encoder_model,
        device=args.device,
        port=args.port,
        max_batch=args.max_batch,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_config(argv)
        provider = build_provider(config)
        if config.provider == "transformers":
            # resolve the classifier eagerly so bad model ids fail at startup
            provider.classify(["startup probe"])
    except (ProviderError, ValueError) as exc:
        print(f"startup error: {exc}", file=sys.stderr)
        return 1
    app = create_app(config, provider)
    uvicorn.run(app, host="0.0.0.0", port=config.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
