"""FastAPI application speaking the attack framework's wire protocol.

Endpoints, schemas and error shape match the protocol exactly:

    POST /v1/classify  {"texts":[...]}                -> {"predictions":[{"label":int,"probs":[...]}]}
    POST /v1/translate {"texts":[...],"src":..,"tgt":..} -> {"texts":[...]}
    POST /v1/encode    {"texts":[...]}                -> {"vectors":[[...]]}

Any failure answers non-200 with {"error": text}.
"""

from __future__ import annotations

from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .providers import ModelProvider, ProviderError, ToyProvider


@dataclass(frozen=True)
class ShimConfig:
    provider: str = "toy"  # toy | transformers
    classifier_model: str = "distilbert-base-uncased-finetuned-sst-2-english"
    translation_family: str = "Helsinki-NLP/opus-mt-{src}-{tgt}"
    encoder_model: str = "sentence-transformers/all-MiniLM-L6-v2"
    device: str = "cpu"
    port: int = 8008
    max_batch: int = 64

    def __post_init__(self) -> None:
        if not 0 < self.port < 65536:
            raise ValueError(f"port {self.port} outside valid range")
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        if self.provider not in ("toy", "transformers"):
            raise ValueError(f"unknown provider {self.provider!r}")


class ClassifyRequest(BaseModel):
    texts: list[str]


class TranslateRequest(BaseModel):
    texts: list[str]
    src: str
    tgt: str


class EncodeRequest(BaseModel):
    texts: list[str]


def build_provider(config: ShimConfig) -> ModelProvider:
    if config.provider == "toy":
        return ToyProvider()
    from .providers import TransformersProvider

    return TransformersProvider(
        classifier_model=config.classifier_model,
        translation_family=config.translation_family,
        encoder_model=config.encoder_model,
        device=config.device,
    )


def create_app(config: ShimConfig | None = None, provider: ModelProvider | None = None) -> FastAPI:
    config = config or ShimConfig()
    provider = provider or build_provider(config)
    app = FastAPI(title="rtt-model-shim", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(ProviderError)
    async def provider_failure(request: Request, exc: ProviderError):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    def batch_guard(texts: list[str]) -> JSONResponse | None:
        if len(texts) > config.max_batch:
            return JSONResponse(
                status_code=413,
                content={"error": f"batch of {len(texts)} exceeds limit {config.max_batch}"},
            )
        return None

    @app.post("/v1/classify")
    async def classify(request: ClassifyRequest):
        if (oversize := batch_guard(request.texts)) is not None:
            return oversize
        results = provider.classify(request.texts)
        return {
            "predictions": [
                {"label": label, "probs": probs} for label, probs in results
            ]
        }

    @app.post("/v1/translate")
    async def translate(request: TranslateRequest):
        if (oversize := batch_guard(request.texts)) is not None:
            return oversize
        return {"texts": provider.translate(request.texts, request.src, request.tgt)}

    @app.post("/v1/encode")
    async def encode(request: EncodeRequest):
        if (oversize := batch_guard(request.texts)) is not None:
            return oversize
        return {"vectors": provider.encode(request.texts)}

    return app
