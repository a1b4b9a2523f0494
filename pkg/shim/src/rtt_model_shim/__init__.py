"""HTTP shim exposing classifier/translator/encoder models behind the
rtt-attack wire protocol."""

from .app import ShimConfig, create_app
from .providers import ModelProvider, ProviderError, ToyProvider

__version__ = "0.1.0"

__all__ = ["ModelProvider", "ProviderError", "ShimConfig", "ToyProvider", "create_app", "__version__"]
