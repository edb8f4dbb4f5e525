"""HTTP inference service exposing clinical NER over the tagging wire protocol."""
from .app import create_app, serve
from .backends import Backend, RawEntity, TermMatcherBackend, TransformerBackend, make_backend
from .config import BUILTIN_MODEL, DEFAULT_CHECKPOINT, ServiceConfig

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "BUILTIN_MODEL",
    "DEFAULT_CHECKPOINT",
    "RawEntity",
    "ServiceConfig",
    "TermMatcherBackend",
    "TransformerBackend",
    "create_app",
    "make_backend",
    "serve",
    "__version__",
]
