"""HTTP service wrapping the core package: pydantic request/response models,
pure handler functions, and the FastAPI app."""

from . import handlers, schemas
from .app import app

__all__ = ["app", "handlers", "schemas"]
