"""HTTP layer: FastAPI application and pydantic wire models."""

from .app import app, create_app

__all__ = ["app", "create_app"]
