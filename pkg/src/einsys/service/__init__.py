"""HTTP service wrapping the experiment runner and exporters."""

from .app import app, create_app

__all__ = ["app", "create_app"]
