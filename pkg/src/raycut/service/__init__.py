"""HTTP backend for the interactive seed-steering loop."""

from .app import create_app

__all__ = ["create_app"]
