"""HTTP service wrapping the library; see app for the endpoints."""
from .app import app

__all__ = ["app"]
