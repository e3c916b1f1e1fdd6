"""Semi-transitive orientations and word-representants of circulant graphs."""

__version__ = "0.1.0"
