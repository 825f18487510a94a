"""Information-design toolkit for LLM tool registries."""

__version__ = "0.1.0"
