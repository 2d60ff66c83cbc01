"""cskit: build code-switched parallel corpora and evaluate CS generation."""

__version__ = "0.1.0"
