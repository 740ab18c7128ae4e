"""Discovery, ranking, and expert curation of interpretable dependency-path
simplifications, plus batch pair generation and desk-scale evaluation."""

__version__ = "0.1.0"
