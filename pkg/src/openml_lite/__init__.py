"""Self-hostable experiment tracking service for machine learning benchmarks."""

__version__ = "0.1.0"
