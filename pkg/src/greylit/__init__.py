"""Entity-driven search toolkit for archaeological grey literature."""

__version__ = "0.1.0"
