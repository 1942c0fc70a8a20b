"""Desk-scale phrase-based statistical machine translation with lexical-resource augmentation."""

__version__ = "0.1.0"
