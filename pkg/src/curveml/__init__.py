"""Euler-coefficient features of genus-1 and genus-2 curves over Q, and
from-scratch classifiers for predicting their arithmetic invariants."""

__version__ = "0.1.0"
