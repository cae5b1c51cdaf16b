"""Exact Gaussian dynamics of an oscillator coupled to a finite dimer chain."""

__version__ = "0.1.0"
