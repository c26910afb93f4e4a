"""Isometry-invariant permutation codes, difference matrices and MOLS."""

__version__ = "0.1.0"
