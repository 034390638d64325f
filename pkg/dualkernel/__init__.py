"""Dual-kernel proof checker for Martin-Löf type theory.

The computational kernel evaluates terms and decides judgements by their
meaning explanations on the finitary fragment; the proof-theoretic kernel
checks β-normal proof terms bidirectionally. Erasure connects the two.
"""

__version__ = "1.0.0"
