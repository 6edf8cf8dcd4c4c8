"""Exact computations with quasi-free differential graded-commutative algebras."""
