"""Lattice-theoretic obstructions to slicing knots by crossing changes."""

__version__ = "0.1.0"

# Bumped whenever a change could alter a cached result.
ALGORITHM_VERSION = "1"
