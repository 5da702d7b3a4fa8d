"""engelkit: exact frame calculus for rank-2 distributions on 4-manifolds."""

__version__ = "0.1.0"
