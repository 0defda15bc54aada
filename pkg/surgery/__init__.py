"""Surgery calculus for 4-manifolds: lattices, blow-up ledgers, twist words and rational blowdowns."""

__version__ = "1.0.0"
