"""Computational tools for the complex hyperbolic plane.

Submodules
----------
hermlin     Hermitian forms, point location, eigen-solvers, model changes.
isometry    Classification and calculus of holomorphic/antiholomorphic isometries.
invariants  Triple ratio, Cartan invariant, cross-ratios, Toledo formula.
heisenberg  Heisenberg group, contact structure, R-circles and fans.
decomp      Decomposition of pairs into products of real reflections.
picard      Exact certificates for Picard modular groups.
"""

__version__ = "0.1.0"
