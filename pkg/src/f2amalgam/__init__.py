"""Finite-window computations for GF(2) covers of the n-subset structure.

Ranks and exactness of the inclusion maps, the fiber-module submodules,
window automorphisms, amalgamation problems with their uniqueness gaps and
existence deciders, and the relational presentation.
"""

__version__ = "0.1.0"
