"""Simulation and verification lab for weighted depths, weighted path length,
weighted Wiener index and the silhouette of random binary search trees.

Subpackages are organised by what they compute:

- ``tree``        : labelled BST construction (permutation / i.i.d. model) and
                    per-node depth, weighted depth, distance and DFS queries
- ``functionals`` : path length, Wiener index and their key-weighted versions,
                    by linear-time recursion and by a quadratic direct oracle
- ``silhouette``  : the nested-key refinement process on dyadic paths, its
                    limit evaluation and marginal density estimation
- ``laws``        : reference distributions (Dickman, arcsine, normal) with
                    samplers and characteristic functions
- ``oracle``      : exact enumeration over all permutations (n <= 8)
- ``fixedpoint``  : the 4x4 second-moment fixed-point solve for the joint
                    limit of (weighted) path length and (weighted) Wiener index
- ``statlab``     : streaming moments, KS tests, correlation, regression
- ``experiments`` : declarative Monte Carlo experiments with conformance rows
- ``cli``         : command line entry point
"""

__version__ = "0.1.0"
