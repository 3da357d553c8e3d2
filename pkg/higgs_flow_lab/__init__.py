# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Numerical laboratory for Higgs bundles over model Hermitian manifolds.

The package discretizes Higgs bundles over flat tori and over a finite volume
cusp cylinder and implements the machinery around the Hermitian-Einstein
equation: the mean curvature of the Hitchin-Simpson connection, the perturbed
heat flow, exhaustion domains, Helmholtz and Poisson solvers, analytic degrees
and an ε-continuation that classifies stability.

The modules build on each other from the bottom up:

- :mod:`higgs_flow_lab.geometry` (grids, Δ̃, quadrature, exhaustion domains)
- :mod:`higgs_flow_lab.bundle` (matrix fields, curvature, Φ and Ψ)
- :mod:`higgs_flow_lab.analysis` (Donaldson distance, degrees, verdicts)
- :mod:`higgs_flow_lab.poisson` (Helmholtz, Poisson and conformal solves)
- :mod:`higgs_flow_lab.flow` (the perturbed heat flow)
- :mod:`higgs_flow_lab.continuation` (perturbed solutions and ε-sweeps)
- :mod:`higgs_flow_lab.cli` (the ``higgs-flow-lab`` program)
"""

# Semi-standard module versioning.
__version__ = '1.0'

THREADS_VARIABLE = 'HIGGS_FLOW_LAB_THREADS'
"""The name of the environment variable that overrides the thread count (a string)."""

HERMITIAN_TOLERANCE = 1e-10
"""Relative tolerance used to accept a matrix field as Hermitian (a float)."""
