# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Scalar functionals of metrics.

This module computes Donaldson's distance between metrics, analytic degrees
and slopes, degrees of candidate sub-objects (including the second
fundamental form penalty), stability verdicts relative to a finite candidate
list and the residual of the integral identity that links ``Φ(K)``,
``Φ(H)`` and the Ψ-weighted energy of ``s = log(K⁻¹H)``.
"""

# Standard library modules.
import logging
from enum import Enum

# External dependencies.
import numpy as np
from humanfriendly.text import compact, pluralize
from property_manager import PropertyManager, lazy_property, required_property

# Modules included in our package.
from higgs_flow_lab.bundle import (
    chern_curvature,
    contract,
    dagger,
    dbar_theta,
    form_inner,
    higgs_commutator,
    identity_field,
    matrix_sqrt,
    mean_curvature_phi,
    psi_bilinear,
    relative_log,
    trace,
)
from higgs_flow_lab.exceptions import (
    BoundaryConditionError,
    InvalidCandidateError,
    NonFiniteCurvatureError,
    RankMismatchError,
)
from higgs_flow_lab.geometry import integrate

PROJECTOR_TOLERANCE = 1e-10
"""Pointwise tolerance on ``π² = π`` and ``π^{*K} = π`` (a float)."""

MARGIN_FACTOR = 1e-4
"""The default stability margin is this factor times ``1 + |λ|`` (a float)."""

BOUNDARY_TOLERANCE = 1e-10
"""How far a relative metric may deviate from the identity on a Dirichlet boundary ring (a float)."""

# Public identifiers that require documentation.
__all__ = (
    'BOUNDARY_TOLERANCE',
    'MARGIN_FACTOR',
    'PROJECTOR_TOLERANCE',
    'DegreeReport',
    'StabilityCandidate',
    'Verdict',
    'analytic_degree',
    'candidate_terms',
    'compute_slope',
    'conjugate',
    'curvature_density',
    'donaldson_distance',
    'identity_residual',
    'identity_terms',
    'logger',
    'stability_verdict',
    'subobject_degree',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


class Verdict(Enum):

    """Stability verdicts (relative to a candidate list)."""

    STABLE = 'STABLE'
    SEMISTABLE = 'SEMISTABLE'
    UNSTABLE = 'UNSTABLE'
    INCONCLUSIVE = 'INCONCLUSIVE'


class StabilityCandidate(PropertyManager):

    """A candidate sub-object given by an orthogonal projection field."""

    repr_properties = ('label',)

    @required_property(repr=False)
    def projection(self):
        """The projection field ``π`` (a numpy array with trailing ``(r, r)`` axes)."""

    @required_property
    def label(self):
        """A short description (a string like ``span(e1)``)."""

    @lazy_property
    def rank(self):
        """The (constant) rank of the projection (an integer)."""
        traces = np.real(trace(self.projection))
        rank = int(round(float(traces.mean())))
        if np.abs(traces - rank).max() > 1e-8:
            raise InvalidCandidateError("Candidate %s doesn't have constant rank!" % self.label)
        return rank

    def validate(self, reference=None):
        """
        Check that :attr:`projection` is an orthogonal projector of constant rank.

        :param reference: The reference metric ``K`` relative to ``H₀`` (or
                          :data:`None` for ``K = H₀``).
        :raises: :exc:`.InvalidCandidateError` when the checks fail.
        """
        pi = np.asarray(self.projection)
        idempotence = np.abs(pi @ pi - pi).max()
        if idempotence > PROJECTOR_TOLERANCE:
            raise InvalidCandidateError("Candidate %s isn't idempotent! (defect %.3g)" % (self.label, idempotence))
        adjoint = dagger(pi) if reference is None else np.linalg.solve(reference, dagger(pi) @ reference)
        symmetry = np.abs(adjoint - pi).max()
        if symmetry > PROJECTOR_TOLERANCE:
            raise InvalidCandidateError("Candidate %s isn't orthogonal! (defect %.3g)" % (self.label, symmetry))
        if not 0 < self.rank < pi.shape[-1]:
            raise InvalidCandidateError("Candidate %s isn't a proper sub-object! (rank %i)" % (self.label, self.rank))


class DegreeReport(PropertyManager):

    """Degrees and slopes of a bundle and its candidates, with the resulting verdict."""

    repr_properties = ('total_degree', 'slope', 'verdict')

    @required_property
    def total_degree(self):
        """The analytic degree of the bundle (a float)."""

    @required_property
    def slope(self):
        """The constant ``λ = deg / (r · Vol)`` (a float)."""

    @required_property
    def volume(self):
        """The volume of the manifold (a float)."""

    @required_property
    def rank(self):
        """The rank of the bundle (an integer)."""

    @required_property(repr=False)
    def candidates(self):
        """
        One dictionary per candidate (a list of dictionaries).

        The keys are ``label``, ``degree``, ``rank``, ``slope``, ``penalty``
        and ``invariance_defect``.
        """

    @required_property
    def margin(self):
        """The slope margin used to decide the verdict (a float)."""

    @required_property
    def verdict(self):
        """The :class:`Verdict` relative to the candidate list."""

    def to_dict(self):
        """Convert the report to a dictionary (suitable for JSON serialization)."""
        return dict(
            total_degree=self.total_degree,
            slope=self.slope,
            volume=self.volume,
            rank=self.rank,
            margin=self.margin,
            verdict=self.verdict.value,
            verdict_scope="relative to the candidate list",
            candidates=[dict(c) for c in self.candidates],
        )


def compute_slope(degree, rank, volume):
    """Compute the slope ``deg / (rank · Vol)``."""
    return degree / (rank * volume)


def conjugate(reference, field):
    """Express an endomorphism field in a ``K``-unitary frame (``k^{1/2} a k^{-1/2}``)."""
    if reference is None:
        return field
    root, inverse_root = matrix_sqrt(reference)
    return root @ field @ inverse_root


def donaldson_distance(h1, h2):
    """
    Compute Donaldson's distance ``σ = tr(h₁⁻¹h₂) + tr(h₂⁻¹h₁) - 2r``.

    :param h1: A metric field.
    :param h2: A metric field.
    :returns: A tuple with the pointwise distance (a real numpy array) and its supremum.
    :raises: :exc:`.RankMismatchError` when the fields don't have the same shape.
    """
    h1, h2 = np.asarray(h1), np.asarray(h2)
    if h1.shape != h2.shape:
        raise RankMismatchError("Can't compare metric fields of shape %s and %s!" % (h1.shape, h2.shape))
    rank = h1.shape[-1]
    sigma = np.real(trace(np.linalg.solve(h1, h2)) + trace(np.linalg.solve(h2, h1))) - 2 * rank
    return sigma, float(sigma.max())


def curvature_density(manifold, bundle, reference=None):
    """
    Evaluate ``√-1 Λ (F_K + [θ, θ^{*K}])``.

    :param reference: The metric ``K`` relative to ``H₀`` (:data:`None` means ``K = H₀``).
    :returns: An endomorphism field.
    :raises: :exc:`.NonFiniteCurvatureError` when the result isn't finite.
    """
    if reference is None:
        reference = identity_field(manifold.shape, bundle.rank)
    total = chern_curvature(manifold, bundle, reference) + higgs_commutator(manifold, bundle, reference)
    density = contract(manifold, total)
    if not np.all(np.isfinite(density)):
        raise NonFiniteCurvatureError("The curvature of bundle %s isn't finite!" % bundle.label)
    return density


def analytic_degree(manifold, bundle, reference=None):
    """
    Compute the analytic degree and the slope constant ``λ``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param reference: The metric ``K`` relative to ``H₀`` (optional).
    :returns: A tuple ``(degree, λ)`` with ``λ = degree / (r · Vol)``.
    """
    density = curvature_density(manifold, bundle, reference)
    degree = float(np.real(integrate(manifold, trace(density))))
    return degree, compute_slope(degree, bundle.rank, manifold.volume)


def candidate_terms(manifold, bundle, candidate, reference=None, density=None):
    """
    Compute the degree of a candidate together with its penalty terms.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param candidate: A :class:`StabilityCandidate` object.
    :param reference: The metric ``K`` relative to ``H₀`` (optional).
    :param density: The result of :func:`curvature_density()` (optional, to avoid recomputation).
    :returns: A dictionary with the keys ``label``, ``degree``, ``rank``,
              ``slope``, ``penalty`` and ``invariance_defect``.
    :raises: :exc:`.InvalidCandidateError` when the projection is invalid.

    The penalty is ``∫|∂̄π + [θ, π]|²_K``; for θ-invariant projectors its
    Higgs part cancels ``∫tr(π √-1 Λ [θ, θ*])`` and the invariance defect
    ``∫|(1 - π)(∂̄π + [θ, π])|²_K`` vanishes.
    """
    candidate.validate(reference)
    if density is None:
        density = curvature_density(manifold, bundle, reference)
    pi = np.asarray(candidate.projection)
    defect_form = dbar_theta(manifold, bundle, pi)
    complement = np.eye(bundle.rank) - pi
    unitary = conjugate(reference, defect_form)
    projected = conjugate(reference, complement @ defect_form)
    penalty = float(integrate(manifold, form_inner(manifold, unitary, unitary)))
    defect = float(integrate(manifold, form_inner(manifold, projected, projected)))
    degree = float(np.real(integrate(manifold, trace(pi @ density)))) - penalty
    return dict(
        label=candidate.label,
        degree=degree,
        rank=candidate.rank,
        slope=compute_slope(degree, candidate.rank, manifold.volume),
        penalty=penalty,
        invariance_defect=defect,
    )


def subobject_degree(manifold, bundle, reference, candidate):
    """
    Compute the analytic degree of a candidate sub-object.

    :returns: ``∫ tr(π √-1 Λ F_{K,θ}) - |∂̄_θ π|²_K`` (a float).
    """
    return candidate_terms(manifold, bundle, candidate, reference)['degree']


def stability_verdict(manifold, bundle, reference, candidates, margin=None):
    """
    Compare candidate slopes with the slope of the bundle.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param candidates: A list of :class:`StabilityCandidate` objects.
    :param reference: The metric ``K`` relative to ``H₀`` (optional).
    :param margin: The slope margin (defaults to :data:`MARGIN_FACTOR` times ``1 + |λ|``).
    :returns: A :class:`DegreeReport` object.
    :raises: :exc:`~exceptions.ValueError` when the candidate list is empty.

    The verdict is :attr:`~Verdict.UNSTABLE` when some slope exceeds ``λ +
    margin``, :attr:`~Verdict.STABLE` when every slope is below ``λ -
    margin`` and :attr:`~Verdict.SEMISTABLE` otherwise. It is only valid
    relative to the candidate list.
    """
    if not candidates:
        raise ValueError("Invalid candidate list, expected at least one candidate! (%r)" % (candidates,))
    density = curvature_density(manifold, bundle, reference)
    degree = float(np.real(integrate(manifold, trace(density))))
    slope = compute_slope(degree, bundle.rank, manifold.volume)
    if margin is None:
        margin = MARGIN_FACTOR * (1 + abs(slope))
    rows = [candidate_terms(manifold, bundle, c, reference, density) for c in candidates]
    if any(row['slope'] > slope + margin for row in rows):
        verdict = Verdict.UNSTABLE
    elif all(row['slope'] < slope - margin for row in rows):
        verdict = Verdict.STABLE
    else:
        verdict = Verdict.SEMISTABLE
    logger.info("Bundle %s is %s relative to %s (λ = %.6g, margin %.2g).", bundle.label,
                verdict.value, pluralize(len(rows), "candidate"), slope, margin)
    return DegreeReport(
        total_degree=degree,
        slope=slope,
        volume=manifold.volume,
        rank=bundle.rank,
        candidates=rows,
        margin=margin,
        verdict=verdict,
    )


def identity_terms(manifold, bundle, reference, relative, slope=0.0, domain=None):
    """
    Evaluate both sides of the integral identity for ``H = K h_rel``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param reference: The metric ``K`` relative to ``H₀`` (:data:`None` means ``K = H₀``).
    :param relative: The relative metric ``h_rel = K⁻¹H``.
    :param slope: The constant ``λ`` (it cancels between both sides).
    :param domain: An :class:`~higgs_flow_lab.geometry.ExhaustionDomain` (optional).
    :returns: A tuple ``(lhs, rhs)`` where ``lhs = ∫tr(Φ(K)s) + ∫⟨Ψ(s)(∂̄_θ s), ∂̄_θ s⟩_K``
              and ``rhs = ∫tr(Φ(H)s)``.
    :raises: :exc:`.BoundaryConditionError` when `domain` has a boundary ring
             on which `relative` isn't the identity.
    """
    relative = np.asarray(relative)
    if domain is not None and domain.boundary_count:
        deviation = np.abs(relative[domain.boundary | domain.exterior] - np.eye(bundle.rank)).max()
        if deviation > BOUNDARY_TOLERANCE:
            raise BoundaryConditionError(compact("""
                Relative metric doesn't match the Dirichlet data
                outside the domain! (deviation {deviation:.3g})
            """, deviation=deviation))
    if reference is None:
        k = identity_field(manifold.shape, bundle.rank)
        h = relative
    else:
        k = np.asarray(reference)
        h = k @ relative
        h = 0.5 * (h + dagger(h))
    s = relative_log(reference, h)
    phi_k = mean_curvature_phi(manifold, bundle, k, slope)
    phi_h = mean_curvature_phi(manifold, bundle, h, slope)
    gradient = conjugate(reference, dbar_theta(manifold, bundle, s))
    energy = psi_bilinear(manifold, conjugate(reference, s), gradient, gradient)
    lhs = float(np.real(integrate(manifold, trace(phi_k @ s)))) + float(integrate(manifold, energy))
    rhs = float(np.real(integrate(manifold, trace(phi_h @ s))))
    return lhs, rhs


def identity_residual(manifold, bundle, reference, relative, slope=0.0, domain=None):
    """
    Compute ``|LHS - RHS|`` of the integral identity (see :func:`identity_terms()`).

    :returns: The absolute residual (a float).
    """
    lhs, rhs = identity_terms(manifold, bundle, reference, relative, slope, domain)
    return abs(lhs - rhs)
