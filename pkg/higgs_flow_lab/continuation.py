# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Perturbed Hermitian-Einstein metrics and the ε-continuation.

For a trace normalized reference metric ``K`` and ``ε > 0`` the perturbed
equation ``Φ(H, θ) + ε log(K⁻¹H) = 0`` has a unique solution ``h_ε``. The
behaviour of ``s_ε = log(K⁻¹h_ε)`` as ``ε → 0`` classifies the bundle:

- When ``sup|s_ε|`` stays bounded the metrics converge to a
  Hermitian-Einstein metric (a final ``ε = 0`` solve confirms this).
- When ``ε sup|s_ε|`` tends to zero while ``sup|s_ε|`` grows, the metrics
  form an approximate Hermitian-Einstein structure (semistability).
- When ``ε sup|s_ε|`` stays away from zero the normalized ``u_ε = s_ε /
  ‖s_ε‖`` splits into eigenvalue clusters and the projector onto the lower
  cluster approximates a destabilizing sub-object.
"""

# Standard library modules.
import logging
import math

# External dependencies.
import numpy as np
from humanfriendly import Timer
from humanfriendly.text import compact, pluralize
from property_manager import PropertyManager, mutable_property, required_property

# Modules included in our package.
from higgs_flow_lab.analysis import (
    StabilityCandidate,
    Verdict,
    analytic_degree,
    candidate_terms,
    conjugate,
    identity_terms,
    stability_verdict,
)
from higgs_flow_lab.bundle import (
    dbar_theta,
    endo_norm,
    form_inner,
    hermitian_eigh,
    identity_field,
    matrix_sqrt,
    mean_curvature_phi,
    relative_log,
    sup_norm,
    trace,
)
from higgs_flow_lab.exceptions import FlowAbortedError, InvalidCandidateError, SolverError
from higgs_flow_lab.flow import CORE_LEVEL, FlowConfig, default_shift, exhaustion_flow_limit, run_flow
from higgs_flow_lab.geometry import integrate, l2_norm

SOLVERS = ('relaxation', 'flow', 'exhaustion-flow')
"""The supported values of the `via` argument of :func:`solve_perturbed_he()` (a tuple of strings)."""

TRACE_CONDITION_TOLERANCE = 1e-6
"""The reference metric must satisfy ``sup|tr Φ(K)| ≤ TRACE_CONDITION_TOLERANCE · (1 + sup|Φ(K)|)`` (a float)."""

DEFAULT_EPSILONS = tuple(2.0 ** -k for k in range(1, 11))
"""The default ε-sequence ``2^{-1} .. 2^{-10}`` of :func:`epsilon_sweep_classify()` (a tuple of floats)."""

C0_SLACK = 1.05
"""The default slack factor on the a priori bound ``sup|s_ε| ≤ sup|Φ(K)| / ε`` (a float)."""

AUDIT_FACTOR = 10
"""Accepted solutions have an identity audit within this multiple of their quadrature tolerance (a number)."""

FINAL_SOLVE_ATTEMPTS = 3
"""The number of relaxation shifts tried by the final Hermitian-Einstein solve of a bounded sweep (an integer)."""

# Public identifiers that require documentation.
__all__ = (
    'AUDIT_FACTOR',
    'C0_SLACK',
    'DEFAULT_EPSILONS',
    'FINAL_SOLVE_ATTEMPTS',
    'SOLVERS',
    'TRACE_CONDITION_TOLERANCE',
    'PerturbedSolution',
    'StabilityReport',
    'SweepThresholds',
    'epsilon_sweep_classify',
    'extract_destabilizer',
    'fit_ladder',
    'logger',
    'solve_perturbed_he',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


class SweepThresholds(PropertyManager):

    """The decision thresholds of :func:`epsilon_sweep_classify()`."""

    @mutable_property
    def stable_factor(self):
        """The Hermitian-Einstein tolerance is this factor times ``1 + |λ|`` (a float, defaults to 1e-6)."""
        return 1e-6

    @mutable_property
    def semistable(self):
        """Bound on ``ε sup|s_ε|`` at the end of the sweep for semistability (a float, defaults to 1e-3)."""
        return 1e-3

    @mutable_property
    def unstable(self):
        """Lower bound on ``ε sup|s_ε|`` over the tail for instability (a float, defaults to 1e-2)."""
        return 1e-2

    @mutable_property
    def cluster_gap(self):
        """Minimal eigenvalue gap relative to the spectral spread (a float, defaults to 0.3)."""
        return 0.3

    @mutable_property
    def tail(self):
        """The number of final sweep entries that make up the tail (an integer, defaults to 4)."""
        return 4

    @mutable_property
    def c0_slack(self):
        """Allowed slack factor on the a priori C⁰ bound (a float, defaults to :data:`C0_SLACK`)."""
        return C0_SLACK

    @mutable_property
    def invariance(self):
        """Largest volume normalized invariance defect of a θ-invariant projector (a float, defaults to 1e-3)."""
        return 1e-3

    @mutable_property
    def match_distance(self):
        """Volume normalized L² distance below which a projector matches a candidate (a float)."""
        return 1e-2

    @mutable_property
    def ladder_drift(self):
        """Relative drift of the ladder constants that triggers a warning (a float, defaults to 0.2)."""
        return 0.2

    def stable_tolerance(self, slope):
        """The Hermitian-Einstein tolerance ``stable_factor · (1 + |λ|)``."""
        return self.stable_factor * (1 + abs(slope))

    def to_dict(self):
        """Convert the thresholds to a dictionary (for the run manifest)."""
        return dict(stable_factor=self.stable_factor, semistable=self.semistable, unstable=self.unstable,
                    cluster_gap=self.cluster_gap, tail=self.tail, c0_slack=self.c0_slack,
                    invariance=self.invariance, match_distance=self.match_distance,
                    ladder_drift=self.ladder_drift)

    def bounded(self, sups):
        """
        Check whether ``sup|s_ε|`` stopped growing over the tail of a sweep.

        :param sups: The values of ``sup|s_ε|`` in sweep order (a list of floats).
        :returns: :data:`True` when the last value is within :attr:`c0_slack`
                  of the first value of the tail.
        """
        if len(sups) < 2:
            return True
        return sups[-1] <= self.c0_slack * sups[-min(len(sups), self.tail)] + 1e-9


class PerturbedSolution(PropertyManager):

    """A solution of the perturbed equation together with its a priori checks."""

    repr_properties = ('epsilon', 'sup_log_h', 'residual', 'converged')

    @required_property
    def epsilon(self):
        """The perturbation parameter (a float)."""

    @required_property(repr=False)
    def metric(self):
        """The metric ``h_ε`` relative to ``H₀`` (a numpy array)."""

    @required_property
    def converged(self):
        """:data:`False` when the solver didn't reach its tolerance (the solution is tagged INCONCLUSIVE)."""

    @required_property
    def residual(self):
        """``sup|Φ(h_ε) + ε s_ε|`` (a float)."""

    @required_property
    def he_residual(self):
        """``sup|Φ(h_ε)|`` (a float)."""

    @required_property
    def sup_log_h(self):
        """``sup|s_ε|`` (spectral norm, a float)."""

    @required_property
    def l2_log_h(self):
        """``‖s_ε‖_{L²}`` (a float)."""

    @required_property
    def l2_dbar_s(self):
        """``‖∂̄_θ s_ε‖_{L²}`` (a float)."""

    @required_property
    def trace_min(self):
        """The smallest value of ``tr s_ε`` (a float)."""

    @required_property
    def trace_max(self):
        """The largest value of ``tr s_ε`` (a float)."""

    @required_property
    def c0_bound(self):
        """The a priori bound ``sup|Φ(K)| / ε`` on ``sup|s_ε|`` (a float)."""

    @mutable_property
    def c0_slack(self):
        """The slack factor of :attr:`c0_ok` (a float, defaults to :data:`C0_SLACK`)."""
        return C0_SLACK

    @required_property
    def identity_audit(self):
        """``|LHS - ∫tr(-ε s_ε²)|`` of the integral identity for ``H = h_ε`` (a float)."""

    @required_property
    def audit_tolerance(self):
        """
        The quadrature tolerance of :attr:`identity_audit` (a float).

        This is the squared mesh width times the size of the terms of the
        identity, the discretization error expected from the quadrature.
        """

    @required_property
    def steps(self):
        """The number of solver steps (an integer)."""

    @mutable_property
    def error(self):
        """The message of the solver error that ended the solve (a string or :data:`None`)."""

    @property
    def audit_ok(self):
        """:data:`True` when :attr:`identity_audit` is within :data:`AUDIT_FACTOR` times :attr:`audit_tolerance`."""
        return self.identity_audit <= AUDIT_FACTOR * self.audit_tolerance + 1e-12

    @property
    def accepted(self):
        """:data:`True` when the solve converged and passed the identity audit."""
        return bool(self.converged and self.audit_ok)

    @property
    def tag(self):
        """``'INCONCLUSIVE'`` for solutions that weren't :attr:`accepted`, :data:`None` otherwise."""
        return None if self.accepted else Verdict.INCONCLUSIVE.value

    @property
    def c0_ok(self):
        """:data:`True` when :attr:`sup_log_h` respects :attr:`c0_bound` up to :attr:`c0_slack`."""
        return self.sup_log_h <= self.c0_slack * self.c0_bound + 1e-12

    def to_dict(self):
        """Convert the solution to a dictionary (without the metric, for JSON serialization)."""
        return dict(epsilon=self.epsilon, converged=self.converged, tag=self.tag, residual=self.residual,
                    he_residual=self.he_residual, sup_log_h=self.sup_log_h, l2_log_h=self.l2_log_h,
                    l2_dbar_s=self.l2_dbar_s, trace_min=self.trace_min, trace_max=self.trace_max,
                    c0_bound=self.c0_bound, c0_slack=self.c0_slack, c0_ok=self.c0_ok,
                    identity_audit=self.identity_audit, audit_tolerance=self.audit_tolerance,
                    audit_ok=self.audit_ok, steps=self.steps, error=self.error)


class StabilityReport(PropertyManager):

    """The outcome of :func:`epsilon_sweep_classify()`."""

    repr_properties = ('verdict', 'reason')

    @required_property
    def verdict(self):
        """A :class:`~higgs_flow_lab.analysis.Verdict`."""

    @required_property
    def reason(self):
        """A short explanation of the verdict (a string)."""

    @required_property(repr=False)
    def table(self):
        """
        One dictionary per ε (a list of dictionaries).

        The keys are ``eps``, ``sup_log_h``, ``eps_times_sup``, ``he_residual``
        and ``l2_log_h``.
        """

    @required_property(repr=False)
    def solutions(self):
        """The :class:`PerturbedSolution` objects (a list)."""

    @mutable_property(repr=False)
    def destabilizer(self):
        """A dictionary describing the extracted projector (only for UNSTABLE verdicts, else :data:`None`)."""

    @mutable_property(repr=False)
    def final_metric(self):
        """The Hermitian-Einstein metric of a bounded sweep (a numpy array or :data:`None`)."""

    @mutable_property
    def final_residual(self):
        """``sup|Φ|`` of :attr:`final_metric` (a float or :data:`None`)."""

    @mutable_property(repr=False)
    def degree_report(self):
        """The :class:`~higgs_flow_lab.analysis.DegreeReport` of the candidates (or :data:`None`)."""

    @required_property(repr=False)
    def ladder(self):
        """The fitted ladder constants (a dictionary, see :func:`fit_ladder()`)."""

    @required_property
    def slope(self):
        """The constant ``λ`` (a float)."""

    def to_dict(self):
        """Convert the report to a dictionary (suitable for JSON serialization)."""
        destabilizer = None
        if self.destabilizer:
            destabilizer = dict((k, v) for k, v in self.destabilizer.items() if k != 'projection')
        return dict(
            verdict=self.verdict.value,
            reason=self.reason,
            slope=self.slope,
            table=[dict(row) for row in self.table],
            solutions=[s.to_dict() for s in self.solutions],
            destabilizer=destabilizer,
            final_residual=self.final_residual,
            degrees=self.degree_report.to_dict() if self.degree_report else None,
            ladder=self.ladder,
        )


def check_trace_condition(manifold, bundle, reference, slope):
    """
    Check that ``tr Φ(K)`` vanishes.

    :returns: ``Φ(K)`` (the field is needed for the C⁰ bound).
    :raises: :exc:`~exceptions.ValueError` when the trace condition fails.
    """
    k = identity_field(manifold.shape, bundle.rank) if reference is None else reference
    phi = mean_curvature_phi(manifold, bundle, k, slope)
    defect = float(np.abs(trace(phi)).max())
    if defect > TRACE_CONDITION_TOLERANCE * (1 + sup_norm(phi)):
        raise ValueError(compact("""
            Invalid reference metric, the trace condition tr Φ(K) = 0
            doesn't hold! (sup|tr Φ(K)| = {defect:.3g}, use
            conformal_trace_normalize() first)
        """, defect=defect))
    return phi


def spectral_sup(reference, s):
    """The largest absolute eigenvalue of a ``K``-self-adjoint field (a float)."""
    values, _ = hermitian_eigh(conjugate(reference, s), 'endomorphism')
    return float(np.abs(values).max())


def default_levels(manifold, count=4):
    """Exhaustion levels between the core and the truncation (a list of floats)."""
    highest = float(manifold.phi.max())
    if manifold.is_closed or highest <= CORE_LEVEL:
        return [highest]
    step = (highest - CORE_LEVEL) / count
    return [CORE_LEVEL + step * (i + 1) for i in range(count)]


def solve_perturbed_he(manifold, bundle, reference, epsilon, via='relaxation', config=None, initial=None,
                       slope=None, levels=None, concurrency=1, c0_slack=C0_SLACK):
    """
    Solve the perturbed equation ``Φ(H, θ) + ε log(K⁻¹H) = 0``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param reference: The trace normalized metric ``K`` relative to ``H₀``
                      (:data:`None` means ``K = H₀``).
    :param epsilon: The perturbation parameter ``ε > 0`` (a float).
    :param via: One of the strings in :data:`SOLVERS`.
    :param config: A :class:`~higgs_flow_lab.flow.FlowConfig` object (optional).
    :param initial: The initial metric (defaults to ``K``).
    :param slope: The constant ``λ`` (computed by
                  :func:`~higgs_flow_lab.analysis.analytic_degree()` when not given).
    :param levels: Exhaustion levels for ``via='exhaustion-flow'``.
    :param concurrency: The number of levels to solve in parallel (an integer).
    :param c0_slack: The slack factor of :attr:`PerturbedSolution.c0_ok` (a float).
    :returns: A :class:`PerturbedSolution` object. Solver failures and failed
              identity audits don't raise an exception, they produce a
              solution tagged INCONCLUSIVE.
    :raises: :exc:`~exceptions.ValueError` when ``ε ≤ 0``, `via` is unknown
             or ``K`` violates the trace condition.
    """
    if not epsilon > 0:
        raise ValueError("Invalid perturbation parameter, expected ε > 0! (%r)" % epsilon)
    if via not in SOLVERS:
        raise ValueError("Invalid solver! (%r not in %s)" % (via, SOLVERS))
    if slope is None:
        slope = analytic_degree(manifold, bundle, reference)[1]
    phi_k = check_trace_condition(manifold, bundle, reference, slope)
    if config is None:
        config = FlowConfig(stepper='explicit' if via == 'flow' else 'preconditioned')
    k = identity_field(manifold.shape, bundle.rank) if reference is None else np.asarray(reference)
    start = k if initial is None else np.asarray(initial)
    timer = Timer()
    error = None
    try:
        if via == 'exhaustion-flow':
            h, limit = exhaustion_flow_limit(manifold, bundle, epsilon, slope,
                                             levels or default_levels(manifold), config,
                                             concurrency=concurrency, reference=reference)
            converged, steps = limit.core_residual < 2 * config.effective_tolerance(slope), limit.results[-1].steps
        else:
            h, result = run_flow(manifold, bundle, start, epsilon, slope, config, reference)
            converged, steps = result.converged, result.steps
    except SolverError as e:
        logger.warning("Perturbed solve at ε = %s failed! (%s)", epsilon, e)
        h, converged, steps, error = start, False, 0, str(e)
    s = relative_log(reference, h)
    phi = mean_curvature_phi(manifold, bundle, h, slope)
    unitary = conjugate(reference, dbar_theta(manifold, bundle, s))
    lhs, _ = identity_terms(manifold, bundle, reference, np.linalg.solve(k, h), slope)
    flux = float(np.real(integrate(manifold, trace(phi_k @ s))))
    epsilon_term = epsilon * float(np.real(integrate(manifold, trace(s @ s))))
    audit = abs(lhs + epsilon_term)
    scale = abs(flux) + abs(lhs - flux) + abs(epsilon_term)
    trace_s = np.real(trace(s))
    solution = PerturbedSolution(
        epsilon=float(epsilon),
        metric=h,
        converged=bool(converged),
        residual=sup_norm(phi + epsilon * s),
        he_residual=sup_norm(phi),
        sup_log_h=spectral_sup(reference, s),
        l2_log_h=l2_norm(manifold, endo_norm(conjugate(reference, s)) ** 2),
        l2_dbar_s=l2_norm(manifold, form_inner(manifold, unitary, unitary)),
        trace_min=float(trace_s.min()),
        trace_max=float(trace_s.max()),
        c0_bound=sup_norm(phi_k) / epsilon,
        c0_slack=c0_slack,
        identity_audit=audit,
        audit_tolerance=manifold.mesh_width ** 2 * scale,
        steps=steps,
        error=error,
    )
    if not solution.c0_ok:
        logger.warning("Perturbed solution at ε = %s exceeds the C⁰ bound! (%.4g > %.4g)",
                       epsilon, solution.sup_log_h, solution.c0_bound)
    if not solution.audit_ok:
        logger.warning("Perturbed solution at ε = %s fails the identity audit! (%.3g > %i × %.3g)",
                       epsilon, audit, AUDIT_FACTOR, solution.audit_tolerance)
    logger.debug("Solved perturbed equation at ε = %s in %s (%s, sup|s| = %.4g).",
                 epsilon, timer, pluralize(steps, "step"), solution.sup_log_h)
    return solution


def fit_ladder(table, drift=0.2):
    """
    Fit ``sup|s_ε| ≈ a ‖s_ε‖_{L²} + b`` by least squares.

    :param table: Sweep rows (dictionaries with ``sup_log_h`` and ``l2_log_h``).
    :param drift: Relative drift of the gain ``a`` between the two halves of the
                  sweep that counts as unstable (a float).
    :returns: A dictionary with the keys ``gain``, ``offset``, ``gain_first``,
              ``gain_second`` and ``stable`` (values are :data:`None` when
              there are too few rows).
    """
    def solve(rows):
        if len(rows) < 2:
            return None, None
        design = np.column_stack([[r['l2_log_h'] for r in rows], np.ones(len(rows))])
        coefficients = np.linalg.lstsq(design, np.array([r['sup_log_h'] for r in rows]), rcond=None)[0]
        return float(coefficients[0]), float(coefficients[1])
    gain, offset = solve(table)
    half = len(table) // 2
    first, _ = solve(table[:half])
    second, _ = solve(table[half:])
    stable = None
    if first is not None and second is not None:
        scale = max(abs(first), abs(second))
        stable = scale < 1e-12 or abs(first - second) <= drift * scale
        if not stable:
            logger.warning("Ladder constant drifts across the sweep! (gain %.4g vs %.4g)", first, second)
    return dict(gain=gain, offset=offset, gain_first=first, gain_second=second, stable=stable)


def extract_destabilizer(manifold, bundle, reference, solution, candidates, thresholds):
    """
    Extract a destabilizing projector from the eigenvalue clusters of ``u_ε``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param reference: The metric ``K`` (optional).
    :param solution: The :class:`PerturbedSolution` at the smallest ε.
    :param candidates: A list of :class:`~higgs_flow_lab.analysis.StabilityCandidate` objects.
    :param thresholds: A :class:`SweepThresholds` object.
    :returns: A dictionary describing the projector, or a string explaining
              why no destabilizer could be extracted.
    """
    s = conjugate(reference, relative_log(reference, solution.metric))
    norm = l2_norm(manifold, endo_norm(s) ** 2)
    if norm == 0:
        return "the sweep solution vanishes"
    u = s / norm
    values, vectors = hermitian_eigh(u, 'endomorphism')
    weights = manifold.weights[..., None]
    means = np.sum(weights * values, axis=tuple(range(len(manifold.shape)))) / manifold.volume
    variance = float(np.sum(weights * (values - means) ** 2) / manifold.volume)
    gaps = np.diff(means)
    split = int(np.argmax(gaps))
    spread = float(means[-1] - means[0])
    if spread <= 0 or gaps[split] < thresholds.cluster_gap * spread:
        return "no eigenvalue gap above %s of the spread" % thresholds.cluster_gap
    lower = vectors[..., :split + 1]
    projection = lower @ np.conj(np.swapaxes(lower, -1, -2))
    if reference is not None:
        root, inverse_root = matrix_sqrt(reference)
        projection = inverse_root @ projection @ root
    candidate = StabilityCandidate(projection=projection, label='lower eigen-cluster')
    try:
        terms = candidate_terms(manifold, bundle, candidate, reference)
    except InvalidCandidateError as e:
        return "the extracted projector is invalid (%s)" % e
    defect = terms['invariance_defect'] / manifold.volume
    if defect > thresholds.invariance:
        return "the extracted projector isn't θ-invariant (defect %.3g > %s)" % (defect, thresholds.invariance)
    degree = terms['degree']
    total = analytic_degree(manifold, bundle, reference)[0]
    rank = candidate.rank
    lower_mean = float(means[:split + 1].mean())
    upper_mean = float(means[split + 1:].mean())
    match, distance = None, None
    for other in candidates:
        difference = np.abs(projection - np.asarray(other.projection)) ** 2
        d = math.sqrt(float(integrate(manifold, np.sum(difference, axis=(-2, -1)))) / manifold.volume)
        if distance is None or d < distance:
            match, distance = other.label, d
    return dict(
        projection=projection,
        rank=rank,
        gap=float(gaps[split]),
        spread=spread,
        eigenvalue_means=[float(m) for m in means],
        eigenvalue_variance=variance,
        degree=degree,
        penalty=terms['penalty'],
        invariance_defect=defect,
        slope=degree / (rank * manifold.volume),
        total_slope=total / (bundle.rank * manifold.volume),
        nu=(upper_mean - lower_mean) * rank * (total / bundle.rank - degree / rank),
        matched_candidate=match if distance is not None and distance <= thresholds.match_distance else None,
        nearest_candidate=match,
        candidate_distance=distance,
    )


def epsilon_sweep_classify(manifold, bundle, reference, epsilons, candidates, thresholds=None, via='relaxation',
                           config=None, slope=None):
    """
    Run the ε-continuation and classify the bundle.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param reference: The trace normalized metric ``K`` (optional).
    :param epsilons: A decreasing sequence of positive floats.
    :param candidates: A list of :class:`~higgs_flow_lab.analysis.StabilityCandidate`
                       objects (may be empty for line bundles).
    :param thresholds: A :class:`SweepThresholds` object (optional).
    :param via: The solver of each ε (see :func:`solve_perturbed_he()`).
    :param config: A :class:`~higgs_flow_lab.flow.FlowConfig` object (optional).
    :param slope: The constant ``λ`` (optional).
    :returns: A :class:`StabilityReport` object.
    :raises: :exc:`~exceptions.ValueError` when `epsilons` isn't a
             decreasing sequence of positive numbers.
    """
    epsilons = [float(e) for e in epsilons]
    if not epsilons or any(e <= 0 for e in epsilons) or any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("Invalid ε-sequence, expected decreasing positive numbers! (%r)" % epsilons)
    thresholds = thresholds or SweepThresholds()
    if slope is None:
        slope = analytic_degree(manifold, bundle, reference)[1]
    timer = Timer()
    solutions, table = [], []
    warm = None
    for epsilon in epsilons:
        solution = solve_perturbed_he(manifold, bundle, reference, epsilon, via=via, config=config,
                                      initial=warm, slope=slope, c0_slack=thresholds.c0_slack)
        solutions.append(solution)
        table.append(dict(
            eps=epsilon,
            sup_log_h=solution.sup_log_h,
            eps_times_sup=epsilon * solution.sup_log_h,
            he_residual=solution.he_residual,
            l2_log_h=solution.l2_log_h,
        ))
        if solution.converged:
            warm = solution.metric
    ladder = fit_ladder(table, thresholds.ladder_drift)
    outcome = dict(destabilizer=None, final_metric=None, final_residual=None, degree_report=None)
    verdict, reason = classify(manifold, bundle, reference, solutions, table, candidates, thresholds,
                               slope, outcome)
    logger.info("Classified %s as %s in %s (%s).", bundle.label, verdict.value, timer, reason)
    return StabilityReport(verdict=verdict, reason=reason, table=table, solutions=solutions,
                           ladder=ladder, slope=slope, **outcome)


def final_solve(manifold, bundle, reference, start, slope, tolerance, epsilon):
    """
    Solve ``Φ(H, θ) = 0`` starting from the last metric of a bounded sweep.

    :param start: The metric at the smallest ε.
    :param tolerance: The Hermitian-Einstein tolerance (a float).
    :param epsilon: The smallest ε of the sweep (the shift when the bundle
                    has no Higgs field).
    :returns: A tuple ``(h, result)``, ``result`` is :data:`None` when every
              attempt failed.

    The relaxation shift starts at :func:`~higgs_flow_lab.flow.default_shift()`
    and grows by a factor of four per attempt, each attempt continues from
    the metric of the previous one.
    """
    shift = default_shift(manifold, bundle) or epsilon
    h = start
    for _ in range(FINAL_SOLVE_ATTEMPTS):
        config = FlowConfig(stepper='preconditioned', relaxation_shift=shift, stop_tolerance=tolerance)
        try:
            h, result = run_flow(manifold, bundle, h, 0.0, slope, config, reference)
        except FlowAbortedError as e:
            logger.warning("Final Hermitian-Einstein solve with shift %.3g failed! (%s)", shift, e)
        except SolverError as e:
            logger.warning("Final Hermitian-Einstein solve failed! (%s)", e)
            break
        else:
            if result.converged:
                return h, result
            h = result.state.h
        shift *= 4
    return h, None


def classify(manifold, bundle, reference, solutions, table, candidates, thresholds, slope, outcome):
    """Apply the decision rules of :func:`epsilon_sweep_classify()` (fills in `outcome`)."""
    failed = [s.epsilon for s in solutions if not s.converged]
    if failed:
        return Verdict.INCONCLUSIVE, "perturbed solves failed at ε = %s" % ", ".join(map(str, failed))
    audited = [s.epsilon for s in solutions if not s.audit_ok]
    if audited:
        return Verdict.INCONCLUSIVE, "identity audit failed at ε = %s" % ", ".join(map(str, audited))
    tail = table[-thresholds.tail:]
    products = [row['eps_times_sup'] for row in tail]
    sups = [row['sup_log_h'] for row in table]
    rejected = None
    if len(tail) >= thresholds.tail and min(products) >= thresholds.unstable:
        found = extract_destabilizer(manifold, bundle, reference, solutions[-1], candidates, thresholds)
        if isinstance(found, str):
            rejected = "ε sup|s| stays positive but %s" % found
        elif not found['slope'] > found['total_slope']:
            rejected = "the extracted projector doesn't destabilize"
        else:
            outcome['destabilizer'] = found
            return Verdict.UNSTABLE, "ε sup|s| ≥ %s over the tail, destabilizing %s" % (
                thresholds.unstable, found['matched_candidate'] or 'projector')
        logger.info("Instability not certified: %s.", rejected)
    bounded = thresholds.bounded(sups)
    if bounded:
        h, result = final_solve(manifold, bundle, reference, solutions[-1].metric, slope,
                                thresholds.stable_tolerance(slope), solutions[-1].epsilon)
        if result is not None:
            outcome['final_metric'] = h
            outcome['final_residual'] = result.sup_phi
            if not candidates:
                return Verdict.STABLE, "bounded sweep with a Hermitian-Einstein limit (no candidates)"
            report = stability_verdict(manifold, bundle, reference, candidates)
            outcome['degree_report'] = report
            if report.verdict == Verdict.UNSTABLE:
                return Verdict.INCONCLUSIVE, "Hermitian-Einstein limit contradicts the candidate slopes"
            return report.verdict, "bounded sweep with a Hermitian-Einstein limit"
    growing = len(sups) >= 2 and sups[-1] > sups[0]
    if table[-1]['eps_times_sup'] < thresholds.semistable and (growing or bounded):
        return Verdict.SEMISTABLE, "ε sup|s| = %.3g below %s (approximate Hermitian-Einstein)" % (
            table[-1]['eps_times_sup'], thresholds.semistable)
    return Verdict.INCONCLUSIVE, rejected or "no decision rule applies"
