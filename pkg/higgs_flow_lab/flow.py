# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
The perturbed Hitchin-Simpson heat flow.

The flow ``H⁻¹∂H/∂t = -2 Φ_ε`` with ``Φ_ε = Φ(H, θ) + ε log(K⁻¹H)`` is
integrated with the pointwise exponential update

``h ← h^{1/2} exp(-2 dt h^{1/2} Φ_ε h^{-1/2}) h^{1/2}``

which equals ``h exp(-2 dt Φ_ε)`` and stays on the cone of positive
definite Hermitian matrices. On exhaustion domains every node outside the
interior carries the Dirichlet data ``h = Id``.

For stationary problems :func:`relaxation_step()` offers a preconditioned
alternative: it solves the scalar operator ``Δ̃ - 2(ε + μ)`` on each
Hermitian matrix entry and backtracks on the L² norm of ``Φ_ε``. In rank one
(with ``μ = 0``) that is Newton's method for the exact discrete equation.
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
from higgs_flow_lab.analysis import donaldson_distance
from higgs_flow_lab.bundle import (
    dagger,
    endo_exp,
    endo_norm,
    hermitian_eigh,
    identity_field,
    matrix_sqrt,
    perturbed_mean_curvature,
    relative_log,
    trace,
)
from higgs_flow_lab.exceptions import (
    BoundaryConditionError,
    FlowAbortedError,
    NonFiniteCurvatureError,
    NotHermitianError,
    NotPositiveDefiniteError,
    SolverError,
)
from higgs_flow_lab.geometry import (
    complex_derivatives,
    exhaustion_domain,
    integrate,
    l2_norm,
    laplacian_complex,
)
from higgs_flow_lab.parallel import map_concurrent
from higgs_flow_lab.poisson import solve_helmholtz_columns

STEP_POLICIES = ('cfl', 'fixed')
"""The supported time step policies (a tuple of strings)."""

STEPPERS = ('explicit', 'preconditioned')
"""The supported steppers (a tuple of strings)."""

MONOTONICITY_SLACK = 1e-8
"""Increases of ``sup|Φ_ε|`` up to this amount are tolerated by the monotonicity monitor (a float)."""

CORE_LEVEL = math.log(2)
"""The exhaustion level of the compact core used by :func:`exhaustion_flow_limit()` (a float)."""

MONITOR_FIELDS = ('t', 'sup_phi', 'trace_phi_integral', 'min_eig_h', 'sup_log_h',
                  'sup_sigma', 'trace_s_min', 'trace_s_max', 'sup_connection', 'trace_residual', 'dt')
"""The columns of the monitor time series (a tuple of strings)."""

# Public identifiers that require documentation.
__all__ = (
    'CORE_LEVEL',
    'MONITOR_FIELDS',
    'MONOTONICITY_SLACK',
    'STEPPERS',
    'STEP_POLICIES',
    'ExhaustionLimit',
    'FlowConfig',
    'FlowResult',
    'FlowState',
    'cfl_time_step',
    'contraction_trace',
    'default_shift',
    'exhaustion_flow_limit',
    'flow_step',
    'initial_state',
    'logger',
    'relaxation_step',
    'run_flow',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


class FlowConfig(PropertyManager):

    """Time stepping and stopping parameters of :func:`run_flow()`."""

    repr_properties = ('stepper', 'step_policy', 'stop_tolerance', 'max_time')

    @mutable_property
    def step_policy(self):
        """Either ``'cfl'`` (scale with the grid) or ``'fixed'`` (use :attr:`time_step`)."""
        return 'cfl'

    @mutable_property
    def cfl(self):
        """The CFL factor used by the ``'cfl'`` policy (a float, defaults to 0.2)."""
        return 0.2

    @mutable_property
    def time_step(self):
        """The time step of the ``'fixed'`` policy (a float or :data:`None`)."""

    @mutable_property
    def stop_tolerance(self):
        """Stop when ``sup|Φ_ε|`` drops below this value (:data:`None` means ``1e-8 (1 + |λ|)``)."""

    @mutable_property
    def max_time(self):
        """The largest flow time (a float, defaults to 50)."""
        return 50.0

    @mutable_property
    def max_steps(self):
        """The largest number of accepted steps (an integer, defaults to 200000)."""
        return 200000

    @mutable_property
    def min_time_step(self):
        """Abort when rejections push the time step below this value (a float)."""
        return 1e-12

    @mutable_property
    def boundary(self):
        """An :class:`~higgs_flow_lab.geometry.ExhaustionDomain` for Dirichlet runs (:data:`None` for closed runs)."""

    @mutable_property
    def stepper(self):
        """Either ``'explicit'`` (the flow) or ``'preconditioned'`` (see :func:`relaxation_step()`)."""
        return 'explicit'

    @mutable_property
    def relaxation_shift(self):
        """The shift ``μ`` of the preconditioned stepper (:data:`None` means :func:`default_shift()`)."""

    def validate(self):
        """
        Check the configuration.

        :raises: :exc:`~exceptions.ValueError` when a value is out of range.
        """
        if self.step_policy not in STEP_POLICIES:
            raise ValueError("Invalid step policy! (%r not in %s)" % (self.step_policy, STEP_POLICIES))
        if self.stepper not in STEPPERS:
            raise ValueError("Invalid stepper! (%r not in %s)" % (self.stepper, STEPPERS))
        if self.step_policy == 'fixed' and not (self.time_step and self.time_step > 0):
            raise ValueError("Invalid time step for the fixed policy! (%r)" % self.time_step)
        for name in ('cfl', 'max_time', 'min_time_step'):
            if not getattr(self, name) > 0:
                raise ValueError("Invalid %s, expected a positive number! (%r)" % (name, getattr(self, name)))
        if self.stop_tolerance is not None and not self.stop_tolerance > 0:
            raise ValueError("Invalid stop tolerance, expected a positive number! (%r)" % self.stop_tolerance)

    def replace(self, **changes):
        """Create a copy of the configuration with some values changed."""
        values = dict((name, getattr(self, name)) for name in (
            'step_policy', 'cfl', 'time_step', 'stop_tolerance', 'max_time', 'max_steps',
            'min_time_step', 'boundary', 'stepper', 'relaxation_shift',
        ))
        values.update(changes)
        return FlowConfig(**values)

    def effective_tolerance(self, slope):
        """The stationarity tolerance for slope ``λ`` (a float)."""
        return self.stop_tolerance if self.stop_tolerance is not None else 1e-8 * (1 + abs(slope))


class FlowState(PropertyManager):

    """A point on a flow line together with the quantities needed for the next step."""

    repr_properties = ('t', 'steps', 'dt', 'sup_phi')

    @required_property
    def t(self):
        """The flow time (a float; the iteration count for the preconditioned stepper)."""

    @required_property(repr=False)
    def h(self):
        """The metric relative to ``H₀`` (a numpy array)."""

    @required_property(repr=False)
    def phi(self):
        """The field ``Φ_ε`` at :attr:`h`."""

    @required_property
    def dt(self):
        """The time step (or step length) to try next (a float)."""

    @required_property
    def steps(self):
        """The number of accepted steps (an integer)."""

    @required_property
    def epsilon(self):
        """The perturbation parameter ``ε`` (a float)."""

    @required_property
    def slope(self):
        """The constant ``λ`` (a float)."""

    @required_property
    def sup_phi(self):
        """The sup norm of :attr:`phi` over the nodes where the equation is solved (a float)."""

    @required_property(repr=False)
    def monitors(self):
        """The monitor time series (a list of dictionaries with the keys in :data:`MONITOR_FIELDS`)."""


class FlowResult(PropertyManager):

    """The outcome of :func:`run_flow()`."""

    repr_properties = ('converged', 'steps', 'time', 'sup_phi')

    @required_property(repr=False)
    def state(self):
        """The final :class:`FlowState`."""

    @required_property
    def converged(self):
        """:data:`True` when ``sup|Φ_ε|`` dropped below the stop tolerance."""

    @required_property
    def tolerance(self):
        """The stop tolerance that was used (a float)."""

    @required_property
    def monotone(self):
        """:data:`True` when ``sup|Φ_ε|`` never increased by more than :data:`MONOTONICITY_SLACK`."""

    @mutable_property
    def c0_bound(self):
        """The a priori bound ``sup|Φ(H₀)| / ε`` on ``sup|log h|`` (a float or :data:`None` when ``ε = 0``)."""

    @property
    def steps(self):
        """The number of accepted steps (an integer)."""
        return self.state.steps

    @property
    def time(self):
        """The final flow time (a float)."""
        return self.state.t

    @property
    def sup_phi(self):
        """The final ``sup|Φ_ε|`` (a float)."""
        return self.state.sup_phi

    @property
    def history(self):
        """The monitor time series (a list of dictionaries)."""
        return self.state.monitors


class ExhaustionLimit(PropertyManager):

    """The per-level stationary metrics and Cauchy diagnostics of :func:`exhaustion_flow_limit()`."""

    repr_properties = ('levels', 'monotone', 'core_residual')

    @required_property
    def levels(self):
        """The exhaustion levels (a list of floats)."""

    @required_property(repr=False)
    def metrics(self):
        """The stationary metric of each level (a list of numpy arrays)."""

    @required_property(repr=False)
    def results(self):
        """The :class:`FlowResult` of each level (a list)."""

    @required_property(repr=False)
    def cauchy_table(self):
        """The matrix of ``sup_core σ(h_i, h_j)`` (a list of lists of floats)."""

    @required_property
    def monotone(self):
        """:data:`True` when the distances between successive levels decrease."""

    @required_property
    def core_residual(self):
        """``sup|Φ_ε|`` of the finest level metric on the core (a float)."""

    @property
    def successive(self):
        """The distances between successive levels (a list of floats)."""
        return [self.cauchy_table[i][i + 1] for i in range(len(self.levels) - 1)]

    def to_dict(self):
        """Convert the diagnostics to a dictionary (suitable for JSON serialization)."""
        return dict(
            levels=list(self.levels),
            cauchy_table=[list(row) for row in self.cauchy_table],
            successive=self.successive,
            monotone=self.monotone,
            core_residual=self.core_residual,
            steps=[r.steps for r in self.results],
        )


def cfl_time_step(manifold, cfl):
    """
    Compute the CFL scaled time step ``cfl · min(Δx² / (2n g^{iī}))``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param cfl: The CFL factor (a float).
    :returns: The time step (a float).
    """
    ratios = manifold.spacing ** 2 / (2 * manifold.dimension * manifold.inverse_metric)
    return float(cfl * ratios.min())


def default_shift(manifold, bundle):
    """
    Choose the shift ``μ`` of :func:`relaxation_step()`.

    :returns: Half the supremum of ``Σ_i g^{iī} |θ_i|²`` (a float, zero without Higgs field).
    """
    if not bundle.has_higgs_field:
        return 0.0
    theta = np.asarray(bundle.higgs_field)
    density = np.sum(manifold.inverse_metric * np.sum(np.abs(theta) ** 2, axis=(-2, -1)), axis=0)
    return 0.5 * float(density.max())


def solve_mask(manifold, domain):
    """The nodes where the equation is solved (a boolean numpy array)."""
    return np.ones(manifold.shape, dtype=bool) if domain is None else domain.interior


def evaluate(manifold, bundle, h, epsilon, slope, reference, domain):
    """Compute ``Φ_ε`` and its sup norm over the solved nodes."""
    phi = perturbed_mean_curvature(manifold, bundle, h, slope, epsilon, reference)
    if not np.all(np.isfinite(phi)):
        raise NonFiniteCurvatureError("The curvature of the metric isn't finite!")
    return phi, float(endo_norm(phi)[solve_mask(manifold, domain)].max())


def measure(manifold, bundle, state, domain, reference, trace_residual=None):
    """Compute one row of the monitor time series."""
    mask = solve_mask(manifold, domain)
    values, _ = hermitian_eigh(state.h, 'metric')
    s = relative_log(reference, state.h)
    trace_s = np.real(trace(s))
    _, sigma = donaldson_distance(state.h, identity_field(manifold.shape, bundle.rank)
                                  if reference is None else reference)
    derivatives, _ = complex_derivatives(manifold, state.h)
    connection = np.linalg.solve(state.h, derivatives)
    connection_square = np.sum(manifold.inverse_metric * np.sum(np.abs(connection) ** 2, axis=(-2, -1)), axis=0)
    return dict(
        t=state.t,
        sup_phi=state.sup_phi,
        trace_phi_integral=float(np.real(integrate(manifold, np.where(mask, trace(state.phi), 0)))),
        min_eig_h=float(values[..., 0].min()),
        sup_log_h=float(np.abs(np.log(values)).max()),
        sup_sigma=sigma,
        trace_s_min=float(trace_s.min()),
        trace_s_max=float(trace_s.max()),
        sup_connection=float(np.sqrt(connection_square.max())),
        trace_residual=trace_residual,
        dt=state.dt,
    )


def check_dirichlet(manifold, h, domain, rank):
    """Raise :exc:`.BoundaryConditionError` unless ``h = Id`` outside the interior of `domain`."""
    if domain is not None and not domain.is_closed:
        outside = ~domain.interior
        deviation = float(np.abs(h[outside] - np.eye(rank)).max())
        if deviation > 1e-10:
            raise BoundaryConditionError(compact("""
                Initial metric doesn't match the Dirichlet data h = Id
                outside the domain! (deviation {deviation:.3g})
            """, deviation=deviation))


def initial_state(manifold, bundle, h0, epsilon, slope, config, reference=None):
    """
    Create the :class:`FlowState` of a flow line starting at `h0`.

    :raises: :exc:`.BoundaryConditionError` when `h0` violates the Dirichlet data.
    """
    config.validate()
    domain = config.boundary
    h0 = np.array(h0, dtype=complex)
    check_dirichlet(manifold, h0, domain, bundle.rank)
    phi, sup_phi = evaluate(manifold, bundle, h0, epsilon, slope, reference, domain)
    if config.stepper == 'preconditioned':
        dt = 1.0
    elif config.step_policy == 'fixed':
        dt = float(config.time_step)
    else:
        dt = cfl_time_step(manifold, config.cfl)
    state = FlowState(t=0.0, h=h0, phi=phi, dt=dt, steps=0, epsilon=float(epsilon),
                      slope=float(slope), sup_phi=sup_phi, monitors=[])
    state.monitors.append(measure(manifold, bundle, state, domain, reference))
    return state


def apply_dirichlet(h, domain, rank):
    """Reset every node outside the interior to the identity."""
    if domain is not None and not domain.is_closed:
        h[~domain.interior] = np.eye(rank)
    return h


def exponential_update(h, direction, step):
    """Compute ``h^{1/2} exp(step · h^{1/2} X h^{-1/2}) h^{1/2}`` (symmetrized)."""
    root, inverse_root = matrix_sqrt(h)
    exponent = root @ direction @ inverse_root
    updated = root @ endo_exp(step * 0.5 * (exponent + dagger(exponent))) @ root
    return 0.5 * (updated + dagger(updated))


def abort(state, message, dt):
    """Raise :exc:`.FlowAbortedError` with diagnostics of `state`."""
    raise FlowAbortedError(message, diagnostics=dict(t=state.t, steps=state.steps, dt=dt, sup_phi=state.sup_phi))


def flow_step(state, manifold, bundle, config, reference=None):
    """
    Take one accepted step of the explicit flow.

    :param state: The current :class:`FlowState`.
    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param config: A :class:`FlowConfig` object.
    :param reference: The metric ``K`` of the ``ε log(K⁻¹H)`` term (optional).
    :returns: The next :class:`FlowState`.
    :raises: :exc:`.FlowAbortedError` when the step size drops below
             :attr:`FlowConfig.min_time_step`.

    Steps that produce non-finite or non-positive metrics are rejected and
    retried with half the step size.
    """
    domain = config.boundary
    dt = state.dt
    while True:
        if dt < config.min_time_step:
            abort(state, "Time step dropped below %s at t = %s!" % (config.min_time_step, state.t), dt)
        try:
            h = apply_dirichlet(exponential_update(state.h, state.phi, -2 * dt), domain, bundle.rank)
            phi, sup_phi = evaluate(manifold, bundle, h, state.epsilon, state.slope, reference, domain)
            break
        except (NonFiniteCurvatureError, NotPositiveDefiniteError, NotHermitianError) as e:
            logger.debug("Rejected step of size %s at t = %s (%s).", dt, state.t, e)
            dt /= 2
    trace_residual = None
    if domain is None or domain.is_closed:
        eps, t = state.epsilon, state.t
        before = math.exp(2 * eps * t) * np.real(trace(state.phi))
        after = math.exp(2 * eps * (t + dt)) * np.real(trace(phi))
        trace_residual = float(np.abs((after - before) / dt - laplacian_complex(manifold, before)).max())
    following = FlowState(t=state.t + dt, h=h, phi=phi, dt=dt, steps=state.steps + 1,
                          epsilon=state.epsilon, slope=state.slope, sup_phi=sup_phi,
                          monitors=state.monitors)
    following.monitors.append(measure(manifold, bundle, following, domain, reference, trace_residual))
    return following


def relaxation_step(state, manifold, bundle, config, reference=None):
    """
    Take one preconditioned relaxation step towards ``Φ_ε = 0``.

    :param state: The current :class:`FlowState`.
    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param config: A :class:`FlowConfig` object.
    :param reference: The metric ``K`` of the ``ε log(K⁻¹H)`` term (optional).
    :returns: The next :class:`FlowState` (its time advances by one per step).
    :raises: :exc:`~exceptions.ValueError` when ``ε + μ = 0`` on a whole
             model, :exc:`.FlowAbortedError` when backtracking fails.

    The direction ``Y`` solves ``(Δ̃ - 2(ε + μ)) Y = 2 h^{1/2} Φ_ε h^{-1/2}``
    entry by entry (with ``Y = 0`` outside the interior) and the update is
    ``h ← h^{1/2} exp(αY) h^{1/2}`` with ``α`` halved until the L² norm of
    ``Φ_ε`` decreases.
    """
    domain = config.boundary
    shift = config.relaxation_shift
    if shift is None:
        shift = default_shift(manifold, bundle)
    total_shift = 2 * (state.epsilon + shift)
    if total_shift <= 0 and (domain is None or domain.is_closed):
        raise ValueError("Invalid relaxation shift, ε + μ must be positive on a whole model! (μ = %r)" % shift)
    root, inverse_root = matrix_sqrt(state.h)
    target = root @ state.phi @ inverse_root
    target = 0.5 * (target + dagger(target))
    rank = bundle.rank
    columns = np.concatenate([target.real, target.imag], axis=-1).reshape(manifold.shape + (2 * rank * rank,))
    solution, _ = solve_helmholtz_columns(manifold, 2 * columns, total_shift, domain)
    solution = solution.reshape(manifold.shape + (rank, 2 * rank))
    direction = solution[..., :rank] + 1j * solution[..., rank:]
    direction = 0.5 * (direction + dagger(direction))
    mask = solve_mask(manifold, domain)
    before = l2_norm(manifold, np.where(mask, endo_norm(state.phi) ** 2, 0))
    tolerance = config.effective_tolerance(state.slope)
    step = min(1.0, 2 * state.dt)
    while True:
        if step < config.min_time_step:
            abort(state, "Backtracking failed at iteration %i (L² norm %.3g)!" % (state.steps, before), step)
        try:
            updated = root @ endo_exp(step * direction) @ root
            h = apply_dirichlet(0.5 * (updated + dagger(updated)), domain, rank)
            phi, sup_phi = evaluate(manifold, bundle, h, state.epsilon, state.slope, reference, domain)
            after = l2_norm(manifold, np.where(mask, endo_norm(phi) ** 2, 0))
            if after < before or sup_phi < tolerance:
                break
        except (NonFiniteCurvatureError, NotPositiveDefiniteError, NotHermitianError) as e:
            logger.debug("Rejected relaxation step of length %s (%s).", step, e)
        step /= 2
    following = FlowState(t=state.t + 1.0, h=h, phi=phi, dt=step, steps=state.steps + 1,
                          epsilon=state.epsilon, slope=state.slope, sup_phi=sup_phi,
                          monitors=state.monitors)
    following.monitors.append(measure(manifold, bundle, following, domain, reference))
    return following


def run_flow(manifold, bundle, h0, epsilon, slope, config, reference=None):
    """
    Integrate the perturbed flow until it is stationary or runs out of time.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param h0: The initial metric (``Id`` outside the interior on Dirichlet runs).
    :param epsilon: The perturbation parameter ``ε ≥ 0`` (a float).
    :param slope: The constant ``λ`` (a float).
    :param config: A :class:`FlowConfig` object.
    :param reference: The metric ``K`` of the ``ε log(K⁻¹H)`` term (optional).
    :returns: A tuple ``(h, result)`` with the final metric and a
              :class:`FlowResult`. Running out of time or steps isn't an
              error: :attr:`FlowResult.converged` is :data:`False` then.
    """
    timer = Timer()
    state = initial_state(manifold, bundle, h0, epsilon, slope, config, reference)
    tolerance = config.effective_tolerance(slope)
    initial_sup = state.sup_phi
    step = relaxation_step if config.stepper == 'preconditioned' else flow_step
    limit = config.max_steps if config.stepper == 'explicit' else min(config.max_steps, 1000)
    monotone = True
    timed = step is flow_step
    while state.sup_phi >= tolerance and state.steps < limit and not (timed and state.t >= config.max_time):
        previous = state.sup_phi
        state = step(state, manifold, bundle, config, reference)
        if state.sup_phi > previous + MONOTONICITY_SLACK:
            monotone = False
    converged = state.sup_phi < tolerance
    c0_bound = None
    if epsilon > 0 and reference is None and np.allclose(h0, np.eye(bundle.rank)):
        c0_bound = initial_sup / epsilon
    logger.log(logging.INFO if converged else logging.WARNING,
               "%s flow %s after %s in %s (sup|Φ_ε| = %.3g, tolerance %.2g).",
               config.stepper.capitalize(), "converged" if converged else "stopped",
               pluralize(state.steps, "step"), timer, state.sup_phi, tolerance)
    if not monotone and config.stepper == 'explicit':
        logger.warning("sup|Φ_ε| wasn't monotone along the flow!")
    return state.h, FlowResult(state=state, converged=converged, tolerance=tolerance,
                               monotone=monotone, c0_bound=c0_bound)


def contraction_trace(manifold, bundle, h1, h2, epsilon, slope, config, steps=None):
    """
    Run two flows in lock step and record their Donaldson distance.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param h1: The first initial metric.
    :param h2: The second initial metric.
    :param epsilon: The perturbation parameter (a float).
    :param slope: The constant ``λ`` (a float).
    :param config: A :class:`FlowConfig` object (explicit stepper).
    :param steps: The number of steps (defaults to :attr:`FlowConfig.max_steps`).
    :returns: A list of ``(t, sup σ(h₁(t), h₂(t)))`` tuples.
    """
    first = initial_state(manifold, bundle, h1, epsilon, slope, config)
    second = initial_state(manifold, bundle, h2, epsilon, slope, config)
    trace_ = [(0.0, donaldson_distance(first.h, second.h)[1])]
    for _ in range(config.max_steps if steps is None else steps):
        if first.t >= config.max_time:
            break
        dt = min(first.dt, second.dt)
        first = flow_step(replace_dt(first, dt), manifold, bundle, config)
        second = flow_step(replace_dt(second, first.t - second.t), manifold, bundle, config)
        trace_.append((first.t, donaldson_distance(first.h, second.h)[1]))
    return trace_


def replace_dt(state, dt):
    """Copy a :class:`FlowState` with a different time step."""
    return FlowState(t=state.t, h=state.h, phi=state.phi, dt=dt, steps=state.steps, epsilon=state.epsilon,
                     slope=state.slope, sup_phi=state.sup_phi, monitors=state.monitors)


def flow_level(arguments):
    """Run the flow on one exhaustion level (for :func:`~higgs_flow_lab.parallel.map_concurrent()`)."""
    index, manifold, bundle, level, epsilon, slope, config, reference = arguments
    domain = exhaustion_domain(manifold, level)
    try:
        h, result = run_flow(manifold, bundle, identity_field(manifold.shape, bundle.rank),
                             epsilon, slope, config.replace(boundary=domain), reference)
    except SolverError as e:
        raise FlowAbortedError("Flow failed on exhaustion level %i (φ < %s)! (%s)" % (index, level, e),
                               diagnostics=dict(level_index=index, level=level, error=str(e)))
    if not result.converged:
        raise FlowAbortedError(compact("""
            Flow didn't converge on exhaustion level {index} (φ < {level})!
            (sup|Φ_ε| = {sup:.3g} after {steps})
        """, index=index, level=level, sup=result.sup_phi, steps=pluralize(result.steps, "step")),
            diagnostics=dict(level_index=index, level=level, sup_phi=result.sup_phi))
    return h, result


def exhaustion_flow_limit(manifold, bundle, epsilon, slope, levels, config, core_level=CORE_LEVEL, concurrency=1,
                          reference=None):
    """
    Solve Dirichlet problems on growing exhaustion domains and compare them.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param epsilon: The perturbation parameter (a float).
    :param slope: The constant ``λ`` (a float).
    :param levels: Increasing exhaustion levels (a list of floats).
    :param config: A :class:`FlowConfig` object (its :attr:`~FlowConfig.boundary` is replaced per level).
    :param core_level: Distances are measured on the core ``{φ < core_level}``.
    :param concurrency: The number of levels to solve in parallel (an integer).
    :param reference: The metric ``K`` of the ``ε log(K⁻¹H)`` term (optional).
    :returns: A tuple ``(h, limit)`` with the finest level metric and an :class:`ExhaustionLimit`.
    :raises: :exc:`~exceptions.ValueError` when the levels aren't increasing,
             :exc:`.FlowAbortedError` (naming the level) when a level fails.
    """
    levels = [float(level) for level in levels]
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("Invalid exhaustion levels, expected an increasing list! (%r)" % levels)
    timer = Timer()
    jobs = [(i, manifold, bundle, level, epsilon, slope, config, reference) for i, level in enumerate(levels)]
    outcomes = map_concurrent(flow_level, jobs, concurrency)
    metrics = [h for h, _ in outcomes]
    core = manifold.phi < core_level
    table = [[float(donaldson_distance(a[core], b[core])[1]) for b in metrics] for a in metrics]
    successive = [table[i][i + 1] for i in range(len(levels) - 1)]
    monotone = all(b <= a + MONOTONICITY_SLACK for a, b in zip(successive, successive[1:]))
    if not monotone:
        logger.warning("Cauchy table of the exhaustion isn't monotone! (%s)",
                       ", ".join("%.3g" % d for d in successive))
    phi, _ = evaluate(manifold, bundle, metrics[-1], epsilon, slope, reference, None)
    core_residual = float(endo_norm(phi)[core].max())
    logger.info("Solved %s in %s (core residual %.3g).",
                pluralize(len(levels), "exhaustion level"), timer, core_residual)
    return metrics[-1], ExhaustionLimit(
        levels=levels,
        metrics=metrics,
        results=[r for _, r in outcomes],
        cauchy_table=table,
        monotone=monotone,
        core_residual=core_residual,
    )
