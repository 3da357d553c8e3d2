# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Scalar elliptic solvers.

The discrete equation ``(Δ̃ - ε) f = ψ`` is multiplied by the volume weights
``W`` which turns it into the symmetric positive (semi)definite system
``(S + εW) f = -Wψ``. That system is solved by :func:`conjugate_gradient()`,
a Jacobi preconditioned conjugate gradient iteration that works on several
right hand sides (columns) at once.

On whole models (tori and the truncated cusp, whose ends are zero-flux) the
Poisson case ``ε = 0`` is only solvable for sources with mean zero and the
solution is normalized to mean zero. On exhaustion domains the values
outside the interior are fixed (Dirichlet data).
"""

# Standard library modules.
import logging

# External dependencies.
import numpy as np
import scipy.sparse
from humanfriendly import Timer
from humanfriendly.text import compact, pluralize
from property_manager import PropertyManager, lazy_property, required_property

# Modules included in our package.
from higgs_flow_lab.analysis import compute_slope, curvature_density
from higgs_flow_lab.bundle import identity_field, trace
from higgs_flow_lab.exceptions import ConvergenceError, IncompatibleSourceError
from higgs_flow_lab.geometry import integrate

SOLVER_TOLERANCE = 1e-10
"""Relative residual tolerance of :func:`conjugate_gradient()` (a float)."""

ITERATION_FACTOR = 10
"""The iteration cap of :func:`conjugate_gradient()` is this factor times the system size (an integer)."""

MEAN_ZERO_TOLERANCE = 1e-8
"""Sources with ``|∫ψ| > MEAN_ZERO_TOLERANCE · Vol · sup|ψ|`` are incompatible with ``ε = 0`` (a float)."""

CAUCHY_TOLERANCE = 1e-7
"""Sup norm tolerance of the Cauchy test in :func:`solve_poisson_noncompact()` (a float)."""

MAX_HALVINGS = 20
"""The largest ``k`` in the sequence ``ε_k = 2^{-k}`` of :func:`solve_poisson_noncompact()` (an integer)."""

LIMIT_SOLVER_TOLERANCE = 1e-12
"""Relative residual tolerance for the individual solves of :func:`solve_poisson_noncompact()` (a float)."""

# Public identifiers that require documentation.
__all__ = (
    'CAUCHY_TOLERANCE',
    'ITERATION_FACTOR',
    'LIMIT_SOLVER_TOLERANCE',
    'MAX_HALVINGS',
    'MEAN_ZERO_TOLERANCE',
    'SOLVER_TOLERANCE',
    'EllipticSolveReport',
    'PoissonLimitReport',
    'check_mean_zero',
    'conformal_trace_normalize',
    'conjugate_gradient',
    'logger',
    'solve_helmholtz',
    'solve_helmholtz_columns',
    'solve_poisson_noncompact',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


class EllipticSolveReport(PropertyManager):

    """Diagnostics of a single Helmholtz or Poisson solve."""

    repr_properties = ('epsilon', 'residual', 'sup_f', 'iterations')

    @required_property
    def epsilon(self):
        """The Helmholtz parameter ``ε`` (a float)."""

    @required_property
    def residual(self):
        """The sup norm of ``(Δ̃ - ε) f - ψ`` on the interior nodes (a float)."""

    @required_property
    def sup_f(self):
        """The sup norm of the solution (a float)."""

    @required_property
    def energy(self):
        """The Dirichlet energy ``fᵀSf = -∫ f Δ̃f`` (a float)."""

    @required_property
    def iterations(self):
        """The number of conjugate gradient iterations (an integer)."""

    def to_dict(self):
        """Convert the report to a dictionary (suitable for JSON serialization)."""
        return dict(epsilon=self.epsilon, residual=self.residual, sup_f=self.sup_f,
                    energy=self.energy, iterations=self.iterations)


class PoissonLimitReport(PropertyManager):

    """Diagnostics of the ``ε → 0`` limit computed by :func:`solve_poisson_noncompact()`."""

    repr_properties = ('residual', 'sup_f', 'energy', 'converged_at')

    @required_property(repr=False)
    def steps(self):
        """One :class:`EllipticSolveReport` per ``ε_k`` (a list)."""

    @required_property(repr=False)
    def cauchy(self):
        """Sup norm differences between successive extrapolated solutions (a list of floats)."""

    @required_property
    def residual(self):
        """The sup norm of ``Δ̃f - ψ`` for the limit ``f`` (a float)."""

    @required_property
    def sup_f(self):
        """The sup norm of the limit (a float)."""

    @required_property
    def energy(self):
        """The Dirichlet energy of the limit (a float)."""

    @required_property
    def mean(self):
        """The integral of the limit (a float, zero up to rounding)."""

    @lazy_property
    def converged_at(self):
        """The ``ε`` at which the Cauchy test passed (a float)."""
        return self.steps[-1].epsilon

    def to_dict(self):
        """Convert the report to a dictionary (suitable for JSON serialization)."""
        return dict(
            residual=self.residual,
            sup_f=self.sup_f,
            energy=self.energy,
            mean=self.mean,
            converged_at=self.converged_at,
            steps=[s.to_dict() for s in self.steps],
            cauchy=list(self.cauchy),
        )


def conjugate_gradient(matrix, rhs, initial=None, tolerance=SOLVER_TOLERANCE, max_iterations=None):
    """
    Solve a symmetric positive (semi)definite system by preconditioned conjugate gradients.

    :param matrix: A sparse symmetric matrix of size ``n × n``.
    :param rhs: A real numpy array of shape ``(n,)`` or ``(n, m)`` (columns are solved together).
    :param initial: The initial guess (same shape as `rhs`, defaults to zero).
    :param tolerance: Relative residual tolerance per column (a float).
    :param max_iterations: The iteration cap (defaults to :data:`ITERATION_FACTOR` times ``n``).
    :returns: A tuple ``(solution, iterations, history)`` where `history`
              holds the largest relative residual per iteration.
    :raises: :exc:`.ConvergenceError` when the cap is reached.

    The preconditioner is the inverse diagonal of `matrix`. Singular systems
    are fine as long as `rhs` lies in the range of `matrix`.
    """
    b = np.asarray(rhs, dtype=float)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    size = b.shape[0]
    if max_iterations is None:
        max_iterations = ITERATION_FACTOR * size
    inverse_diagonal = 1.0 / matrix.diagonal()
    x = np.zeros_like(b) if initial is None else np.array(initial, dtype=float).reshape(b.shape)
    r = b - matrix @ x
    scale = np.linalg.norm(b, axis=0)
    scale[scale == 0] = 1.0
    z = inverse_diagonal[:, None] * r
    d = z.copy()
    rz = np.sum(r * z, axis=0)
    relative = np.linalg.norm(r, axis=0) / scale
    history = [float(relative.max())]
    iterations = 0
    while relative.max() > tolerance:
        if iterations >= max_iterations:
            raise ConvergenceError(compact("""
                Conjugate gradients didn't converge in {iterations}!
                (relative residual {residual:.3g})
            """, iterations=pluralize(iterations, "iteration"), residual=relative.max()), history=history[-20:])
        active = relative > tolerance
        ad = matrix @ d
        curvature = np.sum(d * ad, axis=0)
        alpha = np.divide(rz, curvature, out=np.zeros_like(rz), where=active & (curvature != 0))
        x += alpha * d
        r -= alpha * ad
        z = inverse_diagonal[:, None] * r
        rz_next = np.sum(r * z, axis=0)
        beta = np.divide(rz_next, rz, out=np.zeros_like(rz), where=active & (rz != 0))
        d = z + beta * d
        rz = rz_next
        relative = np.linalg.norm(r, axis=0) / scale
        history.append(float(relative.max()))
        iterations += 1
    return (x[:, 0] if vector else x), iterations, history


def check_mean_zero(manifold, source):
    """
    Check that a source is compatible with the Poisson equation on a whole model.

    :raises: :exc:`.IncompatibleSourceError` when ``|∫ψ|`` exceeds
             :data:`MEAN_ZERO_TOLERANCE` times ``Vol · sup|ψ|``.
    """
    source = np.asarray(source)
    total = integrate(manifold, source)
    bound = MEAN_ZERO_TOLERANCE * manifold.volume * np.abs(source).max(axis=tuple(range(len(manifold.shape))))
    if np.any(np.abs(total) > bound):
        raise IncompatibleSourceError(compact("""
            Refusing to solve the Poisson equation with an incompatible source!
            (the source integrates to {total} instead of zero)
        """, total=total))


def solve_helmholtz_columns(manifold, sources, epsilon, domain=None, data=0.0, initial=None,
                            tolerance=SOLVER_TOLERANCE):
    """
    Solve ``(Δ̃ - ε) f = ψ`` for several real sources at once.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param sources: A real numpy array of shape ``grid + (m,)``.
    :param epsilon: The Helmholtz parameter ``ε ≥ 0`` (a float).
    :param domain: An :class:`~higgs_flow_lab.geometry.ExhaustionDomain`
                   (:data:`None` or a domain without boundary means the whole model).
    :param data: The Dirichlet values outside the interior (a number or an
                 array of shape ``grid + (m,)``).
    :param initial: Initial guess (an array of shape ``grid + (m,)``, optional).
    :param tolerance: Relative residual tolerance (a float).
    :returns: A tuple ``(solutions, iterations)``.
    :raises: :exc:`~exceptions.ValueError` for complex sources or ``ε < 0``,
             :exc:`.IncompatibleSourceError` and :exc:`.ConvergenceError`.
    """
    sources = np.asarray(sources)
    if np.iscomplexobj(sources):
        raise ValueError("Invalid source, complex valued sources aren't supported! (dtype %s)" % sources.dtype)
    if epsilon < 0:
        raise ValueError("Invalid Helmholtz parameter, expected ε ≥ 0! (%r)" % epsilon)
    columns = sources.reshape(manifold.size, -1).astype(float)
    count = columns.shape[1]
    weights = manifold.weights.ravel()
    stiffness = manifold.stiffness
    guess = None if initial is None else np.asarray(initial, dtype=float).reshape(manifold.size, count)
    if domain is None or domain.is_closed:
        if epsilon == 0:
            check_mean_zero(manifold, sources)
            columns = columns - (weights @ columns) / manifold.volume
        matrix = (stiffness + scipy.sparse.diags(epsilon * weights)).tocsr()
        solution, iterations, _ = conjugate_gradient(matrix, -weights[:, None] * columns, guess, tolerance)
        if epsilon == 0:
            solution -= (weights @ solution) / manifold.volume
        return solution.reshape(sources.shape), iterations
    inside = domain.interior.ravel()
    outside = ~inside
    values = np.broadcast_to(np.asarray(data, dtype=float), sources.shape).reshape(manifold.size, count)
    solution = values.copy()
    matrix = (stiffness[inside][:, inside] + scipy.sparse.diags(epsilon * weights[inside])).tocsr()
    rhs = -weights[inside][:, None] * columns[inside] - stiffness[inside][:, outside] @ values[outside]
    solution[inside], iterations, _ = conjugate_gradient(
        matrix, rhs, None if guess is None else guess[inside], tolerance,
    )
    return solution.reshape(sources.shape), iterations


def solve_helmholtz(manifold, source, epsilon, domain=None, data=0.0, initial=None, tolerance=SOLVER_TOLERANCE):
    """
    Solve ``(Δ̃ - ε) f = ψ`` for a real scalar source.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param source: A real scalar field ``ψ``.
    :param epsilon: The Helmholtz parameter ``ε ≥ 0`` (a float).
    :param domain: An :class:`~higgs_flow_lab.geometry.ExhaustionDomain` (optional).
    :param data: Dirichlet values outside the interior (a number or a scalar field).
    :param initial: Initial guess (optional).
    :param tolerance: Relative residual tolerance (a float).
    :returns: A tuple ``(f, report)`` with an :class:`EllipticSolveReport`.

    For ``ε > 0`` the discrete maximum principle gives ``sup|f| ≤ sup|ψ| / ε``
    on whole models (with zero Dirichlet data on domains).
    """
    source = np.asarray(source)
    timer = Timer()
    if not np.any(source) and not np.any(data):
        f, iterations = np.zeros(manifold.shape), 0
    else:
        f, iterations = solve_helmholtz_columns(manifold, source[..., None], epsilon, domain,
                                                np.asarray(data)[..., None] if np.ndim(data) else data,
                                                None if initial is None else np.asarray(initial)[..., None],
                                                tolerance)
        f = f[..., 0]
    residual_field = (manifold.laplacian_matrix @ f.ravel()).reshape(manifold.shape) - epsilon * f - source
    inside = np.ones(manifold.shape, dtype=bool) if domain is None else domain.interior
    report = EllipticSolveReport(
        epsilon=float(epsilon),
        residual=float(np.abs(residual_field[inside]).max()),
        sup_f=float(np.abs(f).max()),
        energy=float(f.ravel() @ (manifold.stiffness @ f.ravel())),
        iterations=iterations,
    )
    logger.debug("Solved Helmholtz equation with ε = %s in %s (%s, residual %.2g).",
                 epsilon, timer, pluralize(iterations, "iteration"), report.residual)
    return f, report


def solve_poisson_noncompact(manifold, source, tolerance=CAUCHY_TOLERANCE, max_halvings=MAX_HALVINGS):
    """
    Solve ``Δ̃f = ψ`` as the limit of ``(Δ̃ - ε) f_ε = ψ`` for ``ε_k = 2^{-k}``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param source: A real scalar field with mean zero.
    :param tolerance: Sup norm tolerance of the Cauchy test (a float).
    :param max_halvings: The largest ``k`` (an integer).
    :returns: A tuple ``(f, report)`` with a :class:`PoissonLimitReport`.
    :raises: :exc:`.IncompatibleSourceError` when the source doesn't have
             mean zero, :exc:`.ConvergenceError` when the sequence doesn't
             settle before ``k = max_halvings``.

    Since ``f_ε = f₀ + O(ε)`` the Cauchy test is applied to the Richardson
    extrapolants ``g_k = 2 f_{ε_{k+1}} - f_{ε_k}`` which converge at rate ``O(ε²)``.
    """
    source = np.asarray(source, dtype=float)
    check_mean_zero(manifold, source)
    timer = Timer()
    steps, cauchy, solutions, extrapolants = [], [], [], []
    previous = None
    for k in range(max_halvings + 1):
        epsilon = 2.0 ** -k
        f, report = solve_helmholtz(manifold, source, epsilon, initial=previous, tolerance=LIMIT_SOLVER_TOLERANCE)
        steps.append(report)
        solutions.append(f)
        previous = f
        if len(solutions) >= 2:
            extrapolants.append(2 * solutions[-1] - solutions[-2])
        if len(extrapolants) >= 2:
            cauchy.append(float(np.abs(extrapolants[-1] - extrapolants[-2]).max()))
            logger.debug("Poisson limit at ε = %s: Cauchy difference %.3g.", epsilon, cauchy[-1])
            if cauchy[-1] < tolerance:
                break
    else:
        raise ConvergenceError(compact("""
            Poisson limit shows no convergence after {count}! (last Cauchy
            difference {last:.3g} exceeds {tolerance})
        """, count=pluralize(len(steps), "ε-step"), last=cauchy[-1] if cauchy else float('nan'),
            tolerance=tolerance), history=cauchy)
    limit = extrapolants[-1] if extrapolants else solutions[-1]
    residual = (manifold.laplacian_matrix @ limit.ravel()).reshape(manifold.shape) - source
    summary = PoissonLimitReport(
        steps=steps,
        cauchy=cauchy,
        residual=float(np.abs(residual).max()),
        sup_f=float(np.abs(limit).max()),
        energy=float(limit.ravel() @ (manifold.stiffness @ limit.ravel())),
        mean=float(integrate(manifold, limit)),
    )
    logger.info("Computed Poisson limit in %s (%s, residual %.2g).",
                timer, pluralize(len(steps), "ε-step"), summary.residual)
    return limit, summary


def conformal_trace_normalize(manifold, bundle, reference=None):
    """
    Conformally normalize a metric so that ``tr Φ`` vanishes.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object (a whole model).
    :param bundle: A :class:`~higgs_flow_lab.bundle.HiggsBundle` object.
    :param reference: The metric ``K`` relative to ``H₀`` (:data:`None` means ``K = H₀``).
    :returns: A tuple ``(f, k̄)`` with ``k̄ = e^f K`` where ``Δ̃f = (2/r) tr(√-1 Λ F_{K,θ} - λ)``.
    """
    density = curvature_density(manifold, bundle, reference)
    traces = np.real(trace(density))
    slope = compute_slope(float(integrate(manifold, traces)), bundle.rank, manifold.volume)
    source = (2.0 / bundle.rank) * (traces - bundle.rank * slope)
    f, report = solve_helmholtz(manifold, source, 0.0)
    if reference is None:
        reference = identity_field(manifold.shape, bundle.rank)
    logger.debug("Conformal factor for trace normalization has sup norm %.3g.", report.sup_f)
    return f, np.exp(f)[..., None, None] * reference
