# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Discretized model manifolds.

Two models are available:

**Flat tori** (complex dimension one or two)
 Built by :func:`build_flat_torus()`. The real coordinates are periodic and
 uniform, the metric is ``dx² + dy²`` per complex axis which means
 ``g_{zz̄} = 1/2`` and ``g^{zz̄} = 2``. The exhaustion function is zero.

**The cusp cylinder** (complex dimension one)
 Built by :func:`build_cusp_cylinder()`. The coordinates are ``(τ, σ)`` in
 ``[1, τ_max] × [0, 2π)`` with metric ``(dτ² + dσ²) / τ²``, the complex
 coordinate is ``w = σ + iτ`` and the exhaustion function is ``φ = log τ``.
 The radial grid is geometric so that node density tracks the metric.

Fields are numpy arrays whose leading axes match :attr:`GridManifold.shape`;
matrix valued fields carry trailing ``(r, r)`` axes and form valued fields
carry an extra leading axis (one entry per complex axis).

The complex Laplacian ``Δ̃ = 2 g^{ij̄} ∂_i ∂_j̄`` is assembled in flux form,
so that ``W Δ̃ = -S`` where ``W`` holds the volume weights and ``S`` is a
symmetric positive semidefinite stiffness matrix. Ends of non-periodic axes
are zero-flux edges, which makes every whole-model operator closed.
"""

# Standard library modules.
import logging
import math
from enum import Enum

# External dependencies.
import numpy as np
import scipy.sparse
from humanfriendly.text import compact
from property_manager import PropertyManager, lazy_property, required_property

# Modules included in our package.
from higgs_flow_lab.exceptions import EmptyDomainError

MIN_TORUS_NODES = 4
"""The smallest number of nodes per side accepted by :func:`build_flat_torus()`."""

MIN_CUSP_NODES = 8
"""The smallest number of radial and angular nodes accepted by :func:`build_cusp_cylinder()`."""

GAUDUCHON_TOLERANCE = 1e-10
"""Threshold on the discrete Gauduchon and closedness residuals (a float)."""

# Public identifiers that require documentation.
__all__ = (
    'GAUDUCHON_TOLERANCE',
    'MIN_CUSP_NODES',
    'MIN_TORUS_NODES',
    'AssumptionReport',
    'ExhaustionDomain',
    'GridManifold',
    'ModelKind',
    'beltrami_laplacian',
    'build_cusp_cylinder',
    'build_flat_torus',
    'complex_derivatives',
    'complex_hessian',
    'exhaustion_domain',
    'integrate',
    'l2_norm',
    'laplacian_complex',
    'logger',
    'partial_derivative',
    'verify_assumptions',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


class ModelKind(Enum):

    """Enumeration of the shipped model manifolds."""

    FLAT_TORUS = 'flat_torus'
    """A compact flat torus of complex dimension one or two."""

    CUSP_CYLINDER = 'cusp_cylinder'
    """The finite volume cusp ``[1, τ_max] × S¹`` with metric ``(dτ² + dσ²) / τ²``."""


WHITELISTED_MODELS = (ModelKind.FLAT_TORUS, ModelKind.CUSP_CYLINDER)
"""Models for which the bounded-function assumption holds by construction."""


class GridManifold(PropertyManager):

    """A discretized model manifold with metric data, quadrature weights and an exhaustion function."""

    repr_properties = ('kind', 'dimension', 'shape', 'volume')
    """Keep :func:`repr()` output readable (the arrays are big)."""

    @required_property
    def kind(self):
        """The model (a :class:`ModelKind` member)."""

    @required_property
    def dimension(self):
        """The complex dimension ``n`` (an integer)."""

    @required_property(repr=False)
    def axes(self):
        """The node coordinates along each real axis (a tuple of 1D numpy arrays)."""

    @required_property(repr=False)
    def periodic(self):
        """Whether each real axis wraps around (a tuple of booleans)."""

    @required_property(repr=False)
    def periods(self):
        """The period of each real axis (a tuple of floats, :data:`None` for non-periodic axes)."""

    @required_property(repr=False)
    def complex_axes(self):
        """
        The real axes that make up each complex axis (a tuple of ``(real, imaginary)`` pairs).

        On the flat torus of dimension one this is ``((0, 1),)`` for ``z = x + iy``,
        on the cusp cylinder it is ``((1, 0),)`` for ``w = σ + iτ``.
        """

    @required_property(repr=False)
    def inverse_metric(self):
        """The diagonal inverse metric ``g^{iī}`` (a numpy array of shape ``(n,) + shape``)."""

    @required_property(repr=False)
    def phi(self):
        """The exhaustion function ``φ ≥ 0`` (a numpy array)."""

    @lazy_property
    def shape(self):
        """The grid shape (a tuple of integers)."""
        return tuple(len(a) for a in self.axes)

    @lazy_property
    def size(self):
        """The number of nodes (an integer)."""
        return int(np.prod(self.shape))

    @lazy_property(repr=False)
    def coordinates(self):
        """The node coordinates (a tuple of numpy arrays, one per real axis)."""
        return tuple(np.meshgrid(*self.axes, indexing='ij'))

    @lazy_property(repr=False)
    def metric(self):
        """The diagonal metric coefficients ``g_{iī}`` (a numpy array of shape ``(n,) + shape``)."""
        return 1.0 / self.inverse_metric

    @lazy_property
    def is_closed(self):
        """:data:`True` when every real axis is periodic (the model has no truncation ring)."""
        return all(self.periodic)

    @lazy_property(repr=False)
    def edge_lengths(self):
        """
        The distance from each node to its successor along each real axis.

        A tuple of 1D numpy arrays; periodic axes have one edge per node,
        other axes have one edge less than they have nodes.
        """
        lengths = []
        for axis, coords in enumerate(self.axes):
            if self.periodic[axis]:
                lengths.append(np.full(len(coords), self.periods[axis] / len(coords)))
            else:
                lengths.append(np.diff(coords))
        return tuple(lengths)

    @lazy_property
    def mesh_width(self):
        """The longest edge of the grid in coordinate units (a float)."""
        return float(max(lengths.max() for lengths in self.edge_lengths))

    @lazy_property(repr=False)
    def dual_lengths(self):
        """The length of the dual cell of each node along each real axis (a tuple of 1D numpy arrays)."""
        duals = []
        for axis, coords in enumerate(self.axes):
            h = self.edge_lengths[axis]
            if self.periodic[axis]:
                duals.append(0.5 * (h + np.roll(h, 1)))
            else:
                dual = np.empty(len(coords))
                dual[1:-1] = 0.5 * (h[1:] + h[:-1])
                dual[0] = 0.5 * h[0]
                dual[-1] = 0.5 * h[-1]
                duals.append(dual)
        return tuple(duals)

    @lazy_property(repr=False)
    def volume_factor(self):
        """The Riemannian density ``Π_i 2 g_{iī}`` relative to Lebesgue measure (a numpy array)."""
        return np.prod(2.0 * self.metric, axis=0)

    @lazy_property(repr=False)
    def weights(self):
        """Quadrature weights of ``ωⁿ/n!`` per node (a numpy array)."""
        cells = np.ones(self.shape)
        for axis, dual in enumerate(self.dual_lengths):
            cells = cells * expand(dual, axis, len(self.shape))
        return self.volume_factor * cells

    @lazy_property
    def volume(self):
        """The total volume (a float)."""
        return float(self.weights.sum())

    @lazy_property(repr=False)
    def edge_mask(self):
        """:data:`True` for nodes on the end rings of non-periodic axes (a boolean numpy array)."""
        mask = np.zeros(self.shape, dtype=bool)
        for axis, periodic in enumerate(self.periodic):
            if not periodic:
                index = [slice(None)] * len(self.shape)
                for end in (0, -1):
                    index[axis] = end
                    mask[tuple(index)] = True
        return mask

    @lazy_property(repr=False)
    def real_to_complex(self):
        """The complex axis of each real axis (a tuple of integers)."""
        mapping = [0] * len(self.axes)
        for i, pair in enumerate(self.complex_axes):
            for axis in pair:
                mapping[axis] = i
        return tuple(mapping)

    @lazy_property(repr=False)
    def axis_stiffness(self):
        """
        The stiffness matrix of each complex axis (a tuple of sparse matrices).

        Each matrix assembles the edge fluxes along the two real axes of one
        complex axis with conductance ``μ · (perpendicular dual area) / h``,
        where ``μ = Π_{j≠i} 2 g_{jj̄}`` is the density divided by ``2 g_{iī}``.
        """
        index = np.arange(self.size).reshape(self.shape)
        ndim = len(self.shape)
        pieces = [[] for _ in self.complex_axes]
        for axis, coords in enumerate(self.axes):
            i = self.real_to_complex[axis]
            conductance_density = self.volume_factor / (2.0 * self.metric[i])
            perpendicular = np.ones(self.shape)
            for other, dual in enumerate(self.dual_lengths):
                if other != axis:
                    perpendicular = perpendicular * expand(dual, other, ndim)
            if self.periodic[axis]:
                head = index
                tail = np.roll(index, -1, axis=axis)
                mu = 0.5 * (conductance_density + np.roll(conductance_density, -1, axis=axis))
                area = perpendicular
            else:
                head = take(index, slice(0, -1), axis)
                tail = take(index, slice(1, None), axis)
                mu = 0.5 * (take(conductance_density, slice(0, -1), axis)
                            + take(conductance_density, slice(1, None), axis))
                area = take(perpendicular, slice(0, -1), axis)
            conductance = (mu * area / expand(self.edge_lengths[axis], axis, ndim)).ravel()
            head, tail = head.ravel(), tail.ravel()
            rows = np.concatenate([head, tail, head, tail])
            cols = np.concatenate([head, tail, tail, head])
            data = np.concatenate([conductance, conductance, -conductance, -conductance])
            pieces[i].append(scipy.sparse.coo_matrix((data, (rows, cols)), shape=(self.size, self.size)))
        return tuple(sum(p[1:], p[0]).tocsr() for p in pieces)

    @lazy_property(repr=False)
    def stiffness(self):
        """The symmetric positive semidefinite stiffness matrix ``S = -W Δ̃`` (a sparse matrix)."""
        return sum(self.axis_stiffness[1:], self.axis_stiffness[0]).tocsr()

    @lazy_property(repr=False)
    def axis_laplacians(self):
        """The part of ``Δ̃`` contributed by each complex axis (a tuple of sparse matrices)."""
        inverse_weights = scipy.sparse.diags(1.0 / self.weights.ravel())
        return tuple((-(inverse_weights @ s)).tocsr() for s in self.axis_stiffness)

    @lazy_property(repr=False)
    def laplacian_matrix(self):
        """The discrete complex Laplacian ``Δ̃`` (a sparse matrix acting on raveled fields)."""
        return sum(self.axis_laplacians[1:], self.axis_laplacians[0]).tocsr()

    @lazy_property(repr=False)
    def spacing(self):
        """
        The smallest edge adjacent to each node, per complex axis.

        A numpy array of shape ``(n,) + shape``, used to scale time steps.
        """
        ndim = len(self.shape)
        result = np.full((self.dimension,) + self.shape, np.inf)
        for axis in range(ndim):
            h = self.edge_lengths[axis]
            if self.periodic[axis]:
                local = np.minimum(h, np.roll(h, 1))
            else:
                local = np.empty(self.shape[axis])
                local[1:-1] = np.minimum(h[1:], h[:-1])
                local[0], local[-1] = h[0], h[-1]
            i = self.real_to_complex[axis]
            result[i] = np.minimum(result[i], expand(local, axis, ndim))
        return result


class ExhaustionDomain(PropertyManager):

    """A sublevel set ``{φ < level}`` of the exhaustion function together with its boundary ring."""

    repr_properties = ('level', 'interior_count', 'boundary_count')

    @required_property
    def level(self):
        """The exhaustion level (a float)."""

    @required_property(repr=False)
    def interior(self):
        """Nodes where the equations are solved (a boolean numpy array)."""

    @required_property(repr=False)
    def boundary(self):
        """Nodes that carry Dirichlet data (a boolean numpy array, empty for closed domains)."""

    @lazy_property(repr=False)
    def exterior(self):
        """Nodes outside the domain and its boundary ring (a boolean numpy array)."""
        return ~(self.interior | self.boundary)

    @lazy_property
    def interior_count(self):
        """The number of interior nodes (an integer)."""
        return int(self.interior.sum())

    @lazy_property
    def boundary_count(self):
        """The number of boundary nodes (an integer)."""
        return int(self.boundary.sum())

    @lazy_property
    def is_closed(self):
        """:data:`True` when the domain has no boundary ring (the whole of a closed model)."""
        return self.boundary_count == 0


class AssumptionReport(PropertyManager):

    """Verification results for the standing assumptions on a model manifold."""

    @required_property
    def volume(self):
        """The total volume (a float)."""

    @required_property
    def sup_laplacian_phi(self):
        """The largest ``|Δ̃φ|`` away from the truncation rings (a float)."""

    @required_property
    def gauduchon_residual(self):
        """The L² norm of the discrete ``∂∂̄ω^{n-1}`` (a float)."""

    @required_property
    def closedness_residual(self):
        """The L² norm of the discrete ``dω^{n-1}`` (a float)."""

    @required_property
    def min_phi(self):
        """The smallest value of the exhaustion function (a float)."""

    @required_property
    def whitelisted(self):
        """:data:`True` when the model is whitelisted for the bounded-function assumption."""

    @lazy_property
    def finite_volume(self):
        """:data:`True` when the volume is finite and positive."""
        return bool(np.isfinite(self.volume) and self.volume > 0)

    @lazy_property
    def exhaustion_ok(self):
        """:data:`True` when ``φ ≥ 0`` and ``Δ̃φ`` is bounded."""
        return bool(self.min_phi >= 0 and np.isfinite(self.sup_laplacian_phi))

    @lazy_property
    def gauduchon_ok(self):
        """:data:`True` when both residuals are below :data:`GAUDUCHON_TOLERANCE`."""
        return bool(self.gauduchon_residual <= GAUDUCHON_TOLERANCE
                    and self.closedness_residual <= GAUDUCHON_TOLERANCE)

    def to_dict(self):
        """Convert the report to a dictionary (suitable for JSON serialization)."""
        return dict(
            volume=self.volume,
            sup_laplacian_phi=self.sup_laplacian_phi,
            gauduchon_residual=self.gauduchon_residual,
            closedness_residual=self.closedness_residual,
            min_phi=self.min_phi,
            finite_volume_ok=self.finite_volume,
            exhaustion_ok=self.exhaustion_ok and self.gauduchon_ok,
            bounded_functions_ok=self.whitelisted,
            bounded_functions_source="holds by model construction (whitelisted)",
        )


def build_flat_torus(n, periods, nodes_per_side):
    """
    Build a flat torus.

    :param n: The complex dimension (1 or 2).
    :param periods: The period of each real axis (a number or a list of ``2n`` numbers).
    :param nodes_per_side: The number of nodes along every real axis (an even integer ≥ 4).
    :returns: A :class:`GridManifold` object.
    :raises: :exc:`~exceptions.ValueError` when the arguments are invalid.
    """
    if n not in (1, 2):
        raise ValueError("Invalid complex dimension for a flat torus! (%r)" % n)
    if int(nodes_per_side) != nodes_per_side or nodes_per_side < MIN_TORUS_NODES or nodes_per_side % 2:
        raise ValueError("Invalid number of nodes per side, expected an even integer ≥ %i! (%r)"
                         % (MIN_TORUS_NODES, nodes_per_side))
    nodes_per_side = int(nodes_per_side)
    if np.isscalar(periods):
        periods = [periods] * (2 * n)
    periods = [float(p) for p in periods]
    if len(periods) == 1:
        periods = periods * (2 * n)
    if len(periods) != 2 * n or any(p <= 0 for p in periods):
        raise ValueError("Invalid torus periods, expected %i positive numbers! (%r)" % (2 * n, periods))
    axes = tuple(np.arange(nodes_per_side) * (p / nodes_per_side) for p in periods)
    shape = (nodes_per_side,) * (2 * n)
    logger.debug("Building flat torus of complex dimension %i on a %s grid ..",
                 n, "×".join(map(str, shape)))
    return GridManifold(
        kind=ModelKind.FLAT_TORUS,
        dimension=n,
        axes=axes,
        periodic=(True,) * (2 * n),
        periods=tuple(periods),
        complex_axes=tuple((2 * i, 2 * i + 1) for i in range(n)),
        inverse_metric=np.full((n,) + shape, 2.0),
        phi=np.zeros(shape),
    )


def build_cusp_cylinder(tau_max, radial_nodes, angular_nodes):
    """
    Build the truncated cusp cylinder.

    :param tau_max: The truncation radius ``τ_max > 1`` (a float).
    :param radial_nodes: The number of (geometrically graded) nodes in ``τ``.
    :param angular_nodes: The number of (uniform, periodic) nodes in ``σ``.
    :returns: A :class:`GridManifold` object.
    :raises: :exc:`~exceptions.ValueError` when the arguments are invalid.
    """
    if not tau_max > 1:
        raise ValueError("Invalid cusp truncation, expected τ_max > 1! (%r)" % tau_max)
    for name, value in (('radial', radial_nodes), ('angular', angular_nodes)):
        if int(value) != value or value < MIN_CUSP_NODES:
            raise ValueError("Invalid number of %s nodes, expected an integer ≥ %i! (%r)"
                             % (name, MIN_CUSP_NODES, value))
    radial_nodes, angular_nodes = int(radial_nodes), int(angular_nodes)
    tau = float(tau_max) ** (np.arange(radial_nodes) / (radial_nodes - 1.0))
    tau[0], tau[-1] = 1.0, float(tau_max)
    sigma = np.arange(angular_nodes) * (2 * math.pi / angular_nodes)
    shape = (radial_nodes, angular_nodes)
    tau_field = np.broadcast_to(tau[:, None], shape)
    logger.debug("Building cusp cylinder with τ_max = %s on a %i×%i grid ..", tau_max, radial_nodes, angular_nodes)
    return GridManifold(
        kind=ModelKind.CUSP_CYLINDER,
        dimension=1,
        axes=(tau, sigma),
        periodic=(False, True),
        periods=(None, 2 * math.pi),
        complex_axes=((1, 0),),
        inverse_metric=(2.0 * tau_field ** 2)[None, ...].copy(),
        phi=np.log(tau_field).copy(),
    )


def partial_derivative(manifold, field, axis):
    """
    Differentiate a field along one real axis.

    :param manifold: A :class:`GridManifold` object.
    :param field: A numpy array whose leading axes match the grid.
    :param axis: The real axis (an integer).
    :returns: A numpy array with the same shape as `field`.

    Periodic axes use centered differences with wrap around, other axes use
    :func:`numpy.gradient()` with second order one-sided stencils at the ends.
    """
    if manifold.periodic[axis]:
        h = manifold.edge_lengths[axis][0]
        return (np.roll(field, -1, axis=axis) - np.roll(field, 1, axis=axis)) / (2 * h)
    return np.gradient(field, manifold.axes[axis], axis=axis, edge_order=2)


def complex_derivatives(manifold, field):
    """
    Compute the ``(1,0)`` and ``(0,1)`` coefficients of the differential of a field.

    :param manifold: A :class:`GridManifold` object.
    :param field: A numpy array whose leading axes match the grid (scalar or matrix valued).
    :returns: A tuple ``(dz, dzbar)`` of numpy arrays of shape ``(n,) + field.shape``
              holding ``∂f/∂z^i`` and ``∂f/∂z̄^i``.
    """
    field = np.asarray(field)
    dz = np.empty((manifold.dimension,) + field.shape, dtype=complex)
    dzbar = np.empty_like(dz)
    for i, (re, im) in enumerate(manifold.complex_axes):
        d_re = partial_derivative(manifold, field, re)
        d_im = partial_derivative(manifold, field, im)
        dz[i] = 0.5 * (d_re - 1j * d_im)
        dzbar[i] = 0.5 * (d_re + 1j * d_im)
    return dz, dzbar


def laplacian_complex(manifold, field, axis=None):
    """
    Apply the complex Laplacian ``Δ̃ = -2√-1 Λ ∂̄∂`` to a field.

    :param manifold: A :class:`GridManifold` object.
    :param field: A numpy array whose leading axes match the grid.
    :param axis: Restrict to the part contributed by one complex axis (an
                 integer or :data:`None` for the full operator).
    :returns: A numpy array with the same shape as `field`.
    """
    field = np.asarray(field)
    operator = manifold.laplacian_matrix if axis is None else manifold.axis_laplacians[axis]
    flat = field.reshape(manifold.size, -1)
    return (operator @ flat).reshape(field.shape)


def complex_hessian(manifold, field):
    """
    Compute the mixed second derivatives ``∂_i ∂_j̄ f``.

    :param manifold: A :class:`GridManifold` object.
    :param field: A numpy array whose leading axes match the grid.
    :returns: A numpy array of shape ``(n, n) + field.shape``.

    The diagonal entries come from the compact stencil of :func:`laplacian_complex()`
    (so that ``2 Σ_i g^{iī} ∂_i ∂_ī f`` is exactly ``Δ̃f``), the off-diagonal
    entries compose first derivatives.
    """
    field = np.asarray(field)
    n = manifold.dimension
    result = np.empty((n, n) + field.shape, dtype=complex)
    extra = (Ellipsis,) + (None,) * (field.ndim - len(manifold.shape))
    if n > 1:
        dz, _ = complex_derivatives(manifold, field)
    for i in range(n):
        for j in range(n):
            if i == j:
                scale = 2.0 * manifold.inverse_metric[i][extra]
                result[i, i] = laplacian_complex(manifold, field, axis=i) / scale
            else:
                result[i, j] = complex_derivatives(manifold, dz[i])[1][j]
    return result


def beltrami_laplacian(manifold, field):
    """
    Apply the Laplace-Beltrami operator of the Riemannian metric.

    :param manifold: A :class:`GridManifold` object.
    :param field: A real or complex scalar field.
    :returns: A numpy array with the same shape as `field`.

    This evaluates ``|g|^{-1/2} ∂_a (|g|^{1/2} g^{ab} ∂_b f)`` with explicit
    edge fluxes, independently of the sparse assembly behind
    :func:`laplacian_complex()`. On the shipped (Kähler) models both
    operators agree.
    """
    field = np.asarray(field)
    ndim = len(manifold.shape)
    density = manifold.volume_factor
    total = np.zeros(field.shape, dtype=np.result_type(field, float))
    for axis in range(ndim):
        coefficient = density / (2.0 * manifold.metric[manifold.real_to_complex[axis]])
        h = expand(manifold.edge_lengths[axis], axis, ndim)
        dual = expand(manifold.dual_lengths[axis], axis, ndim)
        if manifold.periodic[axis]:
            mu = 0.5 * (coefficient + np.roll(coefficient, -1, axis=axis))
            flux = mu * (np.roll(field, -1, axis=axis) - field) / h
            total += (flux - np.roll(flux, 1, axis=axis)) / dual
        else:
            mu = 0.5 * (take(coefficient, slice(0, -1), axis) + take(coefficient, slice(1, None), axis))
            flux = mu * np.diff(field, axis=axis) / h
            pad = [(0, 0)] * field.ndim
            pad[axis] = (1, 1)
            padded = np.pad(flux, pad)
            total += (take(padded, slice(1, None), axis) - take(padded, slice(0, -1), axis)) / dual
    return total / density


def integrate(manifold, field):
    """
    Integrate a field against the volume form ``ωⁿ/n!``.

    :param manifold: A :class:`GridManifold` object.
    :param field: A numpy array whose leading axes match the grid.
    :returns: A number (for scalar fields) or a numpy array (for fields with trailing axes).
    """
    field = np.asarray(field)
    result = np.tensordot(manifold.weights, field, axes=len(manifold.shape))
    return result.item() if np.ndim(result) == 0 else result


def l2_norm(manifold, pointwise_square):
    """
    Compute an L² norm from a pointwise squared norm.

    :param manifold: A :class:`GridManifold` object.
    :param pointwise_square: A nonnegative real scalar field.
    :returns: The square root of the integral (a float).
    """
    return math.sqrt(max(0.0, float(np.real(integrate(manifold, pointwise_square)))))


def exhaustion_domain(manifold, level):
    """
    Select the sublevel set ``{φ < level}`` of the exhaustion function.

    :param manifold: A :class:`GridManifold` object.
    :param level: The exhaustion level (a float in ``[min φ, max φ]``).
    :returns: An :class:`ExhaustionDomain` object. On closed models a level
              at (or above) ``max φ`` selects every node and has no boundary.
    :raises: :exc:`.EmptyDomainError` when no interior node remains,
             :exc:`~exceptions.ValueError` when `level` exceeds ``max φ``.
    """
    phi = manifold.phi
    highest = float(phi.max())
    if level > highest + 1e-12 and not manifold.is_closed:
        raise ValueError("Invalid exhaustion level beyond the truncation! (%s > max φ = %s)" % (level, highest))
    if manifold.is_closed and level >= highest:
        interior = np.ones(manifold.shape, dtype=bool)
    else:
        interior = phi < level
    if not interior.any():
        raise EmptyDomainError(compact("""
            Refusing to use an empty exhaustion domain! (level {level}
            is not above min φ = {lowest})
        """, level=level, lowest=float(phi.min())))
    neighbours = np.zeros(manifold.shape, dtype=bool)
    for axis, periodic in enumerate(manifold.periodic):
        for step in (1, -1):
            if periodic:
                neighbours |= np.roll(interior, step, axis=axis)
            else:
                shifted = np.zeros_like(interior)
                source = [slice(None)] * interior.ndim
                target = [slice(None)] * interior.ndim
                if step == 1:
                    source[axis], target[axis] = slice(0, -1), slice(1, None)
                else:
                    source[axis], target[axis] = slice(1, None), slice(0, -1)
                shifted[tuple(target)] = interior[tuple(source)]
                neighbours |= shifted
    boundary = neighbours & ~interior
    return ExhaustionDomain(level=float(level), interior=interior, boundary=boundary)


def verify_assumptions(manifold):
    """
    Verify the standing assumptions on a model manifold.

    :param manifold: A :class:`GridManifold` object.
    :returns: An :class:`AssumptionReport` object.

    The bounded-function assumption isn't computed: it holds by construction
    on the whitelisted models (see :data:`WHITELISTED_MODELS`).
    """
    laplacian_phi = laplacian_complex(manifold, manifold.phi)
    inside = ~manifold.edge_mask
    sup_laplacian = float(np.abs(laplacian_phi[inside]).max()) if inside.any() else 0.0
    if manifold.dimension == 1:
        # ω^{n-1} = 1 in complex dimension one.
        gauduchon = closedness = 0.0
    else:
        gauduchon_square = np.zeros(manifold.shape)
        closedness_square = np.zeros(manifold.shape)
        for i in range(manifold.dimension):
            coefficient = manifold.metric[i]
            gauduchon_square += np.sum(np.abs(complex_hessian(manifold, coefficient)) ** 2, axis=(0, 1))
            for derivative in complex_derivatives(manifold, coefficient):
                closedness_square += np.sum(np.abs(derivative) ** 2, axis=0)
        gauduchon = l2_norm(manifold, gauduchon_square)
        closedness = l2_norm(manifold, closedness_square)
    report = AssumptionReport(
        volume=manifold.volume,
        sup_laplacian_phi=sup_laplacian,
        gauduchon_residual=gauduchon,
        closedness_residual=closedness,
        min_phi=float(manifold.phi.min()),
        whitelisted=manifold.kind in WHITELISTED_MODELS,
    )
    logger.debug("Assumption report for %s: %s", manifold.kind.value, report.to_dict())
    return report


def expand(vector, axis, ndim):
    """Reshape a 1D array so that it broadcasts along one axis of an ``ndim`` grid."""
    shape = [1] * ndim
    shape[axis] = len(vector)
    return np.reshape(vector, shape)


def take(array, index, axis):
    """Slice an array along one axis."""
    selection = [slice(None)] * array.ndim
    selection[axis] = index
    return array[tuple(selection)]
