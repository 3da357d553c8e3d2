# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Matrix field algebra for Higgs bundles.

All metrics are relative to the working reference metric ``H₀``, which is
represented by the identity matrix in the working frame. A metric field is
therefore a positive definite Hermitian matrix ``h = H₀⁻¹H`` per node, and
background data enters only through the curvature coefficients ``F₀`` of
``H₀`` and the Higgs field ``θ``.

Conventions:

- ``(1,1)``-forms are stored as coefficients ``η_{ij̄}`` of ``dz^i ∧ dz̄^j``
  in arrays of shape ``(n, n) + grid + (r, r)``.
- ``(1,0)`` and ``(0,1)``-forms are stored as arrays of shape ``(n,) + grid + (r, r)``.
- The contraction is fixed by ``Δ̃f = -2√-1 Λ ∂̄∂f``, which gives
  ``√-1 Λ η = Σ_i g^{iī} η_{iī}``; every contraction goes through :func:`contract()`.
- Forms are normed with ``|dz^i|² = |dz̄^i|² = g^{iī}``.
"""

# Standard library modules.
import logging
import math

# External dependencies.
import numpy as np
from property_manager import PropertyManager, lazy_property, required_property

# Modules included in our package.
from higgs_flow_lab import HERMITIAN_TOLERANCE
from higgs_flow_lab.exceptions import NotHermitianError, NotPositiveDefiniteError
from higgs_flow_lab.geometry import complex_derivatives, complex_hessian, l2_norm

PSI_SWITCH = 1e-6
"""Below this eigenvalue gap :func:`divided_difference()` switches to its Taylor form."""

CONDITIONING_FLOOR = 1e-14
"""Eigenvalues of a metric below this value are reported as ill-conditioned (a float)."""

# Public identifiers that require documentation.
__all__ = (
    'CONDITIONING_FLOOR',
    'PSI_SWITCH',
    'HiggsBundle',
    'chern_curvature',
    'contract',
    'dagger',
    'dbar_theta',
    'divided_difference',
    'endo_exp',
    'endo_log',
    'endo_norm',
    'form_inner',
    'hermitian_eigh',
    'higgs_adjoint',
    'higgs_commutator',
    'higgs_positivity',
    'holomorphy_residuals',
    'identity_field',
    'logger',
    'matrix_sqrt',
    'mean_curvature_phi',
    'perturbed_mean_curvature',
    'psi_bilinear',
    'psi_domination_ratio',
    'psi_matrix',
    'relative_log',
    'sup_norm',
    'trace',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


class HiggsBundle(PropertyManager):

    """Discretized Higgs bundle data in the working gauge."""

    repr_properties = ('label', 'rank')

    @required_property
    def rank(self):
        """The rank ``r`` of the bundle (an integer)."""

    @required_property(repr=False)
    def curvature(self):
        """The curvature coefficients ``F₀`` of the reference metric (shape ``(n, n) + grid + (r, r)``)."""

    @required_property(repr=False)
    def higgs_field(self):
        """The Higgs field coefficients ``θ_i`` (shape ``(n,) + grid + (r, r)``)."""

    @required_property
    def label(self):
        """A human readable description (a string like ``split_pair(0.5)``)."""

    @lazy_property
    def has_higgs_field(self):
        """:data:`True` when ``θ`` isn't identically zero."""
        return bool(np.any(self.higgs_field != 0))

    def validate(self, manifold):
        """
        Check that the bundle data matches a manifold.

        :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
        :raises: :exc:`~exceptions.ValueError` when the shapes don't match.
        """
        n, r = manifold.dimension, self.rank
        expected = {
            'curvature': (n, n) + manifold.shape + (r, r),
            'higgs_field': (n,) + manifold.shape + (r, r),
        }
        for name, shape in expected.items():
            actual = np.shape(getattr(self, name))
            if actual != shape:
                raise ValueError("Invalid %s shape for bundle %s! (%s != %s)" % (name, self.label, actual, shape))


def dagger(a):
    """Conjugate transpose of a matrix field (the last two axes)."""
    return np.conj(np.swapaxes(a, -1, -2))


def identity_field(shape, rank):
    """
    Create the identity metric.

    :param shape: The grid shape (a tuple of integers).
    :param rank: The bundle rank (an integer).
    :returns: A complex numpy array of shape ``shape + (rank, rank)``.
    """
    return np.broadcast_to(np.eye(rank, dtype=complex), tuple(shape) + (rank, rank)).copy()


def trace(a):
    """Pointwise trace of a matrix field."""
    return np.trace(a, axis1=-2, axis2=-1)


def hermitian_eigh(a, what='field'):
    """
    Diagonalize a Hermitian matrix field.

    :param a: A numpy array with trailing ``(r, r)`` axes.
    :param what: A short description used in error messages (a string).
    :returns: A tuple ``(eigenvalues, eigenvectors)`` from :func:`numpy.linalg.eigh()`.
    :raises: :exc:`.NotHermitianError` when `a` isn't Hermitian within
             :data:`~higgs_flow_lab.HERMITIAN_TOLERANCE` (relative).
    """
    a = np.asarray(a)
    skew = np.linalg.norm(a - dagger(a), axis=(-2, -1))
    scale = 1.0 + np.linalg.norm(a, axis=(-2, -1))
    if np.any(skew > HERMITIAN_TOLERANCE * scale):
        node = np.unravel_index(np.argmax(skew / scale), skew.shape)
        raise NotHermitianError("The %s isn't Hermitian at node %s! (skew part %.3g)"
                                % (what, tuple(int(i) for i in node), skew[node]))
    return np.linalg.eigh(0.5 * (a + dagger(a)))


def compose(vectors, values):
    """Rebuild a matrix field from eigenvectors and (transformed) eigenvalues."""
    return (vectors * values[..., None, :]) @ dagger(vectors)


def endo_log(h):
    """
    Take the logarithm of a positive definite Hermitian metric field.

    :param h: A metric field (numpy array with trailing ``(r, r)`` axes).
    :returns: The Hermitian field ``s = log h``.
    :raises: :exc:`.NotPositiveDefiniteError` (with the offending node index)
             when `h` isn't positive definite, :exc:`.NotHermitianError` when
             `h` isn't Hermitian.
    """
    values, vectors = hermitian_eigh(h, 'metric')
    check_positive(values)
    return compose(vectors, np.log(values))


def endo_exp(s):
    """
    Exponentiate a Hermitian endomorphism field.

    :param s: A Hermitian field (numpy array with trailing ``(r, r)`` axes).
    :returns: The positive definite Hermitian field ``e^s``.
    :raises: :exc:`.NotHermitianError` when `s` isn't Hermitian.
    """
    values, vectors = hermitian_eigh(s, 'endomorphism')
    return compose(vectors, np.exp(values))


def check_positive(values):
    """Raise :exc:`.NotPositiveDefiniteError` unless all eigenvalues are finite and positive."""
    smallest = values[..., 0]
    bad = ~np.isfinite(smallest) | (smallest <= 0)
    if np.any(bad):
        node = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NotPositiveDefiniteError("Metric isn't positive definite at node %s! (min eigenvalue %s)"
                                       % (node, smallest[node]), node=node)
    if np.any(smallest < CONDITIONING_FLOOR):
        logger.warning("Metric is badly conditioned (min eigenvalue %.3g).", smallest.min())


def matrix_sqrt(h):
    """
    Compute the square root of a positive definite metric field and its inverse.

    :param h: A metric field.
    :returns: A tuple ``(h^{1/2}, h^{-1/2})``.
    """
    values, vectors = hermitian_eigh(h, 'metric')
    check_positive(values)
    root = np.sqrt(values)
    return compose(vectors, root), compose(vectors, 1.0 / root)


def relative_log(reference, h):
    """
    Compute ``s = log(K⁻¹H)`` for a reference metric ``K`` and a metric ``H``.

    :param reference: The metric field ``K`` (or :data:`None` for ``K = H₀``).
    :param h: The metric field ``H``.
    :returns: The ``K``-self-adjoint field ``s``.
    """
    if reference is None:
        return endo_log(h)
    root, inverse_root = matrix_sqrt(reference)
    return inverse_root @ endo_log(inverse_root @ h @ inverse_root) @ root


def divided_difference(x, y):
    """
    Evaluate ``Ψ(x, y) = (e^{y-x} - 1) / (y - x)`` (and ``1`` when ``x = y``).

    :param x: A number or numpy array.
    :param y: A number or numpy array.
    :returns: A numpy array. Gaps smaller than :data:`PSI_SWITCH` use the
              Taylor expansion of ``expm1(d) / d``.
    """
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    small = np.abs(d) < PSI_SWITCH
    safe = np.where(small, 1.0, d)
    return np.where(small, 1.0 + d / 2.0 + d * d / 6.0, np.expm1(safe) / safe)


def psi_matrix(eigenvalues):
    """
    Tabulate ``Ψ(λ_α, λ_β)`` for the eigenvalues of an endomorphism field.

    :param eigenvalues: A numpy array with a trailing axis of length ``r``.
    :returns: A numpy array with trailing ``(r, r)`` axes whose ``(α, β)``
              entry is ``Ψ(λ_α, λ_β)``.
    """
    return divided_difference(eigenvalues[..., :, None], eigenvalues[..., None, :])


def contract(manifold, eta):
    """
    Contract a ``(1,1)``-form with the Kähler form: ``√-1 Λ η = Σ_i g^{iī} η_{iī}``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param eta: Coefficients of shape ``(n, n) + grid + tail``.
    :returns: A numpy array of shape ``grid + tail``.
    """
    tail = eta.ndim - 2 - len(manifold.shape)
    result = 0
    for i in range(manifold.dimension):
        result = result + manifold.inverse_metric[i][(Ellipsis,) + (None,) * tail] * eta[i, i]
    return result


def form_factors(manifold, count):
    """The norm ``g^{iī}`` of each component of a stacked ``(1,0)``/``(0,1)`` form with `count` components."""
    return np.stack([manifold.inverse_metric[k % manifold.dimension] for k in range(count)])


def form_inner(manifold, a, b):
    """
    Pointwise inner product of two endomorphism valued forms.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param a: Stacked form coefficients of shape ``(m,) + grid + (r, r)``.
    :param b: Stacked form coefficients with the same shape.
    :returns: The real scalar field ``Σ_k g_k tr(a_k b_k†)``.
    """
    pointwise = np.real(np.sum(a * np.conj(b), axis=(-2, -1)))
    return np.sum(form_factors(manifold, len(a)) * pointwise, axis=0)


def chern_curvature(manifold, bundle, h):
    """
    Compute the Chern curvature ``F_H = F₀ + ∂̄(h⁻¹∂h)`` of a metric.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`HiggsBundle` object.
    :param h: A metric field relative to ``H₀``.
    :returns: The ``(1,1)`` coefficients ``F_{ij̄}`` (shape ``(n, n) + grid + (r, r)``).

    With ``s = log h`` the connection form is evaluated as
    ``h⁻¹∂h = Ψ(ad s)(∂s)``, i.e. the ``(α, β)`` eigenframe entry of ``∂s``
    weighted by ``Ψ(λ_α, λ_β)``. The abelian part ``-∂_i∂_j̄ s`` uses the
    compact stencil of :func:`~higgs_flow_lab.geometry.complex_hessian()` and
    only the non-commuting remainder is differentiated twice with centered
    differences, so commuting fields reduce exactly to ``-½ Δ̃ s``.
    """
    values, vectors = hermitian_eigh(h, 'metric')
    check_positive(values)
    logs = np.log(values)
    s = compose(vectors, logs)
    ds, _ = complex_derivatives(manifold, s)
    rotated = dagger(vectors) @ ds @ vectors
    connection = vectors @ (psi_matrix(logs) * rotated) @ dagger(vectors)
    remainder = connection - ds
    curvature = np.array(bundle.curvature, dtype=complex) - complex_hessian(manifold, s)
    for i in range(manifold.dimension):
        if np.any(remainder[i] != 0):
            curvature[i] -= complex_derivatives(manifold, remainder[i])[1]
    return curvature


def higgs_adjoint(bundle, h):
    """
    Compute the adjoint ``θ^{*H} = h⁻¹ θ† h`` of the Higgs field.

    :param bundle: A :class:`HiggsBundle` object.
    :param h: A metric field relative to ``H₀``.
    :returns: The ``(0,1)`` coefficients (shape ``(n,) + grid + (r, r)``).
    """
    theta = np.asarray(bundle.higgs_field)
    return np.linalg.solve(h, dagger(theta) @ h)


def higgs_commutator(manifold, bundle, h):
    """
    Compute ``[θ, θ^{*H}] = θ ∧ θ^{*H} + θ^{*H} ∧ θ`` as ``(1,1)`` coefficients.

    :returns: An array whose ``(i, j)`` entry is ``θ_i θ*_j - θ*_j θ_i``.
    """
    theta = np.asarray(bundle.higgs_field)
    n = manifold.dimension
    result = np.zeros((n, n) + theta.shape[1:], dtype=complex)
    if not bundle.has_higgs_field:
        return result
    adjoint = higgs_adjoint(bundle, h)
    for i in range(n):
        for j in range(n):
            result[i, j] = theta[i] @ adjoint[j] - adjoint[j] @ theta[i]
    return result


def mean_curvature_phi(manifold, bundle, h, slope):
    """
    Compute the Hitchin-Simpson mean curvature ``Φ(H, θ) = √-1 Λ (F_H + [θ, θ^{*H}]) - λ Id``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param bundle: A :class:`HiggsBundle` object.
    :param h: A metric field relative to ``H₀``.
    :param slope: The constant ``λ`` (a float).
    :returns: The ``H``-self-adjoint field ``Φ``. The discrete field is
              projected onto its ``H``-self-adjoint part, which differs from
              it by discretization error only.
    """
    total = chern_curvature(manifold, bundle, h) + higgs_commutator(manifold, bundle, h)
    phi = contract(manifold, total) - slope * np.eye(bundle.rank)
    return 0.5 * (phi + np.linalg.solve(h, dagger(phi) @ h))


def perturbed_mean_curvature(manifold, bundle, h, slope, epsilon, reference=None):
    """
    Compute ``Φ_ε = Φ(H, θ) + ε log(K⁻¹H)``.

    :param reference: The reference metric ``K`` (:data:`None` means ``K = H₀``).
    :returns: The ``H``-self-adjoint field ``Φ_ε``.
    """
    phi = mean_curvature_phi(manifold, bundle, h, slope)
    if epsilon:
        phi = phi + epsilon * relative_log(reference, h)
    return phi


def endo_norm(field):
    """
    Pointwise norm of a field of self-adjoint endomorphisms (with respect to any metric).

    :param field: A numpy array with trailing ``(r, r)`` axes.
    :returns: The real scalar field ``(tr Φ²)^{1/2}``.
    """
    return np.sqrt(np.maximum(np.real(trace(field @ field)), 0.0))


def sup_norm(field):
    """The largest pointwise :func:`endo_norm()` of a self-adjoint endomorphism field (a float)."""
    return float(endo_norm(field).max())


def dbar_theta(manifold, bundle, s):
    """
    Apply ``∂̄_θ = ∂̄ + [θ, ·]`` to an endomorphism field.

    :returns: The stacked coefficients ``(∂̄_1 s, .., ∂̄_n s, [θ_1, s], .., [θ_n, s])``
              of shape ``(2n,) + grid + (r, r)``.
    """
    _, dbar = complex_derivatives(manifold, s)
    theta = np.asarray(bundle.higgs_field)
    return np.concatenate([dbar, theta @ s - s @ theta])


def psi_bilinear(manifold, s, a, b):
    """
    Evaluate ``⟨Ψ(s)(a), b⟩`` pointwise.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param s: A Hermitian endomorphism field.
    :param a: Stacked form coefficients (see :func:`dbar_theta()`).
    :param b: Stacked form coefficients with the same shape.
    :returns: A real scalar field. In the eigenframe of ``s`` the ``(α, β)``
              entry is weighted by ``Ψ(λ_β, λ_α)``; for ``s = 0`` this is
              :func:`form_inner()`.
    """
    values, vectors = hermitian_eigh(s, 'endomorphism')
    weights = np.swapaxes(psi_matrix(values), -1, -2)
    ra = dagger(vectors) @ a @ vectors
    rb = dagger(vectors) @ b @ vectors
    pointwise = np.real(np.sum(weights * ra * np.conj(rb), axis=(-2, -1)))
    return np.sum(form_factors(manifold, len(a)) * pointwise, axis=0)


def psi_domination_ratio(manifold, s, a):
    """
    Compare ``|a|²`` with ``⟨Ψ(s)(a), a⟩``.

    :returns: A tuple ``(ratio, bound)`` with the largest pointwise ratio and
              the bound ``e^{2R}`` where ``R`` is the largest spectral radius of ``s``.
    """
    plain = form_inner(manifold, a, a)
    weighted = psi_bilinear(manifold, s, a, a)
    mask = plain > 0
    ratio = float((plain[mask] / weighted[mask]).max()) if mask.any() else 0.0
    radius = float(np.abs(np.linalg.eigvalsh(s)).max())
    return ratio, math.exp(2 * radius)


def higgs_positivity(manifold, bundle, h):
    """
    Evaluate ``⟨√-1 Λ [θ, θ^{*H} - θ^{*H₀}], log h⟩_{H₀}`` pointwise.

    :returns: A real scalar field, nonnegative up to rounding.
    """
    difference = higgs_commutator(manifold, bundle, h) - higgs_commutator(
        manifold, bundle, identity_field(manifold.shape, bundle.rank))
    return np.real(trace(contract(manifold, difference) @ endo_log(h)))


def holomorphy_residuals(manifold, bundle):
    """
    Measure how far ``θ`` is from being holomorphic and integrable.

    :returns: A tuple with the L² norms of ``∂̄θ`` and ``θ ∧ θ``.
    """
    theta = np.asarray(bundle.higgs_field)
    g = manifold.inverse_metric
    dbar_square = np.zeros(manifold.shape)
    for i in range(manifold.dimension):
        _, dbar = complex_derivatives(manifold, theta[i])
        for j in range(manifold.dimension):
            dbar_square += g[i] * g[j] * np.sum(np.abs(dbar[j]) ** 2, axis=(-2, -1))
    if manifold.dimension == 1:
        # A single dz can't wedge with itself.
        wedge = 0.0
    else:
        wedge_square = np.zeros(manifold.shape)
        for i in range(manifold.dimension):
            for j in range(i + 1, manifold.dimension):
                product = theta[i] @ theta[j] - theta[j] @ theta[i]
                wedge_square += g[i] * g[j] * np.sum(np.abs(product) ** 2, axis=(-2, -1))
        wedge = l2_norm(manifold, wedge_square)
    return l2_norm(manifold, dbar_square), wedge
