# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Named Higgs bundle presets.

The presets that can be selected in experiment configurations are:

``line_flat``
 The trivial line bundle with the flat metric and no Higgs field.

``line_weight(c)``
 The line bundle ``L_u`` whose reference metric is the conformal weight
 ``e^{-u}`` times the flat metric, so that ``√-1 Λ F₀ = ½ Δ̃u``.

``split_pair(c)``
 The direct sum ``L_u ⊕ L_{-u}`` without Higgs field. For ``c ≠ 0`` the
 first summand destabilizes, for ``c = 0`` both summands have slope zero.

``nilpotent_higgs(c, kappa=1)``
 The direct sum ``L_{-u} ⊕ L_u`` with the nilpotent Higgs field
 ``θ = κ f(w) E₁₂ dw`` which maps the second summand into the first, so
 only ``span(e₁)`` is θ-invariant. The coefficient ``f`` is ``e^{iw}`` on
 the cusp (bounded and holomorphic) and ``1`` on tori.

``diagonal_sum(c1, c2, ..)``
 The direct sum ``L_{u₁} ⊕ .. ⊕ L_{u_r}`` (at most four summands).

The weight ``u`` is ``c/τ`` on the cusp and ``c cos(2πx/L)`` on tori. Its
curvature is supplied analytically in ``F₀`` (the working reference metric
is the weighted one) which is what makes nonzero degrees possible on the
cusp: there the degree of ``L_u`` is ``π c (1 - τ_max⁻²)``.
"""

# Standard library modules.
import logging
import math
import numbers
import re

# External dependencies.
import numpy as np
from property_manager import PropertyManager, required_property

# Modules included in our package.
from higgs_flow_lab.analysis import StabilityCandidate
from higgs_flow_lab.bundle import HiggsBundle
from higgs_flow_lab.geometry import ModelKind

MAX_PRESET_RANK = 4
"""The largest rank accepted by :func:`build_preset()` (an integer)."""

PRESET_PATTERN = re.compile(r'^\s*(\w+)\s*(?:\((.*)\))?\s*$')
"""Compiled regular expression that parses preset expressions like ``split_pair(0.5)``."""

# Public identifiers that require documentation.
__all__ = (
    'MAX_PRESET_RANK',
    'PRESETS',
    'PRESET_PATTERN',
    'BundlePreset',
    'build_preset',
    'coerce_preset',
    'logger',
    'weight_degree',
    'weight_function',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


class BundlePreset(PropertyManager):

    """A preset bundle together with its candidate sub-objects and analytic degrees."""

    repr_properties = ('name', 'parameters', 'degree')

    @required_property
    def name(self):
        """The name of the preset (a string)."""

    @required_property
    def parameters(self):
        """The keyword arguments the preset was built with (a dictionary)."""

    @required_property(repr=False)
    def bundle(self):
        """The :class:`~higgs_flow_lab.bundle.HiggsBundle` object."""

    @required_property(repr=False)
    def candidates(self):
        """The candidate sub-objects (a list of :class:`~higgs_flow_lab.analysis.StabilityCandidate` objects)."""

    @required_property
    def degree(self):
        """The analytic degree of the bundle computed in closed form (a float)."""

    @required_property(repr=False)
    def candidate_degrees(self):
        """The closed form degrees of the candidates (a list of floats, same order as :attr:`candidates`)."""


def weight_function(manifold, c):
    """
    Evaluate the conformal weight ``u`` and the curvature density ``½ Δ̃u``.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param c: The weight amplitude (a float).
    :returns: A tuple of two real scalar fields ``(u, ½ Δ̃u)``.
    """
    if manifold.kind == ModelKind.CUSP_CYLINDER:
        tau = manifold.coordinates[0]
        # Δ̃(c/τ) = τ² ∂²_τ (c/τ) = 2c/τ
        return c / tau, c / tau
    x = manifold.coordinates[0]
    wavenumber = 2 * math.pi / manifold.periods[0]
    return c * np.cos(wavenumber * x), -0.5 * c * wavenumber ** 2 * np.cos(wavenumber * x)


def weight_degree(manifold, c):
    """
    Compute the degree of ``L_u`` in closed form (half the boundary flux of ``u``).

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param c: The weight amplitude (a float).
    :returns: The degree (a float).
    """
    if manifold.kind == ModelKind.CUSP_CYLINDER:
        tau_max = manifold.axes[0][-1]
        return math.pi * c * (1 - tau_max ** -2)
    return 0.0


def curvature_field(manifold, densities):
    """
    Build ``F₀`` for a diagonal sum of weighted line bundles.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param densities: One real scalar field per summand, the wanted ``√-1 Λ F₀`` entries.
    :returns: A complex numpy array of shape ``(n, n) + grid + (r, r)``.
    """
    n, r = manifold.dimension, len(densities)
    curvature = np.zeros((n, n) + manifold.shape + (r, r), dtype=complex)
    for alpha, density in enumerate(densities):
        curvature[0, 0, ..., alpha, alpha] = density / manifold.inverse_metric[0]
    return curvature


def constant_projector(manifold, rank, indices):
    """Build the orthogonal projector onto the span of some frame vectors (a constant field)."""
    diagonal = np.zeros(rank)
    diagonal[list(indices)] = 1.0
    return np.broadcast_to(np.diag(diagonal).astype(complex), manifold.shape + (rank, rank)).copy()


def diagonal_preset(manifold, name, parameters, amplitudes, higgs_field=None, invariant=None):
    """Shared implementation of the presets that are sums of weighted line bundles."""
    rank = len(amplitudes)
    densities = [weight_function(manifold, c)[1] for c in amplitudes]
    degrees = [weight_degree(manifold, c) for c in amplitudes]
    if higgs_field is None:
        higgs_field = np.zeros((manifold.dimension,) + manifold.shape + (rank, rank), dtype=complex)
    bundle = HiggsBundle(
        rank=rank,
        curvature=curvature_field(manifold, densities),
        higgs_field=higgs_field,
        label=format_preset(name, parameters),
    )
    bundle.validate(manifold)
    candidates, candidate_degrees = [], []
    if rank > 1:
        for alpha in (range(rank) if invariant is None else invariant):
            candidates.append(StabilityCandidate(
                projection=constant_projector(manifold, rank, [alpha]),
                label='span(e%i)' % (alpha + 1),
            ))
            candidate_degrees.append(degrees[alpha])
    return BundlePreset(
        name=name,
        parameters=parameters,
        bundle=bundle,
        candidates=candidates,
        degree=float(sum(degrees)),
        candidate_degrees=candidate_degrees,
    )


def line_flat(manifold):
    """The trivial flat line bundle."""
    return diagonal_preset(manifold, 'line_flat', {}, [0.0])


def line_weight(manifold, c=1.0):
    """The weighted line bundle ``L_u``."""
    return diagonal_preset(manifold, 'line_weight', dict(c=c), [c])


def split_pair(manifold, c=1.0):
    """The split sum ``L_u ⊕ L_{-u}`` without Higgs field."""
    return diagonal_preset(manifold, 'split_pair', dict(c=c), [c, -c])


def nilpotent_higgs(manifold, c=1.0, kappa=1.0):
    """The sum ``L_{-u} ⊕ L_u`` with a nilpotent Higgs field."""
    if manifold.kind == ModelKind.CUSP_CYLINDER:
        tau, sigma = manifold.coordinates
        coefficient = kappa * np.exp(1j * sigma - tau)
    else:
        coefficient = np.full(manifold.shape, complex(kappa))
    theta = np.zeros((manifold.dimension,) + manifold.shape + (2, 2), dtype=complex)
    theta[0, ..., 0, 1] = coefficient
    return diagonal_preset(manifold, 'nilpotent_higgs', dict(c=c, kappa=kappa), [-c, c],
                           higgs_field=theta, invariant=[0])


def diagonal_sum(manifold, *amplitudes):
    """The sum of weighted line bundles with the given amplitudes."""
    if not amplitudes:
        raise ValueError("Invalid diagonal sum, expected at least one amplitude! (%r)" % (amplitudes,))
    return diagonal_preset(manifold, 'diagonal_sum', dict(amplitudes=list(amplitudes)), list(amplitudes))


PRESETS = dict(
    line_flat=line_flat,
    line_weight=line_weight,
    split_pair=split_pair,
    nilpotent_higgs=nilpotent_higgs,
    diagonal_sum=diagonal_sum,
)
"""A dictionary that maps preset names to functions that build :class:`BundlePreset` objects."""


def coerce_preset(value, parameters=None):
    """
    Try to coerce the given value to a preset name and its parameters.

    :param value: A preset name (optionally with positional arguments in
                  parentheses, like ``split_pair(0.5)``).
    :param parameters: A dictionary of keyword arguments (optional).
    :returns: A tuple with the preset name (a string), the positional
              arguments (a list of floats) and the keyword arguments (a dictionary).
    :raises: :exc:`~exceptions.ValueError` when the value doesn't name a known preset.
    """
    match = PRESET_PATTERN.match(value) if isinstance(value, str) else None
    if not match:
        raise ValueError("Invalid preset expression! (%r)" % (value,))
    name, arguments = match.groups()
    if name not in PRESETS:
        msg = "The name %r doesn't match a known preset! (known presets are %s)"
        raise ValueError(msg % (name, ', '.join(sorted(PRESETS))))
    positional = []
    for token in (arguments or '').split(','):
        if token.strip():
            try:
                positional.append(float(token))
            except ValueError:
                raise ValueError("Invalid preset argument in %r! (%r)" % (value, token.strip()))
    keywords = dict(parameters or {})
    for key, number in keywords.items():
        if not isinstance(number, numbers.Number):
            raise ValueError("Invalid preset parameter %r, expected a number! (%r)" % (key, number))
    return name, positional, keywords


def build_preset(manifold, value, parameters=None):
    """
    Build a preset bundle on a manifold.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param value: A preset expression (see :func:`coerce_preset()`).
    :param parameters: A dictionary of keyword arguments (optional).
    :returns: A :class:`BundlePreset` object.
    :raises: :exc:`~exceptions.ValueError` when the preset is unknown, the
             arguments don't fit or the rank exceeds :data:`MAX_PRESET_RANK`.
    """
    name, positional, keywords = coerce_preset(value, parameters)
    if name == 'diagonal_sum' and len(positional) > MAX_PRESET_RANK:
        raise ValueError("Invalid preset rank, expected at most %i! (%i)" % (MAX_PRESET_RANK, len(positional)))
    try:
        preset = PRESETS[name](manifold, *positional, **keywords)
    except TypeError as e:
        raise ValueError("Invalid arguments for preset %s! (%s)" % (name, e))
    logger.debug("Built preset %s (rank %i, degree %s).", preset.bundle.label, preset.bundle.rank, preset.degree)
    return preset


def format_preset(name, parameters):
    """Render a preset name and its parameters as an expression like ``split_pair(c=0.5)``."""
    if not parameters:
        return name
    rendered = ', '.join('%s=%s' % (k, v) for k, v in sorted(parameters.items()))
    return '%s(%s)' % (name, rendered)
