# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""Test suite for the ``higgs-flow-lab`` package."""

# Standard library modules.
import csv
import json
import logging
import math
import os

# External dependencies.
import numpy as np
import scipy.sparse
from humanfriendly.testing import PatchedItem, TemporaryDirectory, TestCase, run_cli

# Modules included in our package.
from higgs_flow_lab import THREADS_VARIABLE, parallel
from higgs_flow_lab.analysis import (
    StabilityCandidate,
    Verdict,
    analytic_degree,
    candidate_terms,
    donaldson_distance,
    identity_residual,
    stability_verdict,
    subobject_degree,
)
from higgs_flow_lab.bundle import (
    dbar_theta,
    divided_difference,
    endo_exp,
    endo_log,
    hermitian_eigh,
    higgs_adjoint,
    higgs_positivity,
    holomorphy_residuals,
    identity_field,
    mean_curvature_phi,
    psi_domination_ratio,
    relative_log,
    sup_norm,
)
from higgs_flow_lab.cli import main
from higgs_flow_lab.config import parse_config
from higgs_flow_lab.continuation import (
    AUDIT_FACTOR,
    DEFAULT_EPSILONS,
    PerturbedSolution,
    SweepThresholds,
    check_trace_condition,
    classify,
    epsilon_sweep_classify,
    extract_destabilizer,
    fit_ladder,
    solve_perturbed_he,
)
from higgs_flow_lab.exceptions import (
    ConfigurationError,
    ConvergenceError,
    EmptyDomainError,
    IncompatibleSourceError,
    InvalidCandidateError,
    NotHermitianError,
    NotPositiveDefiniteError,
    RankMismatchError,
    SolverError,
)
from higgs_flow_lab.experiments import (
    EXIT_CONFIGURATION,
    EXIT_SUCCESS,
    execute_experiment,
    format_cell,
    run_experiment,
    source_field,
)
from higgs_flow_lab.flow import (
    FlowConfig,
    cfl_time_step,
    contraction_trace,
    exhaustion_flow_limit,
    run_flow,
)
from higgs_flow_lab.geometry import (
    beltrami_laplacian,
    build_cusp_cylinder,
    build_flat_torus,
    exhaustion_domain,
    integrate,
    laplacian_complex,
    verify_assumptions,
)
from higgs_flow_lab.parallel import map_concurrent, resolve_threads
from higgs_flow_lab.poisson import (
    conformal_trace_normalize,
    conjugate_gradient,
    solve_helmholtz,
    solve_poisson_noncompact,
)
from higgs_flow_lab.presets import build_preset, coerce_preset, weight_degree

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


def small_torus(nodes=8):
    """A flat torus of complex dimension one with unit periods."""
    return build_flat_torus(1, 1.0, nodes)


def small_cusp(radial=12, angular=8):
    """A cusp cylinder truncated at τ = 4."""
    return build_cusp_cylinder(4.0, radial, angular)


def random_hermitian_field(manifold, rank, seed=1, scale=0.3):
    """A smooth Hermitian endomorphism field built from one Fourier mode."""
    random = np.random.default_rng(seed)
    a = random.normal(size=(rank, rank)) + 1j * random.normal(size=(rank, rank))
    matrix = scale * (a + np.conj(a.T)) / 2
    profile = np.cos(2 * math.pi * manifold.coordinates[-1] / manifold.periods[-1])
    return profile[..., None, None] * matrix


def synthetic_solution(**overrides):
    """A :class:`.PerturbedSolution` with made up diagnostics."""
    values = dict(epsilon=0.5, metric=identity_field((4,), 2), converged=True, residual=1e-9, he_residual=0.05,
                  sup_log_h=0.1, l2_log_h=0.1, l2_dbar_s=0.2, trace_min=0.0, trace_max=0.0, c0_bound=1.0,
                  identity_audit=1e-4, audit_tolerance=1e-3, steps=3)
    values.update(overrides)
    return PerturbedSolution(**values)


class HiggsFlowLabTestCase(TestCase):

    """:mod:`unittest` compatible container for the :mod:`higgs_flow_lab` test suite."""

    def write_config(self, directory, document):
        """Write a configuration document to a JSON file and return its pathname."""
        filename = os.path.join(directory, 'config.json')
        with open(filename, 'w') as handle:
            json.dump(document, handle)
        return filename

    def test_torus_volume(self):
        """The unit flat torus has volume one."""
        assert abs(small_torus().volume - 1.0) < 1e-12

    def test_cusp_volume(self):
        """The truncated cusp has volume 2π(1 - 1/τ_max)."""
        manifold = build_cusp_cylinder(4.0, 16, 16)
        expected = 2 * math.pi * (1 - 1 / 4.0)
        assert abs(manifold.volume - expected) < 2e-2 * expected

    def test_invalid_grids(self):
        """Odd grids, tiny grids and bad truncations are rejected."""
        self.assertRaises(ValueError, build_flat_torus, 1, 1.0, 7)
        self.assertRaises(ValueError, build_flat_torus, 3, 1.0, 8)
        self.assertRaises(ValueError, build_flat_torus, 1, -1.0, 8)
        self.assertRaises(ValueError, build_cusp_cylinder, 1.0, 16, 16)
        self.assertRaises(ValueError, build_cusp_cylinder, 4.0, 4, 16)

    def test_laplacian_oracle(self):
        """The complex Laplacian of cos(2πx) converges at second order."""
        errors = []
        for nodes in (32, 64):
            manifold = small_torus(nodes)
            f = np.cos(2 * math.pi * manifold.coordinates[0])
            exact = -4 * math.pi ** 2 * f
            errors.append(float(np.abs(laplacian_complex(manifold, f) - exact).max()))
        assert errors[0] <= 5e-3 * 4 * math.pi ** 2
        assert errors[0] / errors[1] >= 3.5

    def test_laplacian_kernel_and_symmetry(self):
        """Constants are harmonic and the stiffness matrix is symmetric."""
        for manifold in (small_torus(), small_cusp()):
            assert np.abs(laplacian_complex(manifold, np.ones(manifold.shape))).max() < 1e-10
            stiffness = manifold.stiffness
            assert abs(stiffness - stiffness.T).max() < 1e-12

    def test_beltrami_laplacian(self):
        """The Laplace-Beltrami operator agrees with the complex Laplacian on the cusp."""
        manifold = small_cusp()
        tau, sigma = manifold.coordinates
        f = np.sin(sigma) * np.log(tau) + tau
        a = laplacian_complex(manifold, f)
        b = beltrami_laplacian(manifold, f)
        assert np.abs(a - b).max() < 1e-8 * (1 + np.abs(a).max())

    def test_integrate(self):
        """Integrating one gives the volume."""
        manifold = small_cusp()
        assert abs(integrate(manifold, np.ones(manifold.shape)) - manifold.volume) < 1e-12

    def test_exhaustion_domain(self):
        """Sublevel sets of the exhaustion function have a boundary ring on the cusp."""
        manifold = small_cusp()
        domain = exhaustion_domain(manifold, math.log(2))
        assert domain.interior_count > 0
        assert domain.boundary_count > 0
        assert not domain.is_closed
        assert not np.any(domain.interior & domain.boundary)
        self.assertRaises(EmptyDomainError, exhaustion_domain, manifold, 0.0)
        self.assertRaises(ValueError, exhaustion_domain, manifold, 10.0)
        closed = exhaustion_domain(small_torus(), 0.0)
        assert closed.is_closed
        assert closed.interior_count == small_torus().size

    def test_verify_assumptions(self):
        """The whitelisted models satisfy the standing assumptions."""
        for manifold in (small_torus(), build_flat_torus(2, 1.0, 4), small_cusp()):
            report = verify_assumptions(manifold)
            assert report.finite_volume
            assert report.exhaustion_ok
            assert report.gauduchon_ok
            document = report.to_dict()
            assert document['finite_volume_ok'] and document['exhaustion_ok'] and document['bounded_functions_ok']

    def test_endo_log_exp(self):
        """The matrix logarithm inverts the matrix exponential."""
        manifold = small_torus()
        s = random_hermitian_field(manifold, 3)
        assert np.abs(endo_log(endo_exp(s)) - s).max() < 1e-10
        assert np.abs(relative_log(None, endo_exp(s)) - s).max() < 1e-10
        k = endo_exp(s)
        assert np.abs(relative_log(k, k)).max() < 1e-10
        s = endo_log(np.array([[[2.0, 1.0], [1.0, 2.0]]]))
        assert np.abs(s - math.log(3) / 2 * np.ones((2, 2))).max() < 1e-12

    def test_metric_checks(self):
        """Indefinite and non-Hermitian fields are rejected."""
        h = -identity_field((4,), 2)
        try:
            endo_log(h)
            assert False, "Expected NotPositiveDefiniteError!"
        except NotPositiveDefiniteError as e:
            assert e.node == (0,)
        skew = identity_field((4,), 2)
        skew[..., 0, 1] = 1.0
        self.assertRaises(NotHermitianError, hermitian_eigh, skew)

    def test_divided_difference(self):
        """Ψ(x, y) = (e^{y-x} - 1) / (y - x) with Ψ(x, x) = 1."""
        assert abs(float(divided_difference(0.0, 0.0)) - 1) < 1e-15
        assert abs(float(divided_difference(0.0, 1e-8)) - 1) < 1e-7
        assert abs(float(divided_difference(0.0, 1.0)) - (math.e - 1)) < 1e-12
        assert abs(float(divided_difference(1.0, 0.0)) - (1 - math.exp(-1))) < 1e-12
        assert abs(float(divided_difference(0.0, math.log(2))) - 1 / math.log(2)) < 1e-12

    def test_nilpotent_mean_curvature(self):
        """A constant nilpotent Higgs field on the flat torus has Φ(Id) = diag(2κ², -2κ²)."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs', dict(c=0.0, kappa=1.0))
        phi = mean_curvature_phi(manifold, preset.bundle, identity_field(manifold.shape, 2), 0.0)
        assert np.abs(phi - np.diag([2.0, -2.0])).max() < 1e-12

    def test_higgs_adjoint(self):
        """The adjoint of a nilpotent Higgs field with respect to diag(a, b) scales by a/b."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs(0, 1)')
        theta = np.asarray(preset.bundle.higgs_field)
        identity = identity_field(manifold.shape, 2)
        assert np.abs(higgs_adjoint(preset.bundle, identity) - np.conj(np.swapaxes(theta, -1, -2))).max() < 1e-12
        h = identity_field(manifold.shape, 2)
        h[..., 0, 0], h[..., 1, 1] = 2.0, 0.5
        adjoint = higgs_adjoint(preset.bundle, h)
        expected = np.zeros_like(adjoint)
        expected[..., 1, 0] = 4.0 * np.conj(theta[..., 0, 1])
        assert np.abs(theta[..., 0, 1]).min() > 0
        assert np.abs(adjoint - expected).max() < 1e-12

    def test_flat_line_bundle(self):
        """The trivial line bundle is Hermitian-Einstein with λ = 0."""
        manifold = small_torus()
        preset = build_preset(manifold, 'line_flat')
        assert analytic_degree(manifold, preset.bundle) == (0.0, 0.0)
        phi = mean_curvature_phi(manifold, preset.bundle, identity_field(manifold.shape, 1), 0.0)
        assert np.abs(phi).max() < 1e-14

    def test_higgs_positivity(self):
        """The Higgs term is pointwise nonnegative against log h."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs(0.5, 1.5)')
        h = endo_exp(random_hermitian_field(manifold, 2))
        positivity = higgs_positivity(manifold, preset.bundle, h)
        assert positivity.min() >= -1e-9 * (1 + np.abs(positivity).max())

    def test_psi_domination(self):
        """The Ψ-weighted energy dominates e^{-2R} times the plain energy."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs(1, 1)')
        s = random_hermitian_field(manifold, 2, seed=7)
        ratio, bound = psi_domination_ratio(manifold, s, dbar_theta(manifold, preset.bundle, s))
        assert 0 < ratio <= bound * (1 + 1e-9)

    def test_holomorphy_residuals(self):
        """A constant Higgs field on the flat torus is holomorphic."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs(1, 2)')
        dbar_residual, wedge_residual = holomorphy_residuals(manifold, preset.bundle)
        assert dbar_residual < 1e-12
        assert wedge_residual == 0

    def test_coerce_preset(self):
        """Preset expressions are parsed into names and arguments."""
        assert coerce_preset('split_pair(0.5)') == ('split_pair', [0.5], {})
        assert coerce_preset('line_weight', dict(c=2)) == ('line_weight', [], dict(c=2))
        self.assertRaises(ValueError, coerce_preset, 'no_such_preset')
        self.assertRaises(ValueError, coerce_preset, 'split_pair(x)')
        self.assertRaises(ValueError, coerce_preset, 42)

    def test_build_preset(self):
        """Presets carry labels and candidate sub-objects."""
        manifold = small_torus()
        preset = build_preset(manifold, 'split_pair', dict(c=0.5))
        assert preset.bundle.rank == 2
        assert preset.bundle.label == 'split_pair(c=0.5)'
        assert [c.label for c in preset.candidates] == ['span(e1)', 'span(e2)']
        assert build_preset(manifold, 'line_flat').candidates == []
        self.assertRaises(ValueError, build_preset, manifold, 'diagonal_sum(1, 2, 3, 4, 5)')
        self.assertRaises(ValueError, build_preset, manifold, 'line_flat(1, 2)')

    def test_weight_degree(self):
        """The quadrature degree of L_u on the cusp matches the boundary flux."""
        manifold = build_cusp_cylinder(4.0, 16, 16)
        preset = build_preset(manifold, 'line_weight(1)')
        degree, _ = analytic_degree(manifold, preset.bundle)
        expected = weight_degree(manifold, 1.0)
        assert abs(expected - math.pi * (1 - 4.0 ** -2)) < 1e-12
        assert abs(degree - expected) < 2e-2 * expected

    def test_donaldson_distance(self):
        """Donaldson's distance vanishes on the diagonal."""
        h = identity_field((4,), 2)
        assert donaldson_distance(h, h)[1] == 0
        _, sup = donaldson_distance(h, 2 * h)
        assert abs(sup - 1.0) < 1e-12
        h2 = identity_field((4,), 2)
        h2[..., 0, 0] = 2.0
        sigma, sup = donaldson_distance(h, h2)
        assert np.abs(sigma - 0.5).max() < 1e-12 and abs(sup - 0.5) < 1e-12
        self.assertRaises(RankMismatchError, donaldson_distance, h, identity_field((4,), 3))

    def test_stability_verdicts(self):
        """Candidate slopes classify the split and nilpotent presets on the cusp."""
        manifold = small_cusp()
        for expression, verdict in (('split_pair(1)', Verdict.UNSTABLE),
                                    ('split_pair(0)', Verdict.SEMISTABLE),
                                    ('nilpotent_higgs(1, 1)', Verdict.STABLE)):
            preset = build_preset(manifold, expression)
            report = stability_verdict(manifold, preset.bundle, None, preset.candidates)
            assert report.verdict == verdict, (expression, report.to_dict())
        preset = build_preset(manifold, 'split_pair(1)')
        self.assertRaises(ValueError, stability_verdict, manifold, preset.bundle, None, [])
        degree = subobject_degree(manifold, preset.bundle, None, preset.candidates[0])
        assert abs(degree - weight_degree(manifold, 1.0)) < 5e-2 * weight_degree(manifold, 1.0)

    def test_penalty_cancellation(self):
        """The penalty of a θ-invariant line cancels its Higgs curvature."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs(1, 1)')
        terms = candidate_terms(manifold, preset.bundle, preset.candidates[0])
        assert terms['label'] == 'span(e1)'
        assert terms['penalty'] > 0
        assert terms['invariance_defect'] < 1e-12
        assert abs(terms['degree']) < 1e-10

    def test_invalid_candidate(self):
        """Projections that aren't idempotent are rejected."""
        manifold = small_torus()
        preset = build_preset(manifold, 'split_pair(1)')
        bad = StabilityCandidate(projection=2 * preset.candidates[0].projection, label='twice span(e1)')
        self.assertRaises(InvalidCandidateError, candidate_terms, manifold, preset.bundle, bad)

    def test_integral_identity(self):
        """Both sides of the integral identity agree at second order for conformal metrics."""
        residuals = []
        for nodes in (16, 32):
            manifold = small_torus(nodes)
            preset = build_preset(manifold, 'line_flat')
            f = 0.5 * np.cos(2 * math.pi * manifold.coordinates[0])
            relative = np.exp(f)[..., None, None] * np.ones((1, 1))
            residuals.append(identity_residual(manifold, preset.bundle, None, relative))
        assert residuals[0] / residuals[1] >= 3.5

    def test_integral_identity_surface(self):
        """The integral identity also converges at second order on the flat torus of dimension two."""
        residuals = []
        for nodes in (8, 16):
            manifold = build_flat_torus(2, 1.0, nodes)
            preset = build_preset(manifold, 'line_flat')
            x, _, u, _ = manifold.coordinates
            f = 0.5 * np.cos(2 * math.pi * x) + 0.3 * np.cos(2 * math.pi * u)
            relative = np.exp(f)[..., None, None] * np.ones((1, 1))
            residuals.append(identity_residual(manifold, preset.bundle, None, relative))
        assert residuals[0] / residuals[1] >= 3.0

    def test_conjugate_gradient(self):
        """Conjugate gradients solve a small symmetric system."""
        matrix = scipy.sparse.csr_matrix(np.array([[4.0, 1.0], [1.0, 3.0]]))
        solution, iterations, history = conjugate_gradient(matrix, np.array([1.0, 2.0]))
        assert np.abs(solution - np.array([1.0 / 11, 7.0 / 11])).max() < 1e-9
        assert iterations <= 3
        assert history[-1] <= 1e-10

    def test_helmholtz_bounds(self):
        """Helmholtz solutions obey the maximum principle and the energy bound."""
        for manifold in (small_torus(16), small_cusp()):
            source = source_field(manifold, 'cosine')
            sup_source = np.abs(source).max()
            for epsilon in (1.0, 0.5, 0.1):
                f, report = solve_helmholtz(manifold, source, epsilon)
                assert report.sup_f <= sup_source / epsilon + 1e-8
                assert report.energy <= sup_source ** 2 * manifold.volume / epsilon + 1e-6
                assert report.residual < 1e-6
        manifold = small_torus()
        self.assertRaises(ValueError, solve_helmholtz, manifold, np.zeros(manifold.shape) + 1j, 1.0)
        self.assertRaises(ValueError, solve_helmholtz, manifold, np.ones(manifold.shape), -1.0)

    def test_poisson_limit(self):
        """The ε → 0 limit solves the Poisson equation for mean zero sources."""
        manifold = small_torus(16)
        source = source_field(manifold, 'cosine')
        f, report = solve_poisson_noncompact(manifold, source)
        assert report.residual < 1e-5
        assert abs(report.mean) < 1e-8
        assert len(report.steps) >= 3
        self.assertRaises(IncompatibleSourceError, solve_poisson_noncompact, manifold, np.ones(manifold.shape))

    def test_conformal_trace_normalize(self):
        """Conformal normalization makes the weighted line bundle Hermitian-Einstein."""
        manifold = small_torus(16)
        preset = build_preset(manifold, 'line_weight(1)')
        _, slope = analytic_degree(manifold, preset.bundle)
        self.assertRaises(ValueError, check_trace_condition, manifold, preset.bundle, None, slope)
        _, reference = conformal_trace_normalize(manifold, preset.bundle)
        phi = check_trace_condition(manifold, preset.bundle, reference, slope)
        assert sup_norm(phi) < 1e-6

    def test_flow_config(self):
        """Invalid flow configurations are rejected."""
        self.assertRaises(ValueError, FlowConfig(step_policy='bogus').validate)
        self.assertRaises(ValueError, FlowConfig(stepper='bogus').validate)
        self.assertRaises(ValueError, FlowConfig(step_policy='fixed').validate)
        self.assertRaises(ValueError, FlowConfig(cfl=0).validate)
        config = FlowConfig(cfl=0.1).replace(max_steps=10)
        assert config.cfl == 0.1 and config.max_steps == 10
        assert FlowConfig().effective_tolerance(1.0) == 2e-8

    def test_cfl_time_step(self):
        """The CFL time step scales with the square of the grid spacing."""
        ratio = cfl_time_step(small_torus(8), 0.2) / cfl_time_step(small_torus(16), 0.2)
        assert abs(ratio - 4) < 1e-9

    def test_flow_monotone(self):
        """sup|Φ_ε| doesn't increase along the explicit flow."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs(1, 1)')
        for epsilon in (0.0, 0.5):
            h, result = run_flow(manifold, preset.bundle, identity_field(manifold.shape, 2), epsilon, 0.0,
                                 FlowConfig(max_steps=100))
            sups = [row['sup_phi'] for row in result.history]
            assert len(sups) == 101
            assert all(b <= a + 1e-8 for a, b in zip(sups, sups[1:]))
            assert result.monotone

    def test_flow_convergence(self):
        """The explicit flow and the preconditioned stepper reach the same metric."""
        manifold = small_torus()
        preset = build_preset(manifold, 'line_weight(1)')
        start = identity_field(manifold.shape, 1)
        h1, explicit = run_flow(manifold, preset.bundle, start, 0.5, 0.0,
                                FlowConfig(stop_tolerance=1e-6, max_steps=50000))
        h2, relaxed = run_flow(manifold, preset.bundle, start, 0.5, 0.0,
                               FlowConfig(stepper='preconditioned', stop_tolerance=1e-6))
        assert explicit.converged and relaxed.converged
        assert relaxed.steps < explicit.steps
        assert np.abs(h1 - h2).max() < 1e-4
        assert explicit.c0_bound is not None
        assert sup_norm(endo_log(h1)) <= 1.05 * explicit.c0_bound

    def test_flow_helmholtz_oracle(self):
        """On a line bundle the stationary metric e^f solves (Δ̃ - 2ε) f = 2Φ(Id)."""
        epsilon = 0.5
        for manifold in (small_torus(16), small_cusp()):
            preset = build_preset(manifold, 'line_weight(1)')
            _, slope = analytic_degree(manifold, preset.bundle)
            phi = mean_curvature_phi(manifold, preset.bundle, identity_field(manifold.shape, 1), slope)
            expected, _ = solve_helmholtz(manifold, 2 * np.real(phi[..., 0, 0]), 2 * epsilon, tolerance=1e-12)
            h, result = run_flow(manifold, preset.bundle, identity_field(manifold.shape, 1), epsilon, slope,
                                 FlowConfig(stepper='preconditioned', stop_tolerance=1e-10))
            assert result.converged
            assert np.abs(np.real(endo_log(h)[..., 0, 0]) - expected).max() < 1e-6

    def test_flow_optional_bound(self):
        """Flows from a general metric or at ε = 0 report no a priori bound."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs(1, 1)')
        start = identity_field(manifold.shape, 2)
        start[..., 0, 0] = 2.0
        config = FlowConfig(max_steps=5)
        _, result = run_flow(manifold, preset.bundle, start, 0.5, 0.0, config)
        assert result.c0_bound is None
        assert result.steps == 5
        _, result = run_flow(manifold, preset.bundle, identity_field(manifold.shape, 2), 0.0, 0.0, config)
        assert result.c0_bound is None
        _, result = run_flow(manifold, preset.bundle, identity_field(manifold.shape, 2), 0.5, 0.0, config,
                             reference=identity_field(manifold.shape, 2))
        assert result.c0_bound is None

    def test_contraction(self):
        """Two flow lines don't drift apart."""
        manifold = small_torus()
        preset = build_preset(manifold, 'nilpotent_higgs(1, 1)')
        h1 = identity_field(manifold.shape, 2)
        h2 = identity_field(manifold.shape, 2)
        h2[..., 0, 0], h2[..., 1, 1] = 2.0, 0.5
        distances = [d for _, d in contraction_trace(manifold, preset.bundle, h1, h2, 0.5, 0.0,
                                                     FlowConfig(), steps=50)]
        assert len(distances) == 51
        assert all(b <= a + 1e-8 for a, b in zip(distances, distances[1:]))

    def test_exhaustion_levels(self):
        """Exhaustion levels must increase and empty domains fail."""
        manifold = small_cusp()
        preset = build_preset(manifold, 'line_weight(1)')
        config = FlowConfig(stepper='preconditioned')
        self.assertRaises(ValueError, exhaustion_flow_limit, manifold, preset.bundle, 0.5, 0.0, [1.0, 0.5], config)
        self.assertRaises(SolverError, exhaustion_flow_limit, manifold, preset.bundle, 0.5, 0.0, [0.0], config)

    def test_exhaustion_cauchy(self):
        """Dirichlet solutions on growing exhaustion domains form a Cauchy sequence on the core."""
        manifold = build_cusp_cylinder(4.0, 23, 8)
        preset = build_preset(manifold, 'line_weight(1)')
        _, slope = analytic_degree(manifold, preset.bundle)
        step = math.log(4.0) / 22
        levels = [step * (k + 0.5) for k in (13, 15, 17, 19)]
        h, limit = exhaustion_flow_limit(manifold, preset.bundle, 0.5, slope, levels,
                                         FlowConfig(stepper='preconditioned'))
        assert limit.levels == levels
        assert len(limit.metrics) == 4
        assert all(result.converged for result in limit.results)
        successive = [limit.cauchy_table[i][i + 1] for i in range(3)]
        assert successive[0] > 0
        assert all(b <= a for a, b in zip(successive, successive[1:]))
        assert limit.monotone
        assert np.all(np.isfinite(h))

    def test_fit_ladder(self):
        """The ladder constants are recovered from exact data."""
        table = [dict(l2_log_h=x, sup_log_h=2 * x + 1) for x in (1.0, 2.0, 3.0, 4.0)]
        ladder = fit_ladder(table)
        assert abs(ladder['gain'] - 2) < 1e-9
        assert abs(ladder['offset'] - 1) < 1e-9
        assert ladder['stable']
        assert fit_ladder(table[:1])['gain'] is None

    def test_perturbed_solution(self):
        """Perturbed solutions respect the C⁰ bound and preserve the trace."""
        manifold = small_cusp()
        preset = build_preset(manifold, 'split_pair(1)')
        _, reference = conformal_trace_normalize(manifold, preset.bundle)
        self.assertRaises(ValueError, solve_perturbed_he, manifold, preset.bundle, reference, 0.0)
        self.assertRaises(ValueError, solve_perturbed_he, manifold, preset.bundle, reference, 0.5, via='bogus')
        solution = solve_perturbed_he(manifold, preset.bundle, reference, 0.5)
        assert solution.converged
        assert solution.c0_ok
        assert max(abs(solution.trace_min), abs(solution.trace_max)) < 1e-8
        assert solution.to_dict()['tag'] is None
        assert solution.audit_ok
        assert solution.identity_audit <= AUDIT_FACTOR * solution.audit_tolerance + 1e-12
        strict = solve_perturbed_he(manifold, preset.bundle, reference, 0.5, c0_slack=0.0)
        assert strict.sup_log_h > 0
        assert not strict.c0_ok
        assert strict.to_dict()['c0_slack'] == 0.0

    def test_sweep_unstable(self):
        """The split pair on the cusp is destabilized by its first summand."""
        manifold = small_cusp()
        preset = build_preset(manifold, 'split_pair(1)')
        _, reference = conformal_trace_normalize(manifold, preset.bundle)
        report = epsilon_sweep_classify(manifold, preset.bundle, reference, [0.5, 0.25, 0.125, 0.0625],
                                        preset.candidates)
        assert report.verdict == Verdict.UNSTABLE, report.reason
        assert min(row['eps_times_sup'] for row in report.table) >= 1e-2
        assert report.destabilizer['matched_candidate'] == 'span(e1)'
        assert report.destabilizer['candidate_distance'] < 1e-2
        assert report.destabilizer['invariance_defect'] <= SweepThresholds().invariance
        self.assertRaises(ValueError, epsilon_sweep_classify, manifold, preset.bundle, reference,
                          [0.1, 0.2], preset.candidates)

    def test_sweep_semistable(self):
        """The trivial split pair is semistable."""
        manifold = small_cusp()
        preset = build_preset(manifold, 'split_pair(0)')
        report = epsilon_sweep_classify(manifold, preset.bundle, None, [0.5, 0.25, 0.125, 0.0625],
                                        preset.candidates)
        assert report.verdict == Verdict.SEMISTABLE, report.reason
        assert report.table[-1]['eps_times_sup'] <= 1e-3

    def test_sweep_stable(self):
        """The nilpotent Higgs bundle on the cusp converges to a Hermitian-Einstein metric."""
        manifold = small_cusp()
        preset = build_preset(manifold, 'nilpotent_higgs(1, 1)')
        report = epsilon_sweep_classify(manifold, preset.bundle, None, DEFAULT_EPSILONS, preset.candidates)
        assert report.verdict == Verdict.STABLE, report.reason
        assert report.destabilizer is None
        assert report.final_metric is not None
        assert report.final_residual <= SweepThresholds().stable_tolerance(report.slope)
        assert report.degree_report.verdict == Verdict.STABLE
        assert all(s.accepted for s in report.solutions)
        assert math.isfinite(report.solutions[-1].l2_dbar_s)
        assert report.to_dict()['destabilizer'] is None

    def test_destabilizer_invariance(self):
        """Projectors that the Higgs field doesn't preserve never certify instability."""
        manifold = small_cusp()
        preset = build_preset(manifold, 'nilpotent_higgs(1, 1)')
        report = epsilon_sweep_classify(manifold, preset.bundle, None, [0.5, 0.25, 0.125, 0.0625],
                                        preset.candidates)
        assert report.verdict != Verdict.UNSTABLE, report.reason
        assert report.destabilizer is None
        found = extract_destabilizer(manifold, preset.bundle, None, report.solutions[-1], preset.candidates,
                                     SweepThresholds())
        if not isinstance(found, str):
            assert found['invariance_defect'] <= SweepThresholds().invariance
            assert not found['slope'] > found['total_slope']

    def test_c0_slack(self):
        """The configured slack applies to the a priori bound and the boundedness test."""
        solution = synthetic_solution(sup_log_h=1.02, c0_bound=1.0)
        assert solution.c0_ok
        assert not synthetic_solution(sup_log_h=1.02, c0_bound=1.0, c0_slack=1.01).c0_ok
        assert SweepThresholds().bounded([0.6, 0.61, 0.62, 0.62])
        assert SweepThresholds(c0_slack=1.05).bounded([1.0, 1.02, 1.03, 1.04])
        assert not SweepThresholds(c0_slack=1.01).bounded([1.0, 1.02, 1.03, 1.04])
        assert not SweepThresholds(tail=2, c0_slack=1.01).bounded([1.0, 1.02, 1.03, 1.05])
        assert SweepThresholds().bounded([3.0])

    def test_identity_audit(self):
        """Solutions that fail the identity audit are tagged and make the sweep inconclusive."""
        good = synthetic_solution()
        assert good.audit_ok and good.accepted and good.tag is None
        bad = synthetic_solution(identity_audit=1.0, audit_tolerance=1e-3)
        assert bad.converged
        assert not bad.audit_ok
        assert not bad.accepted
        assert bad.tag == Verdict.INCONCLUSIVE.value
        assert bad.to_dict()['audit_ok'] is False
        row = dict(eps=0.5, sup_log_h=0.1, eps_times_sup=0.05, he_residual=0.05, l2_log_h=0.1)
        verdict, reason = classify(None, None, None, [bad], [row], [], SweepThresholds(), 0.0, {})
        assert verdict == Verdict.INCONCLUSIVE
        assert 'identity audit' in reason

    def test_exceptions(self):
        """Solver errors carry their diagnostics."""
        error = ConvergenceError("no convergence", history=[1.0, 0.5])
        assert isinstance(error, SolverError)
        assert error.history == [1.0, 0.5]
        assert not issubclass(ConfigurationError, SolverError)

    def test_resolve_threads(self):
        """The thread count comes from the option, the environment or the configuration."""
        with PatchedItem(os.environ, THREADS_VARIABLE, ''):
            assert resolve_threads() == 1
            assert resolve_threads(None, 2) == 2
            assert resolve_threads('3', 2) == 3
            self.assertRaises(ValueError, resolve_threads, '0')
        with PatchedItem(os.environ, THREADS_VARIABLE, '4'):
            assert resolve_threads(None, 2) == 4

    def test_map_concurrent(self):
        """Results come back in the order of the arguments."""
        assert map_concurrent(abs, [-1, -2, 3]) == [1, 2, 3]
        assert map_concurrent(abs, [-1, -2, 3], concurrency=2) == [1, 2, 3]
        assert set(parallel.__all__) >= {'map_concurrent', 'resolve_threads'}

    def test_parse_config(self):
        """Configurations are validated field by field."""
        document = dict(experiment='assumptions', model=dict(kind='flat_torus', nodes_per_side=8),
                        bundle=dict(preset='line_flat'))
        config = parse_config(document)
        assert config.model['period'] == 1.0
        assert config.parameters['semistable'] == 1e-3
        for mutation, path in ((dict(bogus=1), 'bogus'),
                               (dict(parameters=dict(bogus=1)), 'parameters.bogus'),
                               (dict(model=dict(kind='flat_torus', nodes=8)), 'model.nodes'),
                               (dict(experiment='bogus'), 'experiment'),
                               (dict(bundle=dict(preset='bogus')), 'bundle.preset'),
                               (dict(parameters=dict(epsilons=[0.1, 0.2])), 'parameters.epsilons'),
                               (dict(parameters=dict(via='bogus')), 'parameters.via')):
            try:
                parse_config(dict(document, **mutation))
                assert False, "Expected ConfigurationError for %s!" % path
            except ConfigurationError as e:
                assert path in str(e)

    def test_format_cell(self):
        """CSV cells use a locale independent round trip format."""
        assert format_cell(0.1) == '0.10000000000000001'
        assert format_cell(3) == '3'
        assert format_cell(True) == 'true'
        assert format_cell(None) == ''

    def test_assumptions_experiment(self):
        """The assumptions experiment reports the seeded randomized checks."""
        with TemporaryDirectory() as directory:
            config = parse_config(dict(experiment='assumptions', model=dict(kind='flat_torus', nodes_per_side=8),
                                       bundle=dict(preset='nilpotent_higgs(1, 1)'),
                                       parameters=dict(samples=3), seed=5))
            report = execute_experiment(config, output=directory)
            assert report['psi_domination_ok']
            assert report['higgs_positivity_ok']
            with open(os.path.join(directory, 'random_checks.csv')) as handle:
                assert len(list(csv.reader(handle))) == 4
            with open(os.path.join(directory, 'manifest.json')) as handle:
                manifest = json.load(handle)
            assert manifest['seed'] == 5
            assert manifest['tolerances']['hermitian'] == 1e-10

    def test_poisson_experiment(self):
        """The poisson experiment checks the Helmholtz bounds."""
        with TemporaryDirectory() as directory:
            config = parse_config(dict(experiment='poisson', model=dict(kind='flat_torus', nodes_per_side=8),
                                       bundle=dict(preset='line_flat'), parameters=dict(source='cosine')))
            report = execute_experiment(config, output=directory)
            assert report['bounds_ok']
            assert os.path.isfile(os.path.join(directory, 'poisson_limit.csv'))

    def test_flow_experiment(self):
        """The flow experiment writes monitors and the contraction trace."""
        with TemporaryDirectory() as directory:
            config = parse_config(dict(experiment='flow', model=dict(kind='flat_torus', nodes_per_side=8),
                                       bundle=dict(preset='nilpotent_higgs(1, 1)'),
                                       parameters=dict(max_steps=20)))
            report = execute_experiment(config, output=directory)
            assert report['steps'] <= 20
            assert report['monotone']
            with open(os.path.join(directory, 'flow_monitors.csv')) as handle:
                assert len(list(csv.reader(handle))) == report['steps'] + 2
            assert os.path.isfile(os.path.join(directory, 'contraction.csv'))

    def test_stability_experiment(self):
        """Presets without candidates can't be compared."""
        with TemporaryDirectory() as directory:
            document = dict(experiment='stability', model=dict(kind='cusp_cylinder', radial_nodes=12, angular_nodes=8),
                            bundle=dict(preset='split_pair(1)'), output=directory)
            report = execute_experiment(parse_config(document))
            assert report['verdict'] == 'UNSTABLE'
            assert run_experiment(parse_config(dict(document, bundle=dict(preset='line_flat')))) == EXIT_CONFIGURATION

    def test_determinism(self):
        """Repeated runs with the same seed produce identical CSV files."""
        contents = []
        with TemporaryDirectory() as directory:
            for name in ('first', 'second'):
                config = parse_config(dict(experiment='identity', model=dict(kind='flat_torus', nodes_per_side=8),
                                           bundle=dict(preset='line_flat'), seed=11))
                assert run_experiment(config, output=os.path.join(directory, name)) == EXIT_SUCCESS
                with open(os.path.join(directory, name, 'identity.csv')) as handle:
                    contents.append(handle.read())
        assert contents[0] == contents[1]
        assert len(contents[0].splitlines()) == 3

    def test_cli_usage(self):
        """The command line interface shows its usage message."""
        exit_code, output = run_cli(main, '--help')
        assert exit_code == 0
        assert 'Usage:' in output
        exit_code, output = run_cli(main, '--bogus-option')
        assert exit_code == EXIT_CONFIGURATION
        exit_code, output = run_cli(main, 'bogus-command', 'config.json')
        assert exit_code == EXIT_CONFIGURATION

    def test_cli_unknown_experiment(self):
        """Unknown experiment names make the program exit with status 2."""
        with TemporaryDirectory() as directory:
            filename = self.write_config(directory, dict(experiment='bogus', model=dict(kind='flat_torus'),
                                                         bundle=dict(preset='line_flat')))
            exit_code, output = run_cli(main, 'run', filename)
            assert exit_code == EXIT_CONFIGURATION

    def test_cli_sweep(self):
        """The sweep command classifies the trivial split pair as semistable."""
        with TemporaryDirectory() as directory:
            filename = self.write_config(directory, dict(
                experiment='assumptions',
                model=dict(kind='cusp_cylinder', radial_nodes=12, angular_nodes=8),
                bundle=dict(preset='split_pair(0)'),
                parameters=dict(epsilons=[0.5, 0.25, 0.125, 0.0625]),
            ))
            output_directory = os.path.join(directory, 'out')
            exit_code, output = run_cli(main, 'sweep', filename, '--out', output_directory)
            assert exit_code == EXIT_SUCCESS
            with open(os.path.join(output_directory, 'report.json')) as handle:
                assert json.load(handle)['verdict'] == 'SEMISTABLE'
            assert os.path.isfile(os.path.join(output_directory, 'sweep.csv'))
