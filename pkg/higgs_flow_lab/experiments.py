# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Experiment pipelines and their artifacts.

Every experiment writes the following files to its output directory:

``report.json``
 The results of the experiment (verdicts, residuals, bounds).

``manifest.json``
 The effective configuration, every tolerance and threshold that was used
 and the versions of the numerical stack.

``*.csv``
 One table per monitor (for example ``flow_monitors.csv`` or ``sweep.csv``).
 Floats are written with ``%.17g`` so that repeated runs of the same
 configuration and seed produce byte identical numeric columns.
"""

# Standard library modules.
import contextlib
import csv
import enum
import json
import logging
import math
import numbers
import os
import platform

# External dependencies.
import numpy as np
import scipy
from humanfriendly import Timer
from humanfriendly.text import pluralize
from property_manager import PropertyManager, lazy_property, required_property
from stopit import SignalTimeout, TimeoutException

# Modules included in our package.
from higgs_flow_lab import HERMITIAN_TOLERANCE, __version__
from higgs_flow_lab.analysis import MARGIN_FACTOR, analytic_degree, identity_terms, stability_verdict
from higgs_flow_lab.bundle import (
    CONDITIONING_FLOOR,
    PSI_SWITCH,
    dbar_theta,
    endo_exp,
    higgs_positivity,
    holomorphy_residuals,
    identity_field,
    psi_domination_ratio,
)
from higgs_flow_lab.config import build_manifold
from higgs_flow_lab.continuation import (
    TRACE_CONDITION_TOLERANCE,
    SweepThresholds,
    epsilon_sweep_classify,
    solve_perturbed_he,
)
from higgs_flow_lab.exceptions import ConfigurationError, SolverError
from higgs_flow_lab.flow import MONITOR_FIELDS, MONOTONICITY_SLACK, FlowConfig, contraction_trace, run_flow
from higgs_flow_lab.geometry import GAUDUCHON_TOLERANCE, integrate, verify_assumptions
from higgs_flow_lab.parallel import resolve_threads
from higgs_flow_lab.poisson import (
    CAUCHY_TOLERANCE,
    MAX_HALVINGS,
    SOLVER_TOLERANCE,
    conformal_trace_normalize,
    solve_helmholtz,
    solve_poisson_noncompact,
)

HELMHOLTZ_EPSILONS = (1.0, 0.5, 0.1)
"""The values of ``ε`` at which the Helmholtz a priori bounds are checked (a tuple of floats)."""

CONTRACTION_STEPS = 200
"""The number of lock step flow steps recorded by the contraction monitor (an integer)."""

PROFILE_MODES = 2
"""The number of Fourier modes of the random profiles used by randomized checks (an integer)."""

EXIT_SUCCESS = 0
"""Exit code of successful experiments (including INCONCLUSIVE verdicts)."""

EXIT_FAILURE = 1
"""Exit code of unexpected errors."""

EXIT_CONFIGURATION = 2
"""Exit code of configuration (and usage) errors."""

EXIT_SOLVER = 3
"""Exit code of solver failures and experiments that exceed their time limit."""

# Public identifiers that require documentation.
__all__ = (
    'CONTRACTION_STEPS',
    'EXIT_CONFIGURATION',
    'EXIT_FAILURE',
    'EXIT_SOLVER',
    'EXIT_SUCCESS',
    'HELMHOLTZ_EPSILONS',
    'PIPELINES',
    'PROFILE_MODES',
    'ExperimentContext',
    'draw_profile',
    'evaluate_profile',
    'execute_experiment',
    'logger',
    'run_experiment',
    'source_field',
    'write_csv',
    'write_json',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)

# Stop the `stopit' logger from logging tracebacks.
logging.getLogger('stopit').setLevel(logging.ERROR)


class ExperimentContext(PropertyManager):

    """The objects shared by the stages of one experiment (built lazily)."""

    repr_properties = ('config', 'seed', 'threads')

    @required_property
    def config(self):
        """The :class:`~higgs_flow_lab.config.ExperimentConfig` object."""

    @required_property
    def seed(self):
        """The effective seed (an integer)."""

    @required_property
    def threads(self):
        """The effective number of worker processes (an integer)."""

    @lazy_property
    def parameters(self):
        """The merged ``parameters`` block of the configuration (a dictionary)."""
        return self.config.parameters

    @lazy_property(repr=False)
    def manifold(self):
        """The :class:`~higgs_flow_lab.geometry.GridManifold` of the experiment."""
        return self.config.build_manifold()

    @lazy_property(repr=False)
    def preset(self):
        """The :class:`~higgs_flow_lab.presets.BundlePreset` of the experiment."""
        return self.config.build_preset(self.manifold)

    @property
    def bundle(self):
        """The :class:`~higgs_flow_lab.bundle.HiggsBundle` of the preset."""
        return self.preset.bundle

    @lazy_property(repr=False)
    def reference(self):
        """The trace normalized metric ``K`` (:data:`None` when ``parameters.normalize`` is off)."""
        if not self.parameters['normalize']:
            return None
        _, reference = conformal_trace_normalize(self.manifold, self.bundle)
        return reference

    @lazy_property
    def slope(self):
        """The constant ``λ`` computed with :attr:`reference` (a float)."""
        return analytic_degree(self.manifold, self.bundle, self.reference)[1]

    @lazy_property(repr=False)
    def random(self):
        """A :class:`numpy.random.Generator` seeded with :attr:`seed`."""
        return np.random.default_rng(self.seed)

    @lazy_property(repr=False)
    def thresholds(self):
        """The :class:`~higgs_flow_lab.continuation.SweepThresholds` of the ``parameters`` block."""
        p = self.parameters
        return SweepThresholds(stable_factor=p['stable_factor'], semistable=p['semistable'],
                               unstable=p['unstable'], cluster_gap=p['cluster_gap'],
                               tail=int(p['tail']), c0_slack=p['c0_slack'],
                               invariance=p['invariance'])

    def flow_config(self, stepper=None):
        """
        Create the :class:`~higgs_flow_lab.flow.FlowConfig` of the ``parameters`` block.

        :param stepper: Overrides ``parameters.stepper`` (a string or :data:`None`).
        :raises: :exc:`.ConfigurationError` when the flow parameters are invalid.
        """
        p = self.parameters
        config = FlowConfig(step_policy=p['step_policy'], cfl=p['cfl'], time_step=p['time_step'],
                            stop_tolerance=p['stop_tolerance'], max_time=p['max_time'],
                            max_steps=int(p['max_steps']), relaxation_shift=p['relaxation_shift'],
                            stepper=stepper or p['stepper'])
        try:
            config.validate()
        except ValueError as e:
            raise ConfigurationError("Invalid flow parameters! (%s)" % e)
        return config

    def solver_config(self):
        """The flow configuration that matches ``parameters.via``."""
        via = self.parameters['via']
        if via == 'relaxation':
            return self.flow_config('preconditioned')
        if via == 'flow':
            return self.flow_config('explicit')
        return self.flow_config()


def run_experiment(config, output=None, seed=None, threads=None):
    """
    Run an experiment and map the outcome to an exit code.

    :param config: An :class:`~higgs_flow_lab.config.ExperimentConfig` object.
    :param output: Overrides the output directory of the configuration (a string).
    :param seed: Overrides the seed of the configuration (an integer).
    :param threads: The value of the ``--threads`` option (optional).
    :returns: One of :data:`EXIT_SUCCESS`, :data:`EXIT_CONFIGURATION` or
              :data:`EXIT_SOLVER`. Unexpected exceptions propagate.
    """
    try:
        execute_experiment(config, output=output, seed=seed, threads=threads)
        return EXIT_SUCCESS
    except ConfigurationError as e:
        logger.error("%s", e)
        return EXIT_CONFIGURATION
    except SolverError as e:
        logger.error("Solver failure in %s experiment! (%s)", config.experiment, e)
        return EXIT_SOLVER
    except TimeoutException:
        logger.error("The %s experiment exceeded its time limit of %s seconds!",
                     config.experiment, config.time_limit)
        return EXIT_SOLVER


def execute_experiment(config, output=None, seed=None, threads=None):
    """
    Run an experiment and write its artifacts.

    :param config: An :class:`~higgs_flow_lab.config.ExperimentConfig` object.
    :param output: Overrides the output directory of the configuration (a string).
    :param seed: Overrides the seed of the configuration (an integer).
    :param threads: The value of the ``--threads`` option (optional).
    :returns: The report (a dictionary, as written to ``report.json``).
    :raises: :exc:`.ConfigurationError`, :exc:`.SolverError` or
             :exc:`stopit.TimeoutException`.
    """
    try:
        threads = resolve_threads(threads, config.threads)
    except ValueError as e:
        raise ConfigurationError(str(e))
    context = ExperimentContext(config=config, seed=config.seed if seed is None else int(seed), threads=threads)
    directory = output or config.output
    timer = Timer()
    logger.info("Running %s experiment (output in %s) ..", config.experiment, directory)
    with time_limit(config.time_limit):
        report, tables = PIPELINES[config.experiment](context)
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise ConfigurationError("Failed to create output directory %s! (%s)" % (directory, e))
    files = ['report.json', 'manifest.json']
    for name in sorted(tables):
        fields, rows = tables[name]
        write_csv(os.path.join(directory, name), fields, rows)
        files.append(name)
    write_json(os.path.join(directory, 'report.json'), dict(report, experiment=config.experiment))
    write_json(os.path.join(directory, 'manifest.json'), build_manifest(context, files))
    logger.info("Finished %s experiment in %s (wrote %s).", config.experiment, timer,
                pluralize(len(files), "file"))
    return report


def time_limit(seconds):
    """A :class:`stopit.SignalTimeout` context (or a no-op when `seconds` is :data:`None`)."""
    if seconds:
        return SignalTimeout(seconds, swallow_exc=False)
    return contextlib.nullcontext()


def run_assumptions(context):
    """Verify the standing assumptions and run the seeded Ψ-domination and positivity checks."""
    manifold, bundle = context.manifold, context.bundle
    report = verify_assumptions(manifold).to_dict()
    dbar_residual, wedge_residual = holomorphy_residuals(manifold, bundle)
    report.update(model=manifold.kind.value, holomorphy_residual=dbar_residual, integrability_residual=wedge_residual)
    rows = []
    for sample in range(int(context.parameters['samples'])):
        s = random_endomorphism(context, manifold, bundle.rank)
        gradient = dbar_theta(manifold, bundle, s)
        ratio, bound = psi_domination_ratio(manifold, s, gradient)
        positivity = higgs_positivity(manifold, bundle, endo_exp(s))
        rows.append(dict(sample=sample, psi_ratio=ratio, psi_bound=bound,
                         positivity_min=float(positivity.min()),
                         psi_ok=ratio <= bound * (1 + 1e-9),
                         positivity_ok=float(positivity.min()) >= -1e-9 * (1 + float(np.abs(positivity).max()))))
    report.update(psi_domination_ok=all(r['psi_ok'] for r in rows),
                  higgs_positivity_ok=all(r['positivity_ok'] for r in rows))
    fields = ('sample', 'psi_ratio', 'psi_bound', 'positivity_min', 'psi_ok', 'positivity_ok')
    return report, {'random_checks.csv': (fields, rows)}


def run_poisson(context):
    """Check the Helmholtz a priori bounds and compute the ``ε → 0`` Poisson limit."""
    manifold = context.manifold
    source = source_field(manifold, context.parameters['source'])
    sup_source = float(np.abs(source).max())
    rows = []
    for epsilon in HELMHOLTZ_EPSILONS:
        f, solve = solve_helmholtz(manifold, source, epsilon)
        sup_bound = sup_source / epsilon
        energy_bound = sup_source ** 2 * manifold.volume / epsilon
        rows.append(dict(epsilon=epsilon, sup_f=solve.sup_f, sup_bound=sup_bound, energy=solve.energy,
                         energy_bound=energy_bound, residual=solve.residual, iterations=solve.iterations,
                         bounds_ok=solve.sup_f <= sup_bound + 1e-8 and solve.energy <= energy_bound + 1e-6))
    _, limit = solve_poisson_noncompact(manifold, source)
    limit_rows = [dict(step.to_dict(), cauchy=limit.cauchy[i - 2] if i >= 2 else None)
                  for i, step in enumerate(limit.steps)]
    report = dict(model=manifold.kind.value, source=context.parameters['source'], sup_source=sup_source,
                  helmholtz=rows, bounds_ok=all(r['bounds_ok'] for r in rows), limit=limit.to_dict())
    return report, {
        'helmholtz.csv': (('epsilon', 'sup_f', 'sup_bound', 'energy', 'energy_bound', 'residual',
                           'iterations', 'bounds_ok'), rows),
        'poisson_limit.csv': (('epsilon', 'residual', 'sup_f', 'energy', 'iterations', 'cauchy'), limit_rows),
    }


def run_flow_experiment(context):
    """Integrate the perturbed flow and (for rank ≥ 2) the two-solution contraction monitor."""
    manifold, bundle, reference = context.manifold, context.bundle, context.reference
    epsilon = float(context.parameters['epsilon'])
    config = context.flow_config()
    start = identity_field(manifold.shape, bundle.rank) if reference is None else reference
    _, result = run_flow(manifold, bundle, start, epsilon, context.slope, config, reference)
    report = dict(model=manifold.kind.value, bundle=bundle.label, epsilon=epsilon, slope=context.slope,
                  stepper=config.stepper, converged=result.converged, steps=result.steps, time=result.time,
                  sup_phi=result.sup_phi, tolerance=result.tolerance, monotone=result.monotone,
                  c0_bound=result.c0_bound)
    tables = {'flow_monitors.csv': (MONITOR_FIELDS, result.history)}
    if bundle.rank >= 2 and config.stepper == 'explicit':
        perturbed = identity_field(manifold.shape, bundle.rank)
        perturbed[..., 0, 0] = 2.0
        perturbed[..., 1, 1] = 0.5
        trace_ = contraction_trace(manifold, bundle, identity_field(manifold.shape, bundle.rank), perturbed,
                                   epsilon, context.slope, config, steps=min(config.max_steps, CONTRACTION_STEPS))
        distances = [d for _, d in trace_]
        report['contraction_monotone'] = all(b <= a + MONOTONICITY_SLACK for a, b in zip(distances, distances[1:]))
        tables['contraction.csv'] = (('t', 'sup_sigma'), [dict(t=t, sup_sigma=d) for t, d in trace_])
    return report, tables


def run_perturbed(context):
    """Solve the perturbed equation at ``parameters.epsilon``."""
    p = context.parameters
    solution = solve_perturbed_he(context.manifold, context.bundle, context.reference, float(p['epsilon']),
                                  via=p['via'], config=context.solver_config(), slope=context.slope,
                                  levels=p['levels'], concurrency=context.threads,
                                  c0_slack=p['c0_slack'])
    row = solution.to_dict()
    report = dict(row, model=context.manifold.kind.value, bundle=context.bundle.label, via=p['via'],
                  slope=context.slope)
    return report, {'perturbed.csv': (tuple(row), [row])}


def run_sweep(context):
    """Run the ε-continuation and classify the bundle."""
    p = context.parameters
    outcome = epsilon_sweep_classify(context.manifold, context.bundle, context.reference, p['epsilons'],
                                     context.preset.candidates, thresholds=context.thresholds, via=p['via'],
                                     config=context.solver_config(), slope=context.slope)
    report = dict(outcome.to_dict(), model=context.manifold.kind.value, bundle=context.bundle.label)
    solution_rows = [s.to_dict() for s in outcome.solutions]
    return report, {
        'sweep.csv': (('eps', 'sup_log_h', 'eps_times_sup', 'he_residual', 'l2_log_h'), outcome.table),
        'sweep_solutions.csv': (tuple(solution_rows[0]) if solution_rows else (), solution_rows),
    }


def run_identity(context):
    """Audit the integral identity on the configured grid and (when possible) on a grid twice as coarse."""
    profile = draw_profile(context.random, context.manifold)
    matrix = random_hermitian(context.random, context.bundle.rank)
    rows = []
    for model in (coarsened(context.config.model), context.config.model):
        if model is None:
            continue
        manifold = build_manifold(model)
        preset = context.config.build_preset(manifold)
        s = evaluate_profile(manifold, profile)[..., None, None] * matrix
        lhs, rhs = identity_terms(manifold, preset.bundle, None, endo_exp(s))
        scale = 1 + abs(lhs) + abs(rhs)
        rows.append(dict(nodes=manifold.size, lhs=lhs, rhs=rhs, residual=abs(lhs - rhs), scale=scale,
                         relative=abs(lhs - rhs) / scale))
    report = dict(model=context.manifold.kind.value, bundle=context.bundle.label, levels=rows)
    if len(rows) == 2 and rows[1]['residual'] > 0:
        report['refinement_ratio'] = rows[0]['residual'] / rows[1]['residual']
    return report, {'identity.csv': (('nodes', 'lhs', 'rhs', 'residual', 'scale', 'relative'), rows)}


def run_stability(context):
    """Compare the slopes of the preset candidates with the slope of the bundle."""
    candidates = context.preset.candidates
    if not candidates:
        raise ConfigurationError("Preset %s has no candidate sub-objects to compare!" % context.bundle.label)
    degrees = stability_verdict(context.manifold, context.bundle, context.reference, candidates,
                                margin=context.parameters['margin'])
    rows = []
    for row, closed_form in zip(degrees.candidates, context.preset.candidate_degrees):
        rows.append(dict(row, closed_form_degree=closed_form))
    report = dict(degrees.to_dict(), model=context.manifold.kind.value, bundle=context.bundle.label,
                  closed_form_degree=context.preset.degree)
    fields = ('label', 'degree', 'closed_form_degree', 'rank', 'slope', 'penalty', 'invariance_defect')
    return report, {'degrees.csv': (fields, rows)}


PIPELINES = dict(
    assumptions=run_assumptions,
    poisson=run_poisson,
    flow=run_flow_experiment,
    perturbed=run_perturbed,
    sweep=run_sweep,
    identity=run_identity,
    stability=run_stability,
)
"""A dictionary that maps experiment names to functions returning ``(report, tables)`` tuples."""


def source_field(manifold, kind):
    """
    Create a real source with mean zero.

    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :param kind: One of the strings ``'bump'`` (a centered Gaussian minus its
                 mean), ``'cosine'`` (one Fourier mode along the first
                 periodic axis) or ``'zero'``.
    :returns: A numpy array with the grid shape.
    """
    if kind == 'zero':
        return np.zeros(manifold.shape)
    if kind == 'cosine':
        axis = manifold.periodic.index(True)
        return np.cos(2 * math.pi * manifold.coordinates[axis] / manifold.periods[axis])
    bump = np.ones(manifold.shape)
    for axis, coordinate in enumerate(manifold.coordinates):
        low, high = manifold.axes[axis][0], manifold.axes[axis][-1]
        width = 0.1 * (high - low)
        bump = bump * np.exp(-0.5 * ((coordinate - 0.5 * (low + high)) / width) ** 2)
    return bump - integrate(manifold, bump) / manifold.volume


def draw_profile(random, manifold, modes=PROFILE_MODES):
    """
    Draw the coefficients of a smooth random profile.

    :param random: A :class:`numpy.random.Generator` object.
    :param manifold: A :class:`~higgs_flow_lab.geometry.GridManifold` object
                     (only the number of axes is used, so the profile can be
                     evaluated on refinements of the same model).
    :param modes: The number of Fourier modes per periodic axis (an integer).
    :returns: A dictionary of numpy arrays.
    """
    ndim = len(manifold.shape)
    return dict(cosines=random.normal(size=(ndim, modes)) / 4,
                sines=random.normal(size=(ndim, modes)) / 4,
                centers=random.uniform(0.3, 0.7, size=ndim))


def evaluate_profile(manifold, profile):
    """
    Evaluate a profile from :func:`draw_profile()` on the nodes of a manifold.

    Periodic axes contribute a trigonometric polynomial, the other axes a
    Gaussian factor that decays towards the truncation rings.
    """
    total = np.zeros(manifold.shape)
    factor = np.ones(manifold.shape)
    for axis, coordinate in enumerate(manifold.coordinates):
        if manifold.periodic[axis]:
            phase = 2 * math.pi * coordinate / manifold.periods[axis]
            for k in range(profile['cosines'].shape[1]):
                total += profile['cosines'][axis, k] * np.cos((k + 1) * phase)
                total += profile['sines'][axis, k] * np.sin((k + 1) * phase)
        else:
            low, high = manifold.axes[axis][0], manifold.axes[axis][-1]
            position = (coordinate - low) / (high - low)
            factor = factor * np.exp(-((position - profile['centers'][axis]) / 0.2) ** 2)
    if not any(manifold.periodic):
        total += 1.0
    return total * factor


def random_hermitian(random, rank):
    """Draw a Hermitian ``rank × rank`` matrix with entries of order one half."""
    a = random.normal(size=(rank, rank)) + 1j * random.normal(size=(rank, rank))
    return (a + np.conj(a.T)) / 4


def random_endomorphism(context, manifold, rank):
    """Draw a smooth Hermitian endomorphism field from two random profiles."""
    s = np.zeros(manifold.shape + (rank, rank), dtype=complex)
    for _ in range(2):
        profile = evaluate_profile(manifold, draw_profile(context.random, manifold))
        s += profile[..., None, None] * random_hermitian(context.random, rank)
    return s


def coarsened(model):
    """The ``model`` block with half the nodes per axis (or :data:`None` when the grid would be too small)."""
    model = dict(model)
    keys = [k for k in ('nodes_per_side', 'radial_nodes', 'angular_nodes') if k in model]
    for key in keys:
        if model[key] % 4:
            return None
        model[key] //= 2
    try:
        build_manifold(model)
    except ValueError:
        return None
    return model


def build_manifest(context, files):
    """Collect the effective configuration, tolerances and versions of a run."""
    config = context.config
    manifest = dict(
        package='higgs-flow-lab',
        version=__version__,
        versions=dict(python=platform.python_version(), numpy=np.__version__, scipy=scipy.__version__),
        config=config.to_dict(),
        seed=context.seed,
        threads=context.threads,
        files=files,
        tolerances=dict(
            hermitian=HERMITIAN_TOLERANCE,
            gauduchon=GAUDUCHON_TOLERANCE,
            psi_switch=PSI_SWITCH,
            conditioning_floor=CONDITIONING_FLOOR,
            elliptic_solver=SOLVER_TOLERANCE,
            poisson_cauchy=CAUCHY_TOLERANCE,
            poisson_max_halvings=MAX_HALVINGS,
            monotonicity_slack=MONOTONICITY_SLACK,
            trace_condition=TRACE_CONDITION_TOLERANCE,
            margin_factor=MARGIN_FACTOR,
        ),
        thresholds=context.thresholds.to_dict(),
    )
    if config.experiment in ('flow', 'perturbed', 'sweep'):
        flow = context.flow_config() if config.experiment == 'flow' else context.solver_config()
        manifest['flow'] = dict(stepper=flow.stepper, step_policy=flow.step_policy, cfl=flow.cfl,
                                time_step=flow.time_step, max_time=flow.max_time, max_steps=flow.max_steps,
                                min_time_step=flow.min_time_step, relaxation_shift=flow.relaxation_shift,
                                stop_tolerance=flow.effective_tolerance(context.slope))
    return manifest


def write_csv(filename, fields, rows):
    """
    Write a table as CSV (``,`` separated, ``.`` decimal point, no locale).

    :param filename: The pathname of the CSV file (a string).
    :param fields: The column names (an iterable of strings).
    :param rows: An iterable of dictionaries (missing keys become empty cells).
    """
    fields = list(fields)
    with open(filename, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(fields)
        for row in rows:
            writer.writerow([format_cell(row.get(name)) for name in fields])
    logger.debug("Wrote %s to %s.", pluralize(len(rows) if hasattr(rows, '__len__') else 0, "row"), filename)


def format_cell(value):
    """Render a single CSV cell."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return '%.17g' % float(value)
    return str(value)


def write_json(filename, document):
    """Write a JSON document with sorted keys (numpy values and enumerations are converted)."""
    with open(filename, 'w') as handle:
        json.dump(to_json(document), handle, indent=2, sort_keys=True)
        handle.write('\n')


def to_json(value):
    """Convert numpy values, enumerations and tuples to plain JSON values."""
    if isinstance(value, dict):
        return dict((str(k), to_json(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return to_json(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        return float(value)
    return value
