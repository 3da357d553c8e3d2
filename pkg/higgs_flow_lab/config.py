# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Experiment configuration files.

Experiments are described by JSON documents like this one:

.. code-block:: json

   {
     "experiment": "sweep",
     "model": {"kind": "cusp_cylinder", "tau_max": 4, "radial_nodes": 16, "angular_nodes": 16},
     "bundle": {"preset": "split_pair(1)"},
     "parameters": {"epsilons": [0.5, 0.25, 0.125, 0.0625]},
     "output": "results/split-pair",
     "seed": 42
   }

Unknown fields are rejected (the error names the dotted path of the field)
and every parameter that isn't given takes its value from
:data:`DEFAULT_PARAMETERS`.
"""

# Standard library modules.
import copy
import json
import logging
import numbers

# External dependencies.
from humanfriendly.text import compact
from property_manager import PropertyManager, mutable_property, required_property

# Modules included in our package.
from higgs_flow_lab.continuation import SOLVERS
from higgs_flow_lab.exceptions import ConfigurationError
from higgs_flow_lab.flow import STEP_POLICIES, STEPPERS
from higgs_flow_lab.geometry import ModelKind, build_cusp_cylinder, build_flat_torus
from higgs_flow_lab.presets import build_preset, coerce_preset

EXPERIMENTS = ('assumptions', 'poisson', 'flow', 'perturbed', 'sweep', 'identity', 'stability')
"""The names of the supported experiments (a tuple of strings)."""

TOP_LEVEL_FIELDS = ('experiment', 'model', 'bundle', 'parameters', 'output', 'seed', 'threads', 'time_limit')
"""The fields allowed at the top level of a configuration (a tuple of strings)."""

MODEL_FIELDS = {
    ModelKind.FLAT_TORUS.value: dict(dimension=1, period=1.0, nodes_per_side=32),
    ModelKind.CUSP_CYLINDER.value: dict(tau_max=4.0, radial_nodes=16, angular_nodes=16),
}
"""The fields (and their defaults) of the ``model`` block per model kind (a dictionary)."""

BUNDLE_FIELDS = ('preset', 'params')
"""The fields allowed in the ``bundle`` block (a tuple of strings)."""

DEFAULT_PARAMETERS = dict(
    epsilon=0.5,
    epsilons=[2.0 ** -k for k in range(1, 11)],
    via='relaxation',
    stepper='explicit',
    step_policy='cfl',
    cfl=0.2,
    time_step=None,
    stop_tolerance=None,
    max_time=50.0,
    max_steps=200000,
    relaxation_shift=None,
    levels=None,
    normalize=True,
    source='bump',
    samples=8,
    margin=None,
    stable_factor=1e-6,
    semistable=1e-3,
    unstable=1e-2,
    cluster_gap=0.3,
    tail=4,
    c0_slack=1.05,
    invariance=1e-3,
)
"""Default values of the ``parameters`` block (a dictionary)."""

# Public identifiers that require documentation.
__all__ = (
    'BUNDLE_FIELDS',
    'DEFAULT_PARAMETERS',
    'EXPERIMENTS',
    'MODEL_FIELDS',
    'TOP_LEVEL_FIELDS',
    'ExperimentConfig',
    'build_manifold',
    'load_config',
    'logger',
    'parse_config',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


class ExperimentConfig(PropertyManager):

    """A validated experiment configuration."""

    repr_properties = ('experiment', 'model', 'bundle', 'seed')

    @required_property
    def experiment(self):
        """The name of the experiment (one of the strings in :data:`EXPERIMENTS`)."""

    @required_property
    def model(self):
        """The ``model`` block with defaults filled in (a dictionary)."""

    @required_property
    def bundle(self):
        """The ``bundle`` block (a dictionary with the keys ``preset`` and ``params``)."""

    @mutable_property
    def parameters(self):
        """The ``parameters`` block merged with :data:`DEFAULT_PARAMETERS` (a dictionary)."""
        return copy.deepcopy(DEFAULT_PARAMETERS)

    @mutable_property
    def output(self):
        """The output directory (a string, defaults to ``higgs-flow-lab-output``)."""
        return 'higgs-flow-lab-output'

    @mutable_property
    def seed(self):
        """The seed of all randomized checks (an integer, defaults to 0)."""
        return 0

    @mutable_property
    def threads(self):
        """The number of worker processes requested by the configuration (an integer or :data:`None`)."""

    @mutable_property
    def time_limit(self):
        """A wall clock limit in seconds (a number or :data:`None`)."""

    def build_manifold(self):
        """
        Build the model manifold described by :attr:`model`.

        :returns: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
        :raises: :exc:`.ConfigurationError` when the model arguments are invalid.
        """
        try:
            return build_manifold(self.model)
        except ValueError as e:
            raise ConfigurationError("Invalid value in field 'model'! (%s)" % e)

    def build_preset(self, manifold):
        """
        Build the bundle preset described by :attr:`bundle`.

        :param manifold: The result of :meth:`build_manifold()`.
        :returns: A :class:`~higgs_flow_lab.presets.BundlePreset` object.
        :raises: :exc:`.ConfigurationError` when the preset can't be built.
        """
        try:
            return build_preset(manifold, self.bundle['preset'], self.bundle['params'])
        except ValueError as e:
            raise ConfigurationError("Invalid value in field 'bundle.preset'! (%s)" % e)

    def to_dict(self):
        """Convert the configuration to a dictionary (for the run manifest)."""
        return dict(experiment=self.experiment, model=dict(self.model), bundle=dict(self.bundle),
                    parameters=dict(self.parameters), output=self.output, seed=self.seed,
                    threads=self.threads, time_limit=self.time_limit)


def build_manifold(model):
    """
    Build a model manifold from a validated ``model`` block.

    :param model: A dictionary like :attr:`ExperimentConfig.model`.
    :returns: A :class:`~higgs_flow_lab.geometry.GridManifold` object.
    :raises: :exc:`~exceptions.ValueError` when the grid arguments are invalid.
    """
    if model['kind'] == ModelKind.FLAT_TORUS.value:
        return build_flat_torus(model['dimension'], model['period'], model['nodes_per_side'])
    return build_cusp_cylinder(model['tau_max'], model['radial_nodes'], model['angular_nodes'])


def load_config(filename):
    """
    Load an experiment configuration from a JSON file.

    :param filename: The pathname of the JSON file (a string).
    :returns: An :class:`ExperimentConfig` object.
    :raises: :exc:`.ConfigurationError` when the file can't be read, isn't
             valid JSON or doesn't match the schema.
    """
    try:
        with open(filename) as handle:
            document = json.load(handle)
    except (IOError, OSError) as e:
        raise ConfigurationError("Failed to read configuration file %s! (%s)" % (filename, e))
    except ValueError as e:
        raise ConfigurationError("Configuration file %s doesn't contain valid JSON! (%s)" % (filename, e))
    logger.debug("Loaded configuration from %s.", filename)
    return parse_config(document)


def parse_config(document):
    """
    Validate a configuration document.

    :param document: A dictionary (decoded JSON).
    :returns: An :class:`ExperimentConfig` object.
    :raises: :exc:`.ConfigurationError` naming the dotted path of the first offending field.
    """
    require_mapping(document, 'configuration')
    reject_unknown(document, TOP_LEVEL_FIELDS, '')
    for name in ('experiment', 'model', 'bundle'):
        if name not in document:
            raise ConfigurationError("Missing required field '%s'!" % name)
    experiment = document['experiment']
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(compact("""
            Invalid value for field 'experiment'! ({value!r} is not one of {known})
        """, value=experiment, known=', '.join(EXPERIMENTS)))
    model = parse_model(document['model'])
    bundle = document['bundle']
    require_mapping(bundle, 'bundle')
    reject_unknown(bundle, BUNDLE_FIELDS, 'bundle')
    if 'preset' not in bundle:
        raise ConfigurationError("Missing required field 'bundle.preset'!")
    try:
        coerce_preset(bundle['preset'], bundle.get('params'))
    except ValueError as e:
        raise ConfigurationError("Invalid value for field 'bundle.preset'! (%s)" % e)
    parameters = copy.deepcopy(DEFAULT_PARAMETERS)
    given = document.get('parameters', {})
    require_mapping(given, 'parameters')
    reject_unknown(given, tuple(DEFAULT_PARAMETERS), 'parameters')
    parameters.update(given)
    check_parameters(parameters)
    options = dict(experiment=experiment, model=model,
                   bundle=dict(preset=bundle['preset'], params=dict(bundle.get('params') or {})),
                   parameters=parameters)
    for name, kind in (('output', str), ('seed', numbers.Integral), ('threads', numbers.Integral),
                       ('time_limit', numbers.Number)):
        if document.get(name) is not None:
            if not isinstance(document[name], kind) or isinstance(document[name], bool):
                raise ConfigurationError("Invalid value for field '%s'! (%r)" % (name, document[name]))
            options[name] = document[name]
    return ExperimentConfig(**options)


def parse_model(block):
    """Validate the ``model`` block and fill in defaults."""
    require_mapping(block, 'model')
    kind = block.get('kind')
    if kind not in MODEL_FIELDS:
        raise ConfigurationError(compact("""
            Invalid value for field 'model.kind'! ({value!r} is not one of {known})
        """, value=kind, known=', '.join(sorted(MODEL_FIELDS))))
    defaults = MODEL_FIELDS[kind]
    reject_unknown(block, ('kind',) + tuple(defaults), 'model')
    model = dict(defaults, kind=kind)
    for name, value in block.items():
        if name != 'kind' and (not isinstance(value, numbers.Number) or isinstance(value, bool)):
            raise ConfigurationError("Invalid value for field 'model.%s', expected a number! (%r)" % (name, value))
        model[name] = value
    return model


def check_parameters(parameters):
    """Validate the types of the merged ``parameters`` block."""
    epsilons = parameters['epsilons']
    if not isinstance(epsilons, list) or not all(isinstance(e, numbers.Number) for e in epsilons):
        raise ConfigurationError("Invalid value for field 'parameters.epsilons', expected a list of numbers!")
    if not epsilons or any(e <= 0 for e in epsilons) or any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ConfigurationError("Invalid value for field 'parameters.epsilons', expected decreasing positive numbers!")
    for name, choices in (('via', SOLVERS), ('stepper', STEPPERS), ('step_policy', STEP_POLICIES)):
        if parameters[name] not in choices:
            raise ConfigurationError(compact("""
                Invalid value for field 'parameters.{name}'! ({value!r} is not one of {known})
            """, name=name, value=parameters[name], known=', '.join(choices)))
    if parameters['levels'] is not None and not isinstance(parameters['levels'], list):
        raise ConfigurationError("Invalid value for field 'parameters.levels', expected a list of numbers!")
    if parameters['source'] not in ('bump', 'cosine', 'zero'):
        raise ConfigurationError("Invalid value for field 'parameters.source'! (%r)" % parameters['source'])
    for name in ('epsilon', 'cfl', 'max_time', 'stable_factor', 'semistable', 'unstable', 'cluster_gap', 'c0_slack',
                 'invariance'):
        value = parameters[name]
        if not isinstance(value, numbers.Number) or isinstance(value, bool) or value < 0:
            raise ConfigurationError("Invalid value for field 'parameters.%s'! (%r)" % (name, value))


def require_mapping(value, path):
    """Raise :exc:`.ConfigurationError` unless `value` is a dictionary."""
    if not isinstance(value, dict):
        raise ConfigurationError("Invalid value for field '%s', expected an object! (%r)" % (path, value))


def reject_unknown(block, allowed, path):
    """Raise :exc:`.ConfigurationError` for the first key of `block` that isn't in `allowed`."""
    for key in sorted(block):
        if key not in allowed:
            dotted = '%s.%s' % (path, key) if path else key
            raise ConfigurationError("Unknown configuration field '%s'!" % dotted)
