# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""
Usage: higgs-flow-lab [OPTIONS] COMMAND CONFIG.json [CONFIG.json ..]

The higgs-flow-lab program runs numerical experiments on Higgs bundles over
model Hermitian manifolds (a flat torus and a truncated cusp cylinder): it
solves the perturbed Hermitian-Einstein equations by heat flow, continues
them in the perturbation parameter and classifies preset bundles as stable,
semistable or unstable.

Supported commands:

  run

    Run the experiment named by each configuration file.

  check-assumptions

    Verify the standing assumptions on the model of each configuration file
    (the experiment named in the file is ignored).

  sweep

    Run the perturbation sweep and stability classification on the model
    and bundle of each configuration file.

Supported options:

  -o, --out=DIRECTORY

    Write the artifacts to DIRECTORY instead of the directory named in the
    configuration. When multiple configuration files are given each
    experiment gets a subdirectory named after its configuration file.

  -s, --seed=N

    Override the seed of the randomized checks.

  -t, --threads=N

    Use N worker processes (overrides $HIGGS_FLOW_LAB_THREADS and the
    configuration). Multiple configuration files are run in parallel.

  -v, --verbose

    Increase logging verbosity (can be repeated).

  -q, --quiet

    Decrease logging verbosity (can be repeated).

  -h, --help

    Show this message and exit.

Exit codes: 0 on success (INCONCLUSIVE verdicts are results, not failures),
1 on unexpected errors, 2 on configuration errors, 3 on solver failures.
"""

# Standard library modules.
import getopt
import json
import logging
import os
import sys

# External dependencies.
import coloredlogs
from humanfriendly.tables import format_smart_table
from humanfriendly.terminal import output, usage, warning

# Modules included in our package.
from higgs_flow_lab.config import load_config
from higgs_flow_lab.exceptions import ConfigurationError
from higgs_flow_lab.experiments import EXIT_CONFIGURATION, EXIT_FAILURE, EXIT_SUCCESS, run_experiment
from higgs_flow_lab.parallel import map_concurrent, resolve_threads

COMMANDS = {'run': None, 'check-assumptions': 'assumptions', 'sweep': 'sweep'}
"""A dictionary that maps commands to the experiment they force (:data:`None` keeps the configured one)."""

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


def main():
    """Command line interface for the ``higgs-flow-lab`` program."""
    # Initialize logging to the terminal.
    coloredlogs.install()
    # Command line option defaults.
    out = None
    seed = None
    threads = None
    # Parse the command line arguments.
    try:
        options, arguments = getopt.gnu_getopt(sys.argv[1:], 'o:s:t:vqh', [
            'out=', 'seed=', 'threads=', 'verbose', 'quiet', 'help',
        ])
        for option, value in options:
            if option in ('-o', '--out'):
                out = value
            elif option in ('-s', '--seed'):
                seed = int(value)
            elif option in ('-t', '--threads'):
                threads = resolve_threads(value)
            elif option in ('-v', '--verbose'):
                coloredlogs.increase_verbosity()
            elif option in ('-q', '--quiet'):
                coloredlogs.decrease_verbosity()
            elif option in ('-h', '--help'):
                usage(__doc__)
                return
            else:
                assert False, "Unhandled option!"
        if not arguments:
            usage(__doc__)
            return
        command, filenames = arguments[0], arguments[1:]
        if command not in COMMANDS:
            raise Exception("Unknown command %r! (supported commands are %s)" % (command, ', '.join(sorted(COMMANDS))))
        if not filenames:
            raise Exception("The %s command expects at least one configuration file!" % command)
    except Exception as e:
        warning("Error: Failed to parse command line arguments! (%s)" % e)
        sys.exit(EXIT_CONFIGURATION)
    # Run the requested experiment(s).
    try:
        jobs = []
        for filename in filenames:
            config = load_config(filename)
            if COMMANDS[command]:
                config.experiment = COMMANDS[command]
            directory = out
            if out and len(filenames) > 1:
                directory = os.path.join(out, os.path.splitext(os.path.basename(filename))[0])
            jobs.append((config, directory, seed, threads))
    except ConfigurationError as e:
        warning("Error: %s" % e)
        sys.exit(EXIT_CONFIGURATION)
    try:
        codes = run_jobs(jobs, threads)
        for (config, directory, _, _), code in zip(jobs, codes):
            if code == EXIT_SUCCESS:
                report_summary(directory or config.output)
    except Exception:
        logger.exception("Encountered unexpected exception! Aborting ..")
        sys.exit(EXIT_FAILURE)
    sys.exit(max(codes))


def run_jobs(jobs, threads):
    """
    Run one or more experiments.

    :param jobs: A list of ``(config, directory, seed, threads)`` tuples.
    :param threads: The value of the ``--threads`` option (optional).
    :returns: A list of exit codes.

    Multiple experiments are distributed over a process pool (each of them
    then solves its own exhaustion levels serially).
    """
    if len(jobs) > 1:
        concurrency = resolve_threads(threads)
        if concurrency > 1:
            return map_concurrent(run_job, [(c, d, s, 1) for c, d, s, _ in jobs], concurrency)
    return [run_job(job) for job in jobs]


def run_job(arguments):
    """Run a single experiment (for :func:`~higgs_flow_lab.parallel.map_concurrent()`)."""
    config, directory, seed, threads = arguments
    return run_experiment(config, output=directory, seed=seed, threads=threads)


def report_summary(directory):
    """Print the scalar fields of a ``report.json`` file to the terminal."""
    with open(os.path.join(directory, 'report.json')) as handle:
        report = json.load(handle)
    data = []
    for name in sorted(report):
        value = report[name]
        if isinstance(value, float):
            data.append([name, '%.6g' % value])
        elif isinstance(value, (bool, int, str)) or value is None:
            data.append([name, 'n/a' if value is None else str(value)])
    output("Results of the %s experiment (artifacts in %s):", report.get('experiment'), directory)
    output(format_smart_table(data, column_names=["Field", "Value"]))
