#!/usr/bin/env python3
"""
SYNOPSIS: Computes semi-Hilbertian operator quantities and verifies operator
          inequalities on seeded random instances.
"""

import argparse
import logging
import sys

from semi_hilbert_lab.commands import COMMANDS, EXIT_CONFIG, EXIT_DOMAIN, \
    QUANTITIES
from semi_hilbert_lab.errors import ConfigError, DOMAIN_ERRORS, \
    InconsistentTags, InvalidMatrix, LabError
from semi_hilbert_lab.matrix_io import load_json


def _int_list(text):
    """Parse a comma separated list of integers, as given to ``--dims``."""
    if isinstance(text, (list, tuple)):
        return [int(item) for item in text]
    try:
        return [int(item) for item in str(text).split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "'%s' is not a comma separated list of integers." % text)


def _parser():
    ARGS = argparse.ArgumentParser(
        prog='shlab',
        description="""Numerical laboratory for operators on semi-Hilbertian
        spaces: compute A-adjoints, A-seminorms and A-radii, and check
        operator inequalities on seeded random instances.""",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    ARGS.add_argument('--command',
                      choices=sorted(COMMANDS),
                      help="""The action to perform.""")
    ARGS.add_argument('--config',
                      help="""JSON file whose keys are flag names (dashes
                           replaced by underscores). Flags given on the
                           command line win over it.""")
    ARGS.add_argument('--verbose', '-v',
                      action='store_true',
                      help="""Log debugging output to standard error.""")

    inputs = ARGS.add_argument_group("inputs")
    inputs.add_argument('--matrix',
                        help="""JSON file with one operator or a list of
                             operators.""")
    inputs.add_argument('--context',
                        help="""JSON file with the positive operator A, or an
                             object with keys 'A' and 'tol'. Defaults to the
                             identity.""")
    inputs.add_argument('--input',
                        help="""Records (JSON lines) for 'report', or an
                             instance file for 'check'.""")
    inputs.add_argument('--quantity',
                        choices=QUANTITIES,
                        help="""The quantity 'compute' evaluates.""")

    params = ARGS.add_argument_group("parameters")
    params.add_argument('--alpha', type=float,
                        help="""Power of the A-modulus.""")
    params.add_argument('--p', type=float, default=2.0,
                        help="""Exponent of the generalized Euclidean
                             A-radius.""")
    params.add_argument('--q', type=float,
                        help="""Conjugate exponent, where one applies.""")
    params.add_argument('--r', type=float,
                        help="""Power exponent, where one applies.""")
    params.add_argument('--crawford', action='store_true',
                        help="""Compute the infimum variant of w_pA.""")
    params.add_argument('--count', type=int, default=1000,
                        help="""Number of points of sample_W_A.""")
    params.add_argument('--n-max', type=int, default=24,
                        help="""Truncation level of r_A.""")

    campaign = ARGS.add_argument_group("checks and campaigns")
    campaign.add_argument('--checkers',
                          help="""Comma separated checker ids; all checkers
                               by default.""")
    campaign.add_argument('--instances', type=int, default=100,
                          help="""Number of random instances of 'fuzz'.""")
    campaign.add_argument('--dims', type=_int_list, default='2,3,4,5,6',
                          help="""Dimensions the instances are drawn
                               from.""")
    campaign.add_argument('--structure',
                          help="""Comma separated structure tags requested on
                               top of each checker's hypotheses.""")
    campaign.add_argument('--tuple-size', type=int,
                          help="""Fixed operator tuple size.""")
    campaign.add_argument('--seed', type=int,
                          help="""Master seed.""")
    campaign.add_argument('--workers', type=int, default=1,
                          help="""Worker processes a campaign fans out over.""")
    campaign.add_argument('--full-grid', action='store_true',
                          help="""Check every parameter point on every
                               instance.""")
    campaign.add_argument('--dump-instance',
                          help="""Write the instance 'check' ran on to this
                               file.""")

    output = ARGS.add_argument_group("output")
    output.add_argument('--out',
                        help="""Output file instead of standard output. For
                             'fuzz' this receives the records.""")
    output.add_argument('--format',
                        choices=['json', 'csv', 'table'],
                        help="""Summary format. 'fuzz' defaults to json,
                             'report' to table.""")

    tol = ARGS.add_argument_group("tolerances")
    tol.add_argument('--tol-slack', type=float,
                     help="""Relative slack below which a link is
                          violated.""")
    tol.add_argument('--tol-rank', type=float,
                     help="""Relative eigenvalue cutoff for the rank of
                          A.""")
    tol.add_argument('--tol-psd', type=float,
                     help="""Tolerance of positivity tests.""")
    tol.add_argument('--tol-hermitize', type=float,
                     help="""Tolerance of structural predicates.""")
    return ARGS


def _config_defaults(parser, path):
    """
    Load the ``--config`` file into parser defaults, so that it overrides the
    built-in defaults but not the flags given explicitly.
    """
    data = load_json(path)
    if not isinstance(data, dict):
        raise ConfigError("Config file '%s' must hold a JSON object." % path)

    known = {action.dest for action in parser._actions} - {'help', 'config'}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError("Unknown keys in config file '%s': %s"
                          % (path, ', '.join(unknown)))
    if 'dims' in data:
        data['dims'] = _int_list(data['dims'])
    if isinstance(data.get('checkers'), list):
        data['checkers'] = ','.join(data['checkers'])
    if isinstance(data.get('structure'), list):
        data['structure'] = ','.join(data['structure'])
    parser.set_defaults(**data)


def _parse(argv):
    parser = _parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        _config_defaults(parser, pre.config)
    config = parser.parse_args(argv)
    if isinstance(config.dims, str):
        config.dims = _int_list(config.dims)
    if config.command is None:
        raise ConfigError("No --command given; choose from %s."
                          % ', '.join(sorted(COMMANDS)))
    if config.command not in COMMANDS:
        raise ConfigError("Unknown command '%s'." % config.command)
    return config


def run(argv=None):
    """
    Parse `argv` and run the command. Returns the exit code instead of
    exiting, for embedding and tests.
    """
    try:
        config = _parse(argv)
    except ConfigError as err:
        print("ConfigError: %s" % err, file=sys.stderr)
        return EXIT_CONFIG

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if config.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")

    try:
        return COMMANDS[config.command](config)
    except (ConfigError, InvalidMatrix, InconsistentTags) as err:
        print("%s: %s" % (type(err).__name__, err), file=sys.stderr)
        return EXIT_CONFIG
    except DOMAIN_ERRORS as err:
        print("%s: %s" % (type(err).__name__, err), file=sys.stderr)
        return EXIT_DOMAIN
    except LabError as err:
        print("%s: %s" % (type(err).__name__, err), file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as err:
        print("Invalid input: %s" % err, file=sys.stderr)
        return EXIT_CONFIG


def _main():
    sys.exit(run())


if __name__ == '__main__':
    _main()
