"""
Implementation of the command-line subcommands. Every command takes the
parsed configuration, writes machine-readable results to standard output
(or the ``--out`` file) and returns the process exit code.
"""

import logging
import sys

import numpy as np

from semi_hilbert_lab.errors import ConfigError
from semi_hilbert_lab.generators import OperatorInstance, generate, \
    parse_structure, random_spec, realized_tags
from semi_hilbert_lab.inequalities import Verdict, check_rng, run_check, \
    select
from semi_hilbert_lab.inequalities.campaign import CampaignPlan, \
    assert_violations, format_table, fuzz_campaign, records_from_jsonl, \
    records_to_jsonl, summarize, summary_to_csv, with_tolerance
from semi_hilbert_lab.linalg import DEFAULT_TOLERANCE, TolerancePolicy, \
    seeded_rng
from semi_hilbert_lab.matrix_io import dumps, load_json, matrix_from_dict, \
    matrix_to_dict, operators_from_json, write_text
from semi_hilbert_lab.radii import TupleMode, TupleRadiusQuery, c_A, r_A, \
    sample_W_A, w_A, w_pA
from semi_hilbert_lab.semi_hilbert import a_abs, a_abs_sharp, a_adjoint, \
    a_modulus, a_seminorm_op, cartesian, make_context, predicates

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3

QUANTITIES = ('a_adjoint', 'a_norm', 'a_abs', 'a_abs_sharp', 'a_modulus',
              'w_A', 'c_A', 'r_A', 'w_pA', 'cartesian', 'predicates',
              'sample_W_A')


def tolerance(config, base=DEFAULT_TOLERANCE):
    """
    `base` with the ``--tol-*`` overrides applied.

    :raises ConfigError: If an override lies outside (0, 1).
    """
    try:
        return base.with_overrides(rank_cutoff_rel=config.tol_rank,
                                   hermitize_tol=config.tol_hermitize,
                                   psd_tol=config.tol_psd,
                                   slack_tol=config.tol_slack)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def load_context(config, dim):
    """
    The context named by ``--context``: a matrix object for `A`, or an
    object ``{"A": ..., "tol": {...}}``. Without the flag ``A = I``.
    """
    if config.context is None:
        return make_context(np.eye(dim), tolerance(config))
    data = load_json(config.context)
    base = DEFAULT_TOLERANCE
    if isinstance(data, dict) and 'A' in data:
        try:
            base = TolerancePolicy.from_dict(data.get('tol', {}))
        except ValueError as err:
            raise ConfigError("Invalid tolerances in '%s': %s"
                              % (config.context, err)) from err
        data = data['A']
    return make_context(matrix_from_dict(data), tolerance(config, base))


def _required(config, name):
    value = getattr(config, name)
    if value is None:
        raise ConfigError("Command '%s' needs --%s."
                          % (config.command, name.replace('_', '-')))
    return value


def _emit(config, text):
    if config.out:
        write_text(config.out, text)
    else:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')


def _single(operators, quantity):
    if len(operators) != 1:
        raise ConfigError("Quantity '%s' takes exactly one operator, got %d."
                          % (quantity, len(operators)))
    return operators[0]


def compute(ctx, operators, quantity, config):
    """The JSON-ready result of one quantity."""
    if quantity == 'w_pA':
        mode = TupleMode.CRAWFORD if config.crawford else TupleMode.RADIUS
        query = TupleRadiusQuery(operators, float(config.p), mode)
        return w_pA(ctx, query, seed=config.seed or 0).to_dict()

    T = _single(operators, quantity)
    if quantity == 'a_adjoint':
        return {'matrix': matrix_to_dict(a_adjoint(ctx, T))}
    if quantity == 'a_norm':
        return {'value': a_seminorm_op(ctx, T)}
    if quantity == 'a_abs':
        return {'matrix': matrix_to_dict(a_abs(ctx, T))}
    if quantity == 'a_abs_sharp':
        return {'matrix': matrix_to_dict(a_abs_sharp(ctx, T))}
    if quantity == 'a_modulus':
        power = 1.0 if config.alpha is None else float(config.alpha)
        return {'power': power,
                'matrix': matrix_to_dict(a_modulus(ctx, T, power))}
    if quantity == 'w_A':
        return w_A(ctx, T).to_dict()
    if quantity == 'c_A':
        return c_A(ctx, T, seed=config.seed or 0).to_dict()
    if quantity == 'r_A':
        return r_A(ctx, T, n_max=config.n_max).to_dict()
    if quantity == 'cartesian':
        parts = cartesian(ctx, T)
        return {'real_part': matrix_to_dict(parts.real_part),
                'imag_part': matrix_to_dict(parts.imag_part)}
    if quantity == 'predicates':
        return predicates(ctx, T).to_dict()
    if quantity == 'sample_W_A':
        values = sample_W_A(ctx, T, config.count, seed=config.seed or 0)
        return {'count': int(config.count),
                're': values.real.tolist(), 'im': values.imag.tolist()}
    raise ConfigError("Unknown quantity '%s'; choose from %s."
                      % (quantity, ', '.join(QUANTITIES)))


def cmd_compute(config):
    quantity = _required(config, 'quantity')
    operators = operators_from_json(load_json(_required(config, 'matrix')))
    ctx = load_context(config, operators[0].shape[0])
    result = dict(compute(ctx, operators, quantity, config),
                  quantity=quantity)
    _emit(config, dumps(result))
    return EXIT_OK


def _checker_ids(config):
    if not config.checkers:
        return None
    return [name.strip() for name in config.checkers.split(',')
            if name.strip()]


def _structure(config):
    if not config.structure:
        return frozenset()
    return parse_structure(name.strip()
                           for name in config.structure.split(','))


def _check_instances(config, checker):
    """
    The instance a checker is replayed on: an instance file (``--input``),
    explicit matrices (``--matrix``/``--context``), or one regenerated from
    ``--seed`` with the checker's own hypotheses.
    """
    if config.input:
        instance = OperatorInstance.from_dict(load_json(config.input))
        return _with_tolerance(config, instance)
    if config.matrix:
        operators = tuple(operators_from_json(load_json(config.matrix)))
        ctx = load_context(config, operators[0].shape[0])
        return OperatorInstance(ctx, operators, realized_tags(ctx, operators),
                                config.seed or 0)
    seed = _required(config, 'seed')
    size = config.tuple_size or checker.tuple_sizes[0]
    spec = random_spec(seed, checker.structure | _structure(config),
                       tuple(config.dims), size)
    return _with_tolerance(config, generate(spec))


def _with_tolerance(config, instance):
    return with_tolerance(instance, tolerance(config, instance.ctx.tol))


def cmd_check(config):
    """
    Replay checkers on one instance over their whole parameter grid and
    write the records as JSON lines.
    """
    records = []
    for checker in select(_checker_ids(config)):
        instance = _check_instances(config, checker)
        if config.dump_instance:
            write_text(config.dump_instance, dumps(instance))
        grid = checker.parameter_grid(
            seeded_rng(instance.seed, 'grid', checker.stream or checker.id))
        for params in grid:
            records.append(run_check(checker, instance, params,
                                     check_rng(checker, instance, params)))
    _emit(config, records_to_jsonl(records))
    violations = assert_violations(records)
    for record in violations:
        print("Violation: %s on seed %d with %s (relative slack %.3e)"
              % (record.checker_id, record.instance_seed,
                 dumps(record.params), record.relative_slack),
              file=sys.stderr)
    return EXIT_VIOLATION if violations else EXIT_OK


def _summary_text(summary, fmt):
    if fmt == 'csv':
        return summary_to_csv(summary)
    if fmt == 'table':
        return format_table(summary) + '\n'
    return dumps(summary) + '\n'


def cmd_fuzz(config):
    seed = _required(config, 'seed')
    plan = CampaignPlan(checker_ids=_checker_ids(config),
                        instance_count=config.instances,
                        seed=seed,
                        dims=tuple(config.dims),
                        structure=_structure(config),
                        tuple_size=config.tuple_size,
                        full_grid=config.full_grid,
                        workers=config.workers,
                        tol=tolerance(config))
    print("Running %d instances with seed %d..."
          % (plan.instance_count, plan.seed), file=sys.stderr)
    records, summary = fuzz_campaign(plan)
    if config.out:
        write_text(config.out, records_to_jsonl(records))
    sys.stdout.write(_summary_text(summary, config.format or 'json'))

    violations = assert_violations(records)
    if violations:
        print("%d violated records among assert-severity checkers!"
              % len(violations), file=sys.stderr)
        return EXIT_VIOLATION
    print("No assert-severity violations in %d records." % len(records),
          file=sys.stderr)
    return EXIT_OK


def cmd_report(config):
    path = _required(config, 'input')
    try:
        with open(path, 'r') as handle:
            text = handle.read()
    except OSError as err:
        raise ConfigError("Cannot read '%s': %s" % (path, err)) from err
    records = records_from_jsonl(text, path)
    summary = summarize(records)
    _emit(config, _summary_text(summary, config.format or 'table'))
    skipped = sum(record.verdict is Verdict.HYPOTHESIS_SKIPPED
                  for record in records)
    LOG.debug("Report over %d records (%d skipped)", len(records), skipped)
    return EXIT_OK


COMMANDS = {'compute': cmd_compute,
            'check': cmd_check,
            'fuzz': cmd_fuzz,
            'report': cmd_report}
