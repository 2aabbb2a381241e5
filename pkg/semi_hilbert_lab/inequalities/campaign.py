"""
Seeded fuzz campaigns over the checker registry, their summaries and the
JSON lines / CSV report formats.
"""

import csv
import dataclasses
import functools
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

from semi_hilbert_lab.errors import ConfigError, ConstructionFailed, \
    InconsistentTags
from semi_hilbert_lab.generators import Structure, generate, \
    parse_structure, random_spec
from semi_hilbert_lab.linalg import DEFAULT_TOLERANCE, TolerancePolicy, \
    seeded_rng
from semi_hilbert_lab.matrix_io import dumps
from semi_hilbert_lab.semi_hilbert import make_context

from . import select
from .checker import CheckRecord, Severity, Verdict, check_rng, run_check

LOG = logging.getLogger(__name__)

SUMMARY_COLUMNS = ('checker_id', 'severity', 'instances', 'records',
                   'min_rel_slack', 'violations', 'skipped', 'degenerate',
                   'equality_cases')


@dataclass(frozen=True)
class CampaignPlan:
    """
    :param checker_ids: Checkers to run, None for the whole registry.
    :param structure: Tags requested on top of each checker's own
        hypotheses.
    :param tuple_size: Fixed tuple size; by default instances cycle through
        the sizes a checker accepts.
    :param full_grid: Check every parameter point on every instance instead
        of one point per instance, cycling through the grid.
    """
    checker_ids: Optional[Tuple[str, ...]] = None
    instance_count: int = 100
    seed: int = 0
    dims: Tuple[int, ...] = (2, 3, 4, 5, 6)
    structure: FrozenSet[Structure] = frozenset()
    tuple_size: Optional[int] = None
    full_grid: bool = False
    workers: int = 1
    tol: TolerancePolicy = DEFAULT_TOLERANCE

    def __post_init__(self):
        object.__setattr__(self, 'structure', parse_structure(self.structure))
        if self.checker_ids is not None:
            object.__setattr__(self, 'checker_ids', tuple(self.checker_ids))
        if self.instance_count < 0:
            raise ConfigError("instance_count must not be negative.")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1.")
        if not self.dims or min(self.dims) < 1:
            raise ConfigError("dims must be a non-empty list of positive "
                              "dimensions.")


def instance_seed(plan, index):
    rng = seeded_rng(plan.seed, 'campaign', index)
    return int(rng.integers(0, 2 ** 62))


def _tuple_size(plan, checker, index):
    if plan.tuple_size is not None:
        return plan.tuple_size
    return checker.tuple_sizes[index % len(checker.tuple_sizes)]


def _grid_points(plan, checker, seed, index):
    rng = seeded_rng(seed, 'grid', checker.stream or checker.id)
    grid = checker.parameter_grid(rng)
    if plan.full_grid:
        return grid
    return [grid[index % len(grid)]]


def _unbuildable(checker, seed, params, err):
    return CheckRecord(checker.id, seed, dict(params), math.nan, math.nan,
                       math.nan, math.nan, Verdict.HYPOTHESIS_SKIPPED,
                       checker.severity,
                       note="instance not constructible: %s" % err)


def with_tolerance(instance, tol):
    """
    `instance` on a context rebuilt under `tol`, so that the rank of A and
    every derived factor follow the new cutoffs.
    """
    if tol == instance.ctx.tol:
        return instance
    return dataclasses.replace(instance, ctx=make_context(instance.ctx.A, tol))


def _run_instance(plan, index):
    checkers = select(plan.checker_ids)
    seed = instance_seed(plan, index)
    records = []
    for checker in checkers:
        points = _grid_points(plan, checker, seed, index)
        try:
            spec = random_spec(seed, checker.structure | plan.structure,
                               plan.dims, _tuple_size(plan, checker, index))
            instance = generate(spec)
        except (InconsistentTags, ConstructionFailed) as err:
            LOG.debug("%s: instance %d skipped: %s", checker.id, seed, err)
            records.extend(_unbuildable(checker, seed, params, err)
                           for params in points)
            continue
        instance = with_tolerance(instance, plan.tol)
        for params in points:
            records.append(run_check(checker, instance, params,
                                     check_rng(checker, instance, params)))
    LOG.debug("Instance %d (seed %d): %d records", index, seed, len(records))
    return records


def fuzz_campaign(plan):
    """
    Run `plan` and return ``(records, summary)``. Instances fan out over
    ``plan.workers`` processes; records come back in instance order, so the
    output does not depend on the worker count.

    :raises ConfigError: If the plan names an unknown checker.
    """
    checkers = select(plan.checker_ids)
    if not checkers:
        return [], {}
    indices = range(plan.instance_count)
    if plan.workers == 1:
        batches = [_run_instance(plan, i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=plan.workers) as executor:
            batches = list(executor.map(
                functools.partial(_run_instance, plan), indices,
                chunksize=max(1, plan.instance_count // (4 * plan.workers))))
    records = [record for batch in batches for record in batch]
    return records, summarize(records, checkers)


@dataclass
class _Tally:
    severity: str
    seeds: set = field(default_factory=set)
    records: int = 0
    min_rel_slack: Optional[float] = None
    violations: int = 0
    skipped: int = 0
    degenerate: int = 0
    equality_cases: set = field(default_factory=set)

    def add(self, record):
        self.records += 1
        self.seeds.add(record.instance_seed)
        if record.verdict is Verdict.HYPOTHESIS_SKIPPED:
            self.skipped += 1
            return
        if record.verdict is Verdict.DEGENERATE:
            self.degenerate += 1
            return
        if record.verdict is Verdict.VIOLATED:
            self.violations += 1
        # Noise-level readings carry no sign information.
        if record.extras.get('noise_level'):
            return
        if self.min_rel_slack is None \
                or record.relative_slack < self.min_rel_slack:
            self.min_rel_slack = record.relative_slack
        if record.is_equality:
            self.equality_cases.add(record.instance_seed)

    def to_dict(self):
        return {'severity': self.severity,
                'instances': len(self.seeds),
                'records': self.records,
                'min_rel_slack': self.min_rel_slack,
                'violations': self.violations,
                'skipped': self.skipped,
                'degenerate': self.degenerate,
                'equality_cases': sorted(self.equality_cases)}


def summarize(records, checkers=()):
    """
    Per-checker aggregate of `records`: minimum relative slack, verdict
    counts and the seeds of instances where a link was attained with
    equality. Checkers in `checkers` appear even without records.
    """
    tallies = {checker.id: _Tally(checker.severity.value)
               for checker in checkers}
    for record in records:
        tally = tallies.setdefault(record.checker_id,
                                   _Tally(record.severity.value))
        tally.add(record)
    return {checker_id: tally.to_dict()
            for checker_id, tally in tallies.items()}


def assert_violations(records):
    """Violated records of assert-severity checkers."""
    return [record for record in records
            if record.verdict is Verdict.VIOLATED
            and record.severity is Severity.ASSERT]


def records_to_jsonl(records):
    return ''.join(dumps(record) + '\n' for record in records)


def records_from_jsonl(text, source='<input>'):
    """
    :raises ConfigError: If a line is not a valid record.
    """
    records = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(CheckRecord.from_dict(json.loads(line)))
        except (ValueError, KeyError, TypeError) as err:
            raise ConfigError("%s:%d is not a check record: %s"
                              % (source, number, err)) from err
    return records


def summary_to_csv(summary):
    """The summary table with columns :data:`SUMMARY_COLUMNS`."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(SUMMARY_COLUMNS)
    for checker_id in sorted(summary):
        row = dict(summary[checker_id], checker_id=checker_id)
        row['min_rel_slack'] = '' if row['min_rel_slack'] is None \
            else '%.17g' % row['min_rel_slack']
        row['equality_cases'] = ';'.join(map(str, row['equality_cases']))
        writer.writerow([row[column] for column in SUMMARY_COLUMNS])
    return out.getvalue()


def format_table(summary):
    """A fixed-width rendition of the summary for terminals."""
    lines = ["%-26s %-8s %6s %8s %14s %5s %7s" % (
        'checker', 'severity', 'inst', 'records', 'min rel slack', 'viol',
        'skipped')]
    for checker_id in sorted(summary):
        row = summary[checker_id]
        slack = '-' if row['min_rel_slack'] is None \
            else '%.3e' % row['min_rel_slack']
        lines.append("%-26s %-8s %6d %8d %14s %5d %7d" % (
            checker_id, row['severity'], row['instances'], row['records'],
            slack, row['violations'], row['skipped']))
    return '\n'.join(lines)
