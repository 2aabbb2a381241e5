"""
The machinery shared by every inequality checker: records, verdicts, the
vector search for pointwise inequalities and the :class:`InequalityChecker`
base class whose hooks the concrete checkers implement.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.optimize

from semi_hilbert_lab.errors import DegenerateContext
from semi_hilbert_lab.generators import Structure
from semi_hilbert_lab.linalg import power_function, seeded_rng
from semi_hilbert_lab.matrix_io import dumps, vector_to_dict
from semi_hilbert_lab.radii import random_sphere
from semi_hilbert_lab.semi_hilbert import a_adjoint, a_func, a_seminorm_op

LOG = logging.getLogger(__name__)

SEARCH_SAMPLES = 256
FD_STEP = 1.5e-8
REFINE_STARTS = 2
REFINE_MAXITER = 40

# Links whose sides both stay below this fraction of the instance scale are
# rounding noise; their relative slack carries no information.
NOISE_FLOOR = 1e-6
TINY = 1e-300
EQUALITY_TOL = 1e-6

ALPHA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
ALPHA_DRAWS = 3
R_GRID = (1.0, 1.5, 2.0, 3.0)
PQ_GRID = ((2.0, 2.0), (3.0, 1.5), (4.0, 4.0 / 3.0))


class Severity(Enum):
    ASSERT = 'assert'
    EXPLORE = 'explore'


class Verdict(Enum):
    HOLDS = 'holds'
    VIOLATED = 'violated'
    HYPOTHESIS_SKIPPED = 'hypothesis_skipped'
    DEGENERATE = 'degenerate'


class Quantifier(Enum):
    """What a checker quantifies over."""
    SCALAR = 'scalar'
    VECTOR = 'vector'
    VECTOR_PAIR = 'vector_pair'


class Sphere(Enum):
    A_UNIT = 'A_unit'
    UNIT = 'unit'


@dataclass(frozen=True)
class Link:
    """One inequality ``lhs <= rhs`` of a (possibly chained) statement."""
    name: str
    lhs: float
    rhs: float

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def relative_slack(self):
        return self.slack / max(self.rhs, TINY)

    def at_noise_level(self, margin):
        """Both sides are rounding noise next to `margin`."""
        return max(abs(self.lhs), abs(self.rhs)) <= margin

    def to_dict(self):
        return {'name': self.name, 'lhs': self.lhs, 'rhs': self.rhs}

    @classmethod
    def from_dict(cls, data):
        return cls(data['name'], _float(data['lhs']), _float(data['rhs']))


def psd_link(name, H):
    """
    ``λ_min(H) >= 0`` for Hermitian `H`, written as
    ``‖H‖ - λ_min(H) <= ‖H‖`` so that the relative slack is
    ``λ_min(H) / ‖H‖``.
    """
    values = np.linalg.eigvalsh((H + H.conj().T) / 2.0)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    lowest = float(values[0]) if values.size else 0.0
    return Link(name, scale - lowest, scale)


def _float(value):
    return math.nan if value is None else float(value)


@dataclass
class CheckRecord:
    checker_id: str
    instance_seed: int
    params: dict
    lhs: float
    rhs: float
    slack: float
    relative_slack: float
    verdict: Verdict
    severity: Severity
    witness: Optional[dict] = None
    search: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    links: List[Link] = field(default_factory=list)
    note: Optional[str] = None

    @property
    def is_equality(self):
        return self.verdict in (Verdict.HOLDS, Verdict.VIOLATED) \
            and abs(self.relative_slack) <= EQUALITY_TOL

    def to_dict(self):
        return {'checker_id': self.checker_id,
                'instance_seed': self.instance_seed,
                'params': self.params,
                'lhs': self.lhs,
                'rhs': self.rhs,
                'slack': self.slack,
                'relative_slack': self.relative_slack,
                'verdict': self.verdict.value,
                'severity': self.severity.value,
                'witness': self.witness,
                'search': self.search,
                'extras': self.extras,
                'links': [link.to_dict() for link in self.links],
                'note': self.note}

    @classmethod
    def from_dict(cls, data):
        return cls(checker_id=data['checker_id'],
                   instance_seed=int(data['instance_seed']),
                   params=dict(data.get('params') or {}),
                   lhs=_float(data.get('lhs')),
                   rhs=_float(data.get('rhs')),
                   slack=_float(data.get('slack')),
                   relative_slack=_float(data.get('relative_slack')),
                   verdict=Verdict(data['verdict']),
                   severity=Severity(data.get('severity', 'assert')),
                   witness=data.get('witness'),
                   search=dict(data.get('search') or {}),
                   extras=dict(data.get('extras') or {}),
                   links=[Link.from_dict(d) for d in data.get('links', ())],
                   note=data.get('note'))


# Function pairs f, g with f(t) g(t) = t.

@dataclass(frozen=True)
class FunctionPair:
    name: str
    f: Callable
    g: Callable

    def of_modulus(self, which):
        """``s ↦ which(√s)``, to be applied to ``T♯T``."""
        func = self.f if which == 'f' else self.g

        def _composed(s):
            return func(np.sqrt(np.maximum(np.asarray(s, dtype=float), 0.0)))
        return _composed


def _scaled(h):
    def _f(t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(t) * h(t)

    def _g(t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(t) / h(t)
    return _f, _g


def function_pair(params):
    kind = params.get('pair', 'power')
    if kind == 'power':
        alpha = float(params['alpha'])
        return FunctionPair(kind, power_function(alpha),
                            power_function(1.0 - alpha))
    if kind == 'scaled_cos':
        return FunctionPair(kind, *_scaled(lambda t: (2.0 + np.cos(t)) / 2.0))
    if kind == 'scaled_rational':
        return FunctionPair(kind,
                            *_scaled(lambda t: (1.0 + 2.0 * t) / (1.0 + t)))
    raise ValueError("Unknown function pair '%s'." % kind)


def alpha_grid(rng):
    draws = rng.uniform(0.0, 1.0, ALPHA_DRAWS)
    return list(ALPHA_GRID) + [float(a) for a in draws]


def fg_grid(rng):
    return [{'pair': 'power', 'alpha': a} for a in alpha_grid(rng)] \
        + [{'pair': 'scaled_cos'}, {'pair': 'scaled_rational'}]


def modulus_function(ctx, T, func):
    """``func(|T|_A)`` in the A-functional calculus."""
    return a_func(ctx, a_adjoint(ctx, T) @ T,
                  lambda s: func(np.sqrt(np.maximum(s, 0.0))))


def sharp_modulus_function(ctx, T, func):
    """``func(|T♯|_A)``."""
    S = a_adjoint(ctx, T)
    return modulus_function(ctx, S, func)


# Batch evaluation over column vectors.

def quad(ctx, M, X, Y=None):
    """``⟨M x_k, y_k⟩_A`` for the columns of `X` and `Y` (`Y` defaults to X)."""
    Y = X if Y is None else Y
    return np.sum(np.conj(Y) * (ctx.A @ (M @ X)), axis=0)


def real_quad(ctx, M, X):
    return np.real(quad(ctx, M, X))


def a_norms(ctx, M, X):
    """``‖M x_k‖_A`` for the columns of `X`."""
    V = M @ X
    return np.sqrt(np.maximum(np.real(np.sum(np.conj(V) * (ctx.A @ V),
                                             axis=0)), 0.0))


# Vector search.

def sample_vectors(ctx, sphere, rng, count):
    """
    `count` vectors as columns: A-unit vectors with a random kernel
    component, or plain unit vectors for :attr:`Sphere.UNIT`.
    """
    if sphere is Sphere.UNIT:
        return random_sphere(rng, ctx.dim, count)
    X = ctx.embed(random_sphere(rng, ctx.rank_A, count))
    k = ctx.kernel.shape[1]
    if k:
        X = X + ctx.kernel @ (random_sphere(rng, k, count)
                              * rng.uniform(0.0, 1.0, count))
    return X


class _Chart:
    """Real coordinates of one sphere, holding the kernel component fixed."""

    def __init__(self, ctx, sphere, x0):
        self.ctx, self.sphere = ctx, sphere
        if sphere is Sphere.UNIT:
            self.fixed = None
            z = x0
        else:
            self.fixed = ctx.kernel @ (ctx.kernel.conj().T @ x0)
            z = ctx.coordinates(x0)
        self.size = z.size
        self.start = np.concatenate([z.real, z.imag])

    def points(self, V):
        """The sphere points of the columns of `V`."""
        Z = V[:self.size] + 1j * V[self.size:]
        norms = np.linalg.norm(Z, axis=0)
        zero = norms == 0.0
        Z = Z / np.where(zero, 1.0, norms)
        Z[0, zero] = 1.0
        if self.sphere is Sphere.UNIT:
            return Z
        return self.ctx.embed(Z) + self.fixed[:, None]

    def point(self, v):
        return self.points(v[:, None])[:, 0]


def minimize_batched(batch_fn, v0, maxiter=REFINE_MAXITER):
    """
    BFGS for a function evaluated column by column. The forward-difference
    gradient costs one batched call of `batch_fn` per step.

    :param batch_fn: Maps a real matrix of points (as columns) to their
        values.
    :return: The :class:`scipy.optimize.OptimizeResult`.
    """
    size = v0.size

    def _value_and_grad(v):
        h = FD_STEP * np.maximum(1.0, np.abs(v))
        values = batch_fn(np.column_stack([v, v[:, None] + np.diag(h)]))
        return float(values[0]), (values[1:] - values[0]) / h

    result = scipy.optimize.minimize(_value_and_grad, v0, jac=True,
                                     method='BFGS',
                                     options={'maxiter': maxiter})
    result.nfev = int(result.nfev) * (size + 1)
    return result


@dataclass(frozen=True)
class SearchResult:
    links: Tuple[Link, ...]
    x: np.ndarray
    y: Optional[np.ndarray]
    budget: dict


def _scores(batch, floor):
    worst = None
    for _, lhs, rhs in batch:
        denominator = np.maximum(np.maximum(rhs, floor), TINY)
        rel = (rhs - lhs) / denominator
        worst = rel if worst is None else np.minimum(worst, rel)
    return worst


def search_links(ctx, link_fn, rng, pair=False, sphere=Sphere.A_UNIT,
                 seeds=(), samples=SEARCH_SAMPLES, starts=REFINE_STARTS,
                 maxiter=REFINE_MAXITER):
    """
    Minimize the relative slack of a pointwise inequality over vectors.
    During the search the slack denominator is floored at
    :data:`NOISE_FLOOR` times the largest side seen, so that points where
    both sides vanish do not attract the optimizer.

    :param link_fn: ``(X, Y) -> [(name, lhs, rhs), ...]`` evaluated column by
        column; `Y` is None unless `pair`.
    :param seeds: Extra ``(x, y)`` starting points evaluated before sampling.
    :param starts: Number of best points refined by BFGS; 0 keeps the best
        sample.
    :return: The links at the worst point found.
    """
    X = sample_vectors(ctx, sphere, rng, samples)
    Y = sample_vectors(ctx, sphere, rng, samples) if pair else None
    if seeds:
        X = np.column_stack([np.asarray(x, dtype=np.complex128)
                             for x, _ in seeds] + [X])
        if pair:
            Y = np.column_stack([np.asarray(y, dtype=np.complex128)
                                 for _, y in seeds] + [Y])

    batch = link_fn(X, Y)
    scale = max([float(np.max(np.abs(part)))
                 for _, lhs, rhs in batch for part in (lhs, rhs)] + [0.0])
    floor = NOISE_FLOOR * scale
    scores = _scores(batch, floor)
    order = np.argsort(scores, kind='stable')

    best_score = float(scores[order[0]])
    best_x = X[:, order[0]]
    best_y = Y[:, order[0]] if pair else None
    evaluations = X.shape[1]

    for k in order[:starts]:
        chart_x = _Chart(ctx, sphere, X[:, k])
        chart_y = _Chart(ctx, sphere, Y[:, k]) if pair else None
        split = chart_x.start.size

        def _batch_scores(V):
            Xs = chart_x.points(V[:split])
            Ys = chart_y.points(V[split:]) if pair else None
            return _scores(link_fn(Xs, Ys), floor)

        v0 = chart_x.start if not pair \
            else np.concatenate([chart_x.start, chart_y.start])
        result = minimize_batched(_batch_scores, v0, maxiter)
        evaluations += result.nfev
        if result.fun < best_score:
            best_score = float(result.fun)
            best_x = chart_x.point(result.x[:split])
            best_y = chart_y.point(result.x[split:]) if pair else None

    LOG.debug("Vector search: %d evaluations, worst relative slack %.3e",
              evaluations, best_score)
    final = link_fn(best_x[:, None], None if best_y is None
                    else best_y[:, None])
    links = tuple(Link(name, float(lhs[0]), float(rhs[0]))
                  for name, lhs, rhs in final)
    return SearchResult(links, best_x, best_y,
                        {'samples': samples, 'seeds': len(seeds),
                         'refine_starts': int(min(starts, X.shape[1])),
                         'refine_maxiter': maxiter,
                         'evaluations': evaluations,
                         'sphere': sphere.value})


def singular_seed(ctx, T):
    """
    A-unit ``(x, y)`` with ``⟨Tx, y⟩_A = ‖T‖_A``, from the top singular pair
    of the compression.
    """
    U, _, Vh = np.linalg.svd(ctx.reduce(T))
    return ctx.embed(Vh[0].conj()), ctx.embed(U[:, 0])


def eigen_seeds(ctx, T):
    """
    ``(x, x)`` for the extreme eigenvectors of the compression of an
    A-selfadjoint `T`, as A-unit vectors.
    """
    R = ctx.reduce(T)
    _, vectors = np.linalg.eigh((R + R.conj().T) / 2.0)
    return [(ctx.embed(vectors[:, k]),) * 2 for k in (0, -1)]


def requires(*tags):
    """Structure tags of a checker; membership in B_A is always required."""
    return frozenset(tags) | {Structure.GENERAL_IN_BA}


class InequalityChecker:
    """
    A registered inequality. Subclasses set the class attributes and
    implement either :meth:`batch_links` (pointwise statements quantified
    over vectors) or :meth:`evaluate` (statements about norms and radii).
    """
    id = None
    anchor = None
    severity = Severity.ASSERT
    structure = frozenset({Structure.GENERAL_IN_BA})
    tuple_sizes = (1,)
    quantifier = Quantifier.SCALAR
    sphere = Sphere.A_UNIT
    # Homogeneity degree of both sides in the operators.
    degree = 1
    # Name of the random stream; checkers that specialize another one share
    # its stream so that both search the same vectors.
    stream = None
    # BFGS starts of the vector search. Checkers whose seed pairs attain the
    # bound with equality set 0.
    refine_starts = REFINE_STARTS

    def parameter_grid(self, rng):
        """The parameter points to check, drawing random ones from `rng`."""
        return [{}]

    def unmet_hypotheses(self, instance):
        reasons = []
        missing = self.structure - instance.tags
        if missing:
            reasons.append("instance lacks %s"
                           % ', '.join(sorted(t.value for t in missing)))
        if len(instance.operators) not in self.tuple_sizes:
            reasons.append("needs a tuple of size %s, got %d"
                           % ('/'.join(map(str, self.tuple_sizes)),
                              len(instance.operators)))
        return reasons

    def parameter_hypotheses(self, params):
        return []

    def prepare(self, instance, params, rng):
        """Precompute the matrices the sides are built from."""
        return {}

    def batch_links(self, ctx, prepared, X, Y):
        raise NotImplementedError()

    def evaluate(self, instance, params, prepared, rng):
        raise NotImplementedError()

    def seed_pairs(self, ctx, prepared):
        """Starting points ``(x, y)`` of the vector search."""
        return []

    def extras(self, instance, params, prepared, links, witness=None):
        """
        Auxiliary readings for the record. `witness` is the worst ``(x, y)``
        of a vector search, None for scalar checkers.
        """
        return {}

    def magnitude(self, instance):
        ctx = instance.ctx
        return max(a_seminorm_op(ctx, T) for T in instance.operators)

    def describe(self):
        return {'id': self.id, 'anchor': self.anchor,
                'severity': self.severity.value,
                'structure': sorted(t.value for t in self.structure),
                'tuple_sizes': list(self.tuple_sizes),
                'quantifier': self.quantifier.value}


def check_rng(checker, instance, params):
    return seeded_rng(instance.seed, 'check', checker.stream or checker.id,
                      dumps(params))


def _skipped(checker, instance, params, verdict, note):
    return CheckRecord(checker.id, instance.seed, dict(params), math.nan,
                       math.nan, math.nan, math.nan, verdict,
                       checker.severity, note=note)


def run_check(checker, instance, params, rng=None):
    """
    Check one parameter point of `checker` on `instance`.

    Unmet hypotheses give verdict ``hypothesis_skipped`` and an empty
    A-unit sphere gives ``degenerate``; both carry the reason in ``note``.
    A link is violated when its relative slack is below ``-slack_tol``,
    unless both of its sides are rounding noise: at most
    :data:`NOISE_FLOOR` times the instance scale (``extras.noise_margin``).
    """
    reasons = checker.unmet_hypotheses(instance) \
        + checker.parameter_hypotheses(params)
    if reasons:
        return _skipped(checker, instance, params,
                        Verdict.HYPOTHESIS_SKIPPED, '; '.join(reasons))
    ctx = instance.ctx
    rng = rng if rng is not None else check_rng(checker, instance, params)
    witness, search, point = None, {}, None
    try:
        ctx.require_support()
        prepared = checker.prepare(instance, params, rng)
        if checker.quantifier is Quantifier.SCALAR:
            links = tuple(checker.evaluate(instance, params, prepared, rng))
        else:
            pair = checker.quantifier is Quantifier.VECTOR_PAIR

            def _links(X, Y):
                return checker.batch_links(ctx, prepared, X, Y)
            result = search_links(ctx, _links, rng, pair=pair,
                                  sphere=checker.sphere,
                                  seeds=checker.seed_pairs(ctx, prepared),
                                  starts=checker.refine_starts)
            links, search = result.links, result.budget
            point = (result.x, result.y)
            witness = {'x': vector_to_dict(result.x)}
            if result.y is not None:
                witness['y'] = vector_to_dict(result.y)
        extras = checker.extras(instance, params, prepared, links, point)
    except DegenerateContext as err:
        return _skipped(checker, instance, params, Verdict.DEGENERATE,
                        str(err))

    magnitude = checker.magnitude(instance)
    scale = max([abs(v) for link in links for v in (link.lhs, link.rhs)]
                + [magnitude ** checker.degree if checker.degree else 0.0])
    margin = NOISE_FLOOR * scale
    # Links above the noise level are ranked first; among them the smallest
    # relative slack is the record's.
    link = min(links, key=lambda item: (item.at_noise_level(margin),
                                        item.relative_slack))
    relative = float(link.relative_slack)
    noise = link.at_noise_level(margin)
    extras = dict(extras, noise_margin=margin)
    if noise:
        extras['noise_level'] = True
    verdict = Verdict.VIOLATED \
        if relative < -ctx.tol.slack_tol and not noise else Verdict.HOLDS
    if verdict is Verdict.VIOLATED:
        LOG.info("%s violated on seed %d at %s: link '%s' relative slack "
                 "%.3e", checker.id, instance.seed, dumps(params), link.name,
                 relative)
    return CheckRecord(checker.id, instance.seed, dict(params), link.lhs,
                       link.rhs, link.slack, relative, verdict,
                       checker.severity, witness, search, extras,
                       list(links))
