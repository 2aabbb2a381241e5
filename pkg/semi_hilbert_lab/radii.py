"""
Radius-type functionals of operators on a semi-Hilbert space: A-numerical
radius, A-Crawford number, A-spectral radius, numerical range samples and
the generalized joint A-radii of operator tuples.

Everything is computed on the compression ``T̃`` of the operators onto
range(A) (see :meth:`SemiHilbertContext.reduce`), where the A-unit sphere
becomes the ordinary unit sphere of ``C^r``.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
import scipy.optimize

from semi_hilbert_lab.errors import DimensionMismatch
from semi_hilbert_lab.linalg import seeded_rng, spectral_norm
from semi_hilbert_lab.matrix_io import vector_to_dict
from semi_hilbert_lab.semi_hilbert import douglas_member, require_ba

LOG = logging.getLogger(__name__)

THETA_GRID = 720
THETA_XATOL = 1e-10
DEFAULT_STARTS = 32
SAMPLE_COUNT = 1024
MAX_ROUNDS = 3
AGREEMENT = 1e-7


class RadiusMethod(Enum):
    THETA_SWEEP = 'theta_sweep'
    SAMPLING = 'sampling'
    GRADIENT_REFINE = 'gradient_refine'
    EXACT_REDUCTION = 'exact_reduction'


class TupleMode(Enum):
    RADIUS = 'radius'
    CRAWFORD = 'crawford'


@dataclass(frozen=True)
class RadiusEstimate:
    value: float
    lower_witness: Optional[np.ndarray]
    method: RadiusMethod
    certified_digits: int
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {'value': self.value,
                'witness': None if self.lower_witness is None
                else vector_to_dict(self.lower_witness),
                'method': self.method.value,
                'certified_digits': self.certified_digits,
                'params': dict(self.params)}


@dataclass(frozen=True)
class SpectralRadiusEstimate:
    """
    :param value: ``min_{n ≤ n_used} ‖Tⁿ‖_A^{1/n}``.
    :param sequence: The terms ``‖Tⁿ‖_A^{1/n}`` for ``n = 1..n_used``.
    :param limsup_tail: ``max_{m ≥ n} ‖T^m‖_A^{1/m}`` over the computed
        window, the limsup-style diagnostic.
    :param limit: The limit of the sequence, i.e. the spectral radius of the
        compression.
    """
    value: float
    n_used: int
    n_max: int
    sequence: List[float]
    limsup_tail: List[float]
    limit: float

    def to_dict(self):
        return {'value': self.value,
                'n_used': self.n_used,
                'n_max': self.n_max,
                'sequence': list(self.sequence),
                'limsup_tail': list(self.limsup_tail),
                'limit': self.limit}


@dataclass(frozen=True)
class TupleRadiusQuery:
    operators: Sequence[np.ndarray]
    p: float = 2.0
    mode: TupleMode = TupleMode.RADIUS

    def __post_init__(self):
        if not self.operators:
            raise ValueError("A tuple query needs at least one operator.")
        shape = np.shape(self.operators[0])
        if any(np.shape(T) != shape for T in self.operators):
            raise DimensionMismatch("Tuple operators differ in shape.")
        if not float(self.p) >= 1.0:
            raise ValueError("Exponent p must be >= 1, got %r." % self.p)
        if math.isinf(self.p) and self.mode == TupleMode.CRAWFORD:
            raise ValueError("The Crawford functional is defined for finite p.")


def _certified_digits(error, scale):
    if scale <= 0.0:
        scale = 1.0
    if error <= 0.0:
        return 15
    return int(max(0, min(15, math.floor(-math.log10(error / scale)))))


def random_sphere(rng, dim, count):
    """`count` uniform unit vectors of ``C^dim`` as columns."""
    z = rng.standard_normal((dim, count)) \
        + 1j * rng.standard_normal((dim, count))
    return z / np.linalg.norm(z, axis=0)


def _rotated_hermitian(R, thetas):
    phases = np.exp(1j * np.asarray(thetas))[:, None, None]
    return (phases * R[None] + np.conj(phases) * R.conj().T[None]) / 2.0


def sphere_ascent(value_and_grad, z0, max_iter=500, tol=1e-14):
    """
    Projected gradient ascent on the unit sphere of ``C^r`` with Armijo
    backtracking and renormalization as the retraction.

    :param value_and_grad: Maps a unit vector to the objective and its
        steepest ascent direction ``2 ∂f/∂z̄``.
    :return: ``(z, f(z))`` at the last accepted iterate.
    """
    z = z0 / np.linalg.norm(z0)
    f, g = value_and_grad(z)
    step = 1.0
    for _ in range(max_iter):
        tangent = g - np.real(np.vdot(z, g)) * z
        slope = float(np.real(np.vdot(tangent, tangent)))
        if math.sqrt(slope) <= tol * max(1.0, abs(f)):
            break
        while True:
            candidate = z + step * tangent
            candidate /= np.linalg.norm(candidate)
            f_new, g_new = value_and_grad(candidate)
            if f_new >= f + 1e-4 * step * slope:
                break
            step /= 2.0
            if step < 1e-18:
                return z, f
        gain = f_new - f
        z, f, g = candidate, f_new, g_new
        step = min(step * 2.0, 1e8)
        if gain <= tol * max(1.0, abs(f)):
            break
    return z, f


def _negated(value_and_grad):
    def _inner(z):
        f, g = value_and_grad(z)
        return -f, -g
    return _inner


def batch_sphere_ascent(value_and_grad, Z0, max_iter=200, tol=1e-10):
    """
    :func:`sphere_ascent` on all columns of `Z0` at once, each column with
    its own Armijo step.

    :param value_and_grad: Maps a matrix of unit columns to the objective
        values and ascent directions of every column.
    :return: ``(Z, values)`` at the last accepted iterates.
    """
    Z = Z0 / np.linalg.norm(Z0, axis=0)
    F, G = value_and_grad(Z)
    steps = np.ones(Z.shape[1])
    active = np.ones(Z.shape[1], dtype=bool)
    for _ in range(max_iter):
        tangent = G - np.real(np.sum(np.conj(Z) * G, axis=0)) * Z
        slope = np.real(np.sum(np.conj(tangent) * tangent, axis=0))
        active &= np.sqrt(slope) > tol * np.maximum(1.0, np.abs(F))
        if not active.any():
            break
        candidate = Z + steps * tangent
        candidate /= np.linalg.norm(candidate, axis=0)
        F_new, G_new = value_and_grad(candidate)
        accept = active & (F_new >= F + 1e-4 * steps * slope)
        gain = F_new - F
        Z[:, accept] = candidate[:, accept]
        G[:, accept] = G_new[:, accept]
        F = np.where(accept, F_new, F)
        steps = np.where(accept, np.minimum(steps * 2.0, 1e8), steps / 2.0)
        active &= ~(accept & (gain <= tol * np.maximum(1.0, np.abs(F))))
        active &= steps >= 1e-18
    return Z, F


def _tuple_objective(Rs, p):
    """
    ``Σ |z* R_k z|^p`` and its ascent direction, for a single vector or for
    every column of a matrix.
    """
    adjoints = np.conj(np.transpose(Rs, (0, 2, 1)))
    half = p / 2.0

    def _value_and_grad(Z):
        single = Z.ndim == 1
        if single:
            Z = Z[:, None]
        RZ = Rs @ Z
        RhZ = adjoints @ Z
        phi = np.einsum('im,kim->km', np.conj(Z), RZ)
        mod2 = np.abs(phi) ** 2
        values = np.sum(mod2 ** half, axis=0)
        coef = np.zeros_like(mod2)
        nonzero = mod2 > 0.0
        coef[nonzero] = half * mod2[nonzero] ** (half - 1.0)
        grad = 2.0 * np.sum(coef[:, None, :]
                            * (np.conj(phi)[:, None, :] * RZ
                               + phi[:, None, :] * RhZ), axis=0)
        if single:
            return float(values[0]), grad[:, 0]
        return values, grad
    return _value_and_grad


def _sweep(R, grid, lower):
    """
    Maximize over θ either the spectral radius of ``Re(e^{iθ} R)`` on
    [0, π) (`lower` false) or its smallest eigenvalue on [0, 2π).
    """
    span = 2.0 * math.pi if lower else math.pi

    def _score(thetas):
        values = np.linalg.eigvalsh(_rotated_hermitian(R, thetas))
        if lower:
            return values[:, 0]
        return np.maximum(values[:, -1], -values[:, 0])

    thetas = np.linspace(0.0, span, grid, endpoint=False)
    scores = _score(thetas)
    k = int(np.argmax(scores))
    h = span / grid
    result = scipy.optimize.minimize_scalar(
        lambda t: -float(_score(np.array([t]))[0]),
        bounds=(thetas[k] - h, thetas[k] + h), method='bounded',
        options={'xatol': THETA_XATOL})
    if -result.fun >= scores[k]:
        return float(result.x), float(-result.fun)
    return float(thetas[k]), float(scores[k])


def _sweep_witness(R, theta, lower):
    values, vectors = np.linalg.eigh(_rotated_hermitian(R, [theta])[0])
    if lower or values[-1] < -values[0]:
        return vectors[:, 0]
    return vectors[:, -1]


def w_A(ctx, T, grid=THETA_GRID):
    """
    A-numerical radius ``sup_{‖x‖_A = 1} |⟨Tx, x⟩_A|`` by a θ-sweep of
    ``Re(e^{iθ} T̃)``, refined in θ and cross-checked by projected gradient
    ascent from the sweep witness.

    For an operator outside ``B_A`` the supremum is unbounded and the value
    is ``inf`` without witness.

    :raises DegenerateContext: If ``A = 0``.
    """
    T = ctx.check_operator(T)
    ctx.require_support()
    if not douglas_member(ctx, T):
        LOG.warning("Operator is not in B_A; its A-numerical range is "
                    "unbounded.")
        return RadiusEstimate(math.inf, None, RadiusMethod.EXACT_REDUCTION,
                              0, {'reason': 'not in B_A'})

    R = ctx.reduce(T)
    theta, swept = _sweep(R, grid, lower=False)
    z = _sweep_witness(R, theta, lower=False)
    objective = _tuple_objective(R[None], 2.0)
    refined_z, refined = sphere_ascent(objective, z)
    refined = math.sqrt(max(refined, 0.0))
    if refined > swept + 1e-9 * max(1.0, swept):
        LOG.warning("Gradient refinement exceeded the θ-sweep: %.17g > %.17g",
                    refined, swept)
    value = max(swept, refined)
    witness = refined_z if refined >= abs(np.vdot(z, R @ z)) else z
    reproduced = abs(np.vdot(witness, R @ witness))
    error = max(abs(swept - refined), abs(value - reproduced))
    return RadiusEstimate(value, ctx.embed(witness), RadiusMethod.THETA_SWEEP,
                          _certified_digits(error, value),
                          {'theta': theta, 'grid': grid,
                           'sweep_value': swept, 'refined_value': refined})


def c_A(ctx, T, grid=THETA_GRID, starts=16, seed=0):
    """
    A-Crawford number ``inf_{‖x‖_A = 1} |⟨Tx, x⟩_A|``.

    The value is the distance from 0 to the convex set ``W_A(T)``,
    ``max(0, max_θ λ_min(Re(e^{iθ} T̃)))``; the witness comes from a
    multi-start projected gradient descent.

    :raises DegenerateContext: If ``A = 0``.
    """
    T = require_ba(ctx, T)
    ctx.require_support()
    R = ctx.reduce(T)
    theta, lowest = _sweep(R, 2 * grid, lower=True)
    value = max(0.0, lowest)

    rng = seeded_rng(seed, 'crawford')
    candidates = np.column_stack([_sweep_witness(R, theta, lower=True),
                                  random_sphere(rng, R.shape[0], starts)])
    descent = _negated(_tuple_objective(R[None], 2.0))
    Z, values = batch_sphere_ascent(descent, candidates)
    best_z, best = sphere_ascent(descent, Z[:, int(np.argmax(values))])
    best = -best
    reached = math.sqrt(max(best, 0.0))
    error = abs(reached - value)
    return RadiusEstimate(value, ctx.embed(best_z),
                          RadiusMethod.EXACT_REDUCTION,
                          _certified_digits(error, max(value,
                                                       spectral_norm(R))),
                          {'theta': theta, 'descent_value': reached,
                           'starts': candidates.shape[1]})


def r_A(ctx, T, n_max=24):
    """
    A-spectral radius as the infimum of ``‖Tⁿ‖_A^{1/n}`` truncated at
    `n_max`, stopping early once the sequence increases twice in a row.

    :raises NotInBA: If `T` fails the Douglas condition.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1.")
    T = require_ba(ctx, T)
    if ctx.rank_A == 0:
        return SpectralRadiusEstimate(0.0, 0, n_max, [], [], 0.0)
    R = ctx.reduce(T)
    base = spectral_norm(R)
    sequence = []
    power = np.eye(R.shape[0], dtype=np.complex128)
    for n in range(1, n_max + 1):
        power = power @ R
        norm = spectral_norm(power)
        if base == 0.0 or norm <= ctx.tol.rank_cutoff_rel * base ** n:
            sequence.append(0.0)
            break
        sequence.append(norm ** (1.0 / n))
        if len(sequence) >= 3 and sequence[-1] > sequence[-2] > sequence[-3]:
            break
    tail = [max(sequence[k:]) for k in range(len(sequence))]
    limit = float(np.max(np.abs(np.linalg.eigvals(R))))
    return SpectralRadiusEstimate(float(min(sequence)), len(sequence), n_max,
                                  sequence, tail, limit)


def sample_W_A(ctx, T, count, seed=0):
    """
    ``⟨Tx, x⟩_A`` for `count` random A-unit vectors drawn uniformly from the
    A-unit sphere of range(A).

    :raises DegenerateContext: If ``A = 0``.
    """
    T = ctx.check_operator(T)
    ctx.require_support()
    X = ctx.embed(random_sphere(seeded_rng(seed, 'numerical-range'),
                                ctx.rank_A, int(count)))
    return np.einsum('ik,ik->k', np.conj(X), ctx.A @ T @ X)


def _tuple_extreme(Rs, p, maximize, rng, starts, seeds):
    """
    Multi-start projected gradient search for the sup (or inf) of
    ``Σ |z* R_k z|^p`` over the unit sphere. The first round starts from
    `seeds` and the best of :data:`SAMPLE_COUNT` random vectors; later rounds
    add fresh random starts, doubling, until the best values of two
    consecutive rounds agree to :data:`AGREEMENT` or :data:`MAX_ROUNDS` have
    run.
    """
    objective = _tuple_objective(Rs, p)
    search = objective if maximize else _negated(objective)
    dim = Rs.shape[1]

    samples = random_sphere(rng, dim, SAMPLE_COUNT)
    sampled, _ = search(samples)
    candidates = samples[:, np.argsort(-sampled, kind='stable')[:starts]]
    if len(seeds):
        candidates = np.column_stack(list(seeds) + [candidates])

    best_z, best = None, -math.inf
    count, previous, rounds = starts, None, 0
    while rounds < MAX_ROUNDS:
        rounds += 1
        Z, values = batch_sphere_ascent(search, candidates)
        k = int(np.argmax(values))
        if values[k] > best:
            best_z, best = Z[:, k], float(values[k])
        LOG.debug("Round %d with %d starts: best %.17g", rounds,
                  candidates.shape[1], best)
        current = abs(best) ** (1.0 / p)
        if previous is not None \
                and abs(current - previous) <= AGREEMENT * max(1.0, current):
            break
        previous = current
        candidates = random_sphere(rng, dim, count)
        count *= 2
    best_z, best = sphere_ascent(search, best_z)

    k = int(np.argmax(sampled))
    if sampled[k] > best:
        LOG.warning("Random sampling beat the optimizer: %.17g vs %.17g",
                    abs(sampled[k]), abs(best))
        best_z, best = samples[:, k], float(sampled[k])
    return abs(best) ** (1.0 / p), best_z, rounds, \
        abs(float(sampled[k])) ** (1.0 / p)


def _tuple_starts(ctx, operators, seed_vectors):
    """The compressions of `operators` and their shared starting vectors."""
    Rs = np.stack([ctx.reduce(T) for T in operators])
    seeds = [ctx.coordinates(w_A(ctx, T).lower_witness) for T in operators]
    for x in seed_vectors:
        u = ctx.coordinates(np.asarray(x, dtype=np.complex128))
        if np.linalg.norm(u) > 0.0:
            seeds.append(u / np.linalg.norm(u))
    return Rs, seeds


def _tuple_estimate(ctx, z, value, p, n, rounds, sampled, mode):
    return RadiusEstimate(value, ctx.embed(z), RadiusMethod.GRADIENT_REFINE,
                          _certified_digits(AGREEMENT, 1.0),
                          {'p': p, 'n': n, 'rounds': rounds,
                           'sample_bound': sampled, 'mode': mode.value})


def _single_operator(ctx, T, query, seed):
    crawford = query.mode == TupleMode.CRAWFORD
    single = c_A(ctx, T, seed=seed) if crawford else w_A(ctx, T)
    params = dict(single.params, p=float(query.p), n=1,
                  mode=query.mode.value)
    return RadiusEstimate(single.value, single.lower_witness, single.method,
                          single.certified_digits, params)


def w_pA(ctx, query, seed=0, starts=DEFAULT_STARTS, seed_vectors=()):
    """
    Generalized joint A-radius of an operator tuple:
    ``sup (Σ |⟨T_k x, x⟩_A|^p)^{1/p}`` over the A-unit sphere, or the
    infimum for the Crawford mode. ``p = inf`` gives ``w_R − c_R`` from the
    ``p = 1`` functional.

    :param seed_vectors: Extra starting vectors of the space, e.g. witnesses
        of related radii.
    :raises DegenerateContext: If ``A = 0``.
    """
    operators = [require_ba(ctx, T) for T in query.operators]
    ctx.require_support()
    p = float(query.p)
    crawford = query.mode == TupleMode.CRAWFORD

    if len(operators) == 1 and not math.isinf(p):
        return _single_operator(ctx, operators[0], query, seed)

    Rs, seeds = _tuple_starts(ctx, operators, seed_vectors)
    rng = seeded_rng(seed, 'tuple-radius')

    if math.isinf(p):
        upper, z_up, rounds_up, _ = _tuple_extreme(Rs, 1.0, True, rng,
                                                   starts, seeds)
        lower, _, rounds_low, _ = _tuple_extreme(Rs, 1.0, False, rng,
                                                 starts, seeds)
        return RadiusEstimate(upper - lower, ctx.embed(z_up),
                              RadiusMethod.GRADIENT_REFINE,
                              _certified_digits(AGREEMENT, 1.0),
                              {'p': 'inf', 'n': len(operators),
                               'rhombic': upper, 'rhombic_crawford': lower,
                               'rounds': rounds_up + rounds_low,
                               'mode': query.mode.value})

    value, z, rounds, sampled = _tuple_extreme(Rs, p, not crawford, rng,
                                               starts, seeds)
    return _tuple_estimate(ctx, z, value, p, len(operators), rounds, sampled,
                           query.mode)


def tuple_radii(ctx, operators, exponents, seed=0, starts=DEFAULT_STARTS,
                seed_vectors=()):
    """
    ``w_{p,A}`` of one tuple for every finite p in `exponents`, as a dict.

    The searches share their starting vectors; afterwards each estimate is
    polished again from the best witness any exponent found, so that the
    radii of different exponents are compared on a common set of vectors.
    For every single exponent the result equals :func:`w_pA` or improves
    on it.

    :raises DegenerateContext: If ``A = 0``.
    """
    queries = [TupleRadiusQuery(operators, float(p)) for p in exponents]
    if any(math.isinf(query.p) for query in queries):
        raise ValueError("tuple_radii takes finite exponents only.")
    operators = [require_ba(ctx, T) for T in operators]
    ctx.require_support()
    if len(operators) == 1:
        return {query.p: _single_operator(ctx, operators[0], query, seed)
                for query in queries}

    Rs, seeds = _tuple_starts(ctx, operators, seed_vectors)
    found = {}
    for query in queries:
        rng = seeded_rng(seed, 'tuple-radius')
        found[query.p] = _tuple_extreme(Rs, query.p, True, rng, starts,
                                        seeds)

    witnesses = np.column_stack([z for _, z, _, _ in found.values()])
    estimates = {}
    for p, (value, z, rounds, sampled) in found.items():
        objective = _tuple_objective(Rs, p)
        values, _ = objective(witnesses)
        k = int(np.argmax(values))
        if values[k] ** (1.0 / p) > value:
            z, best = sphere_ascent(objective, witnesses[:, k])
            value = best ** (1.0 / p)
        estimates[p] = _tuple_estimate(ctx, z, value, p, len(operators),
                                       rounds, sampled, TupleMode.RADIUS)
    return estimates


def tuple_value_at(ctx, operators, p, x):
    """``(Σ |⟨T_k x, x⟩_A|^p)^{1/p}`` at a single vector."""
    values = np.array([abs(np.vdot(x, ctx.A @ T @ x)) for T in operators])
    if math.isinf(p):
        return float(values.max())
    return float(np.sum(values ** p) ** (1.0 / p))
