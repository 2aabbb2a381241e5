"""
Inequalities for operator tuples: the Euclidean A-radius bounds, the chain
between the generalized radii ``w_{p,A}``, its superquadratic refinement
and the bounds through ``Σ (T_k♯ T_k + T_k T_k♯)``.
"""

import functools
import math

import numpy as np

from semi_hilbert_lab.linalg import power_function
from semi_hilbert_lab.radii import TupleMode, TupleRadiusQuery, \
    random_sphere, tuple_radii, w_A, w_pA
from semi_hilbert_lab.semi_hilbert import a_adjoint, a_func, a_seminorm_op

from .checker import REFINE_MAXITER, REFINE_STARTS, SEARCH_SAMPLES, \
    InequalityChecker, Link, Severity, minimize_batched, requires


# Every exponent the tuple checkers compare; one search per tuple serves
# all of them.
TUPLE_EXPONENTS = (1.0, 1.5, 2.0, 3.0, 4.0)


class _TupleKey:
    """Hashable identity of a tuple on a context, for the radius cache."""

    def __init__(self, ctx, operators, seed):
        self.ctx, self.operators, self.seed = ctx, tuple(operators), seed
        self._digest = (seed, ctx.A.tobytes(), ctx.tol,
                        tuple(np.asarray(T).tobytes() for T in operators))

    def __hash__(self):
        return hash(self._digest)

    def __eq__(self, other):
        return isinstance(other, _TupleKey) and self._digest == other._digest


@functools.lru_cache(maxsize=64)
def _cached_radii(key):
    return tuple_radii(key.ctx, key.operators, TUPLE_EXPONENTS,
                       seed=key.seed)


@functools.lru_cache(maxsize=64)
def _cached_crawford(key):
    witnesses = [estimate.lower_witness
                 for estimate in _cached_radii(key).values()]
    return w_pA(key.ctx, TupleRadiusQuery(key.operators, 1.0,
                                          TupleMode.CRAWFORD),
                seed=key.seed, seed_vectors=witnesses)


def joint_radii(ctx, operators, exponents, seed):
    """
    ``w_{p,A}`` of the tuple for each of `exponents`, and the witnesses
    found. The radii come from one search over :data:`TUPLE_EXPONENTS`
    per tuple, cached, so that the radii of different exponents are
    compared on a common set of vectors; other exponents are searched
    starting from those witnesses.
    """
    cached = _cached_radii(_TupleKey(ctx, operators, seed))
    witnesses = [estimate.lower_witness for estimate in cached.values()]
    missing = [float(p) for p in exponents if float(p) not in cached]
    estimates = dict(cached)
    if missing:
        estimates.update(tuple_radii(ctx, operators, missing, seed=seed,
                                     seed_vectors=witnesses))
    return {float(p): estimates[float(p)] for p in exponents}, witnesses


def rhombic_crawford(ctx, operators, seed):
    """``c_{R,A}``, the infimum of ``Σ |⟨T_k x, x⟩_A|``; cached per tuple."""
    return _cached_crawford(_TupleKey(ctx, operators, seed))


def sum_of_squares(ctx, T):
    """``T♯ T + T T♯``."""
    S = a_adjoint(ctx, T)
    return S @ T + T @ S


def _power_sum(ctx, squares, p):
    return a_seminorm_op(ctx, sum(a_func(ctx, X, power_function(p))
                                  for X in squares))


def deviation_infimum(ctx, operators, target, p, rng,
                      samples=SEARCH_SAMPLES, starts=REFINE_STARTS,
                      maxiter=REFINE_MAXITER):
    """
    ``inf Σ_k ||⟨T_k x, x⟩_A| - target|^p`` over the A-unit sphere, by
    sampling followed by BFGS refinement of the best samples.
    """
    Rs = np.stack([ctx.reduce(T) for T in operators])
    size = ctx.rank_A

    def _values(Z):
        forms = np.abs(np.einsum('im,kij,jm->km', Z.conj(), Rs, Z))
        return np.sum(np.abs(forms - target) ** p, axis=0)

    Z = random_sphere(rng, size, samples)
    values = _values(Z)
    best = float(values.min())

    def _batch(V):
        W = V[:size] + 1j * V[size:]
        norms = np.linalg.norm(W, axis=0)
        result = np.full(W.shape[1], float(values.max()))
        nonzero = norms > 0.0
        result[nonzero] = _values(W[:, nonzero] / norms[nonzero])
        return result

    for k in np.argsort(values, kind='stable')[:starts]:
        z = Z[:, k]
        result = minimize_batched(_batch, np.concatenate([z.real, z.imag]),
                                  maxiter)
        best = min(best, float(result.fun))
    return best


class EuclideanRadiusBounds(InequalityChecker):
    """``‖Σ T_k T_k♯‖^{1/2} / (2√n) <= w_{e,A} <= ‖Σ T_k T_k♯‖^{1/2}``."""
    id = 'eq41_tuple_bounds'
    anchor = "In the same work, the authors proved"
    tuple_sizes = (1, 2, 3)

    def evaluate(self, instance, params, prepared, rng):
        ctx, operators = instance.ctx, instance.operators
        n = len(operators)
        root = math.sqrt(a_seminorm_op(ctx, sum(T @ a_adjoint(ctx, T)
                                                for T in operators)))
        estimates, _ = joint_radii(ctx, operators, (2.0,), instance.seed)
        w_e = estimates[2.0].value
        return [Link('||sum T_k T_k#||^1/2 / (2 sqrt n) <= w_e',
                     root / (2.0 * math.sqrt(n)), w_e),
                Link('w_e <= ||sum T_k T_k#||^1/2', w_e, root)]


class RadiusChain(InequalityChecker):
    """
    ``w_{p,A} <= w_{R,A} <= n^{1-1/p} w_{p,A}``. The difference
    ``w_{R,A} - c_{R,A}`` named ``w_{∞,A}`` is not bounded by ``w_{p,A}`` in
    general; it is recorded with the comparison as extras.
    """
    id = 'chain_468'
    anchor = "Combining the inequalities"
    tuple_sizes = (2, 3)
    EXPONENTS = (1.5, 2.0, 3.0)

    def parameter_grid(self, rng):
        return [{'p': p} for p in self.EXPONENTS]

    def evaluate(self, instance, params, prepared, rng):
        ctx, operators = instance.ctx, instance.operators
        p, n = float(params['p']), len(operators)
        estimates, _ = joint_radii(ctx, operators, (1.0, p), instance.seed)
        w_R, w_p = estimates[1.0].value, estimates[p].value
        crawford = rhombic_crawford(ctx, operators, instance.seed).value
        prepared.update(w_p=w_p, difference=w_R - crawford,
                        crawford=crawford)
        return [Link('w_p <= w_R', w_p, w_R),
                Link('w_R <= n^(1-1/p) w_p', w_R,
                     n ** (1.0 - 1.0 / p) * w_p)]

    def extras(self, instance, params, prepared, links, witness=None):
        ctx = instance.ctx
        difference = prepared['difference']
        return {'w_inf': difference,
                'rhombic_crawford': prepared['crawford'],
                'w_inf_le_w_p': bool(difference <= prepared['w_p']),
                'max_w_A': max(w_A(ctx, T).value
                               for T in instance.operators)}


class PowerMeanRadius(InequalityChecker):
    id = 'power_mean_49'
    anchor = "in the power mean inequality"
    tuple_sizes = (2, 3)
    EXPONENTS = ((1.0, 2.0), (2.0, 3.0), (1.5, 4.0))

    def parameter_grid(self, rng):
        return [{'p': p, 'q': q} for p, q in self.EXPONENTS]

    def evaluate(self, instance, params, prepared, rng):
        ctx, operators = instance.ctx, instance.operators
        p, q, n = float(params['p']), float(params['q']), len(operators)
        estimates, _ = joint_radii(ctx, operators, (p, q), instance.seed)
        return [Link('w_p <= n^(1/p-1/q) w_q', estimates[p].value,
                     n ** (1.0 / p - 1.0 / q) * estimates[q].value)]


class SuperquadraticRefinement(InequalityChecker):
    """
    ``w_R^p <= n^{p-1} w_p^p - n^{p-1} inf_x Σ ||⟨T_k x, x⟩_A| - w_R/n|^p``
    for ``p >= 2``. The infimum is itself a search, so an overestimate
    tightens the right-hand side; reported, never asserted.
    """
    id = 'superquad_refine'
    anchor = "general result for superquadratic functions"
    severity = Severity.EXPLORE
    tuple_sizes = (2, 3)
    degree = 0

    def parameter_grid(self, rng):
        return [{'p': 2.0}, {'p': 3.0}]

    def evaluate(self, instance, params, prepared, rng):
        ctx, operators = instance.ctx, instance.operators
        p, n = float(params['p']), len(operators)
        estimates, _ = joint_radii(ctx, operators, (1.0, p), instance.seed)
        w_R, w_p = estimates[1.0].value, estimates[p].value
        correction = deviation_infimum(ctx, operators, w_R / n, p, rng)
        prepared['correction'] = correction
        scale = n ** (p - 1.0)
        return [Link('w_R^p <= n^(p-1) (w_p^p - inf deviation)', w_R ** p,
                     scale * (w_p ** p - correction))]

    def extras(self, instance, params, prepared, links, witness=None):
        return {'deviation_infimum': prepared['correction']}


def _square_bounds(ctx, operators, p, seed):
    """
    ``w_{2p}^{2p}`` together with the sound lower bound
    ``‖Σ X_k‖^p / (4n)^p`` and the upper bound ``2^{-p} ‖Σ X_k^p‖`` for
    ``X_k = T_k♯ T_k + T_k T_k♯``.
    """
    n = len(operators)
    squares = [sum_of_squares(ctx, T) for T in operators]
    total = a_seminorm_op(ctx, sum(squares))
    estimates, _ = joint_radii(ctx, operators, (2.0 * p,), seed)
    w = estimates[2.0 * p].value
    return (w ** (2.0 * p), total ** p / (4.0 * n) ** p,
            _power_sum(ctx, squares, p) / 2.0 ** p, total)


class SquareSumTupleBounds(InequalityChecker):
    """
    ``‖Σ X_k‖^p / (4^p n^p) <= w_{2p,A}^{2p} <= 2^{-p} ‖Σ X_k^p‖_A``. The
    stated lower constant ``1/(2^{p+1} n^{p-1})`` rests on an identity that
    only holds as an inequality; its value is kept as ``literal_lower``.
    """
    id = 'thm10_tuple'
    anchor = "Let $B_k+iC_k$ be the $A$-Cartesian decomposition"
    tuple_sizes = (1, 2, 3)
    degree = 0

    def parameter_grid(self, rng):
        return [{'p': 1.0}, {'p': 2.0}]

    def evaluate(self, instance, params, prepared, rng):
        ctx, operators = instance.ctx, instance.operators
        p, n = float(params['p']), len(operators)
        value, lower, upper, total = _square_bounds(ctx, operators, p,
                                                    instance.seed)
        prepared['literal'] = total ** p / (2.0 ** (p + 1.0)
                                            * n ** (p - 1.0))
        return [Link('||sum X_k||^p / (4n)^p <= w_2p^2p', lower, value),
                Link('w_2p^2p <= ||sum X_k^p|| / 2^p', value, upper)]

    def extras(self, instance, params, prepared, links, witness=None):
        return {'literal_lower': prepared['literal']}


class PairSquareBounds(InequalityChecker):
    """
    The pair case ``n = 2`` of the tuple bounds, and for ``T = S``:
    ``½‖T♯T + TT♯‖_A <= w_{e,A}(T, T)² <= ‖T♯T + TT♯‖_A``.
    """
    id = 'cor_412'
    anchor = "A very interesting case of"
    tuple_sizes = (2,)
    degree = 0

    def parameter_grid(self, rng):
        return [{'variant': 'pair', 'p': 1.0}, {'variant': 'pair', 'p': 2.0},
                {'variant': 'equal', 'p': 1.0}]

    def evaluate(self, instance, params, prepared, rng):
        ctx = instance.ctx
        p = float(params['p'])
        if params['variant'] == 'equal':
            T = instance.operators[0]
            norm = a_seminorm_op(ctx, sum_of_squares(ctx, T))
            estimates, _ = joint_radii(ctx, (T, T), (2.0,), instance.seed)
            w_e = estimates[2.0].value
            return [Link('||T#T + TT#|| / 2 <= w_e(T,T)^2', norm / 2.0,
                         w_e ** 2),
                    Link('w_e(T,T)^2 <= ||T#T + TT#||', w_e ** 2, norm)]
        value, lower, upper, total = _square_bounds(ctx, instance.operators,
                                                    p, instance.seed)
        prepared['literal'] = total ** p / 2.0 ** (2.0 * p)
        return [Link('||X_T + X_S||^p / 8^p <= w_2p^2p(T,S)', lower, value),
                Link('w_2p^2p(T,S) <= ||X_T^p + X_S^p|| / 2^p', value,
                     upper)]

    def extras(self, instance, params, prepared, links, witness=None):
        if 'literal' in prepared:
            return {'literal_lower': prepared['literal']}
        return {}


class RhombicChain(InequalityChecker):
    """
    Bounds for the Rhombic A-radius through ``w_{2q,A}``:
    ``‖Σ X_k‖^{q/2} / (2^q n^{q/2}) <= w_{2q}^q <= w_R^q
    <= n^{q-1/2} w_{2q}^q <= n^{q-1/2} 2^{-q/2} ‖Σ X_k^q‖^{1/2}``.
    """
    id = 'rhombic_chain'
    anchor = "bounds for the Rhombic numerical radius"
    tuple_sizes = (2, 3)
    degree = 0

    def parameter_grid(self, rng):
        return [{'q': q} for q in (1.0, 1.5, 2.0)]

    def evaluate(self, instance, params, prepared, rng):
        ctx, operators = instance.ctx, instance.operators
        q, n = float(params['q']), len(operators)
        estimates, _ = joint_radii(ctx, operators, (1.0, 2.0 * q),
                                   instance.seed)
        w_R = estimates[1.0].value ** q
        w_2q = estimates[2.0 * q].value ** q
        squares = [sum_of_squares(ctx, T) for T in operators]
        total = a_seminorm_op(ctx, sum(squares))
        factor = n ** (q - 0.5)
        lower = total ** (q / 2.0) / (2.0 ** q * n ** (q / 2.0))
        upper = factor * 2.0 ** (-q / 2.0) \
            * math.sqrt(_power_sum(ctx, squares, q))
        prepared['literal'] = total ** q / (2.0 ** (2.0 * q + 1.0)
                                            * n ** (q - 1.0))
        return [Link('||sum X_k||^q/2 / (2^q n^q/2) <= w_2q^q', lower, w_2q),
                Link('w_2q^q <= w_R^q', w_2q, w_R),
                Link('w_R^q <= n^(q-1/2) w_2q^q', w_R, factor * w_2q),
                Link('n^(q-1/2) w_2q^q <= n^(q-1/2) ||sum X_k^q||^1/2 '
                     '/ 2^(q/2)', factor * w_2q, upper)]

    def extras(self, instance, params, prepared, links, witness=None):
        return {'literal_lower': prepared['literal']}


CHECKERS = [
    EuclideanRadiusBounds(),
    RadiusChain(),
    PowerMeanRadius(),
    SuperquadraticRefinement(),
    SquareSumTupleBounds(),
    PairSquareBounds(),
    RhombicChain(),
]
