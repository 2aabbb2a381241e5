"""
Schwarz-type inequalities for the semi-inner product: the A-positive Schwarz
inequality, the block positivity lemmas, the mixed Schwarz inequality and
its Cartesian and multi-operator extensions, and the Jensen/McCarty family.
"""

import numpy as np
import scipy.linalg

from semi_hilbert_lab.generators import Structure, gen_operator
from semi_hilbert_lab.linalg import hermitian_part, power_function, \
    psd_power, spectral_norm
from semi_hilbert_lab.radii import r_A
from semi_hilbert_lab.semi_hilbert import a_abs, a_abs_sharp, a_adjoint, \
    a_func, a_modulus, a_modulus_sharp, a_seminorm_op, block_bold_A, \
    cartesian

from .checker import PQ_GRID, R_GRID, TINY, InequalityChecker, Link, \
    Quantifier, Severity, Sphere, a_norms, alpha_grid, eigen_seeds, \
    fg_grid, function_pair, modulus_function, psd_link, quad, real_quad, \
    requires, search_links, sharp_modulus_function, singular_seed


def _roots(values):
    return np.sqrt(np.maximum(values, 0.0))


def _plain_quad(M, X):
    return np.real(np.sum(np.conj(X) * (M @ X), axis=0))


def _relative_residual(M, N):
    return float(np.linalg.norm(M - N) / (1.0 + np.linalg.norm(N)))


def _column(x):
    return np.asarray(x)[:, None]


class APositiveSchwarz(InequalityChecker):
    id = 'schwarz_A_positive'
    anchor = "version of Schwarz inequality for $A$-positive operators"
    structure = requires(Structure.A_POSITIVE)
    quantifier = Quantifier.VECTOR_PAIR
    degree = 2
    refine_starts = 0

    def prepare(self, instance, params, rng):
        return {'T': instance.operator}

    def seed_pairs(self, ctx, prepared):
        return eigen_seeds(ctx, prepared['T'])

    def batch_links(self, ctx, prepared, X, Y):
        T = prepared['T']
        return [('|<Tx,y>|^2 <= <Tx,x><Ty,y>',
                 np.abs(quad(ctx, T, X, Y)) ** 2,
                 real_quad(ctx, T, X) * real_quad(ctx, T, Y))]


class BlockPositivityEquivalence(InequalityChecker):
    """
    ``[[T, R♯], [R, S]]`` is A-positive on the direct sum iff
    ``|⟨Rx, y⟩_A|² <= ⟨Tx, x⟩_A ⟨Sy, y⟩_A`` for all x, y. `R` is a random
    operator scaled to `factor` times the critical scale at which the block
    stops being positive, so both outcomes are exercised.
    """
    id = 'lemma1_block_equiv'
    anchor = "A-positive operator in"
    structure = requires(Structure.A_POSITIVE)
    tuple_sizes = (2,)
    degree = 2
    FACTORS = (0.5, 0.9, 1.1, 2.0)

    def parameter_grid(self, rng):
        return [{'factor': factor} for factor in self.FACTORS]

    def prepare(self, instance, params, rng):
        ctx = instance.ctx
        T, S = instance.operators
        R0 = gen_operator(ctx, frozenset({Structure.GENERAL_IN_BA}), rng)
        T_red = hermitian_part(ctx.reduce(T))
        S_red = hermitian_part(ctx.reduce(S))
        T_root = psd_power(T_red, -0.5, ctx.tol)
        S_root = psd_power(S_red, -0.5, ctx.tol)
        U, s, Vh = np.linalg.svd(S_root @ ctx.reduce(R0) @ T_root)
        critical = 1.0 / s[0] if s[0] > 0.0 else 1.0
        R = params['factor'] * critical * R0

        seeds = []
        u, v = T_root @ Vh[0].conj(), S_root @ U[:, 0]
        if np.linalg.norm(u) > 0.0 and np.linalg.norm(v) > 0.0:
            seeds.append((ctx.embed(u / np.linalg.norm(u)),
                          ctx.embed(v / np.linalg.norm(v))))
        return {'T': T, 'S': S, 'R': R, 'T_red': T_red, 'S_red': S_red,
                'critical': critical, 'seeds': seeds}

    def evaluate(self, instance, params, prepared, rng):
        ctx = instance.ctx
        T, S, R = prepared['T'], prepared['S'], prepared['R']
        R_red = ctx.reduce(R)
        block = np.block([[prepared['T_red'], R_red.conj().T],
                          [R_red, prepared['S_red']]])
        block_link = psd_link('block', block)
        block_psd = block_link.relative_slack >= -ctx.tol.psd_tol

        def _scalar(X, Y):
            return [('|<Rx,y>|^2 <= <Tx,x><Sy,y>',
                     np.abs(quad(ctx, R, X, Y)) ** 2,
                     real_quad(ctx, T, X) * real_quad(ctx, S, Y))]
        search = search_links(ctx, _scalar, rng, pair=True,
                              seeds=prepared['seeds'], starts=1)
        scalar = search.links[0]
        scalar_slack = scalar.slack / max(abs(scalar.lhs), abs(scalar.rhs),
                                          TINY)
        scalar_holds = scalar_slack >= -ctx.tol.slack_tol

        prepared.update(block_slack=block_link.relative_slack,
                        block_psd=block_psd, scalar_slack=scalar_slack,
                        scalar_holds=scalar_holds, search=search.budget)
        agree = block_psd == scalar_holds
        return [Link('block A-positive <=> scalar inequality',
                     0.0 if agree else 2.0, 1.0)]

    def extras(self, instance, params, prepared, links, witness=None):
        return {'critical_scale': prepared['critical'],
                'block_psd': bool(prepared['block_psd']),
                'block_relative_lambda_min': prepared['block_slack'],
                'scalar_holds': bool(prepared['scalar_holds']),
                'scalar_relative_slack': prepared['scalar_slack'],
                'scalar_search': prepared['search']}


class FunctionalBlockPositivity(InequalityChecker):
    """
    With ``T = |X|_A``, ``S = |X♯|_A`` and ``R = X`` (so that ``SR = RT``),
    the block ``[[f²(T), R♯], [R, g²(S)]]`` is A-positive.
    """
    id = 'lemma2_fg_block'
    anchor = "is also ${\\bf{A}}$-positive"
    degree = 2

    def parameter_grid(self, rng):
        return fg_grid(rng)

    def evaluate(self, instance, params, prepared, rng):
        ctx, X = instance.ctx, instance.operator
        pair = function_pair(params)
        F2 = modulus_function(ctx, X, lambda t: pair.f(t) ** 2)
        G2 = sharp_modulus_function(ctx, X, lambda t: pair.g(t) ** 2)
        X_red = ctx.reduce(X)
        block = np.block([[ctx.reduce(F2), X_red.conj().T],
                          [X_red, ctx.reduce(G2)]])
        return [psd_link('[[f^2(|X|), X#], [X, g^2(|X#|)]] A-positive',
                         block)]

    def extras(self, instance, params, prepared, links, witness=None):
        ctx, X = instance.ctx, instance.operator
        left = ctx.reduce(a_modulus_sharp(ctx, X) @ X)
        right = ctx.reduce(X @ a_modulus(ctx, X))
        return {'intertwining_residual': _relative_residual(left, right)}


class AbsoluteValueBlock(InequalityChecker):
    """
    For A-positive `T` commuting with `A`, ``F = [[0, T♯], [T, 0]]`` has the
    block diagonal modulus ``diag(|T|_A, |T♯|_A)`` and ``F + |F|_A`` is
    A-positive on the direct sum.
    """
    id = 'lemma3_abs_block'
    anchor = "Hence ${\\bf{F}} + |{\\bf{F}}|_A$"
    structure = requires(Structure.A_POSITIVE, Structure.COMMUTES_WITH_A)

    def evaluate(self, instance, params, prepared, rng):
        ctx, T = instance.ctx, instance.operator
        bold = block_bold_A(ctx)
        S = a_adjoint(ctx, T)
        zero = np.zeros_like(T)
        F = np.block([[zero, S], [T, zero]])
        modulus, modulus_sharp = a_modulus(ctx, T), a_modulus_sharp(ctx, T)
        literal, literal_sharp = a_abs(ctx, T), a_abs_sharp(ctx, T)

        prepared['modulus_residual'] = _relative_residual(
            a_modulus(bold, F),
            scipy.linalg.block_diag(modulus, modulus_sharp))
        prepared['literal_residual'] = _relative_residual(
            a_abs(bold, F), scipy.linalg.block_diag(literal, literal_sharp))
        literal_block = np.block([[literal, S], [T, literal_sharp]])
        prepared['literal_link'] = psd_link(
            'literal', hermitian_part(bold.A @ literal_block))

        block = np.block([[modulus, S], [T, modulus_sharp]])
        return [psd_link('[[|T|, T#], [T, |T#|]] A-positive',
                         bold.reduce(block))]

    def extras(self, instance, params, prepared, links, witness=None):
        return {'modulus_block_residual': prepared['modulus_residual'],
                'literal_block_residual': prepared['literal_residual'],
                'literal_relative_lambda_min':
                    prepared['literal_link'].relative_slack}


class MixedSchwarz(InequalityChecker):
    id = 'thm1_mixed_schwarz'
    anchor = "satisfying f(t)g(t) =t"
    structure = requires(Structure.COMMUTES_WITH_A)
    quantifier = Quantifier.VECTOR_PAIR
    refine_starts = 0

    def parameter_grid(self, rng):
        return fg_grid(rng)

    def prepare(self, instance, params, rng):
        ctx, T = instance.ctx, instance.operator
        pair = function_pair(params)
        return {'T': T, 'F': modulus_function(ctx, T, pair.f),
                'G': sharp_modulus_function(ctx, T, pair.g)}

    def seed_pairs(self, ctx, prepared):
        return [singular_seed(ctx, prepared['T'])]

    def batch_links(self, ctx, prepared, X, Y):
        return [('|<Tx,y>| <= ||f(|T|)x|| ||g(|T#|)y||',
                 np.abs(quad(ctx, prepared['T'], X, Y)),
                 a_norms(ctx, prepared['F'], X)
                 * a_norms(ctx, prepared['G'], Y))]


class KatoAlpha(InequalityChecker):
    """
    ``|⟨Tx, y⟩_A| <= ⟨|T|^{2α} x, x⟩^{1/2} ⟨|T♯|^{2(1-α)} y, y⟩^{1/2}``,
    the square root of the displayed form.
    """
    id = 'kato_alpha'
    anchor = "Choosing $f(t)=t^\\alpha$"
    structure = requires(Structure.COMMUTES_WITH_A)
    quantifier = Quantifier.VECTOR_PAIR
    refine_starts = 0

    def parameter_grid(self, rng):
        return [{'alpha': alpha} for alpha in alpha_grid(rng)]

    def prepare(self, instance, params, rng):
        ctx, T = instance.ctx, instance.operator
        alpha = float(params['alpha'])
        return {'T': T, 'alpha': alpha,
                'M': a_modulus(ctx, T, 2.0 * alpha),
                'N': a_modulus_sharp(ctx, T, 2.0 * (1.0 - alpha))}

    def seed_pairs(self, ctx, prepared):
        return [singular_seed(ctx, prepared['T'])]

    def batch_links(self, ctx, prepared, X, Y):
        return [('|<Tx,y>| <= <|T|^2a x,x>^1/2 <|T#|^2(1-a) y,y>^1/2',
                 np.abs(quad(ctx, prepared['T'], X, Y)),
                 _roots(real_quad(ctx, prepared['M'], X))
                 * _roots(real_quad(ctx, prepared['N'], Y)))]

    def extras(self, instance, params, prepared, links, witness=None):
        if witness is None:
            return {}
        ctx, T, alpha = instance.ctx, prepared['T'], prepared['alpha']
        x, y = witness
        gram = hermitian_part(T.conj().T @ ctx.A @ T)
        gram_sharp = hermitian_part(ctx.A @ T @ ctx.A_pinv @ T.conj().T
                                    @ ctx.A)
        literal = _roots(real_quad(ctx, psd_power(gram, alpha, ctx.tol),
                                   _column(x))) \
            * _roots(real_quad(ctx, psd_power(gram_sharp, 1.0 - alpha,
                                              ctx.tol), _column(y)))
        return {'literal_rhs': float(literal[0])}


class KatoHalf(KatoAlpha):
    id = 'kato_half'
    anchor = "Setting $\\alpha=\\frac{1}{2}$"
    stream = 'kato_alpha'

    def parameter_grid(self, rng):
        return [{'alpha': 0.5}]


class SpectralFactorSchwarz(InequalityChecker):
    """
    Two readings of the spectral-radius refinement. Read literally, the factor
    ``r_A(T)`` multiplies the mixed Schwarz bound of `T` itself; the product
    reading bounds ``|⟨TSx, y⟩_A|`` by ``r_A(S)`` times that bound for an
    ``S`` with ``|T|_A S = S♯ |T|_A``, here a function of ``T♯T``.
    """
    id = 'thm2_spectral_factor'
    anchor = "The proof goes likewise the proof"
    severity = Severity.EXPLORE
    structure = requires(Structure.COMMUTES_WITH_A)
    quantifier = Quantifier.VECTOR_PAIR

    def parameter_grid(self, rng):
        return fg_grid(rng)

    def prepare(self, instance, params, rng):
        ctx, T = instance.ctx, instance.operator
        pair = function_pair(params)
        S = a_func(ctx, a_adjoint(ctx, T) @ T,
                   lambda s: 0.5 + s / (1.0 + s))
        return {'T': T, 'S': S, 'TS': T @ S,
                'F': modulus_function(ctx, T, pair.f),
                'G': sharp_modulus_function(ctx, T, pair.g),
                'r_T': r_A(ctx, T).limit, 'r_S': r_A(ctx, S).limit}

    def batch_links(self, ctx, prepared, X, Y):
        bound = a_norms(ctx, prepared['F'], X) \
            * a_norms(ctx, prepared['G'], Y)
        return [('literal: |<Tx,y>| <= r_A(T) ||f(|T|)x|| ||g(|T#|)y||',
                 np.abs(quad(ctx, prepared['T'], X, Y)),
                 prepared['r_T'] * bound),
                ('product: |<TSx,y>| <= r_A(S) ||f(|T|)x|| ||g(|T#|)y||',
                 np.abs(quad(ctx, prepared['TS'], X, Y)),
                 prepared['r_S'] * bound)]

    def extras(self, instance, params, prepared, links, witness=None):
        ctx, T, S = instance.ctx, prepared['T'], prepared['S']
        modulus = a_modulus(ctx, T)
        residual = _relative_residual(ctx.reduce(modulus @ S),
                                      ctx.reduce(a_adjoint(ctx, S) @ modulus))
        return {'r_A_T': prepared['r_T'], 'r_A_S': prepared['r_S'],
                'intertwining_residual': residual}


JENSEN_FUNCTIONS = {
    'square': (np.square, True),
    'expm1': (np.expm1, True),
    'power_1': (power_function(1.0), True),
    'power_1.5': (power_function(1.5), True),
    'power_2': (power_function(2.0), True),
    'power_3': (power_function(3.0), True),
    'sqrt': (np.sqrt, False),
    'log1p': (np.log1p, False),
}


class OperatorJensen(InequalityChecker):
    """
    ``f(⟨Tx, x⟩_A) <= ⟨f(T) x, x⟩_A`` for convex `f` and A-unit `x`;
    reversed for concave `f`.
    """
    id = 'lemma4_jensen'
    anchor = "non-negative convex function"
    structure = requires(Structure.A_POSITIVE)
    quantifier = Quantifier.VECTOR
    degree = 0
    refine_starts = 0

    def parameter_grid(self, rng):
        return [{'function': name} for name in JENSEN_FUNCTIONS]

    def prepare(self, instance, params, rng):
        ctx, T = instance.ctx, instance.operator
        f, convex = JENSEN_FUNCTIONS[params['function']]
        return {'T': T, 'f': f, 'convex': convex, 'fT': a_func(ctx, T, f)}

    def seed_pairs(self, ctx, prepared):
        return eigen_seeds(ctx, prepared['T'])

    def batch_links(self, ctx, prepared, X, Y):
        value = prepared['f'](np.maximum(real_quad(ctx, prepared['T'], X),
                                         0.0))
        mean = real_quad(ctx, prepared['fT'], X)
        if prepared['convex']:
            return [('f(<Tx,x>) <= <f(T)x,x>', value, mean)]
        return [('<f(T)x,x> <= f(<Tx,x>)', mean, value)]


class HolderMcCarty(InequalityChecker):
    id = 'mccarty_up'
    anchor = "version of H\\\"older--McCarty inequality"
    structure = requires(Structure.A_POSITIVE)
    quantifier = Quantifier.VECTOR
    degree = 0
    refine_starts = 0

    def parameter_grid(self, rng):
        return [{'r': r} for r in R_GRID]

    def prepare(self, instance, params, rng):
        ctx, T = instance.ctx, instance.operator
        r = float(params['r'])
        return {'T': T, 'r': r, 'Tr': a_func(ctx, T, power_function(r))}

    def seed_pairs(self, ctx, prepared):
        return eigen_seeds(ctx, prepared['T'])

    def _sides(self, ctx, prepared, X):
        base = np.maximum(real_quad(ctx, prepared['T'], X), 0.0) \
            ** prepared['r']
        return base, real_quad(ctx, prepared['Tr'], X)

    def batch_links(self, ctx, prepared, X, Y):
        base, power = self._sides(ctx, prepared, X)
        return [('<Tx,x>^r <= <T^r x,x>', base, power)]


class HolderMcCartyDown(HolderMcCarty):
    id = 'mccarty_down'

    def parameter_grid(self, rng):
        return [{'r': r} for r in alpha_grid(rng)]

    def batch_links(self, ctx, prepared, X, Y):
        base, power = self._sides(ctx, prepared, X)
        return [('<T^r x,x> <= <Tx,x>^r', power, base)]


class McCartyAPositive(InequalityChecker):
    """
    ``⟨Tx, x⟩_A^r <= ⟨T (AT)^{r-1} x, x⟩_A`` for unit `x` and ``r >= 1``,
    reversed for ``0 <= r <= 1``; both sides are quadratic forms of the
    plain positive matrix ``AT``.
    """
    id = 'mccarty_A_positive'
    anchor = "if and only if $AT$ is positive"
    structure = requires(Structure.A_POSITIVE)
    quantifier = Quantifier.VECTOR
    sphere = Sphere.UNIT
    degree = 0
    refine_starts = 0

    def parameter_grid(self, rng):
        return [{'r': r} for r in R_GRID + (0.25, 0.5, 0.75)]

    def prepare(self, instance, params, rng):
        ctx, T = instance.ctx, instance.operator
        r = float(params['r'])
        AT = hermitian_part(ctx.A @ T)
        return {'T': T, 'r': r, 'AT': AT,
                'ATr': psd_power(AT, r, ctx.tol)}

    def seed_pairs(self, ctx, prepared):
        _, vectors = np.linalg.eigh(prepared['AT'])
        return [(vectors[:, k],) * 2 for k in (0, -1)]

    def batch_links(self, ctx, prepared, X, Y):
        r = prepared['r']
        base = np.maximum(_plain_quad(prepared['AT'], X), 0.0) ** r
        power = _plain_quad(prepared['ATr'], X)
        if r >= 1.0:
            return [('<Tx,x>_A^r <= <T(AT)^(r-1) x,x>_A', base, power)]
        return [('<T(AT)^(r-1) x,x>_A <= <Tx,x>_A^r', power, base)]

    def extras(self, instance, params, prepared, links, witness=None):
        r = prepared['r']
        if r < 1.0:
            return {}
        ctx, T, AT = instance.ctx, prepared['T'], prepared['AT']
        literal = ctx.A @ T @ psd_power(AT, r - 1.0, ctx.tol)
        return {'literal_form_residual':
                _relative_residual(literal, prepared['ATr'])}

    def magnitude(self, instance):
        ctx = instance.ctx
        return spectral_norm(ctx.A @ instance.operator)


class SharpSelfadjointAbs(InequalityChecker):
    id = 'cor2_abs_bound'
    anchor = "$T$ is $\\sharp_A$-selfadjoint"
    structure = requires(Structure.SHARP_A_SELFADJOINT)
    quantifier = Quantifier.VECTOR
    refine_starts = 0

    def prepare(self, instance, params, rng):
        ctx, T = instance.ctx, instance.operator
        return {'T': T, 'M': a_modulus(ctx, T)}

    def seed_pairs(self, ctx, prepared):
        return eigen_seeds(ctx, prepared['T'])

    def batch_links(self, ctx, prepared, X, Y):
        return [('|<Tx,x>| <= <|T|x,x>',
                 np.abs(quad(ctx, prepared['T'], X)),
                 real_quad(ctx, prepared['M'], X))]

    def extras(self, instance, params, prepared, links, witness=None):
        if witness is None:
            return {}
        ctx = instance.ctx
        literal = real_quad(ctx, a_abs(ctx, prepared['T']),
                            _column(witness[0]))
        return {'literal_rhs': float(literal[0])}


def holder_grid(rng):
    return [dict(fg, p=p, q=q) for fg in fg_grid(rng) for p, q in PQ_GRID]


def _function_moduli(ctx, operators, params):
    pair = function_pair(params)
    return ([modulus_function(ctx, T, pair.f) for T in operators],
            [sharp_modulus_function(ctx, T, pair.g) for T in operators])


class MultiHolder(InequalityChecker):
    id = 'multi_holder'
    anchor = "follows by the H\\\"older inequality"
    structure = requires(Structure.COMMUTES_WITH_A)
    tuple_sizes = (2, 3)
    quantifier = Quantifier.VECTOR_PAIR

    def parameter_grid(self, rng):
        return holder_grid(rng)

    def prepare(self, instance, params, rng):
        ctx = instance.ctx
        Fs, Gs = _function_moduli(ctx, instance.operators, params)
        return {'sum': sum(instance.operators), 'Fs': Fs, 'Gs': Gs,
                'p': float(params['p']), 'q': float(params['q'])}

    def batch_links(self, ctx, prepared, X, Y):
        p, q = prepared['p'], prepared['q']
        nf = np.array([a_norms(ctx, F, X) for F in prepared['Fs']])
        ng = np.array([a_norms(ctx, G, Y) for G in prepared['Gs']])
        middle = np.sum(nf * ng, axis=0)
        holder = np.sum(nf ** p, axis=0) ** (1.0 / p) \
            * np.sum(ng ** q, axis=0) ** (1.0 / q)
        return [('|<sum T_i x,u>| <= sum ||f(|T_i|)x|| ||g(|T_i#|)u||',
                 np.abs(quad(ctx, prepared['sum'], X, Y)), middle),
                ('sum <= Hoelder bound', middle, holder)]


class NormSumHolder(InequalityChecker):
    """
    ``‖Σ T_i‖_A <= (Σ ‖f(|T_i|_A)‖_A^p)^{1/p} (Σ ‖g(|T_i♯|_A)‖_A^q)^{1/q}``;
    a single operator gives ``‖S‖_A <= ‖|S|^α‖_A ‖|S♯|^{1-α}‖_A``.
    """
    id = 'norm_sum'
    anchor = "one may has the following norm inequality"
    structure = requires(Structure.COMMUTES_WITH_A)
    tuple_sizes = (1, 2, 3)

    def parameter_grid(self, rng):
        return holder_grid(rng)

    def evaluate(self, instance, params, prepared, rng):
        ctx = instance.ctx
        p, q = float(params['p']), float(params['q'])
        Fs, Gs = _function_moduli(ctx, instance.operators, params)
        nf = np.array([a_seminorm_op(ctx, F) for F in Fs])
        ng = np.array([a_seminorm_op(ctx, G) for G in Gs])
        bound = np.sum(nf ** p) ** (1.0 / p) * np.sum(ng ** q) ** (1.0 / q)
        return [Link('||sum T_i|| <= Hoelder bound',
                     a_seminorm_op(ctx, sum(instance.operators)),
                     float(bound))]


class _CartesianChecker(InequalityChecker):
    structure = requires(Structure.COMMUTES_WITH_A)
    quantifier = Quantifier.VECTOR_PAIR

    def prepare(self, instance, params, rng):
        ctx, T = instance.ctx, instance.operator
        parts = cartesian(ctx, T)
        return {'T': T, 'P': parts.real_part, 'Q': parts.imag_part}

    def _triangle(self, ctx, prepared, X, Y):
        return (np.abs(quad(ctx, prepared['T'], X, Y)),
                np.abs(quad(ctx, prepared['P'], X, Y))
                + np.abs(quad(ctx, prepared['Q'], X, Y)))


class CartesianMixedSchwarz(_CartesianChecker):
    id = 'thm3_cartesian'
    anchor = "with the $A$-Cartesian decomposition"

    def parameter_grid(self, rng):
        return fg_grid(rng)

    def prepare(self, instance, params, rng):
        prepared = super().prepare(instance, params, rng)
        ctx, pair = instance.ctx, function_pair(params)
        for name in ('P', 'Q'):
            prepared['f' + name] = modulus_function(ctx, prepared[name],
                                                    pair.f)
            prepared['g' + name] = sharp_modulus_function(ctx, prepared[name],
                                                          pair.g)
        return prepared

    def batch_links(self, ctx, prepared, X, Y):
        lhs, split = self._triangle(ctx, prepared, X, Y)
        bound = sum(a_norms(ctx, prepared['f' + name], X)
                    * a_norms(ctx, prepared['g' + name], Y)
                    for name in ('P', 'Q'))
        return [('|<Tx,y>| <= |<Px,y>| + |<Qx,y>|', lhs, split),
                ('|<Px,y>| + |<Qx,y>| <= mixed Schwarz bounds', split,
                 bound)]


class _CartesianAlpha(_CartesianChecker):

    def parameter_grid(self, rng):
        return [{'alpha': alpha} for alpha in alpha_grid(rng)]

    def prepare(self, instance, params, rng):
        prepared = super().prepare(instance, params, rng)
        ctx, alpha = instance.ctx, float(params['alpha'])
        for name in ('P', 'Q'):
            prepared['M' + name] = a_modulus(ctx, prepared[name], 2.0 * alpha)
            prepared['N' + name] = a_modulus_sharp(ctx, prepared[name],
                                                   2.0 * (1.0 - alpha))
        return prepared

    def _forms(self, ctx, prepared, X, Y):
        return {name: (real_quad(ctx, prepared['M' + name], X),
                       real_quad(ctx, prepared['N' + name], Y))
                for name in ('P', 'Q')}


class CartesianKato(_CartesianAlpha):
    """
    ``|⟨Tx, y⟩_A| <= Σ_{P,Q} ⟨|P|^{2α} x, x⟩^{1/2} ⟨|P♯|^{2(1-α)} y, y⟩^{1/2}``;
    the vector-norm reading of the same display is recorded as
    ``literal_rhs``.
    """
    id = 'cor3_cartesian_alpha'
    anchor = "Setting $f(t)=t^{\\alpha}$ and $g(t)=t^{1-\\alpha}$"

    def batch_links(self, ctx, prepared, X, Y):
        lhs, _ = self._triangle(ctx, prepared, X, Y)
        forms = self._forms(ctx, prepared, X, Y)
        bound = sum(_roots(a) * _roots(b) for a, b in forms.values())
        return [('|<Tx,y>| <= sum <|P|^2a x,x>^1/2 <|P#|^2(1-a) y,y>^1/2',
                 lhs, bound)]

    def extras(self, instance, params, prepared, links, witness=None):
        if witness is None:
            return {}
        ctx = instance.ctx
        x, y = _column(witness[0]), _column(witness[1])
        literal = sum(a_norms(ctx, prepared['M' + name], x)
                      * a_norms(ctx, prepared['N' + name], y)
                      for name in ('P', 'Q'))
        return {'literal_rhs': float(literal[0])}


class CartesianHalfSum(_CartesianAlpha):
    id = 'cor4_cartesian_half_sum'
    anchor = "companion decomposition of the mixed Schwarz"

    def batch_links(self, ctx, prepared, X, Y):
        lhs, _ = self._triangle(ctx, prepared, X, Y)
        forms = self._forms(ctx, prepared, X, Y)
        products = sum(_roots(a) * _roots(b) for a, b in forms.values())
        half_sum = sum((a + b) / 2.0 for a, b in forms.values())
        return [('|<Tx,y>| <= sum of square-root products', lhs, products),
                ('products <= half sums', products, half_sum)]


CHECKERS = [
    APositiveSchwarz(),
    BlockPositivityEquivalence(),
    FunctionalBlockPositivity(),
    AbsoluteValueBlock(),
    MixedSchwarz(),
    KatoAlpha(),
    KatoHalf(),
    SpectralFactorSchwarz(),
    OperatorJensen(),
    HolderMcCarty(),
    HolderMcCartyDown(),
    McCartyAPositive(),
    SharpSelfadjointAbs(),
    MultiHolder(),
    NormSumHolder(),
    CartesianMixedSchwarz(),
    CartesianKato(),
    CartesianHalfSum(),
]
