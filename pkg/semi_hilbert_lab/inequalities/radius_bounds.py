"""
Upper and lower bounds for the A-numerical radius of one operator: power
bounds through the moduli, Cartesian-decomposition bounds and the
``CTD + ESF`` family.
"""

import numpy as np

from semi_hilbert_lab.generators import Structure, gen_operator
from semi_hilbert_lab.linalg import psd_power
from semi_hilbert_lab.radii import w_A
from semi_hilbert_lab.semi_hilbert import a_adjoint, a_modulus, \
    a_modulus_sharp, a_seminorm_op, cartesian, identity

from .checker import R_GRID, InequalityChecker, Link, alpha_grid, \
    function_pair, modulus_function, requires, sharp_modulus_function
from .schwarz import holder_grid

_GENERAL = frozenset({Structure.GENERAL_IN_BA})


def _alpha_r_grid(rng, name='r'):
    return [{'alpha': alpha, name: r}
            for alpha in alpha_grid(rng) for r in R_GRID]


def _mixed_sum(ctx, T, alpha, r=1.0):
    """``|T|^{2rα} + |T♯|^{2r(1-α)}`` in the A-functional calculus."""
    return a_modulus(ctx, T, 2.0 * r * alpha) \
        + a_modulus_sharp(ctx, T, 2.0 * r * (1.0 - alpha))


class PowerRadiusBound(InequalityChecker):
    id = 'thm4_wr'
    anchor = "$0 \\le \\alpha \\le 1$ and $r\\ge1$"
    structure = requires(Structure.COMMUTES_WITH_A)
    degree = 0

    def parameter_grid(self, rng):
        return _alpha_r_grid(rng)

    def evaluate(self, instance, params, prepared, rng):
        ctx, T = instance.ctx, instance.operator
        alpha, r = float(params['alpha']), float(params['r'])
        bound = a_seminorm_op(ctx, _mixed_sum(ctx, T, alpha, r)) / 2.0
        return [Link('w_A^r <= ||(|T|^2ra + |T#|^2r(1-a)) / 2||',
                     w_A(ctx, T).value ** r, bound)]


class ConvexPowerRadiusBound(InequalityChecker):
    id = 'thm5_w2r'
    anchor = "(by AM-GM inequality)"
    structure = requires(Structure.COMMUTES_WITH_A)
    degree = 0

    def parameter_grid(self, rng):
        return _alpha_r_grid(rng)

    def evaluate(self, instance, params, prepared, rng):
        ctx, T = instance.ctx, instance.operator
        alpha, r = float(params['alpha']), float(params['r'])
        combination = alpha * a_modulus(ctx, T, 2.0 * r) \
            + (1.0 - alpha) * a_modulus_sharp(ctx, T, 2.0 * r)
        return [Link('w_A^2r <= ||a|T|^2r + (1-a)|T#|^2r||',
                     w_A(ctx, T).value ** (2.0 * r),
                     a_seminorm_op(ctx, combination))]


class FunctionalHolderRadius(InequalityChecker):
    """
    Two bounds for ``w_A(T)`` from the Cartesian parts ``T = P + iQ``: the
    product ``‖Σ f^p(|P|)‖^{1/p} ‖Σ g^q(|P♯|)‖^{1/q}`` and the norm of the
    weighted mean ``Σ f^p(|P|)/p + Σ g^q(|P♯|)/q``. Both come from the same
    pointwise estimate; the product does not always dominate the mean, so
    each is its own link.
    """
    id = 'thm6_fg_holder'
    anchor = "for all $p,q\\ge2$ with"
    structure = requires(Structure.COMMUTES_WITH_A)

    def parameter_grid(self, rng):
        return holder_grid(rng)

    def parameter_hypotheses(self, params):
        p, q = float(params['p']), float(params['q'])
        if p < 2.0 or q < 2.0:
            return ["p = %g, q = %g: both exponents must be at least 2"
                    % (p, q)]
        return []

    def evaluate(self, instance, params, prepared, rng):
        ctx, T = instance.ctx, instance.operator
        pair = function_pair(params)
        p, q = float(params['p']), float(params['q'])
        parts = cartesian(ctx, T)
        halves = (parts.real_part, parts.imag_part)
        F = sum(modulus_function(ctx, M, lambda t: pair.f(t) ** p)
                for M in halves)
        G = sum(sharp_modulus_function(ctx, M, lambda t: pair.g(t) ** q)
                for M in halves)
        product = a_seminorm_op(ctx, F) ** (1.0 / p) \
            * a_seminorm_op(ctx, G) ** (1.0 / q)
        mean = a_seminorm_op(ctx, F / p + G / q)
        prepared.update(product=product, mean=mean)
        w = w_A(ctx, T).value
        return [Link('w_A <= ||sum f^p||^1/p ||sum g^q||^1/q', w, product),
                Link('w_A <= ||sum f^p / p + sum g^q / q||', w, mean)]

    def extras(self, instance, params, prepared, links, witness=None):
        return {'product_bound': prepared['product'],
                'mean_bound': prepared['mean'],
                'product_le_mean': bool(prepared['product']
                                        <= prepared['mean'])}


class SumPowerRadius(InequalityChecker):
    """
    ``w_A^p(Σ T_i) <= n^{p-1}/2 ‖Σ (|T_i|^{2pα} + |T_i♯|^{2p(1-α)})‖_A``.
    The constant ``1/(2n^{p-1})`` in the stated form fails already for
    ``T_1 = T_2``; its value is kept as ``literal_rhs``.
    """
    id = 'thm7_sum'
    anchor = "such that $AT_i = T_iA$"
    structure = requires(Structure.COMMUTES_WITH_A)
    tuple_sizes = (2, 3)
    degree = 0

    def parameter_grid(self, rng):
        return _alpha_r_grid(rng, name='p')

    def evaluate(self, instance, params, prepared, rng):
        ctx, operators = instance.ctx, instance.operators
        alpha, p = float(params['alpha']), float(params['p'])
        n = len(operators)
        norm = a_seminorm_op(ctx, sum(_mixed_sum(ctx, T, alpha, p)
                                      for T in operators))
        prepared['literal'] = norm / (2.0 * n ** (p - 1.0))
        return [Link('w_A^p(sum T_i) <= n^(p-1)/2 ||sum moduli||',
                     w_A(ctx, sum(operators)).value ** p,
                     n ** (p - 1.0) / 2.0 * norm)]

    def extras(self, instance, params, prepared, links, witness=None):
        return {'literal_rhs': prepared['literal']}


class CTDESFBound(InequalityChecker):
    """
    ``w_A(CTD + ESF) <= ½‖D♯|T|^{2α}D + C|T♯|^{2(1-α)}C♯ + F♯|S|^{2α}F
    + E|S♯|^{2(1-α)}E♯‖_A`` with random `C`, `D`, `E`, `F` in ``B_A``, and
    its special cases: ``T = I, S = 0``; ``C = D = E = F = I``; and the
    (anti)commutator ``T = S = I, E = D, F = ±C``. For ``T = I`` the modulus
    is the projection onto range(A); the ``A^α`` reading is ``literal_rhs``.
    """
    id = 'thm8_ctdesf'
    anchor = "w_A\\left(CTD+ESF\\right)"
    structure = requires(Structure.COMMUTES_WITH_A)
    tuple_sizes = (2,)
    degree = 0
    VARIANTS = ('general', 'remark_37', 'remark_38', 'remark_39_plus',
                'remark_39_minus')

    def parameter_grid(self, rng):
        return [{'variant': variant, 'alpha': alpha}
                for variant in self.VARIANTS for alpha in alpha_grid(rng)]

    def _operands(self, ctx, instance, variant, rng):
        T, S = instance.operators
        C, D, E, F = (gen_operator(ctx, _GENERAL, rng) for _ in range(4))
        one = identity(ctx)
        if variant == 'remark_37':
            T, S = one, np.zeros_like(one)
        elif variant == 'remark_38':
            C = D = E = F = one
        elif variant in ('remark_39_plus', 'remark_39_minus'):
            T = S = one
            E = D
            F = C if variant == 'remark_39_plus' else -C
        elif variant != 'general':
            raise ValueError("Unknown variant '%s'." % variant)
        return T, S, C, D, E, F

    def evaluate(self, instance, params, prepared, rng):
        ctx, alpha = instance.ctx, float(params['alpha'])
        variant = params['variant']
        T, S, C, D, E, F = self._operands(ctx, instance, variant, rng)

        def _bound(middle_T, middle_T_sharp, middle_S, middle_S_sharp):
            total = a_adjoint(ctx, D) @ middle_T @ D \
                + C @ middle_T_sharp @ a_adjoint(ctx, C) \
                + a_adjoint(ctx, F) @ middle_S @ F \
                + E @ middle_S_sharp @ a_adjoint(ctx, E)
            return a_seminorm_op(ctx, total) / 2.0

        rhs = _bound(a_modulus(ctx, T, 2.0 * alpha),
                     a_modulus_sharp(ctx, T, 2.0 * (1.0 - alpha)),
                     a_modulus(ctx, S, 2.0 * alpha),
                     a_modulus_sharp(ctx, S, 2.0 * (1.0 - alpha)))
        if variant in ('remark_37', 'remark_39_plus', 'remark_39_minus'):
            left = psd_power(ctx.A, alpha, ctx.tol)
            right = psd_power(ctx.A, 1.0 - alpha, ctx.tol)
            if variant == 'remark_37':
                zero = np.zeros_like(left)
                prepared['literal'] = _bound(left, right, zero, zero)
            else:
                prepared['literal'] = _bound(left, right, left, right)
        lhs = w_A(ctx, C @ T @ D + E @ S @ F).value
        return [Link('w_A(CTD+ESF) <= ||D#|T|^2aD + C|T#|^2(1-a)C# + ...||/2',
                     lhs, rhs)]

    def extras(self, instance, params, prepared, links, witness=None):
        if 'literal' in prepared:
            return {'literal_rhs': prepared['literal']}
        return {}


def _sum_of_squares(ctx, T):
    S = a_adjoint(ctx, T)
    return S @ T + T @ S


class _SquareBounds(InequalityChecker):
    degree = 2

    def _radius_squared(self, instance):
        return w_A(instance.ctx, instance.operator).value ** 2

    def extras(self, instance, params, prepared, links, witness=None):
        ctx, T = instance.ctx, instance.operator
        X = _sum_of_squares(ctx, T)
        parts = cartesian(ctx, T)
        B, C = parts.real_part, parts.imag_part
        residual = a_seminorm_op(ctx, X - 2.0 * (B @ B + C @ C))
        return {'identity_residual':
                residual / (1.0 + a_seminorm_op(ctx, X))}


class SixteenthBound(_SquareBounds):
    id = 'eq42_sixteenth'
    anchor = "T^{\\sharp_A} T + TT^{\\sharp_A} = 2(B^2 + C^2)"

    def evaluate(self, instance, params, prepared, rng):
        norm = a_seminorm_op(instance.ctx,
                             _sum_of_squares(instance.ctx, instance.operator))
        w2 = self._radius_squared(instance)
        return [Link('||T#T + TT#|| / 16 <= w_A^2', norm / 16.0, w2),
                Link('w_A^2 <= ||T#T + TT#|| / 2', w2, norm / 2.0)]


class QuarterBound(_SquareBounds):
    id = 'eq43_quarter'
    anchor = "independently generalized by Feki"

    def evaluate(self, instance, params, prepared, rng):
        norm = a_seminorm_op(instance.ctx,
                             _sum_of_squares(instance.ctx, instance.operator))
        w2 = self._radius_squared(instance)
        return [Link('||T#T + TT#|| / 4 <= w_A^2', norm / 4.0, w2),
                Link('w_A^2 <= ||T#T + TT#|| / 2', w2, norm / 2.0)]


class CartesianFormBounds(_SquareBounds):
    id = 'eq44_pm_forms'
    anchor = "can be reformulated as"

    def evaluate(self, instance, params, prepared, rng):
        ctx = instance.ctx
        parts = cartesian(ctx, instance.operator)
        B, C = parts.real_part, parts.imag_part
        squares = a_seminorm_op(ctx, B @ B + C @ C)
        plus, minus = B + C, B - C
        pm = a_seminorm_op(ctx, plus @ plus + minus @ minus)
        w2 = self._radius_squared(instance)
        return [Link('||B^2 + C^2|| / 2 <= w_A^2', squares / 2.0, w2),
                Link('w_A^2 <= ||B^2 + C^2||', w2, squares),
                Link('||(B+C)^2 + (B-C)^2|| / 4 <= w_A^2', pm / 4.0, w2),
                Link('w_A^2 <= ||(B+C)^2 + (B-C)^2|| / 2', w2, pm / 2.0)]


class CartesianPowerRadius(InequalityChecker):
    """
    ``w_A^r(T) <= ½‖|B|^{2rα} + |B♯|^{2r(1-α)} + |C|^{2rα} + |C♯|^{2r(1-α)}‖``
    for ``T = B + iC``. The pointwise step ``(b² + c²)^{1/2} <= (|b|^r +
    |c|^r)^{1/r}`` needs ``r <= 2``; larger `r` are skipped.
    """
    id = 'thm9_cartesian_r'
    anchor = "with the $A$-Cartesian decomposition $T = B + iC$, " \
             "$0\\le\\alpha\\le1$, and $r\\ge1$"
    structure = requires(Structure.COMMUTES_WITH_A)
    degree = 0

    def parameter_grid(self, rng):
        return _alpha_r_grid(rng)

    def parameter_hypotheses(self, params):
        r = float(params['r'])
        if r > 2.0:
            return ["r = %g: the bound is established for 1 <= r <= 2" % r]
        return []

    def evaluate(self, instance, params, prepared, rng):
        ctx, T = instance.ctx, instance.operator
        alpha, r = float(params['alpha']), float(params['r'])
        parts = cartesian(ctx, T)
        total = _mixed_sum(ctx, parts.real_part, alpha, r) \
            + _mixed_sum(ctx, parts.imag_part, alpha, r)
        return [Link('w_A^r <= ||moduli of B and C|| / 2',
                     w_A(ctx, T).value ** r,
                     a_seminorm_op(ctx, total) / 2.0)]


CHECKERS = [
    PowerRadiusBound(),
    ConvexPowerRadiusBound(),
    FunctionalHolderRadius(),
    SumPowerRadius(),
    CTDESFBound(),
    SixteenthBound(),
    QuarterBound(),
    CartesianFormBounds(),
    CartesianPowerRadius(),
]
