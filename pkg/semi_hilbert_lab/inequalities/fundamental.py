"""
The basic comparisons between the A-spectral radius, the A-numerical radius
and the A-seminorm.
"""

from semi_hilbert_lab.generators import Structure
from semi_hilbert_lab.radii import r_A, w_A
from semi_hilbert_lab.semi_hilbert import a_adjoint, a_seminorm_op

from .checker import InequalityChecker, Link


class RadiusNormChain(InequalityChecker):
    id = 'fund_r_w_norm'
    anchor = "Recently, it was shown that the inequality"

    def evaluate(self, instance, params, prepared, rng):
        ctx, T = instance.ctx, instance.operator
        spectral = r_A(ctx, T)
        w = w_A(ctx, T).value
        norm = a_seminorm_op(ctx, T)
        prepared['spectral'] = spectral
        return [Link('r_A <= w_A', spectral.limit, w),
                Link('w_A <= norm_A', w, norm)]

    def extras(self, instance, params, prepared, links, witness=None):
        spectral = prepared['spectral']
        return {'r_A_truncated': spectral.value,
                'r_A_n_used': spectral.n_used,
                'r_A_limsup_tail': spectral.limsup_tail[0]
                if spectral.limsup_tail else 0.0}


class HalfNormBound(InequalityChecker):
    """
    ``½‖T‖_A <= w_A(T) <= ‖T‖_A``. Instances with ``A T² = 0`` must attain
    the lower bound and A-normal instances the upper one, so those tags add
    the reversed links.
    """
    id = 'fund_half_norm'
    anchor = "are equivalent seminorm on"

    def evaluate(self, instance, params, prepared, rng):
        ctx, T = instance.ctx, instance.operator
        w = w_A(ctx, T).value
        norm = a_seminorm_op(ctx, T)
        links = [Link('norm_A / 2 <= w_A', norm / 2.0, w),
                 Link('w_A <= norm_A', w, norm)]
        if Structure.NILPOTENT_AT2 in instance.tags:
            links.append(Link('w_A <= norm_A / 2 (A T^2 = 0)', w, norm / 2.0))
        if Structure.A_NORMAL in instance.tags:
            links.append(Link('norm_A <= w_A (A-normal)', norm, w))
        prepared['sharp_norm'] = a_seminorm_op(ctx, a_adjoint(ctx, T))
        return links

    def extras(self, instance, params, prepared, links, witness=None):
        return {'sharp_norm': prepared['sharp_norm']}


CHECKERS = [RadiusNormChain(), HalfNormBound()]
