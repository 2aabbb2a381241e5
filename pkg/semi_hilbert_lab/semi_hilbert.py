"""
The semi-Hilbert structure induced by a positive semidefinite matrix `A`.

Besides the literal formulas (``T♯ = A† T* A``, ``|T|_A = (T* A T)^{1/2}``)
this module provides the compression of an operator onto the range of `A`:
in the coordinates ``u = A^{1/2} x`` an operator ``T`` in ``B_A`` acts as

    T̃ = Λ^{1/2} V_r* T V_r Λ^{-1/2},

where ``A = V_r Λ V_r*`` is the reduced spectral decomposition. The
compression is a *-homomorphism taking ``T♯`` to ``T̃*``, which is what the
radii and the functional calculus are computed on.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
import scipy.linalg

from semi_hilbert_lab.errors import DegenerateContext, DimensionMismatch, \
    NotInBA, NotPSD
from semi_hilbert_lab.linalg import DEFAULT_TOLERANCE, TolerancePolicy, \
    apply_spectrum, as_matrix, func_calculus, hermitian_eig, \
    hermitian_part, power_function, psd_sqrt, spectral_norm

LOG = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SemiHilbertContext:
    A: np.ndarray
    A_pinv: np.ndarray
    A_half: np.ndarray
    A_half_pinv: np.ndarray
    P_A: np.ndarray
    rank_A: int
    tol: TolerancePolicy
    # Orthonormal basis of range(A) and the matching positive eigenvalues.
    support: np.ndarray
    support_values: np.ndarray
    kernel: np.ndarray

    @property
    def dim(self):
        return self.A.shape[0]

    def require_support(self):
        if self.rank_A == 0:
            raise DegenerateContext("A = 0: the A-unit sphere is empty.")

    def check_operator(self, T):
        T = as_matrix(T)
        if T.shape != self.A.shape:
            raise DimensionMismatch("Operator of shape %r does not act on "
                                    "dimension %d." % (T.shape, self.dim))
        return T

    def reduce(self, T):
        """The compression ``T̃`` of `T` onto range(A), an r×r matrix."""
        root = np.sqrt(self.support_values)
        return (root[:, None] * (self.support.conj().T @ T @ self.support)
                / root[None, :])

    def lift(self, Y):
        """Inverse of :meth:`reduce`: ``V_r Λ^{-1/2} Y Λ^{1/2} V_r*``."""
        root = np.sqrt(self.support_values)
        inner = Y / root[:, None] * root[None, :]
        return self.support @ inner @ self.support.conj().T

    def embed(self, z):
        """
        Map reduced coordinates to vectors of the space. Unit `z` gives
        A-unit vectors; `z` may be a matrix of column vectors.
        """
        scale = 1.0 / np.sqrt(self.support_values)
        if z.ndim == 1:
            return self.support @ (scale * z)
        return self.support @ (scale[:, None] * z)

    def coordinates(self, x):
        """``u = Λ^{1/2} V_r* x``, so that ``⟨x, y⟩_A = u_y* u_x``."""
        root = np.sqrt(self.support_values)
        if x.ndim == 1:
            return root * (self.support.conj().T @ x)
        return root[:, None] * (self.support.conj().T @ x)

    def to_dict(self):
        from semi_hilbert_lab.matrix_io import matrix_to_dict
        return {'A': matrix_to_dict(self.A), 'tol': self.tol.to_dict()}

    @classmethod
    def from_dict(cls, data):
        from semi_hilbert_lab.matrix_io import matrix_from_dict
        tol = TolerancePolicy.from_dict(data.get('tol', {}))
        return make_context(matrix_from_dict(data['A']), tol)


@dataclass(frozen=True)
class CartesianPair:
    real_part: np.ndarray
    imag_part: np.ndarray

    def reconstruct(self):
        return self.real_part + 1j * self.imag_part


@dataclass(frozen=True)
class PredicateFlags:
    a_selfadjoint: bool
    a_positive: bool
    a_normal: bool
    sharp_a_selfadjoint: bool
    commutes_with_A: bool
    douglas: bool
    reasons: Dict[str, str] = field(default_factory=dict)

    def to_dict(self):
        return {'a_selfadjoint': self.a_selfadjoint,
                'a_positive': self.a_positive,
                'a_normal': self.a_normal,
                'sharp_a_selfadjoint': self.sharp_a_selfadjoint,
                'commutes_with_A': self.commutes_with_A,
                'douglas': self.douglas,
                'reasons': dict(self.reasons)}


def make_context(A, tol=DEFAULT_TOLERANCE):
    """
    Build the semi-Hilbert context of a Hermitian PSD matrix.

    :raises NotPSD: If `A` is not Hermitian or has an eigenvalue below
        ``-psd_tol * σ_max``.
    """
    A = hermitian_part(as_matrix(A))
    spectrum = hermitian_eig(A, tol)
    values, vectors = spectrum.eigenvalues, spectrum.eigenvectors
    scale = float(np.max(np.abs(values)))
    if scale > 0.0 and values[0] < -tol.psd_tol * scale:
        raise NotPSD("A has eigenvalue %.3e below -psd_tol * %.3e."
                     % (values[0], scale))

    keep = values > tol.rank_cutoff_rel * scale if scale > 0.0 \
        else np.zeros(values.shape, dtype=bool)
    kept = np.where(keep, values, 0.0)
    inv = np.zeros_like(values)
    inv[keep] = 1.0 / values[keep]
    half = np.sqrt(kept)
    half_inv = np.zeros_like(values)
    half_inv[keep] = 1.0 / half[keep]

    def _frozen(M):
        M = np.ascontiguousarray(M)
        M.setflags(write=False)
        return M

    return SemiHilbertContext(
        A=_frozen(A),
        A_pinv=_frozen(apply_spectrum(vectors, inv)),
        A_half=_frozen(apply_spectrum(vectors, half)),
        A_half_pinv=_frozen(apply_spectrum(vectors, half_inv)),
        P_A=_frozen(apply_spectrum(vectors, keep.astype(float))),
        rank_A=int(np.count_nonzero(keep)),
        tol=tol,
        support=_frozen(vectors[:, keep]),
        support_values=_frozen(values[keep]),
        kernel=_frozen(vectors[:, ~keep]))


def block_bold_A(ctx):
    """Context of ``diag(A, A)`` acting on the direct sum of two copies."""
    return make_context(scipy.linalg.block_diag(ctx.A, ctx.A), ctx.tol)


def _check_vector(ctx, x):
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[0] != ctx.dim:
        raise DimensionMismatch("Vector of length %d in dimension %d."
                                % (x.shape[0], ctx.dim))
    return x


def a_inner(ctx, x, y):
    """``⟨x, y⟩_A = y* A x``."""
    x, y = _check_vector(ctx, x), _check_vector(ctx, y)
    return complex(np.vdot(y, ctx.A @ x))


def a_norm(ctx, x):
    return float(np.sqrt(max(a_inner(ctx, x, x).real, 0.0)))


def douglas_residual(ctx, T):
    TA = T.conj().T @ ctx.A
    residual = np.linalg.norm(TA - ctx.P_A @ TA)
    return residual / (1.0 + np.linalg.norm(TA))


def douglas_member(ctx, T):
    """True iff range(T* A) lies in range(A), i.e. T is in B_A."""
    T = ctx.check_operator(T)
    return bool(douglas_residual(ctx, T) <= ctx.tol.hermitize_tol)


def require_ba(ctx, T):
    T = ctx.check_operator(T)
    residual = douglas_residual(ctx, T)
    if residual > ctx.tol.hermitize_tol:
        raise NotInBA("range(T* A) is not contained in range(A) (relative "
                      "residual %.3e)." % residual)
    return T


def a_adjoint(ctx, T):
    """``T♯ = A† T* A``; satisfies ``A T♯ = T* A``."""
    T = require_ba(ctx, T)
    return ctx.A_pinv @ T.conj().T @ ctx.A


def a_seminorm_op(ctx, T):
    """
    ``‖T‖_A``, the square root of the largest eigenvalue of
    ``(A^{1/2})† T* A T (A^{1/2})†`` on range(A); 0 when ``A = 0``.
    """
    T = ctx.check_operator(T)
    if ctx.rank_A == 0:
        return 0.0
    return spectral_norm(ctx.reduce(T))


def a_abs(ctx, T):
    """The literal A-absolute value ``(T* A T)^{1/2}``."""
    T = require_ba(ctx, T)
    return psd_sqrt(hermitian_part(T.conj().T @ ctx.A @ T), ctx.tol)


def a_abs_sharp(ctx, T):
    """``|T♯|_A`` computed as ``(A T A† T* A)^{1/2}``."""
    T = require_ba(ctx, T)
    gram = ctx.A @ T @ ctx.A_pinv @ T.conj().T @ ctx.A
    return psd_sqrt(hermitian_part(gram), ctx.tol)


def a_func(ctx, X, f):
    """
    A-functional calculus of an A-positive operator: ``lift(f(X̃))``.

    The result is A-positive for nonnegative `f`, supported on range(A) and
    agrees with the plain functional calculus when ``A = I``.

    :raises NotPSD: If ``A X`` is not Hermitian PSD.
    """
    X = ctx.check_operator(X)
    if ctx.rank_A == 0:
        return np.zeros_like(X)
    root = np.sqrt(ctx.support_values)
    compressed = ctx.support.conj().T @ ctx.A @ X @ ctx.support
    reduced = compressed / root[:, None] / root[None, :]
    return ctx.lift(func_calculus(reduced, f, ctx.tol))


def a_modulus(ctx, T, power=1.0):
    """
    ``|T|_A^power`` in the A-functional calculus, i.e. the A-positive root of
    ``T♯ T`` raised to `power` (with ``0**0 = 0``).
    """
    T = require_ba(ctx, T)
    return a_func(ctx, a_adjoint(ctx, T) @ T, power_function(power / 2.0))


def a_modulus_sharp(ctx, T, power=1.0):
    """``|T♯|_A^power``, built from ``T T♯ = (T♯)♯ T♯`` on range(A)."""
    T = require_ba(ctx, T)
    S = a_adjoint(ctx, T)
    return a_func(ctx, a_adjoint(ctx, S) @ S, power_function(power / 2.0))


def cartesian(ctx, T):
    T = require_ba(ctx, T)
    S = a_adjoint(ctx, T)
    return CartesianPair((T + S) / 2.0, (T - S) / 2.0j)


def _close(residual, scale, tol):
    return residual <= tol * (1.0 + scale)


def predicates(ctx, T):
    """
    Structural flags of `T` relative to `A`. Flags that need ``T♯`` are false
    with a reason when Douglas membership fails.
    """
    T = ctx.check_operator(T)
    tol = ctx.tol.hermitize_tol
    reasons = {}

    AT = ctx.A @ T
    selfadjoint = _close(np.linalg.norm(AT - AT.conj().T),
                         np.linalg.norm(AT), tol)
    if not selfadjoint:
        reasons['a_selfadjoint'] = "AT is not Hermitian"

    positive = False
    if selfadjoint:
        values = np.linalg.eigvalsh(hermitian_part(AT))
        scale = float(np.max(np.abs(values)))
        positive = bool(values[0] >= -ctx.tol.psd_tol * scale)
        if not positive:
            reasons['a_positive'] = "AT has a negative eigenvalue"
    else:
        reasons['a_positive'] = "AT is not Hermitian"

    commutes = _close(np.linalg.norm(AT - T @ ctx.A),
                      np.linalg.norm(ctx.A) * np.linalg.norm(T), tol)
    if not commutes:
        reasons['commutes_with_A'] = "AT != TA"

    douglas = bool(douglas_residual(ctx, T) <= tol)
    normal = sharp = False
    if douglas:
        S = a_adjoint(ctx, T)
        normal = _close(np.linalg.norm(T @ S - S @ T),
                        np.linalg.norm(T) * np.linalg.norm(S), tol)
        sharp = _close(np.linalg.norm(T - S), np.linalg.norm(T), tol)
        if not normal:
            reasons['a_normal'] = "T T♯ != T♯ T"
        if not sharp:
            reasons['sharp_a_selfadjoint'] = "T != T♯"
    else:
        reasons['douglas'] = "T is not in B_A"
        reasons['a_normal'] = reasons['sharp_a_selfadjoint'] = \
            "T♯ does not exist"

    return PredicateFlags(a_selfadjoint=bool(selfadjoint),
                          a_positive=positive,
                          a_normal=bool(normal),
                          sharp_a_selfadjoint=bool(sharp),
                          commutes_with_A=bool(commutes),
                          douglas=douglas,
                          reasons=reasons)


def nilpotent_residual(ctx, T):
    """Relative size of ``A T²``."""
    return (np.linalg.norm(ctx.A @ T @ T)
            / (1.0 + np.linalg.norm(ctx.A) * np.linalg.norm(T) ** 2))


def identity(ctx):
    return np.eye(ctx.dim, dtype=np.complex128)
