"""
Dense complex matrix primitives: Hermitian eigendecomposition, Moore-Penrose
pseudo-inverse, PSD square roots and the spectral functional calculus.
"""

import dataclasses
import logging
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from semi_hilbert_lab.errors import ConvergenceFailure, DimensionMismatch, \
    InvalidMatrix, NotHermitian, NotPSD

LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class TolerancePolicy:
    """
    Numerical tolerances shared by every computation of a context.

    :param rank_cutoff_rel: Singular values (eigenvalues) below this fraction
        of the largest one are treated as zero.
    :param hermitize_tol: Relative Frobenius residual accepted when a matrix
        is required to be Hermitian, and for every structural predicate.
    :param psd_tol: Most negative eigenvalue accepted for PSD input, relative
        to the spectral radius.
    :param slack_tol: Relative slack below ``-slack_tol`` is a violation.
    """
    rank_cutoff_rel: float = 1e-10
    hermitize_tol: float = 1e-8
    psd_tol: float = 1e-9
    slack_tol: float = 1e-8

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not 0.0 < float(value) < 1.0:
                raise ValueError("Tolerance '%s' must lie in (0, 1), got %r."
                                 % (field.name, value))

    def with_overrides(self, **overrides):
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **overrides)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError("Unknown tolerance fields: %s"
                             % ', '.join(sorted(unknown)))
        return cls(**{k: float(v) for k, v in data.items()})


DEFAULT_TOLERANCE = TolerancePolicy()


@dataclass(frozen=True)
class HermitianSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        return apply_spectrum(self.eigenvectors, self.eigenvalues)


def as_matrix(M, square=True):
    """
    Validate and convert `M` to an immutable complex128 matrix.

    :raises InvalidMatrix: On wrong rank, empty shape or non-finite entries.
    :raises DimensionMismatch: If `square` is requested but rows != cols.
    """
    try:
        arr = np.array(M, dtype=np.complex128)
    except (TypeError, ValueError) as err:
        raise InvalidMatrix("Cannot interpret input as a complex matrix: %s"
                            % err) from err
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidMatrix("Expected a non-empty 2-D matrix, got shape %r."
                            % (arr.shape,))
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("Matrix has non-finite entries.")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch("Expected a square matrix, got shape %r."
                                % (arr.shape,))
    arr.setflags(write=False)
    return arr


def hermitian_part(M):
    return (M + M.conj().T) / 2.0


def apply_spectrum(vectors, values):
    """Return ``V diag(values) V*``."""
    return (vectors * values) @ vectors.conj().T


def hermitian_residual(M):
    """Relative anti-Hermitian residual ``‖M − M*‖_F / (1 + ‖M‖_F)``."""
    return (np.linalg.norm(M - M.conj().T)
            / (1.0 + np.linalg.norm(M)))


def hermitian_eig(M, tol=DEFAULT_TOLERANCE):
    """
    Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized as ``(M + M*) / 2`` after the residual check.

    :raises NotHermitian: If the relative residual exceeds `hermitize_tol`.
    :raises ConvergenceFailure: If LAPACK fails to converge.
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch("Expected a square matrix, got shape %r."
                                % (M.shape,))
    residual = hermitian_residual(M)
    if residual > tol.hermitize_tol:
        raise NotHermitian("Matrix is not Hermitian (relative residual "
                           "%.3e > %.3e)." % (residual, tol.hermitize_tol))
    try:
        values, vectors = scipy.linalg.eigh(hermitian_part(M))
    except np.linalg.LinAlgError as err:
        raise ConvergenceFailure("Hermitian eigensolver failed: %s"
                                 % err) from err
    return HermitianSpectrum(values, vectors)


def moore_penrose(M, tol=DEFAULT_TOLERANCE):
    """
    Moore-Penrose pseudo-inverse via the SVD. Singular values at or below
    ``rank_cutoff_rel * σ_max`` are dropped.
    """
    M = np.asarray(M, dtype=np.complex128)
    U, s, Vh = scipy.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=np.complex128)
    keep = s > tol.rank_cutoff_rel * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (Vh.conj().T * inv) @ U.conj().T


def power_function(exponent):
    """
    ``t ↦ t**exponent`` on [0, ∞) with the convention ``0**0 = 0``, so that
    exponent 0 yields the projection onto the support.
    """
    exponent = float(exponent)

    def _power(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        positive = t > 0.0
        out[positive] = t[positive] ** exponent
        return out
    return _power


def _psd_spectrum(M, tol):
    spectrum = hermitian_eig(M, tol)
    values = spectrum.eigenvalues
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if scale == 0.0:
        return np.zeros_like(values), spectrum.eigenvectors
    if values[0] < -tol.psd_tol * scale:
        raise NotPSD("Matrix has eigenvalue %.3e below -psd_tol * %.3e."
                     % (values[0], scale))
    values = np.where(values > tol.rank_cutoff_rel * scale, values, 0.0)
    return values, spectrum.eigenvectors


def func_calculus(M, f: Callable, tol=DEFAULT_TOLERANCE):
    """
    Compute ``f(M)`` for a Hermitian PSD matrix `M`.

    Eigenvalues below the rank cutoff are clamped to exactly zero before `f`
    is applied, so functions with ``f(0) = 0`` vanish on the kernel.

    :param f: A nonnegative function on [0, ∞); it is called with the array of
        eigenvalues when it supports that, element-wise otherwise.
    """
    values, vectors = _psd_spectrum(M, tol)
    try:
        mapped = np.asarray(f(values), dtype=float)
        if mapped.shape != values.shape:
            raise ValueError("shape")
    except (TypeError, ValueError):
        mapped = np.array([float(f(t)) for t in values])
    return apply_spectrum(vectors, mapped)


def psd_sqrt(M, tol=DEFAULT_TOLERANCE):
    return func_calculus(M, np.sqrt, tol)


def psd_power(M, exponent, tol=DEFAULT_TOLERANCE):
    return func_calculus(M, power_function(exponent), tol)


def spectral_norm(M):
    if M.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(M)[0])


def haar_unitary(dim, rng):
    """Haar-distributed unitary: QR of a Ginibre matrix with the phase fix."""
    z = (rng.standard_normal((dim, dim))
         + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def ginibre(rows, cols, rng):
    return (rng.standard_normal((rows, cols))
            + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def seeded_rng(seed, *key):
    """
    Counter-based generator for `seed`; distinct `key` tuples give
    independent streams. String keys are hashed with CRC-32.
    """
    spawn_key = tuple(zlib.crc32(k.encode('utf-8')) if isinstance(k, str)
                      else int(k) for k in key)
    sequence = np.random.SeedSequence(entropy=int(seed) & (2 ** 64 - 1),
                                      spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(sequence))
