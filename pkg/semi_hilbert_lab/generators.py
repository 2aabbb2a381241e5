"""
Seeded construction of structured random instances.

Every structural hypothesis (commuting with A, A-positivity, ...) is built in
exactly, then re-verified with :func:`semi_hilbert.predicates`. A failing
verification raises :class:`ConstructionFailed`; instances are never
silently re-tagged.
"""

import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Tuple

import numpy as np
import scipy.linalg

from semi_hilbert_lab.errors import ConstructionFailed, InconsistentTags
from semi_hilbert_lab.linalg import ginibre, haar_unitary, \
    hermitian_eig, seeded_rng
from semi_hilbert_lab.matrix_io import matrix_from_dict, matrix_to_dict
from semi_hilbert_lab.semi_hilbert import SemiHilbertContext, \
    a_seminorm_op, make_context, nilpotent_residual, predicates

LOG = logging.getLogger(__name__)

# Relative gap below which two eigenvalues of A are one cluster.
CLUSTER_GAP = 1e-11


class Structure(Enum):
    COMMUTES_WITH_A = 'commutes_with_A'
    A_SELFADJOINT = 'a_selfadjoint'
    A_POSITIVE = 'a_positive'
    SHARP_A_SELFADJOINT = 'sharp_a_selfadjoint'
    A_NORMAL = 'a_normal'
    NILPOTENT_AT2 = 'nilpotent_AT2'
    GENERAL_IN_BA = 'general_in_BA'


_NOT_NILPOTENT = {Structure.A_SELFADJOINT, Structure.A_POSITIVE,
                  Structure.SHARP_A_SELFADJOINT, Structure.A_NORMAL}


def parse_structure(tags):
    try:
        return frozenset(Structure(t) if not isinstance(t, Structure) else t
                         for t in tags)
    except ValueError as err:
        raise InconsistentTags("Unknown structure tag: %s" % err) from err


@dataclass(frozen=True)
class InstanceSpec:
    dim: int
    rank_A: int
    structure: FrozenSet[Structure] = frozenset()
    tuple_size: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'structure', parse_structure(self.structure))
        if not 1 <= self.rank_A <= self.dim:
            raise ValueError("Need 1 <= rank_A <= dim, got rank %d in "
                             "dimension %d." % (self.rank_A, self.dim))
        if self.tuple_size < 1:
            raise ValueError("tuple_size must be at least 1.")

    def to_dict(self):
        return {'dim': self.dim,
                'rank_A': self.rank_A,
                'structure': sorted(s.value for s in self.structure),
                'tuple_size': self.tuple_size,
                'seed': self.seed}

    @classmethod
    def from_dict(cls, data):
        return cls(dim=int(data['dim']), rank_A=int(data['rank_A']),
                   structure=data.get('structure', ()),
                   tuple_size=int(data.get('tuple_size', 1)),
                   seed=int(data.get('seed', 0)))


@dataclass(frozen=True, eq=False)
class OperatorInstance:
    ctx: SemiHilbertContext
    operators: Tuple[np.ndarray, ...]
    tags: FrozenSet[Structure]
    seed: int
    spec: InstanceSpec = None

    @property
    def operator(self):
        return self.operators[0]

    def to_dict(self):
        return {'context': self.ctx.to_dict(),
                'operators': [matrix_to_dict(T) for T in self.operators],
                'tags': sorted(t.value for t in self.tags),
                'seed': self.seed,
                'spec': None if self.spec is None else self.spec.to_dict()}

    @classmethod
    def from_dict(cls, data):
        ctx = SemiHilbertContext.from_dict(data['context'])
        operators = tuple(matrix_from_dict(M) for M in data['operators'])
        tags = data.get('tags')
        if tags is None:
            tags = realized_tags(ctx, operators)
        spec = data.get('spec')
        return cls(ctx, operators, parse_structure(tags),
                   int(data.get('seed', 0)),
                   None if spec is None else InstanceSpec.from_dict(spec))


def gen_context(spec):
    """
    ``A = U diag(λ_1..λ_r, 0..0) U*`` with Haar-random `U` and log-uniform
    eigenvalues in [1e-2, 1e2]. With probability 1/2 neighbouring eigenvalues
    are paired up to create repeated nonzero eigenvalues.
    """
    rng = seeded_rng(spec.seed, 'context')
    U = haar_unitary(spec.dim, rng)
    values = 10.0 ** rng.uniform(-2.0, 2.0, size=spec.rank_A)
    if rng.random() < 0.5:
        for i in range(0, spec.rank_A - 1, 2):
            values[i + 1] = values[i]
    spectrum = np.zeros(spec.dim)
    spectrum[:spec.rank_A] = values
    A = (U * spectrum) @ U.conj().T
    return make_context((A + A.conj().T) / 2.0)


def eigen_clusters(ctx):
    """
    The eigenbasis of `A` and its eigenvalue clusters as index arrays; the
    kernel, if any, is the first cluster.
    """
    spectrum = hermitian_eig(ctx.A, ctx.tol)
    values, vectors = spectrum.eigenvalues, spectrum.eigenvectors
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    zero = values <= ctx.tol.rank_cutoff_rel * scale
    clusters = []
    kernel = np.flatnonzero(zero)
    if kernel.size:
        clusters.append(kernel)
    current = []
    for i in np.flatnonzero(~zero):
        if current and values[i] - values[current[-1]] \
                > CLUSTER_GAP * scale:
            clusters.append(np.array(current))
            current = []
        current.append(i)
    if current:
        clusters.append(np.array(current))
    return vectors, clusters, kernel.size > 0


def _block(kind, m, rng):
    G = ginibre(m, m, rng) / np.sqrt(m)
    if kind == 'dense':
        return G
    if kind == 'hermitian':
        return (G + G.conj().T) / 2.0
    if kind == 'psd':
        return G @ G.conj().T
    if kind == 'normal':
        W = haar_unitary(m, rng)
        return (W * (ginibre(1, m, rng)[0])) @ W.conj().T
    if kind == 'nilpotent':
        if m < 2:
            return np.zeros((m, m), dtype=np.complex128)
        Q = haar_unitary(m, rng)
        k = m // 2
        N = np.zeros((m, m), dtype=np.complex128)
        N[:k, k:] = ginibre(k, m - k, rng)
        return Q @ N @ Q.conj().T
    if kind == 'zero':
        return np.zeros((m, m), dtype=np.complex128)
    raise ValueError("Unknown block kind '%s'." % kind)


def _commuting(ctx, rng, kind, kernel_kind=None):
    vectors, clusters, has_kernel = eigen_clusters(ctx)
    blocks = []
    for number, cluster in enumerate(clusters):
        is_kernel = has_kernel and number == 0
        blocks.append(_block(kernel_kind or kind if is_kernel else kind,
                             cluster.size, rng))
    order = np.concatenate(clusters)
    basis = vectors[:, order]
    return basis @ scipy.linalg.block_diag(*blocks) @ basis.conj().T


def gen_commuting(spec, ctx):
    """
    Random ``T`` commuting with `A`: block diagonal in the eigenbasis of `A`
    with one dense block per eigenvalue cluster, the kernel included.
    """
    return _normalized(ctx, _commuting(ctx, seeded_rng(spec.seed, 'commuting'),
                                       'dense'))


def _kernel_projector(ctx):
    return np.eye(ctx.dim) - ctx.P_A


def _nilpotent(ctx, rng):
    """
    ``A T² = 0``: a square-zero block on range(A) plus parts mapping into
    the kernel of `A`.
    """
    r = ctx.rank_A
    support, kernel = ctx.support, ctx.kernel
    inner = _block('nilpotent', r, rng)
    T = support @ inner @ support.conj().T
    if kernel.shape[1]:
        k = kernel.shape[1]
        # Everything landing in the kernel is invisible to A; the kernel
        # block itself must map the kernel into the kernel.
        T = T + kernel @ ginibre(k, r, rng) @ support.conj().T
        T = T + kernel @ ginibre(k, k, rng) @ kernel.conj().T
    return T


def _normalized(ctx, T):
    norm = a_seminorm_op(ctx, T)
    if norm > 0.0:
        return T / norm
    frobenius = np.linalg.norm(T)
    return T / frobenius if frobenius > 0.0 else T


def validate_structure(spec):
    tags = spec.structure
    if Structure.NILPOTENT_AT2 in tags:
        clash = tags & _NOT_NILPOTENT
        if clash:
            raise InconsistentTags(
                "nilpotent_AT2 cannot be combined with %s for a nonzero "
                "operator." % ', '.join(sorted(t.value for t in clash)))
        if spec.rank_A < 2:
            raise InconsistentTags("nilpotent_AT2 needs rank_A >= 2 to "
                                   "leave a nonzero A-visible part.")
    return tags


def gen_operator(ctx, tags, rng):
    """
    One operator realizing `tags` on `ctx`. The choice of construction:

    - nilpotent: square-zero support block, commuting variant if requested;
    - A-positive, A-normal or commuting requests: block diagonal in the
      eigenbasis of `A` with PSD, normal, Hermitian or dense blocks;
    - ♯-selfadjoint: ``A† P_A H P_A``;
    - A-selfadjoint: ``A† P_A H P_A + K`` with `K` mapping into null(A);
    - otherwise ``X A + Y (I - P_A)`` with kernel-directed `Y`.
    """
    tags = frozenset(tags)
    commuting = Structure.COMMUTES_WITH_A in tags
    sharp = Structure.SHARP_A_SELFADJOINT in tags
    selfadjoint = Structure.A_SELFADJOINT in tags or sharp
    n = ctx.dim

    if Structure.NILPOTENT_AT2 in tags:
        if commuting:
            return _commuting(ctx, rng, 'nilpotent', 'dense')
        return _nilpotent(ctx, rng)
    if Structure.A_POSITIVE in tags:
        return _commuting(ctx, rng, 'psd', 'zero' if sharp else 'psd')
    if Structure.A_NORMAL in tags:
        kind = 'hermitian' if selfadjoint else 'normal'
        return _commuting(ctx, rng, kind, 'zero' if sharp else kind)
    if commuting:
        kind = 'hermitian' if selfadjoint else 'dense'
        return _commuting(ctx, rng, kind, 'zero' if sharp else kind)

    kernel = _kernel_projector(ctx)
    if selfadjoint:
        H = ginibre(n, n, rng)
        H = (H + H.conj().T) / 2.0
        T = ctx.A_pinv @ ctx.P_A @ H @ ctx.P_A
        if not sharp:
            T = T + kernel @ ginibre(n, n, rng)
        return T
    X = ginibre(n, n, rng)
    Y = kernel @ ginibre(n, n, rng)
    return X @ ctx.A + Y @ kernel


def realized_tags(ctx, operators):
    """Tags that every operator of the tuple satisfies."""
    result = None
    for T in operators:
        flags = predicates(ctx, T)
        tags = set()
        if flags.douglas:
            tags.add(Structure.GENERAL_IN_BA)
        for name in ('a_selfadjoint', 'a_positive', 'a_normal',
                     'sharp_a_selfadjoint', 'commutes_with_A'):
            if getattr(flags, name):
                tags.add(Structure(name))
        if nilpotent_residual(ctx, T) <= ctx.tol.hermitize_tol:
            tags.add(Structure.NILPOTENT_AT2)
        result = tags if result is None else result & tags
    return frozenset(result or ())


def _verified(ctx, operators, requested):
    realized = realized_tags(ctx, operators)
    missing = set(requested) - realized
    if missing:
        raise ConstructionFailed("Construction did not realize %s."
                                 % ', '.join(sorted(t.value
                                                    for t in missing)))
    return realized


def gen_tagged(spec, ctx):
    """
    :raises InconsistentTags: If the requested tags cannot hold together.
    :raises ConstructionFailed: If a constructed operator fails to verify.
    """
    return _instance(dataclasses.replace(spec, tuple_size=1), ctx)


def gen_tuple(spec, ctx):
    """``spec.tuple_size`` independent operators sharing `ctx`."""
    return _instance(spec, ctx)


def _instance(spec, ctx):
    tags = validate_structure(spec)
    operators = []
    for index in range(spec.tuple_size):
        rng = seeded_rng(spec.seed, 'operator', index)
        operators.append(_normalized(ctx, gen_operator(ctx, tags, rng)))
    for T in operators:
        T.setflags(write=False)
    realized = _verified(ctx, operators, tags)
    LOG.debug("Instance %d: requested %s, realized %s", spec.seed,
              sorted(t.value for t in tags),
              sorted(t.value for t in realized))
    return OperatorInstance(ctx, tuple(operators), realized, spec.seed, spec)


def generate(spec):
    """Context and operators of `spec` in one step."""
    return gen_tuple(spec, gen_context(spec))


def random_spec(seed, structure=(), dims=(2, 3, 4, 5, 6), tuple_size=1):
    """
    Draw a spec from the campaign distribution: dimension uniform over
    `dims`, rank uniform over the admissible range.
    """
    rng = seeded_rng(seed, 'spec')
    structure = parse_structure(structure)
    dims = [d for d in dims
            if d >= 2 or Structure.NILPOTENT_AT2 not in structure]
    if not dims:
        raise InconsistentTags("nilpotent_AT2 instances need dimension >= 2.")
    dim = int(rng.choice(dims))
    lowest = 2 if Structure.NILPOTENT_AT2 in structure else 1
    rank = int(rng.integers(lowest, dim + 1))
    return InstanceSpec(dim, rank, structure, tuple_size, seed)
