"""Gram-matrix completion and unitary alignment of vector families."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, HypothesisError, InvalidTargetError, NotPSDError
from .linalg import (
    dagger,
    map_families_unitary,
    op_norm,
    orthonormal_extension,
    psd_sqrt,
)

NORMALIZED_FAMILY_TOL = 1e-12


@dataclass
class VectorFamily:
    """A finite family of vectors in C^dim, stored as rows of ``vectors``."""

    dim: int
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if self.vectors.shape[1] != self.dim:
            raise ValueError("vector length does not match dim")

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    def total_weight(self) -> float:
        return float(np.sum(np.abs(self.vectors) ** 2))

    def require_normalized(self):
        if self.total_weight() > 1.0 + NORMALIZED_FAMILY_TOL:
            raise HypothesisError(
                "family weight sum exceeds 1", measured_gap=self.total_weight() - 1.0
            )


@dataclass
class GramTarget:
    """Prescribed n x n PSD Gram matrix."""

    n: int
    c: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=complex)
        if self.c.shape != (self.n, self.n):
            raise ValueError("target shape does not match n")
        w = np.linalg.eigvalsh((self.c + dagger(self.c)) / 2)
        if w.size and w[0] < -1e-10:
            raise InvalidTargetError(f"target has negative eigenvalue {w[0]:.3e}")


def gram_matrix(fam: VectorFamily) -> np.ndarray:
    """Matrix of pairwise inner products, d[i, j] = <xi_i, xi_j>."""
    x = fam.vectors
    g = x @ dagger(x)
    return (g + dagger(g)) / 2


def gram_complete(fam: VectorFamily, target: GramTarget,
                  enforce_weight: bool = True) -> VectorFamily:
    """Vectors eta with <eta_i, eta_j> = c[i, j] and the minimal displacement
    ||eta_i - xi_i||^2 = ((c^1/2 - d^1/2)^2)_ii.

    Realized as W = c^1/2 U with Y = d^1/2 U the polar form of the input
    coordinates; this is the limit object of the perturbation argument that
    handles singular d, and satisfies both identities exactly.
    """
    n = target.n
    if fam.size != n:
        raise ValueError("family size does not match target size")
    if fam.dim < n:
        raise DimensionError(f"need ambient dimension >= {n}, got {fam.dim}")
    if enforce_weight:
        fam.require_normalized()

    d = gram_matrix(fam)
    # Orthonormal basis of an n-dimensional subspace containing the family.
    q = orthonormal_extension(fam.vectors.T, n)  # dim x n
    y = fam.vectors @ q.conj()  # n x n coordinates, row i = xi_i in basis q
    # Polar factor: y = d^1/2 u with u unitary.
    a, s, bh = np.linalg.svd(y)
    u = a @ bh
    try:
        c_half = psd_sqrt(target.c)
    except NotPSDError as exc:
        raise InvalidTargetError(str(exc)) from exc
    w = c_half @ u
    eta = w @ q.T  # back to ambient coordinates
    return VectorFamily(dim=fam.dim, vectors=eta)


def greedy_pivot_select(fam: VectorFamily, m: int) -> list[int]:
    """Pivot indices by iterated maximal residual norm.

    Each step picks the vector with the largest norm after projecting out the
    span of the already-chosen vectors; ties break to the lowest index.
    """
    if m > fam.size:
        raise ValueError("cannot select more pivots than family members")
    x = fam.vectors.copy()
    residual = x.copy()
    chosen: list[int] = []
    for _ in range(m):
        norms = np.linalg.norm(residual, axis=1)
        norms[chosen] = -1.0
        best = int(np.argmax(norms))  # argmax takes the first maximum
        chosen.append(best)
        v = residual[best]
        nv = np.linalg.norm(v)
        if nv > 1e-14:
            v = v / nv
            residual = residual - np.outer(residual @ v.conj(), v)
    return chosen


def expansion_coefficients(fam: VectorFamily, pivots: list[int]) -> np.ndarray:
    """Least-squares coefficients of every vector over the pivot vectors."""
    basis = fam.vectors[pivots]  # m x dim
    sol, *_ = np.linalg.lstsq(basis.T, fam.vectors.T, rcond=None)
    return sol.T  # n x m


@dataclass
class AlignmentResult:
    """Unitary aligning two families, with its certified residual bound."""

    unitary: np.ndarray
    residuals: np.ndarray
    bound: float
    full_rank: bool
    pivots: list[int] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0


def alignment_bound(n: int, dim: int, delta: float) -> float:
    """Certified residual bound for families of size n at Gram gap delta.

    Full-rank case: sqrt(n * delta) via the square-root modulus of the
    completion step.  Rank-deficient case (dim < n): m * eps + (m+1)^2 * delta
    with m = dim pivots and eps = sqrt(m * delta).
    """
    if dim >= n:
        return float(np.sqrt(n * delta))
    m = dim
    eps = float(np.sqrt(m * delta))
    return m * eps + (m + 1) ** 2 * delta


def align_unitary(src: VectorFamily, dst: VectorFamily, delta: float) -> AlignmentResult:
    """Unitary U with U xi_i close to eta_i, given Gram matrices within delta.

    Full-rank case (dim >= n): completes dst to the exact Gram of src and maps
    src onto the completion exactly.  Rank-deficient case (dim < n): aligns the
    greedy pivot subfamilies; the remaining residuals obey
    m * eps + (m+1)^2 * delta.
    """
    if src.dim != dst.dim or src.size != dst.size:
        raise ValueError("families must share dimension and size")
    src.require_normalized()
    dst.require_normalized()
    n = src.size
    gap = float(np.max(np.abs(gram_matrix(src) - gram_matrix(dst)))) if n else 0.0
    if gap >= delta:
        raise HypothesisError(
            f"Gram gap {gap:.3e} is not below delta={delta:.3e}", measured_gap=gap
        )

    if src.dim >= n:
        target = GramTarget(n=n, c=gram_matrix(src))
        zeta = gram_complete(dst, target)
        u = map_families_unitary(src.vectors, zeta.vectors)
        residuals = np.linalg.norm(src.vectors @ u.T - dst.vectors, axis=1)
        return AlignmentResult(
            unitary=u,
            residuals=residuals,
            bound=alignment_bound(n, src.dim, delta),
            full_rank=True,
        )

    m = src.dim
    pivots = greedy_pivot_select(src, m)
    sub_src = VectorFamily(src.dim, src.vectors[pivots])
    sub_dst = VectorFamily(dst.dim, dst.vectors[pivots])
    target = GramTarget(n=m, c=gram_matrix(sub_src))
    zeta = gram_complete(sub_dst, target)
    u = map_families_unitary(sub_src.vectors, zeta.vectors)
    residuals = np.linalg.norm(src.vectors @ u.T - dst.vectors, axis=1)
    return AlignmentResult(
        unitary=u,
        residuals=residuals,
        bound=alignment_bound(n, src.dim, delta),
        full_rank=False,
        pivots=pivots,
    )
