"""Kernel bases of tall sections and the finite certificates built on them.

Every kernel computation goes through an SVD with an absolute tolerance and a
mandated spectral gap: a singular value in ``[tol, 10 tol)`` is treated as
undecidable at that size (:class:`~calkinkit.errors.ToleranceAmbiguous`).
Kernel vectors are then *certified*: the exact entry formula of the infinite
operator is applied to the zero-padded vector on a window twice the section
height, and the residual must stay below ``CERT_TOL``.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space, svd

from .errors import (
    CertificateFailed,
    MonotonicityFailed,
    NotEssentialIsometry,
    NotStabilized,
    PreconditionError,
    ToleranceAmbiguous,
)
from .optuple import (
    OperatorTuple,
    column_apply,
    column_truncate,
    is_essential_spherical_isometry,
    row_apply,
    row_truncate,
)

KERNEL_TOL = 1e-10
CERT_TOL = 1e-10
GAP_FACTOR = 10.0
TAIL_MASS = 1e-12
# a pivot whose orthogonalized projection is shorter than this is skipped
_PIVOT_FLOOR = 1e-3


@dataclass
class KernelBasis:
    """Orthonormal kernel vectors of a section, stored as rows of ``vectors``."""

    N: int
    margin: int
    vectors: np.ndarray
    exactness: bool = False
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.dim


def canonical_basis(basis: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of ``span(basis.T)``.

    ``basis`` holds orthonormal vectors as rows.  Coordinate vectors
    ``e_0, e_1, ...`` are projected onto the subspace in index order and
    Gram-Schmidt keeps the first ``d`` independent ones, so the result
    depends only on the subspace: the first vector has the lowest leading
    coordinate, and each vector's pivot entry is real and positive.
    """
    d, length = basis.shape
    if d == 0:
        return basis.copy()
    # coordinates of P e_j in the orthonormal frame are conj(basis[:, j])
    picked: list[np.ndarray] = []
    for j in range(length):
        c = basis[:, j].conj().copy()
        for _ in range(2):
            for q in picked:
                c -= q * np.vdot(q, c)
        norm = np.linalg.norm(c)
        if norm > _PIVOT_FLOOR:
            picked.append(c / norm)
            if len(picked) == d:
                break
    coeffs = np.array(picked)
    return coeffs @ basis


def trim_tail(v: np.ndarray, rel: float = TAIL_MASS) -> np.ndarray:
    """Drop the longest trailing segment whose norm is at most ``rel * ||v||``."""
    v = np.asarray(v, dtype=complex)
    total = np.linalg.norm(v)
    if total == 0:
        return v[:0]
    tail = np.sqrt(np.cumsum(np.abs(v[::-1]) ** 2))[::-1]
    # tail[i] = ||v[i:]||
    keep = np.flatnonzero(tail > rel * total)
    return v[: keep[-1] + 1] if keep.size else v[:0]


def kernel_basis(
    section: np.ndarray,
    tol: float = KERNEL_TOL,
    N: int | None = None,
    margin: int = 0,
) -> KernelBasis:
    """Null space of ``section`` from its SVD.

    The kernel dimension is the number of columns minus the number of
    singular values ``>= tol``.

    Raises:
        ToleranceAmbiguous: a singular value lies in ``[tol, 10 tol)``.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    section = np.asarray(section, dtype=complex)
    rows, cols = section.shape
    if N is None:
        N = cols
    if section.size == 0:
        return KernelBasis(N, margin, np.eye(cols, dtype=complex))
    _, s, vh = svd(section, full_matrices=True)
    ambiguous = s[(s >= tol) & (s < GAP_FACTOR * tol)]
    if ambiguous.size:
        raise ToleranceAmbiguous(
            f"singular value {ambiguous[0]:.3e} inside [{tol:.1e}, {GAP_FACTOR * tol:.1e}); "
            "grow the section"
        )
    rank = int(np.count_nonzero(s >= tol))
    vectors = vh[rank:].conj()
    return KernelBasis(N, margin, canonical_basis(vectors), singular_values=s)


def certify(
    basis: KernelBasis,
    apply_window: Callable[[np.ndarray, int], np.ndarray],
    window: int,
    cert_tol: float = CERT_TOL,
) -> KernelBasis:
    """Fill in per-vector residuals of the infinite operator and the exactness flag."""
    residuals = np.array(
        [np.linalg.norm(apply_window(v, window)) for v in basis.vectors], dtype=float
    )
    basis.residuals = residuals
    basis.exactness = bool(np.all(residuals <= cert_tol))
    return basis


def column_kernel(
    t: OperatorTuple, N: int, tol: float = KERNEL_TOL, margin: int | None = None
) -> KernelBasis:
    """Certified kernel of the column section at size ``N``."""
    if margin is None:
        margin = t.default_margin()
    kb = kernel_basis(column_truncate(t, N, margin), tol, N, margin)
    return certify(kb, lambda v, rows: column_apply(t, v, rows), 2 * (N + margin))


def row_kernel(
    t: OperatorTuple, N: int, tol: float = KERNEL_TOL, margin: int | None = None
) -> KernelBasis:
    """Certified kernel of the row section at size ``N`` (vectors have length ``n N``)."""
    if margin is None:
        margin = t.default_margin()
    kb = kernel_basis(row_truncate(t, N, margin), tol, N, margin)
    return certify(kb, lambda w, rows: row_apply(t, w, rows), 2 * (N + margin))


def stabilized_kernel(
    t: OperatorTuple,
    N: int = 32,
    tol: float = KERNEL_TOL,
    margin: int | None = None,
    sizes: Sequence[int] | None = None,
) -> KernelBasis:
    """Joint kernel at sizes ``N, 2N, 4N`` (or ``sizes``); dimensions must agree and certify.

    No essential-isometry precondition: usable for any Fredholm column.
    """
    sizes = list(sizes) if sizes is not None else [N, 2 * N, 4 * N]
    bases = [column_kernel(t, size, tol, margin) for size in sizes]
    dims = tuple(b.dim for b in bases)
    if len(set(dims)) != 1:
        raise NotStabilized(f"joint kernel dimensions {dims} at sizes {sizes}", dims)
    for b in bases:
        if not b.exactness:
            raise CertificateFailed(
                f"kernel vector residual {b.residuals.max():.3e} at N={b.N} exceeds {CERT_TOL:.0e}"
            )
    return bases[-1]


def stabilized_joint_kernel(
    t: OperatorTuple,
    N: int = 32,
    tol: float = KERNEL_TOL,
    margin: int | None = None,
    sizes: Sequence[int] | None = None,
) -> KernelBasis:
    if not is_essential_spherical_isometry(t):
        raise NotEssentialIsometry("stabilized_joint_kernel needs an essential spherical isometry")
    return stabilized_kernel(t, N, tol, margin, sizes)


@dataclass
class GrowthCertificate:
    """Certified row-kernel dimensions at increasing section sizes."""

    sizes: list[int]
    dims: list[int]
    bases: list[KernelBasis]
    margin: int

    def __iter__(self):
        return iter(zip(self.sizes, self.dims))

    def __len__(self) -> int:
        return len(self.sizes)

    def as_list(self) -> list[tuple[int, int]]:
        return list(self)


def row_kernel_growth_certificate(
    t: OperatorTuple,
    sizes: Sequence[int] = (16, 32, 64),
    tol: float = KERNEL_TOL,
    margin: int | None = None,
) -> GrowthCertificate:
    """Finite witness that the row operator of ``t`` has infinite-dimensional kernel.

    Each certified vector is a genuine kernel vector of the infinite row
    operator, so strictly increasing certified dimensions bound the kernel
    dimension from below without limit.
    """
    if t.n < 2:
        raise PreconditionError("the row-kernel growth certificate needs n >= 2")
    sizes = list(sizes)
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise PreconditionError(f"sizes must be nonempty and strictly increasing, got {sizes}")
    if margin is None:
        margin = t.default_margin()
    bases = []
    for N in sizes:
        kb = row_kernel(t, N, tol, margin)
        if not kb.exactness:
            raise CertificateFailed(
                f"row kernel residual {kb.residuals.max():.3e} at N={N} exceeds {CERT_TOL:.0e}"
            )
        floor = (t.n - 1) * N - margin
        if kb.dim < floor:
            raise CertificateFailed(f"row kernel dimension {kb.dim} < (n-1)N - margin = {floor}")
        bases.append(kb)
    dims = [b.dim for b in bases]
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise MonotonicityFailed(f"row kernel dimensions {dims} are not strictly increasing")
    return GrowthCertificate(sizes, dims, bases, margin)


def _pad_to(v: np.ndarray, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=complex)
    m = min(length, len(v))
    out[:m] = v[:m]
    return out


def closed_range_witness(
    t: OperatorTuple,
    sizes: Sequence[int] = (32, 64, 128),
    kernel: KernelBasis | None = None,
    tol: float = KERNEL_TOL,
) -> list[tuple[int, float]]:
    """Smallest singular value of the column section on the complement of the joint kernel.

    A diagnostic: a sequence bounded away from zero across doublings is
    numerical evidence of closed range, not a proof.
    """
    if kernel is None:
        kernel = stabilized_joint_kernel(t, tol=tol)
    out = []
    for N in sizes:
        section = column_truncate(t, N)
        if kernel.dim:
            ker = np.array([_pad_to(trim_tail(v), N) for v in kernel.vectors])
            complement = null_space(ker.conj())
            section = section @ complement
        s = svd(section, compute_uv=False)
        out.append((N, float(s.min()) if s.size else float("inf")))
    return out
