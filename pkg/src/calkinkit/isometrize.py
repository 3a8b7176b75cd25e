"""Compact perturbation of an essential spherical isometry to a genuine one.

Pipeline for ``T = (T_1, ..., T_n)``:

1. joint kernel ``ker T`` (stabilized, certified) with orthonormal ``u_k``;
2. orthonormal ``w_k`` in the kernel of the row operator: from the stabilized
   kernel of ``T*`` when ``n = 1`` (requires ``dim ker T <= dim ker T*``), from
   the row-kernel growth certificate when ``n >= 2`` (always enough vectors);
3. ``K x = sum_k <x, u_k> w_k``, ``T~ = T + K``;
4. ``A = T~* T~ = 1 + C`` with ``C`` a finite Hermitian block;
5. ``A^{-1/2} = 1 + D`` from the eigendecomposition of ``C``;
6. ``V = T~ A^{-1/2}``, so ``V* V = 1`` and ``V - T`` is compact.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import (
    CertificateFailed,
    IndexObstruction,
    IsometrizationFailed,
    NotEssentialIsometry,
    NotHermitian,
    NotPositive,
    PreconditionError,
)
from .operator import CompactBlock, StructuredOperator, compose, is_compact
from .optuple import OperatorTuple, column_truncate, gram, is_essential_spherical_isometry
from .spectral import (
    KERNEL_TOL,
    TAIL_MASS,
    row_kernel_growth_certificate,
    stabilized_kernel,
)
from .symbol import LaurentPoly

POSITIVITY_FLOOR = 1e-8
HERMITIAN_TOL = 1e-10
RESIDUAL_TOL = 1e-8
DENSE_CHECK_N = 256


def _support_length(rows: np.ndarray, rel: float = TAIL_MASS) -> int:
    """Shortest prefix length after which every row's tail is negligible."""
    if rows.size == 0:
        return 0
    norms = np.linalg.norm(rows, axis=-1, keepdims=True)
    norms[norms == 0] = 1.0
    mass = np.abs(rows / norms) ** 2
    tail = np.sqrt(np.cumsum(mass[..., ::-1], axis=-1)[..., ::-1])
    big = np.flatnonzero((tail > rel).any(axis=tuple(range(tail.ndim - 1))))
    return int(big[-1] + 1) if big.size else 0


def _reorthonormalize(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    q, r = np.linalg.qr(rows.T)
    phases = np.diag(r) / np.abs(np.diag(r))
    return (q * phases).T


@dataclass
class KernelPairing:
    """Orthonormal ``u_k`` in ``ker T`` paired with orthonormal ``w_k`` in ``ker T*``.

    ``u`` has shape ``(d, L)``; ``w`` has shape ``(d, n, M)`` (component-major).
    """

    u: np.ndarray
    w: np.ndarray
    kernel_dim: int
    available_dim: int
    harvest_size: int | None = None

    @property
    def d(self) -> int:
        return self.u.shape[0]

    def perturbation(self) -> OperatorTuple:
        """The rank-``d`` tuple ``K_i = sum_k w_k^{(i)} u_k^H`` as compact-only operators."""
        n = self.w.shape[1]
        if self.d == 0:
            return OperatorTuple(StructuredOperator.zero() for _ in range(n))
        size = max(self.u.shape[1], self.w.shape[2])
        ops = []
        for i in range(n):
            block = np.zeros((size, size), dtype=complex)
            for k in range(self.d):
                wi, uk = self.w[k, i], self.u[k]
                block[: len(wi), : len(uk)] += np.outer(wi, uk.conj())
            ops.append(StructuredOperator(LaurentPoly.zero(), CompactBlock(block)))
        return OperatorTuple(ops)


def build_kernel_pairing(
    t: OperatorTuple,
    N: int = 32,
    sizes: Sequence[int] = (16, 32, 64),
    tol: float = KERNEL_TOL,
    kernel_sizes: Sequence[int] | None = None,
) -> KernelPairing:
    """Choose the isometry ``ker T -> ker T*`` that defines the perturbation.

    ``kernel_sizes`` (default ``N, 2N, 4N``) drive kernel stabilization;
    ``sizes`` are the row-kernel certificate sizes used when ``n >= 2``.

    Raises:
        IndexObstruction: ``n == 1`` and ``dim ker T > dim ker T*``.
    """
    ker = stabilized_kernel(t, N, tol, sizes=kernel_sizes)
    d = ker.dim
    u = ker.vectors
    u = _reorthonormalize(u[:, : _support_length(u)])

    if t.n == 1:
        coker = stabilized_kernel(t.adjoint(), N, tol, sizes=kernel_sizes)
        if d > coker.dim:
            raise IndexObstruction(
                f"dim ker T = {d} > {coker.dim} = dim ker T*: "
                "no compact perturbation of T is an isometry",
                kernel_dim=d,
                cokernel_dim=coker.dim,
            )
        w = coker.vectors[:d]
        w = _reorthonormalize(w[:, : _support_length(w)])
        return KernelPairing(u, w[:, None, :], d, coker.dim, coker.N)

    growth = row_kernel_growth_certificate(t, sizes, tol)
    if d == 0:
        return KernelPairing(u, np.zeros((0, t.n, 0), dtype=complex), 0, growth.dims[0], None)
    for size, dim, basis in zip(growth.sizes, growth.dims, growth.bases):
        if dim >= d:
            w = basis.vectors[:d].reshape(d, t.n, size)
            length = _support_length(w)
            w = _reorthonormalize(w[:, :, :length].reshape(d, -1)).reshape(d, t.n, length)
            return KernelPairing(u, w, d, dim, size)
    raise CertificateFailed(f"no certified row-kernel section holds {d} vectors (dims {growth.dims})")


def perturb_and_gram(
    t: OperatorTuple, pairing: KernelPairing
) -> tuple[OperatorTuple, StructuredOperator]:
    """``T~ = T + K`` and ``A = T~* T~``; checks ``A`` is ``1 + C`` with ``1 + C`` positive."""
    k = pairing.perturbation()
    t_tilde = OperatorTuple(a + b for a, b in zip(t, k))
    a = gram(t_tilde)
    if a.symbol != LaurentPoly.constant(1.0):
        raise NotEssentialIsometry(f"Gram symbol {a.symbol!r} is not 1")
    _check_positive(a.compact.entries)
    return t_tilde, a


def _check_positive(c: np.ndarray) -> np.ndarray:
    if c.size == 0:
        return np.zeros(0)
    lam = np.linalg.eigvalsh(np.eye(c.shape[0]) + c)
    if lam.min() < POSITIVITY_FLOOR:
        raise NotPositive(f"1 + C has eigenvalue {lam.min():.3e} < {POSITIVITY_FLOOR:.0e}")
    return lam


def inverse_sqrt(a: StructuredOperator) -> StructuredOperator:
    """``A^{-1/2}`` for ``A = 1 + C``, computed on the finite block only.

    With ``C = U diag(lam) U*`` the result is ``1 + U((1 + lam)^{-1/2} - 1)U*``;
    outside the block ``A`` is the identity and so is its inverse square root.
    """
    if a.symbol != LaurentPoly.constant(1.0):
        raise PreconditionError(f"inverse_sqrt needs symbol 1, got {a.symbol!r}")
    c = a.compact.entries
    if c.size == 0:
        return StructuredOperator.identity()
    if np.max(np.abs(c - c.conj().T)) > HERMITIAN_TOL:
        raise NotHermitian("compact part of A is not Hermitian")
    c = (c + c.conj().T) / 2
    lam, vecs = eigh(c)
    if (1 + lam).min() < POSITIVITY_FLOOR:
        raise NotPositive(f"1 + C has eigenvalue {(1 + lam).min():.3e} < {POSITIVITY_FLOOR:.0e}")
    d = (vecs * ((1 + lam) ** -0.5 - 1)) @ vecs.conj().T
    return StructuredOperator(LaurentPoly.constant(1.0), CompactBlock((d + d.conj().T) / 2))


def dense_gram_residual(v: OperatorTuple, N: int = DENSE_CHECK_N) -> float:
    """``||(V* V - I)_N||_2`` from a tall section (no truncation error)."""
    s = column_truncate(v, N)
    return float(np.linalg.norm(s.conj().T @ s - np.eye(N), 2))


@dataclass
class IsometrizationReport:
    input: OperatorTuple
    K: OperatorTuple  # T = V + K
    V: OperatorTuple
    pairing_K: OperatorTuple  # T~ = T + pairing_K
    T_tilde: OperatorTuple
    A: StructuredOperator
    A_inv_sqrt: StructuredOperator
    gram_residual: float
    dense_residual: float
    kernel_dims: tuple[int, int]
    flags: dict[str, bool] = field(default_factory=dict)
    dense_N: int = DENSE_CHECK_N

    @property
    def ok(self) -> bool:
        return all(self.flags.values())


def isometrize(
    t: OperatorTuple,
    N: int = 32,
    sizes: Sequence[int] = (16, 32, 64),
    tol_kernel: float = KERNEL_TOL,
    tol_residual: float = RESIDUAL_TOL,
    dense_N: int = DENSE_CHECK_N,
    kernel_sizes: Sequence[int] | None = None,
) -> IsometrizationReport:
    """Write ``T = V + K`` with ``V* V = 1`` and ``K`` compact.

    Raises:
        NotEssentialIsometry: ``t`` is not an essential spherical isometry.
        IndexObstruction: single operator with ``dim ker T > dim ker T*``.
        IsometrizationFailed: a residual bound was missed.
    """
    check = is_essential_spherical_isometry(t)
    if not check:
        raise NotEssentialIsometry(
            f"gram symbol {check.gram_symbol!r}, commuting={check.essentially_commuting}"
        )
    pairing = build_kernel_pairing(t, N, sizes, tol_kernel, kernel_sizes)
    t_tilde, a = perturb_and_gram(t, pairing)
    root = inverse_sqrt(a)
    v = OperatorTuple(compose(op, root) for op in t_tilde)

    gv = gram(v)
    defect = gv - StructuredOperator.identity()
    gram_residual = defect.compact.norm()
    dense_residual = dense_gram_residual(v, dense_N)
    flags = {
        "symbols_preserved": all(
            is_compact(vi - ti) and vi.symbol == ti.symbol for vi, ti in zip(v, t)
        ),
        "gram_symbol_one": gv.symbol == LaurentPoly.constant(1.0),
        "gram_block_within_tol": gram_residual <= tol_residual,
        "dense_within_tol": dense_residual <= tol_residual,
        "essentially_commuting": bool(is_essential_spherical_isometry(v).essentially_commuting),
    }
    report = IsometrizationReport(
        input=t,
        K=OperatorTuple(ti - vi for vi, ti in zip(v, t)),
        V=v,
        pairing_K=pairing.perturbation(),
        T_tilde=t_tilde,
        A=a,
        A_inv_sqrt=root,
        gram_residual=gram_residual,
        dense_residual=dense_residual,
        kernel_dims=(pairing.kernel_dim, pairing.available_dim),
        flags=flags,
        dense_N=dense_N,
    )
    if not report.ok:
        failed = [name for name, ok in flags.items() if not ok]
        raise IsometrizationFailed(f"postconditions failed: {', '.join(failed)}")
    return report
