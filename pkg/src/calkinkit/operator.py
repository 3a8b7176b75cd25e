"""Structured operators ``Toeplitz(phi) + F`` on l^2(N).

The infinite matrix of a :class:`StructuredOperator` is

    M[i, j] = phi[i - j] + F[i, j]        (i, j >= 0)

where ``phi`` is a :class:`~calkinkit.symbol.LaurentPoly` and ``F`` is a finite
:class:`CompactBlock` sitting in the top-left corner.  The class is closed
under sums, products and adjoints; products pick up the finite Hankel-type
correction ``T(a) T(b) - T(ab)``, which is computed in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number

import numpy as np
from scipy.linalg import toeplitz

from .symbol import LaurentPoly, multiply, star

#: trailing rows/columns of a block below this modulus are trimmed
BLOCK_DROP = 1e-14
BLOCK_EQ_TOL = 1e-12


def _trim(entries: np.ndarray) -> np.ndarray:
    entries = np.asarray(entries, dtype=complex)
    if entries.size == 0:
        return np.zeros((0, 0), dtype=complex)
    big = np.abs(entries) >= BLOCK_DROP
    rows = np.flatnonzero(big.any(axis=1))
    cols = np.flatnonzero(big.any(axis=0))
    size = 0
    if rows.size:
        size = max(size, rows[-1] + 1)
    if cols.size:
        size = max(size, cols[-1] + 1)
    return entries[:size, :size].copy()


def _pad(entries: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((size, size), dtype=complex)
    r, c = entries.shape
    out[:r, :c] = entries
    return out


@dataclass(frozen=True, eq=False)
class CompactBlock:
    """Finite square matrix occupying the top-left corner of an infinite matrix.

    Non-square input is zero-padded to a square; trailing zero rows and
    columns are trimmed, so ``size`` is minimal.
    """

    entries: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=complex))

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if arr.size == 0:
            arr = np.zeros((0, 0), dtype=complex)
        n = max(arr.shape)
        arr = _trim(_pad(arr, n))
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def zero(cls) -> CompactBlock:
        return cls()

    @classmethod
    def outer(cls, left, right) -> CompactBlock:
        """Rank-one block ``left right^H``."""
        left = np.asarray(left, dtype=complex).ravel()
        right = np.asarray(right, dtype=complex).ravel()
        return cls(np.outer(left, right.conj()))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def padded(self, size: int) -> np.ndarray:
        if size < self.size:
            raise ValueError("cannot pad a block to a smaller size")
        return _pad(self.entries, size)

    def norm(self, ord=2) -> float:
        if self.size == 0:
            return 0.0
        return float(np.linalg.norm(self.entries, ord))

    def adjoint(self) -> CompactBlock:
        return CompactBlock(self.entries.conj().T)

    def __add__(self, other: CompactBlock) -> CompactBlock:
        n = max(self.size, other.size)
        return CompactBlock(self.padded(n) + other.padded(n))

    def scaled(self, c: complex) -> CompactBlock:
        return CompactBlock(c * self.entries)

    def allclose(self, other: CompactBlock, atol: float = BLOCK_EQ_TOL) -> bool:
        n = max(self.size, other.size)
        if n == 0:
            return True
        return bool(np.max(np.abs(self.padded(n) - other.padded(n))) <= atol)

    def __repr__(self) -> str:
        return f"CompactBlock(size={self.size})"


def toeplitz_section(symbol: LaurentPoly, rows: int, cols: int) -> np.ndarray:
    """Top-left ``rows x cols`` corner of the Toeplitz matrix ``symbol[i - j]``."""
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=complex)
    first_col = np.array([symbol[i] for i in range(rows)], dtype=complex)
    first_row = np.array([symbol[-j] for j in range(cols)], dtype=complex)
    return toeplitz(first_col, first_row)


@dataclass(frozen=True, eq=False)
class StructuredOperator:
    """``Toeplitz(symbol) + compact`` acting on l^2(N).

    Arithmetic operators are overloaded: ``a + b``, ``a - b``, ``c * a``,
    ``a @ b`` (composition) and ``a.H`` (adjoint).
    """

    symbol: LaurentPoly = field(default_factory=LaurentPoly)
    compact: CompactBlock = field(default_factory=CompactBlock)

    @classmethod
    def identity(cls) -> StructuredOperator:
        return cls(LaurentPoly.constant(1.0))

    @classmethod
    def zero(cls) -> StructuredOperator:
        return cls()

    @classmethod
    def toeplitz(cls, symbol: LaurentPoly | dict) -> StructuredOperator:
        if not isinstance(symbol, LaurentPoly):
            symbol = LaurentPoly(symbol)
        return cls(symbol)

    @classmethod
    def shift(cls, k: int = 1) -> StructuredOperator:
        """``R**k`` for ``k >= 0`` and ``(R*)**(-k)`` for ``k < 0``."""
        return cls(LaurentPoly.monomial(k))

    @classmethod
    def block(cls, entries) -> StructuredOperator:
        return cls(LaurentPoly.zero(), CompactBlock(entries))

    @classmethod
    def projection(cls, index: int = 0) -> StructuredOperator:
        """Rank-one coordinate projection ``e_index e_index^*``."""
        e = np.zeros(index + 1)
        e[index] = 1.0
        return cls.block(np.outer(e, e))

    @property
    def H(self) -> StructuredOperator:
        return adjoint(self)

    @property
    def lower_reach(self) -> int:
        """Number of rows below the diagonal a column can reach (positive symbol width)."""
        return self.symbol.upper_width

    @property
    def bandwidth(self) -> int:
        return self.symbol.bandwidth

    def __add__(self, other):
        if isinstance(other, StructuredOperator):
            return add(self, other)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, StructuredOperator):
            return add(self, scale(-1.0, other))
        return NotImplemented

    def __neg__(self):
        return scale(-1.0, self)

    def __mul__(self, c):
        if isinstance(c, Number):
            return scale(c, self)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, StructuredOperator):
            return compose(self, other)
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StructuredOperator):
            return NotImplemented
        return self.allclose(other)

    __hash__ = None

    def allclose(self, other: StructuredOperator, atol: float = BLOCK_EQ_TOL) -> bool:
        return self.symbol.allclose(other.symbol, atol) and self.compact.allclose(
            other.compact, atol
        )

    def truncate(self, rows: int, cols: int) -> np.ndarray:
        return truncate(self, rows, cols)

    def apply(self, x) -> np.ndarray:
        """Exact image of a finitely supported vector (returned with all nonzero rows)."""
        x = np.asarray(x, dtype=complex).ravel()
        rows = max(len(x) + self.lower_reach, self.compact.size, 1)
        return truncate(self, rows, len(x)) @ x

    def __repr__(self) -> str:
        return f"StructuredOperator(symbol={self.symbol!r}, compact={self.compact!r})"


def truncate(op: StructuredOperator, rows: int, cols: int) -> np.ndarray:
    """Top-left ``rows x cols`` corner of the infinite matrix of ``op``."""
    if rows < 0 or cols < 0:
        raise ValueError("section shape must be nonnegative")
    out = toeplitz_section(op.symbol, rows, cols)
    n = op.compact.size
    if n:
        r, c = min(rows, n), min(cols, n)
        out[:r, :c] += op.compact.entries[:r, :c]
    return out


def adjoint(op: StructuredOperator) -> StructuredOperator:
    return StructuredOperator(star(op.symbol), op.compact.adjoint())


def add(a: StructuredOperator, b: StructuredOperator) -> StructuredOperator:
    return StructuredOperator(a.symbol + b.symbol, a.compact + b.compact)


def scale(c: complex, a: StructuredOperator) -> StructuredOperator:
    return StructuredOperator(a.symbol * c, a.compact.scaled(c))


def semicommutator(a: LaurentPoly, b: LaurentPoly) -> np.ndarray:
    """Finite matrix of ``T(a) T(b) - T(ab)``.

    Entry ``(i, j)`` is ``-sum_{k<0} a[i-k] b[k-j]``, a product of two Hankel
    matrices built from the strictly positive part of ``a`` and the strictly
    negative part of ``b``.  The result is ``p x p`` with ``p`` the larger
    bandwidth; it vanishes when ``a`` is co-analytic or ``b`` analytic.
    """
    p_a, p_b = a.upper_width, b.lower_width
    if p_a == 0 or p_b == 0:
        return np.zeros((0, 0), dtype=complex)
    depth = min(p_a, p_b)
    # hankel_a[i, m] = a[i + 1 + m],  hankel_b[m, j] = b[-1 - m - j]
    hankel_a = np.array(
        [[a[i + 1 + m] for m in range(depth)] for i in range(p_a)], dtype=complex
    )
    hankel_b = np.array(
        [[b[-1 - m - j] for j in range(p_b)] for m in range(depth)], dtype=complex
    )
    size = max(p_a, p_b)
    out = np.zeros((size, size), dtype=complex)
    out[:p_a, :p_b] = -hankel_a @ hankel_b
    return out


def compose(a: StructuredOperator, b: StructuredOperator) -> StructuredOperator:
    """Exact product ``a b`` inside the structured class."""
    fa, fb = a.compact, b.compact
    na, nb = fa.size, fb.size
    hank = semicommutator(a.symbol, b.symbol)
    size = max(
        hank.shape[0],
        nb + a.symbol.upper_width if nb else 0,
        na + b.symbol.lower_width if na else 0,
        na,
        nb,
    )
    block = np.zeros((size, size), dtype=complex)
    block[: hank.shape[0], : hank.shape[1]] += hank
    if nb:
        rows = nb + a.symbol.upper_width
        block[:rows, :nb] += toeplitz_section(a.symbol, rows, nb) @ fb.entries
    if na:
        cols = na + b.symbol.lower_width
        block[:na, :cols] += fa.entries @ toeplitz_section(b.symbol, na, cols)
    if na and nb:
        m = max(na, nb)
        block[:m, :m] += fa.padded(m) @ fb.padded(m)
    return StructuredOperator(multiply(a.symbol, b.symbol), CompactBlock(block))


def commutator(a: StructuredOperator, b: StructuredOperator) -> StructuredOperator:
    return compose(a, b) - compose(b, a)


def is_compact(op: StructuredOperator) -> bool:
    return op.symbol.is_zero()


def is_essential_isometry(op: StructuredOperator) -> bool:
    """``1 - op* op`` is compact, i.e. ``|symbol| == 1`` as a coefficient identity."""
    return multiply(star(op.symbol), op.symbol) == LaurentPoly.constant(1.0)
