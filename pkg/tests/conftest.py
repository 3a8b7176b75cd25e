from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from calkinkit.operator import CompactBlock, StructuredOperator
from calkinkit.symbol import LaurentPoly

SQRT_HALF = 2**-0.5


def dense_corner(op: StructuredOperator, rows: int, cols: int) -> np.ndarray:
    """Entry-by-entry corner of the infinite matrix; independent of ``truncate``."""
    out = np.zeros((rows, cols), dtype=complex)
    coeffs = op.symbol.coeffs
    block = op.compact.entries
    for i in range(rows):
        for j in range(cols):
            out[i, j] = coeffs.get(i - j, 0)
            if i < block.shape[0] and j < block.shape[0]:
                out[i, j] += block[i, j]
    return out


def dense_product(a: StructuredOperator, b: StructuredOperator, N: int) -> np.ndarray:
    m = a.bandwidth + b.bandwidth + a.compact.size + b.compact.size
    return dense_corner(a, N, N + m) @ dense_corner(b, N + m, N)


def random_symbol(rng: np.random.Generator, max_degree: int = 4) -> LaurentPoly:
    lo = int(rng.integers(-max_degree, 1))
    hi = int(rng.integers(0, max_degree + 1))
    return LaurentPoly(
        {k: complex(rng.normal(), rng.normal()) for k in range(lo, hi + 1)}
    )


def random_operator(
    rng: np.random.Generator, max_degree: int = 4, max_block: int = 6
) -> StructuredOperator:
    n = int(rng.integers(0, max_block + 1))
    block = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return StructuredOperator(random_symbol(rng, max_degree), CompactBlock(block))


def random_fredholm(rng: np.random.Generator) -> StructuredOperator:
    return random_fredholm_with_index(rng)[0]


def random_fredholm_with_index(rng: np.random.Generator) -> tuple[StructuredOperator, int]:
    """``c z^k prod(1 - a z^{+-1})`` with ``|a| <= 0.3`` plus a small block.

    Each factor has winding number 0, so the index is ``-k``; kernel
    vectors decay at least like ``0.3**j``.  Returns the operator and ``-k``.
    """
    k = int(rng.integers(-2, 3))
    c = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    phi = LaurentPoly.monomial(k, c)
    for _ in range(int(rng.integers(0, 3))):
        a = rng.uniform(0, 0.3) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        phi = phi * (LaurentPoly.constant(1.0) - LaurentPoly.monomial(int(rng.choice([-1, 1])), a))
    n = int(rng.integers(0, 5))
    block = 0.05 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return StructuredOperator(phi, CompactBlock(block)), -k


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def R():
    return StructuredOperator.shift(1)


@pytest.fixture
def P0():
    return StructuredOperator.projection(0)


@pytest.fixture
def I():
    return StructuredOperator.identity()


_coeff = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)

laurent_polys = st.dictionaries(
    st.integers(min_value=-4, max_value=4), _coeff, max_size=6
).map(LaurentPoly)

nonzero_polys = laurent_polys.filter(lambda p: not p.is_zero())


@st.composite
def structured_operators(draw, max_block: int = 6):
    phi = draw(laurent_polys)
    n = draw(st.integers(min_value=0, max_value=max_block))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    r = np.random.default_rng(seed)
    block = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
    return StructuredOperator(phi, CompactBlock(block))
