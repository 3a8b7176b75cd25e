"""Laurent-polynomial symbols on the unit circle.

A :class:`LaurentPoly` is a finitely supported map ``k -> c_k`` on the integers,
read as the function ``sum_k c_k z**k`` on ``|z| = 1``.  It is the image of a
structured operator in the Calkin algebra: two operators of the class differ
by a compact operator exactly when their symbols agree.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from numbers import Number

import numpy as np

from .errors import PreconditionError, SymbolVanishesOnCircle

#: coefficients with modulus below this are dropped after every operation
COEFF_DROP = 1e-14
#: per-coefficient tolerance used by ``==``
COEFF_EQ_TOL = 1e-12

DEFAULT_GRID = 4096
DEFAULT_MIN_MODULUS = 1e-8


class LaurentPoly:
    """Immutable Laurent polynomial with complex coefficients.

    >>> z = LaurentPoly.monomial(1)
    >>> (z * z.star()) == LaurentPoly.constant(1)
    True
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, complex] | None = None):
        clean: dict[int, complex] = {}
        for k, c in (coeffs or {}).items():
            c = complex(c)
            if abs(c) >= COEFF_DROP:
                clean[int(k)] = c
        self._coeffs = dict(sorted(clean.items()))

    @classmethod
    def constant(cls, c: complex) -> LaurentPoly:
        return cls({0: c})

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> LaurentPoly:
        return cls({k: c})

    @classmethod
    def zero(cls) -> LaurentPoly:
        return cls()

    @property
    def coeffs(self) -> dict[int, complex]:
        return dict(self._coeffs)

    def __getitem__(self, k: int) -> complex:
        return self._coeffs.get(k, 0j)

    def items(self) -> Iterable[tuple[int, complex]]:
        return self._coeffs.items()

    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def min_degree(self) -> int:
        return min(self._coeffs, default=0)

    @property
    def max_degree(self) -> int:
        return max(self._coeffs, default=0)

    @property
    def bandwidth(self) -> int:
        """Largest absolute exponent in the support (0 for constants and zero)."""
        return max((abs(k) for k in self._coeffs), default=0)

    @property
    def upper_width(self) -> int:
        """How far below the diagonal the Toeplitz matrix reaches (largest positive exponent)."""
        return max(self.max_degree, 0)

    @property
    def lower_width(self) -> int:
        """How far above the diagonal the Toeplitz matrix reaches (largest negative exponent, as a positive number)."""
        return max(-self.min_degree, 0)

    def __add__(self, other: LaurentPoly | Number) -> LaurentPoly:
        if isinstance(other, Number):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: LaurentPoly | Number) -> LaurentPoly:
        if isinstance(other, Number):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other: Number) -> LaurentPoly:
        return (-self) + other

    def __mul__(self, other: LaurentPoly | Number) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            return multiply(self, other)
        if isinstance(other, Number):
            return LaurentPoly({k: c * other for k, c in self._coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> LaurentPoly:
        return self * (1.0 / other)

    def star(self) -> LaurentPoly:
        return star(self)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Number):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.allclose(other, COEFF_EQ_TOL)

    __hash__ = None  # equality is tolerance based

    def allclose(self, other: LaurentPoly, atol: float = COEFF_EQ_TOL) -> bool:
        keys = set(self._coeffs) | set(other._coeffs)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def __call__(self, z):
        """Evaluate at complex point(s) ``z`` (nonzero)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k, c in self._coeffs.items():
            out = out + c * z**k
        return out

    def on_circle(self, theta) -> np.ndarray:
        """Evaluate at ``exp(i * theta)``."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for k, c in self._coeffs.items():
            out += c * np.exp(1j * k * theta)
        return out

    def to_dense(self) -> tuple[int, np.ndarray]:
        """Return ``(min_degree, coefficients from min to max degree)``."""
        if not self._coeffs:
            return 0, np.zeros(0, dtype=complex)
        lo, hi = self.min_degree, self.max_degree
        arr = np.zeros(hi - lo + 1, dtype=complex)
        for k, c in self._coeffs.items():
            arr[k - lo] = c
        return lo, arr

    def __repr__(self) -> str:
        if not self._coeffs:
            return "LaurentPoly(0)"
        terms = ", ".join(f"{k}: {c:.6g}" for k, c in self._coeffs.items())
        return f"LaurentPoly({{{terms}}})"


def add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    out = a.coeffs
    for k, c in b.items():
        out[k] = out.get(k, 0j) + c
    return LaurentPoly(out)


def multiply(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Convolution ``(ab)_m = sum_k a_k b_{m-k}``.

    Sums are correctly rounded (``math.fsum``), so ``multiply(a, b)`` and
    ``multiply(b, a)`` agree bit for bit.
    """
    terms: dict[int, list[complex]] = {}
    for k, ca in a.items():
        for j, cb in b.items():
            terms.setdefault(k + j, []).append(ca * cb)
    return LaurentPoly(
        {
            m: complex(math.fsum(t.real for t in ts), math.fsum(t.imag for t in ts))
            for m, ts in terms.items()
        }
    )


def star(a: LaurentPoly) -> LaurentPoly:
    """Symbol of the adjoint: ``(a*)_k = conj(a_{-k})``."""
    return LaurentPoly({-k: np.conj(c) for k, c in a.items()})


def sum_of_squares(symbols: Iterable[LaurentPoly]) -> LaurentPoly:
    """Symbol of ``sum_i T_i* T_i``, i.e. ``sum_i |phi_i|**2`` on the circle."""
    symbols = list(symbols)
    if not symbols:
        raise PreconditionError("sum_of_squares needs at least one symbol")
    total = LaurentPoly.zero()
    for phi in symbols:
        total = total + multiply(star(phi), phi)
    return total


def min_modulus_on_grid(a: LaurentPoly, grid_points: int = DEFAULT_GRID) -> float:
    theta = 2 * np.pi * np.arange(grid_points) / grid_points
    return float(np.min(np.abs(a.on_circle(theta))))


def winding_number(
    a: LaurentPoly,
    grid_points: int = DEFAULT_GRID,
    min_modulus: float = DEFAULT_MIN_MODULUS,
) -> int:
    """Winding number of ``a`` around 0 along the positively oriented unit circle.

    Raises:
        SymbolVanishesOnCircle: if ``|a|`` drops below ``min_modulus`` on the grid.
    """
    if grid_points <= 0 or min_modulus <= 0:
        raise PreconditionError("grid_points and min_modulus must be positive")
    if a.is_zero():
        raise PreconditionError("winding number of the zero symbol is undefined")
    theta = 2 * np.pi * np.arange(grid_points + 1) / grid_points
    values = a.on_circle(theta)
    smallest = float(np.min(np.abs(values)))
    if smallest < min_modulus:
        raise SymbolVanishesOnCircle(
            f"|symbol| reaches {smallest:.3e} < {min_modulus:.1e} on the circle"
        )
    increments = np.angle(values[1:] / values[:-1])
    return int(np.rint(np.sum(increments) / (2 * np.pi)))
