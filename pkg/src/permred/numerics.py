"""Scalar domains used throughout the pipeline.

Four domains are in play:

* ``int`` -- exact signed integers (entries of the emitted matrix, counts).
* :class:`Dyadic` -- ``numerator / 2**exponent`` with an exponent shared by
  every entry of a matrix (the truncated matrix).
* :class:`fractions.Fraction` -- exact rationals for the recovery quotient.
* ``gmpy2.mpc`` -- complex floating values with an explicit mantissa
  precision ``p``. All arithmetic on them must run inside
  :func:`precision` so intermediate results are rounded to ``p`` bits.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import RealnessError

__all__ = [
    "DEFAULT_PRECISION",
    "MIN_PRECISION",
    "Dyadic",
    "hp",
    "hp_matrix",
    "is_hp",
    "max_abs_diff",
    "precision",
    "precision_of",
    "round_nearest_int",
    "round_to_dyadic",
    "tolerance",
    "working_precision",
]

DEFAULT_PRECISION = 128
MIN_PRECISION = 53


def working_precision(b: int) -> int:
    """Mantissa bits needed to truncate to ``b`` fractional bits safely."""
    return max(DEFAULT_PRECISION, b + 64)


@contextlib.contextmanager
def precision(p: int):
    """Run gmpy2 arithmetic at ``p`` mantissa bits (complex results allowed)."""
    if p < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {p}")
    with gmpy2.context(precision=p, allow_complex=True):
        yield


def is_hp(x) -> bool:
    return isinstance(x, (type(mpc(0)), type(mpfr(0))))


def hp(x, p: int) -> mpc:
    """Convert ``x`` (number, Fraction, string or gmpy2 value) to an ``mpc``."""
    with precision(p):
        if isinstance(x, Fraction):
            return mpc(mpfr(x.numerator) / x.denominator)
        if isinstance(x, Dyadic):
            return mpc(gmpy2.mul_2exp(mpfr(x.numerator), -x.exponent))
        if isinstance(x, complex):
            return mpc(mpfr(x.real), mpfr(x.imag))
        return mpc(x)


def hp_matrix(rows, p: int) -> np.ndarray:
    """Object array of ``mpc`` values at precision ``p``."""
    arr = np.asarray(rows, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = hp(v, p)
    return out


def precision_of(values) -> int | None:
    """Largest mantissa precision among gmpy2 values in ``values``; None if none."""
    best = None
    for v in values:
        if isinstance(v, type(mpc(0))):
            pr = max(v.precision)
        elif isinstance(v, type(mpfr(0))):
            pr = v.precision
        else:
            continue
        best = pr if best is None else max(best, pr)
    return best


def tolerance(p: int, slack: int = 40) -> mpfr:
    """Absolute tolerance ``2**(slack - p)`` as an exact mpfr power of two."""
    return gmpy2.mul_2exp(mpfr(1), slack - p)


def max_abs_diff(a, b) -> mpfr:
    """Entrywise max ``|a - b|`` of two equally shaped arrays (0 for empty)."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    p = precision_of(list(a.flat) + list(b.flat)) or DEFAULT_PRECISION
    worst = mpfr(0)
    with precision(p):
        for x, y in zip(a.flat, b.flat):
            d = abs(hp(x, p) - hp(y, p))
            if d > worst:
                worst = d
    return worst


def round_nearest_int(x) -> int:
    """Nearest integer to a rational or real ``mpfr`` ``x``; ties round away from zero."""
    if isinstance(x, type(mpfr(0))):
        if not gmpy2.is_finite(x):
            raise ValueError("cannot round a non-finite value")
        x = Fraction(*x.as_integer_ratio())
    x = Fraction(x)
    q, r = divmod(abs(x.numerator), x.denominator)
    if 2 * r >= x.denominator:
        q += 1
    return q if x >= 0 else -q


@dataclass(frozen=True, eq=False)
class Dyadic:
    """The rational ``numerator / 2**exponent``.

    Matrices of Dyadics share one exponent, so the numerators alone form the
    integer matrix. Products add exponents and sums align to the larger one;
    numerators are not reduced, keeping the shared exponent visible.
    """

    numerator: int
    exponent: int = 0

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be nonnegative")
        object.__setattr__(self, "numerator", int(self.numerator))

    @staticmethod
    def _lift(other):
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other, 0)
        return NotImplemented

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        e = max(self.exponent, other.exponent)
        return Dyadic(
            (self.numerator << (e - self.exponent)) + (other.numerator << (e - other.exponent)), e
        )

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.numerator, self.exponent)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (Dyadic, int, Rational)):
            other_value = other.to_fraction() if isinstance(other, Dyadic) else Fraction(other)
            return self.to_fraction() == other_value
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __float__(self):
        return float(self.to_fraction())

    def __repr__(self):
        return f"Dyadic({self.numerator}/2^{self.exponent})"


def round_to_dyadic(x, b: int, imag_tol=None) -> Dyadic:
    """Nearest ``k / 2**b`` to the real part of ``x`` (ties away from zero).

    ``x`` may be an int, Fraction, float or gmpy2 value. For complex ``x`` the
    imaginary part must not exceed ``imag_tol`` (default ``2**(44 - p)``);
    a larger residue means the value was never meant to be real.
    """
    if b < 0:
        raise ValueError("b must be nonnegative")
    if isinstance(x, (int, Fraction)):
        return Dyadic(round_nearest_int(Fraction(x) * (1 << b)), b)
    if isinstance(x, float):
        return Dyadic(round_nearest_int(Fraction(x) * (1 << b)), b)
    if isinstance(x, complex):
        x = hp(x, MIN_PRECISION)
    if isinstance(x, type(mpc(0))):
        p = max(x.precision)
        tol = tolerance(p, 44) if imag_tol is None else imag_tol
        if abs(x.imag) > tol:
            raise RealnessError(
                f"imaginary part {float(x.imag):.3e} exceeds tolerance {float(tol):.3e}"
            )
        x = x.real
    if isinstance(x, type(mpfr(0))):
        if not gmpy2.is_finite(x):
            raise ValueError("cannot truncate a non-finite value")
        # x * 2**b is exact in binary floating point, so only the final rounding happens here
        k = int(gmpy2.round_away(gmpy2.mul_2exp(x, b)))
        return Dyadic(k, b)
    raise TypeError(f"unsupported value type {type(x).__name__}")


def ceil_log2(x: int) -> int:
    """Smallest ``e`` with ``2**e >= x`` for a positive integer ``x``."""
    if x < 1:
        raise ValueError("x must be positive")
    return (x - 1).bit_length()


def factorial_product(occupations) -> int:
    return math.prod(math.factorial(s) for s in occupations)
