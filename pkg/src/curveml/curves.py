"""Curve models over Q and exact point counts over F_p and F_{p^2}.

Two counting paths exist for each family:

* scalar reference functions (``count_points_elliptic``,
  ``count_points_genus2_reference``) that evaluate the quadratic character one
  element at a time, and
* numpy batch paths (``ap_matrix_elliptic``, ``count_points_genus2``) used to
  build feature vectors for thousands of curves.

The tests hold both against naive (x, y) enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Sequence

import numpy as np
from numba import njit

from curveml.ff_arith import Fp2Elem, chi_fp2, find_non_residue, is_prime, legendre_symbol, square_table

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class EllipticCurveQ:
    """Reduced minimal model y^2 + e1*x*y + e2*y = x^3 + e3*x^2 + e4*x + e5."""

    label: str
    e1: int
    e2: int
    e3: int
    e4: int
    e5: int
    conductor: int
    discriminant_abs: int | None = None

    def __post_init__(self):
        if self.e1 not in (0, 1):
            raise ValueError(f"{self.label}: e1 out of range (must be 0 or 1), got {self.e1}")
        if self.e2 not in (-1, 0, 1):
            raise ValueError(f"{self.label}: e2 out of range (must be -1, 0 or 1), got {self.e2}")
        # reduced models have a2 (the x^2 coefficient, e3 here) in {-1, 0, 1}
        if self.e3 not in (-1, 0, 1):
            raise ValueError(f"{self.label}: e3 out of range (must be -1, 0 or 1), got {self.e3}")
        if self.conductor < 1:
            raise ValueError(f"{self.label}: conductor must be positive")
        if self.discriminant_abs is not None and self.discriminant_abs < 1:
            raise ValueError(f"{self.label}: discriminant_abs must be positive")

    @property
    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.e1, self.e2, self.e3, self.e4, self.e5)

    def b_invariants(self) -> tuple[int, int, int, int]:
        # in a-invariant terms: a1=e1, a2=e3, a3=e2, a4=e4, a6=e5
        a1, a2, a3, a4, a6 = self.e1, self.e3, self.e2, self.e4, self.e5
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self) -> int:
        """Discriminant of this model (signed)."""
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def completed_cubic(self) -> tuple[int, int, int, int]:
        """Coefficients (c3, c2, c1, c0) of R(x) = 4x^3 + b2 x^2 + 2 b4 x + b6,
        the right-hand side after completing the square in y."""
        b2, b4, b6, _ = self.b_invariants()
        return 4, b2, 2 * b4, b6

    def is_good_prime(self, p: int) -> bool:
        disc = self.discriminant_abs if self.discriminant_abs is not None else abs(self.discriminant())
        return disc % p != 0


@dataclass(frozen=True)
class Genus2CurveQ:
    """Model y^2 + h(x)*y = f(x); coefficient lists are indexed by degree."""

    label: str
    f_coeffs: tuple[int, ...]
    h_coeffs: tuple[int, ...]
    conductor: int
    discriminant_abs: int

    def __post_init__(self):
        object.__setattr__(self, "f_coeffs", tuple(int(c) for c in self.f_coeffs))
        object.__setattr__(self, "h_coeffs", tuple(int(c) for c in self.h_coeffs))
        if len(self.f_coeffs) != 7:
            raise ValueError(f"{self.label}: f needs 7 coefficients, got {len(self.f_coeffs)}")
        if len(self.h_coeffs) != 4:
            raise ValueError(f"{self.label}: h needs 4 coefficients, got {len(self.h_coeffs)}")
        if self.conductor < 1 or self.discriminant_abs < 1:
            raise ValueError(f"{self.label}: conductor and discriminant_abs must be positive")

    def completed_sextic(self) -> tuple[int, ...]:
        """Coefficients (degree 0..6) of F = h^2 + 4f."""
        F = [4 * c for c in self.f_coeffs]
        for i, hi in enumerate(self.h_coeffs):
            for j, hj in enumerate(self.h_coeffs):
                F[i + j] += hi * hj
        return tuple(F)

    def is_good_prime(self, p: int) -> bool:
        return p != 2 and self.discriminant_abs % p != 0


@dataclass
class CurveLabels:
    """Invariants read from a dataset. Nothing here is ever computed."""

    rank: int
    torsion_order: int
    torsion_structure: list[int] = field(default_factory=list)
    num_integral_points: int | None = None
    num_rational_points: int | None = None
    sha_analytic_order: int | float | None = None
    sha_is_trivial: bool | None = None

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        if self.torsion_order < 1:
            raise ValueError("torsion_order must be positive")
        if self.torsion_structure:
            prod = 1
            for c in self.torsion_structure:
                prod *= c
            if prod != self.torsion_order:
                raise ValueError(
                    f"torsion_structure {self.torsion_structure} does not multiply to {self.torsion_order}"
                )
        if self.sha_analytic_order is not None and self.sha_analytic_order <= 0:
            raise ValueError("sha_analytic_order must be positive")


@dataclass
class CurveRecord:
    curve: EllipticCurveQ | Genus2CurveQ
    labels: CurveLabels

    def __post_init__(self):
        if isinstance(self.curve, EllipticCurveQ) and self.labels.torsion_order > 16:
            raise ValueError(f"{self.curve.label}: elliptic torsion order is at most 16")

    @property
    def label(self) -> str:
        return self.curve.label

    @property
    def family(self) -> str:
        return "elliptic" if isinstance(self.curve, EllipticCurveQ) else "genus2"


# --- elliptic curves --------------------------------------------------------


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def _count_elliptic_mod2(curve: EllipticCurveQ) -> int:
    e1, e2, e3, e4, e5 = (c % 2 for c in curve.coefficients)
    affine = 0
    for x in (0, 1):
        for y in (0, 1):
            if (y * y + e1 * x * y + e2 * y - x**3 - e3 * x * x - e4 * x - e5) % 2 == 0:
                affine += 1
    return affine + 1


def count_points_elliptic(curve: EllipticCurveQ, p: int) -> int:
    """#E(F_p) for the reduction of the model, including the point at infinity
    and, for singular reductions, the singular point."""
    _require_prime(p)
    if p == 2:
        return _count_elliptic_mod2(curve)
    c3, c2, c1, c0 = (c % p for c in curve.completed_cubic())
    affine = 0
    for x in range(p):
        affine += 1 + legendre_symbol((((c3 * x + c2) * x + c1) * x + c0) % p, p)
    return affine + 1


def ap_elliptic(curve: EllipticCurveQ, p: int) -> int:
    return p + 1 - count_points_elliptic(curve, p)


def _reduced_coeff_rows(rows: Sequence[Sequence[int]], p: int) -> np.ndarray:
    """Reduce rows of arbitrary-size integers mod p into an int64 array."""
    try:
        arr = np.asarray(rows, dtype=np.int64)
    except OverflowError:
        return np.array([[c % p for c in row] for row in rows], dtype=np.int64)
    return arr % p


def ap_matrix_elliptic(curves: Sequence[EllipticCurveQ], primes: Sequence[int], block: int = 256) -> np.ndarray:
    """Matrix of a_p values, shape (len(curves), len(primes)).

    Vectorised over x in F_p and over blocks of curves; agrees exactly with
    :func:`ap_elliptic`.
    """
    M = len(curves)
    out = np.empty((M, len(primes)), dtype=np.int64)
    if M == 0:
        return out
    cubics = [c.completed_cubic()[1:] for c in curves]
    fits = [all(abs(v) < _INT64_SAFE for v in row) for row in cubics]
    for j, p in enumerate(primes):
        _require_prime(p)
        if p == 2:
            out[:, j] = [3 - _count_elliptic_mod2(c) for c in curves]
            continue
        chi = square_table(p)
        x = np.arange(p, dtype=np.int64)
        for start in range(0, M, block):
            stop = min(start + block, M)
            rows = cubics[start:stop]
            if all(fits[start:stop]):
                coeffs = np.asarray(rows, dtype=np.int64) % p
            else:
                coeffs = _reduced_coeff_rows(rows, p)
            c2 = coeffs[:, 0:1]
            c1 = coeffs[:, 1:2]
            c0 = coeffs[:, 2:3]
            r = (4 * x + c2) % p
            r = (r * x + c1) % p
            r = (r * x + c0) % p
            # #E = p + 1 + sum chi, so a_p = -sum chi
            out[start:stop, j] = -chi[r].sum(axis=1, dtype=np.int64)
    return out


# --- genus 2 curves ---------------------------------------------------------


def _infinity_points(F: Sequence[int], p: int, degree: int) -> int:
    c6 = F[6] % p
    c5 = F[5] % p
    if c6:
        if degree == 2:
            return 2  # every element of F_p is a square in F_{p^2}
        return 2 if legendre_symbol(c6, p) == 1 else 0
    if c5:
        return 1
    raise ValueError(f"degenerate model at p={p}: degree-6 and degree-5 terms of h^2+4f vanish")


def _check_genus2_prime(curve: Genus2CurveQ, p: int, degree: int) -> None:
    if degree not in (1, 2):
        raise ValueError("extension_degree must be 1 or 2")
    if p == 2 or not is_prime(p):
        raise ValueError(f"genus-2 counting needs an odd prime, got {p}")
    if curve.discriminant_abs % p == 0:
        raise ValueError(f"{curve.label}: p={p} is a bad prime")


def count_points_genus2_reference(curve: Genus2CurveQ, p: int, extension_degree: int = 1) -> int:
    """Element-by-element character sum; slow, used as a cross-check."""
    _check_genus2_prime(curve, p, extension_degree)
    F = [c % p for c in curve.completed_sextic()]
    total = _infinity_points(F, p, extension_degree)
    if extension_degree == 1:
        for x in range(p):
            val = 0
            for c in reversed(F):
                val = (val * x + c) % p
            total += 1 + legendre_symbol(val, p)
        return total
    coeffs = [Fp2Elem.make(c, 0, p) for c in F]
    zero = Fp2Elem.make(0, 0, p)
    for a in range(p):
        for b in range(p):
            x = Fp2Elem.make(a, b, p)
            val = zero
            for c in reversed(coeffs):
                val = val * x + c
            total += 1 + chi_fp2(val)
    return total


def _sum_chi_fp(F: Sequence[int], p: int) -> int:
    x = np.arange(p, dtype=np.int64)
    val = np.zeros(p, dtype=np.int64)
    for c in reversed(F):
        val = (val * x + c) % p
    return int(square_table(p)[val].sum(dtype=np.int64))


@njit(cache=True)
def _sum_chi_fp2(F, p, n, chi):  # p < 2**12 keeps every intermediate inside int64
    # b = 0: F(x) lies in F_p, a nonzero square in F_{p^2}
    total = 0
    for a in range(p):
        val = 0
        for k in range(6, -1, -1):
            val = (val * a + F[k]) % p
        if val != 0:
            total += 1
    # b != 0: x and its conjugate give conjugate values of equal norm, so count b <= (p-1)/2 twice
    for b in range(1, (p - 1) // 2 + 1):
        for a in range(p):
            ua = 0
            ub = 0
            for k in range(6, -1, -1):
                ua, ub = ua * a + n * ub * b + F[k], ua * b + ub * a
                # each unreduced step grows the bound by ~p^2; reduce every other step
                if k % 2 == 0:
                    ua %= p
                    ub %= p
            norm = (ua * ua + n * (p - 1) * ((ub * ub) % p)) % p
            total += 2 * chi[norm]
    return total


def count_points_genus2(curve: Genus2CurveQ, p: int, extension_degree: int = 1) -> int:
    """#C(F_{p^k}) for k = extension_degree in {1, 2}, at a good odd prime."""
    _check_genus2_prime(curve, p, extension_degree)
    F = [c % p for c in curve.completed_sextic()]
    inf = _infinity_points(F, p, extension_degree)
    if extension_degree == 1:
        return p + _sum_chi_fp(F, p) + inf
    if p >= 1 << 12:
        raise ValueError(f"p={p} too large for the F_(p^2) kernel")
    chi = np.asarray(square_table(p), dtype=np.int64)
    return p * p + _sum_chi_fp2(np.asarray(F, dtype=np.int64), p, find_non_residue(p), chi) + inf


def euler_pair_genus2(curve: Genus2CurveQ, p: int) -> tuple[int, int]:
    """(a_{1,p}, a_{2,p}) of the L-polynomial 1 + a1 T + a2 T^2 + p a1 T^3 + p^2 T^4.

    Bad primes get the convention (0, p).
    """
    if p == 2:
        raise ValueError("p = 2 is never used for genus-2 curves")
    if curve.discriminant_abs % p == 0:
        return 0, p
    n1 = count_points_genus2(curve, p, 1)
    n2 = count_points_genus2(curve, p, 2)
    a1 = n1 - p - 1
    twice_a2 = n2 - p * p - 1 + a1 * a1
    if twice_a2 % 2:
        raise ArithmeticError(f"{curve.label}: non-integral a2 at p={p} (counts {n1}, {n2})")
    return a1, twice_a2 // 2


def hasse_bound_ok(ap: int, p: int) -> bool:
    """|a_p| <= 2 sqrt(p), checked in integers as a_p^2 <= 4p."""
    return ap * ap <= 4 * p


def weil_bounds_ok(a1: int, a2: int, p: int) -> bool:
    return abs(a1) <= isqrt(16 * p) and abs(a2) <= 6 * p


def genus2_model_discriminant(f_coeffs: Sequence[int], h_coeffs: Sequence[int]) -> int:
    """Discriminant of h^2 + 4f viewed as a binary sextic form.

    Its odd prime divisors are exactly the odd primes where the model is
    singular, which makes it a usable ``discriminant_abs`` for hand-built
    fixtures.
    """
    import sympy

    F = Genus2CurveQ("tmp", tuple(f_coeffs), tuple(h_coeffs), 1, 1).completed_sextic()
    x = sympy.Symbol("x")
    if F[6] != 0:
        return int(sympy.discriminant(sum(c * x**i for i, c in enumerate(F)), x))
    if F[5] != 0:
        return int(F[5] ** 2 * sympy.discriminant(sum(c * x**i for i, c in enumerate(F[:6])), x))
    return 0
