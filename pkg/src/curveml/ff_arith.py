"""Modular arithmetic over F_p and F_{p^2} and the quadratic characters used
for point counting.

Everything here works on plain Python ints; the vectorised counting paths in
:mod:`curveml.curves` use :func:`square_table` instead of per-element calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def mod_pow(base: int, exp: int, m: int) -> int:
    """Square-and-multiply ``base**exp % m``."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    result = 1 % m
    b = base % m
    e = exp
    while e:
        if e & 1:
            result = (result * b) % m
        b = (b * b) % m
        e >>= 1
    return result


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise ValueError(f"expected an odd prime, got {p}")


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) in {-1, 0, 1} via Euler's criterion."""
    _check_odd_prime(p)
    r = mod_pow(a, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


@lru_cache(maxsize=None)
def find_non_residue(p: int) -> int:
    """Smallest quadratic non-residue mod the odd prime ``p``."""
    _check_odd_prime(p)
    n = 2
    while legendre_symbol(n, p) != -1:
        n += 1
    return n


@lru_cache(maxsize=64)
def square_table(p: int) -> np.ndarray:
    """Array ``chi`` of length p with ``chi[a]`` = (a/p), built by squaring.

    Read-only; shared between callers.
    """
    chi = np.full(p, -1, dtype=np.int8)
    ys = np.arange(1, p, dtype=np.int64)
    chi[(ys * ys) % p] = 1
    chi[0] = 0
    chi.setflags(write=False)
    return chi


@dataclass(frozen=True)
class Fp2Elem:
    """Element a + b*t of F_p[t]/(t^2 - n), with n a fixed non-residue."""

    a: int
    b: int
    p: int
    n: int

    def __post_init__(self):
        if not (0 <= self.a < self.p and 0 <= self.b < self.p):
            raise ValueError("coordinates must be reduced mod p")

    @classmethod
    def make(cls, a: int, b: int, p: int) -> "Fp2Elem":
        return cls(a % p, b % p, p, find_non_residue(p))

    def _same_field(self, other: "Fp2Elem") -> None:
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError("elements live in different fields")

    def __add__(self, other: "Fp2Elem") -> "Fp2Elem":
        self._same_field(other)
        return Fp2Elem((self.a + other.a) % self.p, (self.b + other.b) % self.p, self.p, self.n)

    def __mul__(self, other: "Fp2Elem") -> "Fp2Elem":
        self._same_field(other)
        p = self.p
        a = (self.a * other.a + self.n * self.b * other.b) % p
        b = (self.a * other.b + self.b * other.a) % p
        return Fp2Elem(a, b, p, self.n)

    def __pow__(self, e: int) -> "Fp2Elem":
        result = Fp2Elem(1 % self.p, 0, self.p, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def norm(self) -> int:
        return (self.a * self.a - self.n * self.b * self.b) % self.p


def chi_fp2(u: Fp2Elem) -> int:
    """Quadratic character of F_{p^2}, computed as the Legendre symbol of the norm."""
    if u.is_zero():
        return 0
    return legendre_symbol(u.norm(), u.p)
