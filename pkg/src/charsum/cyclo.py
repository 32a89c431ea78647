"""Exact arithmetic in the cyclotomic integers Z[zeta_D].

An element is stored as its coefficient vector on the power basis
1, zeta, ..., zeta^(phi(D)-1), i.e. as a residue in Z[x]/(Phi_D(x)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # Coefficients low -> high; den is monic.
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(D: int) -> tuple[int, ...]:
    """Phi_D as integer coefficients, lowest degree first.

    Computed by dividing x^D - 1 by Phi_m for every proper divisor m of D.
    """
    if D < 1:
        raise ValueError("D must be positive")
    poly = [-1] + [0] * (D - 1) + [1]
    for m in range(1, D):
        if D % m == 0:
            poly = _poly_divexact(poly, list(cyclotomic_poly(m)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(D: int) -> tuple[tuple[int, ...], ...]:
    """Row t holds the reduction of x^t modulo Phi_D, for 0 <= t < D."""
    phi = cyclotomic_poly(D)
    deg = len(phi) - 1
    rows = []
    cur = [1] + [0] * (deg - 1) if deg else []
    for _ in range(D):
        rows.append(tuple(cur))
        # multiply by x and reduce
        top = cur[-1] if deg else 0
        nxt = [0] + cur[:-1] if deg else []
        for i in range(deg):
            nxt[i] -= top * phi[i]
        cur = nxt
    return tuple(rows)


def reduce_exponent_counts(D: int, counts: Sequence[int]) -> tuple[int, ...]:
    """Reduce sum_t counts[t] * x^t (any length) modulo Phi_D."""
    table = _power_table(D)
    deg = len(cyclotomic_poly(D)) - 1
    out = [0] * deg
    for t, c in enumerate(counts):
        if c:
            row = table[t % D]
            for i in range(deg):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(int(v) for v in out)


@dataclass(frozen=True)
class CycloInt:
    D: int
    coeffs: tuple[int, ...]

    @classmethod
    def from_counts(cls, D: int, counts: Iterable[int]) -> "CycloInt":
        """Element sum_t counts[t] * zeta_D^t."""
        return cls(D, reduce_exponent_counts(D, list(counts)))

    @classmethod
    def zeta_power(cls, D: int, t: int) -> "CycloInt":
        return cls(D, _power_table(D)[t % D])

    @classmethod
    def integer(cls, D: int, n: int) -> "CycloInt":
        deg = len(cyclotomic_poly(D)) - 1
        return cls(D, (int(n),) + (0,) * (deg - 1))

    @classmethod
    def zero(cls, D: int) -> "CycloInt":
        return cls.integer(D, 0)

    @classmethod
    def one(cls, D: int) -> "CycloInt":
        return cls.integer(D, 1)

    def _check(self, other: "CycloInt") -> None:
        if not isinstance(other, CycloInt):
            raise TypeError(f"expected CycloInt, got {type(other).__name__}")
        if other.D != self.D:
            raise ValueError(f"mismatched cyclotomic orders {self.D} and {other.D}")

    def __add__(self, other: "CycloInt") -> "CycloInt":
        self._check(other)
        return CycloInt(self.D, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CycloInt") -> "CycloInt":
        self._check(other)
        return CycloInt(self.D, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CycloInt":
        return CycloInt(self.D, tuple(-a for a in self.coeffs))

    def __mul__(self, other: "CycloInt | int") -> "CycloInt":
        if isinstance(other, int):
            return CycloInt(self.D, tuple(a * other for a in self.coeffs))
        self._check(other)
        n = len(self.coeffs)
        prod = [0] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycloInt(self.D, reduce_exponent_counts(self.D, prod))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CycloInt":
        if e < 0:
            raise ValueError("negative powers are not defined in Z[zeta]")
        result = CycloInt.one(self.D)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, u: int) -> "CycloInt":
        """Apply the automorphism zeta -> zeta^u (u coprime to D)."""
        if math.gcd(u, self.D) != 1:
            raise ValueError(f"{u} is not coprime to {self.D}")
        counts = [0] * self.D
        for t, c in enumerate(self.coeffs):
            counts[(t * u) % self.D] += c
        return CycloInt.from_counts(self.D, counts)

    def conj(self) -> "CycloInt":
        return self.galois(self.D - 1) if self.D > 1 else self

    def to_complex(self) -> complex:
        z = 0j
        for t, c in enumerate(self.coeffs):
            if c:
                z += c * cmath.exp(2j * math.pi * t / self.D)
        return z

    def __abs__(self) -> float:
        if self.is_rational_integer():
            return float(abs(self.coeffs[0]))
        return abs(self.to_complex())

    def is_rational_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def as_int(self) -> int:
        if not self.is_rational_integer():
            raise ValueError(f"{self} is not a rational integer")
        return self.coeffs[0]

    def norm_squared(self) -> "CycloInt":
        return self * self.conj()

    def to_json(self) -> dict:
        z = self.to_complex()
        return {"D": self.D, "coeffs": list(self.coeffs), "re": z.real, "im": z.imag}


def cyclo_add(a: CycloInt, b: CycloInt) -> CycloInt:
    return a + b


def cyclo_mul(a: CycloInt, b: CycloInt) -> CycloInt:
    return a * b


def cyclo_conj(a: CycloInt) -> CycloInt:
    return a.conj()


def cyclo_abs(a: CycloInt) -> float:
    return abs(a)
