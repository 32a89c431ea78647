"""Small finite fields F_{p^k} with log/antilog (Zech) tables, norms and characters.

Elements are plain ints 0..q-1: the element sum_i c_i * alpha^i (alpha a root
of the defining polynomial) is encoded as sum_i c_i * p^i.  For k = 1 this is
the usual representation of Z/pZ.  The integer encoding is also the fixed
element ordering used for generator choice and enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import budget
from .cyclo import CycloInt
from .errors import FieldError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# --- dense polynomials over F_p (lists, lowest degree first) -----------------

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _ptrim([x % p for x in a])
    inv = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _ptrim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _pmod(prod, m, p)


def _ppowmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ptrim([x % p for x in a]), _ptrim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(f: list[int], p: int) -> bool:
    # Rabin's test; f monic of degree k.
    k = len(f) - 1
    x = [0, 1]
    if _ppowmod(x, p**k, f, p) != _pmod(x, f, p):
        return False
    for ell in prime_factors(k):
        h = _ppowmod(x, p ** (k // ell), f, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(f, diff, p)
        if len(g) > 1:
            return False
    return True


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        f = low + [1]
        if k > 1 and low[0] == 0:
            continue
        if _is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")


# --- the field context -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldCtx:
    p: int
    k: int
    q: int
    g: int
    modulus_poly: tuple[int, ...]
    log_table: np.ndarray = field(repr=False)
    antilog_table: np.ndarray = field(repr=False)
    digits: np.ndarray = field(repr=False)
    zech: np.ndarray = field(repr=False)

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, k={self.k}, g={self.g})"

    def __reduce__(self):
        return (make_field, (self.p, self.k))

    # scalar arithmetic
    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = int(self.log_table[a]), int(self.log_table[b])
        z = int(self.zech[(lb - la) % (self.q - 1)])
        if z < 0:
            return 0
        return int(self.antilog_table[(la + z) % (self.q - 1)])

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        return int(self.antilog_table[(int(self.log_table[a]) + (self.q - 1) // 2) % (self.q - 1)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.antilog_table[(int(self.log_table[a]) + int(self.log_table[b])) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return int(self.antilog_table[(-int(self.log_table[a])) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 1 if e == 0 else 0
        return int(self.antilog_table[(int(self.log_table[a]) * e) % (self.q - 1)])

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    # vectorized arithmetic on int64 arrays of encodings
    def encode_digits(self, d: np.ndarray) -> np.ndarray:
        w = self.p ** np.arange(self.k, dtype=np.int64)
        return (d % self.p) @ w

    def vadd(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a + b) % self.p
        return self.encode_digits(self.digits[a] + self.digits[b])

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return (-a) % self.p
        return self.encode_digits(-self.digits[a])

    def vmul(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        la, lb = self.log_table[a], self.log_table[b]
        out = self.antilog_table[(la + lb) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        out = self.antilog_table[(self.log_table[a] * e) % (self.q - 1)]
        return np.where(a == 0, 0, out)


def _vmul_by_scalar_digits(A: np.ndarray, c: Sequence[int], modulus: Sequence[int], p: int) -> np.ndarray:
    """Multiply each row of A (digit vectors) by the field element with digits c."""
    n, k = A.shape
    prod = np.zeros((n, 2 * k - 1), dtype=np.int64)
    for i, ci in enumerate(c):
        if ci:
            prod[:, i:i + k] += ci * A
    prod %= p
    for t in range(2 * k - 2, k - 1, -1):
        top = prod[:, t].copy()
        prod[:, t] = 0
        for i in range(k):
            if modulus[i]:
                prod[:, t - k + i] -= top * modulus[i]
        prod %= p
    return prod[:, :k]


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1, max_size: int = budget.FIELD_BUDGET) -> FieldCtx:
    """Build F_{p^k} with tables. The generator is the smallest element of full order."""
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if k < 1:
        raise FieldError(f"extension degree k={k} must be >= 1")
    q = p**k
    if q > max_size:
        raise FieldError(f"field size {p}^{k}={q} exceeds table budget {max_size}")
    if k == 1:
        modulus = (0, 1)
    else:
        modulus = _smallest_irreducible(p, k)
    mod_list = list(modulus)

    def to_digits(a: int) -> list[int]:
        return [(a // p**i) % p for i in range(k)]

    order = q - 1
    g = None
    for cand in range(1, q):
        if k > 1 and cand < p and order > p - 1:
            continue  # prime-subfield elements cannot have full order
        c = _ptrim(to_digits(cand))
        if all(_ppowmod(c, order // ell, mod_list, p) != [1] for ell in prime_factors(order)) \
                and _ppowmod(c, order, mod_list, p) == [1]:
            g = cand
            break
    if g is None:
        raise FieldError(f"no generator found for F_{p}^{k}; is {p} really prime?")

    # antilog by doubling: block [2^j, 2^{j+1}) = block [0, 2^j) * g^{2^j}
    antilog_digits = np.zeros((order, k), dtype=np.int64)
    antilog_digits[0, 0] = 1
    filled = 1
    step = to_digits(g)
    while filled < order:
        take = min(filled, order - filled)
        antilog_digits[filled:filled + take] = _vmul_by_scalar_digits(
            antilog_digits[:take], step, modulus, p)
        filled += take
        step = [int(v) for v in _vmul_by_scalar_digits(np.array([step]), step, modulus, p)[0]]
    weights = p ** np.arange(k, dtype=np.int64)
    antilog = antilog_digits @ weights
    log = np.full(q, -1, dtype=np.int64)
    log[antilog] = np.arange(order, dtype=np.int64)
    if np.count_nonzero(log[1:] >= 0) != order or log[0] != -1:
        raise FieldError(f"generator {g} of F_{p}^{k} failed the order check")
    digits = np.array([to_digits(a) for a in range(q)], dtype=np.int64).reshape(q, k)

    # Zech logarithms: zech[t] = log(1 + g^t), -1 when 1 + g^t = 0
    one_plus = (digits[antilog] + digits[1]) % p @ weights
    zech = log[one_plus]

    for arr in (log, antilog, digits, zech):
        arr.setflags(write=False)
    return FieldCtx(p=p, k=k, q=q, g=g, modulus_poly=modulus, log_table=log,
                    antilog_table=antilog, digits=digits, zech=zech)


def extension(ctx: FieldCtx, e: int) -> FieldCtx:
    """The degree-e extension F_{q^e} of ctx, as its own table field."""
    return make_field(ctx.p, ctx.k * e)


@lru_cache(maxsize=None)
def _embedding(small: FieldCtx, big: FieldCtx) -> np.ndarray:
    if big.p != small.p or big.k % small.k:
        raise FieldError(f"F_{small.p}^{small.k} does not embed in F_{big.p}^{big.k}")
    if small is big:
        out = np.arange(small.q, dtype=np.int64)
    else:
        # image of alpha = the smallest root of small's defining polynomial in big
        elems = np.arange(big.q, dtype=np.int64)
        acc = np.zeros(big.q, dtype=np.int64)
        for c in reversed(small.modulus_poly):
            acc = big.vadd(big.vmul(acc, elems), np.full(big.q, c % big.p))
        roots = np.flatnonzero(acc == 0)
        beta = int(roots[0]) if small.k > 1 else 1
        powers = [1]
        for _ in range(1, small.k):
            powers.append(big.mul(powers[-1], beta))
        out = np.zeros(small.q, dtype=np.int64)
        for i in range(small.k):
            coeff = small.digits[:, i]
            term = big.vmul(coeff, np.full(small.q, powers[i]))
            out = big.vadd(out, term)
    out.setflags(write=False)
    return out


def embedding(small: FieldCtx, big: FieldCtx) -> np.ndarray:
    """Array mapping each element of `small` to its image in `big` (a ring map)."""
    return _embedding(small, big)


def norm_to_subfield(ctx: FieldCtx, a: int, m: int) -> int:
    """Norm from F_{p^k} down to F_{p^m}, returned inside ctx (it lies in the subfield)."""
    if m < 1 or ctx.k % m:
        raise FieldError(f"subfield degree {m} does not divide {ctx.k}")
    if a == 0:
        return 0
    return ctx.pow(a, (ctx.q - 1) // (ctx.p**m - 1))


def in_subfield(ctx: FieldCtx, a: int, m: int) -> bool:
    return ctx.pow(a, ctx.p**m) == a


@dataclass(frozen=True)
class Character:
    """chi = chi_d^e with chi_d(g^t) = zeta_d^t, valued in Z[zeta_D]."""

    ctx: FieldCtx
    d: int
    e: int
    D: int

    @property
    def order(self) -> int:
        return self.d // math.gcd(self.d, self.e)

    def exponent(self, a: int) -> int | None:
        """t with chi(a) = zeta_D^t, or None for a = 0."""
        if a == 0:
            return None
        return (self.D // self.d) * self.e * int(self.ctx.log_table[a]) % self.D

    def __call__(self, a: int) -> CycloInt:
        t = self.exponent(a)
        if t is None:
            return CycloInt.zero(self.D)
        return CycloInt.zeta_power(self.D, t)

    def inverse(self) -> "Character":
        return Character(self.ctx, self.d, (-self.e) % self.d, self.D)

    def exponents_from_logs(self, logs: np.ndarray) -> np.ndarray:
        """Vectorized exponent from discrete logs of ctx (log -1 marks zero -> -1)."""
        t = ((self.D // self.d) * self.e * logs) % self.D
        return np.where(logs < 0, -1, t)


def make_character(ctx: FieldCtx, d: int, e: int = 1, D: int | None = None) -> Character:
    if d < 1 or (ctx.q - 1) % d:
        raise FieldError(f"no character of order {d} on F_{ctx.q}: {d} does not divide {ctx.q - 1}")
    if D is None:
        D = math.lcm(d, 2)
    if D % d:
        raise FieldError(f"character order {d} does not divide ambient order {D}")
    return Character(ctx, d, e % d, D)
