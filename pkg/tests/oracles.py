"""Brute-force reference implementations that share no code with the package.

Prime-field values use plain integers mod p; characters come from a primitive
root found by trial, and values are complex numbers.
"""

import cmath
import itertools
import math
from collections import Counter


def primitive_root(p):
    if p == 2:
        return 1
    order = p - 1
    fac = [q for q in range(2, order + 1) if order % q == 0 and all(q % r for r in range(2, int(q**0.5) + 1))]
    for g in range(2, p):
        if all(pow(g, order // f, p) != 1 for f in fac):
            return g
    raise ValueError(p)


def dlog_table(p):
    g = primitive_root(p)
    table = {}
    x = 1
    for t in range(p - 1):
        table[x] = t
        x = x * g % p
    return table


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def char_value(a, p, d, e=1, logs=None):
    """chi(a) = exp(2 pi i e log_g(a) / d), chi(0) = 0, g the smallest primitive root."""
    a %= p
    if a == 0:
        return 0
    logs = logs or dlog_table(p)
    return cmath.exp(2j * math.pi * e * logs[a] / d)


def poly_eval(coeffs, x, p):
    """Univariate, coefficients low -> high."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def offset_sum(p, d, polys, offsets, e_chars=None):
    """sum_m prod_i chi_i(F_i(m + x_i)) over F_p, n = 1, F_i polynomials."""
    logs = dlog_table(p)
    e_chars = e_chars or [1] * len(polys)
    tot = 0
    for m in range(p):
        val = 1
        for F, x, e in zip(polys, offsets, e_chars):
            val *= char_value(poly_eval(F, m + x, p), p, d, e, logs)
        tot += val
    return tot


def moment_bruteforce(p, d, polys, s, e_chars=None):
    """sum over all offset tuples of |S|^{2s}, as a float."""
    r = len(polys)
    return sum(abs(offset_sum(p, d, polys, xs, e_chars)) ** (2 * s)
               for xs in itertools.product(range(p), repeat=r))


# --- perfect-power census oracles for F = x ----------------------------------------------

def census_multiset(q, s):
    """Tuples whose negated-exponent half is a rearrangement of the positive half."""
    return sum(1 for t in itertools.product(range(q), repeat=2 * s)
               if Counter(t[:s]) == Counter(t[s:]))


def census_signed_roots(q, s, d=2):
    """prod (x + m_i) / prod (x + m_{s+i}) is a d-th power iff every root's signed
    multiplicity is divisible by d."""
    count = 0
    for t in itertools.product(range(q), repeat=2 * s):
        mult = Counter(t[:s])
        mult.subtract(Counter(t[s:]))
        if all(v % d == 0 for v in mult.values()):
            count += 1
    return count


# --- small prime-power field with polynomial-basis arithmetic -----------------------------

class PolyField:
    """F_p[t]/(f) with elements as digit tuples; f must be irreducible."""

    def __init__(self, p, modulus):
        self.p = p
        self.mod = list(modulus)  # low -> high, monic
        self.k = len(modulus) - 1
        self.q = p**self.k

    def enc(self, digits):
        return sum(int(c) * self.p**i for i, c in enumerate(digits))

    def dec(self, a):
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def add(self, a, b):
        return self.enc([(x + y) % self.p for x, y in zip(self.dec(a), self.dec(b))])

    def mul(self, a, b):
        x, y = self.dec(a), self.dec(b)
        prod = [0] * (2 * self.k - 1)
        for i, u in enumerate(x):
            for j, v in enumerate(y):
                prod[i + j] += u * v
        for t in range(len(prod) - 1, self.k - 1, -1):
            c = prod[t] % self.p
            prod[t] = 0
            for i in range(self.k):
                prod[t - self.k + i] -= c * self.mod[i]
        return self.enc([c % self.p for c in prod[:self.k]])
