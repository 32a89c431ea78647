"""Codimension-bound calculus for offset families.

Notation: c(r, j) is a lower bound for the codimension of the j-th exceptional
stratum of an r-offset family in n variables, and m(r, s) an upper bound for
the excess exponent of the 2s-th moment.  Three inequalities connect them:

  (1) c(r, j) >= max_s (j s - floor(m(r, s)))
  (2) m(r, s) <= max_j (j s - c(r, j))
  (3) m(r, s) <= n s - n r / 2 + max_j (j r / 2 - c'(2s, j))

where c' is a bound for the same problem with 2s offsets in place of r.
All m-values are exact Fractions; floors and ceilings are applied exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np


def _ceil_half(r: int) -> int:
    return (r + 1) // 2


@dataclass(frozen=True)
class ThetaParams:
    a: int
    b: int


def theta_params(n: int, r: int) -> ThetaParams:
    """floor((r-1)/2) = (n-1) a + b with 0 <= b < n-1."""
    if n < 2:
        raise ValueError("division data needs n >= 2")
    a, b = divmod((r - 1) // 2, n - 1)
    return ThetaParams(a, b)


def theta(n: int, r: int, j: int) -> int:
    """Closed-form codimension bound theta_j(n, r)."""
    if n < 1 or r < 1:
        raise ValueError(f"need n >= 1 and r >= 1, got n={n}, r={r}")
    if not 0 <= j <= n:
        raise ValueError(f"j={j} out of range 0..{n}")
    if j == 0:
        return 0
    if j == n:
        return _ceil_half(n * r)
    tp = theta_params(n, r)
    return j * tp.a + max(0, tp.b + j - (n - 1))


def theta_table(n: int, r: int) -> tuple[int, ...]:
    return tuple(theta(n, r, j) for j in range(n + 1))


def s_max(n: int, r: int) -> int:
    """Search horizon for every max over s."""
    return max(2 * n * r, n * _ceil_half(r) + 1)


def _get(m, s):
    return m(s) if callable(m) else m[s]


def c_lower_from_m(m: Mapping[int, Fraction] | Callable[[int], Fraction], j: int, S_max: int) -> int:
    """(1): max over 1 <= s <= S_max of j s - floor(m(s)), clamped at 0."""
    best = 0
    for s in range(1, S_max + 1):
        best = max(best, j * s - math.floor(_get(m, s)))
    return best


def m_upper_from_c(c: Mapping[int, int], s: int) -> Fraction:
    """(2): max over j of j s - c(j)."""
    return Fraction(max(j * s - cj for j, cj in c.items()))


def m_upper_from_cprime(cprime: Mapping[int, int], n: int, r: int, s: int) -> Fraction:
    """(3): n s - n r/2 + max_j (j r/2 - c'(2s, j))."""
    return n * s - Fraction(n * r, 2) + max(Fraction(j * r, 2) - cprime[j] for j in range(n + 1))


def initial_m_bound(n: int, r: int, s: int) -> Fraction:
    """m(r, s) <= 0 for s <= r/2n and n s - r/2 beyond."""
    if Fraction(s) <= Fraction(r, 2 * n):
        return Fraction(0)
    return n * s - Fraction(r, 2)


def closure(c: Mapping[int, int], n: int, S_max: int) -> dict[int, int]:
    """Apply (2) then (1): the c-table implied by c through the moment bound."""
    m = {s: m_upper_from_c(c, s) for s in range(1, S_max + 1)}
    return {j: c_lower_from_m(m, j, S_max) for j in range(n + 1)}


def theta_plus(prev: Callable[[int], int], n: int, r: int, S_max: int | None = None) -> int:
    """max over s of min{(n-1)s, ceil(r/2) - s + prev(2s), r - s}, clamped at 0 (s = 0)."""
    if S_max is None:
        S_max = r
    best = 0
    for s in range(1, S_max + 1):
        best = max(best, min((n - 1) * s, _ceil_half(r) - s + prev(2 * s), r - s))
    return best


# --- iterates of the theta-plus functional ---------------------------------------
#
# theta^{(i+1)}(r) needs theta^{(i)} at arguments up to 2r, so a naive memoized
# recursion touches arguments up to 2^i r.  Instead we compute tables on
# 0..cap for lower and upper bounds simultaneously: arguments beyond cap are
# replaced by the unconditional bounds 0 <= theta^{(i)}(R) <= floor((n-1)R/n)
# (the latter holds for i >= 1 since min{(n-1)s, R - s} <= (n-1)R/n).  The
# functional is monotone, so both tables are valid bounds; where they agree
# the value is exact.

@lru_cache(maxsize=64)
def _iterate_tables(n: int, i_max: int, cap: int) -> tuple[np.ndarray, np.ndarray]:
    R = np.arange(cap + 1, dtype=np.int64)
    S = np.arange(1, cap + 1, dtype=np.int64)
    L = np.zeros(cap + 1, dtype=np.int64)
    U = np.zeros(cap + 1, dtype=np.int64)
    Ls, Us = [L], [U]
    two_s = 2 * S
    inside = two_s <= cap
    clipped = np.minimum(two_s, cap)
    half = (R + 1) // 2
    first = (n - 1) * S[None, :]
    third = R[:, None] - S[None, :]
    allowed = S[None, :] <= np.maximum(R[:, None], 1)
    for i in range(i_max):
        trivial = ((n - 1) * two_s) // n if i > 0 else np.zeros_like(two_s)
        prevL = np.where(inside, L[clipped], 0)
        prevU = np.where(inside, U[clipped], trivial)
        candL = np.minimum(np.minimum(first, half[:, None] - S[None, :] + prevL[None, :]), third)
        candU = np.minimum(np.minimum(first, half[:, None] - S[None, :] + prevU[None, :]), third)
        L = np.maximum(np.where(allowed, candL, 0).max(axis=1), 0)
        U = np.maximum(np.where(allowed, candU, 0).max(axis=1), 0)
        L[0] = U[0] = 0
        Ls.append(L)
        Us.append(U)
    out_L, out_U = np.array(Ls), np.array(Us)
    out_L.setflags(write=False)
    out_U.setflags(write=False)
    return out_L, out_U


MAX_CAP = 1 << 14


def theta_iter_bounds(n: int, r: int, i: int, cap: int | None = None) -> tuple[int, int]:
    """(lower, upper) bounds for theta^{(i)}(r) from truncated tables."""
    if n < 2:
        raise ValueError("theta iteration needs n >= 2")
    if r < 1 or i < 0:
        raise ValueError(f"need r >= 1 and i >= 0, got r={r}, i={i}")
    cap = cap or max(4 * r, 64)
    L, U = _iterate_tables(n, i, cap)
    return int(L[i, r]), int(U[i, r])


def theta_iter(n: int, r: int, i: int) -> int:
    """The i-th iterate theta^{(i)}(r), starting from theta^{(0)} = 0."""
    cap = max(4 * r, 64)
    while True:
        lo, hi = theta_iter_bounds(n, r, i, cap)
        if lo == hi:
            return lo
        if cap >= MAX_CAP:
            raise ArithmeticError(f"theta^({i})({r}) for n={n} not resolved: bounds [{lo}, {hi}] at cap {cap}")
        cap *= 2


def theta_iterates(n: int, r: int, i_max: int) -> list[int]:
    """theta^{(0)}(r), ..., theta^{(i_max)}(r), resolved from one pair of tables."""
    if n < 2:
        raise ValueError("theta iteration needs n >= 2")
    cap = max(4 * r, 64)
    while True:
        L, U = _iterate_tables(n, i_max, cap)
        lo, hi = L[:, r], U[:, r]
        if (lo == hi).all():
            return [int(v) for v in lo]
        if cap >= MAX_CAP:
            raise ArithmeticError(f"iterates of theta at r={r}, n={n} not resolved at cap {cap}")
        cap *= 2


def theta_iter_lower_table(n: int, i: int, cap: int) -> np.ndarray:
    """Valid lower bounds for theta^{(i)}(R), R = 0..cap."""
    return _iterate_tables(n, i, cap)[0][i]


# --- the full bootstrap ------------------------------------------------------------

@dataclass
class BoundTable:
    n: int
    r: int
    c: dict[int, int]
    m: dict[int, Fraction]
    S_max: int
    trace: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "S_max": self.S_max,
                "c": [self.c[j] for j in range(self.n + 1)],
                "trace": self.trace}


@lru_cache(maxsize=None)
def _initial_c_cached(n: int, r: int) -> tuple[int, ...]:
    # Past the knee s = r/2n, j s - floor(n s - r/2) is nonincreasing in s for
    # every j <= n, so a horizon just beyond the knee loses nothing.
    S = r // (2 * n) + 2
    m = {s: initial_m_bound(n, r, s) for s in range(1, S + 1)}
    return tuple(c_lower_from_m(m, j, S) for j in range(n + 1))


def _initial_c(n: int, r: int) -> dict[int, int]:
    return dict(enumerate(_initial_c_cached(n, r)))


def bootstrap_fixed_point(n: int, r: int) -> BoundTable:
    """Run the bootstrap from the initial moment bound to its fixed point.

    1. initial m-bound -> c by (1); the same at shape 2s gives c'(2s, .).
    2. (3) with those c' then (1) gives c(r, n) = ceil(nr/2).
    3. iterate theta-plus for c(., n-1).
    4. one more (3) + (1) pass with c'(2s, n) = ns and c'(2s, n-1) from step 3.
    The result is compared with the closed form; a mismatch raises AssertionError.
    """
    if n < 2 or r < 1:
        raise ValueError(f"bootstrap needs n >= 2 and r >= 1, got n={n}, r={r}")
    S = s_max(n, r)

    # step 1
    c0 = _initial_c(n, r)
    cprime0 = {}
    for s in range(1, S + 1):
        cprime0[s] = _initial_c(n, 2 * s)

    # step 2
    m2 = {s: min(initial_m_bound(n, r, s), m_upper_from_cprime(cprime0[s], n, r, s)) for s in range(1, S + 1)}
    c2 = {j: max(c0[j], c_lower_from_m(m2, j, S)) for j in range(n + 1)}
    top = _ceil_half(n * r)
    assert c2[n] >= top, f"step 2 gave c(r,n)={c2[n]} < {top}"

    # step 3: theta iterates for c(., n-1); i = r+1 iterations, lower bounds only
    iters = r + 1
    cap = 2 * S  # lower-bound tables stay valid at any cap
    lower = theta_iter_lower_table(n, iters, cap)
    c_nm1 = int(lower[r])

    # step 4: c'(2s, n) = ceil(n*2s/2) = ns by step 2 applied at shape 2s,
    # c'(2s, n-1) from the iterates, trivial 0 for the rest.
    m4 = {}
    for s in range(1, S + 1):
        cp = {j: 0 for j in range(n + 1)}
        cp[n] = n * s
        cp[n - 1] = max(cp[n - 1], int(lower[2 * s]))
        m4[s] = min(m2[s], m_upper_from_cprime(cp, n, r, s))
    c4 = {j: c_lower_from_m(m4, j, S) for j in range(n + 1)}
    c = {j: max(c2[j], c4[j]) for j in range(n + 1)}
    c[n - 1] = max(c[n - 1], c_nm1)
    c[0] = 0

    expected = theta_table(n, r)
    got = tuple(c[j] for j in range(n + 1))
    assert got == expected, f"bootstrap for n={n}, r={r} gave {got}, closed form {expected}"
    trace = {"initial_c": [c0[j] for j in range(n + 1)],
             "after_top_pass": [c2[j] for j in range(n + 1)],
             "theta_iterate": {"i": iters, "value": c_nm1},
             "final_c": list(got)}
    return BoundTable(n, r, c, m4, S, trace)


def improved_m_bound(n: int, r: int, s: int) -> Fraction:
    """(3) fed with c'(2s, j) = s - 1 for 1 <= j <= n-1 and c'(2s, n) = ns."""
    cp = {0: 0, n: n * s}
    for j in range(1, n):
        cp[j] = s - 1
    return m_upper_from_cprime(cp, n, r, s)


def no_improvement_check(n: int, r: int) -> bool:
    """Feeding the best codimension inputs back through (3) then (1) gains nothing."""
    if n < 2:
        raise ValueError("no_improvement_check needs n >= 2")
    S = s_max(n, r)
    m = {s: improved_m_bound(n, r, s) for s in range(1, S + 1)}
    for s in range(1, S + 1):
        closed = max(Fraction(0), (n - 1) * s - Fraction(r, 2) + 1, n * s - Fraction(n * r, 2))
        if m[s] != closed:
            return False
    c = {j: c_lower_from_m(m, j, S) for j in range(n + 1)}
    return all(c[j] <= theta(n, r, j) for j in range(n)) and c[n] == theta(n, r, n)
