"""Exact evaluation of offset families of multiplicative character sums.

Every sum is a sum of roots of unity zeta_D^t, so it is evaluated by counting
exponents t and reducing the count vector in Z[zeta_D].  Character values of
chi_i(Norm(F_i(y))) are precomputed once per extension as an exponent array
over all points y of K^n (K = F_{q^e}), with -1 marking zeros and poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import budget
from .cyclo import CycloInt
from .errors import ConfigError
from .ffield import Character, FieldCtx, embedding, extension
from .rfunc import FactoredRational, is_dth_power_free, stabilizer


@dataclass(frozen=True)
class SumValue:
    value: CycloInt
    abs: float

    @classmethod
    def of(cls, z: CycloInt) -> "SumValue":
        return cls(z, abs(z))


@dataclass(frozen=True, eq=False)
class SumFamily:
    ctx: FieldCtx
    n: int
    characters: tuple[Character, ...]
    rationals: tuple[FactoredRational, ...]
    D: int
    D_max: int | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def r(self) -> int:
        return len(self.rationals)


def make_family(ctx: FieldCtx, n: int, characters: Sequence[Character], rationals: Sequence[FactoredRational],
                D_max: int | None = None, stabilizer_degrees: Sequence[int] = (), D: int | None = None) -> SumFamily:
    """Validate and build a family. Raises ConfigError on any violated hypothesis."""
    if len(characters) != len(rationals):
        raise ConfigError(f"{len(characters)} characters but {len(rationals)} rational functions")
    Ds = {chi.D for chi in characters}
    if len(Ds) > 1:
        raise ConfigError(f"characters do not share an ambient order: {sorted(Ds)}")
    if D is None:
        D = Ds.pop() if Ds else 2
    elif Ds and Ds != {D}:
        raise ConfigError(f"characters have ambient order {Ds.pop()}, family asks for {D}")
    for i, (chi, F) in enumerate(zip(characters, rationals)):
        if chi.ctx is not ctx or F.ctx is not ctx:
            raise ConfigError(f"entry {i}: character or rational function is over a different field")
        if F.n != n:
            raise ConfigError(f"entry {i}: rational function has {F.n} variables, family has {n}")
        if D_max is not None and F.degree > D_max:
            raise ConfigError(f"entry {i}: degree {F.degree} exceeds D_max={D_max}")
        # the trivial character (d = 1) is accepted as a control; power-freeness is vacuous there
        if chi.d > 1 and not is_dth_power_free(F, chi.d):
            raise ConfigError(f"entry {i}: F is not {chi.d}-th-power-free")
        for e in stabilizer_degrees:
            st = stabilizer(F, e)
            if len(st) > 1:
                raise ConfigError(f"entry {i}: F is invariant under {len(st) - 1} nonzero translations over F_{ctx.q}^{e}")
    return SumFamily(ctx, n, tuple(characters), tuple(rationals), D, D_max)


# --- point enumeration ---------------------------------------------------------

def points(K: FieldCtx, n: int) -> np.ndarray:
    """All of K^n as an (Q^n, n) array, row-major in the element ordering."""
    Q = K.q
    idx = np.arange(Q**n, dtype=np.int64)
    cols = [(idx // Q ** (n - 1 - i)) % Q for i in range(n)]
    return np.stack(cols, axis=1) if n else np.zeros((1, 0), dtype=np.int64)


def point_index(K: FieldCtx, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.int64)
    n = pts.shape[-1]
    w = K.q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return pts @ w


def shifted_index(K: FieldCtx, n: int, m: Sequence[int]) -> np.ndarray:
    """For every point y (by index), the index of y + m."""
    P = points(K, n)
    shifted = np.stack([K.vadd(P[:, i], np.full(P.shape[0], m[i])) for i in range(n)], axis=1) if n else P
    return point_index(K, shifted)


def norm_log_table(base: FieldCtx, K: FieldCtx) -> np.ndarray:
    """log_base(Norm_{K/base}(a)) for every a in K (-1 at 0).

    With G the generator of K and u defined by embed(g) = G^{u (Q-1)/(q-1)},
    Norm(G^t) = G^{t (Q-1)/(q-1)} = embed(g)^{t / u}, so the answer is t * u^{-1} mod (q-1).
    """
    q, Q = base.q, K.q
    if K is base:
        return np.asarray(base.log_table)
    step = (Q - 1) // (q - 1)
    lg = int(K.log_table[int(embedding(base, K)[base.g])])
    u = lg // step
    uinv = pow(u, -1, q - 1) if q > 2 else 0
    logs = np.asarray(K.log_table)
    return np.where(logs < 0, -1, (logs * uinv) % (q - 1) if q > 2 else 0)


def char_exponents(fam: SumFamily, i: int, e: int) -> np.ndarray:
    """t with chi_i(Norm(F_i(y))) = zeta_D^t for every y in K^n; -1 at zeros/poles."""
    key = ("v", i, e)
    if key not in fam._cache:
        K = extension(fam.ctx, e)
        P = points(K, fam.n)
        logsK = fam.rationals[i].map_to(K).vlog(P)
        nl = norm_log_table(fam.ctx, K)
        logs = np.where(logsK < 0, -1, nl[K.antilog_table[np.maximum(logsK, 0)]])
        arr = fam.characters[i].exponents_from_logs(logs)
        arr.setflags(write=False)
        fam._cache[key] = arr
    return fam._cache[key]


def offset_matrix(fam: SumFamily, i: int, e: int) -> np.ndarray:
    """A[m, x] = exponent of chi_i(Norm(F_i(m + x))), both indexed over K^n."""
    key = ("A", i, e)
    if key not in fam._cache:
        K = extension(fam.ctx, e)
        v = char_exponents(fam, i, e)
        P = points(K, fam.n)
        N = P.shape[0]
        # sum table of K^n: index(m + x) for all pairs
        cols = [K.vadd(P[:, None, c], P[None, :, c]) for c in range(fam.n)]
        w = K.q ** np.arange(fam.n - 1, -1, -1, dtype=np.int64)
        idx = sum(col * wc for col, wc in zip(cols, w)) if fam.n else np.zeros((N, N), dtype=np.int64)
        A = v[idx]
        A.setflags(write=False)
        fam._cache[key] = A
    return fam._cache[key]


# --- exponent counting -----------------------------------------------------------

def count_rows(E: np.ndarray, valid: np.ndarray, D: int) -> np.ndarray:
    """Per row of E (exponents), the histogram of valid entries over Z/D."""
    rows = E.shape[0]
    flat = (np.arange(rows, dtype=np.int64)[:, None] * D + (E % D)).ravel()
    out = np.bincount(flat, weights=valid.ravel().astype(np.int64), minlength=rows * D)
    return out.reshape(rows, D).astype(np.int64)


def twisted_sum(vs: Sequence[np.ndarray], shifts: Sequence[np.ndarray], us: Sequence[int], D: int) -> CycloInt:
    """sum_y prod_j sigma_{u_j}(zeta_D^{vs[j][shifts[j][y]]}), zero where any value is -1."""
    for u in us:
        if math.gcd(u, D) != 1:
            raise ValueError(f"automorphism index {u} is not coprime to D={D}")
    if not vs:
        raise ValueError("need at least one factor")
    E = np.zeros(len(shifts[0]), dtype=np.int64)
    valid = np.ones(len(shifts[0]), dtype=bool)
    for v, sh, u in zip(vs, shifts, us):
        t = v[sh]
        valid &= t >= 0
        E = E + u * t
    return CycloInt.from_counts(D, np.bincount(E[valid] % D, minlength=D))


def _check_offsets(K: FieldCtx, n: int, offsets) -> None:
    for m in offsets:
        if len(m) != n:
            raise ValueError(f"offset {tuple(m)} has {len(m)} coordinates, expected {n}")
        if any(not 0 <= int(c) < K.q for c in m):
            raise ValueError(f"offset {tuple(m)} is not a vector over F_{K.q}")


def sum_S(fam: SumFamily, e: int, offsets: Sequence[Sequence[int]], budget_limit: int | None = None) -> SumValue:
    """S_k(x) = sum_{m in k^n} prod_i chi_i(Norm(F_i(m + x_i))), k = F_{q^e}."""
    K = extension(fam.ctx, e)
    if len(offsets) != fam.r:
        raise ValueError(f"need {fam.r} offsets, got {len(offsets)}")
    _check_offsets(K, fam.n, offsets)
    budget.check(f"sum_S over F_{K.q}^{fam.n}", K.q**fam.n * max(fam.r, 1), budget_limit)
    if fam.r == 0:
        return SumValue.of(CycloInt.integer(fam.D, K.q**fam.n))
    vs = [char_exponents(fam, i, e) for i in range(fam.r)]
    shifts = [shifted_index(K, fam.n, x) for x in offsets]
    return SumValue.of(twisted_sum(vs, shifts, [1] * fam.r, fam.D))


def sum_general(fam: SumFamily, i: int, e: int, offsets: Sequence[tuple[Sequence[int], int]],
                budget_limit: int | None = None) -> SumValue:
    """sum_{x in k^n} prod_j sigma_{u_j}(chi_i(Norm(F_i(m_j + x)))), sigma_u: zeta -> zeta^u."""
    K = extension(fam.ctx, e)
    _check_offsets(K, fam.n, [m for m, _ in offsets])
    budget.check(f"twisted sum over F_{K.q}^{fam.n}", K.q**fam.n * max(len(offsets), 1), budget_limit)
    for _, u in offsets:
        if math.gcd(u, fam.D) != 1:
            raise ValueError(f"automorphism index {u} is not coprime to D={fam.D}")
    if not offsets:
        return SumValue.of(CycloInt.integer(fam.D, K.q**fam.n))
    v = char_exponents(fam, i, e)
    shifts = [shifted_index(K, fam.n, m) for m, _ in offsets]
    return SumValue.of(twisted_sum([v] * len(offsets), shifts, [u for _, u in offsets], fam.D))


def sum_T(fam: SumFamily, i: int, e: int, offsets: Sequence[Sequence[int]], s: int,
          budget_limit: int | None = None) -> SumValue:
    """T_i(m_1..m_2s): s plain factors followed by s conjugated (inverse-character) factors."""
    if len(offsets) != 2 * s:
        raise ValueError(f"need 2s = {2 * s} offsets, got {len(offsets)}")
    us = [1] * s + [fam.D - 1] * s
    return sum_general(fam, i, e, list(zip(offsets, us)), budget_limit)


CHUNK = 1 << 20  # exponent-array entries processed at once


def iter_S_counts(fam: SumFamily, e: int, index_sets: Sequence[np.ndarray] | None = None,
                  chunk: int = CHUNK):
    """Yield (X, C) over offset tuples: X holds point indices (rows, r), C the exponent
    histograms (rows, D) of S at those tuples.  index_sets restricts copy i to a subset
    of K^n (all points by default); tuples run row-major over the subsets.
    """
    K = extension(fam.ctx, e)
    Qn = K.q**fam.n
    As = [offset_matrix(fam, i, e) for i in range(fam.r)]
    if index_sets is None:
        index_sets = [np.arange(Qn, dtype=np.int64)] * fam.r
    sizes = [len(ix) for ix in index_sets]
    total = math.prod(sizes)
    rows_per_chunk = max(1, chunk // max(Qn, 1))
    for start in range(0, total, rows_per_chunk):
        flat = np.arange(start, min(total, start + rows_per_chunk), dtype=np.int64)
        X = np.empty((len(flat), fam.r), dtype=np.int64)
        for k in range(fam.r):
            stride = math.prod(sizes[k + 1:])
            X[:, k] = np.asarray(index_sets[k], dtype=np.int64)[(flat // stride) % sizes[k]]
        E = np.zeros((len(flat), Qn), dtype=np.int64)
        valid = np.ones((len(flat), Qn), dtype=bool)
        for i, A in enumerate(As):
            t = A[:, X[:, i]].T
            valid &= t >= 0
            E += t
        yield X, count_rows(E, valid, fam.D)
