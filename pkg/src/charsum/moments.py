"""Moments of |S| computed directly and through the offset transformation.

The engine is the general identity for a commutative ring R, finite sets M, X_i,
functions f_i: M x X_i -> R and ring automorphisms sigma_1..sigma_s:

    sum_{x in prod X_i} prod_j sigma_j( sum_{m in M} prod_i f_i(m, x_i) )
        = sum_{m_1..m_s in M} prod_i sum_{x in X_i} prod_j sigma_j(f_i(m_j, x)).

Here R = Z[zeta_D], f_i(m, x) = zeta_D^{A_i[m, x]} (or 0 where A_i = -1) and
sigma_j: zeta -> zeta^{u_j}.  The moment identity is u = (1,..,1, D-1,..,D-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import budget
from .cyclo import CycloInt
from .ffield import extension
from .sums import SumFamily, count_rows, iter_S_counts, offset_matrix

CHUNK = 1 << 20  # exponent-array entries processed at once


def _product_of_twists(counts: np.ndarray, us: Sequence[int], D: int) -> CycloInt:
    z = CycloInt.from_counts(D, counts)
    out = CycloInt.one(D)
    for u in us:
        out = out * z.galois(u)
    return out


def _tuples(sizes: Sequence[int], chunk_rows: int):
    """Yield index arrays (rows, len(sizes)) enumerating prod range(size) row-major."""
    total = math.prod(sizes)
    for start in range(0, total, chunk_rows):
        idx = np.arange(start, min(total, start + chunk_rows), dtype=np.int64)
        cols = []
        for k, size in enumerate(sizes):
            stride = math.prod(sizes[k + 1:])
            cols.append((idx // stride) % size)
        yield np.stack(cols, axis=1) if sizes else np.zeros((len(idx), 0), dtype=np.int64)


def lemma_lhs(As: Sequence[np.ndarray], us: Sequence[int], D: int) -> CycloInt:
    """sum over x in prod X_i of prod_j sigma_j(sum_m prod_i f_i(m, x_i))."""
    M = As[0].shape[0] if As else 1
    sizes = [A.shape[1] for A in As]
    rows_per_chunk = max(1, CHUNK // max(M, 1))
    total = CycloInt.zero(D)
    memo: dict = {}
    for X in _tuples(sizes, rows_per_chunk):
        E = np.zeros((X.shape[0], M), dtype=np.int64)
        valid = np.ones((X.shape[0], M), dtype=bool)
        for i, A in enumerate(As):
            t = A[:, X[:, i]].T  # (rows, M)
            valid &= t >= 0
            E += t
        C = count_rows(E, valid, D)
        uniq, mult = np.unique(C, axis=0, return_counts=True)
        for row, k in zip(uniq, mult):
            key = tuple(int(v) for v in row)
            if key not in memo:
                memo[key] = _product_of_twists(row, us, D)
            total = total + memo[key] * int(k)
    return total


def lemma_rhs(As: Sequence[np.ndarray], us: Sequence[int], D: int, M: int | None = None) -> CycloInt:
    """sum over (m_1..m_s) in M^s of prod_i sum_x prod_j sigma_j(f_i(m_j, x))."""
    s = len(us)
    if M is None:
        M = As[0].shape[0]
    per_row = max(1, sum(A.shape[1] for A in As))
    total = CycloInt.zero(D)
    memo: dict = {}
    for Mt in _tuples([M] * s, max(1, CHUNK // per_row)):
        rows = Mt.shape[0]
        blocks = []
        for A in As:
            E = np.zeros((rows, A.shape[1]), dtype=np.int64)
            valid = np.ones((rows, A.shape[1]), dtype=bool)
            for j, u in enumerate(us):
                t = A[Mt[:, j], :]
                valid &= t >= 0
                E += u * t
            blocks.append(count_rows(E, valid, D))
        if not blocks:
            total = total + CycloInt.integer(D, rows)
            continue
        C = np.concatenate(blocks, axis=1)
        uniq, mult = np.unique(C, axis=0, return_counts=True)
        for row, k in zip(uniq, mult):
            key = tuple(int(v) for v in row)
            if key not in memo:
                prod = CycloInt.one(D)
                for b in range(len(As)):
                    prod = prod * CycloInt.from_counts(D, row[b * D:(b + 1) * D])
                memo[key] = prod
            total = total + memo[key] * int(k)
    return total


def _check_us(us: Sequence[int], D: int) -> None:
    for u in us:
        if math.gcd(u, D) != 1:
            raise ValueError(f"automorphism index {u} is not coprime to D={D}")


def identity_sides(fam: SumFamily, e: int, us: Sequence[int], budget_limit: int | None = None) -> tuple[CycloInt, CycloInt]:
    """Both sides of the general identity for the family over F_{q^e}."""
    _check_us(us, fam.D)
    K = extension(fam.ctx, e)
    Qn = K.q**fam.n
    budget.check("identity (both sides)", Qn ** (max(fam.r, len(us)) + 1), budget_limit)
    As = [offset_matrix(fam, i, e) for i in range(fam.r)]
    if fam.r == 0:
        lhs = CycloInt.integer(fam.D, Qn) ** len(us)
        return lhs, CycloInt.integer(fam.D, Qn ** len(us))
    return lemma_lhs(As, us, fam.D), lemma_rhs(As, us, fam.D)


def moment_direct(fam: SumFamily, s: int, e: int = 1, budget_limit: int | None = None) -> CycloInt:
    """M_k(r, s) = sum over all offset tuples of |S_k|^{2s}, with |S|^2 = S * conj(S) exactly."""
    if s < 1:
        raise ValueError("s must be >= 1")
    K = extension(fam.ctx, e)
    Qn = K.q**fam.n
    budget.check(f"moment_direct over (F_{K.q}^{fam.n})^{fam.r + 1}", Qn ** (fam.r + 1), budget_limit)
    D = fam.D
    if fam.r == 0:
        return CycloInt.integer(D, Qn ** (2 * s))
    total = CycloInt.zero(D)
    memo: dict = {}
    for _, C in iter_S_counts(fam, e):
        uniq, mult = np.unique(C, axis=0, return_counts=True)
        for row, k in zip(uniq, mult):
            key = tuple(int(v) for v in row)
            if key not in memo:
                S = CycloInt.from_counts(D, row)
                memo[key] = S.norm_squared() ** s
            total = total + memo[key] * int(k)
    return total


def moment_via_transform(fam: SumFamily, s: int, e: int = 1, budget_limit: int | None = None) -> CycloInt:
    """sum over (m_1..m_2s) of prod_i T_{i;k}(m_1..m_2s)."""
    if s < 1:
        raise ValueError("s must be >= 1 (s = 0 is outside the identity's domain)")
    K = extension(fam.ctx, e)
    Qn = K.q**fam.n
    budget.check(f"moment_via_transform over (F_{K.q}^{fam.n})^{2 * s + 1}", Qn ** (2 * s + 1), budget_limit)
    if fam.r == 0:
        return CycloInt.integer(fam.D, Qn ** (2 * s))
    As = [offset_matrix(fam, i, e) for i in range(fam.r)]
    return lemma_rhs(As, [1] * s + [fam.D - 1] * s, fam.D)


@dataclass(frozen=True)
class IdentityReport:
    equal: bool
    lhs: CycloInt
    rhs: CycloInt

    def to_json(self) -> dict:
        return {"equal": self.equal, "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json()}


def verify_identity(fam: SumFamily, s: int, e: int = 1, budget_limit: int | None = None) -> IdentityReport:
    K = extension(fam.ctx, e)
    Qn = K.q**fam.n
    budget.check("moment identity", Qn ** (max(fam.r, 2 * s) + 1), budget_limit)
    lhs = moment_direct(fam, s, e, budget_limit)
    rhs = moment_via_transform(fam, s, e, budget_limit)
    return IdentityReport(lhs == rhs, lhs, rhs)
