"""Subspaces of F_p^dim in reduced echelon form, and mutual transversality.

A family W_1..W_N is mutually transverse when the codimension of the
intersection is the sum of the codimensions.  extend_transverse enlarges any
family to a transverse one without changing the intersection, and
transverse_basis turns that into a basis in which every W_j is cut out by its
own block of coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .ffield import is_prime


def rref(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p, zero rows dropped. Returns (R, pivot columns)."""
    A = np.array(M, dtype=np.int64) % p
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = A.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        others = np.nonzero(A[:, c])[0]
        for o in others:
            if o != r:
                A[o] = (A[o] - A[o, c] * A[r]) % p
        piv.append(c)
        r += 1
    return A[:r], piv


def nullspace(M: np.ndarray, p: int, cols: int) -> np.ndarray:
    """Basis (as rows) of {v : M v = 0} over F_p."""
    if len(M) == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = rref(M, p)
    free = [c for c in range(cols) if c not in piv]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for t, f in enumerate(free):
        out[t, f] = 1
        for i, pc in enumerate(piv):
            out[t, pc] = (-R[i, f]) % p
    return out


@dataclass(frozen=True)
class Subspace:
    p: int
    dim_ambient: int
    basis: tuple[tuple[int, ...], ...]   # canonical: reduced echelon rows

    @classmethod
    def span(cls, p: int, dim_ambient: int, vectors: Sequence[Sequence[int]] = ()) -> "Subspace":
        if not is_prime(p):
            raise ConfigError(f"p={p} is not prime")
        vecs = [list(v) for v in vectors]
        for v in vecs:
            if len(v) != dim_ambient:
                raise ConfigError(f"vector {v} does not lie in F_{p}^{dim_ambient}")
        if not vecs:
            return cls(p, dim_ambient, ())
        R, _ = rref(np.array(vecs, dtype=np.int64), p)
        return cls(p, dim_ambient, tuple(tuple(int(a) for a in row) for row in R))

    @classmethod
    def whole(cls, p: int, dim_ambient: int) -> "Subspace":
        return cls.span(p, dim_ambient, np.eye(dim_ambient, dtype=np.int64).tolist())

    @classmethod
    def zero(cls, p: int, dim_ambient: int) -> "Subspace":
        return cls(p, dim_ambient, ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.dim_ambient - self.dim

    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(self.dim, self.dim_ambient)

    def pivots(self) -> list[int]:
        return [next(i for i, a in enumerate(row) if a) for row in self.basis]

    def _same_space(self, other: "Subspace") -> None:
        if (self.p, self.dim_ambient) != (other.p, other.dim_ambient):
            raise ConfigError(f"subspaces live in different spaces: F_{self.p}^{self.dim_ambient} "
                              f"vs F_{other.p}^{other.dim_ambient}")

    def __add__(self, other: "Subspace") -> "Subspace":
        self._same_space(other)
        return Subspace.span(self.p, self.dim_ambient, list(self.basis) + list(other.basis))

    def contains_vector(self, v: Sequence[int]) -> bool:
        return Subspace.span(self.p, self.dim_ambient, list(self.basis) + [list(v)]).dim == self.dim

    def __le__(self, other: "Subspace") -> bool:
        self._same_space(other)
        return (other + self).dim == other.dim

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: row-reduce [[A, A], [B, 0]]; rows with zero left half span A cap B."""
        self._same_space(other)
        n = self.dim_ambient
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.p, n)
        A, B = self.matrix(), other.matrix()
        top = np.hstack([A, A])
        bot = np.hstack([B, np.zeros_like(B)])
        R, _ = rref(np.vstack([top, bot]), self.p)
        rows = [row[n:] for row in R if not row[:n].any()]
        return Subspace.span(self.p, n, [list(r) for r in rows])

    def annihilator(self) -> "Subspace":
        """W^perp in the dual, identified with F_p^dim via the standard pairing."""
        return Subspace.span(self.p, self.dim_ambient, nullspace(self.matrix(), self.p, self.dim_ambient).tolist())

    def complement(self) -> "Subspace":
        """The span of the standard vectors off the pivot columns: the lexicographically
        first standard vectors completing a basis."""
        piv = set(self.pivots())
        eye = np.eye(self.dim_ambient, dtype=np.int64)
        return Subspace.span(self.p, self.dim_ambient, [eye[i].tolist() for i in range(self.dim_ambient) if i not in piv])


def intersection(Ws: Sequence[Subspace], p: int | None = None, dim_ambient: int | None = None) -> Subspace:
    """Intersection of a family; the empty intersection is the whole space."""
    if not Ws:
        if p is None or dim_ambient is None:
            raise ValueError("the empty intersection needs the ambient space")
        return Subspace.whole(p, dim_ambient)
    out = Ws[0]
    for W in Ws[1:]:
        out = out.intersect(W)
    return out


def _ambient(Vs: Sequence[Subspace]) -> tuple[int, int]:
    if not Vs:
        return 2, 0
    p, n = Vs[0].p, Vs[0].dim_ambient
    for V in Vs:
        if (V.p, V.dim_ambient) != (p, n):
            raise ConfigError("subspaces do not share an ambient space")
    return p, n


def extend_transverse(Vs: Sequence[Subspace]) -> list[Subspace]:
    """W_j containing V_j with (W_1 cap .. cap W_n) + W_{n+1} = V for every prefix
    and the same total intersection.

    Built inductively: W_N = V_N + U, U the standard complement of
    (W_1 cap .. cap W_{N-1}) + V_N.
    """
    p, n = _ambient(Vs)
    Ws: list[Subspace] = []
    inter = None
    for V in Vs:
        if inter is None:
            W = V  # nothing to be transverse to yet
        else:
            U = (inter + V).complement()
            W = V + U
        Ws.append(W)
        inter = W if inter is None else inter.intersect(W)
    return Ws


@dataclass
class TransverseBasis:
    E: list[tuple[int, ...]]
    parts: list[list[int]]      # E_j as index lists into E, pairwise disjoint

    def span_without(self, p: int, n: int, drop: set[int]) -> Subspace:
        return Subspace.span(p, n, [list(v) for i, v in enumerate(self.E) if i not in drop])


def _extend_within(base: Subspace, big: Subspace) -> list[tuple[int, ...]]:
    """Vectors of big's basis, taken greedily, completing a basis of base to one of big."""
    out = []
    cur = base
    for v in big.basis:
        nxt = cur + Subspace.span(cur.p, cur.dim_ambient, [list(v)])
        if nxt.dim > cur.dim:
            out.append(v)
            cur = nxt
    return out


def transverse_basis(Vs: Sequence[Subspace], p: int | None = None, dim_ambient: int | None = None) -> TransverseBasis:
    """Basis E with disjoint E_j: cap V_j = span(E minus all E_j), V_j inside span(E minus E_j).

    After extend_transverse, with I the total intersection and A_j the intersection
    of the W_i for i != j, a complement U_j of I inside A_j gives
    V = I + sum U_j directly and W_j = I + sum_{i != j} U_i.
    """
    if Vs:
        p, n = _ambient(Vs)
    else:
        if p is None or dim_ambient is None:
            raise ValueError("an empty family needs the ambient space")
        n = dim_ambient
    Ws = extend_transverse(Vs)
    I = intersection(Ws, p, n)
    E = list(I.basis)
    parts = []
    for j in range(len(Ws)):
        A = intersection([W for i, W in enumerate(Ws) if i != j], p, n)
        U = _extend_within(I, A)
        parts.append(list(range(len(E), len(E) + len(U))))
        E.extend(U)
    return TransverseBasis(E, parts)


@dataclass(frozen=True)
class TransversalityReport:
    prefix_sums: bool        # (W_1 cap .. cap W_n) + W_{n+1} = V for 1 <= n < N
    quotient_iso: bool       # V / cap W_j -> sum of V / W_j is onto
    leave_one_out: bool      # (cap_{j != n} W_j) + W_n = V for every n
    codim_additive: bool     # codim cap W_j = sum codim W_j

    def all(self) -> bool:
        return self.prefix_sums and self.quotient_iso and self.leave_one_out and self.codim_additive

    def agree(self) -> bool:
        vals = {self.prefix_sums, self.quotient_iso, self.leave_one_out, self.codim_additive}
        return len(vals) == 1

    def to_json(self) -> dict:
        return {"prefix_sums": self.prefix_sums, "quotient_iso": self.quotient_iso,
                "leave_one_out": self.leave_one_out, "codim_additive": self.codim_additive}


def check_transversality(Ws: Sequence[Subspace]) -> TransversalityReport:
    """Evaluate four equivalent characterisations independently.

    The quotient map is tested as a rank computation: V -> V/W_j is given by the
    annihilator of W_j, so the stacked annihilators must have full rank
    sum codim W_j.  The other three use sums and Zassenhaus intersections.
    """
    if not Ws:
        return TransversalityReport(True, True, True, True)
    p, n = _ambient(Ws)
    V = Subspace.whole(p, n)
    N = len(Ws)

    prefix = True
    inter = Ws[0]
    for k in range(1, N):
        if (inter + Ws[k]).dim != n:
            prefix = False
        inter = inter.intersect(Ws[k])

    rows = [W.annihilator().matrix() for W in Ws]
    stacked = np.vstack(rows) if any(len(r) for r in rows) else np.zeros((0, n), dtype=np.int64)
    rank = len(rref(stacked, p)[0]) if len(stacked) else 0
    quotient = rank == sum(len(r) for r in rows)

    loo = all((intersection([W for i, W in enumerate(Ws) if i != k], p, n) + Ws[k]).dim == V.dim
              for k in range(N))

    codim = intersection(Ws, p, n).codim == sum(W.codim for W in Ws)
    return TransversalityReport(prefix, quotient, loo, codim)


def random_subspace(rng: np.random.Generator, p: int, n: int) -> Subspace:
    k = int(rng.integers(0, n + 1))
    vecs = rng.integers(0, p, size=(k, n)).tolist()
    return Subspace.span(p, n, vecs)


def random_instances(seed: int = 0, count: int = 500, primes: Sequence[int] = (2, 3), dim_max: int = 6,
                     N_max: int = 4) -> list[list[Subspace]]:
    """Seeded families of random subspaces (spans of random vectors)."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    out = []
    for _ in range(count):
        p = int(primes[int(rng.integers(len(primes)))])
        n = int(rng.integers(1, dim_max + 1))
        N = int(rng.integers(1, N_max + 1))
        out.append([random_subspace(rng, p, n) for _ in range(N)])
    return out
