"""Stratification experiments: exceptional offset tuples against weight thresholds,
counts inside boxes, and point counts of varieties in boxes.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import budget
from .bounds import theta
from .cyclo import CycloInt
from .errors import ConfigError
from .ffield import FieldCtx, extension, make_field
from .rfunc import MPoly
from .sums import CHUNK, SumFamily, count_rows, iter_S_counts, offset_matrix, point_index

DEFAULT_C = 3.0


def _exceeds(S: CycloInt, C: float, Q: int, w: int) -> bool:
    """|S| > C * Q^{w/2}, decided on |S|^2 > C^2 Q^w.

    Exact when |S|^2 is a rational integer (always so for real characters);
    otherwise compared in double precision.
    """
    N = S.norm_squared()
    rhs = Fraction(C) ** 2 * Fraction(Q) ** w if w >= 0 else Fraction(C) ** 2 / Fraction(Q) ** (-w)
    if N.is_rational_integer():
        return N.as_int() > rhs
    return N.to_complex().real > float(rhs)


def thresholds(C: float, Q: int, n: int) -> list[float]:
    """tau_j = C Q^{(n + j - 1)/2}, j = 0..n."""
    return [C * Q ** ((n + j - 1) / 2) for j in range(n + 1)]


def predicted_codims(n: int, r: int) -> list[int]:
    return [theta(n, r, j) for j in range(n + 1)]


@dataclass
class StratumCensus:
    q: int
    e: int
    n: int
    r: int
    C_user: float
    thresholds: list[float]
    counts: list[float]           # N_j (exact counts, or scaled estimates when sampling)
    total: int                    # size of the tuple space Q^{nr}
    mode: str = "exact"
    samples: int | None = None
    seed: int | None = None
    sample_hits: list[int] | None = None
    rows: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def Q(self) -> int:
        return self.q

    def empirical_exponents(self) -> list[float | None]:
        return [math.log(c, self.q) if c > 0 else None for c in self.counts]

    def empirical_codims(self) -> list[float | None]:
        return [self.n * self.r - eps if eps is not None else None for eps in self.empirical_exponents()]

    def fraction(self, j: int) -> float:
        return self.counts[j] / self.total

    def to_json(self) -> dict:
        return {"q": self.q, "e": self.e, "n": self.n, "r": self.r, "C_user": self.C_user,
                "thresholds": self.thresholds, "counts": self.counts, "total": self.total,
                "fractions": [self.fraction(j) for j in range(self.n + 1)],
                "empirical_exponents": self.empirical_exponents(),
                "empirical_codims": self.empirical_codims(),
                "theta": predicted_codims(self.n, self.r),
                "mode": self.mode, "samples": self.samples, "seed": self.seed,
                "sample_hits": self.sample_hits, "wall_time": self.wall_time}


def _classify(fam: SumFamily, K: FieldCtx, C: float, rows: np.ndarray, memo: dict) -> np.ndarray:
    """Per count-row, the largest j with |S| > tau_j (or -1), as an int array."""
    out = np.empty(rows.shape[0], dtype=np.int64)
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    levels = np.empty(len(uniq), dtype=np.int64)
    for u, row in enumerate(uniq):
        key = tuple(int(v) for v in row)
        if key not in memo:
            S = CycloInt.from_counts(fam.D, row)
            lvl = -1
            for j in range(fam.n + 1):
                if _exceeds(S, C, K.q, fam.n + j - 1):
                    lvl = j
                else:
                    break
            memo[key] = (lvl, abs(S))
        levels[u] = memo[key][0]
    out[:] = levels[np.asarray(inverse).reshape(-1)]
    return out


def stratum_census(fam: SumFamily, e: int = 1, C_user: float = DEFAULT_C, mode: str = "exact",
                   samples: int = 10_000, seed: int = 0, budget_limit: int | None = None,
                   dump_rows: int = 0) -> StratumCensus:
    """N_j = #{offset tuples : |S| > tau_j} for j = 0..n.

    mode "exact" enumerates (K^n)^r; mode "sample" draws `samples` tuples uniformly
    (with replacement) from a Philox stream keyed by `seed` and scales the hit counts.
    Thresholds increase with j, so N_0 >= N_1 >= ... >= N_n by construction.
    """
    t0 = time.perf_counter()
    K = extension(fam.ctx, e)
    Qn = K.q**fam.n
    total = Qn**fam.r
    memo: dict = {}
    hits = [0] * (fam.n + 1)
    rows_out = []
    if mode == "exact":
        budget.check(f"stratum census over (F_{K.q}^{fam.n})^{fam.r + 1}", total * Qn, budget_limit)
    elif mode == "sample":
        budget.check(f"sampled stratum census ({samples} tuples)", samples * Qn, budget_limit)
        rng = np.random.Generator(np.random.Philox(key=seed))
        draws = rng.integers(0, Qn, size=(samples, fam.r), dtype=np.int64)
    else:
        raise ConfigError(f"unknown census mode {mode!r} (expected 'exact' or 'sample')")

    if mode == "exact":
        stream = iter_S_counts(fam, e)
    else:
        stream = _sampled_counts(fam, e, draws)
    for X, C in stream:
        lv = _classify(fam, K, C_user, C, memo)
        for j in range(fam.n + 1):
            hits[j] += int(np.count_nonzero(lv >= j))
        if dump_rows and len(rows_out) < dump_rows:
            for x_row, c_row in zip(X, C):
                if len(rows_out) >= dump_rows:
                    break
                rows_out.append((tuple(int(v) for v in x_row), memo[tuple(int(v) for v in c_row)][1]))
    if mode == "exact":
        counts = [int(h) for h in hits]
        extra = dict(samples=None, seed=None, sample_hits=None)
    else:
        counts = [h * total / samples for h in hits]
        extra = dict(samples=samples, seed=seed, sample_hits=hits)
    return StratumCensus(q=K.q, e=e, n=fam.n, r=fam.r, C_user=C_user, thresholds=thresholds(C_user, K.q, fam.n),
                         counts=counts, total=total, mode=mode, rows=rows_out,
                         wall_time=time.perf_counter() - t0, **extra)


def _sampled_counts(fam: SumFamily, e: int, draws: np.ndarray, chunk: int = CHUNK):
    """Like iter_S_counts, but over an explicit list of offset tuples (point indices)."""
    K = extension(fam.ctx, e)
    Qn = K.q**fam.n
    As = [offset_matrix(fam, i, e) for i in range(fam.r)]
    step = max(1, chunk // max(Qn, 1))
    for start in range(0, draws.shape[0], step):
        X = draws[start:start + step]
        E = np.zeros((X.shape[0], Qn), dtype=np.int64)
        valid = np.ones((X.shape[0], Qn), dtype=bool)
        for i, A in enumerate(As):
            t = A[:, X[:, i]].T
            valid &= t >= 0
            E += t
        yield X, count_rows(E, valid, fam.D)


# --- boxes ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxSpec:
    """Per-coordinate subsets B_1..B_n of the field, kept in coordinate order.

    The size ordering needed by the bound shape is taken from `sorted_sizes`, so
    a box never has to be permuted to satisfy it.
    """
    sets: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, sets: Sequence[Sequence[int]]) -> "BoxSpec":
        clean = []
        for i, B in enumerate(sets):
            B = tuple(sorted(set(int(b) for b in B)))
            if not B:
                raise ConfigError(f"box coordinate {i} is empty")
            clean.append(B)
        return cls(tuple(clean))

    @classmethod
    def full(cls, K: FieldCtx, n: int) -> "BoxSpec":
        return cls(tuple(tuple(range(K.q)) for _ in range(n)))

    @property
    def size(self) -> int:
        return math.prod(len(B) for B in self.sets)

    @property
    def sorted_sizes(self) -> list[int]:
        return sorted(len(B) for B in self.sets)

    def points(self) -> np.ndarray:
        return np.array(list(itertools.product(*self.sets)), dtype=np.int64).reshape(-1, len(self.sets))


def b_power(sizes: Sequence[int], r: int, th: int) -> Fraction:
    """b^{-theta}: with theta = n0 r + eta, (#B_1 ... #B_n0)^{-r} (#B_{n0+1})^{-eta}."""
    sizes = sorted(sizes)
    n0, eta = divmod(th, r)
    val = Fraction(1)
    for i in range(min(n0, len(sizes))):
        val /= Fraction(sizes[i]) ** r
    if eta and n0 < len(sizes):
        val /= Fraction(sizes[n0]) ** eta
    return val


@dataclass
class BoxReport:
    j: int
    count: int
    box_tuples: int
    theta: int
    shape: float                  # (#B)^r b^{-theta_j}
    C_prime: float | None
    passed: bool | None

    def to_json(self) -> dict:
        return {"j": self.j, "count": self.count, "box_tuples": self.box_tuples, "theta": self.theta,
                "shape": self.shape, "C_prime": self.C_prime, "pass": self.passed}


def box_exceptional_count(fam: SumFamily, e: int, C_user: float, j: int, box: BoxSpec | Sequence[BoxSpec],
                          C_prime: float | None = None, budget_limit: int | None = None) -> BoxReport:
    """#{tuples in B^r : |S| > tau_j}, with the shape C' (#B)^r b^{-theta_j} reported alongside."""
    if not 0 <= j <= fam.n:
        raise ValueError(f"j={j} out of range 0..{fam.n}")
    K = extension(fam.ctx, e)
    boxes = [box] * fam.r if isinstance(box, BoxSpec) else list(box)
    if len(boxes) != fam.r:
        raise ConfigError(f"need one box per offset copy ({fam.r}), got {len(boxes)}")
    for b in boxes:
        if len(b.sets) != fam.n or any(not 0 <= v < K.q for B in b.sets for v in B):
            raise ConfigError(f"box {b.sets} is not a box in F_{K.q}^{fam.n}")
    tuples = math.prod(b.size for b in boxes)
    budget.check("box census", tuples * K.q**fam.n, budget_limit)
    index_sets = [point_index(K, b.points()) for b in boxes]
    memo: dict = {}
    count = 0
    for _, C in iter_S_counts(fam, e, index_sets):
        count += int(np.count_nonzero(_classify(fam, K, C_user, C, memo) >= j))
    th = theta(fam.n, fam.r, j)
    shape = float(Fraction(tuples) * b_power(boxes[0].sorted_sizes, fam.r, th)) if fam.r else float(tuples)
    passed = None if C_prime is None else count <= C_prime * shape
    return BoxReport(j, count, tuples, th, shape, C_prime, passed)


# --- varieties in boxes -----------------------------------------------------------------

@dataclass
class VarietyCount:
    count: int
    bound: int
    passed: bool
    theta: int
    d: int

    def to_json(self) -> dict:
        return {"count": self.count, "bound": self.bound, "pass": self.passed, "theta": self.theta, "d": self.d}


def box_count_variety(polys: Sequence[MPoly], box: BoxSpec, theta_claim: int, d: int,
                      budget_limit: int | None = None) -> VarietyCount:
    """#(X(k) in box) against d * prod of the N - theta largest #B_i, X the common zero set."""
    if not polys:
        raise ConfigError("need at least one polynomial")
    N = polys[0].n
    if len(box.sets) != N:
        raise ConfigError(f"box has {len(box.sets)} coordinates, polynomials have {N} variables")
    budget.check("variety point count", box.size * len(polys), budget_limit)
    pts = box.points()
    on = np.ones(len(pts), dtype=bool)
    for f in polys:
        on &= f.veval(pts) == 0
    count = int(np.count_nonzero(on))
    sizes = box.sorted_sizes
    bound = d * math.prod(sizes[theta_claim:])
    return VarietyCount(count, bound, count <= bound, theta_claim, d)


@dataclass
class VarietyInstance:
    p: int
    N: int
    polys: list[MPoly]
    groups: list[tuple[int, ...]]
    box: BoxSpec
    theta: int
    d: int


def random_variety_suite(seed: int = 0, count: int = 50, primes: Sequence[int] = (5, 7), N_max: int = 3,
                         deg_max: int = 3) -> list[VarietyInstance]:
    """Products of hypersurfaces in disjoint variable groups, with random boxes.

    Each instance picks N <= N_max variables, splits a random subset of them into
    groups, and puts one nonconstant polynomial in each group's variables; the
    common zero set has codimension #groups and degree at most the product of degrees.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    out = []
    for _ in range(count):
        p = int(primes[int(rng.integers(len(primes)))])
        K = make_field(p)
        N = int(rng.integers(1, N_max + 1))
        perm = [int(v) for v in rng.permutation(N)]
        n_groups = int(rng.integers(1, N + 1))
        cuts = sorted(int(v) for v in rng.choice(np.arange(1, N), size=n_groups - 1, replace=False)) if n_groups > 1 else []
        bounds_ = [0] + cuts + [N]
        groups = [tuple(sorted(perm[a:b])) for a, b in zip(bounds_, bounds_[1:])]
        # each group keeps at least one variable; some groups are dropped to vary codim
        keep = [g for g in groups if rng.random() < 0.8] or groups[:1]
        polys = []
        d = 1
        for g in keep:
            deg = int(rng.integers(1, deg_max + 1))
            terms: dict = {}
            # force a top-degree term so the degree is exact
            lead = [0] * N
            lead[g[int(rng.integers(len(g)))]] = deg
            terms[tuple(lead)] = int(rng.integers(1, p))
            for _ in range(int(rng.integers(0, 4))):
                exp = [0] * N
                budget_left = int(rng.integers(0, deg + 1))
                for _ in range(budget_left):
                    exp[g[int(rng.integers(len(g)))]] += 1
                terms[tuple(exp)] = (terms.get(tuple(exp), 0) + int(rng.integers(0, p))) % p
            f = MPoly.from_dict(K, N, terms)
            polys.append(f)
            d *= f.degree
        sets = []
        for _ in range(N):
            size = int(rng.integers(1, p + 1))
            sets.append(sorted(int(v) for v in rng.choice(p, size=size, replace=False)))
        out.append(VarietyInstance(p, N, polys, keep, BoxSpec.of(sets), len(keep), d))
    return out
