"""Perfect-power censuses over offset tuples, factor-matching graphs, Weil-bound checks."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import budget
from .errors import ConfigError
from .ffield import Character, FieldCtx, embedding, extension, make_character
from .rfunc import (FactoredRational, absolute_form, assoc_scalar, is_dth_power_free, is_perfect_dth_power,
                    product_of_translates, stabilizer)
from .sums import SumFamily, sum_general, sum_S


@dataclass
class CensusReport:
    q: int                      # size of the enumeration field F_{q^e}
    e: int
    n: int
    d: int
    exponents: tuple[int, ...]
    tuples: int                 # tuples scanned
    count: int                  # perfect-power tuples
    ratio: float                # count / Q^{n * floor(r/2)}
    absolutely_irreducible: bool
    structure_ok: bool | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def s(self) -> int:
        return len(self.exponents) // 2

    def to_json(self) -> dict:
        out = {"q": self.q, "e": self.e, "n": self.n, "s": self.s, "d": self.d,
               "exponents": list(self.exponents), "tuples": self.tuples, "count": self.count,
               "ratio": self.ratio, "absolutely_irreducible": self.absolutely_irreducible,
               "structure_ok": self.structure_ok, "wall_time": self.wall_time}
        out.update(self.extra)
        return out


def moment_exponents(s: int) -> tuple[int, ...]:
    return (1,) * s + (-1,) * s


def _validate(F: FactoredRational, d: int, exponents: Sequence[int]) -> None:
    for a in exponents:
        if math.gcd(a, d) != 1:
            raise ConfigError(f"exponent {a} is not coprime to d={d}")


class _AbsoluteData:
    """F split into absolutely irreducible factors over L, plus K^n enumerated inside L."""

    def __init__(self, F: FactoredRational, e: int):
        self.K = extension(F.ctx, e)
        Fabs, _ = absolute_form(F)
        deg = math.lcm(Fabs.ctx.k, self.K.k) // F.ctx.k
        self.L = extension(F.ctx, deg)
        self.Fabs = Fabs.map_to(self.L)
        self.emb = embedding(self.K, self.L)
        self.n = F.n

    def lift(self, m: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(self.emb[c]) for c in m)


def _tuples(K: FieldCtx, n: int, r: int):
    vecs = list(itertools.product(range(K.q), repeat=n))
    return itertools.product(vecs, repeat=r)


def is_perfect_power_tuple(data: _AbsoluteData, d: int, tup, exponents) -> bool:
    G = product_of_translates(data.Fabs, [(data.lift(m), a) for m, a in zip(tup, exponents)])
    return is_perfect_dth_power(G, d)


def _twist_index(a: int, d: int, D: int) -> int:
    """u = a mod d, made coprime to D, so that sigma_u acts on order-d values as the a-th power."""
    u = a % d
    while math.gcd(u, D) != 1:
        u += d
    return u


def perfect_power_census(F: FactoredRational, d: int, s: int | None = None, e: int = 1,
                         exponents: Sequence[int] | None = None, budget_limit: int | None = None,
                         check_structure: bool = False, with_sums: bool = True) -> CensusReport:
    """Count tuples (m_1..m_r) with prod F(x + m_i)^{a_i} a perfect d-th power over the closure.

    The default exponents are s copies of +1 followed by s copies of -1.  When an
    order-d character exists on the base field and `with_sums` is set, every tuple's
    sum T = sum_x chi(Norm(prod F(x + m_i)^{a_i})) is evaluated too, and the largest
    |T| over the tuples that are not perfect powers is reported with its ratio to
    Q^{n - 1/2}.
    """
    t0 = time.perf_counter()
    if exponents is None:
        if s is None:
            raise ValueError("give s or an explicit exponent sequence")
        exponents = moment_exponents(s)
    exponents = tuple(int(a) for a in exponents)
    _validate(F, d, exponents)
    K = extension(F.ctx, e)
    r = len(exponents)
    total = K.q ** (F.n * r)
    budget.check(f"perfect-power census over (F_{K.q}^{F.n})^{r}", total, budget_limit)
    data = _AbsoluteData(F, e)
    fam = None
    if with_sums and (F.ctx.q - 1) % d == 0:
        budget.check("census twisted sums", total * K.q**F.n, budget_limit)
        chi = make_character(F.ctx, d)
        fam = SumFamily(F.ctx, F.n, (chi,), (F,), chi.D)
        us = [_twist_index(a, d, chi.D) for a in exponents]
    count = 0
    structure_ok = True
    max_T = None
    for tup in _tuples(K, F.n, r):
        perfect = is_perfect_power_tuple(data, d, tup, exponents)
        if perfect:
            count += 1
            if check_structure and structure_ok:
                graphs = [factor_graph_abs(data, tup, j) for j in range(len(data.Fabs.factors))]
                structure_ok = all(not g.isolated() for g in graphs)
        elif fam is not None:
            T = sum_general(fam, 0, e, list(zip(tup, us)), budget_limit).abs
            max_T = T if max_T is None else max(max_T, T)
    denom = K.q ** (F.n * (r // 2))
    extra = {}
    if fam is not None:
        extra = {"max_abs_T_nonpower": max_T,
                 "max_ratio_nonpower": None if max_T is None else max_T / K.q ** (F.n - 0.5)}
    return CensusReport(q=K.q, e=e, n=F.n, d=d, exponents=exponents, tuples=total, count=count,
                        ratio=count / denom, absolutely_irreducible=data.Fabs.absolutely_irreducible,
                        structure_ok=structure_ok if check_structure else None,
                        wall_time=time.perf_counter() - t0, extra=extra)


@dataclass(frozen=True)
class FactorGraph:
    r: int
    edges: frozenset[tuple[int, int]]   # pairs (i, i') with 1 <= i < i' <= r

    def degree(self, i: int) -> int:
        return sum(1 for a, b in self.edges if i in (a, b))

    def isolated(self) -> list[int]:
        return [i for i in range(1, self.r + 1) if self.degree(i) == 0]

    def components(self) -> int:
        parent = list(range(self.r + 1))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a, b in self.edges:
            parent[find(a)] = find(b)
        return len({find(i) for i in range(1, self.r + 1)})


def factor_graph_abs(data: _AbsoluteData, tup, j: int) -> FactorGraph:
    L = data.L
    factors = [f for f, _ in data.Fabs.factors]
    fj = factors[j]
    lifted = [data.lift(m) for m in tup]
    edges = set()
    for i, ip in itertools.combinations(range(len(tup)), 2):
        for sign in (1, -1):
            delta = tuple(L.sub(a, b) if sign == 1 else L.sub(b, a) for a, b in zip(lifted[i], lifted[ip]))
            shifted = fj.translate(delta)
            if any(assoc_scalar(fp, shifted) is not None for fp in factors):
                edges.add((i + 1, ip + 1))
                break
    return FactorGraph(len(tup), frozenset(edges))


def factor_graph(F: FactoredRational, d: int, tup: Sequence[Sequence[int]], exponents: Sequence[int], j: int,
                 e: int = 1) -> FactorGraph:
    """Graph on 1..r: i ~ i' iff f_j(x +/- (m_i - m_i')) is an associate of some factor f_j'.

    Factors are the absolutely irreducible factors of F, indexed in their merged order.
    `d` and `exponents` are accepted for symmetry with the census and validated only.
    """
    _validate(F, d, exponents)
    if len(tup) != len(exponents):
        raise ValueError("tuple and exponent sequence differ in length")
    data = _AbsoluteData(F, e)
    if not 0 <= j < len(data.Fabs.factors):
        raise ValueError(f"factor index {j} out of range (F has {len(data.Fabs.factors)} absolute factors)")
    return factor_graph_abs(data, tup, j)


def census_structure_check(F: FactoredRational, d: int, s: int | None = None, e: int = 1,
                           exponents: Sequence[int] | None = None, budget_limit: int | None = None) -> bool:
    """Every perfect-power tuple has no isolated vertex in any factor graph."""
    rep = perfect_power_census(F, d, s, e, exponents, budget_limit, check_structure=True)
    return bool(rep.structure_ok)


def lemma_constant(r: int, degF: int) -> int:
    """2^{binom(r+1, 2) deg F} * (2 deg F)^{r^2 deg F}."""
    return 2 ** (math.comb(r + 1, 2) * degF) * (2 * degF) ** (r * r * degF)


@dataclass
class BoundCheck:
    count: int
    stabilizer_size: int
    C: int
    bound: int
    clamped_bound: int
    passed: bool
    census: CensusReport

    def to_json(self) -> dict:
        return {"count": self.count, "stabilizer_size": self.stabilizer_size,
                "C_log10": math.log10(self.C), "bound_log10": math.log10(self.bound) if self.bound else None,
                "clamped_bound": self.clamped_bound, "pass": self.passed, "census": self.census.to_json()}


def census_bound_check(F: FactoredRational, d: int, exponents: Sequence[int], e: int = 1,
                       budget_limit: int | None = None) -> BoundCheck:
    """#P <= C Q^{n floor(r/2)} #T^{ceil(r/2)}, compared after clamping to the tuple-space size."""
    if not is_dth_power_free(F, d):
        raise ConfigError(f"F is not {d}-th-power-free")
    exponents = tuple(exponents)
    rep = perfect_power_census(F, d, e=e, exponents=exponents, budget_limit=budget_limit)
    T = len(stabilizer(F, e, budget_limit))
    r = len(exponents)
    C = lemma_constant(r, F.degree)
    bound = C * rep.q ** (F.n * (r // 2)) * T ** ((r + 1) // 2)
    clamped = min(bound, rep.tuples)
    return BoundCheck(rep.count, T, C, bound, clamped, rep.count <= clamped, rep)


@dataclass
class WeilReport:
    rows: list[dict]
    max_ratio: float
    C_user: float
    passed: bool

    def to_json(self) -> dict:
        return {"rows": self.rows, "max_ratio": self.max_ratio, "C_user": self.C_user, "pass": self.passed}


def weil_check(F: FactoredRational, chi: Character, ext: Sequence[int] = (1,), C_user: float = 2.0,
               budget_limit: int | None = None) -> WeilReport:
    """|sum_{x in k^n} chi(Norm F(x))| / Q^{n - 1/2} for each probe degree, against C_user."""
    if is_perfect_dth_power(F, chi.order):
        raise ConfigError(f"F is a perfect {chi.order}-th power over the closure; the bound does not apply")
    fam = SumFamily(F.ctx, F.n, (chi,), (F,), chi.D)
    rows = []
    for e in ext:
        val = sum_S(fam, e, [(0,) * F.n], budget_limit)
        Q = F.ctx.q**e
        ratio = val.abs / Q ** (F.n - 0.5)
        rows.append({"e": e, "Q": Q, "sum": val.value.to_json(), "abs": val.abs, "ratio": ratio})
    mx = max((row["ratio"] for row in rows), default=0.0)
    return WeilReport(rows, mx, C_user, mx <= C_user)
