"""Multivariate polynomials and factored rational functions over a FieldCtx.

A rational function is kept as ``c * prod f_j^{b_j}``.  Associate factors are
identified through a normal form: each stored factor is scaled so that its
leading coefficient (graded-lex order) is 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import budget
from .errors import BudgetExceeded, ConfigError, FieldError, IrreducibilityUnverified
from .ffield import FieldCtx, embedding, extension


def _order_key(exp: tuple[int, ...]) -> tuple:
    return (sum(exp), exp)


@dataclass(frozen=True)
class MPoly:
    ctx: FieldCtx
    n: int
    terms: tuple[tuple[tuple[int, ...], int], ...]  # sorted, leading term first

    @classmethod
    def from_dict(cls, ctx: FieldCtx, n: int, terms: dict) -> "MPoly":
        clean = {}
        for exp, c in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp} for {n} variables")
            c = int(c)
            if not 0 <= c < ctx.q:
                raise ValueError(f"coefficient {c} is not an element of F_{ctx.q}")
            if c:
                clean[exp] = ctx.add(clean.get(exp, 0), c)
        items = sorted(((e, c) for e, c in clean.items() if c), key=lambda t: _order_key(t[0]), reverse=True)
        return cls(ctx, n, tuple(items))

    @classmethod
    def constant(cls, ctx: FieldCtx, n: int, c: int) -> "MPoly":
        return cls.from_dict(ctx, n, {(0,) * n: c})

    @classmethod
    def variable(cls, ctx: FieldCtx, n: int, i: int) -> "MPoly":
        exp = [0] * n
        exp[i] = 1
        return cls.from_dict(ctx, n, {tuple(exp): 1})

    @classmethod
    def univariate(cls, ctx: FieldCtx, coeffs: Sequence[int]) -> "MPoly":
        """From coefficients c_0, c_1, ... (lowest degree first)."""
        return cls.from_dict(ctx, 1, {(i,): c % ctx.q for i, c in enumerate(coeffs)})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def is_constant(self) -> bool:
        return self.degree <= 0

    @property
    def lc(self) -> int:
        return self.terms[0][1] if self.terms else 0

    def key(self) -> tuple:
        return self.terms

    def __add__(self, other: "MPoly") -> "MPoly":
        d = self.as_dict()
        for e, c in other.terms:
            d[e] = self.ctx.add(d.get(e, 0), c)
        return MPoly.from_dict(self.ctx, self.n, d)

    def __neg__(self) -> "MPoly":
        return MPoly.from_dict(self.ctx, self.n, {e: self.ctx.neg(c) for e, c in self.terms})

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def scale(self, c: int) -> "MPoly":
        return MPoly.from_dict(self.ctx, self.n, {e: self.ctx.mul(c, v) for e, v in self.terms})

    def __mul__(self, other: "MPoly") -> "MPoly":
        ctx = self.ctx
        d: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = ctx.add(d.get(e, 0), ctx.mul(c1, c2))
        return MPoly.from_dict(ctx, self.n, d)

    def __pow__(self, k: int) -> "MPoly":
        out = MPoly.constant(self.ctx, self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def monic(self) -> tuple[int, "MPoly"]:
        """(lc, f / lc)."""
        lc = self.lc
        return lc, self.scale(self.ctx.inv(lc))

    def evaluate(self, x: Sequence[int]) -> int:
        if len(x) != self.n:
            raise ValueError(f"point has {len(x)} coordinates, polynomial has {self.n} variables")
        ctx = self.ctx
        acc = 0
        for e, c in self.terms:
            t = c
            for xi, ei in zip(x, e):
                if ei:
                    t = ctx.mul(t, ctx.pow(xi, ei))
            acc = ctx.add(acc, t)
        return acc

    def veval(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at every row of an (N, n) array of element encodings."""
        ctx = self.ctx
        points = np.asarray(points, dtype=np.int64).reshape(-1, self.n)
        acc = np.zeros(points.shape[0], dtype=np.int64)
        for e, c in self.terms:
            t = np.full(points.shape[0], c, dtype=np.int64)
            for i, ei in enumerate(e):
                if ei:
                    t = ctx.vmul(t, ctx.vpow(points[:, i], ei))
            acc = ctx.vadd(acc, t)
        return acc

    def translate(self, m: Sequence[int]) -> "MPoly":
        """f(x + m)."""
        if len(m) != self.n:
            raise ValueError(f"offset has {len(m)} coordinates, polynomial has {self.n} variables")
        ctx = self.ctx
        if not any(m):
            return self
        out: dict = {}
        for e, c in self.terms:
            # expand prod_i (x_i + m_i)^{e_i}
            parts = []
            for ei, mi in zip(e, m):
                parts.append([(k, ctx.mul(ctx.from_int(math.comb(ei, k)), ctx.pow(mi, ei - k)))
                              for k in range(ei + 1)])
            for combo in itertools.product(*parts):
                coeff = c
                for _, v in combo:
                    coeff = ctx.mul(coeff, v)
                if coeff:
                    exp = tuple(k for k, _ in combo)
                    out[exp] = ctx.add(out.get(exp, 0), coeff)
        return MPoly.from_dict(ctx, self.n, out)

    def map_to(self, big: FieldCtx) -> "MPoly":
        if big is self.ctx:
            return self
        emb = embedding(self.ctx, big)
        return MPoly.from_dict(big, self.n, {e: int(emb[c]) for e, c in self.terms})

    def univariate_coeffs(self) -> list[int]:
        if self.n != 1:
            raise ValueError("not a univariate polynomial")
        out = [0] * (self.degree + 1)
        for (e,), c in self.terms:
            out[e] = c
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = ["x"] if self.n == 1 else [f"x{i + 1}" for i in range(self.n)]
        parts = []
        for e, c in self.terms:
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(names, e) if k)
            parts.append(f"{c}*{mono}" if mono and c != 1 else (mono or str(c)))
        return " + ".join(parts)


def assoc_scalar(f: MPoly, g: MPoly) -> int | None:
    """c with g = c * f, or None. Two zero polynomials give c = 1."""
    if f.is_zero() and g.is_zero():
        return 1
    if f.is_zero() or g.is_zero() or len(f.terms) != len(g.terms):
        return None
    ctx = f.ctx
    c = ctx.div(g.lc, f.lc)
    for (e1, c1), (e2, c2) in zip(f.terms, g.terms):
        if e1 != e2 or ctx.mul(c, c1) != c2:
            return None
    return c


@dataclass(frozen=True)
class EvalResult:
    value: int | None  # None marks a zero of the numerator or denominator

    @property
    def zero_or_pole(self) -> bool:
        return self.value is None


ZERO_OR_POLE = EvalResult(None)


@dataclass(frozen=True)
class FactoredRational:
    ctx: FieldCtx
    n: int
    c: int
    factors: tuple[tuple[MPoly, int], ...]
    absolutely_irreducible: bool = False

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("constant of a factored rational function must be nonzero")
        for f, b in self.factors:
            if f.is_zero():
                raise ValueError("zero factor in a rational function")
            if f.n != self.n or f.ctx is not self.ctx:
                raise ValueError("factor does not match the field or variable count")

    @classmethod
    def make(cls, ctx: FieldCtx, n: int, factors: Iterable[tuple[MPoly, int]], c: int = 1,
             absolutely_irreducible: bool = False) -> "FactoredRational":
        return cls(ctx, n, c, tuple((f, int(b)) for f, b in factors), absolutely_irreducible or n == 1)

    @classmethod
    def from_poly(cls, f: MPoly, absolutely_irreducible: bool = False) -> "FactoredRational":
        return cls.make(f.ctx, f.n, [(f, 1)], absolutely_irreducible=absolutely_irreducible)

    @property
    def degree(self) -> int:
        pos = sum(b * f.degree for f, b in self.factors if b > 0)
        neg = sum(-b * f.degree for f, b in self.factors if b < 0)
        return max(pos, neg)

    def merged(self) -> "FactoredRational":
        """Associate-merged normal form: monic factors, summed multiplicities, zeros dropped."""
        ctx = self.ctx
        c = self.c
        acc: dict = {}
        polys: dict = {}
        for f, b in self.factors:
            lc, mf = f.monic()
            c = ctx.mul(c, ctx.pow(lc, b))
            if mf.is_constant():
                continue
            acc[mf.key()] = acc.get(mf.key(), 0) + b
            polys[mf.key()] = mf
        items = sorted(((polys[k], b) for k, b in acc.items() if b), key=lambda t: t[0].key())
        return FactoredRational(ctx, self.n, c, tuple(items), self.absolutely_irreducible)

    def evaluate(self, x: Sequence[int]) -> EvalResult:
        if len(x) != self.n:
            raise ValueError(f"point has {len(x)} coordinates, function has {self.n} variables")
        ctx = self.ctx
        v = self.c
        for f, b in self.factors:
            fx = f.evaluate(x)
            if fx == 0:
                if b:
                    return ZERO_OR_POLE
                continue
            v = ctx.mul(v, ctx.pow(fx, b))
        return EvalResult(v)

    def vlog(self, points: np.ndarray) -> np.ndarray:
        """Discrete logs of F at each point; -1 where a factor vanishes."""
        ctx = self.ctx
        points = np.asarray(points, dtype=np.int64).reshape(-1, self.n)
        order = ctx.q - 1
        out = np.full(points.shape[0], int(ctx.log_table[self.c]), dtype=np.int64)
        bad = np.zeros(points.shape[0], dtype=bool)
        for f, b in self.factors:
            if b == 0:
                continue
            lv = ctx.log_table[f.veval(points)]
            bad |= lv < 0
            out = (out + b * lv) % order
        return np.where(bad, -1, out)

    def translate(self, m: Sequence[int]) -> "FactoredRational":
        return FactoredRational(self.ctx, self.n, self.c,
                                tuple((f.translate(m), b) for f, b in self.factors),
                                self.absolutely_irreducible)

    def map_to(self, big: FieldCtx) -> "FactoredRational":
        if big is self.ctx:
            return self
        emb = embedding(self.ctx, big)
        return FactoredRational(big, self.n, int(emb[self.c]),
                                tuple((f.map_to(big), b) for f, b in self.factors),
                                self.absolutely_irreducible)

    def numerator(self) -> MPoly:
        out = MPoly.constant(self.ctx, self.n, self.c)
        for f, b in self.factors:
            if b > 0:
                out = out * f**b
        return out

    def denominator(self) -> MPoly:
        out = MPoly.constant(self.ctx, self.n, 1)
        for f, b in self.factors:
            if b < 0:
                out = out * f**(-b)
        return out

    def same_function(self, other: "FactoredRational") -> bool:
        """Equality as rational functions, by cross-multiplying expanded forms."""
        return (self.numerator() * other.denominator()).key() == (other.numerator() * self.denominator()).key()

    def __str__(self) -> str:
        parts = [str(self.c)] if self.c != 1 or not self.factors else []
        for f, b in self.factors:
            parts.append(f"({f})" + (f"^{b}" if b != 1 else ""))
        return "*".join(parts)


def evaluate(F: FactoredRational, x: Sequence[int]) -> EvalResult:
    return F.evaluate(x)


def translate(F: FactoredRational, m: Sequence[int]) -> FactoredRational:
    return F.translate(m)


def product_of_translates(F: FactoredRational, offsets: Iterable[tuple[Sequence[int], int]]) -> FactoredRational:
    """prod_j F(x + m_j)^{a_j}, associate-merged."""
    ctx = F.ctx
    c = 1
    factors = []
    for m, a in offsets:
        c = ctx.mul(c, ctx.pow(F.c, a))
        for f, b in F.factors:
            factors.append((f.translate(m), a * b))
    return FactoredRational(ctx, F.n, c, tuple(factors), F.absolutely_irreducible).merged()


# --- univariate splitting ------------------------------------------------------

def _roots_in(K: FieldCtx, coeffs: list[int]) -> list[tuple[int, int]]:
    """Roots of a univariate polynomial over K, with multiplicities (deflation)."""
    elems = np.arange(K.q, dtype=np.int64)
    acc = np.zeros(K.q, dtype=np.int64)
    for c in reversed(coeffs):
        acc = K.vadd(K.vmul(acc, elems), np.full(K.q, c))
    out = []
    for rho in np.flatnonzero(acc == 0):
        rho = int(rho)
        cur = list(coeffs)
        mult = 0
        while len(cur) > 1:
            # synthetic division by (x - rho)
            quo = [0] * (len(cur) - 1)
            carry = 0
            for i in range(len(cur) - 1, 0, -1):
                carry = K.add(cur[i], K.mul(carry, rho))
                quo[i - 1] = carry
            rem = K.add(cur[0], K.mul(carry, rho))
            if rem != 0:
                break
            mult += 1
            cur = quo
        out.append((rho, mult))
    return out


@dataclass(frozen=True)
class Split:
    e: int                      # extension degree over the base field
    field: FieldCtx             # F_{q^e}
    lead: int                   # leading coefficient, in `field`
    roots: tuple[tuple[int, int], ...]  # (root, multiplicity), roots in `field`
    embedding: np.ndarray = field(repr=False, compare=False)


def univariate_split(ctx: FieldCtx, f: MPoly, max_size: int = budget.FIELD_BUDGET, e_min: int = 1) -> Split:
    """Split f completely over the smallest F_{q^e} (e a multiple of e_min)."""
    if f.n != 1 or f.is_zero():
        raise ValueError("univariate_split needs a nonzero univariate polynomial")
    coeffs = f.univariate_coeffs()
    deg = len(coeffs) - 1
    e = e_min
    limit = math.lcm(*range(1, deg + 1)) * e_min if deg else e_min
    while True:
        size = ctx.q**e
        if size > max_size:
            raise BudgetExceeded(f"splitting field F_{ctx.q}^{e} of a degree-{deg} polynomial", size, max_size)
        K = extension(ctx, e)
        emb = embedding(ctx, K)
        kc = [int(emb[c]) for c in coeffs]
        roots = _roots_in(K, kc) if deg else []
        if sum(m for _, m in roots) == deg:
            return Split(e, K, kc[-1], tuple(roots), emb)
        if e >= limit:
            raise FieldError(f"{f} did not split by degree {e}; inconsistent field tables")
        e += e_min


def absolute_form(F: FactoredRational, max_size: int = budget.FIELD_BUDGET) -> tuple[FactoredRational, np.ndarray]:
    """Factorization into absolutely irreducible factors.

    n = 1: every factor is split into linear factors over a common extension L;
    returns (F over L, embedding ctx -> L).  n >= 2: requires the caller's
    absolute-irreducibility assertion and returns F merged.
    """
    if F.n >= 2:
        if not F.absolutely_irreducible:
            raise IrreducibilityUnverified(
                "multivariate factors must be asserted absolutely irreducible (absolutely_irreducible=true)")
        return F.merged(), embedding(F.ctx, F.ctx)
    ctx = F.ctx
    if all(f.degree <= 1 for f, _ in F.factors):
        return F.merged(), embedding(ctx, ctx)
    nonconst = [(f, b) for f, b in F.factors if not f.is_constant() and b]
    e = 1
    for f, _ in nonconst:
        e = math.lcm(e, univariate_split(ctx, f, max_size).e)
    L = extension(ctx, e)
    emb = embedding(ctx, L)
    c = int(emb[F.c])
    lin = []
    for f, b in F.factors:
        if f.is_constant():
            c = L.mul(c, L.pow(int(emb[f.lc]), b))
            continue
        sp = univariate_split(ctx, f, max_size, e_min=e) if e > 1 else univariate_split(ctx, f, max_size)
        assert sp.field is L
        c = L.mul(c, L.pow(sp.lead, b))
        for rho, mu in sp.roots:
            lin.append((MPoly.from_dict(L, 1, {(1,): 1, (0,): L.neg(rho)}), b * mu))
    out = FactoredRational(L, 1, c, tuple(lin), True).merged()
    return out, emb


def is_dth_power_free(F: FactoredRational, d: int) -> bool:
    """Every (merged) multiplicity strictly between -d and d."""
    G = absolute_form(F)[0] if F.n == 1 else F.merged()
    return all(-d < b < d for _, b in G.factors)


def is_perfect_dth_power(F: FactoredRational, d: int) -> bool:
    """Perfect d-th power over the algebraic closure (constant ignored)."""
    G, _ = absolute_form(F)
    return all(b % d == 0 for _, b in G.factors)


def stabilizer(F: FactoredRational, e: int = 1, budget_limit: int | None = None) -> list[tuple[int, ...]]:
    """All m in F_{q^e}^n with F(x + m) = F(x) identically; vectors in extension(F.ctx, e)."""
    K = extension(F.ctx, e)
    size = K.q**F.n
    budget.check(f"stabilizer over F_{K.q}^{F.n}", size, budget_limit)
    G = F.map_to(K)
    num, den = G.numerator(), G.denominator()
    lhs_fixed_den = den
    out = []
    for m in itertools.product(range(K.q), repeat=F.n):
        if (num.translate(m) * lhs_fixed_den).key() == (num * den.translate(m)).key():
            out.append(tuple(m))
    return out


# --- literal formats -----------------------------------------------------------

def parse_poly(ctx: FieldCtx, n: int, lit: Any, where: str = "poly") -> MPoly:
    """Parse ``[[[e_1..e_n], coeff], ...]``."""
    if not isinstance(lit, list):
        raise ConfigError(f"{where}: expected a list of [[exponents], coeff] terms, got {type(lit).__name__}")
    terms: dict = {}
    for i, term in enumerate(lit):
        pos = f"{where}[{i}]"
        if not (isinstance(term, list) and len(term) == 2 and isinstance(term[0], list)):
            raise ConfigError(f"{pos}: expected [[exponents], coeff], got {term!r}")
        exp, coeff = term
        if len(exp) != n or not all(isinstance(v, int) and v >= 0 for v in exp):
            raise ConfigError(f"{pos}: exponent vector {exp!r} must have {n} nonnegative integers")
        if not isinstance(coeff, int) or isinstance(coeff, bool):
            raise ConfigError(f"{pos}: coefficient {coeff!r} must be an integer")
        if ctx.k > 1 and not 0 <= coeff < ctx.q:
            raise ConfigError(f"{pos}: coefficient {coeff} is not an element encoding of F_{ctx.q}")
        c = coeff % ctx.q if ctx.k == 1 else coeff
        terms[tuple(exp)] = ctx.add(terms.get(tuple(exp), 0), c)
    return MPoly.from_dict(ctx, n, terms)


def parse_rational(ctx: FieldCtx, n: int, lit: Any, where: str = "rational") -> FactoredRational:
    """Parse ``{constant, factors: [[poly, mult], ...], absolutely_irreducible}``.

    For n = 1 a dense ``{numerator, denominator}`` pair is accepted as well.
    """
    if isinstance(lit, list):
        return FactoredRational.from_poly(parse_poly(ctx, n, lit, where))
    if not isinstance(lit, dict):
        raise ConfigError(f"{where}: expected an object or a polynomial literal")
    if "numerator" in lit:
        if n != 1:
            raise ConfigError(f"{where}: numerator/denominator form is only accepted for n = 1")
        G = parse_poly(ctx, n, lit["numerator"], f"{where}.numerator")
        H = parse_poly(ctx, n, lit.get("denominator", [[[0], 1]]), f"{where}.denominator")
        if G.is_zero() or H.is_zero():
            raise ConfigError(f"{where}: numerator and denominator must be nonzero")
        return FactoredRational.make(ctx, n, [(G, 1), (H, -1)])
    const = lit.get("constant", 1)
    if not isinstance(const, int) or const % ctx.q == 0 and ctx.k == 1 or const == 0:
        raise ConfigError(f"{where}.constant: must be a nonzero field element, got {const!r}")
    factors = []
    for j, item in enumerate(lit.get("factors", [])):
        pos = f"{where}.factors[{j}]"
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], int)):
            raise ConfigError(f"{pos}: expected [poly, multiplicity]")
        f = parse_poly(ctx, n, item[0], f"{pos}[0]")
        if f.is_zero():
            raise ConfigError(f"{pos}: zero polynomial factor")
        factors.append((f, item[1]))
    flag = bool(lit.get("absolutely_irreducible", False))
    return FactoredRational.make(ctx, n, factors, const % ctx.q if ctx.k == 1 else const, flag)


def poly_to_literal(f: MPoly) -> list:
    return [[list(e), c] for e, c in f.terms]


def rational_to_literal(F: FactoredRational) -> dict:
    return {"constant": F.c, "factors": [[poly_to_literal(f), b] for f, b in F.factors],
            "absolutely_irreducible": F.absolutely_irreducible}
