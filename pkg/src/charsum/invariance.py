"""Translation invariance of polynomials: over finite fields, over Q, and modulo primes.

Over a field of characteristic 0, F(x + m) = F(x) forces F(x + t m) = F(x) for
every t, so the invariant translations are exactly the m with sum_i m_i dF/dx_i = 0.
That is a linear system in m with integer coefficients and is solved exactly.
A bounded search over small integer vectors, expanding F(x + m) directly, is run
alongside as an independent witness.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import budget
from .errors import ConfigError
from .ffield import is_prime, make_field
from .rfunc import FactoredRational, MPoly, is_dth_power_free, stabilizer

IntTerms = dict  # {exponent tuple: int}


# --- integer polynomials ----------------------------------------------------------

def int_poly(lit: Any, n: int, where: str = "poly") -> IntTerms:
    """Integer polynomial from the ``[[[e_1..e_n], coeff], ...]`` literal (or a dict)."""
    if isinstance(lit, dict):
        items = list(lit.items())
    elif isinstance(lit, list):
        items = []
        for i, term in enumerate(lit):
            if not (isinstance(term, list) and len(term) == 2 and isinstance(term[0], list)):
                raise ConfigError(f"{where}[{i}]: expected [[exponents], coeff], got {term!r}")
            items.append((tuple(term[0]), term[1]))
    else:
        raise ConfigError(f"{where}: expected a polynomial literal")
    out: IntTerms = {}
    for i, (exp, c) in enumerate(items):
        exp = tuple(exp)
        if len(exp) != n or not all(isinstance(v, int) and v >= 0 for v in exp):
            raise ConfigError(f"{where}[{i}]: exponent vector {list(exp)} must have {n} nonnegative integers")
        if not isinstance(c, int) or isinstance(c, bool):
            raise ConfigError(f"{where}[{i}]: coefficient {c!r} must be an integer")
        out[exp] = out.get(exp, 0) + c
    return {e: c for e, c in out.items() if c}


def int_degree(F: IntTerms) -> int:
    return max((sum(e) for e in F), default=0)


def int_translate(F: IntTerms, m: Sequence[int]) -> IntTerms:
    """F(x + m) over Z, by binomial expansion of every monomial."""
    out: IntTerms = {}
    for exp, c in F.items():
        ranges = [range(a + 1) for a in exp]
        for sub in itertools.product(*ranges):
            coef = c
            for a, b, mi in zip(exp, sub, m):
                coef *= math.comb(a, b) * mi ** (a - b)
            if coef:
                out[sub] = out.get(sub, 0) + coef
    return {e: c for e, c in out.items() if c}


def int_partial(F: IntTerms, i: int) -> IntTerms:
    out: IntTerms = {}
    for exp, c in F.items():
        if exp[i]:
            e2 = exp[:i] + (exp[i] - 1,) + exp[i + 1:]
            out[e2] = out.get(e2, 0) + c * exp[i]
    return {e: c for e, c in out.items() if c}


def reduce_mod(F: IntTerms, p: int, n: int) -> MPoly:
    K = make_field(p)
    return MPoly.from_dict(K, n, {e: c % p for e, c in F.items()})


# --- exact rational linear algebra -----------------------------------------------------

def rational_nullspace(rows: list[list[int]], cols: int) -> list[list[Fraction]]:
    """Basis of {v in Q^cols : rows v = 0}, by Gauss-Jordan over Fraction."""
    A = [[Fraction(v) for v in row] for row in rows]
    piv: list[int] = []
    r = 0
    for c in range(cols):
        k = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        piv.append(c)
        r += 1
    basis = []
    for f in (c for c in range(cols) if c not in piv):
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -A[i][f]
        basis.append(v)
    return basis


def primitive_integer(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = math.lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints) or 1
    return tuple(x // g for x in ints)


# --- operations ---------------------------------------------------------------------------

def invariance_over_field(F: FactoredRational | MPoly, e: int = 1, budget_limit: int | None = None) -> list[tuple[int, ...]]:
    """All m in F_{q^e}^n with F(x + m) = F(x); always contains 0."""
    if isinstance(F, MPoly):
        F = FactoredRational.from_poly(F)
    return stabilizer(F, e, budget_limit)


@dataclass
class PrimeProbe:
    p: int
    e: int
    size: int            # #stabilizer in F_{p^e}^n
    dim: int             # log_p of the size (the stabilizer is an F_p-subspace)

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "size": self.size, "dim": self.dim}


@dataclass
class InvarianceProbe:
    n: int
    status: str                              # "trivial", "nontrivial" or "inconclusive"
    rational_basis: list[tuple[int, ...]]    # primitive integer basis of the Q-stabilizer
    search_height: int
    search_hits: list[tuple[int, ...]]       # nonzero integer m found by direct expansion
    per_prime: list[PrimeProbe] = field(default_factory=list)
    note: str = ""

    @property
    def dim(self) -> int:
        return len(self.rational_basis)

    def exceptional_primes(self) -> list[int]:
        return sorted({pp.p for pp in self.per_prime if pp.size > 1})

    def to_json(self) -> dict:
        return {"n": self.n, "status": self.status, "dim": self.dim,
                "rational_basis": [list(v) for v in self.rational_basis],
                "search_height": self.search_height, "search_hits": [list(v) for v in self.search_hits],
                "per_prime": [pp.to_json() for pp in self.per_prime],
                "exceptional_primes": self.exceptional_primes(), "note": self.note}


def _in_rational_span(basis: list[tuple[int, ...]], v: Sequence[int], n: int) -> bool:
    if not basis:
        return not any(v)
    # v in span iff the rank does not grow: test via nullspace of the transpose system
    rows = [list(col) for col in zip(*basis, v)]  # n rows, len(basis)+1 columns
    ns = rational_nullspace(rows, len(basis) + 1)
    return any(w[-1] != 0 for w in ns)


def rational_invariance_probe(F: IntTerms, n: int, primes: Sequence[int] = (), e: int = 1, height: int = 2,
                              D_max: int = 12, coeff_max: int = 10**6,
                              budget_limit: int | None = None) -> InvarianceProbe:
    """Translations of Q^n fixing the integer polynomial F, plus mod-p stabilizers.

    The exact answer comes from the derivative system; the bounded search must be
    consistent with it (every hit in the span, and a nonzero span produces a hit
    whenever its primitive generator has height <= `height`).  Any inconsistency,
    or an input outside the stated degree and coefficient bounds, gives status
    "inconclusive" rather than a definite answer.
    """
    if not F:
        raise ConfigError("the zero polynomial is invariant under everything; give a nonzero F")
    deg = int_degree(F)
    if deg > D_max:
        return InvarianceProbe(n, "inconclusive", [], height, [], note=f"degree {deg} exceeds D_max={D_max}")
    if max(abs(c) for c in F.values()) > coeff_max:
        return InvarianceProbe(n, "inconclusive", [], height, [], note=f"coefficients exceed {coeff_max}")
    budget.check("rational invariance search", (2 * height + 1) ** n * max(len(F), 1) * (deg + 1) ** n,
                 budget_limit)

    partials = [int_partial(F, i) for i in range(n)]
    monos = sorted(set().union(*[set(P) for P in partials])) if partials else []
    rows = [[P.get(mono, 0) for P in partials] for mono in monos]
    basis = [primitive_integer(v) for v in rational_nullspace(rows, n)] if n else []

    hits = []
    for m in itertools.product(range(-height, height + 1), repeat=n):
        if any(m) and int_translate(F, m) == F:
            hits.append(tuple(m))

    consistent = all(_in_rational_span(basis, h, n) for h in hits)
    if basis and all(max(abs(c) for c in v) <= height for v in basis):
        consistent &= bool(hits)
    if not basis:
        consistent &= not hits
    status = ("nontrivial" if basis else "trivial") if consistent else "inconclusive"
    note = "" if consistent else "exact derivative system and bounded search disagree"

    per_prime = []
    for p in primes:
        if not is_prime(p):
            raise ConfigError(f"probe prime {p} is not prime")
        Fp = reduce_mod(F, p, n)
        if Fp.is_zero():
            per_prime.append(PrimeProbe(p, e, (p**e) ** n, e * n))
            continue
        size = len(invariance_over_field(Fp, e, budget_limit))
        per_prime.append(PrimeProbe(p, e, size, round(math.log(size, p))))
    return InvarianceProbe(n, status, basis, height, hits, per_prime, note)


def power_free_mod_p(F: IntTerms, d: int, primes: Sequence[int]) -> dict[int, bool]:
    """Whether the reduction of the univariate integer polynomial F mod p is d-th-power-free.

    A reduction that vanishes identically is reported as not power-free.
    """
    if d < 2:
        raise ConfigError("d must be at least 2")
    if any(len(exp) != 1 for exp in F):
        raise ConfigError("power_free_mod_p needs a univariate polynomial")
    out = {}
    for p in primes:
        if not is_prime(p):
            raise ConfigError(f"probe prime {p} is not prime")
        Fp = reduce_mod(F, p, 1)
        out[p] = False if Fp.is_zero() else is_dth_power_free(FactoredRational.from_poly(Fp), d)
    return out


def first_odd_primes(count: int = 20) -> list[int]:
    out, c = [], 3
    while len(out) < count:
        if is_prime(c):
            out.append(c)
        c += 2
    return out
