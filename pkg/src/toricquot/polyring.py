"""Sparse multivariate polynomials over Q or F_p, and Buchberger's algorithm.

Polynomials are dicts from exponent tuples to nonzero coefficients.  All
Groebner computations use graded reverse lexicographic order.
"""

from __future__ import annotations

import heapq
import itertools
import os
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import GroebnerBudgetExceeded, InputError

Exps = tuple[int, ...]

DEFAULT_BUDGET = 10**6
BUDGET_ENV = "TORICQUOT_GB_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


class PolyRing:
    """k[x_0, ..., x_{n-1}] with k = Q (modulus 0) or F_p."""

    __slots__ = ("nvars", "modulus", "names")

    def __init__(self, nvars: int, modulus: int = 0, names: Optional[Sequence[str]] = None):
        if modulus and (modulus < 2 or any(modulus % q == 0 for q in range(2, int(modulus**0.5) + 1))):
            raise InputError(f"modulus {modulus} is not prime")
        self.nvars = nvars
        self.modulus = modulus
        self.names = tuple(names) if names else tuple(f"x{i + 1}" for i in range(nvars))

    def __eq__(self, other):
        return isinstance(other, PolyRing) and (self.nvars, self.modulus) == (other.nvars, other.modulus)

    def __hash__(self):
        return hash((self.nvars, self.modulus))

    def __repr__(self):
        field = "QQ" if not self.modulus else f"GF({self.modulus})"
        return f"PolyRing({field}, {', '.join(self.names)})"

    def coerce(self, c):
        if self.modulus:
            if isinstance(c, Fraction):
                return (c.numerator * pow(c.denominator, -1, self.modulus)) % self.modulus
            return int(c) % self.modulus
        return Fraction(c)

    def inverse(self, c):
        return pow(c, -1, self.modulus) if self.modulus else 1 / c

    def zero(self) -> "SparsePoly":
        return SparsePoly(self, {})

    def one(self) -> "SparsePoly":
        return self.const(1)

    def const(self, c) -> "SparsePoly":
        return SparsePoly(self, {(0,) * self.nvars: c})

    def var(self, i: int) -> "SparsePoly":
        e = [0] * self.nvars
        e[i] = 1
        return SparsePoly(self, {tuple(e): 1})

    def gens(self) -> list["SparsePoly"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps: Sequence[int], coeff=1) -> "SparsePoly":
        if len(exps) != self.nvars or any(e < 0 for e in exps):
            raise InputError(f"bad exponent vector {list(exps)} for {self.nvars} variables")
        return SparsePoly(self, {tuple(exps): coeff})

    def extend(self, extra: int, names: Sequence[str] = ()) -> "PolyRing":
        names = list(self.names) + list(names or [f"y{i}" for i in range(extra)])
        return PolyRing(self.nvars + extra, self.modulus, names)


class SparsePoly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping[Exps, object]):
        self.ring = ring
        clean = {}
        for e, c in terms.items():
            c = ring.coerce(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, ring, terms):
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        return p

    # -- basic protocol
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return isinstance(other, SparsePoly) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def _check(self, other) -> "SparsePoly":
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        if not isinstance(other, SparsePoly) or other.ring != self.ring:
            raise InputError("polynomials live in different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        mod = self.ring.modulus
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if mod:
                v %= mod
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return SparsePoly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.modulus
        return SparsePoly._raw(self.ring, {e: (-c % mod if mod else -c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        mod = self.ring.modulus
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        if mod:
            out = {e: c % mod for e, c in out.items()}
        return SparsePoly._raw(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> "SparsePoly":
        c = self.ring.coerce(c)
        mod = self.ring.modulus
        return SparsePoly._raw(self.ring, {e: (v * c % mod if mod else v * c)
                                           for e, v in self.terms.items() if c})

    def derivative(self, i: int) -> "SparsePoly":
        mod = self.ring.modulus
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                v = e[i] * c
                if mod:
                    v %= mod
                if v:
                    f = list(e)
                    f[i] -= 1
                    out[tuple(f)] = v
        return SparsePoly._raw(self.ring, out)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    def evaluate(self, point: Sequence):
        mod = self.ring.modulus
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * (pow(x, k, mod) if mod else x**k)
            total += t
        return total % mod if mod else total

    def substitute(self, values: Mapping[int, object]) -> "SparsePoly":
        """Replace the listed variables by field constants."""
        mod = self.ring.modulus
        out: dict = {}
        for e, c in self.terms.items():
            f = list(e)
            for i, v in values.items():
                if f[i]:
                    c = c * (pow(v, f[i], mod) if mod else v ** f[i])
                    f[i] = 0
            f = tuple(f)
            out[f] = out.get(f, 0) + c
        return SparsePoly(self.ring, out)

    def embed(self, ring: PolyRing, positions: Sequence[int]) -> "SparsePoly":
        """Map variable i to variable positions[i] of ``ring``."""
        out = {}
        for e, c in self.terms.items():
            f = [0] * ring.nvars
            for i, k in enumerate(e):
                f[positions[i]] += k
            out[tuple(f)] = c
        return SparsePoly(ring, out)

    def leading_exps(self) -> Exps:
        return max(self.terms, key=grevlex_key)

    def monic(self) -> "SparsePoly":
        return self.scale(self.ring.inverse(self.terms[self.leading_exps()]))

    def sorted_terms(self) -> list[tuple[Exps, object]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def __repr__(self):
        return f"SparsePoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(self.ring.names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif not self.ring.modulus and c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [[list(e), str(c)] for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, ring: PolyRing, data: Iterable) -> "SparsePoly":
        return cls(ring, {tuple(e): Fraction(c) for e, c in data})


def grevlex_key(e: Exps) -> tuple:
    """Sort key: larger key means larger monomial in grevlex."""
    return (sum(e),) + tuple(-x for x in reversed(e))


def _heap_key(e: Exps) -> tuple:
    return (-sum(e),) + tuple(reversed(e))


def _divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exps, b: Exps) -> Exps:
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a: Exps, b: Exps) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


class _Counter:
    __slots__ = ("steps", "budget")

    def __init__(self, budget):
        self.steps = 0
        self.budget = budget

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise GroebnerBudgetExceeded(f"Groebner computation exceeded {self.budget} reduction steps")


def _reduce(p: dict, basis: list[tuple[Exps, dict]], ring: PolyRing, counter: _Counter) -> dict:
    """Full normal form of p modulo monic polynomials (lead, terms)."""
    mod = ring.modulus
    p = dict(p)
    heap = [(_heap_key(e), e) for e in p]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, e = heapq.heappop(heap)
        c = p.pop(e, None)
        if c is None:
            continue
        for lead, g in basis:
            if _divides(lead, e):
                counter.tick()
                shift = tuple(x - y for x, y in zip(e, lead))
                for ge, gc in g.items():
                    if ge == lead:
                        continue
                    t = tuple(x + y for x, y in zip(ge, shift))
                    v = p.get(t)
                    if v is None:
                        v = -c * gc
                        if mod:
                            v %= mod
                        if v:
                            p[t] = v
                            heapq.heappush(heap, (_heap_key(t), t))
                    else:
                        v = v - c * gc
                        if mod:
                            v %= mod
                        if v:
                            p[t] = v
                        else:
                            del p[t]
                break
        else:
            rem[e] = c
    return rem


def _monic(terms: dict, ring: PolyRing) -> tuple[Exps, dict]:
    lead = max(terms, key=grevlex_key)
    inv = ring.inverse(terms[lead])
    mod = ring.modulus
    return lead, {e: (c * inv % mod if mod else c * inv) for e, c in terms.items()}


def _spoly(f: tuple[Exps, dict], g: tuple[Exps, dict], ring: PolyRing) -> dict:
    L = _lcm(f[0], g[0])
    mod = ring.modulus
    out: dict = {}
    for (lead, terms), sign in ((f, 1), (g, -1)):
        shift = tuple(x - y for x, y in zip(L, lead))
        for e, c in terms.items():
            t = tuple(x + y for x, y in zip(e, shift))
            out[t] = out.get(t, 0) + sign * c
    if mod:
        out = {e: c % mod for e, c in out.items()}
    return {e: c for e, c in out.items() if c}


def groebner_basis(polys: Sequence[SparsePoly], budget: Optional[int] = None) -> list[SparsePoly]:
    """Reduced Groebner basis (grevlex) via Buchberger with Gebauer-Moeller pruning.

    Raises GroebnerBudgetExceeded after ``budget`` reduction steps.
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return []
    ring = polys[0].ring
    for p in polys:
        if p.ring != ring:
            raise InputError("generators live in different rings")
    counter = _Counter(default_budget() if budget is None else budget)
    one = (0,) * ring.nvars

    store: list[tuple[Exps, dict]] = []
    active: list[int] = []
    pairs: list[tuple[int, int]] = []

    def basis():
        return [store[i] for i in active]

    def update(h: int):
        nonlocal active, pairs
        lh = store[h][0]
        C = [(h, g) for g in active]
        D = []
        while C:
            _, g1 = C.pop()
            L1 = _lcm(lh, store[g1][0])
            if _coprime(lh, store[g1][0]) or not any(
                    _divides(_lcm(lh, store[g2][0]), L1) for _, g2 in itertools.chain(C, D)):
                D.append((h, g1))
        E = [(a, b) for a, b in D if not _coprime(store[a][0], store[b][0])]
        keep = []
        for a, b in pairs:
            Lab = _lcm(store[a][0], store[b][0])
            if (not _divides(lh, Lab) or _lcm(store[a][0], lh) == Lab
                    or _lcm(lh, store[b][0]) == Lab):
                keep.append((a, b))
        pairs = keep + E
        active = [g for g in active if not _divides(lh, store[g][0])] + [h]

    def add(terms: dict) -> bool:
        item = _monic(terms, ring)
        store.append(item)
        if item[0] == one:
            return True
        update(len(store) - 1)
        return False

    for p in sorted(polys, key=lambda q: grevlex_key(q.leading_exps())):
        r = _reduce(p.terms, basis(), ring, counter)
        if r and add(r):
            return [ring.one()]

    while pairs:
        k = min(range(len(pairs)), key=lambda i: grevlex_key(_lcm(store[pairs[i][0]][0], store[pairs[i][1]][0])))
        a, b = pairs.pop(k)
        s = _spoly(store[a], store[b], ring)
        if not s:
            continue
        r = _reduce(s, basis(), ring, counter)
        if r and add(r):
            return [ring.one()]

    return _interreduce(basis(), ring, counter)


def _interreduce(G: list[tuple[Exps, dict]], ring: PolyRing, counter: _Counter) -> list[SparsePoly]:
    G = sorted(G, key=lambda g: grevlex_key(g[0]))
    minimal = [g for g in G if not any(h is not g and _divides(h[0], g[0]) for h in G)]
    out = []
    for g in minimal:
        others = [h for h in minimal if h is not g]
        tail = {e: c for e, c in g[1].items() if e != g[0]}
        r = _reduce(tail, others, ring, counter)
        r[g[0]] = g[1][g[0]]
        out.append(SparsePoly._raw(ring, r))
    return sorted(out, key=lambda p: grevlex_key(p.leading_exps()))


def reduce_poly(p: SparsePoly, G: Sequence[SparsePoly], budget: Optional[int] = None) -> SparsePoly:
    """Normal form of p modulo a list of polynomials (ideally a Groebner basis)."""
    basis = [_monic(g.terms, p.ring) for g in G if not g.is_zero()]
    counter = _Counter(default_budget() if budget is None else budget)
    return SparsePoly._raw(p.ring, _reduce(p.terms, basis, p.ring, counter))


def is_groebner_basis(G: Sequence[SparsePoly]) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    if not G:
        return True
    ring = G[0].ring
    items = [_monic(g.terms, ring) for g in G]
    counter = _Counter(10**9)
    for f, g in itertools.combinations(items, 2):
        s = _spoly(f, g, ring)
        if s and _reduce(s, items, ring, counter):
            return False
    return True


def contains_one(polys: Sequence[SparsePoly], budget: Optional[int] = None) -> bool:
    G = groebner_basis(polys, budget)
    return len(G) == 1 and G[0].is_constant()


def localized_contains_one(polys: Sequence[SparsePoly], g: SparsePoly,
                           budget: Optional[int] = None) -> bool:
    """Whether 1 lies in the ideal after inverting g, i.e. V(I) misses {g != 0}."""
    if g.is_zero():
        return True
    if g.is_constant():
        return contains_one(polys, budget)
    ring = g.ring
    big = ring.extend(1, ["_y"])
    pos = list(range(ring.nvars))
    lifted = [p.embed(big, pos) for p in polys]
    y = big.var(ring.nvars)
    lifted.append(big.one() - y * g.embed(big, pos))
    return contains_one(lifted, budget)


def jacobian_minors(polys: Sequence[SparsePoly], variables: Sequence[int]) -> list[SparsePoly]:
    """All k x k minors of the Jacobian (k = number of polys) in the given variables."""
    k = len(polys)
    if k == 0:
        return []
    J = [[p.derivative(v) for v in variables] for p in polys]
    out = []
    for cols in itertools.combinations(range(len(variables)), k):
        m = _det([[J[i][c] for c in cols] for i in range(k)], polys[0].ring)
        if not m.is_zero():
            out.append(m)
    return out


def _det(M: list[list[SparsePoly]], ring: PolyRing) -> SparsePoly:
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = ring.zero()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total
