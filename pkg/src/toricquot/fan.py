"""Simplicial fans, torus-invariant divisors and their polytopes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import FanValidationError, InputError, NotCartierError, TorusFactorError, UnsupportedCaseError
from .intlinalg import (
    AbGroupPresentation,
    cokernel,
    dot,
    integer_solve,
    lcm,
    primitive,
    rank,
    rational_nullspace,
    rational_solve,
    rref,
    transpose,
    vector_gcd,
)

Cone = tuple[int, ...]
Divisor = Sequence[int]


@dataclass(frozen=True)
class Fan:
    """A fan given by primitive rays in Z^rank and its maximal cones.

    Cones are stored as sorted tuples of ray indices.
    """

    rank: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[Cone, ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(self, "max_cones", tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones))

    @property
    def nrays(self) -> int:
        return len(self.rays)

    @classmethod
    def from_json(cls, data: dict) -> "Fan":
        try:
            return cls(int(data["rank"]), data["rays"], data["max_cones"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"fan JSON must have rank, rays, max_cones: {exc}") from exc

    def to_json(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays],
                "max_cones": [list(c) for c in self.max_cones]}

    def cones(self) -> list[Cone]:
        """All cones (faces of maximal cones), smallest first, deterministic."""
        out = set()
        for c in self.max_cones:
            for k in range(len(c) + 1):
                out.update(itertools.combinations(c, k))
        return sorted(out, key=lambda c: (len(c), c))

    def is_cone(self, cone: Iterable[int]) -> bool:
        s = set(cone)
        return any(s <= set(c) for c in self.max_cones)

    def ray_matrix(self, cone: Optional[Iterable[int]] = None) -> list[list[int]]:
        idx = range(self.nrays) if cone is None else cone
        return [list(self.rays[i]) for i in idx]

    def check_divisor(self, D: Divisor) -> tuple[int, ...]:
        if len(D) != self.nrays:
            raise InputError(f"divisor has {len(D)} coefficients, fan has {self.nrays} rays")
        return tuple(int(c) for c in D)


def prime_divisor(F: Fan, i: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(F.nrays))


def principal_divisor(F: Fan, m: Sequence[int]) -> tuple[int, ...]:
    return tuple(dot(m, r) for r in F.rays)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.ok, "violations": list(self.violations)}


def _cones_meet_in_face(F: Fan, S: Cone, T: Cone) -> bool:
    """Whether cone(S) and cone(T) intersect exactly in cone(S & T).

    Both cones are simplicial, so a point of the intersection has unique
    coefficients on each side; the intersection is the common face iff no
    nonnegative relation  sum a_i v_i = sum b_j w_j  puts weight on a ray
    outside S & T.  Such a relation exists iff an extreme ray of the relation
    cone does, and extreme rays have minimal support.
    """
    common = set(S) & set(T)
    cols = [list(F.rays[i]) for i in S] + [[-x for x in F.rays[j]] for j in T]
    bad = [i not in common for i in S] + [j not in common for j in T]
    if not any(bad):
        return True
    k = len(cols)
    for size in range(2, min(k, F.rank + 1) + 1):
        for sub in itertools.combinations(range(k), size):
            if not any(bad[i] for i in sub):
                continue
            M = transpose([cols[i] for i in sub])
            ns = rational_nullspace(M, size)
            if len(ns) != 1:
                continue
            z = ns[0]
            if all(x > 0 for x in z) or all(x < 0 for x in z):
                return False
    return True


def validate_fan(F: Fan) -> ValidationReport:
    rep = ValidationReport()
    if F.rank < 0:
        rep.violations.append("negative rank")
        return rep
    seen = {}
    for i, r in enumerate(F.rays):
        if len(r) != F.rank:
            rep.violations.append(f"ray {i} has length {len(r)}, expected {F.rank}")
            continue
        if vector_gcd(r) != 1:
            rep.violations.append(f"ray {i} {list(r)} is not primitive")
        if r in seen:
            rep.violations.append(f"ray {i} duplicates ray {seen[r]}")
        seen.setdefault(r, i)
    if rep.violations:
        return rep
    if not F.max_cones:
        rep.violations.append("fan has no cones")
    for c in F.max_cones:
        if any(i < 0 or i >= F.nrays for i in c):
            rep.violations.append(f"cone {list(c)} references a missing ray")
        elif len(set(c)) != len(c):
            rep.violations.append(f"cone {list(c)} repeats a ray")
        elif rank(F.ray_matrix(c), F.rank) != len(c):
            rep.violations.append(f"cone {list(c)} is not simplicial")
    if rep.violations:
        return rep
    for a, b in itertools.combinations(F.max_cones, 2):
        if set(a) <= set(b) or set(b) <= set(a):
            rep.violations.append(f"cone {list(a)} and cone {list(b)} are nested")
        elif not _cones_meet_in_face(F, a, b):
            rep.violations.append(f"cones {list(a)} and {list(b)} do not meet in a common face")
    return rep


def require_valid(F: Fan) -> Fan:
    rep = validate_fan(F)
    if not rep.ok:
        raise FanValidationError(rep.violations)
    return F


def rays_span(F: Fan) -> bool:
    return rank(F.ray_matrix(), F.rank) == F.rank


def is_complete(F: Fan) -> bool:
    """Pure full-dimensional fan in which every wall lies on two maximal cones."""
    d = F.rank
    if any(len(c) != d for c in F.max_cones):
        return False
    if d == 0:
        return True
    count: dict[Cone, int] = {}
    for c in F.max_cones:
        for w in itertools.combinations(c, d - 1):
            count[w] = count.get(w, 0) + 1
    return all(v == 2 for v in count.values())


def walls(F: Fan) -> list[tuple[Cone, Cone]]:
    """Pairs of maximal cones sharing a codimension-one face."""
    out = []
    for a, b in itertools.combinations(F.max_cones, 2):
        if len(set(a) & set(b)) == F.rank - 1 == len(a) - 1 == len(b) - 1:
            out.append((a, b))
    return out


# ---------------------------------------------------------------------------
# class groups


def class_group(F: Fan) -> AbGroupPresentation:
    """Cl(X): Z^rays modulo the principal divisors (<m, ray>)_rays."""
    if not rays_span(F):
        raise TorusFactorError("rays do not span N (x) Q; use cox.split_torus_factor first")
    rows = [[r[j] for r in F.rays] for j in range(F.rank)]
    return cokernel(rows, F.nrays)


def local_class_group(F: Fan, cone: Iterable[int]) -> AbGroupPresentation:
    """Class group of the affine chart of ``cone``, on ambient Z^cone."""
    cone = tuple(cone)
    if not F.is_cone(cone):
        raise InputError(f"{list(cone)} is not a cone of the fan")
    rows = [[F.rays[i][j] for i in cone] for j in range(F.rank)]
    return cokernel(rows, len(cone))


def divisor_class(F: Fan, D: Divisor, cone: Optional[Iterable[int]] = None,
                  group: Optional[AbGroupPresentation] = None) -> tuple[int, ...]:
    """Coordinates of [D] in Cl(X), or in Cl(U_cone) when ``cone`` is given."""
    D = F.check_divisor(D)
    if cone is None:
        G = group or class_group(F)
        return G.image(D)
    cone = tuple(cone)
    G = group or local_class_group(F, cone)
    return G.image([D[i] for i in cone])


def singular_cones(F: Fan, maximal_only: bool = False) -> list[Cone]:
    """Cones whose local class group is nontrivial."""
    pool = F.max_cones if maximal_only else F.cones()
    return [c for c in pool if not local_class_group(F, c).is_trivial()]


# ---------------------------------------------------------------------------
# Cartier data


@dataclass
class CartierReport:
    cartier: bool
    witnesses: dict[Cone, tuple[int, ...]]
    failing: list[Cone]

    def __bool__(self):
        return self.cartier


def is_cartier(F: Fan, D: Divisor) -> CartierReport:
    """Solve <m_sigma, ray> = -c_ray on every maximal cone over Z."""
    D = F.check_divisor(D)
    wit, failing = {}, []
    for c in F.max_cones:
        m = integer_solve(F.ray_matrix(c), [-D[i] for i in c], F.rank)
        if m is None:
            failing.append(c)
        else:
            wit[c] = tuple(m)
    return CartierReport(not failing, wit, failing)


def cartier_index(F: Fan, D: Divisor) -> int:
    """Least n >= 1 with n*D Cartier (orders of [D] in the local groups)."""
    D = F.check_divisor(D)
    n = 1
    for c in F.max_cones:
        G = local_class_group(F, c)
        n = lcm(n, G.element_order(G.image([D[i] for i in c])))
    return n


def rational_support(F: Fan, D: Divisor) -> dict[Cone, list[Fraction]]:
    """Rational m_sigma per full-dimensional maximal cone."""
    D = F.check_divisor(D)
    out = {}
    for c in F.max_cones:
        if len(c) == F.rank:
            out[c] = rational_solve(F.ray_matrix(c), [-D[i] for i in c], F.rank)
    return out


def _require_complete(F: Fan):
    if not is_complete(F):
        raise UnsupportedCaseError("ampleness is only implemented for complete fans; "
                                   "supply generators and sections manually")


def _cartier_witnesses(F: Fan, D: Divisor) -> dict[Cone, tuple[int, ...]]:
    rep = is_cartier(F, D)
    if not rep:
        raise NotCartierError(f"divisor {list(D)} is not Cartier on cones {rep.failing}")
    return rep.witnesses


def is_ample(F: Fan, D: Divisor) -> bool:
    """Strict convexity of the support function across every wall."""
    _require_complete(F)
    D = F.check_divisor(D)
    m = _cartier_witnesses(F, D)
    for a, b in walls(F):
        for s, t in ((a, b), (b, a)):
            (rho,) = set(t) - set(s)
            if dot(m[s], F.rays[rho]) <= -D[rho]:
                return False
    return True


def dual_cone_generators(F: Fan, cone: Cone) -> list[list[int]]:
    """Primitive generators of the dual of a full-dimensional simplicial cone."""
    gens = []
    for i in cone:
        others = [list(F.rays[j]) for j in cone if j != i]
        (u,) = rational_nullspace(others, F.rank) if others else [[Fraction(1)]]
        u = primitive(u)
        if dot(u, F.rays[i]) < 0:
            u = [-x for x in u]
        gens.append(u)
    return gens


def hilbert_basis(generators: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Hilbert basis of the lattice points of a full-dimensional simplicial cone.

    Every irreducible element lies in the closed fundamental parallelepiped,
    so the parallelepiped points are enumerated and the reducible ones dropped.
    """
    d = len(generators)
    B = transpose([list(g) for g in generators])  # columns are generators
    aug = [row + [int(i == j) for j in range(d)] for i, row in enumerate(B)]
    R, _ = rref(aug, 2 * d)
    Binv = [row[d:] for row in R]
    lo = [sum(min(0, g[k]) for g in generators) for k in range(d)]
    hi = [sum(max(0, g[k]) for g in generators) for k in range(d)]
    pts = []
    for p in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if not any(p):
            continue
        t = [sum(r[k] * p[k] for k in range(d)) for r in Binv]
        if all(0 <= x <= 1 for x in t):
            pts.append(p)
    S = set(pts)
    out = []
    for p in pts:
        if not any(q != p and tuple(a - b for a, b in zip(p, q)) in S for q in pts):
            out.append(p)
    return sorted(out)


def is_very_ample(F: Fan, D: Divisor) -> bool:
    """Per maximal cone, P - m_sigma must contain the Hilbert basis of sigma^vee."""
    _require_complete(F)
    D = F.check_divisor(D)
    m = _cartier_witnesses(F, D)
    if not is_ample(F, D):
        return False
    pts = set(lattice_points(polytope_of_divisor(F, D)))
    for c in F.max_cones:
        shifted = {tuple(a - b for a, b in zip(p, m[c])) for p in pts}
        if any(h not in shifted for h in hilbert_basis(dual_cone_generators(F, c))):
            return False
    return True


# ---------------------------------------------------------------------------
# polyhedra


@dataclass(frozen=True)
class LatticePolyhedron:
    """{m : <m, normals[k]> >= bounds[k] for all k} in Q^rank."""

    rank: int
    normals: tuple[tuple[int, ...], ...]
    bounds: tuple[int, ...]

    def contains(self, m: Sequence) -> bool:
        return all(dot(m, a) >= b for a, b in zip(self.normals, self.bounds))

    def scaled(self, n: int) -> "LatticePolyhedron":
        return LatticePolyhedron(self.rank, self.normals, tuple(n * b for b in self.bounds))

    def is_bounded(self) -> bool:
        """The recession cone {y : A y >= 0} is zero."""
        A = [list(a) for a in self.normals]
        d = self.rank
        if d == 0:
            return True
        if rank(A, d) < d:
            return False
        for sub in itertools.combinations(range(len(A)), d - 1):
            rows = [A[i] for i in sub]
            ns = rational_nullspace(rows, d)
            if len(ns) != 1:
                continue
            y = ns[0]
            vals = [dot(a, y) for a in A]
            if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
                return False
        return True

    def vertices(self) -> list[tuple[Fraction, ...]]:
        d = self.rank
        if d == 0:
            return [()] if self.contains(()) else []
        A = [list(a) for a in self.normals]
        out = set()
        for sub in itertools.combinations(range(len(A)), d):
            rows = [A[i] for i in sub]
            x = rational_solve(rows, [self.bounds[i] for i in sub], d)
            if x is None or rational_nullspace(rows, d):
                continue
            if self.contains(x):
                out.add(tuple(x))
        return sorted(out)

    def to_json(self) -> dict:
        return {"rank": self.rank, "normals": [list(a) for a in self.normals],
                "bounds": list(self.bounds)}


def polytope_of_divisor(F: Fan, D: Divisor) -> LatticePolyhedron:
    D = F.check_divisor(D)
    return LatticePolyhedron(F.rank, F.rays, tuple(-c for c in D))


def lattice_points(P: LatticePolyhedron) -> list[tuple[int, ...]]:
    """All integer points of a bounded polyhedron, in lexicographic order."""
    if not P.is_bounded():
        raise UnsupportedCaseError("lattice point enumeration needs a bounded polyhedron")
    verts = P.vertices()
    if not verts:
        return []
    if P.rank == 0:
        return [()]
    ranges = []
    for k in range(P.rank):
        lo = math.ceil(min(v[k] for v in verts))
        hi = math.floor(max(v[k] for v in verts))
        ranges.append(range(lo, hi + 1))
    return [p for p in itertools.product(*ranges) if P.contains(p)]
