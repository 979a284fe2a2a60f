"""Cox construction: graded variables, chart monomials and divisor generation."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import PreconditionError, TorusFactorError, UnsupportedCaseError
from .fan import (
    Cone,
    Fan,
    cartier_index,
    class_group,
    is_ample,
    is_complete,
    is_very_ample,
    lattice_points,
    local_class_group,
    polytope_of_divisor,
    prime_divisor,
    rays_span,
    require_valid,
)
from .intlinalg import (
    AbGroupPresentation,
    cokernel,
    dot,
    integer_solve,
    lcm,
    rank,
    saturated_basis,
    subgroup_generates,
)
from .polyring import PolyRing, SparsePoly

log = logging.getLogger(__name__)


@dataclass
class CoxModel:
    """Polynomial ring with one variable per ray, graded by Cl(X)."""

    fan: Fan
    grading: AbGroupPresentation
    chart_monomials: dict[Cone, tuple[int, ...]]
    ring: PolyRing

    @property
    def nvars(self) -> int:
        return self.fan.nrays

    def degree(self, exps: Sequence[int]) -> tuple[int, ...]:
        return self.grading.image(exps)

    def is_homogeneous(self, p: SparsePoly) -> bool:
        return len({self.degree(e) for e in p.terms}) <= 1

    def chart_monomial(self, cone: Cone) -> SparsePoly:
        return self.ring.monomial(self.chart_monomials[cone])

    def chart_slice(self, cone: Cone) -> tuple[list[int], list[int]]:
        """Split the variables outside ``cone`` into (set to 1, kept invertible).

        The classes of the first group are independent in Cl(X) (x) Q, so the
        torus of H moves every point of the chart into the slice where those
        variables equal 1.  For H-stable loci, emptiness and smoothness on the
        chart can therefore be decided on the slice.
        """
        fixed, kept = [], []
        chosen: list[list[int]] = []
        for rho in range(self.nvars):
            if rho in cone:
                continue
            cls = list(self.degree(prime_divisor(self.fan, rho))[: self.grading.free_rank])
            if rank(chosen + [cls], self.grading.free_rank) > len(chosen):
                chosen.append(cls)
                fixed.append(rho)
            else:
                kept.append(rho)
        return fixed, kept

    def to_json(self) -> dict:
        return {
            "variables": list(self.ring.names),
            "class_group": self.grading.to_json(),
            "variable_degrees": [list(self.degree(prime_divisor(self.fan, i))) for i in range(self.nvars)],
            "chart_monomials": [{"cone": list(c), "monomial": list(e)}
                                for c, e in self.chart_monomials.items()],
        }


def build_cox(F: Fan, names: Optional[Sequence[str]] = None) -> CoxModel:
    require_valid(F)
    if not rays_span(F):
        raise TorusFactorError("fan has a torus factor; split it with split_torus_factor")
    grading = class_group(F)
    charts = {c: tuple(int(i not in c) for i in range(F.nrays)) for c in F.max_cones}
    ring = PolyRing(F.nrays, 0, names or [f"x{i + 1}" for i in range(F.nrays)])
    return CoxModel(F, grading, charts, ring)


@dataclass(frozen=True)
class TorusFactorSplit:
    """N = N' + complement, with N' the saturated span of the rays."""

    basis: tuple[tuple[int, ...], ...]
    complement: tuple[tuple[int, ...], ...]
    factor_fan: Fan

    @property
    def torus_rank(self) -> int:
        return len(self.complement)

    def to_json(self) -> dict:
        return {"basis": [list(b) for b in self.basis], "complement": [list(c) for c in self.complement],
                "factor_fan": self.factor_fan.to_json()}


def split_torus_factor(F: Fan) -> TorusFactorSplit:
    basis, complement = saturated_basis(F.ray_matrix(), F.rank)
    r = len(basis)
    # coordinates of each ray in the chosen basis of N'
    B = [[basis[k][j] for k in range(r)] for j in range(F.rank)]
    rays = []
    for v in F.rays:
        coords = integer_solve(B, list(v), r)
        if coords is None:
            raise AssertionError("ray outside its own saturated span")
        rays.append(tuple(coords))
    cones = F.max_cones if F.max_cones else ((),)
    return TorusFactorSplit(tuple(map(tuple, basis)), tuple(map(tuple, complement)), Fan(r, rays, cones))


def section_pullback(F: Fan, D: Sequence[int], m: Sequence[int]) -> tuple[int, ...]:
    """Exponents <m, ray> + c_ray of the Cox monomial of the section chi^m."""
    D = F.check_divisor(D)
    exps = tuple(dot(m, r) + c for r, c in zip(F.rays, D))
    if any(e < 0 for e in exps):
        raise PreconditionError(f"lattice point {list(m)} lies outside the polytope of {list(D)}")
    return exps


# ---------------------------------------------------------------------------
# generation criteria


@dataclass
class ConeGeneration:
    cone: Cone
    group: AbGroupPresentation
    generated: bool

    def to_json(self, F: Fan) -> dict:
        return {"cone": list(self.cone), "rays": [list(F.rays[i]) for i in self.cone],
                "local_class_group": str(self.group), "generated": self.generated}


@dataclass
class GenerationReport:
    ok: bool
    cones: list[ConeGeneration] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    @property
    def failing(self) -> list[Cone]:
        return [c.cone for c in self.cones if not c.generated]


def check_generation(F: Fan, divisors: Sequence[Sequence[int]]) -> GenerationReport:
    """Do the divisors generate Cl(U_sigma) for every maximal cone sigma?"""
    divisors = [F.check_divisor(D) for D in divisors]
    rows = []
    for c in F.max_cones:
        G = local_class_group(F, c)
        gen = subgroup_generates([[D[i] for i in c] for D in divisors], G)
        rows.append(ConeGeneration(c, G, gen))
    return GenerationReport(all(r.generated for r in rows), rows)


def _local_product(F: Fan):
    groups = [(c, local_class_group(F, c)) for c in F.max_cones]
    torsion = [d for _, G in groups for d in G.torsion]

    def image(D):
        out = []
        for c, G in groups:
            out.extend(G.image([D[i] for i in c]))
        return out

    return torsion, image


def check_global_generation(F: Fan, divisors: Sequence[Sequence[int]]) -> bool:
    """Do the divisors generate Cl(X)/CaCl(X)?

    Cartier divisors are exactly the kernel of Z^rays -> prod Cl(U_sigma), so
    Cl(X)/CaCl(X) is the image of Z^rays in that finite product.
    """
    divisors = [F.check_divisor(D) for D in divisors]
    torsion, image = _local_product(F)
    if not torsion:
        return True
    rel = [[d if j == k else 0 for j in range(len(torsion))] for k, d in enumerate(torsion)]
    sub = cokernel([image(D) for D in divisors] + rel, len(torsion)).order
    full = cokernel([image(prime_divisor(F, i)) for i in range(F.nrays)] + rel, len(torsion)).order
    return sub == full


# ---------------------------------------------------------------------------
# choosing generators


@dataclass(frozen=True)
class Generator:
    """A Weil divisor D_i together with n_i such that n_i D_i is very ample."""

    divisor: tuple[int, ...]
    n: int

    @property
    def scaled(self) -> tuple[int, ...]:
        return tuple(self.n * c for c in self.divisor)

    def to_json(self) -> dict:
        return {"divisor": list(self.divisor), "n": self.n}

    @classmethod
    def from_json(cls, data: dict) -> "Generator":
        return cls(tuple(data["divisor"]), int(data["n"]))


def find_ample_divisor(F: Fan) -> tuple[int, ...]:
    """A Cartier ample divisor on a complete fan, or UnsupportedCaseError.

    Solves the strict-convexity LP with margin 1, rationalises the vertex and
    confirms ampleness exactly; falls back to a small exhaustive search.
    """
    from scipy.optimize import linprog

    if not is_complete(F):
        raise UnsupportedCaseError("automatic ample divisor search needs a complete fan")
    n, d = F.nrays, F.rank
    cones = list(F.max_cones)
    nv = n + d * len(cones)
    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    for k, c in enumerate(cones):
        for rho in range(n):
            row = [0.0] * nv
            row[rho] = 1.0
            for j in range(d):
                row[n + d * k + j] = F.rays[rho][j]
            if rho in c:
                A_eq.append(row)
                b_eq.append(0.0)
            else:
                A_ub.append([-x for x in row])
                b_ub.append(-1.0)
    for j in range(d):  # gauge: m on the first cone is zero
        row = [0.0] * nv
        row[n + j] = 1.0
        A_eq.append(row)
        b_eq.append(0.0)
    res = linprog([1.0] * n + [0.0] * (nv - n), A_ub=A_ub or None, b_ub=b_ub or None,
                  A_eq=A_eq, b_eq=b_eq, bounds=[(None, None)] * nv, method="highs")
    candidates = []
    if res.status == 0:
        fr = [Fraction(x).limit_denominator(1000) for x in res.x[:n]]
        den = 1
        for x in fr:
            den = lcm(den, x.denominator)
        c = tuple(int(x * den) for x in fr)
        candidates.append(c)
    for cand in candidates:
        k = cartier_index(F, cand)
        A = tuple(k * x for x in cand)
        if is_ample(F, A):
            return A
    for bound in range(1, 5):
        for c in itertools.product(range(bound + 1), repeat=n):
            if max(c) != bound:
                continue
            k = cartier_index(F, c)
            A = tuple(k * x for x in c)
            if is_ample(F, A):
                return A
    raise UnsupportedCaseError("no ample divisor found; the fan does not look projective")


def choose_generators(F: Fan, manual: Optional[Sequence[Sequence[int]]] = None,
                      max_twist: int = 50, max_total: Optional[int] = None) -> list[Generator]:
    """Divisors generating every local class group, with very ample multiples.

    Manual lists are only verified.  Automatic mode starts from all prime
    divisors, drops them greedily while generation holds, then replaces each
    survivor by a small effective divisor with the same local classes whose
    Cartier multiple is very ample, falling back to twisting by an ample one.
    """
    require_valid(F)
    if max_total is None:
        max_total = 2 * F.nrays
    if manual is not None:
        divisors = [F.check_divisor(D) for D in manual]
        rep = check_generation(F, divisors)
        if not rep:
            raise PreconditionError(f"divisors do not generate the local class groups at cones {rep.failing}")
        out = []
        for D in divisors:
            n = cartier_index(F, D)
            nD = tuple(n * c for c in D)
            if not is_complete(F):
                log.warning("fan is not complete; very ampleness of %s is assumed", list(nD))
            elif not is_very_ample(F, nD):
                raise PreconditionError(f"{n}*{list(D)} is not very ample")
            out.append(Generator(D, n))
        return out

    chosen = [prime_divisor(F, i) for i in range(F.nrays)]
    for i in range(F.nrays):
        trial = [D for D in chosen if D != prime_divisor(F, i)]
        if check_generation(F, trial):
            chosen = trial
    if not chosen:
        return []
    if not is_complete(F):
        raise UnsupportedCaseError("automatic generator choice needs a complete fan; pass generators manually")
    out = []
    for D in chosen:
        g = _small_replacement(F, D, max_total) or _twisted(F, D, max_twist)
        out.append(g)
    return out


def _very_ample_generator(F: Fan, D: Sequence[int]) -> Optional[Generator]:
    n = cartier_index(F, D)
    nD = tuple(n * c for c in D)
    if is_ample(F, nD) and is_very_ample(F, nD):
        return Generator(tuple(D), n)
    return None


def _small_replacement(F: Fan, D: Sequence[int], max_total: int) -> Optional[Generator]:
    """Effective E with the local classes of D and the fewest sections of n E.

    Candidates are scanned by total degree; the first degree with any very
    ample multiple wins, ties broken by the number of lattice points.
    """
    groups = [(c, local_class_group(F, c)) for c in F.max_cones]

    def images(E):
        return tuple(G.image([E[i] for i in c]) for c, G in groups)

    target = images(D)
    for total in range(1, max_total + 1):
        best = None
        for E in _compositions(total, F.nrays):
            if images(E) != target:
                continue
            g = _very_ample_generator(F, E)
            if g is None:
                continue
            size = len(lattice_points(polytope_of_divisor(F, g.scaled)))
            if best is None or size < best[0]:
                best = (size, g)
        if best:
            return best[1]
    return None


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _twisted(F: Fan, D: Sequence[int], max_twist: int) -> Generator:
    A = find_ample_divisor(F)
    for k in range(max_twist + 1):
        g = _very_ample_generator(F, tuple(a + k * b for a, b in zip(D, A)))
        if g is not None:
            return g
    raise UnsupportedCaseError(f"no twist up to {max_twist} made {list(D)} very ample")
