"""The lifted fan on Z^C + N, pyramid polytopes, cut equations and assembly of U.

Lattice coordinates on Z^C + N list the C new coordinates first.  The Cox
variables of W are ordered u_1..u_C (rays e_k) followed by x_1..x_n (lifted
rays), so base Cox polynomials embed by shifting their variables by C.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cox import CoxModel, Generator, TorusFactorSplit, build_cox, choose_generators, split_torus_factor
from .errors import PreconditionError, UnsupportedCaseError
from .fan import Fan, LatticePolyhedron, lattice_points, rays_span, require_valid
from .intlinalg import dot
from .polyring import SparsePoly
from .sections import Section, SectionChoice, pinned_choice, pullback, search_sections


@dataclass
class LiftedFan:
    base: Fan
    index: list[tuple[int, int]]
    lift_coeffs: list[tuple[int, ...]]
    fan: Fan

    @property
    def C(self) -> int:
        return len(self.index)

    def variable_names(self) -> list[str]:
        if self.C == 1:
            us = ["u"]
        else:
            us = [f"u{i + 1}_{j + 1}" for i, j in self.index]
        return us + [f"x{r + 1}" for r in range(self.base.nrays)]

    def to_json(self) -> dict:
        return {"fan": self.fan.to_json(), "index": [list(k) for k in self.index],
                "lift_coeffs": [list(c) for c in self.lift_coeffs]}


def build_lifted_fan(F: Fan, generators: Sequence[Generator], counts: Sequence[int]) -> LiftedFan:
    """Rays e_k and lambda_rho - sum_k c_{k,rho} e_k; cones {all e} + lifted sigma."""
    index = [(i, j) for i, c in enumerate(counts) for j in range(c)]
    coeffs = [tuple(generators[i].divisor) for i, _ in index]
    C = len(index)
    rays = [tuple(int(k == l) for l in range(C)) + (0,) * F.rank for k in range(C)]
    for r, lam in enumerate(F.rays):
        rays.append(tuple(-coeffs[k][r] for k in range(C)) + tuple(lam))
    cones = [tuple(range(C)) + tuple(C + r for r in c) for c in F.max_cones]
    fan = require_valid(Fan(C + F.rank, rays, cones))
    return LiftedFan(F, index, coeffs, fan)


@dataclass
class PyramidPolytope:
    index: int
    polyhedron: LatticePolyhedron
    apex: tuple[int, ...]
    height: int

    def points(self) -> list[tuple[int, ...]]:
        return lattice_points(self.polyhedron)


def pyramid_polytope(L: LiftedFan, k: int, n: int) -> PyramidPolytope:
    """Sections of p^* O(n D_k) not vanishing on the other D'_l: a pyramid of height n."""
    C = L.C
    c = L.lift_coeffs[k]
    normals, bounds = [], []
    for r in range(L.base.nrays):
        normals.append(L.fan.rays[C + r])
        bounds.append(-n * c[r])
    for l in range(C):
        e = tuple(int(l == t) for t in range(C)) + (0,) * L.base.rank
        if l == k:
            normals.append(e)
            bounds.append(0)
        else:
            normals.append(e)
            bounds.append(0)
            normals.append(tuple(-x for x in e))
            bounds.append(0)
    apex = tuple(n if l == k else 0 for l in range(C)) + (0,) * L.base.rank
    P = LatticePolyhedron(C + L.base.rank, tuple(normals), tuple(bounds))
    if not P.contains(apex):
        raise PreconditionError("apex outside the pyramid; divisor data inconsistent")
    return PyramidPolytope(k, P, apex, n)


def lattice_monomial(L: LiftedFan, k: int, n: int, x: Sequence[int]) -> tuple[int, ...]:
    """Cox exponents on W of the section chi^x of p^* O(n D_k)."""
    C = L.C
    c = L.lift_coeffs[k]
    us = tuple(x[:C])
    xs = tuple(dot(x, L.fan.rays[C + r]) + n * c[r] for r in range(L.base.nrays))
    exps = us + xs
    if any(e < 0 for e in exps):
        raise PreconditionError(f"lattice point {list(x)} outside the pyramid")
    return exps


def base_point(L: LiftedFan, m: Sequence[int]) -> tuple[int, ...]:
    return (0,) * L.C + tuple(m)


def cut_equation(L: LiftedFan, k: int, n: int, s: Section, cox_w: CoxModel) -> SparsePoly:
    """t_k - p^*(s) written in the Cox ring of W, i.e. u_k^n - s~(x)."""
    apex = tuple(n if l == k else 0 for l in range(L.C)) + (0,) * L.base.rank
    terms: dict = {lattice_monomial(L, k, n, apex): Fraction(1)}
    for m, c in s.support().items():
        e = lattice_monomial(L, k, n, base_point(L, m))
        terms[e] = terms.get(e, 0) - c
    return SparsePoly(cox_w.ring, terms)


@dataclass
class GroupData:
    """G = prod_k mu_{n_k}; factor k scales u_k with weight 1."""

    orders: list[int]
    nvars: int

    @property
    def order(self) -> int:
        out = 1
        for n in self.orders:
            out *= n
        return out

    def weights(self, k: int) -> tuple[int, ...]:
        return tuple(int(v == k) for v in range(self.nvars))

    def to_json(self) -> dict:
        return {"factors": [f"mu_{n}" for n in self.orders], "orders": list(self.orders),
                "order": self.order, "weights": [list(self.weights(k)) for k in range(len(self.orders))]}


@dataclass
class ProjectiveModel:
    """Lattice-point coordinates of the pyramid, the linear cut and mu_n weights."""

    points: list[tuple[int, ...]]
    apex: tuple[int, ...]
    form: dict[tuple[int, ...], Fraction]
    n: int

    @property
    def heights(self) -> list[int]:
        return [p[0] for p in self.points]

    @property
    def weights(self) -> list[int]:
        return [h % self.n for h in self.heights]

    def form_string(self) -> str:
        parts = []
        for p in sorted(self.form, key=lambda q: (q != self.apex, q)):
            c = self.form[p]
            name = "x0" if p == self.apex else f"x{list(p[1:])}".replace(" ", "")
            coef = "" if abs(c) == 1 else f"{abs(c)}*"
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {coef}{name}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else s

    def to_json(self) -> dict:
        return {
            "coordinates": len(self.points),
            "points": [list(p) for p in self.points],
            "heights": self.heights,
            "weights": self.weights,
            "apex": list(self.apex),
            "form": [[str(self.form[p]), list(p)] for p in sorted(self.form)],
            "form_string": self.form_string(),
        }


def projective_cut_model(L: LiftedFan, gen: Generator, s: Section) -> ProjectiveModel:
    if L.C != 1:
        raise UnsupportedCaseError("the projective model is only produced for a single cut (C = 1)")
    pyr = pyramid_polytope(L, 0, gen.n)
    pts = pyr.points()
    form = {pyr.apex: Fraction(1)}
    for m, c in s.support().items():
        form[base_point(L, m)] = -c
    return ProjectiveModel(pts, pyr.apex, form, gen.n)


# ---------------------------------------------------------------------------
# assembly


@dataclass
class ConstructionResult:
    fan: Fan
    choice: SectionChoice
    lifted: LiftedFan
    cox_w: CoxModel
    cuts: list[SparsePoly]
    group: GroupData
    projective: Optional[ProjectiveModel] = None
    split: Optional[TorusFactorSplit] = None
    original_fan: Optional[Fan] = None
    certificates: dict = field(default_factory=dict)

    @property
    def generators(self) -> list[Generator]:
        return self.choice.generators

    def cut_strings(self) -> list[str]:
        return [str(f) for f in self.cuts]

    def to_json(self) -> dict:
        out = {
            "fan": self.fan.to_json(),
            "choice": self.choice.to_json(),
            "lifted_fan": self.lifted.to_json(),
            "cox_W": self.cox_w.to_json(),
            "equations": [{"terms": f.to_json(), "string": str(f)} for f in self.cuts],
            "group": self.group.to_json(),
            "projective_model": self.projective.to_json() if self.projective else None,
            "torus_split": self.split.to_json() if self.split else None,
            "original_fan": self.original_fan.to_json() if self.original_fan else None,
            "certificates": self.certificates,
        }
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionResult":
        """Rebuild from the stored fan and section choice; equations are recomputed."""
        F = Fan.from_json(data["fan"])
        choice = SectionChoice.from_json(data["choice"])
        R = assemble_construction(F, choice.generators, choice, require_certified=False)
        if data.get("original_fan"):
            orig = Fan.from_json(data["original_fan"])
            R.original_fan = orig
            R.split = split_torus_factor(orig)
        stored = [SparsePoly.from_json(R.cox_w.ring, e["terms"]) for e in data.get("equations", [])]
        if stored and stored != R.cuts:
            raise PreconditionError("stored equations disagree with the recomputed construction")
        return R


def assemble_construction(F: Fan, generators: Sequence[Generator], choice: SectionChoice,
                          require_certified: bool = True) -> ConstructionResult:
    if require_certified and choice.sections and not choice.certified:
        raise PreconditionError(f"section choice is not certified: {choice.certificate}")
    L = build_lifted_fan(F, generators, choice.counts)
    cox_w = build_cox(L.fan, L.variable_names())
    cuts = []
    orders = []
    for k, (i, j) in enumerate(L.index):
        gen = generators[i]
        s = choice.sections[i][j]
        cuts.append(cut_equation(L, k, gen.n, s, cox_w))
        orders.append(gen.n)
    proj = None
    if L.C == 1:
        proj = projective_cut_model(L, generators[0], choice.sections[0][0])
    return ConstructionResult(F, choice, L, cox_w, cuts, GroupData(orders, cox_w.nvars), proj)


def embedded_pullback(R: ConstructionResult, i: int, j: int) -> SparsePoly:
    """p^*(s_{i,j}) computed in the Cox ring of X and embedded into that of W."""
    cox_x = build_cox(R.fan)
    s = pullback(cox_x, R.generators[i], R.choice.sections[i][j])
    C = R.lifted.C
    return s.embed(R.cox_w.ring, [C + r for r in range(R.fan.nrays)])


def construct(F: Fan, generators: Optional[Sequence[Sequence[int]]] = None,
              sections: Optional[Sequence[Sequence[Section]]] = None, seed: int = 0,
              coeff_range: int = 3, max_attempts: int = 50,
              budget: Optional[int] = None) -> ConstructionResult:
    """Full pipeline: generators, certified sections, lifted fan and cuts."""
    require_valid(F)
    original, split = None, None
    if not rays_span(F):
        split = split_torus_factor(F)
        original, F = F, split.factor_fan
    gens = choose_generators(F, manual=generators)
    if sections is not None:
        choice = pinned_choice(F, gens, sections, budget)
    elif gens:
        choice = search_sections(F, gens, seed=seed, coeff_range=coeff_range,
                                 max_attempts=max_attempts, budget=budget)
    else:
        choice = SectionChoice([], [], {"misses_Z": [], "smooth": True, "snc": True}, seed, 0)
    R = assemble_construction(F, gens, choice)
    R.split, R.original_fan = split, original
    return R
