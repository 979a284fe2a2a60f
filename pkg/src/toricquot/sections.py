"""Sections of O(n_i D_i) and their exact certification on the Cox open set V."""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cox import CoxModel, Generator, build_cox, section_pullback
from .errors import PreconditionError, SearchFailure
from .fan import Cone, Fan, lattice_points, polytope_of_divisor, singular_cones
from .polyring import SparsePoly, jacobian_minors, localized_contains_one

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Section:
    """sum coeffs[k] * chi^points[k], a section of O(n_i D_i)."""

    divisor_index: int
    points: tuple[tuple[int, ...], ...]
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(p) for p in self.points))
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if len(self.points) != len(self.coeffs):
            raise PreconditionError("section needs one coefficient per lattice point")
        if not any(self.coeffs):
            raise PreconditionError("the zero section is not allowed")

    def support(self) -> dict[tuple[int, ...], Fraction]:
        return {p: c for p, c in zip(self.points, self.coeffs) if c}

    def to_json(self) -> dict:
        return {"divisor_index": self.divisor_index, "points": [list(p) for p in self.points],
                "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "Section":
        return cls(int(data["divisor_index"]), data["points"], [Fraction(c) for c in data["coeffs"]])


def pullback(cox: CoxModel, gen: Generator, s: Section) -> SparsePoly:
    """The Cox polynomial of s: the same combination of section monomials."""
    terms: dict = {}
    for m, c in s.support().items():
        e = section_pullback(cox.fan, gen.scaled, m)
        terms[e] = terms.get(e, 0) + c
    return SparsePoly(cox.ring, terms)


# ---------------------------------------------------------------------------
# certificates


def chart_certificate(cox: CoxModel, cone: Cone, polys: Sequence[SparsePoly],
                      vanish: Sequence[int] = (), jacobian: bool = True,
                      budget: Optional[int] = None) -> bool:
    """Exact Groebner test on the chart {x^cone-hat != 0} of V.

    With ``jacobian`` the question is whether V(polys) is smooth of
    codimension len(polys) there; otherwise whether V(polys, x_vanish) is
    empty there.  Homogeneous inputs are tested on a slice of the chart.
    """
    polys = list(polys)
    if jacobian and not polys:
        return True
    ring = cox.ring
    outside = [r for r in range(cox.nvars) if r not in cone]
    if all(cox.is_homogeneous(p) for p in polys):
        fixed, kept = cox.chart_slice(cone)
    else:
        fixed, kept = [], outside
    sub = {r: 1 for r in fixed}
    P = [p.substitute(sub) for p in polys]
    ideal = P + [ring.var(r) for r in vanish]
    if jacobian:
        live = [v for v in range(cox.nvars) if v not in fixed]
        ideal += jacobian_minors(P, live)
    g = ring.one()
    for r in kept:
        g = g * ring.var(r)
    return localized_contains_one(ideal, g, budget)


def certify_smooth_on_V(polys: Sequence[SparsePoly], cox: CoxModel, budget: Optional[int] = None) -> bool:
    """V(polys) is smooth of codimension len(polys) on every chart of V."""
    return all(chart_certificate(cox, c, polys, budget=budget) for c in cox.fan.max_cones)


def certify_snc_on_V(polys: Sequence[SparsePoly], cox: CoxModel, budget: Optional[int] = None) -> bool:
    """Every nonempty sub-intersection is smooth of the expected codimension (or empty)."""
    for k in range(1, len(polys) + 1):
        for sub in itertools.combinations(polys, k):
            if not certify_smooth_on_V(list(sub), cox, budget):
                return False
    return True


def certify_misses_Z(polys: Sequence[SparsePoly], cox: CoxModel, budget: Optional[int] = None) -> bool:
    """The common zero locus avoids every stratum with nontrivial local class group."""
    F = cox.fan
    for sigma in singular_cones(F):
        for tau in F.max_cones:
            if set(sigma) <= set(tau):
                if not chart_certificate(cox, tau, polys, vanish=sigma, jacobian=False, budget=budget):
                    return False
    return True


# ---------------------------------------------------------------------------
# section choices


@dataclass
class SectionChoice:
    generators: list[Generator]
    sections: list[list[Section]]
    certificate: dict = field(default_factory=dict)
    seed: Optional[int] = None
    attempts: int = 0

    @property
    def counts(self) -> list[int]:
        return [len(s) for s in self.sections]

    @property
    def certified(self) -> bool:
        c = self.certificate
        return bool(c) and c.get("smooth") is True and c.get("snc") is True and all(c.get("misses_Z", [False]))

    def flat(self) -> list[tuple[int, int, Section]]:
        return [(i, j, s) for i, row in enumerate(self.sections) for j, s in enumerate(row)]

    def to_json(self) -> dict:
        return {
            "generators": [g.to_json() for g in self.generators],
            "sections": [[s.to_json() for s in row] for row in self.sections],
            "counts": self.counts,
            "certificate": self.certificate,
            "seed": self.seed,
            "attempts": self.attempts,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SectionChoice":
        return cls([Generator.from_json(g) for g in data["generators"]],
                   [[Section.from_json(s) for s in row] for row in data["sections"]],
                   dict(data.get("certificate", {})), data.get("seed"), int(data.get("attempts", 0)))


def certify_sections(cox: CoxModel, generators: Sequence[Generator],
                     sections: Sequence[Sequence[Section]], budget: Optional[int] = None) -> dict:
    """Run all three certificates; cheap disjointness checks first."""
    grouped = [[pullback(cox, generators[i], s) for s in row] for i, row in enumerate(sections)]
    cert: dict = {"misses_Z": [certify_misses_Z(polys, cox, budget) for polys in grouped]}
    flat = [p for row in grouped for p in row]
    cert["smooth"] = all(certify_smooth_on_V([p], cox, budget) for p in flat)
    cert["snc"] = cert["smooth"] and certify_snc_on_V(flat, cox, budget)
    return cert


def pinned_choice(F: Fan, generators: Sequence[Generator], sections: Sequence[Sequence[Section]],
                  budget: Optional[int] = None) -> SectionChoice:
    """Certify user-supplied sections without any randomness."""
    cox = build_cox(F)
    choice = SectionChoice(list(generators), [list(r) for r in sections])
    choice.certificate = certify_sections(cox, generators, sections, budget)
    return choice


def search_sections(F: Fan, generators: Sequence[Generator], seed: int = 0, coeff_range: int = 3,
                    max_attempts: int = 50, patience: int = 2,
                    budget: Optional[int] = None) -> SectionChoice:
    """Seeded random search for certified sections.

    Each c_i starts at 1 and grows (up to dim + 1) after ``patience``
    consecutive draws whose common zero locus meets the singular strata.
    """
    cox = build_cox(F)
    rng = random.Random(seed)
    points = [lattice_points(polytope_of_divisor(F, g.scaled)) for g in generators]
    counts = [1] * len(generators)
    misses_streak = [0] * len(generators)
    cap = F.rank + 1
    last: dict = {}

    def draw(i: int) -> Section:
        while True:
            coeffs = [rng.randint(-coeff_range, coeff_range) for _ in points[i]]
            if any(coeffs):
                return Section(i, points[i], coeffs)

    for attempt in range(1, max_attempts + 1):
        sections = [[draw(i) for _ in range(counts[i])] for i in range(len(generators))]
        grouped = [[pullback(cox, generators[i], s) for s in row] for i, row in enumerate(sections)]
        misses = [certify_misses_Z(polys, cox, budget) for polys in grouped]
        last = {"misses_Z": misses, "counts": list(counts)}
        if not all(misses):
            for i, ok in enumerate(misses):
                if ok:
                    misses_streak[i] = 0
                    continue
                misses_streak[i] += 1
                if misses_streak[i] >= patience and counts[i] < cap:
                    counts[i] += 1
                    misses_streak[i] = 0
            log.debug("attempt %d: common zeros meet the singular locus", attempt)
            continue
        flat = [p for row in grouped for p in row]
        last["smooth"] = all(certify_smooth_on_V([p], cox, budget) for p in flat)
        last["snc"] = last["smooth"] and certify_snc_on_V(flat, cox, budget)
        if last["smooth"] and last["snc"]:
            cert = {"misses_Z": misses, "smooth": True, "snc": True}
            return SectionChoice(list(generators), sections, cert, seed, attempt)
        log.debug("attempt %d: smoothness or normal crossings failed", attempt)
    raise SearchFailure(f"no certified sections after {max_attempts} attempts", last)
