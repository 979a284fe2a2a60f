"""Checks on an assembled construction: smoothness of U, the G-action, and U/G versus X."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cox import build_cox, choose_generators
from .errors import FieldError
from .fan import Fan, class_group, lattice_points, local_class_group, polytope_of_divisor, singular_cones
from .intlinalg import dot, integer_kernel
from .lift import ConstructionResult, assemble_construction, embedded_pullback, pyramid_polytope
from .polyring import SparsePoly
from .sections import Section, certify_misses_Z, certify_sections, chart_certificate, pinned_choice, pullback


def verify_smooth_U(R: ConstructionResult, cuts: Optional[Sequence[SparsePoly]] = None,
                    budget: Optional[int] = None) -> bool:
    """U is smooth of codimension C on every chart of W and avoids the singular strata of W."""
    cuts = list(R.cuts if cuts is None else cuts)
    if not cuts:
        return True
    cox = R.cox_w
    if not all(chart_certificate(cox, c, cuts, budget=budget) for c in cox.fan.max_cones):
        return False
    return certify_misses_Z(cuts, cox, budget)


def verify_group_action(R: ConstructionResult, cuts: Optional[Sequence[SparsePoly]] = None) -> bool:
    """Each cut is semi-invariant for every factor of G, and G acts faithfully on W."""
    cuts = list(R.cuts if cuts is None else cuts)
    G = R.group
    for k, n in enumerate(G.orders):
        w = G.weights(k)
        for f in cuts:
            if len({dot(e, w) % n for e in f.terms}) > 1:
                return False
        # the character e_k^* pulls back to weight <e_k^*, sum w_rho rho> = 1 mod n
        rays = R.lifted.fan.rays
        pairing = [sum(w[r] * rays[r][j] for r in range(len(rays))) for j in range(R.lifted.fan.rank)]
        if n > 1 and all(p % n == 0 for p in pairing):
            return False
    return True


# ---------------------------------------------------------------------------
# finite-field sampling


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % p for p in range(2, int(q ** 0.5) + 1))


def check_sample_field(q: int, orders: Sequence[int]) -> None:
    if not _is_prime(q):
        raise FieldError(f"sampling field size {q} must be a prime")
    for n in orders:
        if (q - 1) % n:
            raise FieldError(f"q = {q} is not 1 mod {n}, so mu_{n}(F_q) is too small")


def _mod(c: Fraction, q: int) -> int:
    if c.denominator % q == 0:
        raise FieldError(f"coefficient {c} is not defined over F_{q}")
    return c.numerator * pow(c.denominator, -1, q) % q


def _eval_mod(f: SparsePoly, point: Sequence[int], q: int) -> int:
    total = 0
    for e, c in f.terms.items():
        t = _mod(Fraction(c), q)
        for x, k in zip(point, e):
            if k:
                t = t * pow(x, k, q) % q
        total = (total + t) % q
    return total


def _root_of_unity(n: int, q: int) -> int:
    for g in range(2, q):
        z = pow(g, (q - 1) // n, q)
        if all(pow(z, n // p, q) != 1 for p in range(2, n + 1) if n % p == 0 and _is_prime(p)):
            return z
    return 1


class _PointKeys:
    """W-points and X-points of Cox coordinates, keyed by torus-invariant data."""

    def __init__(self, R: ConstructionResult, q: int):
        self.R, self.q = R, q
        self.W = R.lifted.fan
        self.X = R.fan
        self.C = R.lifted.C
        self._perp: dict = {}
        self._inv: dict = {}

    def _basis(self, F: Fan, tau: tuple[int, ...]) -> list[list[int]]:
        key = (id(F), tau)
        if key not in self._perp:
            if tau:
                self._perp[key] = integer_kernel([list(F.rays[i]) for i in tau], F.rank)
            else:
                self._perp[key] = [[int(i == j) for j in range(F.rank)] for i in range(F.rank)]
        return self._perp[key]

    def _values(self, F: Fan, point: Sequence[int], ms: Sequence[Sequence[int]]) -> tuple[int, ...]:
        out = []
        for m in ms:
            v = 1
            for r, x in enumerate(point):
                k = dot(m, F.rays[r])
                if k:
                    v = v * pow(x, k, self.q) % self.q
            out.append(v)
        return tuple(out)

    @staticmethod
    def zeros(point: Sequence[int]) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(point) if x == 0)

    def w_key(self, p: Sequence[int]):
        tau = self.zeros(p)
        return tau, self._values(self.W, p, self._basis(self.W, tau))

    def invariant_key(self, p: Sequence[int]):
        tau = self.zeros(p)
        if tau not in self._inv:
            K = self._basis(self.W, tau)
            orders = self.R.group.orders
            # m = sum y_j K_j with <m, e_k> = 0 mod n_k
            rows = [[K[j][k] for j in range(len(K))] + [orders[k] * int(k == l) for l in range(self.C)]
                    for k in range(self.C)]
            sol = integer_kernel(rows, len(K) + self.C) if rows else \
                [[int(i == j) for j in range(len(K))] for i in range(len(K))]
            ms = [[sum(y[j] * K[j][t] for j in range(len(K))) for t in range(self.W.rank)] for y in sol]
            self._inv[tau] = ms
        return tau, self._values(self.W, p, self._inv[tau])

    def x_key(self, p: Sequence[int]):
        x = p[self.C:]
        tau = self.zeros(x)
        return tau, self._values(self.X, x, self._basis(self.X, tau))


@dataclass
class StratumReport:
    cone: tuple[int, ...]
    points: int = 0
    stack_groups: dict = field(default_factory=dict)
    g_stabilizers: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(g == "0" for g in self.stack_groups.values())

    def to_json(self) -> dict:
        return {"cone": list(self.cone), "points": self.points, "ok": self.ok,
                "stack_stabilizers": {k: v for k, v in sorted(self.stack_groups.items())},
                "g_stabilizer_orders": {str(k): v for k, v in sorted(self.g_stabilizers.items())}}


@dataclass
class SamplingReport:
    q: int
    group_order: int
    samples: int
    used: int = 0
    ramified: int = 0
    no_root: int = 0
    free_orbits: int = 0
    non_free: list = field(default_factory=list)
    fiber_mismatch: list = field(default_factory=list)
    invariant_mismatch: list = field(default_factory=list)
    injectivity_failures: list = field(default_factory=list)
    w_points: int = 0
    x_points: int = 0
    strata: list[StratumReport] = field(default_factory=list)

    @property
    def conservation(self) -> bool:
        return self.w_points == self.group_order * self.x_points

    @property
    def ok(self) -> bool:
        return (not self.non_free and not self.fiber_mismatch and not self.invariant_mismatch
                and not self.injectivity_failures and self.conservation
                and all(s.ok for s in self.strata))

    def to_json(self) -> dict:
        return {
            "q": self.q, "group_order": self.group_order, "samples": self.samples, "used": self.used,
            "skipped_ramified": self.ramified, "skipped_no_root": self.no_root,
            "free_orbits": self.free_orbits, "non_free_witnesses": self.non_free[:5],
            "fiber_mismatch_witnesses": self.fiber_mismatch[:5],
            "invariant_mismatch_witnesses": self.invariant_mismatch[:5],
            "injectivity_witnesses": self.injectivity_failures[:5],
            "distinct_W_points": self.w_points, "distinct_X_points": self.x_points,
            "conservation": self.conservation, "strata": [s.to_json() for s in self.strata],
            "ok": self.ok,
        }


def verify_quotient_sampling(R: ConstructionResult, q: int, samples: int = 200, seed: int = 0,
                             strata_samples: int = 20) -> SamplingReport:
    """Sample U over F_q and compare G-orbits with points of X.

    Generic samples take Cox coordinates x in the torus, solve u_k^n_k = s~_k(x)
    and collect every lift.  Stratum samples put x on each singular stratum of
    X and record the isotropy of the resulting point of W.
    """
    G = R.group
    check_sample_field(q, G.orders)
    rng = random.Random(seed)
    keys = _PointKeys(R, q)
    C, nx = R.lifted.C, R.fan.nrays
    zetas = [_root_of_unity(n, q) for n in G.orders]
    elements = list(itertools.product(*[range(n) for n in G.orders]))
    s_polys = [-(f.substitute({k: 0})) for k, f in enumerate(R.cuts)]
    roots_tables = {}
    for n in set(G.orders):
        table: dict = {}
        for r in range(1, q):
            table.setdefault(pow(r, n, q), []).append(r)
        roots_tables[n] = table
    report = SamplingReport(q, G.order, samples)

    def act(p, g):
        p = list(p)
        for k, j in enumerate(g):
            p[k] = p[k] * pow(zetas[k], j, q) % q
        return tuple(p)

    def lifts(x):
        point = [0] * C + list(x)
        options = []
        for k, n in enumerate(G.orders):
            s = _eval_mod(s_polys[k], point, q)
            options.append([0] if s == 0 else roots_tables[n].get(s, []))
        return [tuple(u) + tuple(x) for u in itertools.product(*options)], options

    w_all: set = set()
    x_to_inv: dict = {}
    inv_to_x: dict = {}
    for _ in range(samples):
        x = tuple(rng.randrange(1, q) for _ in range(nx))
        pts, options = lifts(x)
        if any(o == [0] for o in options):
            report.ramified += 1
            continue
        if not pts:
            report.no_root += 1
            continue
        report.used += 1
        p0 = pts[0]
        orbit = {keys.w_key(act(p0, g)) for g in elements}
        if len(orbit) == G.order:
            report.free_orbits += 1
        else:
            report.non_free.append(list(p0))
        fiber = {keys.w_key(p) for p in pts}
        if fiber != orbit:
            report.fiber_mismatch.append(list(p0))
        invs = {keys.invariant_key(act(p0, g)) for g in elements}
        if len(invs) != 1:
            report.invariant_mismatch.append(list(p0))
        inv, xk = invs.pop(), keys.x_key(p0)
        if x_to_inv.setdefault(xk, inv) != inv or inv_to_x.setdefault(inv, xk) != xk:
            report.injectivity_failures.append(list(p0))
        w_all |= fiber
    report.w_points, report.x_points = len(w_all), len(x_to_inv)

    W = R.lifted.fan
    for sigma in singular_cones(R.fan):
        st = StratumReport(sigma)
        for _ in range(strata_samples):
            x = tuple(0 if r in sigma else rng.randrange(1, q) for r in range(nx))
            pts, _ = lifts(x)
            for p in pts:
                st.points += 1
                tau = keys.zeros(p)
                if not W.is_cone(tau):
                    st.stack_groups[f"outside V_W at {list(tau)}"] = "?"
                    continue
                grp = str(local_class_group(W, tau))
                st.stack_groups[str(list(tau))] = grp
                orbit = {keys.w_key(act(p, g)) for g in elements}
                order = G.order // len(orbit)
                st.g_stabilizers[order] = st.g_stabilizers.get(order, 0) + 1
        report.strata.append(st)
    return report


# ---------------------------------------------------------------------------
# complete worked example

P112_BLOWUP_FAN = Fan(2, [(1, 0), (0, 1), (-1, 1), (-1, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)])
P112_BLOWUP_DIVISOR = (1, 1, 1, 0)
P112_BLOWUP_POINTS = {"a": (-2, -2), "b": (1, -1), "c": (-2, 2)}


def p112_blowup_sections(names: Sequence[str] = ("a", "b", "c")) -> list[Section]:
    pts = [P112_BLOWUP_POINTS[k] for k in names]
    return [Section(0, pts, [1] * len(pts))]


@dataclass
class ExampleReport:
    checks: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": dict(sorted(self.checks.items())), "failures": self.failures,
                "data": self.data}


def verify_example_p112_blowup(sections: Optional[Sequence[Section]] = None, field: int = 0,
                               budget: Optional[int] = None) -> ExampleReport:
    """Run the pinned blow-up example of P(1,1,2) and compare every datum."""
    if field != 0:
        raise FieldError("certification requires the exact field Q")
    F = P112_BLOWUP_FAN
    rep = ExampleReport()
    chk, data = rep.checks, rep.data

    cl = class_group(F)
    data["class_group"] = str(cl)
    chk["class_group_Z2"] = str(cl) == "Z^2"
    sing = singular_cones(F, maximal_only=True)
    data["singular_cones"] = [{"cone": list(c), "rays": [list(F.rays[i]) for i in c],
                               "local_class_group": str(local_class_group(F, c))} for c in sing]
    chk["one_singular_cone"] = sing == [(2, 3)] and str(local_class_group(F, (2, 3))) == "Z/2"

    gen = choose_generators(F, manual=[P112_BLOWUP_DIVISOR])[0]
    data["generator"] = gen.to_json()
    chk["n_equals_2"] = gen.n == 2

    P = polytope_of_divisor(F, gen.scaled)
    verts = sorted(tuple(int(v) for v in p) for p in P.vertices())
    pts = lattice_points(P)
    data["polytope_vertices"] = [list(v) for v in verts]
    data["polytope_points"] = len(pts)
    chk["polytope_vertices"] = verts == sorted([(-2, -2), (-2, 2), (1, -1), (0, -2)])
    chk["polytope_13_points"] = len(pts) == 13

    cox = build_cox(F)
    expected = {"a": (0, 0, 2, 4), "b": (3, 1, 0, 0), "c": (0, 4, 6, 0)}
    got = {}
    for k, m in P112_BLOWUP_POINTS.items():
        got[k] = list(pullback(cox, gen, Section(0, [m], [1])).terms)[0]
    data["pullbacks"] = {k: str(cox.ring.monomial(e)) for k, e in got.items()}
    chk["pullbacks"] = got == expected

    secs = list(sections) if sections is not None else p112_blowup_sections()
    choice = pinned_choice(F, [gen], [secs], budget)
    data["certificate"] = choice.certificate
    chk["sections_certified"] = choice.certified
    chk["misses_Z"] = all(choice.certificate["misses_Z"])

    R = assemble_construction(F, [gen], choice, require_certified=False)
    pyr = pyramid_polytope(R.lifted, 0, gen.n)
    ppts = pyr.points()
    data["pyramid_points"] = len(ppts)
    data["apex"] = list(pyr.apex)
    chk["pyramid_19_points"] = len(ppts) == 19
    chk["apex_height_2"] = pyr.apex[0] == 2 and [p for p in ppts if p[0] == 2] == [pyr.apex]

    ring = R.cox_w.ring
    u = ring.var(0)
    s_expected = sum((ring.monomial((0,) + expected[k]) for k in ("a", "b", "c")), ring.zero())
    cut = R.cuts[0]
    data["cut"] = str(cut)
    chk["cut_equation"] = cut == u ** 2 - s_expected and cut == u ** 2 - embedded_pullback(R, 0, 0)
    proj = R.projective
    data["projective_model"] = proj.to_json()
    chk["projective_form"] = proj.form_string() == "x0 - x[-2,-2] - x[-2,2] - x[1,-1]"
    chk["weights_chi_h"] = proj.weights == [h % 2 for h in proj.heights] and \
        sorted(p for p, w in zip(proj.points, proj.weights) if w == 1) == \
        sorted(p for p in proj.points if p[0] == 1) and sum(proj.weights) == 5

    data["group"] = R.group.to_json()
    chk["group_mu2"] = R.group.orders == [2]
    chk["group_action"] = verify_group_action(R)
    chk["smooth_U"] = verify_smooth_U(R, budget=budget)
    return rep


def recertify(R: ConstructionResult, budget: Optional[int] = None) -> dict:
    """Re-run the section certificates and the checks on U."""
    cox = build_cox(R.fan)
    cert = certify_sections(cox, R.generators, R.choice.sections, budget) if R.generators else \
        {"misses_Z": [], "smooth": True, "snc": True}
    out = {"sections": cert, "smooth_U": verify_smooth_U(R, budget=budget),
           "group_action": verify_group_action(R)}
    R.certificates.update(out)
    return out

