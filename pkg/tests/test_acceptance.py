"""Acceptance criteria, one printed PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import itertools
import json
import random
import time

from toricquot.cli import build_parser, config_from_args, run
from toricquot.cox import Generator, build_cox, check_generation
from toricquot.fan import Fan, LatticePolyhedron, lattice_points, prime_divisor
from toricquot.intlinalg import determinant, matmul, smith_normal_form
from toricquot.lift import construct
from toricquot.polyring import PolyRing, SparsePoly, contains_one
from toricquot.sections import certify_sections, search_sections
from toricquot.verify import (
    P112_BLOWUP_FAN,
    p112_blowup_sections,
    verify_group_action,
    verify_quotient_sampling,
    verify_smooth_U,
)

RESULTS: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, detail


def test_criterion_1_worked_example():
    t = time.time()
    code, report, _ = run(config_from_args(build_parser().parse_args(["demo", "p112-blowup"])))
    report = json.loads(json.dumps(report, sort_keys=True, default=str))["result"]
    elapsed = time.time() - t
    d = report["data"]
    ok = (code == 0 and report["ok"] and elapsed < 60
          and d["class_group"] == "Z^2"
          and [c["rays"] for c in d["singular_cones"]] == [[[-1, 1], [-1, -1]]]
          and d["singular_cones"][0]["local_class_group"] == "Z/2"
          and d["generator"] == {"divisor": [1, 1, 1, 0], "n": 2}
          and sorted(map(tuple, d["polytope_vertices"])) == [(-2, -2), (-2, 2), (0, -2), (1, -1)]
          and d["polytope_points"] == 13 and d["pyramid_points"] == 19 and d["apex"][0] == 2
          and d["pullbacks"] == {"a": "x3^2*x4^4", "b": "x1^3*x2", "c": "x2^4*x3^6"}
          and d["cut"] == "-x2^4*x3^6 - x3^2*x4^4 - x1^3*x2 + u^2"
          and d["projective_model"]["form_string"] == "x0 - x[-2,-2] - x[-2,2] - x[1,-1]"
          and d["group"]["orders"] == [2]
          and report["checks"]["weights_chi_h"] and report["checks"]["smooth_U"])
    record(1, ok, f"worked example reproduced exactly in {elapsed:.2f}s "
                  f"({len(report['checks'])} checks, failures {report['failures']})")


def _smooth_fans():
    yield Fan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
    yield Fan(2, [(1, 0), (0, 1), (-1, 0), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])
    yield Fan(2, [(1, 0), (0, 1), (-1, 1), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])
    yield Fan(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)],
              [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def test_criterion_2_generation_criterion():
    F = P112_BLOWUP_FAN
    primes = [prime_divisor(F, i) for i in range(F.nrays)]
    ok = (bool(check_generation(F, [(1, 1, 1, 0)])) and bool(check_generation(F, primes))
          and not check_generation(F, []))
    checked = 0
    for S in _smooth_fans():
        ps = [prime_divisor(S, i) for i in range(S.nrays)]
        for k in range(len(ps) + 1):
            for sub in itertools.combinations(ps, k):
                ok = ok and bool(check_generation(S, list(sub)))
                checked += 1
        ok = ok and bool(check_generation(S, [(3, -1) + (0,) * (S.nrays - 2)]))
    record(2, ok, f"blow-up fan: [D] and all primes pass, empty fails; {checked} lists on smooth fans pass")


def test_criterion_3_smith_normal_form():
    rng = random.Random(2024)
    t = time.time()
    bad = 0
    for _ in range(1000):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = [[rng.randint(-20, 20) for _ in range(n)] for _ in range(m)]
        s = smith_normal_form(A)
        d = [x for x in s.diagonal if x]
        good = (matmul(matmul(s.U, A), s.V) == s.D and abs(determinant(s.U)) == 1
                and abs(determinant(s.V)) == 1
                and all(s.D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
                and all(x > 0 for x in d) and s.diagonal[:len(d)] == d
                and all(b % a == 0 for a, b in zip(d, d[1:])))
        bad += not good
    elapsed = time.time() - t
    record(3, bad == 0 and elapsed < 10, f"1000 random matrices, {bad} failures, {elapsed:.2f}s")


def _random_polyhedron(rng):
    d = rng.choice([2, 3])
    R = rng.randint(1, 4)
    normals = [tuple(s * int(i == j) for j in range(d)) for i in range(d) for s in (1, -1)]
    bounds = [-rng.randint(0, R) for _ in normals]
    for _ in range(rng.randint(0, 4)):
        a = tuple(rng.randint(-3, 3) for _ in range(d))
        if any(a):
            normals.append(a)
            bounds.append(rng.randint(-8, 1))
    return LatticePolyhedron(d, tuple(normals), tuple(bounds)), R


def test_criterion_4_lattice_points():
    rng = random.Random(7)
    bad = 0
    for _ in range(500):
        P, R = _random_polyhedron(rng)
        box = sorted(p for p in itertools.product(range(-R - 1, R + 2), repeat=P.rank) if P.contains(p))
        bad += lattice_points(P) != box
    record(4, bad == 0, f"500 random bounded polyhedra in dimensions 2 and 3, {bad} mismatches")


def test_criterion_5_groebner_oracle():
    rng = random.Random(11)
    bad = with_points = 0
    for _ in range(200):
        p = rng.choice([3, 5, 7])
        n = rng.randint(1, 3)
        ring = PolyRing(n, modulus=p)
        polys = []
        for _ in range(rng.randint(1, 3)):
            terms = {tuple(rng.randint(0, 2) for _ in range(n)): rng.randint(1, p - 1)
                     for _ in range(rng.randint(1, 3))}
            polys.append(SparsePoly(ring, terms))
        point = any(all(f.evaluate(x) == 0 for f in polys) for x in itertools.product(range(p), repeat=n))
        if point:
            with_points += 1
            bad += contains_one(polys)
    record(5, bad == 0, f"200 random ideals over F_p, {with_points} with rational points, {bad} inconsistent")


def test_criterion_6_seeded_search():
    F = P112_BLOWUP_FAN
    gen = Generator((1, 1, 1, 0), 2)
    t = time.time()
    choice = search_sections(F, [gen], seed=0, coeff_range=3, max_attempts=50)
    cert = certify_sections(build_cox(F), [gen], choice.sections)
    elapsed = time.time() - t
    ok = (choice.attempts <= 50 and cert["smooth"] and cert["snc"] and all(cert["misses_Z"])
          and elapsed < 300)
    record(6, ok, f"certified after {choice.attempts} attempt(s), re-certified {cert}, {elapsed:.2f}s")


def test_criterion_7_quotient_sampling():
    R = construct(P112_BLOWUP_FAN, [(1, 1, 1, 0)], [p112_blowup_sections()])
    rep = verify_quotient_sampling(R, 5, 200, seed=0)
    ok = rep.used > 0 and rep.free_orbits == rep.used and rep.group_order == 2 and rep.conservation and rep.ok
    record(7, ok, f"F_5, 200 samples: {rep.free_orbits}/{rep.used} orbits free of size 2, "
                  f"{rep.w_points} points of U over {rep.x_points} points of X")


def test_criterion_8_weighted_projective_plane():
    F = Fan(2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (1, 2), (0, 2)])
    R = construct(F, seed=0)
    order = R.group.order
    two_group = order > 1 and order & (order - 1) == 0
    samp = verify_quotient_sampling(R, 5, 200)
    ok = two_group and verify_smooth_U(R) and verify_group_action(R) and R.choice.certified and samp.ok
    record(8, ok, f"P(1,1,2): G of order {order}, cut {R.cut_strings()}, sampling ok {samp.ok}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(RESULTS))
