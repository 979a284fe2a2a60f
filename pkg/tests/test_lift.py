import json
import random

import pytest

from toricquot.cox import Generator
from toricquot.errors import PreconditionError, UnsupportedCaseError
from toricquot.fan import Fan, lattice_points, polytope_of_divisor, validate_fan
from toricquot.lift import (
    ConstructionResult,
    assemble_construction,
    build_lifted_fan,
    construct,
    embedded_pullback,
    lattice_monomial,
    projective_cut_model,
    pyramid_polytope,
)
from toricquot.sections import Section, pinned_choice
from toricquot.verify import verify_group_action

GEN = Generator((1, 1, 1, 0), 2)


@pytest.fixture
def blowup(blowup_fan, blowup_sections):
    return construct(blowup_fan, [GEN.divisor], [blowup_sections])


def test_lifted_fan(blowup_fan):
    L = build_lifted_fan(blowup_fan, [GEN], [1])
    assert L.fan.rank == 3
    assert L.fan.rays == ((1, 0, 0), (-1, 1, 0), (-1, 0, 1), (-1, -1, 1), (0, -1, -1))
    assert validate_fan(L.fan).ok
    for r, lam in enumerate(blowup_fan.rays):
        assert L.fan.rays[L.C + r][L.C:] == lam


def test_pyramid(blowup_fan):
    L = build_lifted_fan(blowup_fan, [GEN], [1])
    pyr = pyramid_polytope(L, 0, 2)
    pts = pyr.points()
    assert len(pts) == 19 and pyr.apex == (2, 0, 0)
    assert [p for p in pts if p[0] == 2] == [(2, 0, 0)]
    assert sorted(p[1:] for p in pts if p[0] == 0) == lattice_points(polytope_of_divisor(blowup_fan, (2, 2, 2, 0)))
    assert sum(1 for p in pts if p[0] == 1) == 5


def test_cut_equation(blowup):
    (f,) = blowup.cuts
    assert str(f) == "-x2^4*x3^6 - x3^2*x4^4 - x1^3*x2 + u^2"
    u = blowup.cox_w.ring.var(0)
    assert f == u ** 2 - embedded_pullback(blowup, 0, 0)
    assert blowup.group.orders == [2]


def test_projective_model_matches_cox_form(blowup):
    proj = blowup.projective
    assert proj.form_string() == "x0 - x[-2,-2] - x[-2,2] - x[1,-1]"
    assert proj.weights.count(1) == 5 and proj.weights[proj.points.index(proj.apex)] == 0
    ring = blowup.cox_w.ring
    sub = ring.zero()
    for p, c in proj.form.items():
        sub = sub + ring.monomial(lattice_monomial(blowup.lifted, 0, 2, p), c)
    assert sub == blowup.cuts[0]


def test_json_round_trip(blowup):
    data = json.loads(json.dumps(blowup.to_json(), sort_keys=True))
    again = ConstructionResult.from_json(data)
    assert again.cuts == blowup.cuts
    data["equations"][0]["terms"][0][1] = "5"
    with pytest.raises(PreconditionError):
        ConstructionResult.from_json(data)


def test_uncertified_choice_rejected(blowup_fan):
    bad = pinned_choice(blowup_fan, [GEN], [[Section(0, [(-2, -2)], [1])]])
    with pytest.raises(PreconditionError):
        assemble_construction(blowup_fan, [GEN], bad)


def test_trivial_cover(p2):
    R = construct(p2, [(1, 0, 0)], [[Section(0, [(0, 0)], [1])]])
    assert R.group.order == 1
    assert str(R.cuts[0]) == "u - x1"
    R = construct(p2)
    assert R.cuts == [] and R.group.order == 1


def test_two_factor_group(p112):
    R = construct(p112, [(1, 0, 0), (0, 0, 1)], seed=3)
    assert R.group.orders == [2, 2] and R.group.order == 4
    assert R.lifted.C == 2 and R.projective is None
    with pytest.raises(UnsupportedCaseError):
        projective_cut_model(R.lifted, R.generators[0], R.choice.sections[0][0])
    assert verify_group_action(R)


def test_torus_factor_split():
    F = Fan(3, [(1, 0, 0), (0, 1, 0), (-1, -1, 0)], [(0, 1), (1, 2), (0, 2)])
    R = construct(F)
    assert R.split is not None and R.split.torus_rank == 1
    assert R.fan.rank == 2


@pytest.mark.parametrize("seed", range(4))
def test_random_pipelines_have_semi_invariant_cuts(seed, p112, blowup_fan):
    rng = random.Random(seed)
    F = rng.choice([p112, blowup_fan])
    R = construct(F, seed=seed)
    assert verify_group_action(R)
