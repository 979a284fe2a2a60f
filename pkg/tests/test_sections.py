import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricquot.cox import Generator, build_cox
from toricquot.errors import PreconditionError, SearchFailure
from toricquot.fan import lattice_points, polytope_of_divisor
from toricquot.sections import (
    Section,
    SectionChoice,
    certify_misses_Z,
    certify_smooth_on_V,
    certify_snc_on_V,
    pinned_choice,
    pullback,
    search_sections,
)
from toricquot.verify import P112_BLOWUP_FAN

GEN = Generator((1, 1, 1, 0), 2)


def test_zero_section_rejected():
    with pytest.raises(PreconditionError):
        Section(0, [(0, 0)], [0])


def test_blowup_polynomial(blowup_fan, blowup_sections):
    cox = build_cox(blowup_fan)
    f = pullback(cox, GEN, blowup_sections[0])
    assert str(f) == "x2^4*x3^6 + x3^2*x4^4 + x1^3*x2"
    assert certify_smooth_on_V([f], cox)
    assert certify_misses_Z([f], cox)


def test_single_monomial_fails(blowup_fan):
    cox = build_cox(blowup_fan)
    f = pullback(cox, GEN, Section(0, [(-2, -2)], [1]))
    assert not certify_misses_Z([f], cox)
    assert not certify_smooth_on_V([f], cox)


def test_snc(p2):
    cox = build_cox(p2)
    x, y, z = cox.ring.gens()
    assert certify_snc_on_V([x, y], cox)
    assert not certify_snc_on_V([x, x - y ** 2], cox)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=13, max_size=13), st.lists(st.integers(-3, 3), min_size=13, max_size=13))
def test_pullback_linear(a, b):
    blowup_fan = P112_BLOWUP_FAN
    cox = build_cox(blowup_fan)
    pts = lattice_points(polytope_of_divisor(blowup_fan, GEN.scaled))
    if not any(a) or not any(b) or not any(x + y for x, y in zip(a, b)):
        return
    fa = pullback(cox, GEN, Section(0, pts, a))
    fb = pullback(cox, GEN, Section(0, pts, b))
    fab = pullback(cox, GEN, Section(0, pts, [x + y for x, y in zip(a, b)]))
    assert fa + fb == fab
    assert cox.is_homogeneous(fab)


def test_pinned_choice_round_trip(blowup_fan, blowup_sections):
    choice = pinned_choice(blowup_fan, [GEN], [blowup_sections])
    assert choice.certified
    again = SectionChoice.from_json(choice.to_json())
    assert again.sections == choice.sections and again.certified


def test_seeded_search_is_deterministic(blowup_fan):
    a = search_sections(blowup_fan, [GEN], seed=7)
    b = search_sections(blowup_fan, [GEN], seed=7)
    assert a.certified and a.to_json() == b.to_json()


def test_search_failure(blowup_fan):
    with pytest.raises(SearchFailure):
        search_sections(blowup_fan, [GEN], seed=0, max_attempts=0)
