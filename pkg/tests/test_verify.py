import pytest

from toricquot.cox import Generator
from toricquot.errors import FieldError
from toricquot.lift import assemble_construction, construct
from toricquot.sections import pinned_choice
from toricquot.verify import (
    check_sample_field,
    p112_blowup_sections,
    recertify,
    verify_example_p112_blowup,
    verify_group_action,
    verify_quotient_sampling,
    verify_smooth_U,
)

GEN = Generator((1, 1, 1, 0), 2)


@pytest.fixture
def blowup(blowup_fan, blowup_sections):
    return construct(blowup_fan, [GEN.divisor], [blowup_sections])


@pytest.fixture
def broken(blowup_fan):
    choice = pinned_choice(blowup_fan, [GEN], [p112_blowup_sections(["a"])])
    return assemble_construction(blowup_fan, [GEN], choice, require_certified=False)


def test_smooth_U(blowup):
    assert verify_smooth_U(blowup)


def test_node_is_not_smooth(blowup):
    ring = blowup.cox_w.ring
    u, x1 = ring.var(0), ring.var(1)
    assert not verify_smooth_U(blowup, [u ** 2 - x1 ** 2])


def test_broken_choice_not_smooth(broken):
    assert not verify_smooth_U(broken)


def test_group_action(blowup):
    assert verify_group_action(blowup)
    ring = blowup.cox_w.ring
    u, x1 = ring.var(0), ring.var(1)
    assert not verify_group_action(blowup, [u ** 2 - x1 * u])


def test_trivial_group(p2):
    R = construct(p2)
    assert verify_group_action(R) and verify_smooth_U(R)
    rep = verify_quotient_sampling(R, 5, 30)
    assert rep.ok and rep.w_points == rep.x_points


def test_sampling(blowup):
    rep = verify_quotient_sampling(blowup, 5, 200, seed=0)
    assert rep.used > 0 and rep.free_orbits == rep.used
    assert rep.conservation and rep.ok
    assert all(s.ok for s in rep.strata)


def test_sampling_is_seeded(blowup):
    a = verify_quotient_sampling(blowup, 7, 50, seed=4).to_json()
    b = verify_quotient_sampling(blowup, 7, 50, seed=4).to_json()
    assert a == b


def test_broken_choice_has_stabilizer(broken):
    rep = verify_quotient_sampling(broken, 5, 50)
    assert not rep.ok
    (st,) = rep.strata
    assert st.stack_groups == {"[0, 3, 4]": "Z/2"}


def test_sample_field_checks():
    with pytest.raises(FieldError):
        check_sample_field(9, [2])
    with pytest.raises(FieldError):
        check_sample_field(7, [4])
    check_sample_field(13, [2, 3, 4])


def test_example_report():
    rep = verify_example_p112_blowup()
    assert rep.ok, rep.failures


def test_example_broken_sections():
    rep = verify_example_p112_blowup(p112_blowup_sections(["a"]))
    assert "misses_Z" in rep.failures and not rep.ok


def test_example_rejects_finite_field():
    with pytest.raises(FieldError):
        verify_example_p112_blowup(field=3)


def test_recertify(blowup):
    out = recertify(blowup)
    assert out["smooth_U"] and out["group_action"] and out["sections"]["snc"]
    assert blowup.certificates["smooth_U"]
