import numpy as np
import pytest

from fairbound import (
    Quantities,
    RegimeError,
    SizeGuardError,
    audit,
    construct,
    construct_L1,
    construct_L2_variant,
    construct_L3,
    mutual_information,
    typewriter_joint,
    use_base,
)

from conftest import random_joint


def _l1_point(q, fr=0.6, fe=0.4):
    eps = fe * q.H_S
    return fr * min(q.H_X_given_S + eps, q.H_X), eps


def _l3_point(q, fr=0.3, fe=0.5):
    r = fr * q.H_X
    return r, min(r + fe * q.H_S_given_X, 0.99 * q.H_S)


def test_l1_certificates(rng):
    j = random_joint(rng)
    q = Quantities.from_joint(j)
    r, eps = _l1_point(q)
    m = construct_L1(j, r, eps)
    res = audit(m, j, full=True)
    assert res.certified and res.identities_hold
    assert res.identities["I(U';X,S)"] == pytest.approx(r, abs=1e-9)
    assert res.identities["H(T|Y',S,X,U')"] == pytest.approx(0.0, abs=1e-9)
    assert res.leakage == pytest.approx(m.mix_prob * eps, abs=1e-9)


def test_l3_certificates(rng):
    j = random_joint(rng)
    q = Quantities.from_joint(j)
    r, eps = _l3_point(q)
    m = construct_L3(j, r, eps)
    res = audit(m, j, full=True)
    assert res.certified and res.identities_hold
    assert res.identities["I(U';X,S)"] == pytest.approx(eps, abs=1e-9)
    assert res.rate == pytest.approx(m.mix_prob * r, abs=1e-9)


def test_compact_and_full_audits_agree(rng):
    j = random_joint(rng, zeros=0.3)
    q = Quantities.from_joint(j)
    m = construct_L1(j, *_l1_point(q))
    a, b = audit(m, j, full=True), audit(m, j, full=False)
    assert a.utility == pytest.approx(b.utility, abs=1e-12)
    assert a.leakage == pytest.approx(b.leakage, abs=1e-12)
    assert a.rate == pytest.approx(b.rate, abs=1e-12)


def test_realized_channel_matches_mechanism(rng):
    j = random_joint(rng)
    q = Quantities.from_joint(j)
    m = construct_L1(j, *_l1_point(q))
    ch = m.realize(j)
    res = audit(ch, j, r=m.r, eps=m.epsilon)
    ref = audit(m, j)
    assert res.utility == pytest.approx(ref.utility, abs=1e-12)
    assert res.leakage == pytest.approx(ref.leakage, abs=1e-12)
    assert res.feasible


def test_zero_leakage_recipe(rng):
    j = random_joint(rng)
    q = Quantities.from_joint(j)
    m = construct(j, "thm1", 0.5 * q.H_X_given_S, 0.0)
    res = audit(m, j)
    assert "L1r" in m.claimed
    assert res.leakage == pytest.approx(0.0, abs=1e-12)
    assert res.certified
    with pytest.raises(RegimeError):
        construct(j, "thm1", 0.1, 0.1)


def test_regime_errors_name_the_inequality(rng):
    j = random_joint(rng)
    q = Quantities.from_joint(j)
    with pytest.raises(RegimeError, match=r"H\(X\|S\) \+ epsilon"):
        construct_L1(j, q.H_X_given_S + 0.2, 0.1)
    with pytest.raises(RegimeError, match="r = .* > epsilon"):
        construct_L3(j, 0.3, 0.1)
    with pytest.raises(RegimeError, match=r"H\(S\|X\) \+ r"):
        construct_L3(j, 0.0, q.H_S_given_X + 0.1)
    with pytest.raises(ValueError):
        construct(j, "L9", 0.1, 0.1)


def test_size_guard(rng):
    j = random_joint(rng)
    q = Quantities.from_joint(j)
    with pytest.raises(SizeGuardError):
        construct_L1(j, *_l1_point(q), cell_budget=10)


@pytest.mark.parametrize("family", ["L1", "L3"])
def test_strong_frl_variant(rng, family):
    j = random_joint(rng)
    q = Quantities.from_joint(j)
    r, eps = _l1_point(q) if family == "L1" else _l3_point(q)
    m = construct_L2_variant(j, r, eps, family)
    tight = "L2" if family == "L1" else "L4"
    assert m.sfrl is not None
    assert (tight in m.claimed) == m.sfrl.holds
    res = audit(m, j)
    assert res.certified


def test_nats_mechanism(rng):
    j = random_joint(rng)
    with use_base("nats"):
        q = Quantities.from_joint(j)
        r, eps = _l1_point(q)
        res = audit(construct_L1(j, r, eps), j)
    assert res.certified and res.identities_hold


def test_small_typewriter_pipeline():
    j = typewriter_joint(10, 1 / 3)
    q = Quantities.from_joint(j)
    for recipe, (r, eps) in (("L1", (0.5 * q.H_X_given_S, 0.1)), ("L3", (0.2, 0.2 + 0.5 * q.H_S_given_X))):
        m = construct(j, recipe, r, eps)
        res = audit(m, j)
        assert res.certified and res.identities_hold


def test_mixing_law_across_views(rng):
    j = random_joint(rng)
    q = Quantities.from_joint(j)
    m = construct_L1(j, *_l1_point(q))
    jj = m.full_joint(j)
    a = m.mix_prob
    for v in ("S", "X", "T", ("S", "X"), ("X", "T")):
        assert mutual_information(jj, "U'", v) == pytest.approx(
            a * mutual_information(jj, ("W", "Z"), v), abs=1e-9)
