import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import entropy as sp_entropy

from fairbound import (
    Alphabet,
    Channel,
    JointDistribution,
    compose,
    condition,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    marginalize,
    mutual_information,
    use_base,
)
from fairbound.info import fresh_symbol

from conftest import random_joint


def joints(max_card=4):
    @st.composite
    def build(draw):
        shape = tuple(draw(st.integers(1, max_card)) for _ in range(3))
        w = draw(st.lists(st.floats(0.0, 1.0), min_size=int(np.prod(shape)), max_size=int(np.prod(shape))))
        w = np.array(w) + 1e-3 * draw(st.integers(0, 1))
        if w.sum() <= 0:
            w = np.ones_like(w)
        return JointDistribution([Alphabet.range(n, k) for n, k in zip("ABC", shape)],
                                 (w / w.sum()).reshape(shape))
    return build()


def test_entropy_matches_scipy(rng):
    j = random_joint(rng, (3, 4, 2))
    for v in ("S", "X", "T"):
        assert entropy(j, v) == pytest.approx(sp_entropy(j.marginal(v), base=2), abs=1e-12)
    assert entropy(j, ("S", "X", "T")) == pytest.approx(sp_entropy(j.probs.ravel(), base=2), abs=1e-12)


def test_uniform_entropy_and_units():
    j = JointDistribution([Alphabet.range("A", 8)], np.full(8, 1 / 8))
    assert entropy(j, "A") == pytest.approx(3.0, abs=1e-14)
    with use_base("nats"):
        assert entropy(j, "A") == pytest.approx(math.log(8), abs=1e-14)


def test_zero_cells_are_ignored():
    j = JointDistribution([Alphabet.range("A", 3)], [0.5, 0.5, 0.0])
    assert entropy(j, "A") == pytest.approx(1.0, abs=1e-15)


def test_binary_symmetric_channel_mi():
    # I(X;Y) = 1 - h(0.1) for a uniform input
    p = 0.1
    j = JointDistribution([Alphabet.range("X", 2), Alphabet.range("Y", 2)],
                          0.5 * np.array([[1 - p, p], [p, 1 - p]]))
    h = -p * math.log2(p) - (1 - p) * math.log2(1 - p)
    assert mutual_information(j, "X", "Y") == pytest.approx(1 - h, abs=1e-14)


@given(joints())
def test_chain_rule(j):
    h_abc = entropy(j, ("A", "B", "C"))
    assert h_abc == pytest.approx(entropy(j, "A") + conditional_entropy(j, "B", "A")
                                  + conditional_entropy(j, "C", ("A", "B")), abs=1e-10)


@given(joints())
def test_mutual_information_identities(j):
    i_ab = mutual_information(j, "A", "B")
    assert i_ab == pytest.approx(mutual_information(j, "B", "A"), abs=1e-12)
    assert i_ab >= -1e-12
    assert i_ab <= min(entropy(j, "A"), entropy(j, "B")) + 1e-12
    # I(A;B,C) = I(A;C) + I(A;B|C)
    assert mutual_information(j, "A", ("B", "C")) == pytest.approx(
        mutual_information(j, "A", "C") + conditional_mutual_information(j, "A", "B", "C"), abs=1e-10)
    assert conditional_mutual_information(j, "A", "B", "C") >= -1e-12


def test_normalization_tolerance():
    a = Alphabet.range("A", 2)
    j = JointDistribution([a], [0.5, 0.5 + 5e-10])
    assert j.probs.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        JointDistribution([a], [0.5, 0.6])
    with pytest.raises(ValueError):
        JointDistribution([a], [1.5, -0.5])
    with pytest.raises(ValueError):
        JointDistribution([a], [np.nan, 1.0])


def test_probs_are_read_only(rng):
    j = random_joint(rng)
    with pytest.raises(ValueError):
        j.probs[0, 0, 0] = 1.0


def test_alphabet_validation():
    with pytest.raises(ValueError):
        Alphabet("A", [])
    with pytest.raises(ValueError):
        Alphabet("A", [1, 1])


def test_marginal_order_and_marginalize(rng):
    j = random_joint(rng, (2, 3, 4))
    m = j.marginal(("T", "S"))
    assert m.shape == (4, 2)
    np.testing.assert_allclose(m, j.probs.sum(axis=1).T, atol=1e-15)
    assert marginalize(j, ("X",)).names == ("X",)


def test_condition_marks_undefined_rows():
    j = JointDistribution([Alphabet.range("A", 2), Alphabet.range("B", 2)], [[0.3, 0.7], [0.0, 0.0]])
    ch = condition(j, "B", "A")
    np.testing.assert_allclose(ch.table[0], [0.3, 0.7])
    np.testing.assert_allclose(ch.table[1], [0.5, 0.5])
    assert ch.undefined is not None and ch.undefined[1] and not ch.undefined[0]


def test_compose_roundtrip(rng):
    j = random_joint(rng, (2, 3, 2))
    ch = condition(j, "T", ("S", "X"))
    jj = compose(marginalize(j, ("S", "X")), ch)
    np.testing.assert_allclose(jj.probs, j.probs, atol=1e-15)


def test_compose_rejects_collisions_and_mismatches(rng):
    j = random_joint(rng)
    with pytest.raises(ValueError):
        compose(j, Channel((j.alphabet("S"),), Alphabet.range("T", 2), np.eye(2)))
    with pytest.raises(ValueError):
        compose(j, Channel((Alphabet.range("S", 3),), Alphabet.range("Y", 3), np.eye(3)))


def test_channel_rows_must_normalize():
    with pytest.raises(ValueError):
        Channel((Alphabet.range("A", 2),), Alphabet.range("B", 2), [[0.5, 0.4], [0.5, 0.5]])


def test_fresh_symbol():
    a = Alphabet("A", ["c", "c*", 0])
    s = fresh_symbol(a)
    assert s not in a.symbols
