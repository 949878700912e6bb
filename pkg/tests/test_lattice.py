import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pbos.lattice import (
    MAX_ENUM_LEN,
    MAX_WORD_LEN,
    backward_sums,
    enumerate_all_segmentations,
    forward_sums,
    partition,
    segmentation_likelihood,
    subword_weights,
    top_k_segmentations,
)
from pbos.subword_stats import SubwordTable

UNIT = SubwordTable({"a": 1.0, "b": 1.0, "ab": 1.0})


def random_instance(rng: random.Random, max_len: int = 12):
    """A random word plus a random probability table over a subset of its
    substrings (single characters always resolve through prob_eps)."""
    alphabet = "abcd"
    n = rng.randint(1, max_len)
    word = "".join(rng.choice(alphabet) for _ in range(n))
    probs = {}
    for i in range(n):
        for j in range(i + 1, n + 1):
            if rng.random() < 0.6:
                probs[word[i:j]] = rng.uniform(1e-3, 1.0)
    return word, SubwordTable(probs, prob_eps=0.01)


# --- forward / backward sums ---------------------------------------------

def test_forward_single_edge():
    assert forward_sums("a", SubwordTable({"a": 0.5})) == [1.0, 0.5]


def test_forward_two_chars_unit_probs():
    assert forward_sums("ab", UNIT) == [1.0, 1.0, 2.0]


def test_forward_two_chars_fractional_probs():
    table = SubwordTable({"a": 0.5, "b": 0.5, "ab": 0.25})
    assert forward_sums("ab", table) == [1.0, 0.5, 0.5]


def test_backward_single_edge():
    assert backward_sums("a", SubwordTable({"a": 0.5})) == [0.5, 1.0]


def test_backward_two_chars_unit_probs():
    assert backward_sums("ab", UNIT) == [2.0, 1.0, 1.0]


def test_forward_and_backward_agree_on_partition():
    rng = random.Random(7)
    for _ in range(25):
        word, table = random_instance(rng)
        fwd = forward_sums(word, table)
        bwd = backward_sums(word, table)
        assert fwd[-1] == pytest.approx(bwd[0], abs=1e-12)


def test_empty_word_rejected():
    with pytest.raises(ValueError):
        forward_sums("", UNIT)
    with pytest.raises(ValueError):
        backward_sums("", UNIT)
    with pytest.raises(ValueError):
        subword_weights("", UNIT)


def test_word_length_guard():
    with pytest.raises(ValueError):
        subword_weights("a" * (MAX_WORD_LEN + 1), SubwordTable({"a": 0.5}))


# --- subword weights -------------------------------------------------------

def test_single_char_word_has_unit_weight():
    result = subword_weights("a", SubwordTable({"a": 0.7}))
    assert result.weights == {"a": 1.0}
    assert result.partition == 0.7


def test_equal_unit_probs_give_equal_thirds():
    result = subword_weights("ab", UNIT)
    assert result.weights == pytest.approx({"a": 1 / 3, "b": 1 / 3, "ab": 1 / 3})


def test_general_equal_probs_match_brute_force():
    # with p(a)=p(b)=p(ab)=c the masses are (c^2, c^2, c): shorter paths
    # carry relatively more mass as c shrinks
    for c in (0.25, 0.5, 0.9):
        table = SubwordTable({"a": c, "b": c, "ab": c})
        got = subword_weights("ab", table).weights
        expected = oracles.brute_weights("ab", table)
        assert got == pytest.approx(expected, abs=1e-12)
        assert got["ab"] == pytest.approx(1 / (2 * c + 1), abs=1e-12)


def test_weights_match_brute_force_on_random_instances():
    rng = random.Random(123)
    for _ in range(40):
        word, table = random_instance(rng, max_len=9)
        result = subword_weights(word, table)
        expected = oracles.brute_weights(word, table)
        assert set(result.weights) == set(expected)
        for sub, value in expected.items():
            assert result.weights[sub] == pytest.approx(value, abs=1e-10)
        assert result.partition == pytest.approx(
            oracles.brute_partition(word, table), abs=1e-10
        )


def test_weights_sum_to_one():
    rng = random.Random(5)
    for _ in range(30):
        word, table = random_instance(rng)
        weights = subword_weights(word, table).weights
        assert sum(weights.values()) == pytest.approx(1.0, abs=1e-12)


def test_unique_occurrence_factorization():
    table = SubwordTable({"a": 0.4, "b": 0.2, "ab": 0.3})
    result = subword_weights("ab", table)
    # each subword occurs once: its mass is prob * forward[i] * backward[j]
    masses = {
        "a": 0.4 * result.forward[0] * result.backward[1],
        "b": 0.2 * result.forward[1] * result.backward[2],
        "ab": 0.3 * result.forward[0] * result.backward[2],
    }
    total = sum(masses.values())
    for sub, mass in masses.items():
        assert result.weights[sub] == pytest.approx(mass / total, abs=1e-15)


def test_underflowed_partition_falls_back_to_log_space():
    word = "z" * 300
    result = subword_weights(word, SubwordTable({}, prob_eps=0.01))
    # only the all-single-character segmentation has positive mass
    assert result.partition == 0.0
    assert result.weights == pytest.approx({"z": 1.0})
    assert sum(result.weights.values()) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_weights_property_against_oracle(data):
    word = data.draw(st.text(alphabet="ab", min_size=1, max_size=8))
    rng = random.Random(data.draw(st.integers(0, 2**31)))
    probs = {}
    for i in range(len(word)):
        for j in range(i + 1, len(word) + 1):
            if rng.random() < 0.5:
                probs[word[i:j]] = rng.uniform(0.01, 1.0)
    table = SubwordTable(probs, prob_eps=0.05)
    got = subword_weights(word, table).weights
    expected = oracles.brute_weights(word, table)
    assert got == pytest.approx(expected, abs=1e-10)


# --- partition and likelihood ----------------------------------------------

def test_partition_examples():
    assert partition("ab", UNIT) == 2.0
    assert partition("a", SubwordTable({"a": 0.3})) == 0.3
    table3 = SubwordTable({s: 1.0 for s in ["a", "b", "c", "ab", "bc", "abc"]})
    assert partition("abc", table3) == 4.0
    assert oracles.brute_partition("abc", table3) == 4.0


def test_segmentation_likelihood_examples():
    assert segmentation_likelihood("ab", ("a", "b"), UNIT) == 0.5
    assert segmentation_likelihood("a", ("a",), SubwordTable({"a": 0.4})) == 1.0


def test_segmentation_likelihoods_sum_to_one():
    rng = random.Random(11)
    for _ in range(20):
        word, table = random_instance(rng, max_len=8)
        total = sum(
            segmentation_likelihood(word, seg, table)
            for seg in enumerate_all_segmentations(word)
        )
        assert total == pytest.approx(1.0, abs=1e-9)


def test_segmentation_that_does_not_spell_word_rejected():
    with pytest.raises(ValueError):
        segmentation_likelihood("ab", ("a", "c"), UNIT)
    with pytest.raises(ValueError):
        segmentation_likelihood("ab", ("ab", "b"), UNIT)
    with pytest.raises(ValueError):
        segmentation_likelihood("ab", (), UNIT)


# --- k-best segmentations ---------------------------------------------------

def test_top_k_single_path_word():
    assert top_k_segmentations("a", SubwordTable({"a": 0.2}), 3) == [(("a",), 1.0)]


def test_top_k_tie_breaks_by_fewer_segments():
    result = top_k_segmentations("ab", UNIT, 2)
    assert [seg for seg, _ in result] == [("ab",), ("a", "b")]
    assert [prob for _, prob in result] == pytest.approx([0.5, 0.5])


def test_top_k_matches_exhaustive_ranking():
    rng = random.Random(99)
    for _ in range(25):
        word, table = random_instance(rng, max_len=8)
        k = rng.randint(1, 6)
        got = top_k_segmentations(word, table, k)
        expected = oracles.brute_ranked_segmentations(word, table)[:k]
        assert [seg for seg, _ in got] == [seg for seg, _ in expected]
        for (_, got_p), (_, exp_p) in zip(got, expected):
            assert got_p == pytest.approx(exp_p, abs=1e-9)


def test_top_k_includes_zero_probability_paths_when_needed():
    table = SubwordTable({"z": 0.01})
    result = top_k_segmentations("zz", table, 5)
    assert [seg for seg, _ in result] == [("z", "z"), ("zz",)]
    assert result[0][1] == pytest.approx(1.0)
    assert result[1][1] == 0.0


def test_top_k_rejects_bad_k():
    with pytest.raises(ValueError):
        top_k_segmentations("ab", UNIT, 0)


# --- exhaustive enumeration -------------------------------------------------

def test_enumeration_counts():
    assert len(enumerate_all_segmentations("a")) == 1
    assert len(enumerate_all_segmentations("ab")) == 2
    assert len(enumerate_all_segmentations("abcd")) == 8


def test_enumeration_matches_bitmask_oracle():
    word = "abcde"
    got = set(enumerate_all_segmentations(word))
    assert got == set(oracles.all_segmentations(word))
    assert all("".join(seg) == word for seg in got)


def test_enumeration_guard():
    with pytest.raises(ValueError):
        enumerate_all_segmentations("a" * (MAX_ENUM_LEN + 1))


def test_partition_equals_two_to_the_n_minus_one_for_unit_probs():
    for n in range(1, 8):
        word = "a" * n
        probs = {word[i:j]: 1.0 for i in range(n) for j in range(i + 1, n + 1)}
        assert partition(word, SubwordTable(probs)) == 2.0 ** (n - 1)
        assert math.log2(len(enumerate_all_segmentations(word))) == n - 1
