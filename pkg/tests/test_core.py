from __future__ import annotations

import random
import threading
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqrand.core import (
    Dyadic,
    Memo,
    PrefixFreeSet,
    all_strings,
    as_fraction,
    complement_last,
    format_bits,
    is_dyadic,
    is_prefix,
    is_prefix_free,
    parse_bits,
    prefixes,
    sigma,
    strings_of_length,
)

bits = st.text(alphabet="01", max_size=12)


def test_sigma_examples():
    assert sigma({""}) == 1
    assert sigma(set()) == 0
    assert sigma({"0", "10", "11"}) == 1


def test_sigma_rejects_non_prefix_free():
    with pytest.raises(ValueError):
        sigma({"0", "01"})


def test_is_prefix_free_examples():
    assert not is_prefix_free({"0", "01"})
    assert is_prefix_free({"00", "01", "1"})
    assert is_prefix_free({""})
    assert not is_prefix_free({"", "1"})


def test_complement_last_examples():
    assert complement_last("010") == "011"
    assert complement_last("1") == "0"
    assert complement_last("110") == "111"
    with pytest.raises(ValueError):
        complement_last("")


@given(bits.filter(bool))
def test_complement_last_is_involution(x):
    assert complement_last(complement_last(x)) == x
    assert complement_last(x) != x


@pytest.mark.parametrize("n", range(8))
def test_full_level_has_unit_sigma(n):
    assert sigma(strings_of_length(n)) == 1


@given(st.integers(min_value=0, max_value=2**16), st.data())
def test_splitting_a_member_keeps_sigma(seed, data):
    rng = random.Random(seed)
    members = {""}
    for _ in range(rng.randint(0, 10)):
        x = rng.choice(sorted(members))
        members = (members - {x}) | {x + "0", x + "1"}
    before = sigma(members)
    x = data.draw(st.sampled_from(sorted(members)))
    after = sigma((members - {x}) | {x + "0", x + "1"})
    assert before == after == 1


@given(st.fractions(min_value=0, max_value=10), st.fractions(min_value=0, max_value=10).filter(lambda b: b != 0))
def test_ratio_round_trips(a, b):
    assert (a + b) - b == a
    assert (a * b) / b == a


def test_prefix_relations():
    assert is_prefix("", "010")
    assert is_prefix("01", "010")
    assert not is_prefix("011", "010")
    assert list(prefixes("01")) == ["", "0", "01"]
    assert list(prefixes("01", proper=True)) == ["", "0"]


@given(bits, bits)
def test_mutual_prefixes_are_equal(x, y):
    if is_prefix(x, y) and is_prefix(y, x):
        assert x == y


def test_string_enumeration_order():
    assert list(strings_of_length(2)) == ["00", "01", "10", "11"]
    assert list(all_strings(2)) == ["", "0", "1", "00", "01", "10", "11"]
    assert list(all_strings(3, "10")) == ["10", "100", "101"]


def test_serialized_empty_string():
    assert parse_bits(".") == ""
    assert format_bits("") == "."
    assert parse_bits(" 0110 ") == "0110"
    with pytest.raises(ValueError):
        parse_bits("")
    with pytest.raises(ValueError):
        parse_bits("012")


def test_dyadic_canonical_form():
    d = Dyadic(12, 5)
    assert (d.mantissa, d.exponent) == (3, 3)
    assert Dyadic(0, 7) == Dyadic(0, 0)
    assert Dyadic.from_fraction(Fraction(3, 8)) == Dyadic(3, 3)
    assert Dyadic(3, 3).to_fraction() == Fraction(3, 8)
    assert str(Dyadic(3, 3)) == "3*2^-3"
    assert Dyadic(3, 3).digits() == [2, 3]
    assert Dyadic(1, 0).digits() == [0]
    with pytest.raises(ValueError):
        Dyadic.from_fraction(Fraction(1, 3))
    with pytest.raises(ValueError):
        Dyadic(-1, 0)


@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=40))
def test_dyadic_embeds_losslessly(m, e):
    d = Dyadic(m, e)
    assert d.to_fraction() == Fraction(m, 2**e)
    assert Dyadic.from_fraction(d.to_fraction()) == d
    # exponents stay nonnegative, so integers above 1 keep an even mantissa
    assert d.mantissa % 2 == 1 or d.mantissa == 0 or d.exponent == 0
    assert sum(Fraction(2) ** -i for i in d.digits()) == d.to_fraction()


def test_is_dyadic_and_as_fraction():
    assert is_dyadic(Fraction(5, 16))
    assert not is_dyadic(Fraction(1, 6))
    assert as_fraction(Dyadic(1, 2)) == Fraction(1, 4)
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_prefix_free_set_validates():
    assert PrefixFreeSet({"0", "10"}) == {"0", "10"}
    with pytest.raises(ValueError):
        PrefixFreeSet({"1", "10"})


def test_memo_is_consistent_across_threads():
    memo = Memo()
    calls = []

    def compute():
        calls.append(1)
        return Fraction(1, 3)

    results = []
    threads = [threading.Thread(target=lambda: results.append(memo.get("k", compute))) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert set(results) == {Fraction(1, 3)}
    assert len(memo) == 1
