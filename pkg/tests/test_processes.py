from __future__ import annotations

import random
from fractions import Fraction

import pytest

from oracles import encodings_by_definition, random_distribution, random_tree, reduced_by_search
from seqrand.core import BudgetExceeded, Dyadic, all_strings, sigma
from seqrand.predictors import DefaultRule, StagedPredictor, bernoulli, table_predictor, uniform, zero
from seqrand.processes import (
    MonotoneProcess,
    ProcessError,
    check_monotone,
    constant_process,
    digit_aligned_process,
    distribution_to_endless_process,
    encodings,
    endless_process_to_distribution,
    format_process_table,
    identity_process,
    is_reduced_encoding,
    min_input_lengths,
    parse_process_table,
    predictor_to_process,
    reduced_encodings,
    solomonoff_eval,
)

F = Fraction
GRID = F(1, 64)
flip = {"": "", "0": "1", "1": "1"}


def random_staged(rng: random.Random, depth: int, stages: int) -> StagedPredictor:
    """Sum of per-stage subadditive grid trees, so every stage is subadditive."""
    layers = []
    left = F(1)
    for _ in range(stages + 1):
        root = GRID * rng.randint(0, int(left / GRID))
        layers.append(random_tree(rng, depth, GRID, full=False, root=root))
        left -= root

    def approx(x, n):
        return sum((layer.get(x, F(0)) for layer in layers[: n + 1]), F(0))

    return StagedPredictor(approx, name="random_staged", dyadic_valued=True)


def test_check_monotone_examples():
    assert check_monotone({"": "", "0": "0", "00": "00"}) == (True, None)
    assert check_monotone({"0": "1", "00": "0"}) == (False, ("0", "00"))
    assert check_monotone({}) == (True, None)


def test_process_rejects_inconsistent_tables():
    with pytest.raises(ProcessError):
        MonotoneProcess({"0": "1", "00": "0"})
    with pytest.raises(ProcessError):
        MonotoneProcess([("0", "1"), ("0", "1")])


def test_encoding_examples():
    ident = identity_process(3)
    enc = encodings(ident, "01")
    assert enc.members == {"01"} and enc.sigma == F(1, 4)
    assert encodings(flip, "1").members == {"0", "1"}
    assert encodings(flip, "").members == {""}
    assert encodings({"0": "", "10": "1"}, "").sigma == F(3, 4)


def test_encodings_agree_with_definition():
    rng = random.Random(3)
    for _ in range(30):
        f = distribution_to_endless_process(random_distribution(rng, 3, F(1, 8)), 3, closure=False)
        table = dict(f.table)
        for y in all_strings(3):
            assert encodings(f, y).members == encodings_by_definition(table, y)


def test_solomonoff_examples():
    ident = identity_process(4)
    assert all(solomonoff_eval(ident, y) == F(1, 2 ** len(y)) for y in all_strings(4))
    assert solomonoff_eval(flip, "1") == 1
    assert solomonoff_eval({}, "0") == 0


def test_solomonoff_subadditive_and_budget_monotone():
    f = identity_process()
    for y in all_strings(3):
        values = [solomonoff_eval(f, y, b) for b in range(0, 40, 3)]
        assert values == sorted(values)
        for b in range(0, 40, 5):
            assert solomonoff_eval(f, y + "0", b) + solomonoff_eval(f, y + "1", b) <= solomonoff_eval(f, y, b) <= 1


def test_snapshot_growth_and_consumption():
    f = identity_process()
    assert f.snapshot(0) == {}
    assert dict(f.snapshot(3)) == {"": "", "0": "0", "1": "1"}
    assert f.consumed() == 3
    # a smaller budget afterwards still sees only its prefix of the enumeration
    assert dict(f.snapshot(1)) == {"": ""}


def test_reduced_encoding_examples():
    ident = identity_process(3)
    assert is_reduced_encoding(ident, "01", "01", 2)
    assert not is_reduced_encoding(ident, "0", "01", 2)
    assert is_reduced_encoding(flip, "", "1", 1)
    assert not is_reduced_encoding(flip, "0", "1", 1)


def test_reduced_encoding_search_matches_explicit_trees():
    rng = random.Random(9)
    for _ in range(10):
        f = distribution_to_endless_process(random_distribution(rng, 3, F(1, 8)), 3)
        table = dict(f.table)
        depth = max(len(x) for x in table)
        for y in all_strings(2):
            for x in all_strings(depth):
                got = is_reduced_encoding(f, x, y, depth - len(x))
                assert got == reduced_by_search(table, x, y, depth - len(x))


def test_fig1_vector():
    h = table_predictor({"": F(3, 8), "0": F(1, 8), "1": F(3, 16)})
    f = predictor_to_process(h, 1, 1)
    assert [solomonoff_eval(f, y) for y in ("", "0", "1")] == [F(3, 8), F(1, 8), F(3, 16)]
    roots = encodings(f, "").members
    for y in ("0", "1"):
        for x in encodings(f, y).members:
            assert any(x.startswith(r) and x != r for r in roots)


def test_predictor_to_process_examples():
    f = predictor_to_process(uniform(), 3, 3)
    assert all(solomonoff_eval(f, y) == F(1, 2 ** len(y)) for y in all_strings(3))
    empty = predictor_to_process(zero(), 2, 2)
    assert dict(empty.table) == {}
    with pytest.raises(ValueError, match="dyadic"):
        predictor_to_process(bernoulli(F(2, 3)), 1, 1)


@pytest.mark.parametrize("seed", range(10))
def test_stagewise_roundtrip(seed):
    rng = random.Random(seed)
    depth, stages = rng.randint(1, 4), rng.randint(0, 4)
    h = random_staged(rng, depth, stages)
    f = predictor_to_process(h, stages, depth)
    last = max(stages, depth)
    for n in range(last + 1):
        table = f.after_stage(n)
        for y in all_strings(min(n, depth)):
            assert solomonoff_eval(table, y) == h.approx(y, min(n, stages))
    assert check_monotone(dict(f.table))[0]


def test_new_pairs_extend_parent_encoders():
    rng = random.Random(42)
    h = random_staged(rng, 3, 3)
    f = predictor_to_process(h, 3, 3, closure=False)
    seen: dict[str, str] = {}
    for _, x, y in f.history:
        # the new block's subtree is still unallocated
        assert not any(z.startswith(x) for z in seen)
        assert all(y.startswith(seen[z]) and seen[z] != y for z in seen if x.startswith(z))
        if y:
            assert any(x.startswith(z) and len(z) < len(x) and seen[z] == y[:-1] for z in seen)
        seen[x] = y


def test_closure_keeps_probabilities():
    rng = random.Random(8)
    for _ in range(10):
        p = random_distribution(rng, 3, F(1, 8))
        a = distribution_to_endless_process(p, 3, closure=False)
        b = distribution_to_endless_process(p, 3, closure=True)
        for y in all_strings(3):
            assert solomonoff_eval(a, y) == solomonoff_eval(b, y)


def test_endless_examples():
    f = distribution_to_endless_process(bernoulli(F(1, 2)), 3)
    assert all(solomonoff_eval(f, y) == F(1, 2 ** len(y)) for y in all_strings(3))
    g = distribution_to_endless_process(table_predictor({"": 1, "0": F(3, 4), "1": F(1, 4)}, DefaultRule.CLOSED_UNDER_PREFIX), 1)
    assert solomonoff_eval(g, "0") == F(3, 4)
    assert sigma(encodings(g, "0").members) == F(3, 4)
    with pytest.raises(ValueError, match="dyadic"):
        distribution_to_endless_process(bernoulli(F(2, 3)), 2)


@pytest.mark.parametrize("seed", range(10))
def test_endless_roundtrip(seed):
    rng = random.Random(seed)
    depth = rng.randint(1, 4)
    p = random_distribution(rng, depth, F(1, 16))
    f = distribution_to_endless_process(p, depth).as_enumerated()
    for y in all_strings(depth):
        d = endless_process_to_distribution(f, y, 10_000)
        assert d.to_fraction() == p(y)
    lens = min_input_lengths(f, depth, None)
    assert all(a < b for a, b in zip(lens[1:], lens[2:]))


def test_endless_inversion_examples():
    assert endless_process_to_distribution(identity_process(), "01", 100) == Dyadic(1, 2)
    with pytest.raises(BudgetExceeded):
        endless_process_to_distribution(constant_process(), "0", 200)
    with pytest.raises(ValueError):
        endless_process_to_distribution(identity_process(2), "0", 10)


def test_identity_min_lengths():
    assert min_input_lengths(identity_process(3), 3) == [0, 1, 2, 3]


def test_digit_alignment_examples():
    p = table_predictor({"": 1, "0": F(3, 8), "1": F(5, 8)}, DefaultRule.CLOSED_UNDER_PREFIX)
    f = digit_aligned_process(p, 1)
    assert sorted(len(x) for x in reduced_encodings(f, "0")) == [2, 3]
    u = digit_aligned_process(bernoulli(F(1, 2)), 3)
    for y in all_strings(3):
        assert [len(x) for x in reduced_encodings(u, y)] == [len(y)]
    z = digit_aligned_process(table_predictor({"": 1, "0": 1, "1": 0}, DefaultRule.CLOSED_UNDER_PREFIX), 2)
    assert reduced_encodings(z, "1") == set()


@pytest.mark.parametrize("seed", range(8))
def test_digit_alignment_exhaustive(seed):
    rng = random.Random(seed)
    depth = rng.randint(1, 3)
    p = random_distribution(rng, depth, F(1, 16))
    f = digit_aligned_process(p, depth)
    table = dict(f.table)
    horizon = max(len(x) for x in table)
    for y in all_strings(depth):
        found = [x for x in all_strings(horizon) if reduced_by_search(table, x, y, horizon - len(x))]
        expected = Dyadic.from_fraction(p(y)).digits() if p(y) else []
        assert sorted(len(x) for x in found) == sorted(expected)
        assert set(found) == reduced_encodings(f, y)
        assert sigma(found) == sigma(encodings(f, y).members) == p(y)


def test_table_file_round_trip(tmp_path):
    table = {"": "", "0": "1", "10": "0", "11": "01"}
    text = format_process_table(table)
    assert text.splitlines()[0] == ".\t."
    path = tmp_path / "f.tsv"
    path.write_text("# comment\n" + text, encoding="utf-8")
    assert parse_process_table(path.read_text(encoding="utf-8")) == table
    with pytest.raises(ValueError, match="duplicate"):
        parse_process_table("0\t1\n0\t1\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_process_table("0 1\n")
