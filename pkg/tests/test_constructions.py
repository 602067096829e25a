"""Tests for the constructive witnesses: pigeonhole blocks, avoiding sequences, J-witnesses"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ipstar_lab.constructions import (
    FREE_AB,
    JSearchExhausted,
    JWitness,
    avoid_certificate,
    avoid_sequence,
    block_decomposition,
    diff_ipstar_demo,
    dilated_fs_witness,
    freesemigroup_counterexample,
    goswami_d_set,
    goswami_product_check,
    j_witness_search,
    k_cr_probe,
    left_quotient_witness,
    noncommutative_j_witness,
    pigeonhole_extract,
    right_ideal_fa,
    sample_families,
    to_jsonable,
)
from ipstar_lab.errors import (
    IndexPreconditionError,
    KindMismatchError,
    LengthGuardError,
    SearchExhaustedError,
    SequenceLengthError,
    ZeroInFiniteSumsError,
)
from ipstar_lab.largeness import (
    ExplicitSet,
    HalfLineSet,
    IntersectionSet,
    PrincipalIdealSet,
    UniverseSet,
    fs_enumerate,
    subset_sums,
)
from ipstar_lab.sieve import sieve_primes
from ipstar_lab.structures import INTEGERS, POLYNOMIALS, FiniteSequence, GroundStructure, IndexSet, Poly, SubgroupSpec

x = Poly.x()
one = Poly.const(1)


def subgroup(k):
    return SubgroupSpec.principal(INTEGERS, k)


def seq(*terms):
    return FiniteSequence.of(INTEGERS, terms)


def even_naturals():
    return IntersectionSet([PrincipalIdealSet(subgroup(2)), HalfLineSet(1)])


# ----------------------------------------------------------------------
# Pigeonhole extraction
# ----------------------------------------------------------------------
def test_prefix_block():
    block = pigeonhole_extract(subgroup(3), seq(1, 1, 1, 1))
    assert (block.start, block.end, block.sum) == (1, 3, 3)


def test_collision_block():
    block = pigeonhole_extract(subgroup(3), seq(1, 3, 4, 4))
    assert (block.start, block.end, block.sum) == (2, 2, 3)


def test_first_term_in_subgroup():
    block = pigeonhole_extract(subgroup(5), seq(5, 1, 1, 1, 1, 1))
    assert (block.start, block.end) == (1, 1)


@given(st.integers(2, 10).flatmap(
    lambda k: st.tuples(st.just(k), st.lists(st.integers(-10**6, 10**6), min_size=k + 1, max_size=k + 1))
))
def test_pigeonhole_block_sums_into_subgroup(case):
    k, terms = case
    s = seq(*terms)
    block = pigeonhole_extract(subgroup(k), s)
    assert 1 <= block.start <= block.end <= k + 1
    assert sum(terms[block.start - 1:block.end]) % k == 0
    assert block.recheck(subgroup(k), s)


def test_pigeonhole_on_random_sequences():
    rng = np.random.default_rng(0)
    h = subgroup(3)
    for row in rng.integers(-10**6, 10**6, endpoint=True, size=(10_000, 4)):
        s = seq(*(int(v) for v in row))
        assert pigeonhole_extract(h, s).recheck(h, s)


@pytest.mark.slow
@pytest.mark.parametrize("k", range(2, 11))
def test_pigeonhole_on_random_sequences_for_every_index(k):
    rng = np.random.default_rng(k)
    h = subgroup(k)
    for row in rng.integers(-10**6, 10**6, endpoint=True, size=(10_000, k + 1)):
        terms = [int(v) for v in row]
        block = pigeonhole_extract(h, seq(*terms))
        assert sum(terms[block.start - 1:block.end]) % k == 0


def test_modular_pigeonhole():
    z12 = GroundStructure.modular(12)
    h = SubgroupSpec.principal(z12, 8)
    block = pigeonhole_extract(h, FiniteSequence.of(z12, [1, 1, 1, 1, 1]))
    assert (block.start, block.end, block.sum) == (1, 4, 4)


def test_pigeonhole_preconditions():
    with pytest.raises(IndexPreconditionError):
        pigeonhole_extract(SubgroupSpec.principal(POLYNOMIALS, x), FiniteSequence.of(POLYNOMIALS, [one, one]))
    with pytest.raises(SequenceLengthError):
        pigeonhole_extract(subgroup(3), seq(1, 1, 1))


def test_block_decomposition():
    blocks = block_decomposition(subgroup(2), seq(1, 1, 1, 1, 1))
    assert [(b.start, b.end) for b in blocks] == [(1, 2), (3, 4)]


def test_block_certificate_rechecks():
    s = seq(1, 1, 1, 1)
    cert = pigeonhole_extract(subgroup(3), s).certificate(subgroup(3), s)
    document = cert.to_json()
    assert document["op"] == "pigeonhole_extract"
    assert document["recheck"] is True
    assert document["inputs"]["sequence"] == [1, 1, 1, 1]


def test_dilated_witness():
    A = PrincipalIdealSet(subgroup(3))
    rng = np.random.default_rng(7)
    for r in (2, 3, 5):
        for row in rng.integers(-1000, 1000, endpoint=True, size=(10, 24)):
            s = seq(*(int(v) for v in row))
            w = dilated_fs_witness(A, r, s)
            assert w.recheck(A, s)
            assert w.total % (3 * r) == 0


def test_dilated_witness_needs_integers():
    A = PrincipalIdealSet(SubgroupSpec.principal(POLYNOMIALS, x))
    with pytest.raises(KindMismatchError):
        dilated_fs_witness(A, x, FiniteSequence.of(POLYNOMIALS, [one]))


# ----------------------------------------------------------------------
# Avoiding sequences
# ----------------------------------------------------------------------
def test_x_ideal_avoided_by_ones():
    h = SubgroupSpec.principal(POLYNOMIALS, x)
    s = avoid_sequence(h, 12)
    assert s.terms == (one,) * 12
    sums = fs_enumerate(s)
    assert len(sums) == 4095
    assert not any(h.contains(v) for v in sums.values())
    assert avoid_certificate(h, s).recheck()


def test_two_ideal_greedy_terms():
    h = SubgroupSpec.principal(POLYNOMIALS, Poly.const(2))
    assert avoid_sequence(h, 3).terms == (one, x, x * x)


def test_x_squared_ideal_avoided():
    h = SubgroupSpec.principal(POLYNOMIALS, x * x)
    assert avoid_sequence(h, 5).terms == (one,) * 5


def test_x_squared_ideal_avoided_at_length_twelve():
    h = SubgroupSpec.principal(POLYNOMIALS, x * x)
    s = avoid_sequence(h, 12)
    assert s.terms == (one,) * 12
    assert avoid_certificate(h, s).recheck()


@pytest.mark.slow
def test_two_ideal_avoided_at_length_twelve():
    h = SubgroupSpec.principal(POLYNOMIALS, Poly.const(2))
    s = avoid_sequence(h, 12, budget=1_000_000)
    assert s.terms == tuple(Poly.monomial(1, d) for d in range(12))
    assert not any(h.contains(v) for v in fs_enumerate(s).values())


def test_avoid_preconditions():
    with pytest.raises(IndexPreconditionError):
        avoid_sequence(subgroup(3), 4)
    with pytest.raises(LengthGuardError):
        avoid_sequence(SubgroupSpec.principal(POLYNOMIALS, x), 21)
    with pytest.raises(SearchExhaustedError):
        avoid_sequence(SubgroupSpec.principal(POLYNOMIALS, Poly.const(2)), 4, budget=10)


# ----------------------------------------------------------------------
# J-witnesses
# ----------------------------------------------------------------------
def test_j_witness_h_outer_a_inner():
    A = PrincipalIdealSet(subgroup(2))
    result = j_witness_search(A, [seq(3, 5, 7)], INTEGERS.enumerate(10))
    assert isinstance(result, JWitness)
    assert result.a == 1
    assert result.H == IndexSet((1,))
    assert result.images == (4,)
    assert result.recheck(A, [seq(3, 5, 7)])


def test_j_search_exhausted_reports_grid():
    A = ExplicitSet(INTEGERS, [0])
    result = j_witness_search(A, [seq(1)], [0])
    assert isinstance(result, JSearchExhausted)
    assert result.grid == {"a_window": 1, "length": 1, "sequences": 1, "index_sets": 1}
    assert isinstance(j_witness_search(A, [seq(1)], [0, -1]), JWitness)


def test_j_search_needs_equal_lengths():
    with pytest.raises(SequenceLengthError):
        j_witness_search(UniverseSet(INTEGERS), [seq(1, 2), seq(1)], [0])


def test_even_naturals_pass_cr_probe():
    A = even_naturals()
    families = sample_families(np.random.default_rng(0), 2, 4, 20, 1, 20)
    probe = k_cr_probe(A, 2, 4, families, INTEGERS.enumerate(64))
    assert probe.passed
    assert len(probe.witnesses) == 20
    for w, family in zip(probe.witnesses, families):
        assert max(w.H) <= 4
        assert w.recheck(A, family)


def test_cr_probe_rejects_large_families():
    families = [(seq(1), seq(2), seq(3))]
    with pytest.raises(ValueError):
        k_cr_probe(UniverseSet(INTEGERS), 2, 1, families, [0])


def test_sample_families_shape_and_range():
    families = sample_families(np.random.default_rng(1), 3, 5, 4, -2, 2)
    assert len(families) == 4
    assert all(len(family) == 3 for family in families)
    assert all(-2 <= t <= 2 for family in families for f in family for t in f)


# ----------------------------------------------------------------------
# A - A meets finite sums
# ----------------------------------------------------------------------
def test_difference_witness_on_seeded_sequences():
    A = even_naturals()
    rng = np.random.default_rng(2024)
    window = INTEGERS.enumerate(64)
    for row in rng.integers(1, 50, endpoint=True, size=(100, 8)):
        x_seq = seq(*(int(v) for v in row))
        w = diff_ipstar_demo(A, x_seq, [1], window)
        assert w.recheck(A, x_seq)
        assert w.minuend - w.subtrahend == w.total


def test_difference_witness_in_primes():
    A = sieve_primes(10_000)
    w = diff_ipstar_demo(A, seq(2, 4, 6), [0])
    assert (w.H, w.a, w.minuend, w.subtrahend, w.total) == (IndexSet((1,)), 3, 5, 3, 2)


def test_difference_witness_length_guard():
    with pytest.raises(LengthGuardError):
        diff_ipstar_demo(even_naturals(), seq(*([1] * 13)), [1])


# ----------------------------------------------------------------------
# D-sets and product coverage
# ----------------------------------------------------------------------
def test_d_set_of_integers():
    D = goswami_d_set(UniverseSet(INTEGERS), seq(2, 3), range(-60, 61))
    assert D.elements == (-60, -30, 0, 30, 60)


def test_d_set_matches_divisibility_scan():
    rng = np.random.default_rng(5)
    A = PrincipalIdealSet(subgroup(2))
    window = range(-200, 201)
    checked = 0
    while checked < 50:
        b = [int(v) for v in rng.integers(-6, 6, endpoint=True, size=int(rng.integers(1, 5, endpoint=True)))]
        sums = subset_sums(INTEGERS, b)[1:]
        if 0 in sums:
            continue
        expected = tuple(d for d in window if d % 2 == 0 and all(d % (2 * y) == 0 for y in sums))
        assert goswami_d_set(A, FiniteSequence.of(INTEGERS, b), window).elements == expected
        checked += 1


def test_d_set_of_integers_matches_divisibility_scan():
    rng = np.random.default_rng(11)
    window = range(-300, 301)
    checked = 0
    while checked < 50:
        b = [int(v) for v in rng.integers(-5, 5, endpoint=True, size=int(rng.integers(1, 4, endpoint=True)))]
        sums = subset_sums(INTEGERS, b)[1:]
        if 0 in sums:
            continue
        expected = tuple(d for d in window if all(d % y == 0 for y in sums))
        assert goswami_d_set(UniverseSet(INTEGERS), FiniteSequence.of(INTEGERS, b), window).elements == expected
        checked += 1


def test_d_set_rejects_zero_sums():
    with pytest.raises(ZeroInFiniteSumsError):
        goswami_d_set(UniverseSet(INTEGERS), seq(1, -1), range(-5, 6))


def test_product_check():
    A = PrincipalIdealSet(subgroup(2))
    check = goswami_product_check(A, HalfLineSet(1), seq(1, 2), [1, -1, 2], range(-12, 13))
    assert check.d_set == (-12, 0, 12)
    assert check.missing_x == (-1,)
    assert not check.complete
    assert len(check.factorizations) == 4
    assert all(f.recheck(A, HalfLineSet(1)) for f in check.factorizations)


def test_product_check_reports_missing_h():
    check = goswami_product_check(UniverseSet(INTEGERS), ExplicitSet(INTEGERS, [100]), seq(1), [1], range(-3, 4))
    assert check.missing_x == (1,)
    assert check.factorizations == ()


# ----------------------------------------------------------------------
# Free semigroup
# ----------------------------------------------------------------------
def test_quotient_set_misses_powers_of_b():
    report = freesemigroup_counterexample(12)
    assert report.intersection_empty
    assert ("ba", "aa") in report.quotient_members
    assert all(w.endswith("a") for w, _ in report.quotient_members)


def test_pairs_checked_count():
    assert freesemigroup_counterexample(5).pairs_checked == 44


def test_free_word_guard():
    with pytest.raises(LengthGuardError):
        freesemigroup_counterexample(17)


def test_left_quotient_witness():
    A = right_ideal_fa()
    assert left_quotient_witness(A, "ba", 12) == "aa"
    assert left_quotient_witness(A, "b", 12) is None


def test_noncommutative_j_witness():
    A = right_ideal_fa()
    F = [FiniteSequence.of(FREE_AB, ["b", "bb"])]
    w = noncommutative_j_witness(A, F, ("a", "b"))
    assert w.H == IndexSet((1,))
    assert w.spacers == ("a", "a")
    assert w.images == ("aba",)
    assert w.recheck(A, F)


def test_empty_j_family_is_rejected():
    with pytest.raises(SequenceLengthError):
        noncommutative_j_witness(ExplicitSet(FREE_AB, ["ab"]), [], ("a",))
    with pytest.raises(SequenceLengthError):
        j_witness_search(UniverseSet(INTEGERS), [], [0])


def test_families_align_with_witnesses():
    families = [
        (FiniteSequence.of(FREE_AB, ["b"]), FiniteSequence.of(FREE_AB, ["ab"])),
        (FiniteSequence.of(FREE_AB, ["a", "bb"]), FiniteSequence.of(FREE_AB, ["ba", "b"])),
    ]
    report = freesemigroup_counterexample(6, families)
    assert len(report.j_witnesses) == 2
    assert report.j_failures == 0
    A = right_ideal_fa()
    for family, w in zip(families, report.j_witnesses):
        assert w.recheck(A, family)


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------
def test_to_jsonable():
    assert to_jsonable(x + one) == "1 + x"
    assert to_jsonable(Fraction(1, 2)) == "1/2"
    assert to_jsonable(IndexSet((1, 3))) == [1, 3]
    assert to_jsonable({"s": seq(1, 2), 3: np.int64(4)}) == {"s": [1, 2], "3": 4}
