"""Tests for membership oracles, finite sums and IP_r* window certification"""

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ipstar_lab.errors import GuardExceededError, KindMismatchError, LengthGuardError, SupportExceededError
from ipstar_lab.largeness import (
    ComplementSet,
    DifferenceSet,
    DilationSet,
    ExplicitSet,
    HalfLineSet,
    IntersectionSet,
    PreimageSet,
    PrincipalIdealSet,
    UnionSet,
    UniverseSet,
    VerdictStatus,
    WindowVerdict,
    certify_ipr_star_window,
    delta_set,
    difference_set,
    dilation_coverage,
    fp_ordered_enumerate,
    fs_enumerate,
    ipr_search_cost,
    mult_thick_check,
    product_set,
)
from ipstar_lab.sieve import sieve_primes
from ipstar_lab.structures import INTEGERS, POLYNOMIALS, FiniteSequence, GroundStructure, IndexSet, Poly, SubgroupSpec

x = Poly.x()


def ideal(k):
    return PrincipalIdealSet(SubgroupSpec.principal(INTEGERS, k))


def nonzero_window(radius):
    return [n for n in INTEGERS.enumerate(2 * radius + 1) if n != 0]


# ----------------------------------------------------------------------
# Finite sums
# ----------------------------------------------------------------------
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=12))
def test_fs_matches_brute_force(terms):
    sums = fs_enumerate(FiniteSequence.of(INTEGERS, terms))
    assert len(sums) == 2 ** len(terms) - 1
    for size in range(1, len(terms) + 1):
        for combo in itertools.combinations(range(1, len(terms) + 1), size):
            assert sums[IndexSet(combo)] == sum(terms[i - 1] for i in combo)


def test_fs_binary_counter_order():
    keys = list(fs_enumerate(FiniteSequence.of(INTEGERS, [1, 2, 3])).keys())
    assert keys[:3] == [IndexSet((1,)), IndexSet((2,)), IndexSet((1, 2))]


def test_fs_length_guard():
    seq = FiniteSequence.of(INTEGERS, [1] * 26)
    with pytest.raises(LengthGuardError):
        fs_enumerate(seq)
    with pytest.raises(LengthGuardError):
        fs_enumerate(FiniteSequence.of(INTEGERS, [1] * 6), max_length=5)


def test_fs_needs_addition():
    words = FiniteSequence.of(GroundStructure.free_semigroup("ab"), ["a", "b"])
    with pytest.raises(KindMismatchError):
        fs_enumerate(words)


def test_fp_keeps_increasing_order():
    words = FiniteSequence.of(GroundStructure.free_semigroup("abc"), ["a", "b", "c"])
    products = fp_ordered_enumerate(words)
    assert products[IndexSet((1, 3))] == "ac"
    assert products[IndexSet((1, 2, 3))] == "abc"
    assert len(products) == 7


def test_fs_over_polynomials():
    sums = fs_enumerate(FiniteSequence.of(POLYNOMIALS, [x, Poly.const(1)]))
    assert sums[IndexSet((1, 2))] == x + Poly.const(1)


# ----------------------------------------------------------------------
# Membership oracles
# ----------------------------------------------------------------------
def test_explicit_and_universe():
    A = ExplicitSet(INTEGERS, [3, 1, 2])
    assert A.elements == (1, 2, 3)
    assert 2 in A and 5 not in A
    assert UniverseSet(INTEGERS).contains(-99)
    assert not HalfLineSet(1).contains(0)
    assert HalfLineSet(5).first_member(100) == 5


def test_primes_support_is_bounded():
    P = sieve_primes(30)
    assert list(P.primes) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert not P.contains(-5)
    with pytest.raises(SupportExceededError):
        P.contains(31)


def test_indicator():
    assert list(ideal(3).indicator(0, 6)) == [True, False, False, True, False, False, True]
    with pytest.raises(KindMismatchError):
        PrincipalIdealSet(SubgroupSpec.principal(POLYNOMIALS, x)).indicator(0, 3)


def test_explicit_difference_set():
    D = difference_set(ExplicitSet(INTEGERS, [1, 4, 6]), 10)
    assert D.contains(5) and D.contains(-3) and D.contains(0)
    assert not D.contains(4)
    assert D.witness(5) == (6, 1)
    with pytest.raises(SupportExceededError):
        D.contains(11)
    assert not difference_set(ExplicitSet(INTEGERS, [1, 4, 6]), 10, positive_only=True).contains(-3)


@given(st.sets(st.integers(-40, 40), min_size=1, max_size=8))
def test_difference_set_is_symmetric(S):
    D = difference_set(ExplicitSet(INTEGERS, S), 80)
    assert D.contains(0)
    for d in range(1, 81):
        assert D.contains(d) == D.contains(-d)


def test_prime_difference_set():
    D = difference_set(sieve_primes(100), 50)
    assert D.contains(1)
    assert D.contains(2)
    assert not D.contains(7)
    s, t = D.witness(2)
    assert s - t == 2


def test_ideal_difference_set():
    D = DifferenceSet(ideal(3), 10)
    assert D.contains(6)
    assert not D.contains(7)


def test_difference_set_needs_wide_support():
    with pytest.raises(SupportExceededError):
        difference_set(sieve_primes(20), 50)


def test_delta_set():
    assert delta_set([1, 4, 6]).elements == (2, 3, 5)
    with pytest.raises(ValueError):
        delta_set([3])
    with pytest.raises(KindMismatchError):
        delta_set([x, Poly.const(1)])


@given(st.sets(st.integers(1, 50), min_size=2, max_size=6))
def test_delta_set_is_positive_part_of_difference_set(S):
    D = DifferenceSet(ExplicitSet(INTEGERS, S), 50)
    positive = {d for d in range(1, 50) if D.contains(d)}
    assert set(delta_set(sorted(S)).elements) == positive


def test_integer_product_set():
    S = product_set(ExplicitSet(INTEGERS, [2, 3]), ExplicitSet(INTEGERS, [5, 7]), bound=50)
    assert S.factorization(21) == (3, 7)
    assert S.contains(10) and S.contains(14)
    assert not S.contains(6)


@given(
    st.sets(st.integers(-30, 30), min_size=1, max_size=6),
    st.sets(st.integers(-30, 30), min_size=1, max_size=6),
)
def test_integer_product_set_matches_brute_force(left, right):
    S = product_set(ExplicitSet(INTEGERS, left), ExplicitSet(INTEGERS, right), bound=500)
    products = {a * b for a in left for b in right}
    for n in range(-500, 501):
        assert S.contains(n) == (n in products)
        pair = S.factorization(n)
        if pair is not None:
            assert pair[0] in left and pair[1] in right and pair[0] * pair[1] == n


def test_product_set_zero():
    S = product_set(ExplicitSet(INTEGERS, [0, 1]), ExplicitSet(INTEGERS, [5]), bound=10)
    assert S.factorization(0) == (0, 5)


def test_polynomial_product_set_uses_pair_window():
    ideal_x = PrincipalIdealSet(SubgroupSpec.principal(POLYNOMIALS, x))
    S = product_set(ideal_x, UniverseSet(POLYNOMIALS), pair_window=POLYNOMIALS.enumerate(10))
    assert S.contains(x * x)
    assert not S.contains(Poly.const(1))
    with pytest.raises(ValueError):
        product_set(ideal_x, UniverseSet(POLYNOMIALS))


def test_dilations():
    three_evens = DilationSet(3, ideal(2))
    assert three_evens.contains(6) and not three_evens.contains(3)
    assert three_evens.cofactor(12) == 4

    x_zx = DilationSet(x, UniverseSet(POLYNOMIALS))
    assert x_zx.contains(x * x)
    assert not x_zx.contains(Poly.const(1))

    z6 = GroundStructure.modular(6)
    doubled = DilationSet(2, UniverseSet(z6))
    assert doubled.contains(4) and not doubled.contains(3)


def test_word_dilations_respect_side():
    words = GroundStructure.free_semigroup("ab")
    ends_in_a = DilationSet("a", UniverseSet(words), side="right")
    assert ends_in_a.contains("ba")
    assert not ends_in_a.contains("a")
    assert not ends_in_a.contains("ab")
    assert DilationSet("a", UniverseSet(words)).contains("ab")


def test_preimage_complement_union_intersection():
    assert PreimageSet(2, ideal(6)).contains(3)
    assert not PreimageSet(2, ideal(6)).contains(2)
    odd = ComplementSet(ideal(2))
    assert odd.contains(3) and not odd.contains(4)
    windowed = ComplementSet(ideal(2), universe=[1, 2, 3])
    with pytest.raises(SupportExceededError):
        windowed.contains(4)
    assert UnionSet([ideal(2), ideal(3)]).contains(9)
    assert not IntersectionSet([ideal(2), ideal(3)]).contains(9)
    assert IntersectionSet([ideal(2), HalfLineSet(1)]).contains(4)


# ----------------------------------------------------------------------
# IP_r* certification
# ----------------------------------------------------------------------
def test_search_cost():
    assert ipr_search_cost(20, 4) == math.comb(23, 4) * 15


@pytest.mark.parametrize("k", [2, 3, 4])
def test_subgroup_certified_above_index_and_falsified_below(k):
    A = ideal(k)
    window = nonzero_window(10)
    upper = certify_ipr_star_window(A, k + 1, window)
    assert upper.status is VerdictStatus.CERTIFIED
    lower = certify_ipr_star_window(A, k - 1, window)
    assert lower.status is VerdictStatus.FALSIFIED
    assert lower.counterexample.terms == (1,) * (k - 1)
    assert lower.recheck(A)


def test_index_is_enough():
    assert certify_ipr_star_window(ideal(3), 3, nonzero_window(10)).certified


def test_parallel_search_matches_sequential():
    A = ideal(3)
    window = nonzero_window(6)
    sequential = certify_ipr_star_window(A, 2, window)
    parallel = certify_ipr_star_window(A, 2, window, workers=2)
    assert parallel.counterexample == sequential.counterexample
    assert parallel.nodes_searched == sequential.nodes_searched


def test_guards():
    window = nonzero_window(10)
    with pytest.raises(GuardExceededError):
        certify_ipr_star_window(ideal(3), 9, window)
    with pytest.raises(GuardExceededError):
        certify_ipr_star_window(ideal(3), 2, window, max_window=5)
    with pytest.raises(GuardExceededError) as info:
        certify_ipr_star_window(ideal(3), 4, window, max_cost=100)
    assert info.value.cost_estimate == ipr_search_cost(20, 4)


def test_window_must_stay_inside_support():
    with pytest.raises(SupportExceededError):
        certify_ipr_star_window(sieve_primes(100), 2, list(range(1, 61)))


@settings(max_examples=40)
@given(
    st.integers(2, 4),
    st.integers(2, 5),
    st.integers(1, 4),
    st.sets(st.sampled_from(nonzero_window(4)), min_size=1, max_size=4),
    st.sets(st.sampled_from(nonzero_window(4)), max_size=3),
)
def test_certification_is_monotone_in_the_window(k, m, r, inner, extra):
    A = UnionSet([ideal(k), ideal(m)])
    small = [w for w in nonzero_window(4) if w in inner]
    large = [w for w in nonzero_window(4) if w in inner | extra]
    narrow = certify_ipr_star_window(A, r, small)
    wide = certify_ipr_star_window(A, r, large)
    if wide.certified:
        assert narrow.certified
    if not narrow.certified:
        assert not wide.certified
        assert narrow.recheck(A)


def test_falsified_verdict_needs_counterexample():
    with pytest.raises(ValueError):
        WindowVerdict(VerdictStatus.FALSIFIED, 2, (1,))


# ----------------------------------------------------------------------
# Coverage and thickness
# ----------------------------------------------------------------------
def test_dilation_coverage():
    assert dilation_coverage(2, ideal(2), 20).covered
    report = dilation_coverage(1, ideal(2), 10)
    assert report.missing == (1, 3, 5, 7, 9)
    assert report.checked == 10


def test_complement_of_x_ideal_is_not_thick():
    complement = ComplementSet(PrincipalIdealSet(SubgroupSpec.principal(POLYNOMIALS, x)))
    check = mult_thick_check(complement, [Poly.const(1), x], POLYNOMIALS.enumerate(64))
    assert not check.found
    assert check.analytic_obstruction is not None


def test_thick_witness_found():
    check = mult_thick_check(ComplementSet(ideal(2)), [1, 3], list(range(1, 11)))
    assert check.witness == 1
    assert check.analytic_obstruction is None
