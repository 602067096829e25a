"""Experiment strategies using Strategy Pattern"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config_manager import Param
from .constructions import (
    Certificate,
    avoid_certificate,
    avoid_sequence,
    diff_ipstar_demo,
    dilated_fs_witness,
    freesemigroup_counterexample,
    goswami_product_check,
    k_cr_probe,
    pigeonhole_extract,
    right_ideal_fa,
    sample_families,
    AVOID_FOOTNOTE,
    FREE_AB,
)
from .density import (
    CENTRAL_CAVEAT,
    CustomFamily,
    DilationFamily,
    banach_upper_density_est,
    dilation_invariance_probe,
    folner_defect,
    syndeticity_gap,
    thick_window,
    upper_density,
)
from .errors import (
    GuardExceededError,
    IndexPreconditionError,
    RecheckFailedError,
    SearchExhaustedError,
    UnknownExperimentError,
)
from .largeness import (
    ComplementSet,
    ExplicitSet,
    HalfLineSet,
    IntersectionSet,
    PreimageSet,
    PrincipalIdealSet,
    SetSpec,
    VerdictStatus,
    WindowVerdict,
    certify_ipr_star_window,
    delta_set,
    difference_set,
    dilation_coverage,
    mult_thick_check,
    product_set,
    subset_sums,
)
from .sieve import sieve_primes
from .structures import INTEGERS, POLYNOMIALS, FiniteSequence, Poly, SubgroupSpec
from .utils.logger import Logger

SET_CHOICES = ('even-naturals', 'naturals', 'primes')


@dataclass
class ExperimentContext:
    """Everything a strategy may use besides its parameters"""

    guards: Dict[str, int]
    rng: np.random.Generator
    logger: Logger
    cache_dir: Optional[Path] = None
    workers: int = 1


@dataclass
class ExperimentResult:
    rows: List[Dict[str, Any]] = field(default_factory=list)
    certificates: List[Certificate] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


class ExperimentStrategy(ABC):
    """Abstract base class for experiments"""

    name = ''
    title = ''
    reference = ''
    quote = ''
    claim = ''
    parameters: Tuple[Param, ...] = ()
    randomized = False

    @abstractmethod
    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        """Run the experiment on validated parameters"""
        pass

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        """Cross-field checks. Returns (is_valid, "field: error_message")"""
        return True, ""

    def explain(self) -> str:
        lines = [
            self.title,
            "",
            f"Reference: {self.reference}",
            f"Statement: {self.quote}",
            "",
            self.claim,
            "",
            "Parameters:",
        ]
        for p in self.parameters:
            lines.append(f"  --{p.name.replace('_', '-')}  ({p.kind}, default {p.default!r})  {p.help}")
        return "\n".join(lines)


# ----------------------------------------------------------------------
# Shared helpers
# ----------------------------------------------------------------------
def nonzero_window(radius: int) -> List[int]:
    """Nonzero integers with |n| <= radius in canonical order 1, -1, 2, -2, ..."""
    return [n for n in INTEGERS.enumerate(2 * radius + 1) if n != 0]


def build_named_set(name: str, prime_limit: int, ctx: ExperimentContext) -> SetSpec:
    if name == 'even-naturals':
        return IntersectionSet([PrincipalIdealSet(SubgroupSpec.principal(INTEGERS, 2)), HalfLineSet(1)])
    if name == 'naturals':
        return HalfLineSet(1)
    return sieve_primes(prime_limit, ctx.cache_dir, ctx.guards['max_sieve_limit'], ctx.logger)


def _verdict_certificate(A: SetSpec, verdict: WindowVerdict, rerun: Callable[[], WindowVerdict]) -> Certificate:
    if verdict.certified:
        check = lambda: rerun().certified  # noqa: E731
    else:
        check = lambda: verdict.recheck(A)  # noqa: E731
    return Certificate(
        "certify_ipr_star_window",
        {"A": A.describe(), "r": verdict.r, "window": list(verdict.window)},
        {
            "status": verdict.status,
            "counterexample": verdict.counterexample,
            "nodes_searched": verdict.nodes_searched,
        },
        check,
    )


def _check_range(params: Dict[str, Any]) -> Tuple[bool, str]:
    if params['lo'] > params['hi']:
        return False, "lo: must not exceed hi"
    return True, ""


# ----------------------------------------------------------------------
# 1. ipstar-subgroup
# ----------------------------------------------------------------------
class IpstarSubgroupExperiment(ExperimentStrategy):
    name = 'ipstar-subgroup'
    title = "Finite-index subgroups are IP_r* sets"
    reference = "finite-index subgroup lemma (IP_{r+1}* bound)"
    quote = "If H is a subgroup of G with [G:H] = r < ∞, then H is an IP_{r+1}* set in G."
    claim = (
        "A subgroup of index k meets the finite sums of every sequence of length k + 1, "
        "so kℤ is certified IP_{k+1}* on the window. At r = k - 1 the all-ones sequence "
        "has no finite sum in kℤ. Random sequences of length k + 1 always yield a "
        "contiguous block summing into kℤ."
    )
    parameters = (
        Param('k', 'int', 3, "index of the subgroup kℤ"),
        Param('window_radius', 'int', 10, "window is [-R..R] without 0"),
        Param('minimal_r_scan', 'bool', True, "also report the least certified r"),
        Param('pigeonhole_samples', 'int', 1000, "random sequences for the block extraction"),
        Param('term_bound', 'int', 1_000_000, "random terms are drawn from [-B..B]"),
    )
    randomized = True

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        if params['k'] < 2:
            return False, "k: must be at least 2"
        return True, ""

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        k = params['k']
        h = SubgroupSpec.principal(INTEGERS, k)
        A = PrincipalIdealSet(h)
        window = nonzero_window(params['window_radius'])
        g = ctx.guards
        result = ExperimentResult()

        def certify(r: int) -> WindowVerdict:
            return certify_ipr_star_window(
                A, r, window, g['max_r'], g['max_window'], g['max_search_cost'], ctx.workers
            )

        checks = [('upper', k + 1, VerdictStatus.CERTIFIED)]
        if k - 1 >= 1:
            checks.append(('lower', k - 1, VerdictStatus.FALSIFIED))
        outcome = {}
        for label, r, expected in checks:
            ctx.logger.info(f"Certifying {h.name} at r = {r} over {len(window)} window elements")
            verdict = certify(r)
            outcome[label] = verdict.status is expected
            result.rows.append({
                'check': label,
                'r': r,
                'status': verdict.status,
                'expected': expected,
                'counterexample': verdict.counterexample,
                'nodes_searched': verdict.nodes_searched,
            })
            result.certificates.append(_verdict_certificate(A, verdict, lambda r=r: certify(r)))

        minimal_r = None
        if params['minimal_r_scan']:
            for r in range(1, k + 2):
                verdict = certify(r)
                result.rows.append({'check': 'scan', 'r': r, 'status': verdict.status,
                                    'counterexample': verdict.counterexample,
                                    'nodes_searched': verdict.nodes_searched})
                if verdict.certified:
                    minimal_r = r
                    break

        bound = params['term_bound']
        draws = ctx.rng.integers(-bound, bound, endpoint=True, size=(params['pigeonhole_samples'], k + 1))
        successes = 0
        for index, row in enumerate(draws):
            seq = FiniteSequence(INTEGERS, tuple(int(v) for v in row))
            block = pigeonhole_extract(h, seq)
            if not block.recheck(h, seq):
                raise RecheckFailedError(f"block {block} does not sum into {h.name}")
            successes += 1
            if index < 3:
                result.certificates.append(block.certificate(h, seq))
        ctx.logger.info(f"Pigeonhole extraction succeeded on {successes}/{len(draws)} sequences")

        result.summary = {
            'certified_at_k_plus_1': outcome['upper'],
            'falsified_at_k_minus_1': outcome.get('lower'),
            'minimal_certified_r': minimal_r,
            'pigeonhole_successes': successes,
            'pigeonhole_samples': len(draws),
        }
        return result


# ----------------------------------------------------------------------
# 2. avoid-zx
# ----------------------------------------------------------------------
class AvoidZxExperiment(ExperimentStrategy):
    name = 'avoid-zx'
    title = "Infinite-index ideals of ℤ[x] are not IP* sets"
    reference = "infinite-index subgroup lemma"
    quote = "If H is a subgroup of G with [G:H] = ∞, then H is not an IP* set in G."
    claim = (
        "For an ideal of infinite index there is a sequence none of whose finite sums "
        "lies in the ideal. The greedy construction is run for xℤ[x], 2ℤ[x] and x^2ℤ[x], "
        "and every finite sum of the output is checked."
    )
    parameters = (
        Param('n', 'int', 12, "length of the avoiding sequence for xℤ[x]"),
        Param('n_small', 'int', 4, "length for 2ℤ[x] and x^2ℤ[x]"),
    )

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        for key in ('n', 'n_small'):
            if params[key] > 20:
                return False, f"{key}: at most 20 terms are enumerated"
        return True, ""

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        x = Poly.x()
        targets = [
            (x, params['n']),
            (Poly.const(2), params['n_small']),
            (x * x, params['n_small']),
            (Poly.const(1), params['n_small']),
        ]
        result = ExperimentResult()
        verified = 0
        for generator, n in targets:
            h = SubgroupSpec.principal(POLYNOMIALS, generator)
            row: Dict[str, Any] = {'subgroup': h.name, 'index': str(h.index()), 'n': n}
            try:
                seq = avoid_sequence(h, n, budget=ctx.guards['enumeration_budget'])
            except IndexPreconditionError as e:
                ctx.logger.info(f"{h.name}: {e}")
                row.update({'status': 'finite-index', 'sequence': None, 'sums_checked': 0})
                result.rows.append(row)
                continue
            ctx.logger.info(f"{h.name}: avoiding sequence of length {n} found")
            verified += 1
            row.update({'status': 'avoiding', 'sequence': seq, 'sums_checked': (1 << n) - 1})
            result.rows.append(row)
            result.certificates.append(avoid_certificate(h, seq))
        result.summary = {'avoiding_sequences': verified, 'footnote': AVOID_FOOTNOTE}
        return result


# ----------------------------------------------------------------------
# 3. jdiff
# ----------------------------------------------------------------------
class JdiffExperiment(ExperimentStrategy):
    name = 'jdiff'
    title = "A - A is an IP* set for a J-set A"
    reference = "difference theorem for J-sets"
    quote = "If A is a J-set in a commutative semigroup S, then A - A is an IP* set in S."
    claim = (
        "If A is a J-set then A - A meets every IP set: applying the J-property to the "
        "family (y, x + y) gives a and H with a + Σ_H y and a + Σ_H (x + y) both in A, "
        "so Σ_H x is a difference of two members of A. Run on seeded random sequences."
    )
    parameters = (
        Param('samples', 'int', 100, "number of random sequences"),
        Param('length', 'int', 8, "sequence length"),
        Param('lo', 'int', 1, "smallest term", signed=True),
        Param('hi', 'int', 50, "largest term", signed=True),
        Param('y_window', 'int_list', [1], "y_n is the least element of this window", signed=True),
        Param('a_window', 'int', 64, "shifts a range over the first W integers"),
        Param('set', 'str', 'even-naturals', "the J-set A", choices=SET_CHOICES),
        Param('prime_limit', 'int', 10_000, "sieve limit when set = primes"),
    )
    randomized = True

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        if params['length'] > 12:
            return False, "length: at most 12 terms"
        return _check_range(params)

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        A = build_named_set(params['set'], params['prime_limit'], ctx)
        a_window = INTEGERS.enumerate(params['a_window'])
        draws = ctx.rng.integers(params['lo'], params['hi'], endpoint=True,
                                 size=(params['samples'], params['length']))
        result = ExperimentResult()
        successes = 0
        for index, row in enumerate(draws):
            x_seq = FiniteSequence(INTEGERS, tuple(int(v) for v in row))
            try:
                w = diff_ipstar_demo(A, x_seq, params['y_window'], a_window)
            except SearchExhaustedError as e:
                result.rows.append({'sample': index, 'x': x_seq, 'status': 'exhausted', 'grid': e.grid})
                continue
            successes += 1
            result.rows.append({
                'sample': index, 'x': x_seq, 'status': 'found', 'H': w.H, 'sum': w.total,
                'minuend': w.minuend, 'subtrahend': w.subtrahend, 'a': w.a,
            })
            result.certificates.append(w.certificate(A, x_seq))
        ctx.logger.info(f"Difference witnesses found for {successes}/{len(draws)} sequences")
        result.summary = {'set': A.describe(), 'successes': successes, 'samples': len(draws)}
        return result


# ----------------------------------------------------------------------
# 4. cr-diff
# ----------------------------------------------------------------------
class CrDiffExperiment(ExperimentStrategy):
    name = 'cr-diff'
    title = "A - A is an IP_r* set for a 2-CR set A"
    reference = "difference theorem for 2-CR sets"
    quote = "If A is a 2-CR set in a commutative semigroup S, then A - A is an IP_r* set in S for some r."
    claim = (
        "For a k-CR set, families of k sequences indexed by {1..r} admit a shift a and "
        "H ⊆ {1..r} landing every shifted partial sum in A. With k = 2 the two images "
        "differ by Σ_H (g - f), exhibiting that difference in A - A."
    )
    parameters = (
        Param('r', 'int', 4, "sequences are indexed by {1..r}"),
        Param('families', 'int', 50, "number of sampled pairs"),
        Param('lo', 'int', 1, "smallest term", signed=True),
        Param('hi', 'int', 20, "largest term", signed=True),
        Param('a_window', 'int', 64, "shifts a range over the first W integers"),
        Param('set', 'str', 'even-naturals', "the set A", choices=SET_CHOICES),
        Param('prime_limit', 'int', 10_000, "sieve limit when set = primes"),
    )
    randomized = True

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        if params['r'] > 20:
            return False, "r: at most 20 terms"
        return _check_range(params)

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        A = build_named_set(params['set'], params['prime_limit'], ctx)
        families = sample_families(ctx.rng, 2, params['r'], params['families'], params['lo'], params['hi'])
        probe = k_cr_probe(A, 2, params['r'], families, INTEGERS.enumerate(params['a_window']))
        result = ExperimentResult()
        for index, w in enumerate(probe.witnesses):
            f, g = families[index]
            result.rows.append({
                'family': index, 'f': f, 'g': g, 'H': w.H, 'a': w.a,
                'difference': w.images[1] - w.images[0],
            })
            result.certificates.append(w.certificate(A, families[index]))
        if probe.failure is not None:
            f, g = families[probe.failure_index]
            result.rows.append({'family': probe.failure_index, 'f': f, 'g': g, 'H': None,
                                'grid': probe.failure.grid})
        ctx.logger.info(f"2-CR probe passed {len(probe.witnesses)} families")
        result.summary = {
            'set': A.describe(),
            'passed': probe.passed,
            'families_passed': len(probe.witnesses),
            'failure_index': probe.failure_index,
        }
        return result


# ----------------------------------------------------------------------
# 5. goswami-primes
# ----------------------------------------------------------------------
class GoswamiPrimesExperiment(ExperimentStrategy):
    name = 'goswami-primes'
    title = "(P - P)(P - P) contains every multiple of some k"
    reference = "Goswami's theorem on products of prime differences"
    quote = "There is a k in ℕ with k·ℕ ⊆ (P - P)·(P - P)."
    claim = (
        "There is a k with kℕ contained in (P - P)·(P - P). For each candidate k up to "
        "k_max the multiples j·k <= M missing from the product set are listed; the least "
        "k with none missing is reported as found at this scale, not as the global minimum."
    )
    parameters = (
        Param('prime_limit', 'int', 1_000_000, "sieve limit for P"),
        Param('M', 'int', 10_000, "largest multiple checked"),
        Param('k_max', 'int', 100, "candidates k = 1..k_max"),
        Param('certified_multiples', 'int', 5, "factorizations embedded for the covering k"),
    )

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        if params['prime_limit'] < params['M']:
            return False, "prime_limit: must be at least M so every difference up to M is evaluable"
        return True, ""

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        M = params['M']
        P = sieve_primes(params['prime_limit'], ctx.cache_dir, ctx.guards['max_sieve_limit'], ctx.logger)
        D = difference_set(P, M)
        S = product_set(D, D, bound=M)
        result = ExperimentResult()
        result.rows.append({'check': 'sieve', 'limit': P.limit, 'prime_count': P.count()})

        covering: List[int] = []
        for k in range(1, params['k_max'] + 1):
            report = dilation_coverage(k, S, M)
            if report.covered:
                covering.append(k)
            result.rows.append({
                'check': 'coverage', 'k': k, 'checked': report.checked,
                'missing_count': len(report.missing), 'missing': list(report.missing),
            })
        ctx.logger.info(f"Covering k values up to {params['k_max']}: {covering[:10]}")

        if covering:
            k = covering[0]
            for n in range(k, min(M, k * params['certified_multiples']) + 1, k):
                result.certificates.append(self._product_certificate(P, D, S, n))
        result.summary = {
            'prime_count': P.count(),
            'min_covering_k': covering[0] if covering else None,
            'covering_k': covering,
            'note': "covering k is the least found at this scale",
        }
        return result

    @staticmethod
    def _product_certificate(P, D, S, n: int) -> Certificate:
        a, b = S.factorization(n)
        pa, pb = D.witness(a), D.witness(b)

        def check() -> bool:
            return (
                a * b == n
                and all(P.contains(p) for p in pa + pb)
                and pa[0] - pa[1] == a
                and pb[0] - pb[1] == b
            )

        return Certificate(
            "product_membership",
            {"n": n, "set": S.describe()},
            {"factors": [a, b], "left_primes": list(pa), "right_primes": list(pb)},
            check,
        )


# ----------------------------------------------------------------------
# 6. goswami-generic
# ----------------------------------------------------------------------
def build_b_set(name: str) -> SetSpec:
    if name == 'naturals':
        return HalfLineSet(1)
    if name == 'evens':
        return PrincipalIdealSet(SubgroupSpec.principal(INTEGERS, 2))
    return ComplementSet(ExplicitSet(INTEGERS, [0]))


class GoswamiGenericExperiment(ExperimentStrategy):
    name = 'goswami-generic'
    title = "Products B·A cover the dilations r·x"
    reference = "product theorem for IP* and IP_s* sets in large integral domains"
    quote = (
        "If R is a large integral domain, A is IP* and B is IP_s*, then there is an IP* set D "
        "with ⟨r⟩ \\ {0} ⊆ A·B for every r in D."
    )
    claim = (
        "Let A be an IP* set and b a sequence with 0 not among its finite sums. For "
        "D = {d in A : d in yA for every finite sum y of b} and any x with some finite "
        "sum Σ_H x·b_i in B, every r·x with r in D factors as (Σ_H x·b_i)·a' with a' in A."
    )
    parameters = (
        Param('modulus', 'int', 2, "A = modulus·ℤ"),
        Param('b', 'int_list', [1, 2], "the sequence b", signed=True),
        Param('b_set', 'str', 'naturals', "the set B", choices=('naturals', 'nonzero', 'evens')),
        Param('x_radius', 'int', 10, "x ranges over nonzero |x| <= R"),
        Param('r_radius', 'int', 60, "D is computed on [-R..R]"),
        Param('certified', 'int', 20, "factorizations embedded as certificates"),
    )

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        b = params['b']
        if len(b) > 12:
            return False, "b: at most 12 terms"
        if any(v == 0 for v in subset_sums(INTEGERS, b)[1:]):
            return False, "b: finite sums of b contain 0"
        return True, ""

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        A = PrincipalIdealSet(SubgroupSpec.principal(INTEGERS, params['modulus']))
        B = build_b_set(params['b_set'])
        b = FiniteSequence(INTEGERS, tuple(params['b']))
        radius = params['r_radius']
        check = goswami_product_check(
            A, B, b, nonzero_window(params['x_radius']), list(range(-radius, radius + 1))
        )
        result = ExperimentResult()
        per_x: Dict[int, int] = {}
        for f in check.factorizations:
            per_x[f.x] = per_x.get(f.x, 0) + 1
        for x, H in check.h_choices:
            sums_b = b.sum_over(H)
            result.rows.append({'x': x, 'H': H, 'sum_b': sums_b, 'left': x * sums_b,
                                'factorizations': per_x.get(x, 0)})
        for x in check.missing_x:
            result.rows.append({'x': x, 'H': None, 'factorizations': 0})
        for f in check.factorizations[:params['certified']]:
            result.certificates.append(f.certificate(A, B))
        ctx.logger.info(f"D has {len(check.d_set)} elements; {len(check.missing_x)} x without H")
        result.summary = {
            'd_set': list(check.d_set),
            'factorizations': len(check.factorizations),
            'missing_x': list(check.missing_x),
        }
        return result


# ----------------------------------------------------------------------
# 7. freesemigroup
# ----------------------------------------------------------------------
class FreeSemigroupExperiment(ExperimentStrategy):
    name = 'freesemigroup'
    title = "In the free semigroup A^-1 A need not be IP*"
    reference = "J-sets in noncommutative semigroups, free semigroup example"
    quote = "In the free semigroup on {a, b}, A = F·a is a J-set while A^-1 A misses FS(b, b, b, ...)."
    claim = (
        "In the free semigroup on {a, b}, A = F·a is a J-set, yet A^-1 A contains no "
        "power of b, so it misses the IP-set generated by b, bb, bbb, .... The check is "
        "exhaustive over words up to the configured length."
    )
    parameters = (
        Param('max_length', 'int', 12, "longest word u·b^n examined"),
        Param('families', 'int', 8, "random families for the J-witness search"),
        Param('family_length', 'int', 3, "terms per sequence"),
        Param('word_length', 'int', 3, "longest random word"),
    )
    randomized = True

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        if not 3 <= params['max_length'] <= 16:
            return False, "max_length: must lie in 3..16"
        return True, ""

    def _random_word(self, rng: np.random.Generator, max_len: int) -> str:
        length = int(rng.integers(1, max_len, endpoint=True))
        return "".join(FREE_AB.alphabet[int(i)] for i in rng.integers(0, 2, size=length))

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        families = []
        for _ in range(params['families']):
            families.append(tuple(
                FiniteSequence(FREE_AB, tuple(self._random_word(ctx.rng, params['word_length'])
                                              for _ in range(params['family_length'])))
                for _ in range(2)
            ))
        L = params['max_length']
        report = freesemigroup_counterexample(L, families)
        A = right_ideal_fa()
        result = ExperimentResult()
        for n in range(1, L - 1):
            w = "b" * n
            result.rows.append({'kind': 'power', 'word': w, 'in_quotient': w in report.intersection})
        for w, u in report.quotient_members:
            result.rows.append({'kind': 'member', 'word': w, 'in_quotient': True, 'witness_u': u})
        result.certificates.append(Certificate(
            "freesemigroup_counterexample",
            {"A": A.describe(), "max_length": L},
            {"pairs_checked": report.pairs_checked, "intersection": list(report.intersection)},
            lambda: freesemigroup_counterexample(L).intersection_empty,
        ))
        for family, w in zip(families, report.j_witnesses):
            if w is None:
                continue
            result.certificates.append(Certificate(
                "noncommutative_j_witness",
                {"A": A.describe(), "F": list(family)},
                {"H": w.H, "spacers": list(w.spacers), "images": list(w.images)},
                lambda w=w, family=family: w.recheck(A, family),
            ))
        ctx.logger.info(f"Checked {report.pairs_checked} pairs; intersection empty: {report.intersection_empty}")
        result.summary = {
            'intersection_empty': report.intersection_empty,
            'pairs_checked': report.pairs_checked,
            'j_witnesses': len(report.j_witnesses) - report.j_failures,
            'j_failures': report.j_failures,
            'footnote': report.footnote,
        }
        return result


# ----------------------------------------------------------------------
# 8. zx-partition
# ----------------------------------------------------------------------
class ZxPartitionExperiment(ExperimentStrategy):
    name = 'zx-partition'
    title = "No cell of ℤ[x] = xℤ[x] ∪ complement is both additively and multiplicatively large"
    reference = "partition theorem for integral domains that are not large"
    quote = (
        "If R is an integral domain that is not large, some finite partition of R has no cell "
        "that is both additively and multiplicatively central."
    )
    claim = (
        "xℤ[x] has infinite additive index, so a sequence avoids it with all finite sums "
        "and it is not additively IP*. Its complement cannot contain {1, x}·a for any a, "
        "since x·a always lies in xℤ[x], so the complement is not multiplicatively thick. "
        "Dilation-window densities show xℤ[x] carrying density near 1."
    )
    parameters = (
        Param('n', 'int', 12, "length of the avoiding sequence"),
        Param('windows', 'int_list', [16, 64, 256], "window sizes for the thickness check"),
        Param('seed_size', 'int', 8, "seed window of the dilation family"),
        Param('n_max', 'int', 8, "largest dilation window index"),
    )

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        if params['n'] > 20:
            return False, "n: at most 20 terms are enumerated"
        return True, ""

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        x = Poly.x()
        h = SubgroupSpec.principal(POLYNOMIALS, x)
        ideal = PrincipalIdealSet(h)
        complement = ComplementSet(ideal)
        result = ExperimentResult()

        seq = avoid_sequence(h, params['n'], budget=ctx.guards['enumeration_budget'])
        result.rows.append({'diagnostic': 'avoid', 'cell': ideal.describe(), 'sequence': seq,
                            'sums_checked': (1 << params['n']) - 1})
        result.certificates.append(avoid_certificate(h, seq))

        F = [Poly.const(1), x]
        thick_found = False
        obstruction = None
        for size in params['windows']:
            check = mult_thick_check(complement, F, POLYNOMIALS.enumerate(size))
            thick_found = thick_found or check.found
            obstruction = check.analytic_obstruction
            result.rows.append({'diagnostic': 'mult_thick', 'cell': complement.describe(), 'window': size,
                                'witness': check.witness, 'analytic_obstruction': check.analytic_obstruction})

        seed = [p for p in POLYNOMIALS.enumerate(params['seed_size'] + 1) if not p.is_zero()][:params['seed_size']]
        family = DilationFamily(POLYNOMIALS, seed, x)
        for cell in (ideal, complement):
            probe = dilation_invariance_probe(cell, x, family, params['n_max'])
            for which, estimate in (('base', probe.base), ('dilated', probe.dilated)):
                row = {'diagnostic': 'density', 'cell': cell.describe(), 'which': which}
                row.update(estimate.to_row())
                result.rows.append(row)

        ctx.logger.info(f"Avoiding sequence verified; thick witness found: {thick_found}")
        result.summary = {
            'additive_cell_avoided': True,
            'complement_thick_witness': thick_found,
            'analytic_obstruction': obstruction,
            'caveat': CENTRAL_CAVEAT,
        }
        return result


# ----------------------------------------------------------------------
# 9. delta-r-primes
# ----------------------------------------------------------------------
def delta_avoiding_subset(member: Sequence[bool], r: int, B: int) -> Tuple[Optional[Tuple[int, ...]], int]:
    """Least r-subset of [1..B] containing 1 whose positive differences all miss ``member``.

    Δ-sets are translation invariant, so fixing the least element at 1
    loses nothing.
    """
    visited = 0

    def extend(chosen: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
        nonlocal visited
        if len(chosen) == r:
            return chosen
        for s in range(chosen[-1] + 1, B + 1):
            visited += 1
            if any(member[s - t] for t in chosen):
                continue
            found = extend(chosen + (s,))
            if found is not None:
                return found
        return None

    return extend((1,)), visited


class DeltaRPrimesExperiment(ExperimentStrategy):
    name = 'delta-r-primes'
    title = "P - P meets every Δ_r set"
    reference = "Huang-Sheng theorem on prime differences"
    quote = "There is an r in ℕ such that P - P is a Δ_r* set."
    claim = (
        "P - P is a Δ_r* set: it meets the positive differences of every r-element set. "
        "All r-subsets of [1..B] are scanned for one whose differences all miss P - P; "
        "either a window counterexample or survival is reported."
    )
    parameters = (
        Param('r_values', 'int_list', [3, 4], "subset sizes"),
        Param('B', 'int', 60, "subsets of [1..B]"),
        Param('prime_limit', 'int', 10_000, "sieve limit for P"),
    )

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        if params['prime_limit'] < params['B']:
            return False, "prime_limit: must be at least B"
        if any(r < 2 for r in params['r_values']):
            return False, "r_values: Δ-sets need r >= 2"
        return True, ""

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        B = params['B']
        P = sieve_primes(params['prime_limit'], ctx.cache_dir, ctx.guards['max_sieve_limit'], ctx.logger)
        D = difference_set(P, B)
        member = [False] + [D.contains(d) for d in range(1, B)]
        result = ExperimentResult()
        survived = []
        for r in params['r_values']:
            cost = math.comb(B - 1, r - 1)
            if cost > ctx.guards['max_search_cost']:
                raise GuardExceededError(f"Δ_{r} scan over [1..{B}] exceeds max_search_cost", cost)
            subset, visited = delta_avoiding_subset(member, r, B)
            row = {'r': r, 'B': B, 'nodes_searched': visited}
            if subset is None:
                survived.append(r)
                row.update({'status': 'survived', 'counterexample': None})
                check = lambda r=r: delta_avoiding_subset(member, r, B)[0] is None  # noqa: E731
                witness: Dict[str, Any] = {'status': 'survived', 'nodes_searched': visited}
            else:
                delta = delta_set(list(subset))
                row.update({'status': 'falsified', 'counterexample': list(subset), 'delta': list(delta.elements)})
                check = lambda delta=delta: not any(D.contains(d) for d in delta.elements)  # noqa: E731
                witness = {'status': 'falsified', 'counterexample': list(subset)}
            result.rows.append(row)
            result.certificates.append(Certificate(
                "delta_r_scan", {"set": D.describe(), "r": r, "B": B}, witness, check
            ))
            ctx.logger.info(f"Δ_{r} scan over [1..{B}]: {row['status']}")
        result.summary = {'survived_r': survived, 'prime_count': P.count()}
        return result


# ----------------------------------------------------------------------
# 10. dilation-ipstar
# ----------------------------------------------------------------------
class DilationIpstarExperiment(ExperimentStrategy):
    name = 'dilation-ipstar'
    title = "r·A is an IP* set when A is"
    reference = "dilation lemma for large integral domains"
    quote = "If R is a large integral domain and A is IP* in R, then r·A is IP* in R for every r ≠ 0."
    claim = (
        "In a domain where every nonzero ideal has finite index, dilating an IP* set keeps "
        "it IP*. Blocks of the sequence summing into rℤ are divided by r, a finite sum of "
        "the quotients lands in A, and the union of the chosen blocks sums into r·A."
    )
    parameters = (
        Param('modulus', 'int', 3, "A = modulus·ℤ"),
        Param('r_values', 'int_list', [2, 3, 5], "dilation factors"),
        Param('samples', 'int', 20, "random sequences per factor"),
        Param('length', 'int', 24, "sequence length"),
        Param('lo', 'int', -1000, "smallest term", signed=True),
        Param('hi', 'int', 1000, "largest term", signed=True),
    )
    randomized = True

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        needed = params['modulus'] * (max(params['r_values']) + 1)
        if params['length'] < needed:
            return False, f"length: need at least {needed} terms for modulus blocks at the largest r"
        return _check_range(params)

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        A = PrincipalIdealSet(SubgroupSpec.principal(INTEGERS, params['modulus']))
        result = ExperimentResult()
        found = 0
        for r in params['r_values']:
            draws = ctx.rng.integers(params['lo'], params['hi'], endpoint=True,
                                     size=(params['samples'], params['length']))
            for index, row in enumerate(draws):
                seq = FiniteSequence(INTEGERS, tuple(int(v) for v in row))
                w = dilated_fs_witness(A, r, seq)
                found += 1
                result.rows.append({'r': r, 'sample': index, 'blocks': len(w.blocks), 'K': w.K,
                                    'H': w.H, 'sum': w.total, 'cofactor': w.cofactor})
                result.certificates.append(w.certificate(A, seq))
        ctx.logger.info(f"Dilated finite-sum witnesses: {found}")
        result.summary = {'witnesses': found, 'set': A.describe()}
        return result


# ----------------------------------------------------------------------
# 11. large-domain
# ----------------------------------------------------------------------
def moving_intervals(count: int) -> CustomFamily:
    """F_n = [n^2 + 1 .. n^2 + n]: intervals drifting right while they grow."""
    return CustomFamily(INTEGERS, [list(range(n * n + 1, n * n + n + 1)) for n in range(1, count + 1)])


class LargeDomainExperiment(ExperimentStrategy):
    name = 'large-domain'
    title = "In ℤ some cell of every finite partition is additively and multiplicatively large"
    reference = "partition theorem for large integral domains, with the r^-1 A and thickness lemmas"
    quote = (
        "If R is a large integral domain, then in any partition of R into finitely many cells "
        "at least one cell is both additively and multiplicatively central."
    )
    claim = (
        "ℤ is a domain whose nonzero ideals all have finite index. For the partition "
        "ℤ = kℤ ∪ (ℤ \\ kℤ), kℤ is certified IP_{k+1}* on the window, each preimage "
        "r^-1(kℤ) = (k / gcd(k, r))ℤ is certified IP* at its own index, and kℤ \\ {0} "
        "contains F·a for F = {1..k}. The complement is falsified and can never contain "
        "k·a. Banach density, gap and thickness diagnostics are reported per cell."
    )
    parameters = (
        Param('k', 'int', 4, "partition ℤ = kℤ ∪ (ℤ \\ kℤ)"),
        Param('factors', 'int_list', [2, 3, 4], "nonzero factors r for the preimages r^-1(kℤ)", signed=True),
        Param('window_radius', 'int', 5, "IP_r* window is [-R..R] without 0"),
        Param('thick_radius', 'int', 50, "candidates a for F·a range over [-R..R] without 0"),
        Param('N', 'int', 1000, "density and gap diagnostics run over [1..N]"),
        Param('L', 'int', 100, "interval length for the Banach density estimate"),
        Param('folner_windows', 'int', 30, "moving intervals [n^2+1..n^2+n] up to this n"),
    )

    def validate_config(self, params: Dict[str, Any]) -> Tuple[bool, str]:
        k = params['k']
        if k < 2:
            return False, "k: must be at least 2"
        if params['window_radius'] < k or params['thick_radius'] < k:
            return False, "window_radius: windows must reach k so that kℤ meets them"
        if 0 in params['factors']:
            return False, "factors: must be nonzero"
        if params['L'] > params['N']:
            return False, "L: must not exceed N"
        return True, ""

    def run(self, params: Dict[str, Any], ctx: ExperimentContext) -> ExperimentResult:
        k = params['k']
        ideal = PrincipalIdealSet(SubgroupSpec.principal(INTEGERS, k))
        cells = {'multiples': ideal, 'non-multiples': ComplementSet(ideal)}
        window = nonzero_window(params['window_radius'])
        candidates = nonzero_window(params['thick_radius'])
        F = list(range(1, k + 1))
        g = ctx.guards
        result = ExperimentResult()

        def certify(A: SetSpec, r: int) -> WindowVerdict:
            return certify_ipr_star_window(
                A, r, window, g['max_r'], g['max_window'], g['max_search_cost'], ctx.workers
            )

        additive, thick = [], []
        for label, cell in cells.items():
            verdict = certify(cell, k + 1)
            if verdict.certified:
                additive.append(label)
            result.rows.append({'check': 'additive-ipstar', 'cell': label, 'r': k + 1,
                                'status': verdict.status, 'counterexample': verdict.counterexample,
                                'nodes_searched': verdict.nodes_searched})
            result.certificates.append(_verdict_certificate(cell, verdict, lambda c=cell: certify(c, k + 1)))

            check = mult_thick_check(cell, F, candidates)
            if check.found:
                thick.append(label)
                a = check.witness
                result.certificates.append(Certificate(
                    "mult_thick_check",
                    {"A": cell.describe(), "F": F},
                    {"a": a},
                    lambda c=cell, a=a: all(c.contains(f * a) for f in F),
                ))
            elif check.analytic_obstruction:
                result.certificates.append(Certificate(
                    "mult_thick_obstruction",
                    {"A": cell.describe(), "F": F},
                    {"obstruction": check.analytic_obstruction},
                    lambda: all(ideal.contains(k * a) for a in candidates),
                ))
            result.rows.append({'check': 'mult-thick', 'cell': label, 'F': F, 'witness': check.witness,
                                'obstruction': check.analytic_obstruction})
        ctx.logger.info(f"Additively IP* cells: {additive}; multiplicatively thick cells: {thick}")

        preimages_ok = True
        for r in params['factors']:
            preimage = PreimageSet(r, ideal)
            index = k // math.gcd(k, r)
            verdict = certify(preimage, index + 1)
            contains_ideal = all(preimage.contains(x) for x in window if ideal.contains(x))
            preimages_ok = preimages_ok and verdict.certified and contains_ideal
            result.rows.append({'check': 'preimage', 'cell': preimage.describe(), 'r': index + 1,
                                'status': verdict.status, 'counterexample': verdict.counterexample,
                                'nodes_searched': verdict.nodes_searched, 'contains_kZ': contains_ideal})
            result.certificates.append(
                _verdict_certificate(preimage, verdict, lambda p=preimage, i=index: certify(p, i + 1))
            )

        N, L = params['N'], params['L']
        family = moving_intervals(params['folner_windows'])
        defect = folner_defect(family, 1, params['folner_windows'])
        for label, cell in cells.items():
            banach = banach_upper_density_est(cell, N, L)
            gap = syndeticity_gap(cell, N)
            moving = upper_density(cell, family, params['folner_windows'])
            result.rows.append({
                'check': 'density',
                'cell': label,
                'banach_lower_bound': banach.value,
                'banach_start': banach.argmax,
                'moving_density': moving.value,
                'longest_gap': gap.longest_run,
                'gap_start': gap.run_start,
                'additive_thick_start': thick_window(cell, k - 1, N),
            })

        result.summary = {
            'additive_ipstar_cells': additive,
            'multiplicative_thick_cells': thick,
            'both_large_cells': [label for label in additive if label in thick],
            'preimages_certified': preimages_ok,
            'folner_defect': defect,
        }
        return result


class ExperimentFactory:
    """Factory for creating experiment strategies"""

    _strategies = {
        'ipstar-subgroup': IpstarSubgroupExperiment,
        'avoid-zx': AvoidZxExperiment,
        'jdiff': JdiffExperiment,
        'cr-diff': CrDiffExperiment,
        'goswami-primes': GoswamiPrimesExperiment,
        'goswami-generic': GoswamiGenericExperiment,
        'freesemigroup': FreeSemigroupExperiment,
        'zx-partition': ZxPartitionExperiment,
        'delta-r-primes': DeltaRPrimesExperiment,
        'dilation-ipstar': DilationIpstarExperiment,
        'large-domain': LargeDomainExperiment,
    }

    @classmethod
    def create(cls, name: str) -> ExperimentStrategy:
        """Create an experiment strategy by name"""
        strategy_class = cls._strategies.get(name)
        if not strategy_class:
            known = ", ".join(cls._strategies)
            raise UnknownExperimentError(f"Unknown experiment: {name} (known: {known})")
        return strategy_class()

    @classmethod
    def get_available_types(cls) -> list:
        """Get list of registered experiment names"""
        return list(cls._strategies.keys())

    @classmethod
    def get_type_display_names(cls) -> Dict[str, str]:
        """Get one-line titles for the registered experiments"""
        return {name: strategy.title for name, strategy in cls._strategies.items()}
