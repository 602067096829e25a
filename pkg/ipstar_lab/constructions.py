"""Executable versions of the constructive proofs, each with a re-checkable certificate.

Search order is fixed everywhere: index sets in binary-counter order,
candidate elements in the order of the window they come from (or the
structure's canonical order). Results are therefore reproducible bit for
bit, and an exhausted search only ever means "nothing in this grid".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    IndexPreconditionError,
    IpstarLabError,
    KindMismatchError,
    LengthGuardError,
    RecheckFailedError,
    SearchExhaustedError,
    SequenceLengthError,
    ZeroInFiniteSumsError,
)
from .largeness import (
    DilationSet,
    ExplicitSet,
    SetSpec,
    UniverseSet,
    fs_enumerate,
    subset_sums,
)
from .structures import (
    INTEGERS,
    Element,
    FiniteSequence,
    GroundStructure,
    IndexSet,
    Poly,
    StructureKind,
    SubgroupSpec,
)

DEFAULT_A_WINDOW = 64
MAX_J_LENGTH = 20
MAX_AVOID_LENGTH = 20
MAX_DEMO_LENGTH = 12
MAX_FREE_WORD_LENGTH = 16
DEFAULT_ENUMERATION_BUDGET = 200_000


# ----------------------------------------------------------------------
# Certificates
# ----------------------------------------------------------------------
def to_jsonable(value: Any) -> Any:
    """Canonical JSON shape for elements, index sets, sequences and rationals."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, Poly):
        return str(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, IndexSet):
        return list(value.positions)
    if isinstance(value, FiniteSequence):
        return [to_jsonable(t) for t in value.terms]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return str(value)


@dataclass
class Certificate:
    """Serializable outcome record; ``recheck`` is computed when serialized."""

    op: str
    inputs: Dict[str, Any]
    witness: Dict[str, Any]
    check: Callable[[], bool] = field(repr=False, compare=False)

    def recheck(self) -> bool:
        try:
            return bool(self.check())
        except IpstarLabError:
            return False

    def to_json(self) -> Dict[str, Any]:
        return {
            "op": self.op,
            "inputs": to_jsonable(self.inputs),
            "witness": to_jsonable(self.witness),
            "recheck": self.recheck(),
        }


# ----------------------------------------------------------------------
# Pigeonhole extraction (finite index => IP_{r+1}*)
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class PigeonholeBlock:
    """Contiguous positions start..end whose terms sum into the subgroup."""

    start: int
    end: int
    sum: Element

    @property
    def positions(self) -> IndexSet:
        return IndexSet(tuple(range(self.start, self.end + 1)))

    def recheck(self, h: SubgroupSpec, seq: FiniteSequence) -> bool:
        return seq.sum_over(self.positions) == self.sum and h.contains(self.sum)

    def certificate(self, h: SubgroupSpec, seq: FiniteSequence) -> Certificate:
        return Certificate(
            "pigeonhole_extract",
            {"subgroup": h.name, "sequence": seq},
            {"start": self.start, "end": self.end, "sum": self.sum},
            lambda: self.recheck(h, seq),
        )


def _finite_order(h: SubgroupSpec) -> int:
    idx = h.index()
    if not idx.is_finite:
        raise IndexPreconditionError(f"{h.name} has infinite index; pigeonhole extraction needs a finite one")
    return idx.order


def pigeonhole_extract(h: SubgroupSpec, seq: FiniteSequence) -> PigeonholeBlock:
    """Block of consecutive terms summing into h, from the first r + 1 prefix sums."""
    r = _finite_order(h)
    if len(seq) < r + 1:
        raise SequenceLengthError(f"index {r} needs a sequence of length {r + 1}, got {len(seq)}")
    s = h.structure
    prefix = s.zero()
    seen: Dict[Any, int] = {}
    for k in range(1, r + 2):
        prefix = s.add(prefix, seq.term(k))
        if h.contains(prefix):
            return PigeonholeBlock(1, k, prefix)
        label = h.coset_label(prefix)
        if label in seen:
            k1 = seen[label]
            return PigeonholeBlock(k1 + 1, k, seq.sum_over(range(k1 + 1, k + 1)))
        seen[label] = k
    raise RecheckFailedError(f"pigeonhole found no block among {r + 1} prefix sums of {seq.terms}")


def block_decomposition(h: SubgroupSpec, seq: FiniteSequence) -> List[PigeonholeBlock]:
    """Consecutive disjoint blocks H_1 < H_2 < ... each summing into h."""
    r = _finite_order(h)
    blocks: List[PigeonholeBlock] = []
    offset = 0
    while len(seq) - offset >= r + 1:
        window = FiniteSequence(seq.structure, seq.terms[offset:offset + r + 1])
        block = pigeonhole_extract(h, window)
        blocks.append(PigeonholeBlock(block.start + offset, block.end + offset, block.sum))
        offset += block.end
    return blocks


@dataclass(frozen=True)
class DilatedWitness:
    """H = union of blocks picked by K, with the sum over H equal to r times a member of A."""

    r: Element
    blocks: Tuple[PigeonholeBlock, ...]
    K: IndexSet
    H: IndexSet
    total: Element
    cofactor: Element

    def recheck(self, A: SetSpec, seq: FiniteSequence) -> bool:
        s = A.structure
        return (
            seq.sum_over(self.H) == self.total
            and s.mul(self.r, self.cofactor) == self.total
            and A.contains(self.cofactor)
        )

    def certificate(self, A: SetSpec, seq: FiniteSequence) -> Certificate:
        return Certificate(
            "dilated_fs_witness",
            {"A": A.describe(), "r": self.r, "sequence": seq},
            {"K": self.K, "H": self.H, "sum": self.total, "cofactor": self.cofactor},
            lambda: self.recheck(A, seq),
        )


def dilated_fs_witness(A: SetSpec, r: Element, seq: FiniteSequence, max_blocks: int = 16) -> DilatedWitness:
    """Find H with the sum over H lying in r·A, by way of blocks summing into rR."""
    s = A.structure
    if s.kind is not StructureKind.INTEGERS:
        raise KindMismatchError("block division by r is implemented over ℤ")
    h = SubgroupSpec.principal(s, r)
    blocks = block_decomposition(h, seq)[:max_blocks]
    if not blocks:
        raise SequenceLengthError(f"no block fits: sequence of length {len(seq)} for index {h.index()}")
    quotients = [s.exact_divide(b.sum, r) for b in blocks]
    sums = subset_sums(s, quotients)
    for mask in range(1, len(sums)):
        if A.contains(sums[mask]):
            K = IndexSet.from_mask(mask)
            positions = sorted(p for k in K for p in blocks[k - 1].positions)
            H = IndexSet(tuple(positions))
            return DilatedWitness(r, tuple(blocks), K, H, seq.sum_over(H), sums[mask])
    raise SearchExhaustedError(
        f"no combination of block quotients lies in {A.describe()}",
        {"blocks": len(blocks), "subsets": len(sums) - 1},
    )


# ----------------------------------------------------------------------
# Avoiding sequences (infinite index => not IP*)
# ----------------------------------------------------------------------
AVOID_FOOTNOTE = (
    "Each new term lies outside every coset -y + h for y in FS(x_1..x_{m-1}) and y = 0. "
    "This is the additive reading of the condition written multiplicatively as "
    "x_m in G \\ (H ∪ ⋃ xH)."
)


def avoid_sequence(
    h: SubgroupSpec,
    n: int,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    max_length: int = MAX_AVOID_LENGTH,
) -> FiniteSequence:
    """Greedy sequence whose finite sums all avoid h.

    x_m is the least nonzero element (canonical order) with y + x_m not in h
    for every y in FS(x_1..x_{m-1}) ∪ {0}. The output is re-verified over
    all 2^n - 1 sums before it is returned.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n > max_length:
        raise LengthGuardError(f"avoiding sequence of length {n} exceeds the {max_length}-term guard")
    idx = h.index()
    if idx.is_finite:
        raise IndexPreconditionError(f"{h.name} has index {idx}; no avoiding sequence exists")
    s = h.structure
    reach: List[Element] = [s.zero()]
    # y + c lies in h iff c and -y share a coset
    blocked = {h.coset_label(s.zero())}
    terms: List[Element] = []
    # reach only grows, so rejected candidates stay rejected and the scan resumes
    candidates = s.iter_elements()
    pending: Optional[Element] = None
    scanned = 0
    for step in range(n):
        chosen: Optional[Element] = None
        while chosen is None:
            if pending is not None:
                candidate, pending = pending, None
            else:
                scanned += 1
                if scanned > budget:
                    raise SearchExhaustedError(
                        f"no term {step + 1} for an avoiding sequence of {h.name} within budget",
                        {"budget": budget, "terms_found": step},
                    )
                candidate = next(candidates)
            if not s.is_zero(candidate) and h.coset_label(candidate) not in blocked:
                chosen = candidate
        terms.append(chosen)
        fresh = [s.add(y, chosen) for y in reach]
        reach.extend(fresh)
        blocked.update(h.coset_label(s.neg(y)) for y in fresh)
        pending = chosen

    seq = FiniteSequence(s, tuple(terms))
    hits = [v for v in fs_enumerate(seq).values() if h.contains(v)]
    if hits:
        raise RecheckFailedError(f"avoiding sequence {terms} has finite sums in {h.name}: {hits[:3]}")
    return seq


def avoid_certificate(h: SubgroupSpec, seq: FiniteSequence) -> Certificate:
    return Certificate(
        "avoid_sequence",
        {"subgroup": h.name, "n": len(seq)},
        {"sequence": seq, "sums_checked": (1 << len(seq)) - 1},
        lambda: not any(h.contains(v) for v in fs_enumerate(seq).values()),
    )


# ----------------------------------------------------------------------
# J-set witnesses
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class JWitness:
    a: Element
    H: IndexSet
    images: Tuple[Element, ...]

    def recheck(self, A: SetSpec, F: Sequence[FiniteSequence]) -> bool:
        s = A.structure
        for f, image in zip(F, self.images):
            if s.add(self.a, f.sum_over(self.H)) != image or not A.contains(image):
                return False
        return len(F) == len(self.images)

    def certificate(self, A: SetSpec, F: Sequence[FiniteSequence]) -> Certificate:
        return Certificate(
            "j_witness_search",
            {"A": A.describe(), "F": list(F)},
            {"a": self.a, "H": self.H, "images": self.images},
            lambda: self.recheck(A, F),
        )


@dataclass(frozen=True)
class JSearchExhausted:
    """No witness in the searched grid; this is NOT a proof that A is not a J-set."""

    window_size: int
    length: int
    families: int

    @property
    def grid(self) -> Dict[str, int]:
        return {
            "a_window": self.window_size,
            "length": self.length,
            "sequences": self.families,
            "index_sets": (1 << self.length) - 1,
        }


JSearchResult = Union[JWitness, JSearchExhausted]


def j_witness_search(
    A: SetSpec,
    F: Sequence[FiniteSequence],
    a_window: Sequence[Element],
    max_length: int = MAX_J_LENGTH,
) -> JSearchResult:
    """First (H, a) with a + sum_{n in H} f(n) in A for every f in F.

    H is the outer loop (binary-counter order), a the inner loop (window order).
    """
    if not F:
        raise SequenceLengthError("a J-family needs at least one sequence")
    length = len(F[0])
    if any(len(f) != length for f in F):
        raise SequenceLengthError("all sequences in a J-family must have the same length")
    if length > max_length:
        raise LengthGuardError(f"sequences of length {length} exceed the {max_length}-term guard", (1 << length) - 1)
    s = A.structure
    s.require(*a_window)
    tables = [subset_sums(s, f.terms) for f in F]
    for mask in range(1, 1 << length):
        for a in a_window:
            images = tuple(s.add(a, table[mask]) for table in tables)
            if all(A.contains(v) for v in images):
                return JWitness(a, IndexSet.from_mask(mask), images)
    return JSearchExhausted(len(a_window), length, len(F))


@dataclass(frozen=True)
class KCRProbe:
    witnesses: Tuple[JWitness, ...]
    failure_index: Optional[int] = None
    failure: Optional[JSearchExhausted] = None

    @property
    def passed(self) -> bool:
        return self.failure is None


def k_cr_probe(
    A: SetSpec,
    k: int,
    r: int,
    families: Iterable[Sequence[FiniteSequence]],
    a_window: Sequence[Element],
) -> KCRProbe:
    """Run the J-search with H inside {1..r} on each sampled family of at most k sequences."""
    witnesses: List[JWitness] = []
    for index, family in enumerate(families):
        family = list(family)
        if not 1 <= len(family) <= k:
            raise ValueError(f"family {index} has {len(family)} sequences; expected 1..{k}")
        if any(len(f) != r for f in family):
            raise SequenceLengthError(f"family {index} must index its terms by 1..{r}")
        result = j_witness_search(A, family, a_window)
        if isinstance(result, JSearchExhausted):
            return KCRProbe(tuple(witnesses), index, result)
        witnesses.append(result)
    return KCRProbe(tuple(witnesses))


def sample_families(
    rng: np.random.Generator, k: int, length: int, count: int, lo: int, hi: int
) -> List[Tuple[FiniteSequence, ...]]:
    """``count`` families of k integer sequences with terms drawn uniformly from [lo, hi]."""
    draws = rng.integers(lo, hi, endpoint=True, size=(count, k, length))
    return [
        tuple(FiniteSequence(INTEGERS, tuple(int(v) for v in row)) for row in family)
        for family in draws
    ]


# ----------------------------------------------------------------------
# A - A meets every finite-sum set (J-set difference demo)
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class DifferenceWitness:
    """sum_{n in H} x_n = minuend - subtrahend with both in A."""

    H: IndexSet
    total: Element
    minuend: Element
    subtrahend: Element
    a: Element
    y: Element

    def recheck(self, A: SetSpec, x_seq: FiniteSequence) -> bool:
        s = A.structure
        return (
            x_seq.sum_over(self.H) == self.total
            and s.sub(self.minuend, self.subtrahend) == self.total
            and A.contains(self.minuend)
            and A.contains(self.subtrahend)
        )

    def certificate(self, A: SetSpec, x_seq: FiniteSequence) -> Certificate:
        return Certificate(
            "diff_ipstar_demo",
            {"A": A.describe(), "x": x_seq},
            {
                "H": self.H,
                "sum": self.total,
                "minuend": self.minuend,
                "subtrahend": self.subtrahend,
                "a": self.a,
                "y": self.y,
            },
            lambda: self.recheck(A, x_seq),
        )


def diff_ipstar_demo(
    A: SetSpec,
    x_seq: FiniteSequence,
    y_window: Sequence[Element],
    a_window: Optional[Sequence[Element]] = None,
    max_length: int = MAX_DEMO_LENGTH,
) -> DifferenceWitness:
    """Find H with sum_{n in H} x_n in A - A via the family f = y, g = x + y."""
    if len(x_seq) > max_length:
        raise LengthGuardError(f"x sequence of length {len(x_seq)} exceeds the {max_length}-term guard")
    if not y_window:
        raise ValueError("y_window must be nonempty")
    s = A.structure
    y = min(y_window, key=s.canonical_key)
    f = FiniteSequence(s, (y,) * len(x_seq))
    g = FiniteSequence(s, tuple(s.add(x, y) for x in x_seq))
    window = list(a_window) if a_window is not None else s.enumerate(DEFAULT_A_WINDOW)
    result = j_witness_search(A, [f, g], window)
    if isinstance(result, JSearchExhausted):
        raise SearchExhaustedError(f"no difference witness in {A.describe()}", result.grid)
    subtrahend, minuend = result.images
    return DifferenceWitness(result.H, x_seq.sum_over(result.H), minuend, subtrahend, result.a, y)


# ----------------------------------------------------------------------
# Dilation D-set and product coverage
# ----------------------------------------------------------------------
def goswami_d_set(A: SetSpec, b: FiniteSequence, window: Sequence[Element]) -> ExplicitSet:
    """D = {d in window : d in A and d in yA for every y in FS(b)}."""
    s = A.structure
    finite_sums = subset_sums(s, b.terms)[1:]
    zeros = [y for y in finite_sums if s.is_zero(y)]
    if zeros:
        raise ZeroInFiniteSumsError(f"FS({list(b.terms)}) contains 0")
    distinct = list(dict.fromkeys(finite_sums))
    dilations = [DilationSet(y, A) for y in distinct]
    return ExplicitSet(s, (d for d in window if A.contains(d) and all(dil.contains(d) for dil in dilations)))


@dataclass(frozen=True)
class ProductFactorization:
    """r·x = left·right with left = sum_{i in H} x·b_i in B and right in A."""

    x: Element
    H: IndexSet
    r: Element
    left: Element
    right: Element

    def recheck(self, A: SetSpec, B: SetSpec) -> bool:
        s = A.structure
        return (
            B.contains(self.left)
            and A.contains(self.right)
            and s.mul(self.left, self.right) == s.mul(self.r, self.x)
        )

    def certificate(self, A: SetSpec, B: SetSpec) -> Certificate:
        return Certificate(
            "goswami_product_check",
            {"A": A.describe(), "B": B.describe(), "x": self.x, "r": self.r},
            {"H": self.H, "left": self.left, "right": self.right},
            lambda: self.recheck(A, B),
        )


@dataclass(frozen=True)
class ProductCheck:
    d_set: Tuple[Element, ...]
    factorizations: Tuple[ProductFactorization, ...]
    h_choices: Tuple[Tuple[Element, IndexSet], ...]
    missing_x: Tuple[Element, ...]

    @property
    def complete(self) -> bool:
        return not self.missing_x


def goswami_product_check(
    A: SetSpec,
    B: SetSpec,
    b: FiniteSequence,
    x_window: Sequence[Element],
    r_window: Sequence[Element],
) -> ProductCheck:
    """For each nonzero x, pick H(x) with sum x·b_i in B, then factor r·x for every nonzero r in D."""
    s = A.structure
    D = goswami_d_set(A, b, r_window)
    factorizations: List[ProductFactorization] = []
    choices: List[Tuple[Element, IndexSet]] = []
    missing: List[Element] = []
    for x in x_window:
        if s.is_zero(x):
            continue
        sums = subset_sums(s, [s.mul(x, bi) for bi in b.terms])
        mask = next((m for m in range(1, len(sums)) if B.contains(sums[m])), None)
        if mask is None:
            missing.append(x)
            continue
        H = IndexSet.from_mask(mask)
        choices.append((x, H))
        y = b.sum_over(H)
        for r in D.elements:
            if s.is_zero(r):
                continue
            right = s.exact_divide(r, y)
            if right is None:
                raise RecheckFailedError(f"{r} is in D but not divisible by {y}")
            factorizations.append(ProductFactorization(x, H, r, sums[mask], right))
    return ProductCheck(D.elements, tuple(factorizations), tuple(choices), tuple(missing))


# ----------------------------------------------------------------------
# Free semigroup: J-set whose quotient set misses an IP-set
# ----------------------------------------------------------------------
FREE_AB = GroundStructure.free_semigroup("ab")


def right_ideal_fa(structure: GroundStructure = FREE_AB, letter: str = "a") -> DilationSet:
    """F·a = {u·a : u in F}: words of length >= 2 ending in ``letter``."""
    return DilationSet(letter, UniverseSet(structure), side="right")


def _words(structure: GroundStructure, length: int) -> Iterable[str]:
    return ("".join(w) for w in itertools.product(structure.alphabet, repeat=length))


def left_quotient_witness(A: SetSpec, w: str, max_length: int) -> Optional[str]:
    """Least u (length, then lexicographic) with u in A and u·w in A, |u·w| <= max_length."""
    for length in range(1, max_length - len(w) + 1):
        for u in _words(A.structure, length):
            if A.contains(u) and A.contains(u + w):
                return u
    return None


@dataclass(frozen=True)
class NoncommutativeJWitness:
    """a(1)·f(t(1))·a(2)···f(t(m))·a(m+1) in A for every f."""

    H: IndexSet
    spacers: Tuple[str, ...]
    images: Tuple[str, ...]

    def recheck(self, A: SetSpec, F: Sequence[FiniteSequence]) -> bool:
        if len(F) != len(self.images):
            return False
        for f, image in zip(F, self.images):
            if _interleave(self.spacers, [f.term(t) for t in self.H]) != image or not A.contains(image):
                return False
        return True


def _interleave(spacers: Sequence[str], values: Sequence[str]) -> str:
    parts = [spacers[0]]
    for value, spacer in zip(values, spacers[1:]):
        parts.append(value)
        parts.append(spacer)
    return "".join(parts)


def noncommutative_j_witness(
    A: SetSpec,
    F: Sequence[FiniteSequence],
    a_window: Sequence[str],
    max_h: int = 2,
) -> Optional[NoncommutativeJWitness]:
    """J-witness for an arbitrary semigroup with spacer words drawn from ``a_window``."""
    if not F:
        raise SequenceLengthError("a J-family needs at least one sequence")
    length = len(F[0])
    if any(len(f) != length for f in F):
        raise SequenceLengthError("all sequences in a J-family must have the same length")
    for mask in range(1, 1 << length):
        H = IndexSet.from_mask(mask)
        if len(H) > max_h:
            continue
        values = [[f.term(t) for t in H] for f in F]
        for spacers in itertools.product(a_window, repeat=len(H) + 1):
            images = tuple(_interleave(spacers, v) for v in values)
            if all(A.contains(img) for img in images):
                return NoncommutativeJWitness(H, tuple(spacers), images)
    return None


@dataclass(frozen=True)
class FreeSemigroupReport:
    max_length: int
    pairs_checked: int
    intersection: Tuple[str, ...]
    quotient_members: Tuple[Tuple[str, str], ...]
    j_witnesses: Tuple[Optional[NoncommutativeJWitness], ...]
    footnote: str = (
        "A = F·a is read as {u·a : u in F}: words of length >= 2 ending in a, "
        "since the free semigroup has no identity."
    )

    @property
    def intersection_empty(self) -> bool:
        return not self.intersection

    @property
    def j_failures(self) -> int:
        return sum(1 for w in self.j_witnesses if w is None)


def freesemigroup_counterexample(
    max_length: int,
    families: Sequence[Sequence[FiniteSequence]] = (),
    spacer_window: Sequence[str] = ("a", "b"),
    member_length: int = 3,
    guard: int = MAX_FREE_WORD_LENGTH,
) -> FreeSemigroupReport:
    """Check exhaustively that no b^n lies in A^-1 A for |u·b^n| <= max_length."""
    if max_length > guard:
        raise LengthGuardError(f"word length {max_length} exceeds the guard {guard}", 1 << max_length)
    if max_length < 3:
        raise ValueError("need max_length >= 3 for a nonempty check")
    A = right_ideal_fa()
    checked = 0
    intersection: List[str] = []
    for n in range(1, max_length - 1):
        w = "b" * n
        hit = False
        for length in range(2, max_length - n + 1):
            for u in _words(FREE_AB, length):
                checked += 1
                if A.contains(u) and A.contains(u + w):
                    hit = True
        if hit:
            intersection.append(w)

    members: List[Tuple[str, str]] = []
    for length in range(1, min(member_length, max_length - 2) + 1):
        for w in _words(FREE_AB, length):
            u = left_quotient_witness(A, w, max_length)
            if u is not None:
                members.append((w, u))

    witnesses = tuple(noncommutative_j_witness(A, family, spacer_window) for family in families)
    return FreeSemigroupReport(max_length, checked, tuple(intersection), tuple(members), witnesses)
