"""Exact arithmetic and coset structure for the ground structures.

Four kinds of structure are supported:

* ``integers``        - (ℤ, +, ·), elements are Python ``int``
* ``modular(n)``      - ℤ/nℤ, elements are ``int`` in ``[0, n)``
* ``polynomials``     - ℤ[x], elements are :class:`Poly`
* ``free-semigroup``  - words over an ordered alphabet, elements are
  nonempty ``str`` whose characters are alphabet symbols

All values are immutable; every operation is a pure function.
"""

from __future__ import annotations

import itertools
import math
import operator
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Iterable, Iterator, List, Optional, Tuple, Union

from .errors import KindMismatchError, TrivialSubgroupError


# ----------------------------------------------------------------------
# Polynomials over the integers
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Poly:
    """Dense integer polynomial, lowest degree first, no trailing zeros."""

    coeffs: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        coeffs = [operator.index(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, c: int, degree: int) -> "Poly":
        return cls((0,) * degree + (c,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def constant_term(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, degree: int) -> int:
        return self.coeffs[degree] if 0 <= degree < len(self.coeffs) else 0

    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        width = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self.coefficient(i) + other.coefficient(i) for i in range(width)))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    def scale(self, c: int) -> "Poly":
        return Poly(tuple(c * a for a in self.coeffs))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms: List[str] = []
        for degree, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if degree == 0:
                body = str(abs(c))
            else:
                power = "x" if degree == 1 else f"x^{degree}"
                body = power if abs(c) == 1 else f"{abs(c)}*{power}"
            if not terms:
                terms.append(body if c > 0 else f"-{body}")
            else:
                terms.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(terms)


Element = Union[int, Poly, str]


def _poly_divmod(a: Poly, b: Poly) -> Tuple[Poly, Poly, bool]:
    """Integer long division of ``a`` by nonzero ``b``.

    Returns ``(q, r, complete)``. Division stops early (``complete`` is
    False) when the leading coefficient of ``b`` does not divide the
    current leading coefficient; in that case ``b`` does not divide ``a``
    in ℤ[x] unless ``a`` is zero.
    """
    quotient = [0] * max(len(a.coeffs) - len(b.coeffs) + 1, 1)
    rem = list(a.coeffs)
    lead = b.leading
    while len(rem) >= len(b.coeffs) and rem:
        shift = len(rem) - len(b.coeffs)
        top = rem[-1]
        if top % lead != 0:
            return Poly(tuple(quotient)), Poly(tuple(rem)), False
        factor = top // lead
        quotient[shift] = factor
        for i, c in enumerate(b.coeffs):
            rem[shift + i] -= factor * c
        while rem and rem[-1] == 0:
            rem.pop()
    return Poly(tuple(quotient)), Poly(tuple(rem)), True


# ----------------------------------------------------------------------
# Canonical orders
# ----------------------------------------------------------------------
def integer_rank(n: int) -> int:
    """Position of ``n`` in the order 0, 1, -1, 2, -2, ..."""
    if n == 0:
        return 0
    return 2 * n - 1 if n > 0 else -2 * n


def _iter_integers() -> Iterator[int]:
    yield 0
    for k in itertools.count(1):
        yield k
        yield -k


def _l1_vectors(length: int, total: int) -> Iterator[Tuple[int, ...]]:
    """All integer vectors of ``length`` whose absolute values sum to ``total``."""
    if length == 1:
        if total == 0:
            yield (0,)
        else:
            yield (total,)
            yield (-total,)
        return
    for c in range(-total, total + 1):
        for rest in _l1_vectors(length - 1, total - abs(c)):
            yield (c,) + rest


def _poly_key(p: Poly) -> Tuple[int, int, Tuple[int, ...]]:
    weight = p.degree + sum(abs(c) for c in p.coeffs) if p.coeffs else 0
    return weight, p.degree, tuple(integer_rank(c) for c in p.coeffs)


def _iter_polynomials() -> Iterator[Poly]:
    # Graded by weight = degree + sum |c_i|; every band is finite.
    yield Poly()
    for weight in itertools.count(1):
        for degree in range(weight):
            band = [v for v in _l1_vectors(degree + 1, weight - degree) if v[-1] != 0]
            band.sort(key=lambda v: tuple(integer_rank(c) for c in v))
            for coeffs in band:
                yield Poly(coeffs)


# ----------------------------------------------------------------------
# Ground structures
# ----------------------------------------------------------------------
class StructureKind(Enum):
    INTEGERS = "integers"
    MODULAR = "modular"
    POLYNOMIALS = "polynomials"
    FREE_SEMIGROUP = "free-semigroup"


@dataclass(frozen=True)
class GroundStructure:
    """A concrete semigroup or ring with a canonical enumeration."""

    kind: StructureKind
    modulus: Optional[int] = None
    alphabet: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is StructureKind.MODULAR:
            if self.modulus is None or self.modulus < 2:
                raise ValueError(f"modular structure needs n >= 2, got {self.modulus}")
        elif self.modulus is not None:
            raise ValueError("modulus is only meaningful for modular structures")
        if self.kind is StructureKind.FREE_SEMIGROUP:
            alphabet = tuple(self.alphabet)
            if not alphabet:
                raise ValueError("free semigroup needs a nonempty alphabet")
            if any(len(symbol) != 1 for symbol in alphabet) or len(set(alphabet)) != len(alphabet):
                raise ValueError(f"alphabet must be distinct single characters: {alphabet!r}")
            object.__setattr__(self, "alphabet", alphabet)
        elif self.alphabet:
            raise ValueError("alphabet is only meaningful for free semigroups")

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def integers(cls) -> "GroundStructure":
        return cls(StructureKind.INTEGERS)

    @classmethod
    def modular(cls, n: int) -> "GroundStructure":
        return cls(StructureKind.MODULAR, modulus=n)

    @classmethod
    def polynomials(cls) -> "GroundStructure":
        return cls(StructureKind.POLYNOMIALS)

    @classmethod
    def free_semigroup(cls, alphabet: Iterable[str]) -> "GroundStructure":
        return cls(StructureKind.FREE_SEMIGROUP, alphabet=tuple(alphabet))

    # ------------------------------------------------------------------
    # Introspection
    # ------------------------------------------------------------------
    @property
    def name(self) -> str:
        if self.kind is StructureKind.INTEGERS:
            return "Z"
        if self.kind is StructureKind.MODULAR:
            return f"Z/{self.modulus}Z"
        if self.kind is StructureKind.POLYNOMIALS:
            return "Z[x]"
        return "F{" + ",".join(self.alphabet) + "}"

    @property
    def is_additive(self) -> bool:
        return self.kind is not StructureKind.FREE_SEMIGROUP

    @property
    def is_commutative(self) -> bool:
        return self.kind is not StructureKind.FREE_SEMIGROUP or len(self.alphabet) == 1

    @property
    def is_ordered(self) -> bool:
        return self.kind is StructureKind.INTEGERS

    @property
    def is_finite(self) -> bool:
        return self.kind is StructureKind.MODULAR

    def contains(self, a: object) -> bool:
        if self.kind is StructureKind.INTEGERS:
            return isinstance(a, int) and not isinstance(a, bool)
        if self.kind is StructureKind.MODULAR:
            return isinstance(a, int) and not isinstance(a, bool) and 0 <= a < self.modulus
        if self.kind is StructureKind.POLYNOMIALS:
            return isinstance(a, Poly)
        return isinstance(a, str) and len(a) > 0 and all(ch in self.alphabet for ch in a)

    def require(self, *elements: object) -> None:
        for a in elements:
            if not self.contains(a):
                raise KindMismatchError(f"{a!r} is not an element of {self.name}")

    def _require_additive(self, op: str) -> None:
        if not self.is_additive:
            raise KindMismatchError(f"{op} is undefined in the free semigroup {self.name}")

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------
    def zero(self) -> Element:
        self._require_additive("zero")
        return Poly() if self.kind is StructureKind.POLYNOMIALS else 0

    def one(self) -> Element:
        self._require_additive("one")
        return Poly.const(1) if self.kind is StructureKind.POLYNOMIALS else 1

    def is_zero(self, a: Element) -> bool:
        return self.is_additive and a == self.zero()

    def add(self, a: Element, b: Element) -> Element:
        self._require_additive("addition")
        self.require(a, b)
        if self.kind is StructureKind.MODULAR:
            return (a + b) % self.modulus
        return a + b

    def neg(self, a: Element) -> Element:
        self._require_additive("negation")
        self.require(a)
        if self.kind is StructureKind.MODULAR:
            return (-a) % self.modulus
        return -a

    def sub(self, a: Element, b: Element) -> Element:
        return self.add(a, self.neg(b))

    def mul(self, a: Element, b: Element) -> Element:
        """Exact product; concatenation in argument order for words."""
        self.require(a, b)
        if self.kind is StructureKind.MODULAR:
            return (a * b) % self.modulus
        return a + b if self.kind is StructureKind.FREE_SEMIGROUP else a * b

    def sum(self, terms: Iterable[Element]) -> Element:
        total = self.zero()
        for term in terms:
            total = self.add(total, term)
        return total

    def exact_divide(self, a: Element, y: Element) -> Optional[Element]:
        """Return q with y·q = a, or None when y does not divide a.

        Defined for ℤ and ℤ[x]; a zero divisor ``y`` always yields None.
        """
        self.require(a, y)
        if self.kind is StructureKind.INTEGERS:
            if y == 0 or a % y != 0:
                return None
            return a // y
        if self.kind is StructureKind.POLYNOMIALS:
            if y.is_zero():
                return None
            q, r, complete = _poly_divmod(a, y)
            return q if complete and r.is_zero() else None
        raise KindMismatchError(f"exact division is not implemented for {self.name}")

    def divides(self, y: Element, a: Element) -> bool:
        if self.kind is StructureKind.MODULAR:
            self.require(a, y)
            return a % math.gcd(y, self.modulus) == 0
        if self.is_zero(y):
            return self.is_zero(a)
        return self.exact_divide(a, y) is not None

    # ------------------------------------------------------------------
    # Enumeration
    # ------------------------------------------------------------------
    def iter_elements(self) -> Iterator[Element]:
        """Lazy canonical enumeration."""
        if self.kind is StructureKind.INTEGERS:
            return _iter_integers()
        if self.kind is StructureKind.MODULAR:
            return iter(range(self.modulus))
        if self.kind is StructureKind.POLYNOMIALS:
            return _iter_polynomials()
        return (
            "".join(word)
            for length in itertools.count(1)
            for word in itertools.product(self.alphabet, repeat=length)
        )

    def enumerate(self, count: int) -> List[Element]:
        """First ``count`` elements of the canonical order (fewer for finite rings)."""
        if count < 1:
            raise ValueError(f"count must be positive, got {count}")
        return list(itertools.islice(self.iter_elements(), count))

    def canonical_key(self, a: Element) -> Tuple:
        """Sort key reproducing the canonical enumeration order."""
        self.require(a)
        if self.kind is StructureKind.INTEGERS:
            return (integer_rank(a),)
        if self.kind is StructureKind.MODULAR:
            return (a,)
        if self.kind is StructureKind.POLYNOMIALS:
            return _poly_key(a)
        return (len(a), tuple(self.alphabet.index(ch) for ch in a))

    def canonical_rank(self, a: Element) -> int:
        """0-based position of ``a`` in :meth:`iter_elements`."""
        self.require(a)
        if self.kind is StructureKind.INTEGERS:
            return integer_rank(a)
        if self.kind is StructureKind.MODULAR:
            return a
        if self.kind is StructureKind.FREE_SEMIGROUP:
            k = len(self.alphabet)
            below = sum(k ** length for length in range(1, len(a)))
            offset = 0
            for ch in a:
                offset = offset * k + self.alphabet.index(ch)
            return below + offset
        for rank, p in enumerate(_iter_polynomials()):
            if p == a:
                return rank
        raise AssertionError("unreachable: every polynomial is enumerated")

    def find_zero_divisors(self, count: int) -> List[Tuple[Element, Element]]:
        """Pairs of nonzero elements among the first ``count`` whose product is 0."""
        self._require_additive("zero-divisor search")
        window = [a for a in self.enumerate(count) if not self.is_zero(a)]
        return [
            (a, b)
            for a, b in itertools.combinations_with_replacement(window, 2)
            if self.is_zero(self.mul(a, b))
        ]


INTEGERS = GroundStructure.integers()
POLYNOMIALS = GroundStructure.polynomials()


# ----------------------------------------------------------------------
# Subgroups and cosets
# ----------------------------------------------------------------------
class SubgroupDirection(Enum):
    """How the principal subgroup arose: as an additive subgroup or as α·R."""

    ADDITIVE = "additive"
    DILATION = "multiplicative-dilation"


@dataclass(frozen=True)
class Index:
    """Index of a subgroup: ``order`` is None when infinite."""

    order: Optional[int]

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def __str__(self) -> str:
        return f"finite({self.order})" if self.is_finite else "infinite"


INFINITE = Index(None)


@dataclass(frozen=True, eq=False)
class RawCosetLabel:
    """Label compared by membership of differences (non-monic polynomial generators)."""

    subgroup: "SubgroupSpec"
    representative: Poly

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RawCosetLabel) or other.subgroup != self.subgroup:
            return NotImplemented
        return self.subgroup.contains(self.representative - other.representative)

    def __hash__(self) -> int:
        return hash(self.subgroup)


@dataclass(frozen=True)
class SubgroupSpec:
    """The principal ideal generated by ``generator`` inside ``structure``."""

    structure: GroundStructure
    generator: Element
    direction: SubgroupDirection = SubgroupDirection.ADDITIVE

    def __post_init__(self) -> None:
        if not self.structure.is_additive:
            raise KindMismatchError(f"{self.structure.name} has no additive subgroups")
        self.structure.require(self.generator)

    @classmethod
    def principal(cls, structure: GroundStructure, generator: Element) -> "SubgroupSpec":
        return cls(structure, generator)

    @property
    def is_trivial(self) -> bool:
        if self.structure.kind is StructureKind.MODULAR:
            return math.gcd(self.generator, self.structure.modulus) == self.structure.modulus
        return self.structure.is_zero(self.generator)

    @property
    def name(self) -> str:
        if self.structure.kind is StructureKind.POLYNOMIALS:
            return f"({self.generator})Z[x]"
        return f"{self.generator}{self.structure.name}"

    def contains(self, g: Element) -> bool:
        self.structure.require(g)
        return self.structure.divides(self.generator, g)

    def member(self, multiplier: Element) -> Element:
        """The subgroup element generator · multiplier."""
        return self.structure.mul(self.generator, multiplier)

    def _require_nontrivial(self) -> None:
        if self.is_trivial:
            raise TrivialSubgroupError(f"{self.name} is the trivial subgroup; cosets are undefined")

    def index(self) -> Index:
        self._require_nontrivial()
        kind = self.structure.kind
        if kind is StructureKind.INTEGERS:
            return Index(abs(self.generator))
        if kind is StructureKind.MODULAR:
            return Index(math.gcd(self.generator, self.structure.modulus))
        if abs(self.generator.leading) == 1 and self.generator.degree == 0:
            return Index(1)
        return INFINITE

    def coset_label(self, g: Element) -> Hashable:
        """Canonical label of g + H; equal labels iff same coset."""
        self._require_nontrivial()
        self.structure.require(g)
        kind = self.structure.kind
        if kind is StructureKind.INTEGERS:
            return g % abs(self.generator)
        if kind is StructureKind.MODULAR:
            return g % math.gcd(self.generator, self.structure.modulus)
        alpha = self.generator
        if abs(alpha.leading) == 1:
            _, remainder, _ = _poly_divmod(g, alpha)
            return remainder
        if alpha.degree == 0:
            modulus = abs(alpha.leading)
            return Poly(tuple(c % modulus for c in g.coeffs))
        return RawCosetLabel(self, g)

    def same_coset(self, g1: Element, g2: Element) -> bool:
        self._require_nontrivial()
        return self.contains(self.structure.sub(g1, g2))


# ----------------------------------------------------------------------
# Index sets and finite sequences
# ----------------------------------------------------------------------
@dataclass(frozen=True, order=True)
class IndexSet:
    """Sorted, nonempty set of 1-based sequence positions."""

    positions: Tuple[int, ...]

    def __post_init__(self) -> None:
        positions = tuple(self.positions)
        if not positions:
            raise ValueError("index set must be nonempty")
        if positions[0] < 1 or any(b <= a for a, b in zip(positions, positions[1:])):
            raise ValueError(f"positions must be strictly increasing and >= 1: {positions}")
        object.__setattr__(self, "positions", positions)

    @classmethod
    def from_mask(cls, mask: int) -> "IndexSet":
        """Bit i of ``mask`` selects position i + 1."""
        return cls(tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1))

    @property
    def mask(self) -> int:
        return sum(1 << (p - 1) for p in self.positions)

    def __iter__(self) -> Iterator[int]:
        return iter(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __str__(self) -> str:
        return "{" + ",".join(str(p) for p in self.positions) + "}"


@dataclass(frozen=True)
class FiniteSequence:
    """A length-m sequence of structure elements; repetition is allowed."""

    structure: GroundStructure
    terms: Tuple[Element, ...]

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("sequence must have at least one term")
        self.structure.require(*terms)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, structure: GroundStructure, terms: Iterable[Element]) -> "FiniteSequence":
        return cls(structure, tuple(terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.terms)

    def term(self, position: int) -> Element:
        """1-based access."""
        if not 1 <= position <= len(self.terms):
            raise IndexError(f"position {position} outside 1..{len(self.terms)}")
        return self.terms[position - 1]

    def prefix(self, length: int) -> "FiniteSequence":
        return FiniteSequence(self.structure, self.terms[:length])

    def sum_over(self, positions: Iterable[int]) -> Element:
        return self.structure.sum(self.term(p) for p in positions)

    def product_over(self, positions: Iterable[int]) -> Element:
        """Product in increasing position order."""
        ordered = sorted(positions)
        result = self.term(ordered[0])
        for p in ordered[1:]:
            result = self.structure.mul(result, self.term(p))
        return result
