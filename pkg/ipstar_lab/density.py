"""Følner-window densities and finite-scale stand-ins for centrality.

All ratios are exact ``Fraction`` values. Nothing in this module decides
whether a set is central; the diagnostics are necessary-condition checks
and reports say so.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import KindMismatchError, WindowIndexError
from .largeness import DilationSet, SetSpec
from .structures import INTEGERS, Element, GroundStructure, StructureKind

CENTRAL_CAVEAT = "diagnostics are necessary-condition checks only"


# ----------------------------------------------------------------------
# Følner families
# ----------------------------------------------------------------------
class FolnerFamily(ABC):
    """Windows F_1, F_2, ... with a shift (additive) or dilation (multiplicative) action."""

    action = "additive"

    def __init__(self, structure: GroundStructure):
        self.structure = structure

    @abstractmethod
    def _window(self, n: int) -> List[Element]:
        """Elements of F_n without duplicates"""

    @abstractmethod
    def describe(self) -> str:
        """Short description used in reports"""

    @property
    def max_n(self) -> Optional[int]:
        return None

    def window(self, n: int) -> List[Element]:
        if n < 1 or (self.max_n is not None and n > self.max_n):
            limit = "inf" if self.max_n is None else self.max_n
            raise WindowIndexError(f"window index {n} outside 1..{limit} for {self.describe()}")
        return self._window(n)

    def act(self, g: Element, x: Element) -> Element:
        if self.action == "additive":
            return self.structure.add(g, x)
        return self.structure.mul(g, x)


class IntervalFamily(FolnerFamily):
    """F_n = [start, start + n - 1] in ℤ."""

    def __init__(self, start: int = 1):
        super().__init__(INTEGERS)
        self.start = start

    def _window(self, n: int) -> List[Element]:
        return list(range(self.start, self.start + n))

    def describe(self) -> str:
        return f"intervals [{self.start}..{self.start}+n-1]"


class DilationFamily(FolnerFamily):
    """F_n = {p·factor^i : p in seed, 0 <= i < n}."""

    action = "multiplicative"

    def __init__(self, structure: GroundStructure, seed: Sequence[Element], factor: Element):
        super().__init__(structure)
        if not seed:
            raise ValueError("dilation family needs a nonempty seed window")
        structure.require(factor, *seed)
        self.seed = tuple(seed)
        self.factor = factor
        self._powers: List[Element] = [structure.one()]

    def _power(self, i: int) -> Element:
        while len(self._powers) <= i:
            self._powers.append(self.structure.mul(self._powers[-1], self.factor))
        return self._powers[i]

    def _window(self, n: int) -> List[Element]:
        s = self.structure
        return list(dict.fromkeys(s.mul(p, self._power(i)) for i in range(n) for p in self.seed))

    def describe(self) -> str:
        return f"dilations {{p·({self.factor})^i : p in seed of {len(self.seed)}, i < n}}"


class CustomFamily(FolnerFamily):
    """Explicit list of windows; sizes must be nondecreasing."""

    def __init__(self, structure: GroundStructure, windows: Sequence[Sequence[Element]], action: str = "additive"):
        super().__init__(structure)
        if action not in ("additive", "multiplicative"):
            raise ValueError(f"action must be 'additive' or 'multiplicative', got {action!r}")
        cleaned = [list(dict.fromkeys(w)) for w in windows]
        if not cleaned or any(not w for w in cleaned):
            raise ValueError("every window must be nonempty")
        if any(len(a) > len(b) for a, b in zip(cleaned, cleaned[1:])):
            raise ValueError("window sizes must be nondecreasing")
        for w in cleaned:
            structure.require(*w)
        self.windows = cleaned
        self.action = action

    @property
    def max_n(self) -> Optional[int]:
        return len(self.windows)

    def _window(self, n: int) -> List[Element]:
        return list(self.windows[n - 1])

    def describe(self) -> str:
        return f"{len(self.windows)} explicit {self.action} windows"


def folner_defect(family: FolnerFamily, g: Element, n: int) -> Fraction:
    """|gF_n ∩ F_n| / |F_n|."""
    window = family.window(n)
    members = set(window)
    moved = sum(1 for x in window if family.act(g, x) in members)
    return Fraction(moved, len(window))


# ----------------------------------------------------------------------
# Density estimates
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class DensityEstimate:
    value: Fraction
    n_range: Tuple[int, int]
    family: str
    argmax: int
    final: Fraction
    lower_bound: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.value <= 1:
            raise ValueError(f"density {self.value} outside [0, 1]")

    def to_row(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "n_min": self.n_range[0],
            "n_max": self.n_range[1],
            "argmax": self.argmax,
            "final": self.final,
            "family": self.family,
            "lower_bound": self.lower_bound,
        }


def _interval_counts(A: SetSpec, family: IntervalFamily, n_max: int) -> np.ndarray:
    hits = A.indicator(family.start, family.start + n_max - 1)
    return np.cumsum(hits, dtype=np.int64)


def upper_density(
    A: SetSpec, family: FolnerFamily, n_max: int, n_min: Optional[int] = None
) -> DensityEstimate:
    """max over n in [n_min, n_max] of |A ∩ F_n| / |F_n|; n_min defaults to ceil(n_max / 2)."""
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")
    if n_min is None:
        n_min = (n_max + 1) // 2
    if not 1 <= n_min <= n_max:
        raise ValueError(f"need 1 <= n_min <= n_max, got {n_min}, {n_max}")

    ratios: List[Fraction] = []
    if isinstance(family, IntervalFamily) and A.structure.kind is StructureKind.INTEGERS:
        counts = _interval_counts(A, family, n_max)
        ratios = [Fraction(int(counts[n - 1]), n) for n in range(n_min, n_max + 1)]
    else:
        for n in range(n_min, n_max + 1):
            window = family.window(n)
            ratios.append(Fraction(sum(1 for x in window if A.contains(x)), len(window)))

    best = max(ratios)
    argmax = n_min + ratios.index(best)
    return DensityEstimate(best, (n_min, n_max), family.describe(), argmax, ratios[-1])


def banach_upper_density_est(A: SetSpec, N: int, L: int) -> DensityEstimate:
    """Best length-L interval in [1..N]; a lower bound for the upper Banach density."""
    if not 1 <= L <= N:
        raise ValueError(f"need 1 <= L <= N, got L={L}, N={N}")
    if A.structure.kind is not StructureKind.INTEGERS:
        raise KindMismatchError(f"interval windows need ℤ, not {A.structure.name}")
    counts = np.concatenate(([0], np.cumsum(A.indicator(1, N), dtype=np.int64)))
    sliding = counts[L:] - counts[:-L]
    start = int(np.argmax(sliding))
    best = Fraction(int(sliding[start]), L)
    return DensityEstimate(
        best,
        (L, L),
        f"intervals of length {L} in [1..{N}]",
        start + 1,
        Fraction(int(sliding[-1]), L),
        lower_bound=True,
    )


@dataclass(frozen=True)
class DilationProbe:
    base: DensityEstimate
    dilated: DensityEstimate

    @property
    def difference(self) -> Fraction:
        return self.base.value - self.dilated.value


def dilation_invariance_probe(
    A: SetSpec, factor: Element, family: FolnerFamily, n_max: int, n_min: Optional[int] = None
) -> DilationProbe:
    """Estimates for A and factor·A under the same family."""
    dilated = DilationSet(factor, A)
    return DilationProbe(
        upper_density(A, family, n_max, n_min),
        upper_density(dilated, family, n_max, n_min),
    )


# ----------------------------------------------------------------------
# Syndeticity and thickness at finite scale
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class GapReport:
    longest_run: int
    run_start: Optional[int]
    members: int


def syndeticity_gap(A: SetSpec, N: int) -> GapReport:
    """Longest run of consecutive non-members of A inside [1..N]."""
    hits = A.indicator(1, N)
    longest, start, run = 0, None, 0
    for position, hit in enumerate(hits, start=1):
        if hit:
            run = 0
            continue
        run += 1
        if run > longest:
            longest, start = run, position - run + 1
    return GapReport(longest, start, int(np.count_nonzero(hits)))


def thick_window(A: SetSpec, L: int, N: int) -> Optional[int]:
    """Start of the first length-L interval inside [1..N] contained in A."""
    if not 1 <= L <= N:
        raise ValueError(f"need 1 <= L <= N, got L={L}, N={N}")
    counts = np.concatenate(([0], np.cumsum(A.indicator(1, N), dtype=np.int64)))
    full = np.flatnonzero(counts[L:] - counts[:-L] == L)
    return int(full[0]) + 1 if full.size else None
