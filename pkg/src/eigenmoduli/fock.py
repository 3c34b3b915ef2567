"""Occupation bases for symmetrized and antisymmetrized n-particle spaces.

Index sets are sorted tuples of 1-based single-particle labels. A bosonic
index set is a multiset (non-decreasing), a fermionic one a strictly
increasing subset. The lexicographic order of these tuples is the canonical
basis order used by every matrix in the package.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

IndexSet = tuple[int, ...]

#: Bosonic symmetry-factor conventions. ``"trace"`` puts the factorials of the
#: concatenated index set in the numerator so that the diagonal projectors sum
#: to the identity; ``"printed"`` is the reciprocal and exists only as a
#: negative control.
SIGMA_CONVENTIONS = ("trace", "printed")


class Statistics(enum.Enum):
    BOSE = "bose"
    FERMI = "fermi"

    @classmethod
    def parse(cls, value: "Statistics | str") -> "Statistics":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown statistics {value!r}; expected 'bose' or 'fermi'") from None


def basis_size(q: int, k: int, statistics: Statistics | str) -> int:
    """Closed-form dimension of the k-particle space over q modes."""
    if Statistics.parse(statistics) is Statistics.BOSE:
        return math.comb(q + k - 1, k) if q > 0 else int(k == 0)
    return math.comb(q, k)


def validate_index_set(indices, q: int, statistics: Statistics | str) -> IndexSet:
    stats = Statistics.parse(statistics)
    idx = tuple(int(i) for i in indices)
    for i in idx:
        if not 1 <= i <= q:
            raise ValueError(f"label {i} outside 1..{q} in index set {list(idx)}")
    for a, b in zip(idx, idx[1:]):
        if stats is Statistics.BOSE and a > b:
            raise ValueError(f"bosonic index set must be non-decreasing: {list(idx)}")
        if stats is Statistics.FERMI and a >= b:
            raise ValueError(f"fermionic index set must be strictly increasing: {list(idx)}")
    return idx


@dataclass(frozen=True)
class Basis:
    """Lexicographically ordered k-particle occupation basis."""

    q: int
    k: int
    statistics: Statistics
    sets: tuple[IndexSet, ...]
    lookup: dict[IndexSet, int] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, pos: int) -> IndexSet:
        return self.sets[pos]

    def __iter__(self):
        return iter(self.sets)

    def index(self, index_set) -> int:
        try:
            return self.lookup[tuple(index_set)]
        except KeyError:
            raise KeyError(f"{list(index_set)} is not in the {self.statistics.value} basis "
                           f"(q={self.q}, k={self.k})") from None

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "statistics": self.statistics.value,
            "sets": [list(s) for s in self.sets],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Basis":
        basis = enumerate_basis(int(data["q"]), int(data["k"]), data["statistics"])
        if "sets" in data and [list(s) for s in basis.sets] != [list(s) for s in data["sets"]]:
            raise ValueError("serialized basis is not in canonical lexicographic order")
        return basis


def enumerate_basis(q: int, k: int, statistics: Statistics | str) -> Basis:
    stats = Statistics.parse(statistics)
    if q < 0 or k < 0:
        raise ValueError(f"q and k must be non-negative, got q={q}, k={k}")
    if q == 0 and k > 0:
        raise ValueError("no single-particle modes (q=0) for a non-empty particle number")
    if stats is Statistics.FERMI and k > q:
        raise ValueError(f"empty fermionic basis: k={k} particles exceed q={q} modes")
    labels = range(1, q + 1)
    if stats is Statistics.BOSE:
        sets = tuple(itertools.combinations_with_replacement(labels, k))
    else:
        sets = tuple(itertools.combinations(labels, k))
    return Basis(q, k, stats, sets, {s: p for p, s in enumerate(sets)})


@dataclass(frozen=True)
class ConcatResult:
    sorted: IndexSet
    coefficient: float


def permutation_parity(seq) -> int:
    """+1 for an even number of inversions, -1 for odd."""
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


def concat_index(I, K, statistics: Statistics | str, q: int | None = None) -> ConcatResult:
    """Ordered concatenation (IK) with its fermionic sign.

    For fermions the coefficient is the parity of the permutation sorting
    ``I + K`` (0 when the sets overlap). For bosons it is always 1; the
    multiplicity weight lives in :func:`sigma`.
    """
    stats = Statistics.parse(statistics)
    if q is not None:
        I = validate_index_set(I, q, stats)
        K = validate_index_set(K, q, stats)
    joined = tuple(I) + tuple(K)
    merged = tuple(sorted(joined))
    if stats is Statistics.BOSE:
        return ConcatResult(merged, 1.0)
    if len(set(joined)) < len(joined):
        return ConcatResult(merged, 0.0)
    return ConcatResult(merged, float(permutation_parity(joined)))


def _occupation_factorials(index_set) -> int:
    return math.prod(math.factorial(c) for c in Counter(index_set).values())


def sigma(I, K, statistics: Statistics | str, convention: str = "trace") -> float:
    """Symmetry factor weighting the concatenation of ``I`` and ``K``."""
    stats = Statistics.parse(statistics)
    concat = concat_index(I, K, stats)
    if stats is Statistics.FERMI:
        return concat.coefficient
    joint = _occupation_factorials(concat.sorted)
    parts = _occupation_factorials(I) * _occupation_factorials(K)
    if convention == "trace":
        return math.sqrt(joint / parts)
    if convention == "printed":
        return math.sqrt(parts / joint)
    raise ValueError(f"unknown sigma convention {convention!r}; expected one of {SIGMA_CONVENTIONS}")


def occupations(index_set, q: int) -> tuple[int, ...]:
    counts = Counter(index_set)
    return tuple(counts.get(a, 0) for a in range(1, q + 1))


def is_subset(small, big) -> bool:
    """Multiset inclusion of index sets."""
    have = Counter(big)
    return all(have[a] >= c for a, c in Counter(small).items())
