"""
Permutations of {0, ..., k-1} and the symmetric group Σ_k
Coordinate action on vectors, signs, cycle types and conjugacy classes
"""

from dataclasses import dataclass
from itertools import permutations as _permutations
from math import factorial
from typing import Dict, List, Sequence, Tuple

from sympy.utilities.iterables import partitions

from ..exceptions import InvalidInputError


@dataclass(frozen=True, order=True)
class Permutation:
    """
    Bijection i -> images[i] of {0, ..., k-1}

    Acts on coordinate vectors by moving entry i to position images[i].
    """

    images: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise InvalidInputError(f"Not a permutation: {self.images}")

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(k)))

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> "Permutation":
        return cls(tuple(int(i) - 1 for i in images))

    @classmethod
    def from_cycles(cls, k: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        """Build from disjoint 0-based cycles; unlisted points are fixed"""
        images = list(range(k))
        for cycle in cycles:
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a] = b
        return cls(tuple(images))

    @classmethod
    def all(cls, k: int) -> List["Permutation"]:
        """Every element of Σ_k, in lexicographic order of image tuples"""
        return [cls(p) for p in _permutations(range(k))]

    @classmethod
    def generators(cls, k: int) -> List["Permutation"]:
        """A transposition and a k-cycle, which together generate Σ_k"""
        if k < 2:
            return []
        swap = cls.from_cycles(k, [(0, 1)])
        cycle = cls(tuple((i + 1) % k for i in range(k)))
        return [swap] if swap == cycle else [swap, cycle]

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """self ∘ other"""
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def cycles(self) -> List[Tuple[int, ...]]:
        seen = set()
        result = []
        for start in range(self.degree):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cycle.append(j)
                seen.add(j)
                j = self.images[j]
            result.append(tuple(cycle))
        return result

    def cycle_type(self) -> Tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    @property
    def sign(self) -> int:
        return -1 if (self.degree - len(self.cycles())) % 2 else 1

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def apply_to_vector(self, vector: Sequence) -> list:
        """(g·v)[g(i)] = v[i]"""
        if len(vector) != self.degree:
            raise InvalidInputError(f"Vector length {len(vector)} != permutation degree {self.degree}")
        out = [None] * self.degree
        for i, x in enumerate(vector):
            out[self.images[i]] = x
        return out

    def one_based(self) -> List[int]:
        return [i + 1 for i in self.images]


def sort_with_sign(indices: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """
    Sort a sequence of generator indices as an exterior monomial

    Args:
        indices: Generator indices in product order

    Returns:
        (sign, sorted tuple); sign is 0 when an index repeats
    """
    items = list(indices)
    if len(set(items)) != len(items):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


def conjugacy_classes(k: int) -> List[Tuple[Permutation, int]]:
    """
    One representative per cycle type of Σ_k, with the class size

    Args:
        k: Group degree

    Returns:
        List of (representative, class size), partitions in sympy's order
    """
    if k <= 1:
        return [(Permutation.identity(k), 1)]
    classes = []
    for parts in partitions(k):
        parts: Dict[int, int] = dict(parts)
        cycles = []
        start = 0
        for length in sorted(parts, reverse=True):
            for _ in range(parts[length]):
                cycles.append(tuple(range(start, start + length)))
                start += length
        denom = 1
        for length, mult in parts.items():
            denom *= length**mult * factorial(mult)
        classes.append((Permutation.from_cycles(k, cycles), factorial(k) // denom))
    return classes
