"""Finite abelian groups as explicit products of cyclic factors.

Elements of ``Z_{n1} x ... x Z_{nk}`` are addressed by a canonical index
in ``0..|G|-1``, lexicographic in the residue tuple; every vector and
matrix in the package is laid out in that order.  Characters are labeled
by tuples with the same moduli through the pairing
``chi_c(g) = prod_j exp(2*pi*i*c_j*g_j/n_j)``, so the dual group shares
the element indexing and subgroups of the dual are ordinary
:class:`Subgroup` values over label indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    GroupMismatchError,
    GroupSpecError,
    PreconditionError,
    SubgroupBoundError,
    UnsupportedOrderError,
)

SUBGROUP_ORDER_BOUND = 512


class FiniteAbelianGroup:
    """Product of cyclic groups ``Z_n``, immutable after construction."""

    def __init__(self, factors: Sequence[int]):
        factors = tuple(int(n) for n in factors)
        if not factors:
            raise ValueError("at least one cyclic factor is required")
        if factors != (1,) and any(n < 2 for n in factors):
            raise ValueError(
                "cyclic factors must be at least 2; 'Z1' denotes the trivial group only on its own"
            )
        self.factors = factors
        self.order = math.prod(factors)
        self.exponent = math.lcm(*factors)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteAbelianGroup) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __repr__(self) -> str:
        return "x".join(f"Z{n}" for n in self.factors)

    @cached_property
    def residues(self) -> np.ndarray:
        """Residue tuple of every element, shape (order, k), lexicographic."""
        table = np.indices(self.factors).reshape(len(self.factors), self.order).T
        table = np.ascontiguousarray(table)
        table.setflags(write=False)
        return table

    @cached_property
    def add_table(self) -> np.ndarray:
        r = self.residues
        sums = (r[:, None, :] + r[None, :, :]) % np.array(self.factors)
        table = np.ravel_multi_index(tuple(sums[..., j] for j in range(len(self.factors))), self.factors)
        table.setflags(write=False)
        return table

    @cached_property
    def neg_table(self) -> np.ndarray:
        r = (-self.residues) % np.array(self.factors)
        table = np.ravel_multi_index(tuple(r[:, j] for j in range(len(self.factors))), self.factors)
        table.setflags(write=False)
        return table

    @cached_property
    def diff_table(self) -> np.ndarray:
        """diff_table[a, b] = index of a - b."""
        table = self.add_table[:, self.neg_table]
        table.setflags(write=False)
        return table

    @cached_property
    def char_phase(self) -> np.ndarray:
        """Integer phase numerators: chi_c(g) = exp(2*pi*i * P[c, g] / exponent).

        Accumulating the phase in exact integer arithmetic keeps the
        pairing an exact root of unity and makes the set where
        ``chi_c(g) = 1`` decidable without float comparisons.
        """
        n = self.exponent
        weights = np.array([n // f for f in self.factors], dtype=np.int64)
        r = self.residues.astype(np.int64)
        table = ((r * weights) @ r.T) % n
        table.setflags(write=False)
        return table

    @cached_property
    def char_table(self) -> np.ndarray:
        """Complex character table X[c, g] = chi_c(g)."""
        roots = np.exp(2j * np.pi * np.arange(self.exponent) / self.exponent)
        table = roots[self.char_phase]
        table.setflags(write=False)
        return table

    def index_of(self, residues: Sequence[int]) -> int:
        if len(residues) != len(self.factors):
            raise ValueError(f"expected {len(self.factors)} residues, got {len(residues)}")
        reduced = tuple(int(r) % n for r, n in zip(residues, self.factors))
        return int(np.ravel_multi_index(reduced, self.factors))

    def residues_of(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.order:
            raise ValueError(f"element index {index} out of range for {self}")
        return tuple(int(v) for v in self.residues[index])

    def element(self, residues: Sequence[int]) -> "Element":
        return Element(self, tuple(int(r) % n for r, n in zip(residues, self.factors)))

    def element_by_index(self, index: int) -> "Element":
        return Element(self, self.residues_of(index))

    def character(self, label: Sequence[int]) -> "Character":
        return Character(self, tuple(int(c) % n for c, n in zip(label, self.factors)))

    def character_by_index(self, index: int) -> "Character":
        return Character(self, self.residues_of(index))

    @property
    def zero(self) -> "Element":
        return Element(self, (0,) * len(self.factors))

    @property
    def trivial_character(self) -> "Character":
        return Character(self, (0,) * len(self.factors))

    def elements(self) -> Iterable["Element"]:
        return (self.element_by_index(i) for i in range(self.order))

    def characters(self) -> Iterable["Character"]:
        return (self.character_by_index(i) for i in range(self.order))

    def to_json(self) -> dict:
        return {"factors": list(self.factors)}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteAbelianGroup":
        return cls(tuple(obj["factors"]))


def _check_same_group(a, b) -> None:
    if a.group != b.group:
        raise GroupMismatchError(f"operands live on different groups: {a.group} vs {b.group}")


@dataclass(frozen=True)
class Element:
    """Group element as a residue tuple."""

    group: FiniteAbelianGroup
    residues: tuple[int, ...]

    def __post_init__(self):
        if len(self.residues) != len(self.group.factors):
            raise ValueError("residue tuple length does not match the number of factors")
        if any(not 0 <= r < n for r, n in zip(self.residues, self.group.factors)):
            raise ValueError(f"residues {self.residues} out of range for {self.group}")

    @property
    def index(self) -> int:
        return self.group.index_of(self.residues)

    def __add__(self, other: "Element") -> "Element":
        _check_same_group(self, other)
        return self.group.element([a + b for a, b in zip(self.residues, other.residues)])

    def __neg__(self) -> "Element":
        return self.group.element([-a for a in self.residues])

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __repr__(self) -> str:
        return "(" + ",".join(str(r) for r in self.residues) + ")"


@dataclass(frozen=True)
class Character:
    """Character of the group, labeled by a residue tuple of the same moduli."""

    group: FiniteAbelianGroup
    label: tuple[int, ...]

    def __post_init__(self):
        if len(self.label) != len(self.group.factors):
            raise ValueError("label tuple length does not match the number of factors")
        if any(not 0 <= c < n for c, n in zip(self.label, self.group.factors)):
            raise ValueError(f"label {self.label} out of range for {self.group}")

    @property
    def index(self) -> int:
        return self.group.index_of(self.label)

    def __mul__(self, other: "Character") -> "Character":
        _check_same_group(self, other)
        return self.group.character([a + b for a, b in zip(self.label, other.label)])

    def conjugate(self) -> "Character":
        return self.group.character([-c for c in self.label])

    def __call__(self, g: Element) -> complex:
        _check_same_group(self, g)
        return complex(self.group.char_table[self.index, g.index])

    def __repr__(self) -> str:
        return "chi(" + ",".join(str(c) for c in self.label) + ")"


def pair(chi: Character, g: Element) -> complex:
    """Evaluate the dual pairing chi(g); an exact root of unity."""
    return chi(g)


@dataclass(frozen=True)
class Subgroup:
    """Subgroup given by the sorted tuple of its element indices."""

    group: FiniteAbelianGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        idx = self.elements
        if not idx or idx[0] != 0 or tuple(sorted(set(idx))) != idx:
            raise ValueError("subgroup must be a sorted duplicate-free index tuple containing 0")
        add = self.group.add_table
        members = set(idx)
        for a in idx:
            for b in idx:
                if int(add[a, b]) not in members:
                    raise ValueError("index set is not closed under the group operation")

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def canonical_id(self) -> tuple[int, ...]:
        return self.elements

    def mask(self) -> np.ndarray:
        out = np.zeros(self.group.order, dtype=bool)
        out[list(self.elements)] = True
        return out

    def __contains__(self, item) -> bool:
        index = item.index if isinstance(item, Element) else int(item)
        return index in set(self.elements)

    @classmethod
    def from_generators(cls, group: FiniteAbelianGroup, generators: Iterable[Element | int]) -> "Subgroup":
        gens = [g.index if isinstance(g, Element) else int(g) for g in generators]
        return cls(group, _closure(group, gens))

    def __repr__(self) -> str:
        return f"Subgroup{list(self.elements)} of {self.group}"


def _closure(group: FiniteAbelianGroup, generators: Sequence[int]) -> tuple[int, ...]:
    add = group.add_table
    members = {0}
    frontier = [0]
    gens = sorted({int(g) for g in generators})
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                s = int(add[a, g])
                if s not in members:
                    members.add(s)
                    nxt.append(s)
        frontier = nxt
    return tuple(sorted(members))


def _extend_subgroup(group: FiniteAbelianGroup, base: tuple[int, ...], g: int) -> tuple[int, ...]:
    # base is a subgroup; adjoin g by unioning the cosets base + m*g.
    add = group.add_table
    base_set = set(base)
    members = set(base)
    mg = g
    while mg not in base_set:
        members.update(int(add[h, mg]) for h in base)
        mg = int(add[mg, g])
    return tuple(sorted(members))


@lru_cache(maxsize=None)
def enumerate_subgroups(group: FiniteAbelianGroup, bound: int = SUBGROUP_ORDER_BOUND) -> tuple[Subgroup, ...]:
    """All subgroups, sorted by (order, canonical index tuple).

    Breadth-first closure over the subgroup lattice: starting from the
    trivial subgroup, each known subgroup is extended by one additional
    generator and closed.  Every subgroup arises this way because its
    generators can be adjoined one at a time.
    """
    if group.order > bound:
        raise SubgroupBoundError(
            f"group order {group.order} exceeds the enumeration bound {bound}"
        )
    trivial = (0,)
    seen = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for base in frontier:
            base_set = set(base)
            for g in range(1, group.order):
                if g in base_set:
                    continue
                extended = _extend_subgroup(group, base, g)
                if extended not in seen:
                    seen.add(extended)
                    nxt.append(extended)
        frontier = nxt
    ordered = sorted(seen, key=lambda t: (len(t), t))
    return tuple(Subgroup(group, t) for t in ordered)


def annihilator(group: FiniteAbelianGroup, subgroup: Subgroup) -> Subgroup:
    """Characters trivial on the subgroup, as a subgroup of label indices.

    Decided exactly on the integer phase table, so no float tolerance is
    involved.
    """
    if subgroup.group != group:
        raise GroupMismatchError("subgroup belongs to a different group")
    cols = group.char_phase[:, list(subgroup.elements)]
    labels = np.nonzero(~cols.any(axis=1))[0]
    return Subgroup(group, tuple(int(c) for c in labels))


def coset_reps(group: FiniteAbelianGroup, subgroup: Subgroup) -> list[Element]:
    """Minimal-index representative of every coset, in index order."""
    if subgroup.group != group:
        raise GroupMismatchError("subgroup belongs to a different group")
    covered = np.zeros(group.order, dtype=bool)
    reps = []
    members = list(subgroup.elements)
    for i in range(group.order):
        if not covered[i]:
            reps.append(group.element_by_index(i))
            covered[group.add_table[i, members]] = True
    return reps


@dataclass(frozen=True)
class Doubling:
    """The doubling map g -> g + g and, when invertible, its inverse."""

    group: FiniteAbelianGroup
    invertible: bool

    def halve(self, g: Element) -> Element:
        if g.group != self.group:
            raise GroupMismatchError("element belongs to a different group")
        if not self.invertible:
            raise UnsupportedOrderError(
                f"doubling is not invertible on {self.group}: even factor present"
            )
        halves = [((n + 1) // 2) * r for r, n in zip(g.residues, self.group.factors)]
        return self.group.element(halves)

    @cached_property
    def halve_table(self) -> np.ndarray:
        """Index of g/2 for every element index g."""
        if not self.invertible:
            raise UnsupportedOrderError(
                f"doubling is not invertible on {self.group}: even factor present"
            )
        inv2 = np.array([(n + 1) // 2 for n in self.group.factors], dtype=np.int64)
        r = (self.group.residues * inv2) % np.array(self.group.factors)
        return np.ravel_multi_index(tuple(r[:, j] for j in range(len(self.group.factors))), self.group.factors)


def doubling(group: FiniteAbelianGroup) -> Doubling:
    return Doubling(group, all(n % 2 == 1 for n in group.factors))


def parse_group(text: str) -> FiniteAbelianGroup:
    """Parse a specification like ``Z4xZ2`` into a group.

    The grammar is ``factor ('x' factor)*`` with ``factor = 'Z' integer``,
    case-insensitive and whitespace-tolerant.  Errors carry the position
    of the offending character in the original string.
    """
    factors: list[int] = []
    positions: list[int] = []
    i = 0
    n = len(text)

    def skip_ws(j: int) -> int:
        while j < n and text[j].isspace():
            j += 1
        return j

    i = skip_ws(i)
    if i == n:
        raise GroupSpecError("empty group specification", i)
    while True:
        if i >= n or text[i] not in "zZ":
            raise GroupSpecError("expected 'Z'", i)
        i = skip_ws(i + 1)
        start = i
        while i < n and text[i].isdigit():
            i += 1
        if start == i:
            raise GroupSpecError("expected an integer after 'Z'", i)
        value = int(text[start:i])
        if value == 0:
            raise GroupSpecError("cyclic factor must be positive", start)
        factors.append(value)
        positions.append(start)
        if len(factors) > 1 and 1 in factors:
            raise GroupSpecError(
                "'Z1' is only allowed as the lone trivial factor", positions[factors.index(1)]
            )
        i = skip_ws(i)
        if i == n:
            break
        if text[i] not in "xX":
            raise GroupSpecError("expected 'x' between factors", i)
        i = skip_ws(i + 1)
    return FiniteAbelianGroup(tuple(factors))
