"""Finite preorders and their quotient posets."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import BadLabel

DEFAULT_MAX_ELEMENTS = 32


@dataclass(frozen=True, eq=False)
class Preorder:
    """A reflexive, transitive relation ``leq`` on ``elements``.

    ``leq[i, j]`` is True iff elements[i] precedes elements[j].
    """

    elements: tuple[str, ...]
    leq: np.ndarray

    def __post_init__(self):
        rel = np.asarray(self.leq, dtype=bool)
        k = len(self.elements)
        if rel.shape != (k, k):
            raise ValueError(f"relation shape {rel.shape} does not match {k} elements")
        if not rel.diagonal().all():
            raise ValueError("relation is not reflexive")
        # transitivity: leq∘leq ⊆ leq
        comp = (rel.astype(np.int64) @ rel.astype(np.int64)) > 0
        if (comp & ~rel).any():
            raise ValueError("relation is not transitive")
        rel.setflags(write=False)
        object.__setattr__(self, "leq", rel)
        object.__setattr__(self, "elements", tuple(self.elements))

    def __len__(self):
        return len(self.elements)

    def index(self, label: str) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise BadLabel(f"unknown element {label!r}") from None

    def le(self, a: str, b: str) -> bool:
        return bool(self.leq[self.index(a), self.index(b)])

    def pairs(self) -> list[tuple[str, str]]:
        """All related pairs (u, v) with u ⪯ v, in element order."""
        return [(self.elements[i], self.elements[j]) for i, j in zip(*np.nonzero(self.leq))]

    def __eq__(self, other):
        if not isinstance(other, Preorder):
            return NotImplemented
        return self.elements == other.elements and bool(np.array_equal(self.leq, other.leq))

    def __hash__(self):
        return hash((self.elements, self.leq.tobytes()))


def build_preorder(
    elements: Sequence[str],
    generating_pairs: Iterable[tuple[str, str]] = (),
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> Preorder:
    """Reflexive-transitive closure of ``generating_pairs`` on ``elements``."""
    elements = tuple(str(e) for e in elements)
    if len(set(elements)) != len(elements):
        raise BadLabel(f"duplicate labels in {elements}")
    if len(elements) > max_elements:
        raise ValueError(f"{len(elements)} elements exceed the cap of {max_elements}")
    pos = {e: i for i, e in enumerate(elements)}
    k = len(elements)
    rel = np.eye(k, dtype=bool)
    for a, b in generating_pairs:
        if a not in pos or b not in pos:
            raise BadLabel(f"pair ({a!r}, {b!r}) references an unknown label")
        rel[pos[a], pos[b]] = True
    # Warshall
    for m in range(k):
        rel |= np.outer(rel[:, m], rel[m, :])
    return Preorder(elements, rel)


class ClassShape(str, Enum):
    ALL_SINGLETON = "all_singleton"
    ALL_NONTRIVIAL_FINITE = "all_nontrivial_finite"
    MIXED = "mixed"


@dataclass(frozen=True, eq=False)
class QuotientPoset:
    """The quotient P/∼ with its induced partial order.

    ``classes[i]`` lists the members of class i in label order; classes are
    sorted by their smallest member label. ``leq_bar[i, j]`` is the induced
    order on class indices.
    """

    preorder: Preorder
    classes: tuple[tuple[str, ...], ...]
    leq_bar: np.ndarray
    class_of: dict

    def __len__(self):
        return len(self.classes)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def le(self, i: int, j: int) -> bool:
        return bool(self.leq_bar[i, j])

    def lt(self, i: int, j: int) -> bool:
        return i != j and bool(self.leq_bar[i, j])

    def comparable_pairs(self) -> list[tuple[int, int]]:
        """Class pairs (i, j) with i ≤ j, lexicographic in (i, j)."""
        k = len(self.classes)
        return [(i, j) for i in range(k) for j in range(k) if self.leq_bar[i, j]]

    def strict_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in self.comparable_pairs() if i != j]

    def class_index(self, label: str) -> int:
        """Index of the class containing ``label``; a class may also be named by
        any of its members."""
        try:
            return self.class_of[label]
        except KeyError:
            raise BadLabel(f"unknown element {label!r}") from None

    def class_name(self, i: int) -> str:
        return self.classes[i][0]

    def member_index(self, label: str) -> int:
        """Position of ``label`` inside its own class."""
        return self.classes[self.class_index(label)].index(label)


def quotient(p: Preorder) -> QuotientPoset:
    rel = p.leq
    k = len(p)
    equiv = rel & rel.T
    seen = [False] * k
    blocks = []
    for i in range(k):
        if seen[i]:
            continue
        members = [j for j in range(k) if equiv[i, j]]
        for j in members:
            seen[j] = True
        blocks.append(sorted(p.elements[j] for j in members))
    blocks.sort(key=lambda b: b[0])
    classes = tuple(tuple(b) for b in blocks)
    class_of = {label: ci for ci, block in enumerate(classes) for label in block}
    m = len(classes)
    leq_bar = np.zeros((m, m), dtype=bool)
    for a in range(m):
        ia = p.index(classes[a][0])
        for b in range(m):
            leq_bar[a, b] = rel[ia, p.index(classes[b][0])]
    off = leq_bar & leq_bar.T & ~np.eye(m, dtype=bool)
    assert not off.any(), "induced order is not antisymmetric"
    leq_bar.setflags(write=False)
    return QuotientPoset(p, classes, leq_bar, class_of)


def check_class_size_hypothesis(q: QuotientPoset) -> ClassShape:
    sizes = q.sizes
    if all(s == 1 for s in sizes):
        return ClassShape.ALL_SINGLETON
    if all(s > 1 for s in sizes):
        return ClassShape.ALL_NONTRIVIAL_FINITE
    return ClassShape.MIXED


def poset_from_relation(elements: Sequence[str], rel) -> Preorder:
    """Wrap an explicit relation matrix, validating the preorder axioms."""
    return Preorder(tuple(elements), np.asarray(rel, dtype=bool))
