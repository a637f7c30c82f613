"""
The finitary incidence ring FI(C(P, R)) of a finite preorder over Z_n.

An element is a family of class-indexed blocks alpha[x, y] (a |x| by |y|
matrix over Z_n) for every comparable pair of classes x <= y. For finite P
every series is finitary, so FI coincides with the full incidence ring.

Elements have two interchangeable encodings:

* :class:`FinSeries`, a sparse dict of blocks (absent block = zero), used
  for the readable single-element API;
* a coordinate vector over :attr:`FIContext.basis`, used for the batched
  verification kernels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple

import numpy as np

from .errors import BadLabel, ContextMismatch, TooLarge
from .order import Preorder, QuotientPoset, build_preorder, quotient
from .ring import RingZn

DEFAULT_ENUM_CAP = 2 ** 20


class BasisEntry(NamedTuple):
    """Matrix unit eps_{uv} placed in block (x, y); u, v index class members."""

    x: int
    y: int
    u: int
    v: int


class FIContext:
    """FI(P, Z_n) for a quotient poset ``q`` and ring ``ring``."""

    def __init__(self, q: QuotientPoset, ring: RingZn):
        if len(q) == 0:
            raise ValueError("empty preorder")
        self.q = q
        self.ring = ring
        basis = []
        offsets = {}
        for x, y in q.comparable_pairs():
            offsets[(x, y)] = len(basis)
            for u in range(len(q.classes[x])):
                for v in range(len(q.classes[y])):
                    basis.append(BasisEntry(x, y, u, v))
        self.basis: tuple[BasisEntry, ...] = tuple(basis)
        self.offsets: dict[tuple[int, int], int] = offsets
        self.dim = len(basis)
        bx = np.array([b.x for b in basis])
        by = np.array([b.y for b in basis])
        self.diag_mask = bx == by
        self.fz_mask = ~self.diag_mask
        self._bx, self._by = bx, by

    @classmethod
    def from_pairs(cls, modulus: int, elements, pairs=()) -> "FIContext":
        return cls(quotient(build_preorder(elements, pairs)), RingZn(modulus))

    @classmethod
    def from_preorder(cls, p: Preorder, modulus: int) -> "FIContext":
        return cls(quotient(p), RingZn(modulus))

    @property
    def n(self) -> int:
        return self.ring.modulus

    @property
    def classes(self):
        return self.q.classes

    @property
    def num_classes(self) -> int:
        return len(self.q)

    def __eq__(self, other):
        if not isinstance(other, FIContext):
            return NotImplemented
        return self.n == other.n and self.q.preorder == other.q.preorder

    def __hash__(self):
        return hash((self.n, self.q.preorder))

    def __repr__(self):
        cls_txt = " ".join("{" + ",".join(c) + "}" for c in self.classes)
        return f"FIContext(Z_{self.n}, classes={cls_txt}, dim={self.dim})"

    # -- class sets ---------------------------------------------------------

    def class_set(self, X) -> frozenset[int]:
        """Normalise a set of classes given by index or by member label.

        ``None`` means every class.
        """
        if X is None:
            return frozenset(range(self.num_classes))
        if isinstance(X, (int, str, np.integer)):
            X = [X]
        out = set()
        for item in X:
            if isinstance(item, (int, np.integer)):
                if not 0 <= item < self.num_classes:
                    raise BadLabel(f"class index {item} out of range")
                out.add(int(item))
            else:
                out.add(self.q.class_index(str(item)))
        return frozenset(out)

    def all_class_subsets(self) -> list[frozenset[int]]:
        k = self.num_classes
        return [frozenset(c) for r in range(k + 1) for c in itertools.combinations(range(k), r)]

    def block_shape(self, x: int, y: int) -> tuple[int, int]:
        return len(self.classes[x]), len(self.classes[y])

    def block_slice(self, x: int, y: int) -> slice:
        start = self.offsets[(x, y)]
        r, c = self.block_shape(x, y)
        return slice(start, start + r * c)

    def restrict_mask(self, X=None, Y=None) -> np.ndarray:
        xs, ys = self.class_set(X), self.class_set(Y)
        return np.isin(self._bx, list(xs)) & np.isin(self._by, list(ys))

    def class_diag_mask(self, x: int) -> np.ndarray:
        return (self._bx == x) & (self._by == x)

    def pair_mask(self, x: int, y: int) -> np.ndarray:
        return (self._bx == x) & (self._by == y)

    # -- element constructors -----------------------------------------------

    def zero(self) -> "FinSeries":
        return FinSeries(self, {})

    def series(self, coords) -> "FinSeries":
        coords = np.mod(np.asarray(coords, dtype=np.int64), self.n)
        if coords.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coordinates, got shape {coords.shape}")
        blocks = {}
        for (x, y) in self.offsets:
            blk = coords[self.block_slice(x, y)].reshape(self.block_shape(x, y))
            blocks[(x, y)] = blk
        return FinSeries(self, blocks)

    def basis_coords(self, i: int) -> np.ndarray:
        c = np.zeros(self.dim, dtype=np.int64)
        c[i] = 1
        return c

    def basis_element(self, i: int) -> "FinSeries":
        return self.series(self.basis_coords(i))

    def idempotent(self, X=None) -> "FinSeries":
        """The diagonal idempotent e_X (identity blocks on classes in X)."""
        xs = self.class_set(X)
        return FinSeries(self, {(x, x): np.eye(len(self.classes[x]), dtype=np.int64) for x in xs})

    @cached_property
    def delta(self) -> "FinSeries":
        return self.idempotent(None)

    def e(self, x) -> "FinSeries":
        return self.idempotent([x])

    def unit(self, u: str, v: str, r: int = 1) -> "FinSeries":
        """r·eps_{uv} e_{x̄ȳ} for element labels u ⪯ v."""
        x, y = self.q.class_index(u), self.q.class_index(v)
        if not self.q.le(x, y):
            raise BadLabel(f"{u!r} does not precede {v!r}")
        blk = np.zeros(self.block_shape(x, y), dtype=np.int64)
        blk[self.q.member_index(u), self.q.member_index(v)] = r
        return FinSeries(self, {(x, y): blk})

    def element_index(self, u: str, v: str) -> int:
        """Coordinate index of the matrix unit at element pair (u, v)."""
        x, y = self.q.class_index(u), self.q.class_index(v)
        if (x, y) not in self.offsets:
            raise BadLabel(f"{u!r} does not precede {v!r}")
        return self.offsets[(x, y)] + self.q.member_index(u) * len(self.classes[y]) + self.q.member_index(v)

    def random(self, rng: np.random.Generator, part: str = "all") -> "FinSeries":
        return self.series(self.random_coords(rng, 1, part)[0])

    def random_coords(self, rng: np.random.Generator, count: int, part: str = "all") -> np.ndarray:
        c = rng.integers(0, self.n, size=(count, self.dim), dtype=np.int64)
        if part == "D":
            c[:, self.fz_mask] = 0
        elif part == "FZ":
            c[:, self.diag_mask] = 0
        elif part != "all":
            raise ValueError(f"unknown part {part!r}")
        return c

    # -- multiplication -----------------------------------------------------

    @cached_property
    def structure_tensor(self) -> np.ndarray:
        """T[i, j, k]: coefficient of basis k in basis_i * basis_j, computed
        by block convolution."""
        d = self.dim
        t = np.zeros((d, d, d), dtype=np.int64)
        elems = [self.basis_element(i) for i in range(d)]
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                t[i, j] = convolve(a, b).coords
        t.setflags(write=False)
        return t

    def mul_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Batched product on coordinate arrays (..., dim)."""
        return _tensor_mul(self.structure_tensor, a, b, self.n)

    def algebra(self):
        from .algebra import TargetAlgebra

        return TargetAlgebra.from_context(self)

    # -- enumeration --------------------------------------------------------

    def size(self) -> int:
        return self.n ** self.dim

    def enumerate_coords(self, cap: int = DEFAULT_ENUM_CAP, mask=None) -> np.ndarray:
        """Every coordinate vector (optionally supported on ``mask``) in
        lexicographic order, as one array."""
        free = np.arange(self.dim) if mask is None else np.flatnonzero(mask)
        total = self.n ** len(free)
        if total > cap:
            raise TooLarge(f"{total} elements exceed cap {cap}")
        grid = np.indices((self.n,) * len(free), dtype=np.int64).reshape(len(free), -1).T
        out = np.zeros((total, self.dim), dtype=np.int64)
        out[:, free] = grid
        return out

    def enumerate_elements(self, cap: int = DEFAULT_ENUM_CAP) -> Iterator["FinSeries"]:
        if self.size() > cap:
            raise TooLarge(f"{self.size()} elements exceed cap {cap}")
        for c in itertools.product(range(self.n), repeat=self.dim):
            yield self.series(np.array(c, dtype=np.int64))


def _tensor_mul(t: np.ndarray, a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    left = np.mod(np.einsum("...i,ijk->...jk", a, t), n)
    return np.mod(np.einsum("...jk,...j->...k", left, b), n)


@dataclass(frozen=True, eq=False)
class FinSeries:
    """A series sum alpha_{xy} e_{xy}; ``blocks`` maps class pairs to
    matrices and omits zero blocks."""

    context: FIContext
    blocks: dict

    def __post_init__(self):
        ctx = self.context
        clean = {}
        for key, blk in self.blocks.items():
            x, y = key
            if not ctx.q.le(x, y):
                raise ValueError(f"block {key} is not on a comparable pair")
            blk = np.mod(np.asarray(blk, dtype=np.int64), ctx.n)
            if blk.shape != ctx.block_shape(x, y):
                raise ValueError(f"block {key} has shape {blk.shape}, expected {ctx.block_shape(x, y)}")
            if blk.any():
                blk.setflags(write=False)
                clean[(int(x), int(y))] = blk
        object.__setattr__(self, "blocks", clean)

    def block(self, x: int, y: int) -> np.ndarray:
        if (x, y) in self.blocks:
            return self.blocks[(x, y)]
        return np.zeros(self.context.block_shape(x, y), dtype=np.int64)

    @cached_property
    def coords(self) -> np.ndarray:
        c = np.zeros(self.context.dim, dtype=np.int64)
        for (x, y), blk in self.blocks.items():
            c[self.context.block_slice(x, y)] = blk.reshape(-1)
        c.setflags(write=False)
        return c

    def _same(self, other: "FinSeries"):
        if not isinstance(other, FinSeries):
            raise TypeError(f"expected FinSeries, got {type(other).__name__}")
        if self.context is not other.context and self.context != other.context:
            raise ContextMismatch(f"{self.context!r} vs {other.context!r}")

    def __add__(self, other):
        self._same(other)
        keys = set(self.blocks) | set(other.blocks)
        return FinSeries(self.context, {k: self.block(*k) + other.block(*k) for k in keys})

    def __sub__(self, other):
        self._same(other)
        keys = set(self.blocks) | set(other.blocks)
        return FinSeries(self.context, {k: self.block(*k) - other.block(*k) for k in keys})

    def __neg__(self):
        return FinSeries(self.context, {k: -b for k, b in self.blocks.items()})

    def __rmul__(self, r):
        if isinstance(r, (int, np.integer)):
            return FinSeries(self.context, {k: int(r) * b for k, b in self.blocks.items()})
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.__rmul__(other)
        return convolve(self, other)

    def __eq__(self, other):
        if not isinstance(other, FinSeries):
            return NotImplemented
        return self.context == other.context and bool(np.array_equal(self.coords, other.coords))

    def __hash__(self):
        return hash(self.coords.tobytes())

    def is_zero(self) -> bool:
        return not self.blocks

    def restrict(self, X=None, Y=None) -> "FinSeries":
        return restrict(self, X, Y)

    def split_dz(self):
        return split_dz(self)

    def __str__(self):
        return serialize(self)

    __repr__ = __str__


def convolve(a: FinSeries, b: FinSeries) -> FinSeries:
    """(ab)_{xy} = sum over x <= z <= y of a_{xz} b_{zy}."""
    a._same(b)
    ctx = a.context
    n = ctx.n
    out: dict = {}
    for (x, z), ablk in a.blocks.items():
        for (z2, y), bblk in b.blocks.items():
            if z2 != z:
                continue
            prod = ablk @ bblk
            out[(x, y)] = np.mod(out[(x, y)] + prod, n) if (x, y) in out else np.mod(prod, n)
    return FinSeries(ctx, out)


def idempotent(context: FIContext, X=None) -> FinSeries:
    return context.idempotent(X)


def split_dz(a: FinSeries) -> tuple[FinSeries, FinSeries]:
    """(alpha_D, alpha_Z): the diagonal part and the strictly upper part."""
    d = {k: v for k, v in a.blocks.items() if k[0] == k[1]}
    z = {k: v for k, v in a.blocks.items() if k[0] != k[1]}
    return FinSeries(a.context, d), FinSeries(a.context, z)


def restrict(a: FinSeries, X=None, Y=None) -> FinSeries:
    """alpha|_X^Y: keep blocks whose source class is in X and target in Y.

    ``None`` stands for all classes, so ``restrict(a, X)`` is alpha|_X and
    ``restrict(a, None, Y)`` is alpha|^Y.
    """
    xs, ys = a.context.class_set(X), a.context.class_set(Y)
    return FinSeries(a.context, {k: v for k, v in a.blocks.items() if k[0] in xs and k[1] in ys})


def is_finitary(a: FinSeries) -> bool:
    """For every x < y only finitely many u < v in [x, y] carry a nonzero block.

    Over a finite P the count is bounded by the number of class pairs, so this
    is always true; the quantifier is still evaluated literally.
    """
    q = a.context.q
    support = [(u, v) for (u, v) in a.blocks if u != v]
    counts = [sum(1 for u, v in support if q.le(x, u) and q.le(v, y)) for x, y in q.strict_pairs()]
    return all(c <= len(support) for c in counts)


def enumerate_elements(context: FIContext, cap: int = DEFAULT_ENUM_CAP) -> Iterator[FinSeries]:
    return context.enumerate_elements(cap)


def serialize(a: FinSeries) -> str:
    """Deterministic text form: ``{x..}->{y..}: e00 e01 ...; ...`` for the
    nonzero blocks in canonical order, or ``0``."""
    ctx = a.context
    parts = []
    for key in ctx.offsets:
        if key in a.blocks:
            x, y = key
            src = ",".join(ctx.classes[x])
            dst = ",".join(ctx.classes[y])
            entries = " ".join(str(int(v)) for v in a.blocks[key].reshape(-1))
            parts.append(f"{{{src}}}->{{{dst}}}: {entries}")
    return "; ".join(parts) if parts else "0"


def parse_series(context: FIContext, text: str) -> FinSeries:
    """Inverse of :func:`serialize`."""
    text = text.strip()
    if text == "0":
        return context.zero()
    blocks = {}
    for part in text.split(";"):
        head, _, body = part.partition(":")
        src, _, dst = head.strip().partition("->")
        x = context.q.class_index(src.strip(" {}").split(",")[0])
        y = context.q.class_index(dst.strip(" {}").split(",")[0])
        vals = [int(v) for v in body.split()]
        blocks[(x, y)] = np.array(vals, dtype=np.int64).reshape(context.block_shape(x, y))
    return FinSeries(context, blocks)


def chain(length: int, modulus: int) -> FIContext:
    """Chain x0 < x1 < ... of singleton classes."""
    labels = [f"x{i}" for i in range(length)]
    return FIContext.from_pairs(modulus, labels, list(zip(labels, labels[1:])))


def full_matrix_context(k: int, modulus: int) -> FIContext:
    """A single class of size k, so FI is the full matrix ring M_k(Z_n)."""
    labels = [f"m{i}" for i in range(k)]
    pairs = list(zip(labels, labels[1:])) + ([(labels[-1], labels[0])] if k > 1 else [])
    return FIContext.from_pairs(modulus, labels, pairs)
