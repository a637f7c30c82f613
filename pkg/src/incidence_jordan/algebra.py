"""Finite Z_n-algebras given by structure constants on a fixed basis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fialg import FIContext, _tensor_mul, full_matrix_context


@dataclass(frozen=True, eq=False)
class TargetAlgebra:
    """A free Z_n-module of rank ``dim`` with product
    ``(a*b)_k = sum_ij a_i b_j table[i, j, k]`` and unit ``one``.

    ``context`` is set when the algebra is an incidence ring, which lets maps
    into it be read back as :class:`FinSeries`.
    """

    modulus: int
    table: np.ndarray
    one: np.ndarray
    name: str = "A"
    context: FIContext | None = field(default=None, compare=False)

    def __post_init__(self):
        t = np.mod(np.asarray(self.table, dtype=np.int64), self.modulus)
        d = t.shape[0]
        if t.shape != (d, d, d):
            raise ValueError(f"structure table must be (d, d, d), got {t.shape}")
        one = np.mod(np.asarray(self.one, dtype=np.int64), self.modulus)
        if one.shape != (d,):
            raise ValueError("unit has the wrong length")
        t.setflags(write=False)
        one.setflags(write=False)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "one", one)

    @classmethod
    def from_context(cls, ctx: FIContext) -> "TargetAlgebra":
        return cls(ctx.n, ctx.structure_tensor, ctx.delta.coords, name=repr(ctx), context=ctx)

    @classmethod
    def matrix_algebra(cls, k: int, modulus: int) -> "TargetAlgebra":
        """M_k(Z_n) with the row-major matrix-unit basis."""
        return cls.from_context(full_matrix_context(k, modulus))

    @property
    def dim(self) -> int:
        return self.table.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TargetAlgebra):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and np.array_equal(self.table, other.table)
            and np.array_equal(self.one, other.one)
        )

    def __hash__(self):
        return hash((self.modulus, self.table.tobytes()))

    def mul(self, a, b) -> np.ndarray:
        return _tensor_mul(self.table, a, b, self.modulus)

    def mul3(self, a, b, c) -> np.ndarray:
        return self.mul(self.mul(a, b), c)

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)

    def basis(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)

    def associativity_witness(self):
        """First basis triple (i, j, k) where (ij)k != i(jk), else None."""
        t, n = self.table, self.modulus
        left = np.mod(np.einsum("ijm,mkl->ijkl", t, t), n)
        right = np.mod(np.einsum("jkm,iml->ijkl", t, t), n)
        bad = np.argwhere((left != right).any(axis=-1))
        return tuple(int(v) for v in bad[0]) if len(bad) else None

    def unit_witness(self):
        """First basis index b with one*b != b or b*one != b, else None."""
        e = self.basis()
        left = self.mul(self.one, e)
        right = self.mul(e, self.one)
        bad = np.flatnonzero((left != e).any(axis=1) | (right != e).any(axis=1))
        return int(bad[0]) if len(bad) else None
