"""
Exact arithmetic in Z_n and in matrices over Z_n.

Scalars are canonical residues in [0, n). Matrices are numpy int64 arrays
reduced mod n; with n <= 2**16 every product of two residues fits in 32
bits, so a dot product of length < 2**31 cannot overflow int64.

Matrix inversion splits n into prime powers (CRT), eliminates with unit
pivots in each Z_{p^k}, then recombines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ModulusMismatch, NotInvertible

MAX_MODULUS = 2 ** 16


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of n as {p: k}."""
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class RingZn:
    modulus: int

    def __post_init__(self):
        n = self.modulus
        if not isinstance(n, (int, np.integer)) or n < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {n!r}")
        if n > MAX_MODULUS:
            raise ValueError(f"modulus {n} exceeds cap {MAX_MODULUS}")
        object.__setattr__(self, "modulus", int(n))

    def __call__(self, value) -> "Residue":
        return Residue(int(value) % self.modulus, self)

    def __len__(self):
        return self.modulus

    def __str__(self):
        return f"Z_{self.modulus}"

    def elements(self) -> range:
        return range(self.modulus)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def is_unit(self, a: int) -> bool:
        return np.gcd(int(a), self.modulus) == 1

    def inv(self, a: int) -> int:
        if not self.is_unit(a):
            raise NotInvertible(f"{a} is not a unit mod {self.modulus}")
        return pow(int(a), -1, self.modulus)

    def units(self) -> list[int]:
        return [a for a in self.elements() if self.is_unit(a)]

    @cached_property
    def idempotents(self) -> tuple[int, ...]:
        return tuple(enumerate_idempotents(self))

    def reduce(self, a):
        return np.mod(a, self.modulus)


@dataclass(frozen=True)
class Residue:
    """A residue bound to its ring; mixing rings raises ModulusMismatch."""

    value: int
    ring: RingZn = field(repr=False)

    def _other(self, other) -> int:
        if isinstance(other, Residue):
            if other.ring.modulus != self.ring.modulus:
                raise ModulusMismatch(f"{self.ring} vs {other.ring}")
            return other.value
        return int(other)

    def __add__(self, other):
        return Residue(self.ring.add(self.value, self._other(other)), self.ring)

    __radd__ = __add__

    def __mul__(self, other):
        return Residue(self.ring.mul(self.value, self._other(other)), self.ring)

    __rmul__ = __mul__

    def __sub__(self, other):
        return Residue(self.ring.sub(self.value, self._other(other)), self.ring)

    def __neg__(self):
        return Residue(self.ring.neg(self.value), self.ring)

    def __eq__(self, other):
        if isinstance(other, Residue):
            return self.ring.modulus == other.ring.modulus and self.value == other.value
        return self.value == int(other) % self.ring.modulus

    def __hash__(self):
        return hash((self.value, self.ring.modulus))

    def __int__(self):
        return self.value


def zn_arith(op: str, a, b, ring: RingZn | None = None) -> int:
    """Apply ``op`` in {add, mul, neg} to two residues.

    Either pass bare ints plus ``ring``, or two :class:`Residue` values.
    ``neg`` ignores ``b``.
    """
    if isinstance(a, Residue) or isinstance(b, Residue):
        ra = a if isinstance(a, Residue) else None
        rb = b if isinstance(b, Residue) else None
        if ra is not None and rb is not None and ra.ring.modulus != rb.ring.modulus:
            raise ModulusMismatch(f"{ra.ring} vs {rb.ring}")
        base = (ra or rb).ring
        if ring is not None and ring.modulus != base.modulus:
            raise ModulusMismatch(f"{ring} vs {base}")
        ring = base
        a, b = int(a), int(b)
    if ring is None:
        raise TypeError("bare residues need an explicit ring")
    for v in (a, b):
        if not 0 <= v < ring.modulus:
            raise ValueError(f"{v} is not a canonical residue mod {ring.modulus}")
    if op == "add":
        return ring.add(a, b)
    if op == "mul":
        return ring.mul(a, b)
    if op == "neg":
        return ring.neg(a)
    raise ValueError(f"unknown op {op!r}")


def enumerate_idempotents(ring: RingZn) -> list[int]:
    n = ring.modulus
    return [e for e in range(n) if (e * e) % n == e]


# ---------------------------------------------------------------------------
# matrices


def mat_mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.mod(np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64), n)


def identity(k: int) -> np.ndarray:
    return np.eye(k, dtype=np.int64)


def _inverse_prime_power(a: np.ndarray, p: int, q: int) -> np.ndarray:
    # Gauss-Jordan over Z_q, q = p^k; a pivot is usable iff p does not divide it
    k = a.shape[0]
    m = [[int(x) % q for x in row] + [1 if i == j else 0 for j in range(k)] for i, row in enumerate(a.tolist())]
    for col in range(k):
        piv = next((r for r in range(col, k) if m[r][col] % p != 0), None)
        if piv is None:
            raise NotInvertible(f"no unit pivot in column {col} mod {q}")
        m[col], m[piv] = m[piv], m[col]
        inv = pow(m[col][col], -1, q)
        m[col] = [(x * inv) % q for x in m[col]]
        for r in range(k):
            if r != col and m[r][col]:
                c = m[r][col]
                m[r] = [(x - c * y) % q for x, y in zip(m[r], m[col])]
    return np.array([row[k:] for row in m], dtype=np.int64).reshape(k, k)


def crt_combine(residues: list[np.ndarray], moduli: list[int]) -> np.ndarray:
    n = 1
    for q in moduli:
        n *= q
    out = np.zeros_like(residues[0], dtype=object)
    for r, q in zip(residues, moduli):
        m = n // q
        out = out + r.astype(object) * (m * pow(m, -1, q))
    return np.mod(out, n).astype(np.int64)


def inv_mod_matrix(a: np.ndarray, n: int) -> np.ndarray:
    """Inverse of a square integer matrix over Z_n, or NotInvertible."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got shape {a.shape}")
    if a.shape[0] == 0:
        return a.copy()
    parts, moduli = [], []
    for p, k in factorize(n).items():
        q = p ** k
        parts.append(_inverse_prime_power(a, p, q))
        moduli.append(q)
    return crt_combine(parts, moduli)


def det_mod(a: np.ndarray, n: int) -> int:
    """Determinant mod n via exact integer Bareiss elimination."""
    m = [[int(x) for x in row] for row in np.asarray(a).tolist()]
    k = len(m)
    if k == 0:
        return 1 % n
    sign, prev = 1, 1
    for i in range(k - 1):
        if m[i][i] == 0:
            swap = next((r for r in range(i + 1, k) if m[r][i] != 0), None)
            if swap is None:
                return 0
            m[i], m[swap] = m[swap], m[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
        prev = m[i][i]
    return (sign * m[k - 1][k - 1]) % n


@dataclass(frozen=True, eq=False)
class MatZn:
    """A dense matrix over Z_n whose rows and columns carry labels."""

    ring: RingZn
    entries: np.ndarray
    rows: tuple = ()
    cols: tuple = ()

    def __post_init__(self):
        e = np.mod(np.asarray(self.entries, dtype=np.int64), self.ring.modulus)
        if e.ndim != 2:
            raise ValueError("entries must be two-dimensional")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        rows = tuple(self.rows) or tuple(range(e.shape[0]))
        cols = tuple(self.cols) or tuple(range(e.shape[1]))
        if len(rows) != e.shape[0] or len(cols) != e.shape[1]:
            raise ValueError("label lists do not match the entry shape")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    @classmethod
    def identity(cls, ring: RingZn, k: int, labels=()):
        return cls(ring, identity(k), labels, labels)

    @property
    def shape(self):
        return self.entries.shape

    def _check(self, other: "MatZn"):
        if self.ring.modulus != other.ring.modulus:
            raise ModulusMismatch(f"{self.ring} vs {other.ring}")

    def __matmul__(self, other: "MatZn") -> "MatZn":
        self._check(other)
        return MatZn(self.ring, mat_mul(self.entries, other.entries, self.ring.modulus), self.rows, other.cols)

    def __add__(self, other: "MatZn") -> "MatZn":
        self._check(other)
        return MatZn(self.ring, self.entries + other.entries, self.rows, self.cols)

    def __eq__(self, other):
        if not isinstance(other, MatZn):
            return NotImplemented
        return (
            self.ring.modulus == other.ring.modulus
            and self.shape == other.shape
            and bool(np.array_equal(self.entries, other.entries))
        )

    def __hash__(self):
        return hash((self.ring.modulus, self.entries.tobytes(), self.shape))

    def transpose(self) -> "MatZn":
        return MatZn(self.ring, self.entries.T, self.cols, self.rows)

    def det(self) -> int:
        return det_mod(self.entries, self.ring.modulus)

    def inverse(self) -> "MatZn":
        return mat_inverse(self)


def mat_inverse(m: MatZn) -> MatZn:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got shape {m.shape}")
    return MatZn(m.ring, inv_mod_matrix(m.entries, m.ring.modulus), m.cols, m.rows)
