"""
Additive maps out of FI(P, Z_n), Jordan-axiom verification, and the
decomposition of a Jordan isomorphism into hom/anti-hom pieces.

A map is stored as its matrix over the canonical bases: column i is the
image of basis element i. Over Z_n every additive map between free modules
is Z_n-linear, so this captures all additive maps.

Maps that only make sense on FZ (psi, theta) are stored as maps on all of
FI whose diagonal columns are zero, i.e. psi∘pi_Z.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import TargetAlgebra
from .errors import (
    HypothesisViolated,
    JordanCheckFailed,
    NoDecomposition,
    NotInvertible,
    PreconditionFailed,
    TooLarge,
)
from .fialg import DEFAULT_ENUM_CAP, FIContext, FinSeries
from .order import ClassShape, check_class_size_hypothesis
from .ring import inv_mod_matrix

DEFAULT_SAMPLES = 10_000
CHUNK = 1 << 15


# ---------------------------------------------------------------------------
# verdicts


def fmt_vec(v) -> str:
    return "[" + ",".join(str(int(x)) for x in np.asarray(v).reshape(-1)) + "]"


@dataclass(frozen=True)
class Check:
    """Outcome of one contract. ``count`` is the number of instances tested;
    a failure carries witness tokens of the form ``key=value``."""

    name: str
    passed: bool
    count: int = 0
    witness: tuple[str, ...] = ()
    note: str = ""

    def __bool__(self):
        return self.passed

    def line(self) -> str:
        parts = ["CHECK", self.name, "PASS" if self.passed else "FAIL", f"n={self.count}"]
        if self.note:
            parts.append(f"mode={self.note}")
        parts.extend(self.witness)
        return " ".join(parts)


@dataclass
class Verdict:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _compare(name, lhs, rhs, labels, note="") -> Check:
    """Compare stacked results; ``labels(index_tuple)`` renders a witness."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    count = int(np.prod(lhs.shape[:-1])) if lhs.ndim > 1 else 1
    bad = np.argwhere((lhs != rhs).any(axis=-1)) if lhs.ndim > 1 else ([()] if (lhs != rhs).any() else [])
    if len(bad) == 0:
        return Check(name, True, count, note=note)
    idx = tuple(int(i) for i in bad[0])
    wit = tuple(labels(idx)) + (f"lhs={fmt_vec(lhs[idx])}", f"rhs={fmt_vec(rhs[idx])}")
    return Check(name, False, count, wit, note=note)


# ---------------------------------------------------------------------------
# maps


class AdditiveMap:
    """A Z_n-linear map FI(source) -> target given by ``matrix``.

    With ``bijective=True`` the inverse is computed up front and
    NotInvertible is raised for singular matrices.
    """

    def __init__(self, source: FIContext, target: TargetAlgebra, matrix, *, bijective: bool = True, name: str = "phi"):
        m = np.mod(np.asarray(matrix, dtype=np.int64), source.n)
        if m.shape != (target.dim, source.dim):
            raise ValueError(f"matrix shape {m.shape} != ({target.dim}, {source.dim})")
        if target.modulus != source.n:
            raise ValueError("source and target moduli differ")
        m.setflags(write=False)
        self.source = source
        self.target = target
        self.matrix = m
        self.name = name
        self.inverse_matrix = None
        if bijective:
            if target.dim != source.dim:
                raise NotInvertible(f"dimensions {source.dim} -> {target.dim} differ")
            inv = inv_mod_matrix(m, source.n)
            inv.setflags(write=False)
            self.inverse_matrix = inv

    def __repr__(self):
        return f"AdditiveMap({self.name}, {self.source!r} -> {self.target.name})"

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def bijective(self) -> bool:
        return self.inverse_matrix is not None

    @cached_property
    def images(self) -> np.ndarray:
        """Row i is the image of basis element i."""
        return np.ascontiguousarray(self.matrix.T)

    def apply(self, coords) -> np.ndarray:
        """Images of a batch of source coordinate vectors (..., d_s)."""
        return np.mod(np.asarray(coords, dtype=np.int64) @ self.images, self.n)

    def __call__(self, a) -> np.ndarray:
        if isinstance(a, FinSeries):
            a = a.coords
        return self.apply(a)

    def preimage(self, y) -> np.ndarray:
        if self.inverse_matrix is None:
            raise NotInvertible(f"{self.name} has no inverse")
        return np.mod(np.asarray(y, dtype=np.int64) @ self.inverse_matrix.T, self.n)

    def as_series(self, y) -> FinSeries:
        if self.target.context is None:
            raise TypeError("target is not an incidence ring")
        return self.target.context.series(y)

    def masked(self, mask, name=None) -> "AdditiveMap":
        """This map precomposed with the projection onto the basis in ``mask``."""
        m = self.matrix * np.asarray(mask, dtype=np.int64)[None, :]
        return AdditiveMap(self.source, self.target, m, bijective=False, name=name or self.name)

    def plus(self, other: "AdditiveMap", name=None) -> "AdditiveMap":
        return AdditiveMap(self.source, self.target, self.matrix + other.matrix, bijective=False, name=name or f"{self.name}+{other.name}")

    def equals(self, other: "AdditiveMap", mask=None) -> bool:
        if mask is None:
            return bool(np.array_equal(self.matrix, other.matrix))
        return bool(np.array_equal(self.matrix[:, mask], other.matrix[:, mask]))

    @cached_property
    def idempotent_images(self) -> np.ndarray:
        """phi(e_x) for every class x, stacked."""
        return np.stack([self(self.source.e(x)) for x in range(self.source.num_classes)])

    @cached_property
    def prime_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """Matrices of alpha -> alpha' and alpha -> alpha'' on FZ (zero on D)."""
        d = self.source.dim
        basis = np.eye(d, dtype=np.int64)
        basis[:, self.source.diag_mask] = 0
        p1, p2 = prime_coords(self, basis)
        p1[:, self.source.diag_mask] = 0
        p2[:, self.source.diag_mask] = 0
        return p1.T, p2.T


def _mul(target: TargetAlgebra, a, b):
    a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
    return target.mul(a, b)


def basis_label(ctx: FIContext, i: int) -> str:
    b = ctx.basis[i]
    return f"{ctx.classes[b.x][b.u]}.{ctx.classes[b.y][b.v]}"


def _mask(ctx: FIContext, on) -> np.ndarray:
    if on is None or (isinstance(on, str) and on == "all"):
        return np.ones(ctx.dim, dtype=bool)
    if isinstance(on, str):
        if on == "D":
            return ctx.diag_mask
        if on == "FZ":
            return ctx.fz_mask
        raise ValueError(f"unknown domain {on!r}")
    return np.asarray(on, dtype=bool)


# ---------------------------------------------------------------------------
# Jordan axioms


def _sq_check(phi: AdditiveMap, xs: np.ndarray):
    src = phi.source
    lhs = phi.apply(src.mul_coords(xs, xs))
    ys = phi.apply(xs)
    rhs = phi.target.mul(ys, ys)
    return lhs, rhs


def is_jordan_hom(
    phi: AdditiveMap,
    samples: int = DEFAULT_SAMPLES,
    cap: int = DEFAULT_ENUM_CAP,
    seed: int = 0,
) -> Verdict:
    """Check phi(r^2) = phi(r)^2, phi(rsr) = phi(r)phi(s)phi(r),
    phi(rs + sr) = phi(r)phi(s) + phi(s)phi(r), phi(1) = 1 and bijectivity.

    The square identity is checked on every element when FI has at most
    ``cap`` elements, otherwise on ``samples`` random ones. The symmetric
    identity is bilinear, so basis pairs cover it completely.
    """
    rng = np.random.default_rng(seed)
    src, tgt = phi.source, phi.target
    checks = []

    # phi(r^2) = phi(r)^2
    exhaustive = src.size() <= cap
    lab = lambda xs: (lambda idx: (f"r={fmt_vec(xs[idx[0]])}",))
    if exhaustive:
        total = src.size()
        all_x = src.enumerate_coords(cap)
        chk = Check("jordan.square", True, total, note="exhaustive")
        for start in range(0, total, CHUNK):
            xs = all_x[start:start + CHUNK]
            lhs, rhs = _sq_check(phi, xs)
            c = _compare("jordan.square", lhs, rhs, lab(xs), note="exhaustive")
            if not c.passed:
                chk = Check(c.name, False, total, c.witness, note="exhaustive")
                break
        checks.append(chk)
    else:
        xs = src.random_coords(rng, samples)
        lhs, rhs = _sq_check(phi, xs)
        checks.append(_compare("jordan.square", lhs, rhs, lab(xs), note="sampled"))

    # phi(rs + sr) = phi(r)phi(s) + phi(s)phi(r) on basis pairs
    T = src.structure_tensor
    sym = np.mod(T + T.transpose(1, 0, 2), src.n)
    lhs = phi.apply(sym)
    im = phi.images
    rs = _mul(tgt, im[:, None, :], im[None, :, :])
    rhs = np.mod(rs + rs.transpose(1, 0, 2), src.n)
    checks.append(_compare("jordan.symmetric", lhs, rhs, lambda idx: (f"r={basis_label(src, idx[0])}", f"s={basis_label(src, idx[1])}"), note="basis"))

    # phi(rsr) = phi(r)phi(s)phi(r) on random triples
    rs_ = src.random_coords(rng, samples)
    ss_ = src.random_coords(rng, samples)
    lhs = phi.apply(src.mul_coords(src.mul_coords(rs_, ss_), rs_))
    pr, ps = phi.apply(rs_), phi.apply(ss_)
    rhs = tgt.mul(tgt.mul(pr, ps), pr)
    checks.append(_compare("jordan.triple", lhs, rhs, lambda idx: (f"r={fmt_vec(rs_[idx[0]])}", f"s={fmt_vec(ss_[idx[0]])}"), note="sampled"))

    one = phi(src.delta)
    checks.append(_compare("jordan.unital", one, tgt.one, lambda idx: ()))
    checks.append(Check("jordan.bijective", phi.bijective, 1, () if phi.bijective else ("matrix=singular",)))
    return Verdict(checks)


def _product_check(phi: AdditiveMap, anti: bool, on=None, name=None) -> Check:
    src, tgt = phi.source, phi.target
    idx = np.flatnonzero(_mask(src, on))
    name = name or ("antihom" if anti else "hom")
    if len(idx) == 0:
        return Check(name, True, 0)
    T = src.structure_tensor[np.ix_(idx, idx)]
    lhs = phi.apply(T)
    im = phi.images[idx]
    if anti:
        rhs = _mul(tgt, im[None, :, :], im[:, None, :])
    else:
        rhs = _mul(tgt, im[:, None, :], im[None, :, :])
    return _compare(name, lhs, rhs, lambda k: (f"a={basis_label(src, idx[k[0]])}", f"b={basis_label(src, idx[k[1]])}"))


def is_hom(phi: AdditiveMap, on=None, name=None) -> Check:
    """phi(ab) = phi(a)phi(b) on all basis pairs of the chosen domain
    (``"all"``, ``"D"``, ``"FZ"`` or a basis mask)."""
    return _product_check(phi, False, on, name)


def is_antihom(phi: AdditiveMap, on=None, name=None) -> Check:
    return _product_check(phi, True, on, name)


def _require_jordan(phi, verdict, samples, cap, seed):
    if verdict is None:
        verdict = is_jordan_hom(phi, samples=samples, cap=cap, seed=seed)
    if not verdict.passed:
        names = ", ".join(c.name for c in verdict.failures)
        raise JordanCheckFailed(f"{phi.name} is not a Jordan isomorphism ({names})")
    return verdict


# ---------------------------------------------------------------------------
# prime parts


@dataclass(frozen=True)
class PrimePair:
    alpha_prime: FinSeries
    alpha_dprime: FinSeries


def prime_coords(phi: AdditiveMap, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """alpha' and alpha'' for a batch of FZ coordinate vectors.

    For x < y the (x, y) block of alpha' is read off phi^{-1} of
    phi(e_x) phi(alpha) phi(e_y); alpha'' uses phi(e_y) phi(alpha) phi(e_x).
    """
    src, tgt = phi.source, phi.target
    xs = np.asarray(xs, dtype=np.int64)
    ys = phi.apply(xs)
    E = phi.idempotent_images
    p1 = np.zeros_like(xs)
    p2 = np.zeros_like(xs)
    for x, y in src.q.strict_pairs():
        m = src.pair_mask(x, y)
        w1 = _mul(tgt, _mul(tgt, E[x], ys), E[y])
        w2 = _mul(tgt, _mul(tgt, E[y], ys), E[x])
        p1[..., m] = phi.preimage(w1)[..., m]
        p2[..., m] = phi.preimage(w2)[..., m]
    return p1, p2


def prime_parts(phi: AdditiveMap, a: FinSeries) -> PrimePair:
    src = a.context
    if a.coords[src.diag_mask].any():
        raise PreconditionFailed("alpha in FZ", f"{a} has a diagonal part")
    if not phi.bijective:
        raise PreconditionFailed("phi bijective")
    p1, p2 = prime_coords(phi, a.coords[None, :])
    pair = PrimePair(src.series(p1[0]), src.series(p2[0]))
    assert pair.alpha_prime + pair.alpha_dprime == a, "alpha != alpha' + alpha''"
    return pair


def psi_theta_on_fz(phi: AdditiveMap) -> tuple[AdditiveMap, AdditiveMap]:
    """psi(alpha) = phi(alpha') and theta(alpha) = phi(alpha''), as maps that
    vanish on D."""
    p1, p2 = phi.prime_matrices
    src = phi.source
    psi = AdditiveMap(src, phi.target, phi.matrix @ p1, bijective=False, name="psi")
    theta = AdditiveMap(src, phi.target, phi.matrix @ p2, bijective=False, name="theta")
    return psi, theta


def restriction_compat_check(phi: AdditiveMap, samples: int = 100, seed: int = 0) -> list[Check]:
    """(alpha|_U^V)' = alpha'|_U^V and likewise for '' over all U, V."""
    src = phi.source
    rng = np.random.default_rng(seed)
    xs = src.random_coords(rng, samples, "FZ")
    p1, p2 = prime_coords(phi, xs)
    subsets = src.all_class_subsets()
    out = []
    for which, full in (("prime", p1), ("dprime", p2)):
        name = f"restriction-compat.{which}"
        result = Check(name, True, 0)
        count = 0
        for U, V in itertools.product(subsets, repeat=2):
            mask = src.restrict_mask(U, V)
            r = xs * mask
            q1, q2 = prime_coords(phi, r)
            lhs = q1 if which == "prime" else q2
            rhs = full * mask
            c = _compare(name, lhs, rhs, lambda k: (f"U={_setname(src, U)}", f"V={_setname(src, V)}", f"alpha={fmt_vec(xs[k[0]])}"))
            count += c.count
            if not c.passed:
                result = c
                break
        out.append(Check(name, result.passed, count, result.witness))
    return out


def _setname(ctx: FIContext, X) -> str:
    return "{" + ",".join(ctx.classes[i][0] for i in sorted(X)) + "}"


# ---------------------------------------------------------------------------
# near-sum decomposition


@dataclass
class LocalSplit:
    cls: int
    psi: AdditiveMap
    theta: AdditiveMap
    f: np.ndarray
    g: np.ndarray
    scalar_f: int | None
    scalar_g: int | None
    checks: list[Check]


@dataclass
class DecompReport:
    mode: str
    psi: AdditiveMap
    theta: AdditiveMap
    checks: list[Check]
    seed: int
    idempotent_witnesses: list[tuple[str, str, str]] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def near_sum_decompose(
    phi: AdditiveMap,
    verdict: Verdict | None = None,
    samples: int = DEFAULT_SAMPLES,
    cap: int = DEFAULT_ENUM_CAP,
    seed: int = 0,
) -> DecompReport:
    """Split phi as the near-sum of psi~ = phi∘pi_D + psi and
    theta~ = phi∘pi_D + theta with respect to D and FZ."""
    _require_jordan(phi, verdict, samples, cap, seed)
    src, tgt = phi.source, phi.target
    D, Z = src.diag_mask, src.fz_mask
    psi, theta = psi_theta_on_fz(phi)
    phi_d = phi.masked(D, "phi_D")
    psi_t = phi_d.plus(psi, "psi~")
    theta_t = phi_d.plus(theta, "theta~")
    checks = []

    dcols = np.flatnonzero(D)
    zcols = np.flatnonzero(Z)
    lab = lambda cols: (lambda k: (f"a={basis_label(src, cols[k[0]])}",))
    checks.append(_compare("near-sum.agree-on-D.psi", psi_t.images[dcols], phi.images[dcols], lab(dcols)))
    checks.append(_compare("near-sum.agree-on-D.theta", theta_t.images[dcols], phi.images[dcols], lab(dcols)))
    checks.append(_compare(
        "near-sum.sum-on-FZ",
        phi.images[zcols],
        np.mod(psi_t.images[zcols] + theta_t.images[zcols], src.n),
        lab(zcols),
    ))
    pz, tz = psi_t.images[zcols], theta_t.images[zcols]
    zero = np.zeros((len(zcols), len(zcols), tgt.dim), dtype=np.int64)
    plab = lambda k: (f"r={basis_label(src, zcols[k[0]])}", f"s={basis_label(src, zcols[k[1]])}")
    checks.append(_compare("near-sum.annihilate.psi-theta", _mul(tgt, pz[:, None], tz[None, :]), zero, plab))
    checks.append(_compare("near-sum.annihilate.theta-psi", _mul(tgt, tz[None, :], pz[:, None]), zero, plab))
    checks.append(is_hom(psi, on="FZ", name="near-sum.psi-hom-on-FZ"))
    checks.append(is_antihom(theta, on="FZ", name="near-sum.theta-antihom-on-FZ"))

    phi_d_hom = is_hom(phi, on="D").passed
    phi_d_anti = is_antihom(phi, on="D").passed
    psi_t_hom = is_hom(psi_t).passed
    theta_t_anti = is_antihom(theta_t).passed
    checks.append(Check("near-sum.item1", psi_t_hom == phi_d_hom, 1, () if psi_t_hom == phi_d_hom else (f"psi~hom={psi_t_hom}", f"phiDhom={phi_d_hom}"), note=f"hom={psi_t_hom}"))
    checks.append(Check("near-sum.item2", theta_t_anti == phi_d_anti, 1, () if theta_t_anti == phi_d_anti else (f"theta~anti={theta_t_anti}", f"phiDanti={phi_d_anti}"), note=f"antihom={theta_t_anti}"))
    if psi_t_hom and theta_t_anti:
        T = src.structure_tensor[np.ix_(dcols, dcols)]
        checks.append(_compare("near-sum.D-commutative", T, T.transpose(1, 0, 2), lambda k: (f"a={basis_label(src, dcols[k[0]])}", f"b={basis_label(src, dcols[k[1]])}")))

    mode = "near_sum" if Z.any() else "diagonal_only"
    info = dict(phi_D_hom=phi_d_hom, phi_D_antihom=phi_d_anti, psi_tilde_hom=psi_t_hom, theta_tilde_antihom=theta_t_anti)
    return DecompReport(mode, psi_t, theta_t, checks, seed, info=info)


# ---------------------------------------------------------------------------
# the diagonal blocks


def image_of_block(phi: AdditiveMap, x: int, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Every element of phi(D_x), in the order of the enumerated preimages."""
    src = phi.source
    xs = src.enumerate_coords(cap, mask=src.class_diag_mask(x))
    return phi.apply(xs)


def dc_image_ring_check(phi: AdditiveMap, x, cap: int = DEFAULT_ENUM_CAP) -> Check:
    """phi(D_x) is closed under the product of the target, with unit phi(e_x)."""
    src, tgt = phi.source, phi.target
    x = next(iter(src.class_set(x)))
    name = f"image-ring.{src.classes[x][0]}"
    B = image_of_block(phi, x, cap)
    members = {row.tobytes() for row in B}
    cols = np.flatnonzero(src.class_diag_mask(x))
    gens = phi.images[cols]
    prods = _mul(tgt, gens[:, None], gens[None, :])
    for i, j in itertools.product(range(len(cols)), repeat=2):
        if prods[i, j].tobytes() not in members:
            return Check(name, False, len(members), (f"a={basis_label(src, cols[i])}", f"b={basis_label(src, cols[j])}", f"product={fmt_vec(prods[i, j])}"))
    one = phi.idempotent_images[x]
    left = _mul(tgt, one, gens)
    right = _mul(tgt, gens, one)
    c = _compare(name, np.concatenate([left, right]), np.concatenate([gens, gens]), lambda k: (f"unit-fails-on={basis_label(src, cols[k[0] % len(cols)])}",))
    return Check(name, c.passed, len(members), c.witness)


def _as_scalar(f: np.ndarray, one: np.ndarray, n: int) -> int | None:
    for c in range(n):
        if np.array_equal(np.mod(c * one, n), f):
            return c
    return None


def local_sum_decompose(phi: AdditiveMap, x, cap: int = DEFAULT_ENUM_CAP, psi_theta=None) -> LocalSplit:
    """Split phi on D_x as a -> phi(a)f plus a -> phi(a)g.

    Candidates f are the central idempotents of B = phi(D_x), tried in
    increasing order of the coordinates of g = phi(e_x) - f; the first f with
    a hom part and an anti-hom part wins. The four compatibility identities
    with psi_Z, theta_Z are then checked for every class comparable to x.
    """
    src, tgt = phi.source, phi.target
    n = src.n
    x = next(iter(src.class_set(x)))
    xname = src.classes[x][0]
    ring_check = dc_image_ring_check(phi, x, cap)
    if not ring_check.passed:
        raise PreconditionFailed(f"phi(D_{xname}) is a ring", " ".join(ring_check.witness))
    B = image_of_block(phi, x, cap)
    cols = np.flatnonzero(src.class_diag_mask(x))
    gens = phi.images[cols]
    one = phi.idempotent_images[x]

    idem = (_mul(tgt, B, B) == B).all(axis=1)
    central = np.ones(len(B), dtype=bool)
    for g in gens:
        central &= (_mul(tgt, B, g) == _mul(tgt, g, B)).all(axis=1)
    cands = B[idem & central]
    gs = np.mod(one[None, :] - cands, n)
    order = np.lexsort(gs.T[::-1]) if len(cands) else []

    mask = src.class_diag_mask(x)
    for k in order:
        f, g = cands[k], gs[k]
        psi_x = AdditiveMap(src, tgt, _mul(tgt, phi.images, f).T * mask[None, :], bijective=False, name=f"psi_{xname}")
        theta_x = AdditiveMap(src, tgt, _mul(tgt, phi.images, g).T * mask[None, :], bijective=False, name=f"theta_{xname}")
        h = is_hom(psi_x, on=mask, name=f"local.{xname}.psi-hom")
        a = is_antihom(theta_x, on=mask, name=f"local.{xname}.theta-antihom")
        if h.passed and a.passed:
            checks = [ring_check, h, a]
            s = _compare(f"local.{xname}.sum", np.mod(psi_x.images[cols] + theta_x.images[cols], n), gens, lambda i: (f"a={basis_label(src, cols[i[0]])}",))
            checks.append(s)
            if psi_theta is None:
                psi_theta = psi_theta_on_fz(phi)
            checks.extend(_compat_checks(phi, x, psi_x, theta_x, *psi_theta))
            return LocalSplit(x, psi_x, theta_x, f, g, _as_scalar(f, one, n), _as_scalar(g, one, n), checks)
    raise NoDecomposition(xname, f"{len(cands)} central idempotents tried")


def _compat_checks(phi, x, psi_x, theta_x, psi_z, theta_z) -> list[Check]:
    """psi_x(a)psi_Z(b) = psi_Z(ab), psi_Z(b)psi_y(a) = psi_Z(ba) and the
    theta mirror images, for basis a of D_x and b in blocks touching x."""
    src, tgt = phi.source, phi.target
    T = src.structure_tensor
    xname = src.classes[x][0]
    acols = np.flatnonzero(src.class_diag_mask(x))
    out = []
    for y in range(src.num_classes):
        if y == x or not (src.q.le(x, y) or src.q.le(y, x)):
            continue
        yname = src.classes[y][0]
        if src.q.le(x, y):
            bcols = np.flatnonzero(src.pair_mask(x, y))
            ab = T[np.ix_(acols, bcols)]  # a_xx * b_xy
            specs = [
                (f"compat.{xname}<{yname}.psi-left", _mul(tgt, psi_x.images[acols][:, None], psi_z.images[bcols][None]), psi_z.apply(ab)),
                (f"compat.{xname}<{yname}.theta-right", _mul(tgt, theta_z.images[bcols][None], theta_x.images[acols][:, None]), theta_z.apply(ab)),
            ]
        else:
            bcols = np.flatnonzero(src.pair_mask(y, x))
            ba = T[np.ix_(bcols, acols)].transpose(1, 0, 2)  # b_yx * a_xx, indexed [a, b]
            specs = [
                (f"compat.{yname}<{xname}.psi-right", _mul(tgt, psi_z.images[bcols][None], psi_x.images[acols][:, None]), psi_z.apply(ba)),
                (f"compat.{yname}<{xname}.theta-left", _mul(tgt, theta_x.images[acols][:, None], theta_z.images[bcols][None]), theta_z.apply(ba)),
            ]
        for name, lhs, rhs in specs:
            out.append(_compare(name, lhs, rhs, lambda k, bc=bcols: (f"a={basis_label(src, acols[k[0]])}", f"b={basis_label(src, bc[k[1]])}")))
    return out


def full_sum_decompose(
    phi: AdditiveMap,
    verdict: Verdict | None = None,
    samples: int = DEFAULT_SAMPLES,
    cap: int = DEFAULT_ENUM_CAP,
    seed: int = 0,
) -> DecompReport:
    """Write phi = psi + theta with psi a hom and theta an anti-hom, for
    preorders whose classes all have more than one element."""
    src, tgt = phi.source, phi.target
    shape = check_class_size_hypothesis(src.q)
    if shape is not ClassShape.ALL_NONTRIVIAL_FINITE:
        raise HypothesisViolated(f"class sizes {src.q.sizes} are {shape.value}; every class needs 1 < |x| < inf")
    _require_jordan(phi, verdict, samples, cap, seed)
    n = src.n
    psi_z, theta_z = psi_theta_on_fz(phi)
    checks: list[Check] = []
    witnesses = []
    psi_d = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    theta_d = np.zeros_like(psi_d)
    dcols = np.flatnonzero(src.diag_mask)
    tilde = np.zeros((src.dim, src.dim), dtype=np.int64)
    ttilde = np.zeros_like(tilde)

    for x in range(src.num_classes):
        split = local_sum_decompose(phi, x, cap, (psi_z, theta_z))
        checks.extend(split.checks)
        fs = f"{split.scalar_f}·1" if split.scalar_f is not None else fmt_vec(split.f)
        gs = f"{split.scalar_g}·1" if split.scalar_g is not None else fmt_vec(split.g)
        witnesses.append((src.classes[x][0], fs, gs))
        cols = np.flatnonzero(src.class_diag_mask(x))
        # alpha~ and alpha~~ are the preimages of the local parts
        tilde[:, cols] = phi.preimage(split.psi.images[cols]).T
        ttilde[:, cols] = phi.preimage(split.theta.images[cols]).T
        psi_d[:, cols] = split.psi.matrix[:, cols]
        theta_d[:, cols] = split.theta.matrix[:, cols]

    lab = lambda k: (f"a={basis_label(src, dcols[k[0]])}",)
    dmask = src.diag_mask[:, None].astype(np.int64)
    checks.append(_compare("sum.tilde-in-D", np.mod((tilde + ttilde)[:, dcols] * (1 - dmask), n).T, np.zeros((len(dcols), src.dim), dtype=np.int64), lab))
    checks.append(_compare("sum.tilde-split", np.mod(tilde + ttilde, n)[:, dcols].T, np.eye(src.dim, dtype=np.int64)[dcols], lab))

    psi = AdditiveMap(src, tgt, psi_d + psi_z.matrix, bijective=False, name="psi")
    theta = AdditiveMap(src, tgt, theta_d + theta_z.matrix, bijective=False, name="theta")
    blab = lambda k: (f"a={basis_label(src, k[0])}",)
    checks.append(_compare("sum.phi=psi+theta.basis", phi.images, np.mod(psi.images + theta.images, n), blab))
    checks.append(is_hom(psi, name="sum.psi-hom"))
    checks.append(is_antihom(theta, name="sum.theta-antihom"))
    checks.append(_elementwise_sum(phi, psi, theta, samples, cap, seed))
    mode = "sum" if src.fz_mask.any() else "diagonal_only"
    return DecompReport(mode, psi, theta, checks, seed, witnesses)


def _elementwise_sum(phi, psi, theta, samples, cap, seed) -> Check:
    src = phi.source
    name = "sum.phi=psi+theta.elements"
    if src.size() <= cap:
        xs = src.enumerate_coords(cap)
        note = "exhaustive"
    else:
        xs = src.random_coords(np.random.default_rng(seed + 1), samples)
        note = "sampled"
    c = _compare(name, phi.apply(xs), np.mod(psi.apply(xs) + theta.apply(xs), src.n), lambda k: (f"alpha={fmt_vec(xs[k[0]])}",), note=note)
    return c


def mixed_product_check(phi: AdditiveMap, psi_theta=None) -> list[Check]:
    """psi(ab) = phi(a)psi(b) and psi(ba) = psi(b)phi(a) for a in D, b in FZ,
    together with the mirrored theta(ab) = theta(b)phi(a),
    theta(ba) = phi(a)theta(b)."""
    src, tgt = phi.source, phi.target
    psi, theta = psi_theta or psi_theta_on_fz(phi)
    T = src.structure_tensor
    dcols = np.flatnonzero(src.diag_mask)
    zcols = np.flatnonzero(src.fz_mask)
    ab = T[np.ix_(dcols, zcols)]
    ba = T[np.ix_(zcols, dcols)].transpose(1, 0, 2)
    pa = phi.images[dcols][:, None]
    pb, tb = psi.images[zcols][None], theta.images[zcols][None]
    lab = lambda k: (f"a={basis_label(src, dcols[k[0]])}", f"b={basis_label(src, zcols[k[1]])}")
    return [
        _compare("mixed-product.psi(ab)=phi(a)psi(b)", psi.apply(ab), _mul(tgt, pa, pb), lab),
        _compare("mixed-product.psi(ba)=psi(b)phi(a)", psi.apply(ba), _mul(tgt, pb, pa), lab),
        _compare("mixed-product.theta(ab)=theta(b)phi(a)", theta.apply(ab), _mul(tgt, tb, pa), lab),
        _compare("mixed-product.theta(ba)=phi(a)theta(b)", theta.apply(ba), _mul(tgt, pa, tb), lab),
    ]


# ---------------------------------------------------------------------------
# generators


def _assert_jordan(phi: AdditiveMap, what: str, samples=500, cap=1 << 14, seed=0) -> AdditiveMap:
    v = is_jordan_hom(phi, samples=samples, cap=cap, seed=seed)
    if not v.passed:
        raise PreconditionFailed(f"{what} yields a Jordan isomorphism", " ".join(v.failures[0].line().split()[1:]))
    return phi


def from_matrix(source: FIContext, matrix, target: TargetAlgebra | None = None, name="phi", bijective=True) -> AdditiveMap:
    return AdditiveMap(source, target or source.algebra(), matrix, bijective=bijective, name=name)


def identity_map(ctx: FIContext) -> AdditiveMap:
    return AdditiveMap(ctx, ctx.algebra(), np.eye(ctx.dim, dtype=np.int64), name="id")


def left_multiplication(u: FinSeries) -> np.ndarray:
    ctx = u.context
    return ctx.mul_coords(u.coords[None, :], np.eye(ctx.dim, dtype=np.int64)).T


def fi_inverse(u: FinSeries) -> FinSeries:
    """Two-sided inverse of u in FI, via its left regular representation."""
    ctx = u.context
    try:
        linv = inv_mod_matrix(left_multiplication(u), ctx.n)
    except NotInvertible:
        raise PreconditionFailed("u invertible in FI", str(u)) from None
    v = ctx.series(np.mod(linv @ ctx.delta.coords, ctx.n))
    if not (u * v == ctx.delta and v * u == ctx.delta):
        raise PreconditionFailed("u invertible in FI", str(u))
    return v


def inner_auto(u: FinSeries) -> AdditiveMap:
    """alpha -> u alpha u^{-1}."""
    ctx = u.context
    v = fi_inverse(u)
    basis = np.eye(ctx.dim, dtype=np.int64)
    cols = ctx.mul_coords(ctx.mul_coords(u.coords[None, :], basis), v.coords[None, :])
    return AdditiveMap(ctx, ctx.algebra(), cols.T, name="inner")


def random_unit(ctx: FIContext, rng: np.random.Generator) -> FinSeries:
    """A random invertible element: invertible diagonal blocks plus random FZ."""
    coords = ctx.random_coords(rng, 1, "FZ")[0]
    for x in range(ctx.num_classes):
        k = len(ctx.classes[x])
        while True:
            blk = rng.integers(0, ctx.n, size=(k, k))
            try:
                inv_mod_matrix(blk, ctx.n)
                break
            except NotInvertible:
                continue
        coords[ctx.block_slice(x, x)] = blk.reshape(-1)
    return ctx.series(coords)


def _reversal_permutation(ctx: FIContext, lam: dict) -> np.ndarray:
    p = ctx.q.preorder
    elems = p.elements
    lam = {str(k): str(v) for k, v in lam.items()}
    if set(lam) != set(elems) or sorted(lam.values()) != sorted(elems):
        raise PreconditionFailed("lambda is a bijection of P", str(lam))
    for a in elems:
        for b in elems:
            if p.le(a, b) != p.le(lam[b], lam[a]):
                raise PreconditionFailed("lambda reverses the order", f"{a}<={b} vs {lam[b]}<={lam[a]}")
    perm = np.zeros(ctx.dim, dtype=np.int64)
    for i in range(ctx.dim):
        b = ctx.basis[i]
        u, v = ctx.classes[b.x][b.u], ctx.classes[b.y][b.v]
        perm[i] = ctx.element_index(lam[v], lam[u])
    return perm


def order_reversal_antiauto(ctx: FIContext, lam: dict) -> AdditiveMap:
    """The anti-automorphism eps_{uv} -> eps_{lam(v) lam(u)} for an
    order-reversing bijection ``lam`` of the elements."""
    perm = _reversal_permutation(ctx, lam)
    m = np.zeros((ctx.dim, ctx.dim), dtype=np.int64)
    m[perm, np.arange(ctx.dim)] = 1
    return AdditiveMap(ctx, ctx.algebra(), m, name="reversal")


def transpose_map(ctx: FIContext) -> AdditiveMap:
    """Plain transpose on a single-class context."""
    if ctx.num_classes != 1:
        raise PreconditionFailed("single class", repr(ctx))
    return order_reversal_antiauto(ctx, {e: e for e in ctx.q.preorder.elements})


def j_twist(ctx: FIContext, e: int, cls=None, reversal: dict | None = None) -> AdditiveMap:
    """alpha -> e·alpha + (1-e)·tau(alpha).

    With ``reversal`` tau is the matching order-reversal anti-automorphism.
    Otherwise only the diagonal block of class ``cls`` is twisted,
    A -> eA + (1-e)A^T, and the rest is left alone; that map is rejected
    unless it passes the Jordan check.
    """
    n = ctx.n
    e = int(e) % n
    if (e * e) % n != e:
        raise PreconditionFailed("e idempotent in R", f"{e}^2 != {e} mod {n}")
    if reversal is not None:
        tau = order_reversal_antiauto(ctx, reversal).matrix
        m = np.mod(e * np.eye(ctx.dim, dtype=np.int64) + (1 - e) * tau, n)
        phi = AdditiveMap(ctx, ctx.algebra(), m, name=f"jtwist({e})")
        return _assert_jordan(phi, "jtwist")
    if cls is None:
        if ctx.num_classes != 1:
            raise PreconditionFailed("class or reversal given", "several classes and no reversal")
        cls = 0
    x = next(iter(ctx.class_set(cls)))
    m = np.eye(ctx.dim, dtype=np.int64)
    k = len(ctx.classes[x])
    start = ctx.offsets[(x, x)]
    for u in range(k):
        for v in range(k):
            i = start + u * k + v
            j = start + v * k + u
            m[:, i] = 0
            m[i, i] = (m[i, i] + e) % n
            m[j, i] = (m[j, i] + 1 - e) % n
    phi = AdditiveMap(ctx, ctx.algebra(), m, name=f"jtwist({e})")
    return _assert_jordan(phi, "jtwist")


def scaled(phi: AdditiveMap, r: int) -> AdditiveMap:
    """r·phi, without requiring the result to be bijective."""
    return AdditiveMap(phi.source, phi.target, r * phi.matrix, bijective=False, name=f"{r}{phi.name}")


def compose(f: AdditiveMap, g: AdditiveMap, check_jordan: bool = False) -> AdditiveMap:
    """f∘g; the target of g must be the incidence ring f is defined on."""
    if g.target != f.source.algebra():
        raise PreconditionFailed("target of g is the source of f")
    phi = AdditiveMap(g.source, f.target, f.matrix @ g.matrix, bijective=f.bijective and g.bijective, name=f"{f.name}∘{g.name}")
    if check_jordan:
        _assert_jordan(phi, "compose")
    return phi


def idempotent_split_parts(ctx: FIContext, e: int, reversal: dict) -> tuple[AdditiveMap, AdditiveMap]:
    """h(alpha) = e·alpha + (1-e)·tau(alpha_D) and
    t(alpha) = (1-e)·tau(alpha) + e·alpha_D.

    When D is commutative h is a hom, t an anti-hom, they agree on D and
    annihilate each other on FZ.
    """
    n = ctx.n
    tau = order_reversal_antiauto(ctx, reversal).matrix
    I = np.eye(ctx.dim, dtype=np.int64)
    D = ctx.diag_mask.astype(np.int64)[None, :]
    h = np.mod(e * I + (1 - e) * tau * D, n)
    t = np.mod((1 - e) * tau + e * I * D, n)
    return (
        AdditiveMap(ctx, ctx.algebra(), h, bijective=False, name="h"),
        AdditiveMap(ctx, ctx.algebra(), t, bijective=False, name="t"),
    )


def near_sum_compose(h: AdditiveMap, t: AdditiveMap) -> AdditiveMap:
    """phi = h on D and h + t on FZ, after checking the near-sum preconditions.

    Every clause is evaluated; the raised PreconditionFailed names all the
    violated ones, annihilation first.
    """
    src, tgt = h.source, h.target
    if t.source != src or t.target != tgt:
        raise PreconditionFailed("h and t share source and target")
    D, Z = src.diag_mask, src.fz_mask
    zc = np.flatnonzero(Z)
    hz, tz = h.images[zc], t.images[zc]
    violated = []
    for name, prod in (("h(r)t(s) = 0 on FZ", _mul(tgt, hz[:, None], tz[None])), ("t(s)h(r) = 0 on FZ", _mul(tgt, tz[None], hz[:, None]))):
        bad = np.argwhere(prod.any(axis=-1))
        if len(bad):
            i, j = bad[0]
            violated.append((name, f"r={basis_label(src, zc[i])} s={basis_label(src, zc[j])}"))
    if not np.array_equal(h.matrix[:, D], t.matrix[:, D]):
        col = int(np.flatnonzero((h.matrix[:, D] != t.matrix[:, D]).any(axis=0))[0])
        violated.append(("h|_D = t|_D", f"a={basis_label(src, np.flatnonzero(D)[col])}"))
    c = is_hom(h)
    if not c.passed:
        violated.append(("h is a homomorphism", " ".join(c.witness[:2])))
    c = is_antihom(t)
    if not c.passed:
        violated.append(("t is an anti-homomorphism", " ".join(c.witness[:2])))
    if violated:
        raise PreconditionFailed("; ".join(v[0] for v in violated), "; ".join(v[1] for v in violated))
    m = h.matrix + t.matrix * Z[None, :].astype(np.int64)
    try:
        phi = AdditiveMap(src, tgt, m, name="near_sum")
    except NotInvertible:
        raise PreconditionFailed("near-sum is bijective") from None
    return _assert_jordan(phi, "near_sum")
