"""
Named verification suites.

Each suite returns a list of :class:`Check`. Ring-level suites take an
FIContext, map-level suites take a Jordan isomorphism phi. Every suite that
samples builds its own generator from ``seed`` so the order in which suites
run does not change their output.
"""

from __future__ import annotations

import itertools

import numpy as np

from .fialg import DEFAULT_ENUM_CAP, FIContext, convolve
from .jordan import (
    AdditiveMap,
    Check,
    _compare,
    _mul,
    _setname,
    basis_label,
    dc_image_ring_check,
    mixed_product_check,
    prime_coords,
    psi_theta_on_fz,
    restriction_compat_check,
)

CHUNK = 1 << 14

SUITES: dict[str, str] = {
    "axioms": "FI is an associative unital ring; e_x orthogonal idempotents; e_x a e_y = a_xy e_xy; FZ ideal, D subring",
    "restriction-calculus": "(a|_X^Y)|_U^V = a|_{X∩U}^{Y∩V}; (a+b)|_X^Y = a|_X^Y + b|_X^Y; (ab)|_X^Y = a|_X·b|^Y",
    "jordan": "phi(r^2) = phi(r)^2, phi(rsr) = phi(r)phi(s)phi(r), phi(rs+sr) symmetric identity, phi(1) = 1, bijective",
    "classify": "is phi a homomorphism, an anti-homomorphism (informational, not a contract)",
    "near-sum": "phi is the near-sum of psi~ = phi∘pi_D + psi and theta~ = phi∘pi_D + theta over D and FZ",
    "sum": "phi = psi + theta with psi a homomorphism and theta an anti-homomorphism (classes of size > 1)",
    "idempotent-commutation": "phi(r)phi(e) = phi(e)phi(r) = phi(re) for e = e_X and basis r commuting with e",
    "sandwich": "phi(e_x)psi(a)phi(e_y) = phi(e_x)phi(a)phi(e_y), the four vanishing products, psi(a_xy e_xy) = phi(e_x)psi(a)phi(e_y)",
    "restriction-sandwich": "phi(e_X)psi(a)phi(e_Y) = phi(e_X)psi(a|_X^Y)phi(e_Y) and the theta mirror",
    "corollary": "phi(e_X)psi(a) = phi(e_X)psi(a|_X) and the three companion identities",
    "prime-hom": "a -> a' is multiplicative and a -> a'' anti-multiplicative on FZ",
    "mixed-product": "psi(ab) = phi(a)psi(b), psi(ba) = psi(b)phi(a) for a in D, b in FZ",
    "image-ring": "phi(D_x) is a ring with identity phi(e_x), for every class x",
    "restriction-compat": "(a|_U^V)' = a'|_U^V and (a|_U^V)'' = a''|_U^V",
}

RING_SUITES = ("axioms", "restriction-calculus")
LEMMA_SUITES = (
    "idempotent-commutation",
    "sandwich",
    "restriction-sandwich",
    "corollary",
    "prime-hom",
    "mixed-product",
    "image-ring",
    "restriction-compat",
)
ORDER = RING_SUITES + ("jordan", "classify", "near-sum", "sum") + LEMMA_SUITES


def list_suites() -> list[tuple[str, str]]:
    return [(name, SUITES[name]) for name in ORDER]


# ---------------------------------------------------------------------------
# ring-level suites


def _element_oracle_products(ctx: FIContext) -> np.ndarray:
    """Basis products from element labels alone: eps_uv * eps_u'v' = eps_uv'
    when v = u', else 0. Independent of the block convolution."""
    d = ctx.dim
    out = np.zeros((d, d, d), dtype=np.int64)
    labels = []
    for b in ctx.basis:
        labels.append((ctx.classes[b.x][b.u], ctx.classes[b.y][b.v]))
    for i, (u, v) in enumerate(labels):
        for j, (u2, v2) in enumerate(labels):
            if v == u2:
                out[i, j, ctx.element_index(u, v2)] = 1
    return out


def axioms_suite(ctx: FIContext, cap: int = DEFAULT_ENUM_CAP, samples: int = 10_000, seed: int = 0) -> list[Check]:
    """Ring axioms of FI. When FI has at most ``cap`` elements every element
    is combined with every basis pair, otherwise ``samples`` random ones."""
    n, d = ctx.n, ctx.dim
    T = ctx.structure_tensor
    I = np.eye(d, dtype=np.int64)
    lab2 = lambda k: (f"a={basis_label(ctx, k[0])}", f"b={basis_label(ctx, k[1])}")
    checks = [_compare("axioms.basis-product-rule", T, _element_oracle_products(ctx), lab2)]

    # associativity on basis triples (complete by trilinearity)
    left = np.mod(np.einsum("ijm,mkl->ijkl", T, T), n)
    right = np.mod(np.einsum("jkm,iml->ijkl", T, T), n)
    checks.append(_compare("axioms.associativity.basis", left, right, lambda k: lab2(k) + (f"c={basis_label(ctx, k[2])}",)))

    if ctx.size() <= cap:
        xs, note = ctx.enumerate_coords(cap), "exhaustive"
    else:
        xs, note = ctx.random_coords(np.random.default_rng(seed), samples), "sampled"
    delta = ctx.delta.coords
    bad = {}
    total = 0
    step = max(1, CHUNK * 256 // d ** 4)
    for start in range(0, len(xs), step):
        a = xs[start:start + step]
        ab = ctx.mul_coords(a[:, None, :], I[None, :, :])             # a * b_j
        ba = ctx.mul_coords(I[None, :, :], a[:, None, :])             # b_j * a
        # (a b_j) b_k vs a (b_j b_k)
        lhs = ctx.mul_coords(ab[:, :, None, :], I[None, None, :, :])
        rhs = ctx.mul_coords(a[:, None, None, :], T[None, :, :, :])
        # (b_j b_k) a vs b_j (b_k a)
        lhs2 = ctx.mul_coords(T[None, :, :, :], a[:, None, None, :])
        rhs2 = ctx.mul_coords(I[None, :, None, :], ba[:, None, :, :])
        # distributivity a(b_j + b_k) = a b_j + a b_k, and on the right
        sums = I[:, None, :] + I[None, :, :]
        dl = ctx.mul_coords(a[:, None, None, :], sums[None])
        dr = ctx.mul_coords(sums[None], a[:, None, None, :])
        dl_r = np.mod(ab[:, :, None, :] + ab[:, None, :, :], n)
        dr_r = np.mod(ba[:, :, None, :] + ba[:, None, :, :], n)
        unit = np.concatenate([ctx.mul_coords(delta, a), ctx.mul_coords(a, delta)])
        lab3 = lambda k, a=a: (f"alpha={fmt(a[k[0]])}", f"b={basis_label(ctx, k[1])}", f"c={basis_label(ctx, k[2])}")
        for name, l, r, lb in (
            ("axioms.associativity.elements-left", lhs, rhs, lab3),
            ("axioms.associativity.elements-right", lhs2, rhs2, lab3),
            ("axioms.distributivity.left", dl, dl_r, lab3),
            ("axioms.distributivity.right", dr, dr_r, lab3),
            ("axioms.identity", unit, np.concatenate([a, a]), lambda k, a=a: (f"alpha={fmt(a[k[0] % len(a)])}",)),
        ):
            c = _compare(name, l, r, lb, note)
            if name not in bad and not c.passed:
                bad[name] = c
        total += len(a)
    for name in ("axioms.associativity.elements-left", "axioms.associativity.elements-right",
                 "axioms.distributivity.left", "axioms.distributivity.right", "axioms.identity"):
        c = bad.get(name)
        checks.append(Check(name, c is None, total, c.witness if c else (), note))

    # e_x e_y = [x = y] e_x and sum e_x = delta
    E = np.stack([ctx.e(x).coords for x in range(ctx.num_classes)])
    prods = ctx.mul_coords(E[:, None, :], E[None, :, :])
    want = np.where(np.eye(len(E), dtype=bool)[:, :, None], E[:, None, :], 0)
    checks.append(_compare("axioms.orthogonal-idempotents", prods, want, lambda k: (f"x={ctx.classes[k[0]][0]}", f"y={ctx.classes[k[1]][0]}")))
    checks.append(_compare("axioms.idempotents-sum-to-identity", np.mod(E.sum(axis=0), n), delta, lambda k: ()))

    # e_x a e_y = a_xy e_xy (or 0) for every basis a
    sand = ctx.mul_coords(ctx.mul_coords(E[:, None, None, :], I[None, :, None, :]), E[None, None, :, :])
    want = np.zeros_like(sand)
    for x, y in itertools.product(range(ctx.num_classes), repeat=2):
        if ctx.q.le(x, y):
            want[x, :, y] = I * ctx.pair_mask(x, y)[None, :]
    checks.append(_compare("axioms.e_x-a-e_y", sand, want, lambda k: (f"x={ctx.classes[k[0]][0]}", f"a={basis_label(ctx, k[1])}", f"y={ctx.classes[k[2]][0]}")))

    D, Z = ctx.diag_mask, ctx.fz_mask
    zc = np.flatnonzero(Z)
    ideal = np.concatenate([T[:, zc].reshape(-1, d), T[zc, :].reshape(-1, d)])[:, D]
    checks.append(_compare("axioms.FZ-ideal", ideal, np.zeros_like(ideal), lambda k: ()))
    dc = np.flatnonzero(D)
    sub = T[np.ix_(dc, dc)][..., Z]
    checks.append(_compare("axioms.D-subring", sub, np.zeros_like(sub), lambda k: lab2((dc[k[0]], dc[k[1]]))))
    eX = np.stack([ctx.idempotent(X).coords for X in ctx.all_class_subsets()])
    Dd = I[dc]
    checks.append(_compare(
        "axioms.e_X-central-in-D",
        ctx.mul_coords(eX[:, None], Dd[None]),
        ctx.mul_coords(Dd[None], eX[:, None]),
        lambda k: (f"a={basis_label(ctx, dc[k[1]])}",),
    ))

    # block convolution against the tensor product on random pairs
    rng = np.random.default_rng(seed + 7)
    pa = [ctx.random(rng) for _ in range(200)]
    pb = [ctx.random(rng) for _ in range(200)]
    conv = np.stack([convolve(a, b).coords for a, b in zip(pa, pb)])
    tens = ctx.mul_coords(np.stack([a.coords for a in pa]), np.stack([b.coords for b in pb]))
    checks.append(_compare("axioms.convolution-matches-tensor", conv, tens, lambda k: (f"a={pa[k[0]]}", f"b={pb[k[0]]}"), "sampled"))
    return checks


def fmt(v) -> str:
    return "[" + ",".join(str(int(x)) for x in np.asarray(v).reshape(-1)) + "]"


def restriction_calculus_suite(ctx: FIContext, samples: int = 100, seed: int = 0) -> list[Check]:
    """The restriction identities for every choice of class subsets, plus
    a|_X^Y = e_X a e_Y."""
    rng = np.random.default_rng(seed)
    n = ctx.n
    A = ctx.random_coords(rng, samples)
    B = ctx.random_coords(rng, samples)
    subsets = ctx.all_class_subsets()
    full = frozenset(range(ctx.num_classes))
    masks = {(X, Y): ctx.restrict_mask(X, Y).astype(np.int64) for X in subsets for Y in subsets}
    checks = []

    # (a|_X^Y)|_U^V = a|_{X∩U}^{Y∩V}
    count, fail = 0, None
    for (X, Y), m1 in masks.items():
        for (U, V), m2 in masks.items():
            lhs = A * m1 * m2
            rhs = A * masks[(X & U, Y & V)]
            count += samples
            if fail is None and (lhs != rhs).any():
                fail = (f"X={_setname(ctx, X)}", f"Y={_setname(ctx, Y)}", f"U={_setname(ctx, U)}", f"V={_setname(ctx, V)}")
    checks.append(Check("restriction-calculus.nested", fail is None, count, fail or ()))

    count, fail2, fail3, fail4 = 0, None, None, None
    AB = ctx.mul_coords(A, B)
    EX = {X: ctx.idempotent(X).coords for X in subsets}
    for (X, Y), m in masks.items():
        count += samples
        wit = (f"X={_setname(ctx, X)}", f"Y={_setname(ctx, Y)}")
        if fail2 is None and (np.mod((A + B) * m, n) != np.mod(A * m + B * m, n)).any():
            fail2 = wit
        prod = ctx.mul_coords(A * masks[(X, full)], B * masks[(full, Y)])
        if fail3 is None and (AB * m != prod).any():
            fail3 = wit
        sand = ctx.mul_coords(ctx.mul_coords(EX[X], A), EX[Y])
        if fail4 is None and (A * m != sand).any():
            fail4 = wit
    checks.append(Check("restriction-calculus.additive", fail2 is None, count, fail2 or ()))
    checks.append(Check("restriction-calculus.product", fail3 is None, count, fail3 or ()))
    checks.append(Check("restriction-calculus.e_X-a-e_Y", fail4 is None, count, fail4 or ()))
    return checks


# ---------------------------------------------------------------------------
# map-level lemma suites


def idempotent_commutation_suite(phi: AdditiveMap) -> list[Check]:
    """phi(r)phi(e) = phi(e)phi(r) = phi(re) for every diagonal idempotent
    e = e_X and every basis r with er = re."""
    src, tgt = phi.source, phi.target
    I = np.eye(src.dim, dtype=np.int64)
    count, fail = 0, None
    for X in src.all_class_subsets():
        e = src.idempotent(X).coords
        re = src.mul_coords(I, e)
        er = src.mul_coords(e, I)
        commuting = np.flatnonzero((re == er).all(axis=1))
        pe = phi(e)
        pr = phi.images[commuting]
        want = phi.apply(re[commuting])
        l1 = _mul(tgt, pr, pe)
        l2 = _mul(tgt, pe, pr)
        count += 2 * len(commuting)
        if fail is None:
            for lhs in (l1, l2):
                bad = np.flatnonzero((lhs != want).any(axis=1))
                if len(bad):
                    fail = (f"X={_setname(src, X)}", f"r={basis_label(src, commuting[bad[0]])}", f"lhs={fmt(lhs[bad[0]])}", f"rhs={fmt(want[bad[0]])}")
                    break
    return [Check("idempotent-commutation", fail is None, count, fail or ())]


def sandwich_suite(phi: AdditiveMap, samples: int = 100, seed: int = 0) -> list[Check]:
    src, tgt = phi.source, phi.target
    psi, theta = psi_theta_on_fz(phi)
    E = phi.idempotent_images
    zc = np.flatnonzero(src.fz_mask)
    pa, ps, th = phi.images[zc], psi.images[zc], theta.images[zc]
    zero = np.zeros_like(pa)
    names = (
        "sandwich.psi", "sandwich.theta",
        "sandwich.vanish.e_y-psi-e_x", "sandwich.vanish.e_x-psi-e_x",
        "sandwich.vanish.e_x-theta-e_y", "sandwich.vanish.e_x-theta-e_x",
    )
    state = {k: [0, None] for k in names}

    def sw(a, m, b):
        return _mul(tgt, _mul(tgt, a, m), b)

    for x, y in src.q.strict_pairs():
        ex, ey = E[x], E[y]
        specs = (
            (names[0], sw(ex, ps, ey), sw(ex, pa, ey)),
            (names[1], sw(ey, th, ex), sw(ey, pa, ex)),
            (names[2], sw(ey, ps, ex), zero),
            (names[3], sw(ex, ps, ex), zero),
            (names[4], sw(ex, th, ey), zero),
            (names[5], sw(ex, th, ex), zero),
        )
        for name, lhs, rhs in specs:
            c = _compare(name, lhs, rhs, lambda k: (f"x={src.classes[x][0]}", f"y={src.classes[y][0]}", f"a={basis_label(src, zc[k[0]])}"))
            state[name][0] += c.count
            if state[name][1] is None and not c.passed:
                state[name][1] = c.witness
    checks = [Check(k, v[1] is None, v[0], v[1] or ()) for k, v in state.items()]

    # psi(a_xy e_xy) = phi(e_x)psi(a)phi(e_y) and the theta mirror, random a
    rng = np.random.default_rng(seed)
    xs = src.random_coords(rng, samples, "FZ")
    pxs, txs = psi.apply(xs), theta.apply(xs)
    c1, c2, f1, f2 = 0, 0, None, None
    for x, y in src.q.strict_pairs():
        blk = xs * src.pair_mask(x, y)
        a = _compare("", psi.apply(blk), sw(E[x], pxs, E[y]), lambda k: (f"x={src.classes[x][0]}", f"y={src.classes[y][0]}", f"alpha={fmt(xs[k[0]])}"))
        b = _compare("", theta.apply(blk), sw(E[y], txs, E[x]), lambda k: (f"x={src.classes[x][0]}", f"y={src.classes[y][0]}", f"alpha={fmt(xs[k[0]])}"))
        c1 += a.count
        c2 += b.count
        f1 = f1 or (None if a.passed else a.witness)
        f2 = f2 or (None if b.passed else b.witness)
    checks.append(Check("sandwich.psi-of-block", f1 is None, c1, f1 or (), "sampled"))
    checks.append(Check("sandwich.theta-of-block", f2 is None, c2, f2 or (), "sampled"))
    return checks


def restriction_sandwich_suite(phi: AdditiveMap) -> list[Check]:
    """phi(e_X)psi(a)phi(e_Y) = phi(e_X)psi(a|_X^Y)phi(e_Y) and
    phi(e_X)theta(a)phi(e_Y) = phi(e_X)theta(a|_Y^X)phi(e_Y), all X, Y."""
    src, tgt = phi.source, phi.target
    psi, theta = psi_theta_on_fz(phi)
    Z = np.eye(src.dim, dtype=np.int64)[src.fz_mask]
    zc = np.flatnonzero(src.fz_mask)
    subsets = src.all_class_subsets()
    eX = {X: phi(src.idempotent(X)) for X in subsets}
    out = []
    for name, m, flip in (("restriction-sandwich.psi", psi, False), ("restriction-sandwich.theta", theta, True)):
        count, fail = 0, None
        full = m.apply(Z)
        for X, Y in itertools.product(subsets, repeat=2):
            mask = src.restrict_mask(Y, X) if flip else src.restrict_mask(X, Y)
            lhs = _mul(tgt, _mul(tgt, eX[X], full), eX[Y])
            rhs = _mul(tgt, _mul(tgt, eX[X], m.apply(Z * mask)), eX[Y])
            c = _compare(name, lhs, rhs, lambda k: (f"X={_setname(src, X)}", f"Y={_setname(src, Y)}", f"a={basis_label(src, zc[k[0]])}"))
            count += c.count
            if fail is None and not c.passed:
                fail = c.witness
        out.append(Check(name, fail is None, count, fail or ()))
    return out


def corollary_suite(phi: AdditiveMap) -> list[Check]:
    """The four one-sided restriction identities for every X and basis a in FZ."""
    src, tgt = phi.source, phi.target
    psi, theta = psi_theta_on_fz(phi)
    Z = np.eye(src.dim, dtype=np.int64)[src.fz_mask]
    zc = np.flatnonzero(src.fz_mask)
    specs = (
        ("corollary.e_X-psi", psi, "left", "sub"),     # phi(e_X)psi(a) = phi(e_X)psi(a|_X)
        ("corollary.psi-e_X", psi, "right", "sup"),    # psi(a)phi(e_X) = psi(a|^X)phi(e_X)
        ("corollary.e_X-theta", theta, "left", "sup"),  # phi(e_X)theta(a) = phi(e_X)theta(a|^X)
        ("corollary.theta-e_X", theta, "right", "sub"),  # theta(a)phi(e_X) = theta(a|_X)phi(e_X)
    )
    out = []
    for name, m, side, kind in specs:
        count, fail = 0, None
        full = m.apply(Z)
        for X in src.all_class_subsets():
            e = phi(src.idempotent(X))
            mask = src.restrict_mask(X, None) if kind == "sub" else src.restrict_mask(None, X)
            part = m.apply(Z * mask)
            if side == "left":
                lhs, rhs = _mul(tgt, e, full), _mul(tgt, e, part)
            else:
                lhs, rhs = _mul(tgt, full, e), _mul(tgt, part, e)
            c = _compare(name, lhs, rhs, lambda k: (f"X={_setname(src, X)}", f"a={basis_label(src, zc[k[0]])}"))
            count += c.count
            if fail is None and not c.passed:
                fail = c.witness
        out.append(Check(name, fail is None, count, fail or ()))
    return out


def prime_hom_suite(phi: AdditiveMap) -> list[Check]:
    """(ab)' = a'b' and (ab)'' = b''a'' for FZ basis a, b.

    The second identity is checked as stated and fails whenever a'' is
    nonzero on a composable pair (e.g. any order reversal of a chain of
    length 3).  Sandwiching the other way round gives (ab)'' = a''b'', which
    is reported as prime-hom.dprime-mult.
    """
    src = phi.source
    zc = np.flatnonzero(src.fz_mask)
    Z = np.eye(src.dim, dtype=np.int64)[zc]
    p1, p2 = prime_coords(phi, Z)
    prod = src.structure_tensor[np.ix_(zc, zc)]
    q1, q2 = prime_coords(phi, prod)
    lab = lambda k: (f"a={basis_label(src, zc[k[0]])}", f"b={basis_label(src, zc[k[1]])}")
    return [
        _compare("prime-hom.prime", q1, src.mul_coords(p1[:, None], p1[None, :]), lab),
        _compare("prime-hom.dprime", q2, src.mul_coords(p2[None, :], p2[:, None]), lab),
        _compare("prime-hom.dprime-mult", q2, src.mul_coords(p2[:, None], p2[None, :]), lab),
    ]


def mixed_product_suite(phi: AdditiveMap) -> list[Check]:
    return mixed_product_check(phi)


def image_ring_suite(phi: AdditiveMap, cap: int = DEFAULT_ENUM_CAP) -> list[Check]:
    return [dc_image_ring_check(phi, x, cap) for x in range(phi.source.num_classes)]


def restriction_compat_suite(phi: AdditiveMap, samples: int = 100, seed: int = 0) -> list[Check]:
    return restriction_compat_check(phi, samples=samples, seed=seed)


def lemma_suite(phi: AdditiveMap, name: str, samples: int = 100, seed: int = 0, cap: int = DEFAULT_ENUM_CAP) -> list[Check]:
    if name == "idempotent-commutation":
        return idempotent_commutation_suite(phi)
    if name == "sandwich":
        return sandwich_suite(phi, samples=samples, seed=seed)
    if name == "restriction-sandwich":
        return restriction_sandwich_suite(phi)
    if name == "corollary":
        return corollary_suite(phi)
    if name == "prime-hom":
        return prime_hom_suite(phi)
    if name == "mixed-product":
        return mixed_product_suite(phi)
    if name == "image-ring":
        return image_ring_suite(phi, cap)
    if name == "restriction-compat":
        return restriction_compat_suite(phi, samples=samples, seed=seed)
    raise KeyError(name)


def all_lemma_suites(phi: AdditiveMap, samples: int = 100, seed: int = 0, cap: int = DEFAULT_ENUM_CAP) -> list[Check]:
    out = []
    for name in LEMMA_SUITES:
        out.extend(lemma_suite(phi, name, samples=samples, seed=seed, cap=cap))
    return out
