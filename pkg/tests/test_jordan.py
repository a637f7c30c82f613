import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from incidence_jordan.algebra import TargetAlgebra
from incidence_jordan.errors import (
    HypothesisViolated,
    JordanCheckFailed,
    NotInvertible,
    PreconditionFailed,
)
from incidence_jordan.fialg import FIContext, chain, full_matrix_context
from incidence_jordan.jordan import (
    AdditiveMap,
    compose,
    dc_image_ring_check,
    fi_inverse,
    full_sum_decompose,
    identity_map,
    idempotent_split_parts,
    inner_auto,
    is_antihom,
    is_hom,
    is_jordan_hom,
    j_twist,
    local_sum_decompose,
    mixed_product_check,
    near_sum_compose,
    near_sum_decompose,
    order_reversal_antiauto,
    prime_parts,
    psi_theta_on_fz,
    random_unit,
    restriction_compat_check,
    scaled,
    transpose_map,
)

CHAIN_REV = {"x0": "x2", "x1": "x1", "x2": "x0"}
TWO_REV = {"a": "c", "b": "d", "c": "a", "d": "b"}


def two_classes():
    return FIContext.from_pairs(6, "abcd", [("a", "b"), ("b", "a"), ("c", "d"), ("d", "c"), ("a", "c")])


def m2_as_matrix(v):
    return np.asarray(v).reshape(2, 2)


# -- the 2x2 matrix example, checked against plain numpy --------------------


def test_jtwist_matrix_matches_formula():
    ctx = full_matrix_context(2, 6)
    J = j_twist(ctx, 3)
    rng = np.random.default_rng(0)
    for _ in range(50):
        A = rng.integers(0, 6, (2, 2))
        assert (m2_as_matrix(J(A.reshape(-1))) == (3 * A + 4 * A.T) % 6).all()


def test_jtwist_is_jordan_but_neither_hom_nor_antihom():
    J = j_twist(full_matrix_context(2, 6), 3)
    v = is_jordan_hom(J)
    assert v.passed
    assert v["jordan.square"].note == "exhaustive" and v["jordan.square"].count == 6 ** 4
    h, a = is_hom(J), is_antihom(J)
    assert not h.passed and not a.passed
    assert h.witness and a.witness


def test_jtwist_sum_is_3A_plus_4AT():
    ctx = full_matrix_context(2, 6)
    r = full_sum_decompose(j_twist(ctx, 3))
    assert r.passed and r.mode == "diagonal_only"
    assert r.idempotent_witnesses == [("m0", "3·1", "4·1")]
    rng = np.random.default_rng(1)
    for _ in range(50):
        A = rng.integers(0, 6, (2, 2))
        assert (m2_as_matrix(r.psi(A.reshape(-1))) == (3 * A) % 6).all()
        assert (m2_as_matrix(r.theta(A.reshape(-1))) == (4 * A.T) % 6).all()


def test_jtwist_requires_idempotent():
    with pytest.raises(PreconditionFailed) as exc:
        j_twist(full_matrix_context(2, 6), 2)
    assert "idempotent" in exc.value.clause


def test_scalar_three_is_not_a_jordan_isomorphism():
    ctx = full_matrix_context(2, 6)
    with pytest.raises(NotInvertible):
        AdditiveMap(ctx, ctx.algebra(), 3 * np.eye(4, dtype=np.int64))
    three = scaled(identity_map(ctx), 3)
    v = is_jordan_hom(three)
    assert not v["jordan.unital"].passed
    assert not v["jordan.bijective"].passed
    assert v["jordan.square"].passed  # 3 is idempotent, so A -> 3A is multiplicative
    assert is_hom(three).passed


def test_local_split_of_hom_and_antihom():
    ctx = full_matrix_context(2, 6)
    s = local_sum_decompose(identity_map(ctx), 0)
    assert s.scalar_f == 1 and s.scalar_g == 0
    s = local_sum_decompose(transpose_map(ctx), 0)
    assert s.scalar_f == 0 and s.scalar_g == 1


# -- generic predicates ------------------------------------------------------


def test_identity_passes_everything():
    ctx = chain(3, 6)
    phi = identity_map(ctx)
    assert is_jordan_hom(phi).passed
    assert is_hom(phi).passed
    r = near_sum_decompose(phi)
    assert r.passed and r.info["psi_tilde_hom"]
    assert r.psi.equals(phi)
    assert r.theta.equals(phi.masked(ctx.diag_mask))


def test_reversal_on_chain_is_antihom():
    ctx = chain(3, 6)
    rev = order_reversal_antiauto(ctx, CHAIN_REV)
    assert is_antihom(rev).passed
    assert not is_hom(rev).passed
    assert is_jordan_hom(rev).passed


def test_reversal_must_reverse():
    with pytest.raises(PreconditionFailed):
        order_reversal_antiauto(chain(3, 6), {"x0": "x0", "x1": "x1", "x2": "x2"})
    with pytest.raises(PreconditionFailed):
        order_reversal_antiauto(chain(3, 6), {"x0": "x2", "x1": "x2", "x2": "x0"})


def test_inner_of_identity_element():
    ctx = two_classes()
    assert inner_auto(ctx.delta).equals(identity_map(ctx))


def test_inner_requires_unit():
    ctx = two_classes()
    with pytest.raises(PreconditionFailed):
        inner_auto(ctx.e(0))


def test_fi_inverse():
    ctx = two_classes()
    u = random_unit(ctx, np.random.default_rng(2))
    v = fi_inverse(u)
    assert u * v == ctx.delta == v * u


def test_inner_conjugates():
    ctx = two_classes()
    rng = np.random.default_rng(3)
    u = random_unit(ctx, rng)
    phi = inner_auto(u)
    v = fi_inverse(u)
    for _ in range(10):
        a = ctx.random(rng)
        assert (phi(a) == (u * a * v).coords).all()
    assert is_hom(phi).passed


def test_compose_requires_matching_algebras():
    with pytest.raises(PreconditionFailed):
        compose(identity_map(chain(2, 6)), identity_map(chain(3, 6)))


def test_jordan_check_failure_witness():
    ctx = chain(2, 6)
    m = np.eye(3, dtype=np.int64)
    m[ctx.element_index("x0", "x1"), ctx.element_index("x0", "x0")] = 1  # e_x0 -> e_x0 + e_x0x1
    phi = AdditiveMap(ctx, ctx.algebra(), m)
    v = is_jordan_hom(phi)
    assert not v.passed
    assert not v["jordan.square"].passed and not v["jordan.unital"].passed
    assert all(c.witness for c in v.failures)
    with pytest.raises(JordanCheckFailed):
        near_sum_decompose(phi, v)


# -- prime parts -------------------------------------------------------------


def test_prime_parts_identity():
    ctx = two_classes()
    a = ctx.random(np.random.default_rng(4), "FZ")
    p = prime_parts(identity_map(ctx), a)
    assert p.alpha_prime == a and p.alpha_dprime.is_zero()


def test_prime_parts_reversal_chain2():
    ctx = chain(2, 6)
    rev = order_reversal_antiauto(ctx, {"x0": "x1", "x1": "x0"})
    for r in range(1, 6):
        a = ctx.unit("x0", "x1", r)
        p = prime_parts(rev, a)
        assert p.alpha_prime.is_zero() and p.alpha_dprime == a


def test_prime_parts_rejects_diagonal():
    ctx = chain(2, 6)
    with pytest.raises(PreconditionFailed):
        prime_parts(identity_map(ctx), ctx.delta)


def test_prime_parts_brute_force_oracle():
    # evaluate the defining sandwich with FinSeries products and a brute-force
    # preimage search, then compare with the batched implementation
    ctx = chain(3, 2)
    inn = inner_auto(random_unit(ctx, np.random.default_rng(5)))
    phi = compose(inn, order_reversal_antiauto(ctx, CHAIN_REV))
    tgt = ctx
    table = {phi(c).tobytes(): c for c in ctx.enumerate_coords()}
    rng = np.random.default_rng(6)
    for _ in range(10):
        a = ctx.random(rng, "FZ")
        pa = tgt.series(phi(a))
        want1, want2 = np.zeros(ctx.dim, dtype=np.int64), np.zeros(ctx.dim, dtype=np.int64)
        for x, y in ctx.q.strict_pairs():
            ex, ey = tgt.series(phi(ctx.e(x))), tgt.series(phi(ctx.e(y)))
            pre1 = table[(ex * pa * ey).coords.tobytes()]
            pre2 = table[(ey * pa * ex).coords.tobytes()]
            m = ctx.pair_mask(x, y)
            want1[m], want2[m] = pre1[m], pre2[m]
        p = prime_parts(phi, a)
        assert (p.alpha_prime.coords == want1).all()
        assert (p.alpha_dprime.coords == want2).all()


def test_psi_theta_identity_and_antiauto():
    ctx = chain(3, 6)
    Z = ctx.fz_mask
    psi, theta = psi_theta_on_fz(identity_map(ctx))
    assert (psi.matrix[:, Z] == np.eye(ctx.dim, dtype=np.int64)[:, Z]).all()
    assert not theta.matrix.any()
    rev = order_reversal_antiauto(ctx, CHAIN_REV)
    psi, theta = psi_theta_on_fz(rev)
    assert not psi.matrix.any()
    assert (theta.matrix[:, Z] == rev.matrix[:, Z]).all()


def test_psi_theta_empty_on_single_class():
    psi, theta = psi_theta_on_fz(j_twist(full_matrix_context(2, 6), 3))
    assert not psi.matrix.any() and not theta.matrix.any()


# -- near-sum ----------------------------------------------------------------


@pytest.mark.parametrize("post", [False, True])
def test_near_sum_round_trip(post):
    ctx = chain(3, 6)
    h, t = idempotent_split_parts(ctx, 3, CHAIN_REV)
    if post:
        inn = inner_auto(random_unit(ctx, np.random.default_rng(7)))
        h, t = compose(inn, h), compose(inn, t)
    phi = near_sum_compose(h, t)
    psi, theta = psi_theta_on_fz(phi)
    Z = ctx.fz_mask
    assert (psi.matrix[:, Z] == h.matrix[:, Z]).all()
    assert (theta.matrix[:, Z] == t.matrix[:, Z]).all()
    r = near_sum_decompose(phi)
    assert r.passed
    # phi|_D is a hom and an anti-hom here (D is commutative), so both items hold
    assert r.info["psi_tilde_hom"] and r.info["theta_tilde_antihom"]
    assert r.psi.equals(h) and r.theta.equals(t)


def test_near_sum_compose_reports_clause():
    ctx = two_classes()
    t = AdditiveMap(ctx, ctx.algebra(), np.eye(ctx.dim, dtype=np.int64)[:, _swap(ctx, ("a", "c"), ("a", "a"))], bijective=False)
    with pytest.raises(PreconditionFailed) as exc:
        near_sum_compose(identity_map(ctx), t)
    assert "= 0 on FZ" in exc.value.clause


def _swap(ctx, p, q):
    perm = np.arange(ctx.dim)
    i, j = ctx.element_index(*p), ctx.element_index(*q)
    perm[i], perm[j] = j, i
    return perm


def test_near_sum_compose_needs_hom():
    ctx = chain(3, 6)
    h, t = idempotent_split_parts(ctx, 3, CHAIN_REV)
    with pytest.raises(PreconditionFailed) as exc:
        near_sum_compose(t, t)
    assert "homomorphism" in exc.value.clause


def test_near_sum_with_twisted_isolated_class():
    # {a~b} is incomparable to the chain c < d, so twisting only its block is
    # still a Jordan isomorphism; phi|_D is then neither hom nor anti-hom
    ctx = FIContext.from_pairs(6, "abcd", [("a", "b"), ("b", "a"), ("c", "d")])
    phi = j_twist(ctx, 3, cls="a")
    r = near_sum_decompose(phi)
    assert r.passed
    assert not r.info["psi_tilde_hom"] and not r.info["theta_tilde_antihom"]
    assert not r.info["phi_D_hom"] and not r.info["phi_D_antihom"]


def test_block_twist_on_comparable_classes_rejected():
    with pytest.raises(PreconditionFailed):
        j_twist(two_classes(), 3, cls="a")


def test_near_sum_on_quasiorder_twist():
    ctx = two_classes()
    phi = compose(inner_auto(random_unit(ctx, np.random.default_rng(8))), j_twist(ctx, 3, reversal=TWO_REV))
    r = near_sum_decompose(phi)
    assert r.passed and r.mode == "near_sum"
    assert not r.info["psi_tilde_hom"] and not r.info["theta_tilde_antihom"]


# -- sum decomposition -------------------------------------------------------


def test_full_sum_inner_is_pure_hom():
    ctx = two_classes()
    phi = inner_auto(random_unit(ctx, np.random.default_rng(9)))
    r = full_sum_decompose(phi)
    assert r.passed and r.mode == "sum"
    assert r.psi.equals(phi) and not r.theta.matrix.any()
    assert all(f == "1·1" for _, f, _ in r.idempotent_witnesses)


def test_full_sum_twisted():
    ctx = two_classes()
    tw = j_twist(ctx, 3, reversal=TWO_REV)
    phi = compose(inner_auto(random_unit(ctx, np.random.default_rng(10))), tw)
    r = full_sum_decompose(phi, samples=2000)
    assert r.passed
    assert [(f, g) for _, f, g in r.idempotent_witnesses] == [("3·1", "4·1")] * 2
    # the parts are inner∘(3·id) and inner∘(4·tau)
    inn = inner_auto(random_unit(ctx, np.random.default_rng(10)))
    rev = order_reversal_antiauto(ctx, TWO_REV)
    assert r.psi.equals(compose(inn, scaled(identity_map(ctx), 3)))
    assert r.theta.equals(compose(inn, scaled(rev, 4)))


def test_full_sum_hypothesis_gate():
    with pytest.raises(HypothesisViolated):
        full_sum_decompose(identity_map(chain(3, 6)))
    mixed = FIContext.from_pairs(6, "abc", [("a", "b"), ("b", "a"), ("a", "c")])
    with pytest.raises(HypothesisViolated):
        full_sum_decompose(identity_map(mixed))


def test_image_ring_checks():
    ctx = two_classes()
    for phi in (identity_map(ctx), j_twist(ctx, 3, reversal=TWO_REV)):
        for x in range(2):
            assert dc_image_ring_check(phi, x).passed
    assert dc_image_ring_check(j_twist(full_matrix_context(2, 6), 3), 0).count == 6 ** 4


def test_mixed_products_and_restriction_compat():
    ctx = two_classes()
    phi = compose(inner_auto(random_unit(ctx, np.random.default_rng(11))), j_twist(ctx, 3, reversal=TWO_REV))
    assert all(c.passed for c in mixed_product_check(phi))
    assert all(c.passed for c in restriction_compat_check(phi, samples=50))


def test_target_algebra_is_associative_and_unital():
    for alg in (TargetAlgebra.matrix_algebra(2, 6), two_classes().algebra()):
        assert alg.associativity_witness() is None
        assert alg.unit_witness() is None


def test_verdict_seed_determinism():
    ctx = two_classes()
    phi = j_twist(ctx, 3, reversal=TWO_REV)
    a = [c.line() for c in is_jordan_hom(phi, samples=500, seed=5).checks]
    b = [c.line() for c in is_jordan_hom(phi, samples=500, seed=5).checks]
    assert a == b


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0, 1, 3, 4]))
def test_random_twists_decompose(seed, e):
    ctx = two_classes()
    rng = np.random.default_rng(seed)
    phi = compose(inner_auto(random_unit(ctx, rng)), j_twist(ctx, e, reversal=TWO_REV))
    v = is_jordan_hom(phi, samples=300, seed=seed)
    assert v.passed
    assert near_sum_decompose(phi, v).passed
    assert full_sum_decompose(phi, v, samples=300, seed=seed).passed


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0, 1, 3, 4]), st.booleans())
def test_random_near_sum_round_trips(seed, e, post):
    ctx = chain(4, 6)
    rev = {"x0": "x3", "x1": "x2", "x2": "x1", "x3": "x0"}
    h, t = idempotent_split_parts(ctx, e, rev)
    if post:
        inn = inner_auto(random_unit(ctx, np.random.default_rng(seed)))
        h, t = compose(inn, h), compose(inn, t)
    phi = near_sum_compose(h, t)
    r = near_sum_decompose(phi, samples=300, seed=seed)
    assert r.passed
    assert r.psi.equals(h) and r.theta.equals(t)
