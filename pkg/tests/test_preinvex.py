import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hh_opverify.eta import make_convex_eta, make_eta1, make_eta2, sample_pair
from hh_opverify.functions import affine, constant, cube, identity, square
from hh_opverify.linalg import HermitianMatrix, ScalarFunction
from hh_opverify.preinvex import (
    HOLDS,
    VIOLATED,
    RayleighCurve,
    check_operator_preinvex,
    check_phi_convexity,
    check_prop1_equivalence,
    phi,
    preinvexity_gap,
    scalar_preinvex_holds,
)
from hh_opverify.sampling import random_hermitian, unit_vector

SEEDS = st.integers(0, 2**32 - 1)


def m1(v):
    return HermitianMatrix([[float(v)]])


def neg_square():
    return ScalarFunction(lambda t: -t * t, label="neg-square")


def test_square_eta1_scalars_hold(rng):
    eta = make_eta1()
    pairs = [sample_pair(eta.domain, rng, 1) for _ in range(100)]
    r = check_operator_preinvex(square(), eta, pairs)
    assert r.verdict == HOLDS and r.samples == 100 * 21


def test_affine_eta1_hand_instances():
    eta = make_eta1()
    g = affine(5, 2)
    # A = -2, B = 2: path ends at 1, g(1) = 7 <= g(B) = 9
    r = check_operator_preinvex(g, eta, [(m1(-2), m1(2))], [1.0])
    assert r.verdict == HOLDS
    # A = 2, B = -2: direction 1 - A = -1, g(1) = 7 > g(-2) = 1
    r = check_operator_preinvex(g, eta, [(m1(2), m1(-2))], [1.0])
    assert r.verdict == VIOLATED
    w = r.witnesses[0]
    assert w.t == 1.0 and w.min_eigenvalue == pytest.approx(1.0 - 7.0)


def test_constant_eta2_zero_gaps(rng):
    eta = make_eta2()
    pairs = [sample_pair(eta.domain, rng, 3, "cross") for _ in range(10)]
    r = check_operator_preinvex(constant(4.0), eta, pairs)
    assert r.verdict == HOLDS
    assert abs(r.worst_gap) <= 1e-14


def test_identity_eta2_hand_instance():
    # path from A = 1 toward B = -1 has zero direction: f(1) = 1 > f(-1) = -1
    r = check_operator_preinvex(identity(), make_eta2(), [(m1(1), m1(-1))], [1.0])
    assert r.verdict == VIOLATED
    assert r.witnesses[0].min_eigenvalue == pytest.approx(-2.0)


def test_inapplicable_sample():
    sqrt = ScalarFunction(np.sqrt, (0.0, np.inf), "sqrt")
    r = check_operator_preinvex(sqrt, make_convex_eta(), [(m1(1), m1(-1))], [0.0, 1.0])
    assert r.inapplicable and r.verdict == HOLDS


def test_report_merge(rng):
    eta = make_convex_eta()
    a = check_operator_preinvex(cube(), eta, [(m1(1), m1(-3))])
    b = check_operator_preinvex(square(), eta, [(m1(1), m1(2))])
    m = a.merge(b)
    assert m.samples == a.samples + b.samples
    assert m.verdict == VIOLATED and len(m.witnesses) == len(a.witnesses)


def test_witness_vector_breaks_scalar_inequality(rng):
    eta = make_convex_eta()
    found = 0
    for _ in range(300):
        A, B = random_hermitian(rng, 2), random_hermitian(rng, 2)
        A, B = HermitianMatrix(A @ A.data), HermitianMatrix(B @ B.data)
        r = check_operator_preinvex(cube(), eta, [(A, B)], np.linspace(0.05, 0.95, 19))
        for w in r.witnesses:
            found += 1
            c = RayleighCurve.from_eta(cube(), eta, w.A, w.B, w.vector)
            lhs = phi(c, w.t)
            rhs = (1 - w.t) * phi(c, 0.0) + w.t * phi(c, 1.0)
            assert lhs > rhs
    assert found > 0


@settings(max_examples=200, deadline=None)
@given(a=st.floats(-3, 4), b=st.floats(-3, 4), t=st.floats(0, 1),
       fn=st.sampled_from(["square", "cube", "affine"]))
def test_scalar_agreement(a, b, t, fn):
    f = {"square": square(), "cube": cube(), "affine": affine(5, 2)}[fn]
    eta = make_convex_eta()
    r = check_operator_preinvex(f, eta, [(m1(a), m1(b))], [t])
    assert (r.verdict == HOLDS) == scalar_preinvex_holds(f, a, b, b - a, t)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS, dim=st.integers(1, 6))
def test_square_convex_never_violated(seed, dim):
    r = np.random.default_rng(seed)
    pairs = [(random_hermitian(r, dim), random_hermitian(r, dim)) for _ in range(17)]
    rep = check_operator_preinvex(square(), make_convex_eta(), pairs, np.linspace(0, 1, 6))
    assert rep.verdict == HOLDS


def test_preinvexity_gap_matches_report(rng):
    A, B = random_hermitian(rng, 3), random_hermitian(rng, 3)
    gap, scale = preinvexity_gap(square(), make_convex_eta(), A, B, 0.3)
    # for t^2 the gap is t(1-t)(B-A)^2
    D = (B - A).data
    np.testing.assert_allclose(gap.data, 0.21 * D @ D, atol=1e-12 * scale)


def test_phi_examples(rng):
    f = square()
    c = RayleighCurve(f, HermitianMatrix.diag([1, 2]), HermitianMatrix.diag([1, 0]), np.array([1, 0]))
    assert phi(c, 0.5) == pytest.approx(2.25, abs=1e-14)
    A, D = random_hermitian(rng, 3), random_hermitian(rng, 3)
    x = unit_vector(rng, 3)
    lin = RayleighCurve(identity(), A, D, x)
    for t in (0.0, 0.3, 1.0):
        expected = A.quadratic_form(x).real + t * D.quadratic_form(x).real
        assert phi(lin, t) == pytest.approx(expected, abs=1e-13)
    with pytest.raises(ValueError):
        phi(lin, 1.5)
    with pytest.raises(ValueError):
        RayleighCurve(f, A, D, 2 * x)


@settings(max_examples=50, deadline=None)
@given(seed=SEEDS, dim=st.integers(1, 5), angle=st.floats(0, 2 * np.pi), t=st.floats(0, 1))
def test_phi_phase_invariance(seed, dim, angle, t):
    r = np.random.default_rng(seed)
    A, D, x = random_hermitian(r, dim), random_hermitian(r, dim), unit_vector(r, dim)
    c1 = RayleighCurve(square(), A, D, x)
    c2 = RayleighCurve(square(), A, D, np.exp(1j * angle) * x)
    assert phi(c1, t) == pytest.approx(phi(c2, t), abs=1e-12 * max(1.0, abs(phi(c1, t))))


def test_phi_convexity_examples(rng):
    A, D, x = random_hermitian(rng, 4), random_hermitian(rng, 4), unit_vector(rng, 4)
    ok, worst = check_phi_convexity(RayleighCurve(identity(), A, D, x))
    assert ok and abs(worst) < 1e-12
    ok, _ = check_phi_convexity(RayleighCurve(square(), A, D, x))
    assert ok
    d = 1.5
    ok, worst = check_phi_convexity(RayleighCurve(neg_square(), m1(0.3), m1(d), np.array([1.0])))
    h = 1 / 100
    assert not ok and worst == pytest.approx(-2 * h * h * d * d, rel=1e-6)
    with pytest.raises(ValueError):
        check_phi_convexity(RayleighCurve(identity(), A, D, x), grid_size=2)


def test_curve_equivalence_square_convex(rng):
    A, B = random_hermitian(rng, 3), random_hermitian(rng, 3)
    xs = [unit_vector(rng, 3) for _ in range(10)]
    r = check_prop1_equivalence(square(), make_convex_eta(), A, B, xs)
    assert r.consistent and r.curves_convex and r.preinvex_on_path


def test_curve_equivalence_scalar_square():
    r = check_prop1_equivalence(square(), make_convex_eta(), m1(-1), m1(2), [np.array([1.0])])
    assert r.consistent and r.curves_convex and r.preinvex_on_path


def test_curve_equivalence_neg_square_fails_together(rng):
    A, B = random_hermitian(rng, 3), random_hermitian(rng, 3)
    xs = [unit_vector(rng, 3) for _ in range(10)]
    r = check_prop1_equivalence(neg_square(), make_convex_eta(), A, B, xs)
    assert r.consistent
    assert not r.curves_convex and not r.preinvex_on_path
    assert all(r.witness_curves_nonconvex)
    assert not any(ok for ok, _ in r.curve_results)


def test_curve_equivalence_requires_equispaced_grid(rng):
    with pytest.raises(ValueError):
        check_prop1_equivalence(square(), make_convex_eta(), m1(0), m1(1), [np.array([1.0])],
                                t_grid=[0.0, 0.1, 1.0])
