import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import brst, translation
from finwalg.brst import (d_end_superderivation_check, d_squared_check, duality_action_check,
                          dualize_lift, invlift_check, membership_agreement, boundaries_killed,
                          mess_identity_check, random_ptilde_element, right_lift_residuals,
                          shift_matrix, solve_right_lift)
from finwalg.trans import pmat_identity, pmat_is_zero, pmat_mul, pmat_sub

FIXTURES = [("sl", 2, (2,), 16), ("sl", 3, (2, 1), 12), ("sl", 3, (3,), 16)]
REPS = [(FIXTURES[0], "natural"), (FIXTURES[0], "adjoint"), (FIXTURES[1], "natural"),
        (FIXTURES[1], "dual"), (FIXTURES[2], "natural")]


def fmt(X):
    return [[a.alg.format(a) for a in r] for r in X]


def test_sl2_delta_and_phi():
    Bs = brst(*FIXTURES[0])
    B, A = Bs.B, Bs.W.A
    assert B.format(Bs.delta) == "e21*f[e21] - f[e21]"
    assert Bs.charge(Bs.delta) == 1
    assert Bs.charge(B.star(2)) == 1 and Bs.charge(B.gen("ch", 2)) == -1
    h = A.gen("g", 0)
    assert B.format(Bs.phi(h)) == "h1 + 2 - 2*e21^ch*f[e21]"
    assert Bs.q(Bs.phi(h)) == h
    with pytest.raises(ValueError):
        Bs.phi(A.gen("g", 2))


@pytest.mark.parametrize("alg", FIXTURES)
def test_delta_squares_to_zero(alg):
    Bs = brst(*alg)
    assert (Bs.delta * Bs.delta).is_zero()
    assert d_squared_check(Bs, 4 if alg[1] == 3 else 6, 3) is None


@pytest.mark.parametrize("alg", FIXTURES)
def test_membership_matches_invariance(alg):
    Bs = brst(*alg)
    assert membership_agreement(Bs, 4 if alg[1] == 3 else 6) is None
    assert all(Bs.brst_membership(u) for u in Bs.W.theta)
    assert all(Bs.q(Bs.phi(u)) == u for u in Bs.W.theta)


@pytest.mark.parametrize("alg", FIXTURES)
def test_mess_identity(alg):
    Bs = brst(*alg)
    rng = random.Random(7)
    samples = [random_ptilde_element(Bs.W, rng, 4) for _ in range(12)]
    assert mess_identity_check(Bs, samples) is None


@settings(max_examples=15, derandomize=True, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_mess_identity_property(seed):
    Bs = brst(*FIXTURES[1])
    u = random_ptilde_element(Bs.W, random.Random(seed), 4, nterms=2)
    assert Bs.d(Bs.phi(u)) == Bs.mess_rhs(u)


@pytest.mark.parametrize("alg", FIXTURES[:2])
def test_cohomology_decomposition(alg):
    Bs = brst(*alg)
    assert boundaries_killed(Bs, 4, 3) is None
    dec = Bs.cocycle_decomposition(3, 2, 3)
    assert dec["failures"] == 0 and dec["cocycles"] > 0


@pytest.mark.parametrize("alg,rep", REPS[:3])
def test_tensor_differential_squares_to_zero(alg, rep):
    Bs = brst(*alg)
    T = translation(*alg, rep)
    B = Bs.B
    rng = random.Random(3)
    for _ in range(4):
        w = [Bs.phi(random_ptilde_element(Bs.W, rng, 3, 2)) * B.gen("ch", Bs.n_idx[0])
             for _ in range(T.rep.dim)]
        dd = Bs.d_on_tensor(T.rep, Bs.d_on_tensor(T.rep, w))
        assert all(x.is_zero() for x in dd)


def test_d_end_superderivation():
    alg = FIXTURES[1]
    Bs = brst(*alg)
    T = translation(*alg, "natural")
    B = Bs.B
    rng = random.Random(11)
    n = T.rep.dim

    def rand_matrix(odd):
        X = [[B.zero() for _ in range(n)] for _ in range(n)]
        for _ in range(2):
            i, j = rng.randrange(n), rng.randrange(n)
            u = Bs.phi(random_ptilde_element(Bs.W, rng, 2, 1))
            if odd:
                u = u * B.star(rng.choice(Bs.n_idx))
            X[i][j] = X[i][j] + u
        return X

    samples = [(rand_matrix(a), rand_matrix(b)) for a in (0, 1) for b in (0, 1)]
    assert d_end_superderivation_check(Bs, T.rep, samples)


def test_sl2_dual_pair():
    Bs = brst(*FIXTURES[0])
    T = translation(*FIXTURES[0], "natural")
    pair = dualize_lift(Bs, T.rep, T.x0)
    assert pair.certified, pair.report
    assert fmt(pair.y) == [["1", "0"], ["1/2*h1 + 1", "1"]]
    assert fmt(pair.w) == [["1", "0"], ["-1", "1"]]


@pytest.mark.parametrize("alg,rep", REPS)
def test_dualizable_and_right_action(alg, rep):
    Bs = brst(*alg)
    T = translation(*alg, rep)
    W = Bs.W
    pair = dualize_lift(Bs, T.rep, T.x0)
    assert pair.certified, pair.report
    beta = W.T.beta
    I = pmat_identity(W.A, T.rep.dim)
    assert pmat_is_zero(pmat_sub(pmat_mul(shift_matrix(pair.y, beta, 1), T.x0), I))
    assert invlift_check(W, T.rep, T.x0)
    for k, u in enumerate(W.theta):
        if W.ge_kazhdan[k] <= 4:
            assert duality_action_check(T, pair, u)


def test_broken_right_lift_detected():
    alg = FIXTURES[0]
    T = translation(*alg, "natural")
    W = T.W
    y0 = solve_right_lift(W, T.rep)
    bad = [list(r) for r in y0]
    bad[1][0] = bad[1][0] + W.A.gen("g", 0)
    assert right_lift_residuals(W, T.rep, bad)
    assert not right_lift_residuals(W, T.rep, y0)
