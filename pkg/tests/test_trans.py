from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import translation, walg
from finwalg.trans import (LiftError, RepError, Translation, action_weight_check,
                           associativity_check, builtin_rep, check_homomorphism, equivariance_check,
                           generator_pairs, lift_residuals, load_rep, loop_character_check,
                           pmat_identity, pmat_is_zero, pmat_mul, pmat_sub,
                           pmat_unitriangular_inverse, psi_chi_roundtrip, ptilde_character_module,
                           ptilde_module_from_rep, rep_from_json, rep_to_json,
                           solve_lift_canonical, tensor_identity_check, verify_lift)

SETTINGS = settings(max_examples=20, derandomize=True, deadline=None)
H = Fraction(1, 2)

FIXTURES = [(("sl", 2, (2,), 16), rep) for rep in ("natural", "adjoint", "dual")] + \
    [(("sl", 3, (2, 1), 12), rep) for rep in ("natural", "dual", "adjoint")] + \
    [(("sl", 3, (3,), 16), rep) for rep in ("natural", "dual")]


def fmt(X):
    return [[a.alg.format(a) for a in r] for r in X]


def test_sl2_lift_matrices():
    assert fmt(translation("sl", 2, (2,), 16, "natural").x0) == [["1", "0"], ["-1/2*h1", "1"]]
    assert fmt(translation("sl", 2, (2,), 16, "dual").x0) == [["1", "0"], ["1/2*h1", "1"]]
    assert fmt(translation("sl", 2, (2,), 16, "adjoint").x0) == [
        ["1", "0", "0"], ["1/2*h1", "1", "0"], ["-1/4*h1^2 + 1/2*h1", "-h1", "1"]]


def test_sl3_minimal_natural_lift():
    T = translation("sl", 3, (2, 1), 12, "natural")
    assert [int(c) for c in T.rep.c] == [1, 0, -1]
    assert fmt(T.x0) == [["1", "0", "0"], ["e32^ne", "1", "0"],
                         ["-1/2*e21^ne*e32^ne - 1/2*h1 - 1/2*h2 + 1/2", "-e21^ne", "1"]]
    # entry (2,1) has t^e-weight alpha_1 - alpha_2 = 3, entry (3,1) weight 0
    A = T.A
    assert {A.mono_te_weight(m) for m in T.x0[1][0].terms} == {(Fraction(3),)}
    assert {A.mono_te_weight(m) for m in T.x0[2][0].terms} == {(Fraction(0),)}


@pytest.mark.parametrize("alg,rep", FIXTURES)
def test_lift_unique_and_verified(alg, rep):
    T = translation(*alg, rep)
    assert verify_lift(T.W, T.rep, T.x0)
    assert all(T.W.A.format(T.x0[i][i]) == "1" for i in range(T.rep.dim))
    # chi normalization: chi(x0_ij) = delta_ij
    for i in range(T.rep.dim):
        for j in range(T.rep.dim):
            assert T.W.chi_free(T.x0[i][j]) == T.W.A.scalar(int(i == j))


def test_broken_lift_detected():
    T = translation("sl", 2, (2,), 16, "natural")
    A = T.A
    bad = [[A.one(), A.zero()], [T.x0[1][0] + A.gen("g", 0), A.one()]]
    assert lift_residuals(T.W, T.rep, bad)
    assert not verify_lift(T.W, T.rep, bad)


@SETTINGS
@given(st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_lift_factorization(cs):
    """x0 w0 is again a lift matrix when w0 is unitriangular over U(g,e) within the degree bounds,
    and x0^{-1} x recovers w0."""
    T = translation("sl", 3, (2, 1), 12, "natural")
    W, A = T.W, T.A
    t_gen = W.theta[W.ge.index(tuple(Fraction(c) for c in W.spec.te_basis[0]))]
    w0 = pmat_identity(A, 3)
    w0[1][0] = A.scalar(cs[0])
    w0[2][1] = A.scalar(cs[1])
    w0[2][0] = t_gen * cs[2] + cs[3]
    x = pmat_mul(T.x0, w0)
    assert verify_lift(W, T.rep, x)
    back = pmat_mul(T.x0inv, x)
    assert pmat_is_zero(pmat_sub(back, w0))
    assert all(W.is_invariant(a) for r in back for a in r)


def test_sl2_translation_matrix():
    T = translation("sl", 2, (2,), 16, "natural")
    u = T.W.theta[0]
    A = T.A
    U = T.action(u)
    want = [[u - Fraction(1, 4), A.one()], [u, u + Fraction(3, 4)]]
    assert pmat_is_zero(pmat_sub(U, want))
    assert pmat_is_zero(pmat_sub(T.action_by_inverse(u), U))


def test_translation_matrix_depends_on_lift_normalization():
    """With the lift x0 [[1,0],[1,1]] (not chi-normalized) the diagonal constants swap."""
    T = translation("sl", 2, (2,), 16, "natural")
    A = T.A
    u = T.W.theta[0]
    x = pmat_mul(T.x0, [[A.one(), A.zero()], [A.one(), A.one()]])
    assert verify_lift(T.W, T.rep, x)
    U = Translation(T.W, T.rep, x0=x).action_by_inverse(u)
    want = [[u + Fraction(3, 4), A.one()], [u, u - Fraction(1, 4)]]
    assert pmat_is_zero(pmat_sub(U, want))


@pytest.mark.parametrize("alg,rep", FIXTURES)
def test_action_checks(alg, rep):
    T = translation(*alg, rep)
    W = T.W
    for u in W.theta:
        assert action_weight_check(T, u, T.action(u))
    assert equivariance_check(T)
    assert loop_character_check(T)


@pytest.mark.parametrize("alg,rep", [(("sl", 2, (2,), 16), "natural"), (("sl", 3, (2, 1), 12), "natural"),
                                     (("sl", 3, (3,), 16), "natural")])
def test_homomorphism_on_generator_pairs(alg, rep):
    T = translation(*alg, rep)
    W = T.W
    pairs = generator_pairs(W, 8)
    res = check_homomorphism(T, [(W.theta[i], W.theta[j]) for i, j in pairs])
    assert res["passed"], res


@SETTINGS
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(-3, 3)), min_size=3, max_size=3))
def test_psi_chi_round_trip(entries):
    T = translation("sl", 3, (2, 1), 12, "natural")
    W = T.W
    w = [W.theta[i] * c + 1 for i, c in entries]
    assert psi_chi_roundtrip(T, w)


def test_tensor_identity_and_associativity(sl2):
    T = translation("sl", 2, (2,), 16, "natural")
    assert tensor_identity_check(T, ptilde_module_from_rep(sl2, T.rep))
    assert tensor_identity_check(T, ptilde_character_module(sl2, {0: Fraction(3)}))
    res = associativity_check(sl2, T.rep, T.rep)
    assert res["passed"]


def test_unitriangular_inverse():
    T = translation("sl", 3, (3,), 16, "natural")
    I = pmat_identity(T.A, 3)
    assert pmat_is_zero(pmat_sub(pmat_mul(T.x0, T.x0inv), I))
    assert pmat_is_zero(pmat_sub(pmat_unitriangular_inverse(T.x0inv), T.x0))


def test_rep_validation_and_json(sl2):
    spec = sl2.spec
    rep = builtin_rep(spec, "adjoint")
    back = rep_from_json(spec, rep_to_json(spec, rep))
    assert back.c == rep.c and back.matrices == rep.matrices
    zero = [[Fraction(0)] * 2 for _ in range(2)]
    one = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(0)]]
    with pytest.raises(RepError):
        load_rep(spec, [one, zero, zero])
    with pytest.raises(RepError):
        builtin_rep(spec, "spin")


@SETTINGS
@given(st.data())
def test_action_matrix_weights(data):
    """Entries of the action matrix of a Theta-monomial carry the shifted t^e-weights."""
    T = translation("sl", 3, (2, 1), 12, "natural")
    W = T.W
    monos = W.theta_monomials(4)
    b = data.draw(st.sampled_from(monos))
    u = W.theta_monomial(b)
    U = T.action(u)
    assert action_weight_check(T, u, U)
    assert all(W.is_invariant(a) for r in U for a in r)
