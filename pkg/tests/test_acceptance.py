"""Acceptance criteria; each test records PASS/FAIL into conftest.ACCEPTANCE."""
import random
from fractions import Fraction

import conftest
import test_pbw
import test_trans
import test_walg
from conftest import brst, translation, walg
from finwalg.brst import (boundaries_killed, d_squared_check, duality_action_check, dualize_lift,
                          invlift_check, membership_agreement, mess_identity_check,
                          random_ptilde_element)
from finwalg.hw import HighestWeightData, translate_verma_factors
from finwalg.trans import (check_homomorphism, equivariance_check, generator_pairs,
                           loop_character_check, pmat_is_zero, pmat_sub, solve_lift_canonical)

SL2 = ("sl", 2, (2,), 16)
SL3_MIN = ("sl", 3, (2, 1), 12)
SL3_REG = ("sl", 3, (3,), 16)
ALL_REPS = [(alg, rep) for alg in (SL2, SL3_MIN, SL3_REG) for rep in ("natural", "dual", "adjoint")]


def record(k, checks):
    """checks: list of (label, bool). Records the criterion and asserts it."""
    failed = [label for label, ok in checks if not ok]
    conftest.ACCEPTANCE[k] = (not failed, "failed: " + ", ".join(failed) if failed
                              else f"{len(checks)} checks")
    assert not failed, failed


def gen(W, label):
    return W.A.gen("g", W.spec.labels.index(label))


def test_criterion_1_kostant_case():
    W = walg("sl", 2, (2,), 12)
    dims = W.graded_dims(12)
    h, e = gen(W, "h1"), gen(W, "e12")
    expected_theta = e + h * h * Fraction(1, 4) + h * Fraction(1, 2)
    record(1, [
        ("graded dims = S(g^e) count", dims == test_walg.symmetric_algebra_dims(W.spec, 12)),
        ("graded dims = invariant solve", dims == W.oracle_graded_dims(12)),
        ("graded dims values", dims[:9] == [1, 1, 1, 1, 2, 2, 2, 2, 3]),
        ("Theta(e) = e + h^2/4 + h/2", W.theta[0] == expected_theta),
    ])


def test_criterion_2_sl3_regular_dims():
    W = walg("sl", 3, (3,), 8)
    dims = W.graded_dims(8)
    record(2, [("Theta-monomial count = invariant solve", dims == W.oracle_graded_dims(8)),
               ("= S(g^e) count", dims == test_walg.symmetric_algebra_dims(W.spec, 8))])


def test_criterion_3_lift_matrices():
    checks = []
    for alg, rep in [(SL2, "natural"), (SL2, "adjoint"), (SL3_MIN, "natural"), (SL3_REG, "natural")]:
        T = translation(*alg, rep)
        x0 = solve_lift_canonical(T.W, T.rep)
        checks.append((f"{alg[1]}{list(alg[2])} {rep} unique lift", pmat_is_zero(pmat_sub(x0, T.x0))))
    T = translation(*SL2, "natural")
    A = T.A
    want = [[A.one(), A.zero()], [gen(T.W, "h1") * Fraction(-1, 2), A.one()]]
    checks.append(("sl2 natural x0 = [[1,0],[-h/2,1]]", pmat_is_zero(pmat_sub(T.x0, want))))
    record(3, checks)


def test_criterion_4_translation_homomorphism():
    checks = []
    for alg, rep in [(SL2, "natural"), (SL2, "adjoint"), (SL3_REG, "natural")]:
        T = translation(*alg, rep)
        W = T.W
        pairs = generator_pairs(W, 8)
        res = check_homomorphism(T, [(W.theta[i], W.theta[j]) for i, j in pairs])
        checks.append((f"{alg[1]}{list(alg[2])} {rep} homomorphism on {len(pairs)} pairs", res["passed"]))
    T = translation(*SL2, "natural")
    u = T.W.theta[0]
    want = [[u + Fraction(3, 4), T.A.one()], [u, u - Fraction(1, 4)]]
    checks.append(("sl2 natural action of Theta(e) = [[Theta+3/4,1],[Theta,Theta-1/4]]",
                   pmat_is_zero(pmat_sub(T.action(u), want))))
    record(4, checks)


def test_criterion_5_equivariance_and_loop():
    checks = []
    for alg, rep in ALL_REPS:
        T = translation(*alg, rep)
        tag = f"{alg[1]}{list(alg[2])} {rep}"
        checks.append((f"{tag} equivariance", equivariance_check(T)))
        checks.append((f"{tag} loop", loop_character_check(T)))
    record(5, checks)


def test_criterion_6_brst_channel():
    checks = []
    for alg in (SL2, SL3_REG):
        Bs = brst(*alg)
        tag = f"{alg[1]}{list(alg[2])}"
        rng = random.Random(2026)
        samples = [random_ptilde_element(Bs.W, rng, 4) for _ in range(100)]
        checks += [
            (f"{tag} delta^2 = 0", (Bs.delta * Bs.delta).is_zero()),
            (f"{tag} d^2 = 0 to degree 6", d_squared_check(Bs, 6, 3) is None),
            (f"{tag} membership = invariance, j <= 6", membership_agreement(Bs, 6) is None),
            (f"{tag} mess identity on 100 elements", mess_identity_check(Bs, samples) is None),
            (f"{tag} q kills boundaries", boundaries_killed(Bs, 4, 3) is None),
        ]
    record(6, checks)


def test_criterion_7_dualizability():
    checks = []
    for alg, rep in ALL_REPS:
        T = translation(*alg, rep)
        W = T.W
        pair = dualize_lift(brst(*alg), T.rep, T.x0)
        tag = f"{alg[1]}{list(alg[2])} {rep}"
        checks.append((f"{tag} S_beta(y) = x^-1", pair.certified))
        checks.append((f"{tag} inverse lift", invlift_check(W, T.rep, T.x0)))
        checks.append((f"{tag} duality action", all(
            duality_action_check(T, pair, u) for k, u in enumerate(W.theta) if W.ge_kazhdan[k] <= 4)))
    record(7, checks)


def test_criterion_8_verma_filtration():
    H = HighestWeightData(walg(*SL3_MIN))
    T = translation(*SL3_MIN, "natural")
    checks = []
    for lam in (Fraction(0), Fraction(5, 7), Fraction(-3)):
        L = H.one_dim_module([lam])
        factors, info = translate_verma_factors(H, L, T.rep, 3, T=T)
        got = sorted((f.weight, f.dim) for f in factors)
        want = sorted([((lam + 1,), 1), ((lam + 1,), 1), ((lam - 2,), 1)])
        checks += [(f"lambda={lam} factors", got == want),
                   (f"lambda={lam} maximality certificates",
                    all(f.certified for f in factors) and all(s["maximal"] for s in info["steps"])),
                   (f"lambda={lam} character identity", info["character_identity"])]
    record(8, checks)


def test_criterion_9_property_suites():
    suites = [
        ("PBW associativity", lambda: [test_pbw.test_associativity_and_words(flavor=f)
                                       for f in ("g", "tilde", "hat")]),
        ("PBW confluence", test_pbw.test_confluence_across_orders),
        ("super Jacobi", test_pbw.test_super_antisymmetry_and_jacobi),
        ("Pr projection law", test_pbw.test_projection_law),
        ("coproduct multiplicative", test_pbw.test_coproduct_multiplicative),
        ("shift automorphism", test_pbw.test_shift_is_an_automorphism),
        ("chi right-linearity", test_walg.test_chi_is_right_linear),
        ("lift factorization x = x0 w0", test_trans.test_lift_factorization),
        ("action matrix weights", test_trans.test_action_matrix_weights),
    ]
    checks = []
    for label, fn in suites:
        try:
            fn()
            checks.append((label, True))
        except AssertionError:
            checks.append((label, False))
    record(9, checks)
