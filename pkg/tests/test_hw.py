from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import translation, walg
from finwalg.hw import (G0Module, HighestWeightData, TranslatedVerma, build_verma, character,
                        convolve, factors_to_json, restricted_roots, translate_verma_factors,
                        verma_character, weight_finiteness_check)

F = Fraction


@pytest.fixture(scope="module")
def hw_min():
    return HighestWeightData(walg("sl", 3, (2, 1), 12))


def test_restricted_roots_sl3_minimal(hw_min):
    R = hw_min.roots
    assert R.roots == {(F(3),): 2, (F(-3),): 2}
    assert R.positive == [(F(3),)] and R.negative == [(F(-3),)]
    assert R.height((F(3),)) > 0
    assert len(hw_min.neg) == len(hw_min.pos) == 1 and len(hw_min.zero) == 2


def test_restricted_roots_empty_for_regular():
    R = restricted_roots(walg("sl", 3, (3,), 16))
    assert R.roots == {} and R.positive == []


def test_one_dim_module_validates(hw_min):
    L = hw_min.one_dim_module([F(5, 7)])
    assert L.dim == 1 and L.weight == (F(5, 7),)
    assert hw_min.validate_module(L) == []
    bad = G0Module(1, [[[F(0)]] for _ in L.gens], (F(5, 7),))
    assert hw_min.validate_module(bad)


def test_verma_character(hw_min):
    L = hw_min.one_dim_module([F(5, 7)])
    M = build_verma(hw_min, L, 3)
    ch = character(M)
    assert ch == {(F(5, 7) - 3 * k,): 1 for k in range(4)}
    assert ch == verma_character(hw_min, (F(5, 7),), 1, 3)
    with pytest.raises(ValueError):
        build_verma(hw_min, L, -1)


def test_translated_character_is_convolution(hw_min):
    L = hw_min.one_dim_module([F(5, 7)])
    M = build_verma(hw_min, L, 3)
    T = translation("sl", 3, (2, 1), 12, "natural")
    TV = TranslatedVerma(M, T)
    weights = [(F(1),), (F(-2),), (F(1),)]
    assert TV.character() == convolve(character(M), weights)


@settings(max_examples=8, derandomize=True, deadline=None)
@given(st.fractions(min_value=-5, max_value=5, max_denominator=9))
def test_translated_verma_factors(lam):
    H = HighestWeightData(walg("sl", 3, (2, 1), 12))
    L = H.one_dim_module([lam])
    T = translation("sl", 3, (2, 1), 12, "natural")
    factors, info = translate_verma_factors(H, L, T.rep, 3, T=T)
    assert sorted((f.weight, f.dim) for f in factors) == sorted(
        [((lam + 1,), 1), ((lam + 1,), 1), ((lam - 2,), 1)])
    assert all(f.certified for f in factors)
    assert info["character_identity"]
    assert all(s["maximal"] and s["positive_kill"] for s in info["steps"])


def test_factors_json(hw_min):
    L = hw_min.one_dim_module([F(0)])
    T = translation("sl", 3, (2, 1), 12, "dual")
    factors, info = translate_verma_factors(hw_min, L, T.rep, 3, T=T)
    js = factors_to_json(hw_min.W, factors)
    assert {d["weight"]["te0"] for d in js} == {"2", "-1"}
    assert info["character_identity"]


def test_weight_finiteness(hw_min):
    L = hw_min.one_dim_module([F(5, 7)])
    T = translation("sl", 3, (2, 1), 12, "natural")
    ch = TranslatedVerma(build_verma(hw_min, L, 3), T).character()
    assert weight_finiteness_check(ch, [(F(12, 7),)], hw_min.roots)
    assert not weight_finiteness_check({(F(9),): 1}, [(F(0),)], hw_min.roots)
    assert not weight_finiteness_check({(F(-1),): 1}, [(F(0),)], hw_min.roots)
