import json
from fractions import Fraction

import pytest

from finwalg.liedata import (LieDataError, NotNilpotentError, ZeroNilpotentError, build_gl_sl,
                             centralizer, complete_sl2_triple, grading_tables, parse_alg_arg,
                             spec_from_json, spec_to_json, unit, validate_good_grading,
                             validate_spec)

FIXTURES = [("sl", 2, [2]), ("sl", 3, [3]), ("sl", 3, [2, 1]), ("gl", 2, [2]), ("gl", 3, [2, 1]),
            ("sl", 4, [2, 2]), ("sl", 4, [3, 1])]


def vec(spec, **coords):
    v = [Fraction(0)] * spec.dim
    for label, c in coords.items():
        v[spec.labels.index(label)] = Fraction(c)
    return tuple(v)


@pytest.mark.parametrize("kind,n,part", FIXTURES)
def test_built_specs_satisfy_all_invariants(kind, n, part):
    spec = build_gl_sl(kind, n, part)
    assert validate_spec(spec) == []
    assert validate_good_grading(spec) == []
    T = grading_tables(spec)
    assert len(T.n_idx) + len(T.p_idx) == spec.dim
    assert len(T.k_idx) == 2 * T.s


@pytest.mark.parametrize("kind,n,part", FIXTURES)
def test_grading_table_invariants(kind, n, part):
    spec = build_gl_sl(kind, n, part)
    T = grading_tables(spec)
    # chi_e vanishes off g(-2)
    for k in range(spec.dim):
        if spec.grading[k] != -2:
            assert T.chi[k] == 0
    # (x_i | [b_j, e]) = delta_ij and x_i is orthogonal to g^f
    gf = centralizer(spec, spec.f)
    for i, (_, x) in enumerate(T.r_basis):
        for j, (b, _) in enumerate(T.r_basis):
            assert spec.pair(x, spec.bracket(unit(spec.dim, b), spec.e)) == int(i == j)
        assert all(spec.pair(x, y) == 0 for y in gf)
    # symplectic Gram matrix of z_1..z_2s is standard
    s = T.s
    for i in range(2 * s):
        for j in range(2 * s):
            want = 1 if (i < s and j == i + s) else (-1 if (i >= s and j == i - s) else 0)
            assert T.omega(T.z_basis[i], T.z_basis[j]) == want


def test_sl2_fixture():
    spec = build_gl_sl("sl", 2, [2])
    assert spec.grading == [0, 2, -2]
    assert spec.e == vec(spec, e12=1) and spec.f == vec(spec, e21=1) and spec.h == vec(spec, h1=1)
    T = grading_tables(spec)
    assert T.s == 0
    (b, x), = T.r_basis
    assert spec.labels[b] == "e21" and x == vec(spec, h1=Fraction(-1, 2))
    assert T.beta == {0: -2}


def test_sl3_regular_fixture():
    spec = build_gl_sl("sl", 3, [3])
    # h = diag(2, 0, -2) = 2 h1 + 2 h2
    assert spec.h == vec(spec, h1=2, h2=2)
    assert spec.e == vec(spec, e12=1, e23=1)


def test_sl3_minimal_fixture():
    spec = build_gl_sl("sl", 3, [2, 1])
    assert len(centralizer(spec, spec.e)) == 4
    T = grading_tables(spec)
    assert len(T.k_idx) == 2 and T.s == 1
    assert T.z_basis == [vec(spec, e21=1), vec(spec, e32=1)]
    assert T.omega(T.z_basis[0], T.z_basis[1]) == 1
    h, f = complete_sl2_triple(spec, spec.e)
    assert h == vec(spec, h1=1, h2=1) and f == vec(spec, e31=1)


def test_centralizer_edge_cases():
    spec = build_gl_sl("sl", 2, [2])
    assert centralizer(spec, spec.e) == [vec(spec, e12=1)]
    assert len(centralizer(spec, [0] * spec.dim)) == spec.dim


def test_bad_inputs():
    spec = build_gl_sl("sl", 2, [2])
    with pytest.raises(ZeroNilpotentError):
        complete_sl2_triple(spec, [0, 0, 0])
    with pytest.raises(NotNilpotentError):
        complete_sl2_triple(spec, vec(spec, h1=1))
    with pytest.raises(LieDataError):
        build_gl_sl("sl", 3, [2, 2])
    with pytest.raises(LieDataError):
        parse_alg_arg("so5:[3]")
    assert "e ∈ g(2)" in validate_good_grading(spec, [0, 0, -2])


def test_json_round_trip():
    spec = build_gl_sl("sl", 3, [2, 1])
    data = json.loads(json.dumps(spec_to_json(spec)))
    back = spec_from_json(data)
    assert spec_to_json(back) == spec_to_json(spec)
    assert validate_spec(back) == []
