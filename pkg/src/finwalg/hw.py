"""Highest-weight theory: restricted roots, quasi-Verma modules and the
factor extraction for translated Verma modules.

Module vectors are sparse dicts keyed by ``(a, l)`` (Verma) or
``(a, l, i)`` (translated), where ``a`` is the exponent vector of the
negative generators, ``l`` indexes a basis of L and ``i`` a basis of V.
Truncation depth counts negative factors: sum(a) <= depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .liedata import AlgebraSpec
from .pbw import PBWElement
from .ratlin import format_rational, identity, mat_mul, reduce_against, rref_rows
from .trans import Matrix, RepSpec, Translation, builtin_rep
from .walg import WAlgebra

ZERO = Fraction(0)
ONE = Fraction(1)
Weight = Tuple[Fraction, ...]
Vec = Dict[tuple, Fraction]


class TruncationOverflow(RuntimeError):
    pass


class CertificateFailure(RuntimeError):
    pass


def _vadd(acc: Vec, v: Vec, c: Fraction = ONE) -> None:
    for k, x in v.items():
        nv = acc.get(k, ZERO) + c * x
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


# ---------------------------------------------------------------------------
# restricted roots
# ---------------------------------------------------------------------------

@dataclass
class RestrictedRootData:
    roots: Dict[Weight, int]          # nonzero t^e-weights of g with multiplicity
    positive: List[Weight]
    negative: List[Weight]
    g0_idx: List[int]
    split: Tuple[Fraction, ...]

    def height(self, w: Sequence[Fraction]) -> Fraction:
        return sum((a * b for a, b in zip(self.split, w)), ZERO)


def restricted_roots(W: WAlgebra) -> RestrictedRootData:
    spec, T = W.spec, W.T
    roots: Dict[Weight, int] = {}
    g0 = []
    for i in range(spec.dim):
        w = spec.te_weight(i)
        if any(w):
            roots[w] = roots.get(w, 0) + 1
        else:
            g0.append(i)
    pos, neg = [], []
    for w in sorted(roots):
        c = T.restricted_class(w)
        if c == 0:
            raise ValueError("splitting functional vanishes on a restricted root")
        (pos if c > 0 else neg).append(w)
    return RestrictedRootData(roots, pos, neg, g0, tuple(T.split))


# ---------------------------------------------------------------------------
# U(g0,e)-modules
# ---------------------------------------------------------------------------

@dataclass
class G0Module:
    """Matrices for the generators Theta_0(y_k) of U(g0,e)."""
    dim: int
    gens: List[Matrix]
    weight: Weight

    def act_coords(self, coords: Dict[Tuple[int, ...], Fraction]) -> Matrix:
        out = [[ZERO] * self.dim for _ in range(self.dim)]
        for b, c in coords.items():
            M = identity(self.dim)
            for k, e in enumerate(b):
                for _ in range(e):
                    M = mat_mul(M, self.gens[k])
            for i in range(self.dim):
                for j in range(self.dim):
                    out[i][j] += c * M[i][j]
        return out


class HighestWeightData:
    """Restricted roots, the g0 W-algebra and the hwiso map for one W."""

    def __init__(self, W: WAlgebra):
        self.W = W
        self.roots = restricted_roots(W)
        self.g0 = W.g0
        self.sign = W.hwiso_sign()
        T = W.T
        self.neg = [i for i, c in enumerate(T.ge_class) if c < 0]
        self.zero = [i for i, c in enumerate(T.ge_class) if c == 0]
        self.pos = [i for i, c in enumerate(T.ge_class) if c > 0]
        self._zero_cache: Dict[Tuple[int, ...], Dict[Tuple[int, ...], Fraction]] = {}

    def zero_image(self, b0: Tuple[int, ...]) -> Dict[Tuple[int, ...], Fraction]:
        """Theta_0-coordinates of the image of Theta^{b0} in U(g0,e)."""
        hit = self._zero_cache.get(b0)
        if hit is None:
            img = self.W.project_to_g0(self.W.theta_monomial(b0))
            hit = self.g0.express_in_theta(img)
            self._zero_cache[b0] = hit
        return hit

    def te_generators(self) -> List[PBWElement]:
        return [self.W.theta_embed(t) for t in self.W.spec.te_basis]

    def validate_module(self, L: G0Module) -> List[str]:
        """Relations [Theta_i, Theta_j] of U(g0,e) hold on L, and t^e acts by L.weight."""
        g0 = self.g0
        bad = []
        r = len(g0.theta)
        for i in range(r):
            for j in range(i + 1, r):
                comm = g0.theta[i] * g0.theta[j] - g0.theta[j] * g0.theta[i]
                lhs = L.act_coords(g0.express_in_theta(comm))
                a, b = L.gens[i], L.gens[j]
                ab, ba = mat_mul(a, b), mat_mul(b, a)
                if any(lhs[p][q] != ab[p][q] - ba[p][q] for p in range(L.dim) for q in range(L.dim)):
                    bad.append(f"relation ({i},{j})")
        for k, th in enumerate(self.te_generators()):
            M = L.act_coords(self.zero_image_of(th))
            for p in range(L.dim):
                for q in range(L.dim):
                    want = L.weight[k] if p == q else ZERO
                    if M[p][q] != want:
                        bad.append(f"t^e generator {k} does not act by the weight")
                        break
        return bad

    def zero_image_of(self, u: PBWElement) -> Dict[Tuple[int, ...], Fraction]:
        return self.g0.express_in_theta(self.W.project_to_g0(u))

    def one_dim_module(self, lam0: Sequence, extra: Optional[Dict[int, Fraction]] = None) -> G0Module:
        """1-dim L on which theta(t) acts by lam0 (t in the t^e basis).

        Generators of U(g0,e) not fixed by lam0 act by ``extra`` (default 0).
        """
        g0 = self.g0
        lam0 = tuple(Fraction(x) for x in lam0)
        extra = dict(extra or {})
        r = len(g0.theta)
        # each t^e image is (linear in Theta_0 generators) + constant; solve for generator values
        from .ratlin import solve_rows
        rows, rhs = [], []
        for k, th in enumerate(self.te_generators()):
            coords = self.zero_image_of(th)
            row = {}
            const = ZERO
            for b, c in coords.items():
                deg = sum(b)
                if deg == 0:
                    const += c
                elif deg == 1:
                    row[b.index(1)] = c
                else:
                    raise ValueError("t^e image is not linear in the generators")
            rows.append(row)
            rhs.append(lam0[k] - const)
        for k, v in extra.items():
            rows.append({k: ONE})
            rhs.append(Fraction(v))
        fixed = set().union(*[set(r) for r in rows]) if rows else set()
        for k in range(r):
            if k not in fixed:
                rows.append({k: ONE})
                rhs.append(ZERO)
        sol = solve_rows(rows, r, rhs)
        L = G0Module(1, [[[sol.get(k, ZERO)]] for k in range(r)], lam0)
        bad = self.validate_module(L)
        if bad:
            raise ValueError(f"not a U(g0,e)-module: {bad}")
        return L


# ---------------------------------------------------------------------------
# quasi-Verma modules
# ---------------------------------------------------------------------------

class VermaModule:
    """M(L) = U(g,e)/U(g,e)_# ⊗_{U(g0,e)} L with basis Theta(neg)^a ⊗ l."""

    def __init__(self, hw: HighestWeightData, L: G0Module, depth: int):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        self.hw = hw
        self.W = hw.W
        self.L = L
        self.depth = depth
        self.r = len(self.W.ge)
        self._gen_cache: Dict[Tuple[int, Tuple[int, ...]], Vec] = {}
        self._lmat_cache: Dict[Tuple[int, ...], Matrix] = {}

    def full_exponent(self, a: Tuple[int, ...]) -> Tuple[int, ...]:
        b = [0] * self.r
        for k, i in enumerate(self.hw.neg):
            b[i] = a[k]
        return tuple(b)

    def negative_monomials(self, depth: Optional[int] = None) -> List[Tuple[int, ...]]:
        depth = self.depth if depth is None else depth
        s = len(self.hw.neg)
        out: List[Tuple[int, ...]] = []

        def rec(k, budget, acc):
            if k == s:
                out.append(tuple(acc))
                return
            for e in range(budget + 1):
                rec(k + 1, budget - e, acc + [e])

        rec(0, depth, [])
        out.sort(key=lambda a: (sum(a), a))
        return out

    def basis(self) -> List[tuple]:
        return [(a, l) for a in self.negative_monomials() for l in range(self.L.dim)]

    def weight_of(self, a: Tuple[int, ...]) -> Weight:
        w = list(self.L.weight)
        for k, i in enumerate(self.hw.neg):
            for t, g in enumerate(self.W.T.ge_weight[i]):
                w[t] += a[k] * g
        return tuple(w)

    def _lmat(self, b0: Tuple[int, ...]) -> Matrix:
        hit = self._lmat_cache.get(b0)
        if hit is None:
            hit = self.L.act_coords(self.hw.zero_image(b0))
            self._lmat_cache[b0] = hit
        return hit

    def _apply_coords(self, coords: Dict[Tuple[int, ...], Fraction], l: int) -> Vec:
        """Theta-coordinates of an element applied to 1 ⊗ l."""
        out: Vec = {}
        hw = self.hw
        for b, c in coords.items():
            if any(b[i] for i in hw.pos):
                continue
            a = tuple(b[i] for i in hw.neg)
            b0 = tuple(b[i] if i in hw.zero else 0 for i in range(self.r))
            M = self._lmat(b0)
            for l2 in range(self.L.dim):
                if M[l2][l]:
                    _vadd(out, {(a, l2): c * M[l2][l]})
        return out

    def act_generator(self, k: int, key: tuple) -> Vec:
        """Theta(x_k) applied to the basis vector Theta^a ⊗ l."""
        a, l = key
        ck = (k, a)
        hit = self._gen_cache.get(ck)
        if hit is None:
            prod = self.W.theta[k] * self.W.theta_monomial(self.full_exponent(a))
            hit = self.W.express_in_theta(prod)
            self._gen_cache[ck] = hit
        return self._apply_coords(hit, l)

    def act_theta_coords(self, coords: Dict[Tuple[int, ...], Fraction], vec: Vec) -> Vec:
        """Apply sum_b c_b Theta^b to a vector (rightmost factor first)."""
        out: Vec = {}
        for b, c in coords.items():
            cur = dict(vec)
            for k in range(self.r - 1, -1, -1):
                for _ in range(b[k]):
                    nxt: Vec = {}
                    for key, x in cur.items():
                        _vadd(nxt, self.act_generator(k, key), x)
                    cur = nxt
            _vadd(out, cur, c)
        return out

    def act(self, u: PBWElement, vec: Vec) -> Vec:
        return self.act_theta_coords(self.W.express_in_theta(u), vec)

    def character(self, depth: Optional[int] = None) -> Dict[Weight, int]:
        ch: Dict[Weight, int] = {}
        for a in self.negative_monomials(depth):
            w = self.weight_of(a)
            ch[w] = ch.get(w, 0) + self.L.dim
        return ch

    def overflow(self, vec: Vec) -> bool:
        return any(sum(k[0]) > self.depth for k in vec)


def build_verma(hw: HighestWeightData, L: G0Module, depth: int) -> VermaModule:
    bad = hw.validate_module(L)
    if bad:
        raise ValueError(f"L is not a U(g0,e)-module: {bad}")
    return VermaModule(hw, L, depth)


def character(obj, depth: Optional[int] = None) -> Dict[Weight, int]:
    return obj.character(depth)


def verma_character(hw: HighestWeightData, weight: Weight, dim: int, depth: int) -> Dict[Weight, int]:
    M = VermaModule(hw, G0Module(dim, [], tuple(weight)), depth)
    return M.character()


def convolve(ch: Dict[Weight, int], rep_weights: Sequence[Weight]) -> Dict[Weight, int]:
    out: Dict[Weight, int] = {}
    for w, d in ch.items():
        for a in rep_weights:
            key = tuple(x + y for x, y in zip(w, a))
            out[key] = out.get(key, 0) + d
    return out


# ---------------------------------------------------------------------------
# translated Verma modules and their filtration
# ---------------------------------------------------------------------------

class TranslatedVerma:
    """M(L) ⊛ V realised on M(L) ⊗ V through the matrices **u**."""

    def __init__(self, M: VermaModule, T: Translation):
        self.M = M
        self.T = T
        self.W = M.W
        self.n = T.rep.dim
        # gen_coords[k][i][j]: Theta-coordinates of entry (i, j) of the k-th generator's matrix
        mats = [T.action(u, check=False) for u in self.W.theta]
        self.gen_coords = [[[self.W.express_in_theta(a) for a in row] for row in U] for U in mats]
        self._cache: Dict[Tuple[int, tuple], Vec] = {}

    def weight_of(self, key: tuple) -> Weight:
        a, l, i = key
        return tuple(x + y for x, y in zip(self.M.weight_of(a), self.T.rep.te_weights[i]))

    def basis(self, depth: Optional[int] = None) -> List[tuple]:
        return [(a, l, i) for a in self.M.negative_monomials(depth)
                for l in range(self.M.L.dim) for i in range(self.n)]

    def act_generator(self, k: int, key: tuple) -> Vec:
        hit = self._cache.get((k, key))
        if hit is not None:
            return hit
        a, l, j = key
        out: Vec = {}
        U = self.gen_coords[k]
        for i in range(self.n):
            if not U[i][j]:
                continue
            img = self.M.act_theta_coords(U[i][j], {(a, l): ONE})
            for (a2, l2), c in img.items():
                _vadd(out, {(a2, l2, i): c})
        self._cache[(k, key)] = out
        return out

    def act_vec(self, k: int, vec: Vec) -> Vec:
        out: Vec = {}
        for key, c in vec.items():
            _vadd(out, self.act_generator(k, key), c)
        return out

    def character(self, depth: Optional[int] = None) -> Dict[Weight, int]:
        return convolve(self.M.character(depth), self.T.rep.te_weights)


class _WeightSpan:
    """Subspace of a module, stored as RREF bases per weight."""

    def __init__(self):
        self.rows: Dict[Weight, Tuple[List[Dict[int, Fraction]], List[int]]] = {}
        self.index: Dict[Weight, Dict[tuple, int]] = {}

    def _idx(self, w: Weight, key: tuple) -> int:
        d = self.index.setdefault(w, {})
        if key not in d:
            d[key] = len(d)
        return d[key]

    def _row(self, w: Weight, vec: Vec) -> Dict[int, Fraction]:
        return {self._idx(w, k): c for k, c in vec.items()}

    def dim(self, w: Weight) -> int:
        return len(self.rows.get(w, ([], []))[0])

    def reduce(self, w: Weight, vec: Vec) -> Dict[int, Fraction]:
        rows, piv = self.rows.get(w, ([], []))
        return reduce_against(self._row(w, vec), rows, piv)

    def contains(self, w: Weight, vec: Vec) -> bool:
        return not self.reduce(w, vec)

    def add(self, w: Weight, vecs: List[Vec]) -> None:
        rows, _ = self.rows.get(w, ([], []))
        new = list(rows) + [self._row(w, v) for v in vecs]
        size = len(self.index.get(w, {}))
        self.rows[w] = rref_rows(new, max(size, 1))

    def copy(self) -> "_WeightSpan":
        out = _WeightSpan()
        out.rows = {w: ([dict(r) for r in rows], list(p)) for w, (rows, p) in self.rows.items()}
        out.index = {w: dict(d) for w, d in self.index.items()}
        return out


def _coords_mod(U: _WeightSpan, w: Weight, Li: List[Vec], vec: Vec) -> Optional[List[Fraction]]:
    """Coefficients c with vec = sum c_i Li_i (mod U_w), or None."""
    from .ratlin import InconsistentSystem, solve_rows
    urows = U.rows.get(w, ([], []))[0]
    inv = {i: k for k, i in U.index.get(w, {}).items()}
    gens: List[Vec] = list(Li) + [{inv[i]: c for i, c in r.items()} for r in urows]
    keys = sorted({k for g in gens for k in g} | set(vec), key=repr)
    rows = [{j: g[key] for j, g in enumerate(gens) if key in g} for key in keys]
    try:
        sol = solve_rows(rows, len(gens), [vec.get(key, ZERO) for key in keys])
    except InconsistentSystem:
        return None
    return [sol.get(j, ZERO) for j in range(len(Li))]


@dataclass
class Factor:
    weight: Weight
    dim: int
    certified: bool
    offset: Weight = ()
    notes: List[str] = field(default_factory=list)


def _split_by_weight(TV: TranslatedVerma, vec: Vec) -> Dict[Weight, Vec]:
    out: Dict[Weight, Vec] = {}
    for key, c in vec.items():
        out.setdefault(TV.weight_of(key), {})[key] = c
    return out


def translate_verma_factors(hw: HighestWeightData, L: G0Module, rep: RepSpec, depth: int,
                            T: Optional[Translation] = None) -> Tuple[List[Factor], dict]:
    """Verma filtration of M(L) ⊛ V, extracted from the top weight down.

    Returns the factors (refined to composition factors of each L_i when
    the zero-weight part of U(g,e) acts on it by commuting matrices) and a
    certificate report.
    """
    W = hw.W
    T = T or Translation(W, rep)
    M = build_verma(hw, L, depth)
    TV = TranslatedVerma(M, T)
    roots = hw.roots
    basis = TV.basis()
    by_weight: Dict[Weight, List[tuple]] = {}
    for key in basis:
        by_weight.setdefault(TV.weight_of(key), []).append(key)
    # a weight is complete when no vector beyond the truncation can have it
    neg_heights = [roots.height(W.T.ge_weight[i]) for i in hw.neg]
    min_drop = min((-h for h in neg_heights), default=None)
    top = roots.height(L.weight) + max(roots.height(a) for a in rep.te_weights)
    if min_drop is None:
        complete = set(by_weight)
    else:
        threshold = top - (depth + 1) * min_drop
        complete = {w for w in by_weight if roots.height(w) > threshold}
    order = sorted(complete, key=lambda w: (-roots.height(w), w))

    U = _WeightSpan()
    factors: List[Factor] = []
    steps = []
    lam0 = L.weight
    while True:
        mu = next((w for w in order if U.dim(w) < len(by_weight[w])), None)
        if mu is None:
            break
        cert = {"weight": [format_rational(x) for x in mu], "maximal": True,
                "positive_kill": True, "character": True}
        # maximality: every higher weight is exhausted
        for w in order:
            if roots.height(w) > roots.height(mu) and U.dim(w) < len(by_weight[w]):
                cert["maximal"] = False
        # complement of U_mu in the weight space
        keys = by_weight[mu]
        Li: List[Vec] = []
        probe = U.copy()
        for key in keys:
            v = {key: ONE}
            if not probe.contains(mu, v):
                probe.add(mu, [v])
                Li.append(v)
        # positive generators send L_i into U
        for k in hw.pos:
            for v in Li:
                img = TV.act_vec(k, v)
                for w, part in _split_by_weight(TV, img).items():
                    if w not in complete or not U.contains(w, part):
                        cert["positive_kill"] = False
        # zero generators act on L_i modulo U: matrices for the refinement
        zmats = []
        for k in hw.zero:
            cols = []
            for v in Li:
                img = TV.act_vec(k, v)
                parts = _split_by_weight(TV, img)
                if set(parts) - {mu}:
                    cert["character"] = False
                col = _coords_mod(U, mu, Li, parts.get(mu, {}))
                if col is None:
                    cert["character"] = False
                    col = [ZERO] * len(Li)
                cols.append(col)
            zmats.append([[cols[j][i] for j in range(len(Li))] for i in range(len(Li))])
        commuting = all(mat_mul(A_, B_) == mat_mul(B_, A_) for A_ in zmats for B_ in zmats)
        # submodule generated by L_i: negative monomials applied to L_i
        newvecs: Dict[Weight, List[Vec]] = {}
        fac_char: Dict[Weight, int] = {}
        for a in M.negative_monomials(depth):
            w_shift = M.weight_of(a)
            target = tuple(m + s - l0 for m, s, l0 in zip(mu, w_shift, lam0))
            if target not in complete:
                continue
            fac_char[target] = fac_char.get(target, 0) + len(Li)
            for v in Li:
                cur = dict(v)
                for idx in range(len(hw.neg) - 1, -1, -1):
                    for _ in range(a[idx]):
                        cur = TV.act_vec(hw.neg[idx], cur)
                for w, part in _split_by_weight(TV, cur).items():
                    if w != target:
                        cert["character"] = False
                    newvecs.setdefault(w, []).append(part)
        before = {w: U.dim(w) for w in complete}
        for w, vecs in newvecs.items():
            if w in complete:
                U.add(w, vecs)
        for w in complete:
            if U.dim(w) - before[w] != fac_char.get(w, 0):
                cert["character"] = False
        certified = cert["maximal"] and cert["positive_kill"] and cert["character"]
        offset = tuple(m - l0 for m, l0 in zip(mu, lam0))
        cert["dim"] = len(Li)
        cert["commuting_zero_action"] = commuting
        steps.append(cert)
        if commuting:
            for _ in range(len(Li)):
                factors.append(Factor(mu, 1, certified, offset))
        else:
            factors.append(Factor(mu, len(Li), certified, offset,
                                  ["zero-weight action not commutative; factor not refined"]))
    # character identity on complete weights
    total: Dict[Weight, int] = {}
    for f in factors:
        ch = verma_character(hw, f.weight, f.dim, depth)
        for w, d in ch.items():
            if w in complete:
                total[w] = total.get(w, 0) + d
    target_ch = {w: len(by_weight[w]) for w in complete}
    report = {"steps": steps, "character_identity": total == target_ch,
              "complete_weights": len(complete), "depth": depth}
    return factors, report


def factors_to_json(W: WAlgebra, factors: List[Factor]) -> list:
    labels = [f"te{k}" for k in range(len(W.spec.te_basis))]
    return [{"weight": {lab: format_rational(x) for lab, x in zip(labels, f.weight)},
             "offset": {lab: format_rational(x) for lab, x in zip(labels, f.offset)},
             "dim": f.dim, "certified": f.certified} for f in factors]


def _in_cone(diff: Sequence[Fraction], positive: List[Weight], height_fn, budget: int = 64) -> bool:
    """diff is a nonnegative integer combination of positive roots (bounded search)."""
    if not any(diff):
        return True
    if height_fn(diff) <= 0 or budget == 0:
        return False
    for a in positive:
        rest = tuple(x - y for x, y in zip(diff, a))
        if _in_cone(rest, positive, height_fn, budget - 1):
            return True
    return False


def weight_finiteness_check(ch: Dict[Weight, int], tops: Sequence[Weight],
                            roots: RestrictedRootData) -> bool:
    """Finite weight spaces, and every weight lies below one of finitely many tops."""
    for w, d in ch.items():
        if not isinstance(d, int) or d < 0:
            return False
        if not any(_in_cone(tuple(t - x for t, x in zip(top, w)), roots.positive, roots.height)
                   for top in tops):
            return False
    return True
