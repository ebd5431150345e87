"""The finite W-algebra U(g,e) as twisted n-invariants in U(p~).

:class:`WAlgebra` bundles the Lie data, the tilde PBW algebra, the
projection Pr and the solved generators Theta(x_i), one per g^e basis
vector.  Products of generators are taken in the g^e basis order
(negative, zero, positive restricted weight), which is what the
highest-weight code relies on.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .liedata import (AlgebraSpec, GradingTables, LieDataError, grading_tables, is_zero,
                      spec_to_json, subalgebra_g0)
from .pbw import (Mono, PBWAlgebra, PBWElement, Projector, Terms, _add_into, dot_action_right,
                  enumerate_monomials, shift)
from .ratlin import InconsistentSystem, kernel_rows, reduce_against, rref_rows, solve_rows

ZERO = Fraction(0)
ONE = Fraction(1)

Poly = Dict[Tuple[int, ...], Fraction]


class NotInvariantError(ValueError):
    pass


class DegreeOverflow(RuntimeError):
    """An operation needed Kazhdan degree beyond the configured bound."""


class InternalConsistencyError(RuntimeError):
    pass


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(key, ZERO) + ca * cb
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


class WAlgebra:
    """U(g,e) with a fixed PBW generating set Theta(x_1), ..., Theta(x_r)."""

    def __init__(self, spec: AlgebraSpec, max_degree: int = 8,
                 tables: Optional[GradingTables] = None, build: bool = True):
        if max_degree < 0:
            raise ValueError("max_degree must be nonnegative")
        self.spec = spec
        self.T = tables or grading_tables(spec)
        self.D = max_degree
        self.A = PBWAlgebra(spec, self.T, "tilde")
        self.P = Projector(self.A)
        A, T = self.A, self.T
        n = spec.dim
        self.ptilde_pos = [p for p, g in enumerate(A.gens)
                           if g.origin == "ne" or spec.grading[g.index] >= 0]
        self.n_vecs = [tuple(Fraction(int(k == b)) for k in range(n)) for b in T.n_idx]
        self.ge = [tuple(v) for v in T.ge_basis]
        self.ge_kazhdan = [d + 2 for d in T.ge_degree]
        self.r_count = len(T.r_basis)
        self._dot_cache: Dict[Tuple[int, Mono], Terms] = {}
        self._space_cache: Dict[Tuple[int, tuple], tuple] = {}
        self._mono_poly_cache: Dict[Mono, Poly] = {}
        self._theta_mono_cache: Dict[Tuple[int, ...], PBWElement] = {}
        self._r_mono_cache: Dict[Tuple[int, ...], PBWElement] = {}
        self._g0 = None
        self._hwiso_sign: Optional[int] = None
        self._init_coordinates()
        self.theta: List[PBWElement] = []
        if build:
            self.theta = [self.lift_Theta(x) for x in self.ge]
            self._check_basis()

    # ---- coordinates on p~ = g^e ⊕ r ------------------------------------------
    def _init_coordinates(self):
        A, T, n = self.A, self.T, self.spec.dim
        m = len(self.ge)
        nv = m + self.r_count
        self.nvars = nv
        # ne generators: k = span of the d=1 r-vectors
        k_r = [(pos, x) for pos, (b, x) in enumerate(T.r_basis) if T.d[b] == 1]
        self.gen_forms: Dict[int, Poly] = {}
        for p, g in enumerate(A.gens):
            form: Dict[int, Fraction] = {}
            if g.origin == "ne":
                rows = []
                for comp in T.k_idx:
                    rows.append({c: x[comp] for c, (_, x) in enumerate(k_r) if x[comp]})
                rhs = [Fraction(int(comp == g.index)) for comp in T.k_idx]
                sol = solve_rows(rows, len(k_r), rhs)
                for c, a in sol.items():
                    form[m + k_r[c][0]] = a
            elif self.spec.grading[g.index] >= 0:
                gpart, rpart = T.p_coords[g.index]
                for k, a in gpart.items():
                    form[k] = a
                for k, a in rpart.items():
                    form[m + k] = a
            else:
                continue
            self.gen_forms[p] = {tuple(int(i == k) for i in range(nv)): a for k, a in form.items()}
        # r elements as PBW elements of U(p~)
        self.r_elems: List[PBWElement] = []
        for b, x in T.r_basis:
            self.r_elems.append(A.ne_elem(x) if T.d[b] == 1 else A.g_elem(x))

    def mono_poly(self, mono: Mono) -> Poly:
        """Image of a PBW monomial in S(p~) = S(g^e) ⊗ S(r), in (g^e, r) coordinates."""
        hit = self._mono_poly_cache.get(mono)
        if hit is not None:
            return hit
        out: Poly = {tuple([0] * self.nvars): ONE}
        for p, e in mono:
            form = self.gen_forms.get(p)
            if form is None:
                raise ValueError("monomial is not in U(p~)")
            for _ in range(e):
                out = _poly_mul(out, form)
        self._mono_poly_cache[mono] = out
        return out

    def zeta(self, u: PBWElement, degree: Optional[int] = None) -> Poly:
        """zeta(gr_degree u) in S(g^e) (exponents over the g^e basis)."""
        if degree is None:
            degree = self.A.degrees(u)["kazhdan"]
        m = len(self.ge)
        out: Poly = {}
        for mono, c in u.terms.items():
            if self.A.mono_kazhdan(mono) != degree:
                continue
            for ex, a in self.mono_poly(mono).items():
                if any(ex[m:]):
                    continue
                key = ex[:m]
                v = out.get(key, ZERO) + c * a
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out

    def ge_coordinates(self, x: Sequence) -> Dict[int, Fraction]:
        n = self.spec.dim
        rows = [{c: v[comp] for c, v in enumerate(self.ge) if v[comp]} for comp in range(n)]
        try:
            return solve_rows(rows, len(self.ge), list(x))
        except InconsistentSystem:
            raise LieDataError("vector is not in g^e") from None

    # ---- invariance ---------------------------------------------------------------
    def dot_terms(self, bpos: int, mono: Mono) -> Terms:
        key = (bpos, mono)
        hit = self._dot_cache.get(key)
        if hit is None:
            A = self.A
            x = self.n_vecs[bpos]
            X = A.g_elem(x) - A.ne_elem(x)
            u = A.monomial(mono)
            hit = self.P.pr(A.commutator(X, u)).terms
            self._dot_cache[key] = hit
        return hit

    def dot(self, x: Sequence, u: PBWElement) -> PBWElement:
        """Dot action of x ∈ n on U(p~)."""
        n_pos = {b: k for k, b in enumerate(self.T.n_idx)}
        out: Terms = {}
        for i, a in enumerate(x):
            if not a:
                continue
            if i not in n_pos:
                raise ValueError("the dot action is defined for x in n only")
            for mono, c in u.terms.items():
                _add_into(out, self.dot_terms(n_pos[i], mono), a * c)
        return PBWElement(self.A, out)

    def is_invariant(self, u: PBWElement) -> bool:
        if u.alg is not self.A:
            raise ValueError("element of a different algebra")
        if not self.P.in_ptilde(u):
            return False
        for k in range(len(self.T.n_idx)):
            out: Terms = {}
            for mono, c in u.terms.items():
                _add_into(out, self.dot_terms(k, mono), c)
            if out:
                return False
        return True

    def is_right_invariant(self, u: PBWElement) -> bool:
        if not self.P.in_ptilde(u):
            return False
        return all(dot_action_right(self.P, x, u).is_zero() for x in self.n_vecs)

    def invariant_space(self, max_kazhdan: int, te_weight: tuple):
        """(columns, RREF kernel rows, pivots) of the invariance system on F_K U(p~)_w."""
        key = (max_kazhdan, tuple(te_weight))
        hit = self._space_cache.get(key)
        if hit is not None:
            return hit
        cols = enumerate_monomials(self.A, self.ptilde_pos, max_kazhdan, tuple(te_weight))
        row_index: Dict[Tuple[int, Mono], int] = {}
        rows: List[Dict[int, Fraction]] = []
        for ci, mono in enumerate(cols):
            for k in range(len(self.T.n_idx)):
                for out_m, c in self.dot_terms(k, mono).items():
                    r = row_index.get((k, out_m))
                    if r is None:
                        r = len(rows)
                        row_index[(k, out_m)] = r
                        rows.append({})
                    rows[r][ci] = c
        ker = kernel_rows((rows, len(cols)))
        pivots = [min(r) for r in ker]
        res = (cols, ker, pivots)
        self._space_cache[key] = res
        return res

    # ---- theta and Theta -------------------------------------------------------------
    def theta_embed(self, x: Sequence) -> PBWElement:
        spec, A, T = self.spec, self.A, self.T
        if is_zero(x):
            return A.zero()
        if not is_zero(spec.bracket(spec.e, x)):
            raise LieDataError("theta is defined on g^e only")
        deg = spec.vector_degree(x)
        if deg is None:
            raise LieDataError("theta needs a homogeneous vector")
        u = A.g_elem(x)
        if deg != 0:
            return u
        acc = A.zero()
        for i, z in enumerate(T.z_basis):
            zs = T.z_star(i)
            acc = acc + A.ne_elem(spec.bracket(x, zs)) * A.ne_elem(z)
        return u + acc * Fraction(1, 2)

    def lift_Theta(self, x: Sequence) -> PBWElement:
        """Canonical invariant Theta(x) with zeta(gr_{j+2} Theta(x)) = x."""
        spec, A = self.spec, self.A
        if not is_zero(spec.bracket(spec.e, x)):
            raise LieDataError("Theta is defined on g^e only")
        j = spec.vector_degree(x)
        w = spec.vector_te_weight(x)
        if j is None or w is None:
            raise LieDataError("Theta needs a homogeneous weight vector")
        if j == 0:
            return self.theta_embed(x)
        K = j + 2
        if K > max(self.D, 2):
            raise DegreeOverflow(f"generator of Kazhdan degree {K} exceeds the bound {self.D}")
        cols, ker, _ = self.invariant_space(K, w)
        target = {tuple(int(i == k) for i in range(len(self.ge))): a
                  for k, a in self.ge_coordinates(x).items()}
        zetas = [self.zeta(PBWElement(A, {cols[c]: v for c, v in row.items()}), K) for row in ker]
        keys = sorted(set(target).union(*[set(z) for z in zetas]))
        rows = [{k: z[key] for k, z in enumerate(zetas) if key in z} for key in keys]
        rhs = [target.get(key, ZERO) for key in keys]
        try:
            coeffs = solve_rows(rows, len(ker), rhs)
        except InconsistentSystem:
            raise InternalConsistencyError("no invariant with the required leading term") from None
        vec: Dict[int, Fraction] = {}
        for k, c in coeffs.items():
            for col, v in ker[k].items():
                nv = vec.get(col, ZERO) + c * v
                if nv:
                    vec[col] = nv
                else:
                    vec.pop(col, None)
        # canonical representative modulo invariants of lower Kazhdan degree
        lcols, lker, _ = self.invariant_space(K - 1, w)
        index = {m: c for c, m in enumerate(cols)}
        lrows = [{index[lcols[c]]: v for c, v in r.items()} for r in lker]
        lpiv = [min(r) for r in lrows]
        vec = reduce_against(vec, lrows, lpiv)
        return PBWElement(A, {cols[c]: v for c, v in vec.items()})

    def _check_basis(self):
        for i, u in enumerate(self.theta):
            if not self.is_invariant(u):
                raise InternalConsistencyError(f"Theta({i}) is not invariant")

    # ---- Theta monomials ----------------------------------------------------------------
    def theta_kazhdan(self, b: Sequence[int]) -> int:
        return sum(e * k for e, k in zip(b, self.ge_kazhdan))

    def theta_weight(self, b: Sequence[int]) -> Tuple[Fraction, ...]:
        w = [ZERO] * len(self.spec.te_basis)
        for e, gw in zip(b, self.T.ge_weight):
            for k, a in enumerate(gw):
                w[k] += e * a
        return tuple(w)

    def theta_monomial(self, b: Sequence[int]) -> PBWElement:
        b = tuple(b)
        hit = self._theta_mono_cache.get(b)
        if hit is not None:
            return hit
        first = next((i for i, e in enumerate(b) if e), None)
        if first is None:
            res = self.A.one()
        else:
            rest = list(b)
            rest[first] -= 1
            res = self.theta[first] * self.theta_monomial(rest)
        self._theta_mono_cache[b] = res
        return res

    def r_monomial(self, a: Sequence[int]) -> PBWElement:
        a = tuple(a)
        hit = self._r_mono_cache.get(a)
        if hit is not None:
            return hit
        first = next((i for i, e in enumerate(a) if e), None)
        if first is None:
            res = self.A.one()
        else:
            rest = list(a)
            rest[first] -= 1
            res = self.r_elems[first] * self.r_monomial(rest)
        self._r_mono_cache[a] = res
        return res

    def theta_monomials(self, max_kazhdan: int) -> List[Tuple[int, ...]]:
        out: List[Tuple[int, ...]] = []

        def rec(i, budget, acc):
            if i == len(self.ge):
                out.append(tuple(acc))
                return
            k = self.ge_kazhdan[i]
            for e in range(budget // k + 1):
                rec(i + 1, budget - e * k, acc + [e])

        rec(0, max_kazhdan, [])
        return out

    def from_theta_coords(self, coords: Dict[Tuple[int, ...], Fraction]) -> PBWElement:
        out = self.A.zero()
        for b, c in coords.items():
            out = out + self.theta_monomial(b) * c
        return out

    # ---- graded dimensions ------------------------------------------------------------------
    def graded_dims(self, max_degree: Optional[int] = None) -> List[int]:
        D = self.D if max_degree is None else max_degree
        monos = self.theta_monomials(D)
        return [sum(1 for b in monos if self.theta_kazhdan(b) <= j) for j in range(D + 1)]

    def oracle_graded_dims(self, max_degree: Optional[int] = None) -> List[int]:
        """dim F_j U(g,e) from the full invariance system, weight block by weight block."""
        D = self.D if max_degree is None else max_degree
        out = []
        for j in range(D + 1):
            monos = enumerate_monomials(self.A, self.ptilde_pos, j)
            weights = sorted({self.A.mono_te_weight(m) for m in monos})
            out.append(sum(len(self.invariant_space(j, w)[1]) for w in weights))
        return out

    # ---- decomposition of Q~ ---------------------------------------------------------------
    def _split_top(self, q: PBWElement, K: int) -> Poly:
        out: Poly = {}
        for mono, c in q.terms.items():
            if self.A.mono_kazhdan(mono) != K:
                continue
            for ex, a in self.mono_poly(mono).items():
                v = out.get(ex, ZERO) + c * a
                if v:
                    out[ex] = v
                else:
                    out.pop(ex, None)
        return out

    def free_decomposition(self, q: PBWElement, only_invariant: bool = False):
        """Coefficients w_a with q = sum_a x^a w_a, w_a in U(g,e), as Theta-coordinates.

        Greedy leading-term subtraction: at the top Kazhdan degree, the
        lowest r-degree part of gr q is read off in S(r) ⊗ S(g^e) and the
        matching x^a Theta^b terms are subtracted.
        """
        if q.alg is not self.A:
            raise ValueError("element of a different algebra")
        if not self.P.in_ptilde(q):
            raise ValueError("element is not in U(p~)")
        m = len(self.ge)
        result: Dict[Tuple[int, ...], Dict[Tuple[int, ...], Fraction]] = {}
        q = q.copy()
        guard = 0
        while q.terms:
            guard += 1
            if guard > 100000:
                raise InternalConsistencyError("free decomposition does not terminate")
            K = self.A.degrees(q)["kazhdan"]
            if K > self.D:
                raise DegreeOverflow(f"Kazhdan degree {K} exceeds the bound {self.D}")
            top = self._split_top(q, K)
            if not top:
                raise InternalConsistencyError("top degree part vanished in S(p~)")
            kmin = min(sum(ex[m:]) for ex in top)
            if only_invariant and kmin > 0:
                raise NotInvariantError("element is not in U(g,e)")
            sub = self.A.zero()
            for ex, c in top.items():
                if sum(ex[m:]) != kmin:
                    continue
                a, b = ex[m:], ex[:m]
                bucket = result.setdefault(a, {})
                bucket[b] = bucket.get(b, ZERO) + c
                sub = sub + self.r_monomial(a) * self.theta_monomial(b) * c
            q = q - sub
        return {a: {b: c for b, c in d.items() if c} for a, d in result.items()}

    def chi_free(self, q: PBWElement) -> PBWElement:
        """chi: Q~ -> U(g,e), the coefficient of the empty r-monomial."""
        dec = self.free_decomposition(q)
        zero = tuple([0] * self.r_count)
        return self.from_theta_coords(dec.get(zero, {}))

    def express_in_theta(self, u: PBWElement) -> Dict[Tuple[int, ...], Fraction]:
        if not self.is_invariant(u):
            raise NotInvariantError("element is not in U(g,e)")
        dec = self.free_decomposition(u, only_invariant=True)
        zero = tuple([0] * self.r_count)
        if set(dec) - {zero}:
            raise NotInvariantError("element is not in U(g,e)")
        return dec.get(zero, {})

    # ---- restricted weights -------------------------------------------------------------------
    def restricted_components(self, u: PBWElement) -> Dict[Tuple[Fraction, ...], PBWElement]:
        coords = self.express_in_theta(u)
        groups: Dict[Tuple[Fraction, ...], Dict] = {}
        for b, c in coords.items():
            groups.setdefault(self.theta_weight(b), {})[b] = c
        return {w: self.from_theta_coords(d) for w, d in sorted(groups.items())}

    def is_positive_mono(self, b: Sequence[int]) -> bool:
        return any(e and self.T.ge_class[i] > 0 for i, e in enumerate(b))

    def sharp_membership(self, u: PBWElement) -> bool:
        coords = self.express_in_theta(u)
        return all(self.is_positive_mono(b) for b in coords)

    # ---- the map to U(g0,e) ---------------------------------------------------------------------
    @property
    def g0(self) -> "WAlgebra":
        if self._g0 is None:
            g0spec, idx = subalgebra_g0(self.spec, self.T)
            self._g0_idx = idx
            self._g0 = WAlgebra(g0spec, max_degree=self.D)
            self._worder = PBWAlgebra(self.spec, self.T, "tilde", sort_key=self._weight_key)
        return self._g0

    def _weight_key(self, g) -> tuple:
        cls = self.T.restricted_class(g.te_weight)
        kind = 0 if g.origin == "ne" else (1 if self.spec.grading[g.index] >= 0 else 2)
        return (cls, kind, self.spec.grading[g.index], g.index)

    def pi(self, u: PBWElement) -> PBWElement:
        """Projection U(p~)_0 -> U(p0) along the part with a positive factor on the right."""
        g0 = self.g0
        v = self._worder.convert(u)
        pos0 = {i: k for k, i in enumerate(self._g0_idx)}
        out: Terms = {}
        for mono, c in v.terms.items():
            gens = [v.alg.gens[p] for p, _ in mono]
            if any(g.origin != "g" or g.index not in pos0 or self.spec.grading[g.index] < 0
                   for g in gens):
                if any(self.T.restricted_class(g.te_weight) == 0 and g.origin == "ne" for g in gens):
                    raise InternalConsistencyError("zero-weight ne generator with an even g0 grading")
                continue
            word = [g0.A.pos[("g", pos0[g.index])] for g, (_, e) in zip(gens, mono) for _ in range(e)]
            _add_into(out, g0.A.word(word).terms, c)
        return PBWElement(g0.A, out)

    def gamma_on_g0(self) -> Dict[int, Fraction]:
        self.g0
        pos0 = {i: k for k, i in enumerate(self._g0_idx)}
        return {pos0[i]: v for i, v in self.T.gamma.items() if i in pos0}

    def hwiso_sign(self) -> int:
        """Sign s such that S_{s gamma} o pi lands in U(g0,e), chosen by testing invariance."""
        if self._hwiso_sign is not None:
            return self._hwiso_sign
        g0 = self.g0
        gam = self.gamma_on_g0()
        tests = [self.theta_monomial(tuple(int(k == i) for k in range(len(self.ge))))
                 for i in range(len(self.ge)) if self.T.ge_class[i] == 0]
        neg = [i for i in range(len(self.ge)) if self.T.ge_class[i] < 0]
        pos = [i for i in range(len(self.ge)) if self.T.ge_class[i] > 0]
        for i in neg:
            for j in pos:
                b = [0] * len(self.ge)
                b[i] += 1
                b[j] += 1
                if self.theta_weight(b) == tuple(ZERO for _ in self.spec.te_basis) \
                        and self.theta_kazhdan(b) <= self.D:
                    tests.append(self.theta_monomial(b))
        good = []
        for s in (1, -1):
            if all(g0.is_invariant(shift(self.pi(t), gam, s)) for t in tests):
                good.append(s)
        if not good:
            raise InternalConsistencyError("neither gamma shift lands in U(g0,e)")
        self._hwiso_sign = good[0]
        return good[0]

    def project_to_g0(self, u: PBWElement) -> PBWElement:
        zero = tuple(ZERO for _ in self.spec.te_basis)
        for mono in u.terms:
            if self.A.mono_te_weight(mono) != zero:
                raise ValueError("project_to_g0 needs restricted weight 0")
        return shift(self.pi(u), self.gamma_on_g0(), self.hwiso_sign())

    # ---- serialisation --------------------------------------------------------------------------
    def content_hash(self) -> str:
        blob = json.dumps({"spec": spec_to_json(self.spec), "D": self.D}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:24]

    def to_json(self) -> dict:
        return {"schema": 1, "hash": self.content_hash(), "max_degree": self.D,
                "generators": self.A.generator_table(),
                "theta": [self.A.to_json(u) for u in self.theta]}

    def load_theta(self, data: dict) -> None:
        if data.get("hash") != self.content_hash():
            raise ValueError("cached basis belongs to a different algebra")
        self.theta = [self.A.from_json(rows) for rows in data["theta"]]
        self._theta_mono_cache.clear()
        self._check_basis()


# ---------------------------------------------------------------------------
# functional wrappers
# ---------------------------------------------------------------------------

def theta_embed(W: WAlgebra, x: Sequence) -> PBWElement:
    return W.theta_embed(x)


def is_invariant(W: WAlgebra, u: PBWElement) -> bool:
    return W.is_invariant(u)


def lift_Theta(W: WAlgebra, x: Sequence) -> PBWElement:
    return W.lift_Theta(x)


def walg_graded_dims(W: WAlgebra, max_degree: Optional[int] = None) -> List[int]:
    return W.graded_dims(max_degree)


def express_in_theta(W: WAlgebra, u: PBWElement) -> Dict[Tuple[int, ...], Fraction]:
    return W.express_in_theta(u)


def chi_free(W: WAlgebra, q: PBWElement) -> PBWElement:
    return W.chi_free(q)


def restricted_components(W: WAlgebra, u: PBWElement):
    return W.restricted_components(u)


def sharp_membership(W: WAlgebra, u: PBWElement) -> bool:
    return W.sharp_membership(u)


def project_to_g0(W: WAlgebra, u: PBWElement) -> PBWElement:
    return W.project_to_g0(u)
