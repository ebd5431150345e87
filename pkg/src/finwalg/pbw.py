"""Normal ordering in enveloping algebras of nonlinear Lie superalgebras.

Three flavours are built from the same Lie data:

* ``g``      -- U(g) itself;
* ``tilde``  -- U(g~) with g~ = g ⊕ k^ne, where [x^ne, y^ne] = <x|y>;
* ``hat``    -- U(g^) with g^ = g~ ⊕ n* ⊕ n^ch, odd, [f, x^ch] = <f, x>.

A monomial is a tuple of ``(position, exponent)`` pairs sorted by
position in the generator order of its algebra; an element is a sparse
dict from monomials to Fractions wrapped in :class:`PBWElement`.

The straightening primitive is left multiplication of a monomial by a
single generator, memoised per algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .liedata import AlgebraSpec, GradingTables, LieDataError
from .ratlin import format_rational, parse_rational

Mono = Tuple[Tuple[int, int], ...]
Terms = Dict[Mono, Fraction]

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class Generator:
    label: str
    origin: str          # "g", "ne", "star", "ch"
    index: int           # g-basis index (for ne/star/ch: index of the underlying basis vector)
    odd: bool
    charge: int
    kazhdan: int
    loop: int
    t_weight: Tuple[Fraction, ...]
    te_weight: Tuple[Fraction, ...]

    @property
    def key(self) -> Tuple[str, int]:
        return (self.origin, self.index)


def _add_into(acc: Terms, terms: Terms, scale: Fraction = ONE) -> None:
    for m, c in terms.items():
        v = acc.get(m, ZERO) + scale * c
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


class PBWElement:
    """Sparse linear combination of normal-ordered monomials."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: "PBWAlgebra", terms: Optional[Terms] = None):
        self.alg = alg
        self.terms: Terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "PBWElement":
        if isinstance(other, PBWElement):
            if other.alg is not self.alg:
                raise ValueError("elements of different algebras")
            return other
        return self.alg.scalar(parse_rational(other) if not isinstance(other, Fraction) else other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        _add_into(t, other.terms)
        return PBWElement(self.alg, t)

    __radd__ = __add__

    def __neg__(self):
        return PBWElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, PBWElement):
            return self.alg.multiply(self, other)
        c = parse_rational(other) if not isinstance(other, Fraction) else other
        if c == 0:
            return PBWElement(self.alg)
        return PBWElement(self.alg, {m: v * c for m, v in self.terms.items()})

    def __rmul__(self, other):
        c = parse_rational(other) if not isinstance(other, Fraction) else other
        return self * c

    def __truediv__(self, other):
        return self * (1 / Fraction(other))

    def __pow__(self, k: int):
        out = self.alg.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, PBWElement):
            return self.alg is other.alg and self.terms == other.terms
        try:
            return self.terms == self._coerce(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def constant(self) -> Fraction:
        return self.terms.get((), ZERO)

    def __repr__(self):
        return self.alg.format(self)

    __str__ = __repr__

    def copy(self) -> "PBWElement":
        return PBWElement(self.alg, dict(self.terms))


class PBWAlgebra:
    """Enveloping algebra with a fixed generator order."""

    def __init__(self, spec: AlgebraSpec, tables: GradingTables, flavor: str = "tilde",
                 order: str = "standard", sort_key: Optional[Callable[[Generator], tuple]] = None):
        if flavor not in ("g", "tilde", "hat"):
            raise ValueError(f"unknown flavor {flavor!r}")
        self.spec = spec
        self.tables = tables
        self.flavor = flavor
        self.order = order
        gens = self._make_generators()
        if sort_key is not None:
            gens.sort(key=sort_key)
            self.order = "custom"
        elif order != "standard":
            rank = {o: r for r, o in enumerate(_ORDERS[order])}
            base = {g.key: i for i, g in enumerate(gens)}
            gens.sort(key=lambda g: (rank[g.origin if g.origin != "g" else _g_kind(g, tables)], base[g.key]))
        self.gens: List[Generator] = gens
        self.pos: Dict[Tuple[str, int], int] = {g.key: i for i, g in enumerate(gens)}
        self.odd = [g.odd for g in gens]
        self._bracket: Dict[Tuple[int, int], Tuple[Fraction, Dict[int, Fraction]]] = {}
        self._build_brackets()
        self._gm_cache: Dict[Tuple[int, Mono], Terms] = {}
        self._mm_cache: Dict[Tuple[Mono, Mono], Terms] = {}

    # ---- construction -----------------------------------------------------
    def _make_generators(self) -> List[Generator]:
        spec, T = self.spec, self.tables
        zero_te = tuple(Fraction(0) for _ in spec.te_basis)
        gens: List[Generator] = []
        neg = lambda w: tuple(-a for a in w)
        if self.flavor == "hat":
            for b in T.n_idx:
                gens.append(Generator(spec.labels[b] + "^ch", "ch", b, True, -1, -T.d[b], -T.d[b],
                                      spec.t_weight(b), spec.te_weight(b)))
        if self.flavor in ("tilde", "hat"):
            for b in T.k_idx:
                gens.append(Generator(spec.labels[b] + "^ne", "ne", b, False, 0, 1, 0,
                                      spec.t_weight(b), spec.te_weight(b)))
        for i in T.p_idx + T.n_idx:
            gens.append(Generator(spec.labels[i], "g", i, False, 0, spec.grading[i] + 2,
                                  spec.grading[i], spec.t_weight(i), spec.te_weight(i)))
        if self.flavor == "hat":
            for b in T.n_idx:
                gens.append(Generator("f[" + spec.labels[b] + "]", "star", b, True, 1, T.d[b], T.d[b],
                                      neg(spec.t_weight(b)), neg(spec.te_weight(b))))
        return gens

    def _raw_bracket(self, a: Generator, b: Generator) -> Tuple[Fraction, Dict[int, Fraction]]:
        spec, T = self.spec, self.tables
        if a.origin == "g" and b.origin == "g":
            row = spec.struct.get((a.index, b.index), {})
            lin = {}
            for k, c in row.items():
                p = self.pos.get(("g", k))
                if p is None:
                    raise LieDataError("bracket leaves the algebra")
                lin[p] = c
            return ZERO, lin
        if a.origin == "ne" and b.origin == "ne":
            n = spec.dim
            x = tuple(Fraction(int(k == a.index)) for k in range(n))
            y = tuple(Fraction(int(k == b.index)) for k in range(n))
            return T.omega(x, y), {}
        if {a.origin, b.origin} == {"star", "ch"}:
            return (ONE if a.index == b.index else ZERO), {}
        return ZERO, {}

    def _build_brackets(self):
        m = len(self.gens)
        for a in range(m):
            for b in range(a + 1):
                if a == b and not self.odd[a]:
                    continue
                sc, lin = self._raw_bracket(self.gens[a], self.gens[b])
                if sc or lin:
                    self._bracket[(a, b)] = (sc, lin)

    def bracket_gens(self, a: int, b: int) -> Tuple[Fraction, Dict[int, Fraction]]:
        """[g_a, g_b] for positions a >= b."""
        return self._bracket.get((a, b), (ZERO, {}))

    # ---- element constructors ---------------------------------------------
    def zero(self) -> PBWElement:
        return PBWElement(self)

    def one(self) -> PBWElement:
        return PBWElement(self, {(): ONE})

    def scalar(self, c) -> PBWElement:
        return PBWElement(self, {(): Fraction(c)} if c else {})

    def gen(self, origin: str, index: int) -> PBWElement:
        return PBWElement(self, {((self.pos[(origin, index)], 1),): ONE})

    def gen_at(self, p: int) -> PBWElement:
        return PBWElement(self, {((p, 1),): ONE})

    def g_elem(self, v: Sequence) -> PBWElement:
        return PBWElement(self, {((self.pos[("g", i)], 1),): Fraction(a) for i, a in enumerate(v) if a})

    def ne_elem(self, v: Sequence) -> PBWElement:
        """x^ne: the g(-1) component of x, as an element of k^ne."""
        terms = {}
        for i in self.tables.k_idx:
            if v[i]:
                terms[((self.pos[("ne", i)], 1),)] = Fraction(v[i])
        return PBWElement(self, terms)

    def ch_elem(self, v: Sequence) -> PBWElement:
        """x^ch: the n component of x, as an element of n^ch."""
        terms = {}
        for i in self.tables.n_idx:
            if v[i]:
                terms[((self.pos[("ch", i)], 1),)] = Fraction(v[i])
        return PBWElement(self, terms)

    def star(self, b: int) -> PBWElement:
        return self.gen("star", b)

    def monomial(self, mono: Mono) -> PBWElement:
        return PBWElement(self, {mono: ONE})

    def from_exponents(self, exps: Sequence[int]) -> Mono:
        return tuple((p, e) for p, e in enumerate(exps) if e)

    def exponents(self, mono: Mono) -> List[int]:
        out = [0] * len(self.gens)
        for p, e in mono:
            out[p] = e
        return out

    # ---- straightening -------------------------------------------------------
    def _gen_mono(self, a: int, mono: Mono) -> Terms:
        key = (a, mono)
        hit = self._gm_cache.get(key)
        if hit is not None:
            return hit
        if not mono or a < mono[0][0]:
            res = {((a, 1),) + mono: ONE}
        elif a == mono[0][0]:
            k = mono[0][1]
            if self.odd[a]:
                rest = mono[1:]
                sc, lin = self.bracket_gens(a, a)
                res = {}
                if sc:
                    _add_into(res, {rest: sc / 2})
                for g, c in lin.items():
                    _add_into(res, self._gen_mono(g, rest), c / 2)
            else:
                res = {((a, k + 1),) + mono[1:]: ONE}
        else:
            b, k = mono[0]
            rest1 = (((b, k - 1),) + mono[1:]) if k > 1 else mono[1:]
            sign = -1 if (self.odd[a] and self.odd[b]) else 1
            res = {}
            inner = self._gen_mono(a, rest1)
            for m, c in inner.items():
                _add_into(res, self._gen_mono(b, m), sign * c)
            sc, lin = self.bracket_gens(a, b)
            if sc:
                _add_into(res, {rest1: sc})
            for g, c in lin.items():
                _add_into(res, self._gen_mono(g, rest1), c)
        self._gm_cache[key] = res
        return res

    def gen_times(self, a: int, terms: Terms) -> Terms:
        out: Terms = {}
        for m, c in terms.items():
            _add_into(out, self._gen_mono(a, m), c)
        return out

    def mono_times_mono(self, m1: Mono, m2: Mono) -> Terms:
        if not m1:
            return {m2: ONE}
        if not m2:
            return {m1: ONE}
        last, first = m1[-1][0], m2[0][0]
        if last < first:
            return {m1 + m2: ONE}
        if last == first and not self.odd[last]:
            return {m1[:-1] + ((last, m1[-1][1] + m2[0][1]),) + m2[1:]: ONE}
        key = (m1, m2)
        hit = self._mm_cache.get(key)
        if hit is not None:
            return hit
        res: Terms = {m2: ONE}
        for p, e in reversed(m1):
            for _ in range(e):
                res = self.gen_times(p, res)
        self._mm_cache[key] = res
        return res

    def multiply_terms(self, a: Terms, b: Terms) -> Terms:
        out: Terms = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                _add_into(out, self.mono_times_mono(m1, m2), c1 * c2)
        return out

    def multiply(self, a: PBWElement, b: PBWElement) -> PBWElement:
        return PBWElement(self, self.multiply_terms(a.terms, b.terms))

    def word(self, positions: Iterable[int]) -> PBWElement:
        """Product of generators in the given (arbitrary) order."""
        positions = list(positions)
        res: Terms = {(): ONE}
        for p in reversed(positions):
            res = self.gen_times(p, res)
        return PBWElement(self, res)

    def parity(self, mono: Mono) -> int:
        return sum(e for p, e in mono if self.odd[p]) % 2

    def supercommutator(self, a: PBWElement, b: PBWElement) -> PBWElement:
        out = self.multiply(a, b)
        for ma, ca in a.terms.items():
            pa = self.parity(ma)
            for mb, cb in b.terms.items():
                sign = -1 if (pa and self.parity(mb)) else 1
                _add_into(out.terms, self.mono_times_mono(mb, ma), -sign * ca * cb)
        return PBWElement(self, out.terms)

    def commutator(self, a: PBWElement, b: PBWElement) -> PBWElement:
        return self.multiply(a, b) - self.multiply(b, a)

    def renormalize(self, u: PBWElement) -> PBWElement:
        """Re-straighten every monomial as a word; identity on normal-ordered input."""
        out: Terms = {}
        for m, c in u.terms.items():
            w = [p for p, e in m for _ in range(e)]
            _add_into(out, self.word(w).terms, c)
        return PBWElement(self, out)

    # ---- conversion between generator orders ----------------------------------
    def convert(self, u: PBWElement) -> PBWElement:
        """Rewrite an element of a sibling algebra (same generators, other order)."""
        src = u.alg
        if src is self:
            return u
        pmap = [self.pos[g.key] for g in src.gens]
        out: Terms = {}
        for m, c in u.terms.items():
            mapped = [(pmap[p], e) for p, e in m]
            if all(mapped[i][0] < mapped[i + 1][0] for i in range(len(mapped) - 1)):
                _add_into(out, {tuple(mapped): ONE}, c)
            else:
                w = [p for p, e in mapped for _ in range(e)]
                _add_into(out, self.word(w).terms, c)
        return PBWElement(self, out)

    # ---- degrees ------------------------------------------------------------------
    def mono_kazhdan(self, m: Mono) -> int:
        return sum(self.gens[p].kazhdan * e for p, e in m)

    def mono_loop(self, m: Mono) -> int:
        return sum(self.gens[p].loop * e for p, e in m)

    def mono_charge(self, m: Mono) -> int:
        return sum(self.gens[p].charge * e for p, e in m)

    def mono_te_weight(self, m: Mono) -> Tuple[Fraction, ...]:
        w = [Fraction(0)] * len(self.spec.te_basis)
        for p, e in m:
            for k, a in enumerate(self.gens[p].te_weight):
                w[k] += e * a
        return tuple(w)

    def mono_t_weight(self, m: Mono) -> Tuple[Fraction, ...]:
        w = [Fraction(0)] * len(self.spec.t_basis)
        for p, e in m:
            for k, a in enumerate(self.gens[p].t_weight):
                w[k] += e * a
        return tuple(w)

    def degrees(self, u: PBWElement) -> dict:
        """Filtration degrees (max over terms) and homogeneous gradings (or None)."""
        if not u.terms:
            return {"kazhdan": 0, "loop": 0, "charge": 0,
                    "te_weight": tuple(Fraction(0) for _ in self.spec.te_basis)}
        charges = {self.mono_charge(m) for m in u.terms}
        weights = {self.mono_te_weight(m) for m in u.terms}
        return {
            "kazhdan": max(self.mono_kazhdan(m) for m in u.terms),
            "loop": max(self.mono_loop(m) for m in u.terms),
            "charge": charges.pop() if len(charges) == 1 else None,
            "te_weight": weights.pop() if len(weights) == 1 else None,
        }

    def graded_part(self, u: PBWElement, degree: int, kind: str = "kazhdan") -> PBWElement:
        f = self.mono_kazhdan if kind == "kazhdan" else self.mono_loop
        return PBWElement(self, {m: c for m, c in u.terms.items() if f(m) == degree})

    # ---- formatting / serialisation ---------------------------------------------------
    def format_mono(self, m: Mono) -> str:
        if not m:
            return "1"
        parts = []
        for p, e in m:
            lab = self.gens[p].label
            parts.append(lab if e == 1 else f"{lab}^{e}")
        return "*".join(parts)

    def format(self, u: PBWElement) -> str:
        if not u.terms:
            return "0"
        items = sorted(u.terms.items(), key=lambda mc: (-self.mono_kazhdan(mc[0]), mc[0]))
        out = []
        for m, c in items:
            cs = format_rational(c)
            if not m:
                out.append(cs)
            elif c == 1:
                out.append(self.format_mono(m))
            elif c == -1:
                out.append("-" + self.format_mono(m))
            else:
                out.append(f"{cs}*{self.format_mono(m)}")
        return " + ".join(out).replace("+ -", "- ")

    def to_json(self, u: PBWElement) -> list:
        rows = []
        for m, c in sorted(u.terms.items(), key=lambda mc: self.exponents(mc[0])):
            rows.append({"mono": self.exponents(m), "coef": format_rational(c)})
        return rows

    def from_json(self, rows: list) -> PBWElement:
        terms: Terms = {}
        for r in rows:
            exps = r["mono"]
            if len(exps) != len(self.gens):
                raise ValueError("monomial length does not match the generator table")
            for p, e in enumerate(exps):
                if e < 0 or (self.odd[p] and e > 1):
                    raise ValueError("invalid exponent")
            _add_into(terms, {self.from_exponents(exps): parse_rational(r["coef"])})
        return PBWElement(self, terms)

    def generator_table(self) -> List[dict]:
        return [{"label": g.label, "origin": g.origin, "parity": int(g.odd), "charge": g.charge,
                 "kazhdan": g.kazhdan, "loop": g.loop,
                 "te_weight": [format_rational(a) for a in g.te_weight]} for g in self.gens]


_ORDERS = {
    # n first: leading n-factors, for the right-handed projection
    "n_first": ["n", "ch", "ne", "p", "star"],
    # odd creation operators last: used by the projection q of the BRST complex
    "q": ["ne", "p", "star", "n", "ch"],
}


def _g_kind(g: Generator, tables: GradingTables) -> str:
    return "n" if tables.spec.grading[g.index] < 0 else "p"


# ---------------------------------------------------------------------------
# projections Pr and Pr'
# ---------------------------------------------------------------------------

class Projector:
    """Pr: U(g~) -> U(p~) along the left ideal generated by b - b^ne - chi(b),
    and Pr' along the corresponding right ideal."""

    def __init__(self, alg: PBWAlgebra):
        if alg.flavor != "tilde" or alg.order != "standard":
            raise ValueError("Pr needs the tilde flavour in standard order")
        self.alg = alg
        self.T = alg.tables
        self.nfirst = PBWAlgebra(alg.spec, alg.tables, "tilde", order="n_first")
        self._phi_cache: Dict[Tuple[Mono, bool], Terms] = {}
        self._pr_cache: Dict[Mono, Terms] = {}
        self._prr_cache: Dict[Mono, Terms] = {}

    def _nfactor(self, alg: PBWAlgebra, N: Mono, reverse: bool) -> Terms:
        """Image of an n-monomial in U(k^ne): product of (b^ne + chi(b))."""
        key = (N, reverse)
        hit = self._phi_cache.get(key)
        if hit is not None:
            return hit
        coef = ONE
        word: List[int] = []
        for p, e in N:
            b = alg.gens[p].index
            d = self.T.d[b]
            if d == 1:
                word.extend([alg.pos[("ne", b)]] * e)
            elif d == 2 and self.T.chi[b]:
                coef *= self.T.chi[b] ** e
            else:
                coef = ZERO
                break
        if coef == 0:
            res: Terms = {}
        else:
            if reverse:
                word = word[::-1]
            res = {m: c * coef for m, c in alg.word(word).terms.items()}
        self._phi_cache[key] = res
        return res

    def _split(self, alg: PBWAlgebra, m: Mono):
        K, P, N = [], [], []
        for p, e in m:
            g = alg.gens[p]
            if g.origin == "ne":
                K.append((p, e))
            elif g.origin == "g" and alg.spec.grading[g.index] >= 0:
                P.append((p, e))
            elif g.origin == "g":
                N.append((p, e))
            else:
                raise ValueError("Pr applies to the tilde flavour only")
        return tuple(K), tuple(P), tuple(N)

    def _pr_mono(self, m: Mono) -> Terms:
        hit = self._pr_cache.get(m)
        if hit is not None:
            return hit
        alg = self.alg
        K, P, N = self._split(alg, m)
        if not N:
            res = {m: ONE}
        else:
            phi = self._nfactor(alg, N, reverse=True)
            res = {}
            for mk, c in phi.items():
                for mm, c2 in alg.mono_times_mono(K, mk).items():
                    _add_into(res, {mm + P: c2}, c)
        self._pr_cache[m] = res
        return res

    def pr(self, u: PBWElement) -> PBWElement:
        if u.alg is not self.alg:
            raise ValueError("element of a different algebra")
        out: Terms = {}
        for m, c in u.terms.items():
            _add_into(out, self._pr_mono(m), c)
        return PBWElement(self.alg, out)

    def _prr_mono(self, m: Mono) -> Terms:
        hit = self._prr_cache.get(m)
        if hit is not None:
            return hit
        alg = self.nfirst
        K, P, N = self._split(alg, m)
        # leftmost n factor is replaced first, so the ne images come out reversed
        phi = self._nfactor(alg, N, reverse=True) if N else {(): ONE}
        res: Terms = {}
        for mk, c in phi.items():
            for mm, c2 in alg.mono_times_mono(mk, K).items():
                _add_into(res, {mm + P: c2}, c)
        self._prr_cache[m] = res
        return res

    def pr_right(self, u: PBWElement) -> PBWElement:
        """Pr': projection along the right ideal generated by b - b^ne - chi(b)."""
        v = self.nfirst.convert(u)
        out: Terms = {}
        for m, c in v.terms.items():
            _add_into(out, self._prr_mono(m), c)
        return self.alg.convert(PBWElement(self.nfirst, out))

    def in_ptilde(self, u: PBWElement) -> bool:
        for m in u.terms:
            for p, _ in m:
                g = self.alg.gens[p]
                if g.origin != "ne" and not (g.origin == "g" and self.alg.spec.grading[g.index] >= 0):
                    return False
        return True


# ---------------------------------------------------------------------------
# coproduct and shifts
# ---------------------------------------------------------------------------

TensorTerms = Dict[Tuple[Mono, Mono], Fraction]


class Coproduct:
    """Delta~ : U(g~) -> U(g~) ⊗ U(g) (and Delta^ on U(g^)).

    g generators are primitive; ne, n* and n^ch generators x go to x ⊗ 1.
    The second leg always lies in the even algebra U(g), so no signs occur.
    """

    def __init__(self, alg: PBWAlgebra, galg: Optional[PBWAlgebra] = None):
        self.alg = alg
        self.galg = galg or PBWAlgebra(alg.spec, alg.tables, "g")
        self._cache: Dict[Mono, TensorTerms] = {}

    def _mul(self, a: TensorTerms, b: TensorTerms) -> TensorTerms:
        out: TensorTerms = {}
        for (a1, a2), c in a.items():
            for (b1, b2), d in b.items():
                left = self.alg.mono_times_mono(a1, b1)
                right = self.galg.mono_times_mono(a2, b2)
                for m1, x in left.items():
                    for m2, y in right.items():
                        key = (m1, m2)
                        v = out.get(key, ZERO) + c * d * x * y
                        if v:
                            out[key] = v
                        else:
                            out.pop(key, None)
        return out

    def gen(self, p: int) -> TensorTerms:
        g = self.alg.gens[p]
        t: TensorTerms = {(((p, 1),), ()): ONE}
        if g.origin == "g":
            t[((), ((self.galg.pos[g.key], 1),))] = ONE
        return t

    def mono(self, m: Mono) -> TensorTerms:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        res: TensorTerms = {((), ()): ONE}
        for p, e in reversed(m):
            for _ in range(e):
                res = self._mul(self.gen(p), res)
        self._cache[m] = res
        return res

    def __call__(self, u: PBWElement) -> TensorTerms:
        out: TensorTerms = {}
        for m, c in u.terms.items():
            for key, v in self.mono(m).items():
                nv = out.get(key, ZERO) + c * v
                if nv:
                    out[key] = nv
                else:
                    out.pop(key, None)
        return out

    def multiply(self, a: TensorTerms, b: TensorTerms) -> TensorTerms:
        return self._mul(a, b)


def check_character(spec: AlgebraSpec, lam: Dict[int, Fraction], domain: Sequence[int]) -> bool:
    """lam (values on basis vectors of a subalgebra) vanishes on brackets."""
    dom = set(domain)
    if any(i not in dom for i in lam):
        return False
    for i in domain:
        for j in domain:
            row = spec.struct.get((i, j), {})
            if any(k not in dom for k in row):
                return False
            if sum((c * lam.get(k, ZERO) for k, c in row.items()), ZERO):
                return False
    return True


def shift(u: PBWElement, lam: Dict[int, Fraction], sign: int = 1,
          domain: Optional[Sequence[int]] = None) -> PBWElement:
    """S_{sign*lam}: x -> x + sign*lam(x) on g-generators in the domain.

    ``lam`` maps g-basis indices to values; ne, n* and n^ch generators are
    fixed.  Since the substitution is an automorphism, normal order is kept
    and each power expands binomially.
    """
    alg = u.alg
    if domain is not None and not check_character(alg.spec, lam, domain):
        raise ValueError("the functional is not a character of its domain")
    shifts = {}
    for p, g in enumerate(alg.gens):
        if g.origin == "g" and lam.get(g.index):
            shifts[p] = sign * lam[g.index]
    if not shifts:
        return u.copy()
    out: Terms = {}
    for m, c in u.terms.items():
        partial: Terms = {(): c}
        for p, e in m:
            s = shifts.get(p)
            nxt: Terms = {}
            if s is None:
                for mm, cc in partial.items():
                    nxt[mm + ((p, e),)] = cc
            else:
                for mm, cc in partial.items():
                    for k in range(e + 1):
                        coef = cc * comb(e, k) * s ** (e - k)
                        key = mm + (((p, k),) if k else ())
                        v = nxt.get(key, ZERO) + coef
                        if v:
                            nxt[key] = v
                        else:
                            nxt.pop(key, None)
            partial = nxt
        _add_into(out, partial)
    return PBWElement(alg, out)


# ---------------------------------------------------------------------------
# functional entry points
# ---------------------------------------------------------------------------

def build_algebra(spec: AlgebraSpec, tables: GradingTables, flavor: str = "tilde") -> PBWAlgebra:
    return PBWAlgebra(spec, tables, flavor)


def multiply(a: PBWElement, b: PBWElement) -> PBWElement:
    return a.alg.multiply(a, b)


def dot_action(proj: Projector, x: Sequence, u: PBWElement) -> PBWElement:
    """x . u = Pr((x - x^ne - chi(x)) u) = Pr([x - x^ne, u]) for x in n."""
    alg = proj.alg
    X = alg.g_elem(x) - alg.ne_elem(x)
    return proj.pr(alg.commutator(X, u))


def dot_action_right(proj: Projector, x: Sequence, u: PBWElement) -> PBWElement:
    """Right-handed dot action Pr'([x - x^ne, u]); its kernel is the right-invariant algebra."""
    alg = proj.alg
    X = alg.g_elem(x) - alg.ne_elem(x)
    return proj.pr_right(alg.commutator(X, u))


def project_Pr(proj: Projector, u: PBWElement) -> PBWElement:
    return proj.pr(u)


def project_Pr_right(proj: Projector, u: PBWElement) -> PBWElement:
    return proj.pr_right(u)


def comultiply(cop: Coproduct, u: PBWElement) -> TensorTerms:
    return cop(u)


def degrees(u: PBWElement) -> dict:
    return u.alg.degrees(u)


def enumerate_monomials(alg: PBWAlgebra, positions: Sequence[int], max_kazhdan: int,
                        te_weight: Optional[Tuple[Fraction, ...]] = None) -> List[Mono]:
    """All monomials in the given generators with Kazhdan degree <= max_kazhdan.

    Generators of Kazhdan degree <= 0 are rejected (the set would be infinite).
    """
    positions = sorted(positions)
    for p in positions:
        if alg.gens[p].kazhdan <= 0:
            raise ValueError("enumeration needs generators of positive Kazhdan degree")
    out: List[Mono] = []

    def rec(i: int, budget: int, acc: list):
        if i == len(positions):
            out.append(tuple(acc))
            return
        p = positions[i]
        k = alg.gens[p].kazhdan
        emax = budget // k
        if alg.odd[p]:
            emax = min(emax, 1)
        for e in range(emax + 1):
            if e:
                acc.append((p, e))
            rec(i + 1, budget - e * k, acc)
            if e:
                acc.pop()

    rec(0, max_kazhdan, [])
    if te_weight is not None:
        tw = tuple(te_weight)
        out = [m for m in out if alg.mono_te_weight(m) == tw]
    out.sort(key=lambda m: (-alg.mono_kazhdan(m), m))
    return out
