"""Static Lie-theoretic data: the algebra, its form, the sl2-triple, the good
grading and everything derived from them (n, p, k, the r-basis, the
symplectic basis of k, characters of p used for shifts).

Vectors in g are tuples of Fractions in the coordinates of the fixed basis.
The basis is required to consist of t-weight vectors that are homogeneous
for the grading; all builders here produce such bases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .ratlin import (InconsistentSystem, format_rational, kernel_rows, parse_rational,
                     rref_rows, solve_rows)

Vector = Tuple[Fraction, ...]


class LieDataError(ValueError):
    pass


class ZeroNilpotentError(LieDataError):
    """e = 0 was supplied; the construction degenerates to U(g) and is refused."""


class NotNilpotentError(LieDataError):
    pass


def _vec(values, n=None) -> Vector:
    v = tuple(parse_rational(x) for x in values)
    if n is not None and len(v) != n:
        raise LieDataError(f"vector of length {len(v)}, expected {n}")
    return v


def unit(n: int, i: int) -> Vector:
    return tuple(Fraction(int(k == i)) for k in range(n))


def add(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def scale(c, v: Sequence) -> Vector:
    return tuple(c * a for a in v)


def is_zero(v: Sequence) -> bool:
    return all(a == 0 for a in v)


@dataclass
class AlgebraSpec:
    dim: int
    labels: List[str]
    # struct[(i, j)] = {k: c} meaning [b_i, b_j] = sum_k c b_k (nonzero pairs only)
    struct: Dict[Tuple[int, int], Dict[int, Fraction]]
    form: List[List[Fraction]]
    e: Vector
    h: Vector
    f: Vector
    grading: List[int]
    t_basis: List[Vector]
    te_basis: List[Vector] = field(default_factory=list)
    name: str = "custom"
    natural: Optional[List[List[List[Fraction]]]] = None  # defining matrices, if known

    # ---- basic operations -------------------------------------------------
    def bracket(self, x: Sequence, y: Sequence) -> Vector:
        out = [Fraction(0)] * self.dim
        xs = [(i, a) for i, a in enumerate(x) if a]
        ys = [(j, b) for j, b in enumerate(y) if b]
        for i, a in xs:
            for j, b in ys:
                row = self.struct.get((i, j))
                if row:
                    ab = a * b
                    for k, c in row.items():
                        out[k] += ab * c
        return tuple(out)

    def bracket_basis(self, i: int, j: int) -> Dict[int, Fraction]:
        return self.struct.get((i, j), {})

    def pair(self, x: Sequence, y: Sequence) -> Fraction:
        total = Fraction(0)
        for i, a in enumerate(x):
            if a:
                row = self.form[i]
                for j, b in enumerate(y):
                    if b and row[j]:
                        total += a * b * row[j]
        return total

    def ad_matrix(self, x: Sequence) -> List[List[Fraction]]:
        """Matrix of ad x; column j holds [x, b_j]."""
        cols = [self.bracket(x, unit(self.dim, j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def basis_vector(self, i: int) -> Vector:
        return unit(self.dim, i)

    def label_of(self, v: Sequence) -> str:
        terms = []
        for i, a in enumerate(v):
            if a:
                terms.append(f"{format_rational(a)}*{self.labels[i]}")
        return " + ".join(terms) if terms else "0"

    def weight_on(self, t: Sequence, i: int) -> Fraction:
        """Eigenvalue of ad t on basis vector i (t must act diagonally)."""
        col = self.bracket(t, unit(self.dim, i))
        for k, c in enumerate(col):
            if k != i and c:
                raise LieDataError(f"basis vector {self.labels[i]} is not an ad-eigenvector")
        return col[i]

    def t_weight(self, i: int) -> Tuple[Fraction, ...]:
        return tuple(self.weight_on(t, i) for t in self.t_basis)

    def te_weight(self, i: int) -> Tuple[Fraction, ...]:
        return tuple(self.weight_on(t, i) for t in self.te_basis)

    def vector_te_weight(self, v: Sequence) -> Optional[Tuple[Fraction, ...]]:
        ws = {self.te_weight(i) for i, a in enumerate(v) if a}
        if not ws:
            return tuple(Fraction(0) for _ in self.te_basis)
        return ws.pop() if len(ws) == 1 else None

    def vector_degree(self, v: Sequence) -> Optional[int]:
        ds = {self.grading[i] for i, a in enumerate(v) if a}
        if not ds:
            return 0
        return ds.pop() if len(ds) == 1 else None


# ---------------------------------------------------------------------------
# generic linear algebra on g
# ---------------------------------------------------------------------------

def _solve_linear_map(columns: List[Vector], target: Sequence, ncoords: int) -> Optional[Dict[int, Fraction]]:
    """Solve sum_j c_j columns[j] = target; particular solution or None."""
    rows = [dict() for _ in range(ncoords)]
    for j, col in enumerate(columns):
        for i, a in enumerate(col):
            if a:
                rows[i][j] = a
    try:
        return solve_rows(rows, len(columns), list(target))
    except InconsistentSystem:
        return None


def subspace_kernel(spec: AlgebraSpec, maps: List[List[List[Fraction]]], support: Optional[List[int]] = None) -> List[Vector]:
    """RREF basis of the common kernel of the given dim x dim matrices,
    restricted to vectors supported on ``support`` (default: everything)."""
    n = spec.dim
    support = list(range(n)) if support is None else list(support)
    rows = []
    for M in maps:
        for i in range(n):
            r = {pos: M[i][j] for pos, j in enumerate(support) if M[i][j]}
            if r:
                rows.append(r)
    ker = kernel_rows((rows, len(support)))
    out = []
    for v in ker:
        full = [Fraction(0)] * n
        for pos, a in v.items():
            full[support[pos]] = a
        out.append(tuple(full))
    return out


def centralizer(spec: AlgebraSpec, x: Sequence) -> List[Vector]:
    """RREF basis of ker(ad x)."""
    return subspace_kernel(spec, [spec.ad_matrix(x)])


def center(spec: AlgebraSpec) -> List[Vector]:
    return subspace_kernel(spec, [spec.ad_matrix(unit(spec.dim, i)) for i in range(spec.dim)])


def is_nilpotent_element(spec: AlgebraSpec, x: Sequence) -> bool:
    M = spec.ad_matrix(x)
    P = M
    for _ in range(spec.dim):
        if all(a == 0 for row in P for a in row):
            return True
        P = [[sum((P[i][k] * M[k][j] for k in range(spec.dim) if P[i][k] and M[k][j]), Fraction(0))
              for j in range(spec.dim)] for i in range(spec.dim)]
    return all(a == 0 for row in P for a in row)


def complete_sl2_triple(spec: AlgebraSpec, e: Sequence) -> Tuple[Vector, Vector]:
    """Return (h, f) completing e to an sl2-triple, with h in [e, g].

    First z with [e,[e,z]] = -2e gives h = [e,z]; then f is the unique
    solution of [e,f] = h, [h,f] = -2f.  Free variables are zero, so the
    output is deterministic.
    """
    n = spec.dim
    e = _vec(e, n)
    if is_zero(e):
        raise ZeroNilpotentError("e = 0 is not accepted")
    if not is_nilpotent_element(spec, e):
        raise NotNilpotentError("ad e is not nilpotent")
    cols = [spec.bracket(e, spec.bracket(e, unit(n, j))) for j in range(n)]
    z = _solve_linear_map(cols, scale(-2, e), n)
    if z is None:
        raise NotNilpotentError("no h in [e,g] with [h,e] = 2e")
    zv = tuple(z.get(j, Fraction(0)) for j in range(n))
    h = spec.bracket(e, zv)
    # joint system [e,f] = h, [h,f] + 2f = 0
    rows = [dict() for _ in range(2 * n)]
    for j in range(n):
        c1 = spec.bracket(e, unit(n, j))
        c2 = add(spec.bracket(h, unit(n, j)), scale(2, unit(n, j)))
        for i in range(n):
            if c1[i]:
                rows[i][j] = c1[i]
            if c2[i]:
                rows[n + i][j] = c2[i]
    try:
        fs = solve_rows(rows, n, list(h) + [0] * n)
    except InconsistentSystem:
        raise NotNilpotentError("could not complete the sl2-triple") from None
    f = tuple(fs.get(j, Fraction(0)) for j in range(n))
    return h, f


def dynkin_grading(spec: AlgebraSpec, h: Sequence) -> List[int]:
    degs = []
    for i in range(spec.dim):
        w = spec.weight_on(h, i)
        if w.denominator != 1:
            raise LieDataError("ad h has a non-integral eigenvalue")
        degs.append(int(w))
    return degs


def compute_te_basis(spec: AlgebraSpec) -> List[Vector]:
    """t^e = ker(ad e) ∩ ker(ad h) ∩ t, as an RREF basis in t-coordinates."""
    n = spec.dim
    tb = spec.t_basis
    rows = []
    for x in (spec.e, spec.h):
        imgs = [spec.bracket(t, x) for t in tb]
        for i in range(n):
            r = {k: imgs[k][i] for k in range(len(tb)) if imgs[k][i]}
            if r:
                rows.append(r)
    ker = kernel_rows((rows, len(tb)))
    out = []
    for v in ker:
        vec = [Fraction(0)] * n
        for k, c in v.items():
            vec = list(add(vec, scale(c, tb[k])))
        out.append(tuple(vec))
    return out


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _jordan_data(partition: Sequence[int]):
    """Positions for the Jordan basis, sorted by decreasing h-eigenvalue.

    Returns (h eigenvalues in position order, list of (pos_from, pos_to, f_coef))
    where e sends pos_from to pos_to and f sends pos_to back with f_coef.
    """
    items = []
    for b, k in enumerate(partition):
        for m in range(k):
            items.append((k - 1 - 2 * m, b, m))
    items.sort(key=lambda it: (-it[0], it[1], it[2]))
    pos = {(b, m): p for p, (_, b, m) in enumerate(items)}
    hvals = [it[0] for it in items]
    edges = []
    for b, k in enumerate(partition):
        for m in range(1, k):
            # e v_{b,m} = v_{b,m-1}; f v_{b,m-1} = m (k - m) v_{b,m}
            edges.append((pos[(b, m)], pos[(b, m - 1)], Fraction(m * (k - m))))
    return hvals, edges


def build_gl_sl(kind: str, n: int, partition: Sequence[int]) -> AlgebraSpec:
    """gl_n or sl_n with trace form, e in Jordan form for ``partition``.

    The Jordan basis is ordered by decreasing h-eigenvalue, so h is dominant
    diagonal; e.g. partition (2,1) of 3 gives e = e13, h = diag(1,0,-1).
    The grading is the Dynkin grading.
    """
    kind = kind.lower()
    if kind not in ("gl", "sl"):
        raise LieDataError(f"unknown kind {kind!r}")
    partition = [int(p) for p in partition]
    if n < 1 or any(p < 1 for p in partition) or sum(partition) != n:
        raise LieDataError(f"partition {partition} does not sum to {n}")
    if kind == "sl" and n < 2:
        raise LieDataError("sl_1 is zero")
    if all(p == 1 for p in partition):
        raise ZeroNilpotentError("partition (1,...,1) gives e = 0")

    # matrices of the basis, as dicts {(row, col): value}
    mats: List[Dict[Tuple[int, int], Fraction]] = []
    labels: List[str] = []
    if kind == "sl":
        for i in range(n - 1):
            mats.append({(i, i): Fraction(1), (i + 1, i + 1): Fraction(-1)})
            labels.append(f"h{i + 1}")
    else:
        for i in range(n):
            mats.append({(i, i): Fraction(1)})
            labels.append(f"e{i + 1}{i + 1}" if n < 10 else f"e{i + 1}_{i + 1}")
    ncartan = len(mats)
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append({(i, j): Fraction(1)})
                labels.append(f"e{i + 1}{j + 1}" if n < 10 else f"e{i + 1}_{j + 1}")
    dim = len(mats)
    offdiag = {(i, j): ncartan + k for k, (i, j) in enumerate((i, j) for i in range(n) for j in range(n) if i != j)}

    def decompose(M: Dict[Tuple[int, int], Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        diag = [M.get((i, i), Fraction(0)) for i in range(n)]
        for (i, j), a in M.items():
            if i != j and a:
                out[offdiag[(i, j)]] = a
        if kind == "sl":
            if sum(diag) != 0:
                raise LieDataError("trace not zero")
            partial = Fraction(0)
            for i in range(n - 1):
                partial += diag[i]
                if partial:
                    out[i] = partial
        else:
            for i in range(n):
                if diag[i]:
                    out[i] = diag[i]
        return out

    def matmul(A, B):
        out: Dict[Tuple[int, int], Fraction] = {}
        for (i, k), a in A.items():
            for (k2, j), b in B.items():
                if k == k2:
                    out[(i, j)] = out.get((i, j), 0) + a * b
        return {key: v for key, v in out.items() if v}

    struct: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for a in range(dim):
        for b in range(dim):
            AB = matmul(mats[a], mats[b])
            BA = matmul(mats[b], mats[a])
            C = dict(AB)
            for key, v in BA.items():
                C[key] = C.get(key, 0) - v
            C = {key: v for key, v in C.items() if v}
            if C:
                struct[(a, b)] = decompose(C)
    form = [[Fraction(0)] * dim for _ in range(dim)]
    for a in range(dim):
        for b in range(dim):
            tr = sum((v for (i, j), v in matmul(mats[a], mats[b]).items() if i == j), Fraction(0))
            form[a][b] = tr

    hvals, edges = _jordan_data(partition)
    Emat: Dict[Tuple[int, int], Fraction] = {}
    Fmat: Dict[Tuple[int, int], Fraction] = {}
    for src, dst, coef in edges:
        Emat[(dst, src)] = Fraction(1)
        Fmat[(src, dst)] = coef
    Hmat = {(i, i): Fraction(hvals[i]) for i in range(n) if hvals[i]}

    def to_vec(M):
        d = decompose(M)
        return tuple(d.get(k, Fraction(0)) for k in range(dim))

    t_basis = [unit(dim, k) for k in range(ncartan)]
    spec = AlgebraSpec(dim=dim, labels=labels, struct=struct, form=form,
                       e=to_vec(Emat), h=to_vec(Hmat), f=to_vec(Fmat),
                       grading=[0] * dim, t_basis=t_basis,
                       name=f"{kind}{n}:{list(partition)}")
    spec.natural = [[[M.get((i, j), Fraction(0)) for j in range(n)] for i in range(n)] for M in mats]
    spec.grading = dynkin_grading(spec, spec.h)
    spec.te_basis = compute_te_basis(spec)
    return spec


def parse_alg_arg(arg: str) -> AlgebraSpec:
    """``sl3:[2,1]`` / ``gl2:[2]`` style builder strings."""
    import re
    m = re.fullmatch(r"\s*(gl|sl)(\d+)\s*:\s*\[?\s*([\d,\s]+?)\s*\]?\s*", arg)
    if not m:
        raise LieDataError(f"cannot parse algebra description {arg!r}")
    kind, n, parts = m.group(1), int(m.group(2)), m.group(3)
    partition = [int(p) for p in parts.replace(" ", "").split(",") if p]
    return build_gl_sl(kind, n, partition)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def spec_from_json(data: dict) -> AlgebraSpec:
    try:
        dim = int(data["dim"])
        labels = list(data.get("labels") or [f"b{i}" for i in range(dim)])
        struct: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        for entry in data["bracket"]:
            i, j, k, c = int(entry[0]), int(entry[1]), int(entry[2]), parse_rational(entry[3])
            if c == 0:
                continue
            for (a, b, s) in ((i, j, c), (j, i, -c)):
                row = struct.setdefault((a, b), {})
                if k in row and row[k] != s:
                    raise LieDataError(f"conflicting bracket entries for ({a},{b},{k})")
                row[k] = s
        form = [[parse_rational(x) for x in row] for row in data["form"]]
        e = _vec(data["e"], dim)
        t_basis = [_vec(t, dim) for t in data["t"]]
    except (KeyError, TypeError, IndexError) as exc:
        raise LieDataError(f"malformed algebra JSON: {exc}") from None
    if len(labels) != dim or len(form) != dim or any(len(r) != dim for r in form):
        raise LieDataError("dimension mismatch in algebra JSON")
    spec = AlgebraSpec(dim=dim, labels=labels, struct=struct, form=form, e=e,
                       h=tuple([Fraction(0)] * dim), f=tuple([Fraction(0)] * dim),
                       grading=[0] * dim, t_basis=t_basis, name=data.get("name", "custom"))
    if is_zero(e):
        raise ZeroNilpotentError("e = 0 is not accepted")
    if "h" in data and "f" in data:
        spec.h, spec.f = _vec(data["h"], dim), _vec(data["f"], dim)
    else:
        spec.h, spec.f = complete_sl2_triple(spec, e)
    if "grading" in data and data["grading"] is not None:
        spec.grading = [int(x) for x in data["grading"]]
    else:
        spec.grading = dynkin_grading(spec, spec.h)
    spec.te_basis = compute_te_basis(spec)
    if data.get("natural"):
        spec.natural = [[[parse_rational(x) for x in row] for row in M] for M in data["natural"]]
    return spec


def spec_to_json(spec: AlgebraSpec) -> dict:
    br = []
    for (i, j), row in sorted(spec.struct.items()):
        if i < j:
            for k, c in sorted(row.items()):
                br.append([i, j, k, format_rational(c)])
    fmt = lambda v: [format_rational(a) for a in v]
    return {
        "name": spec.name,
        "dim": spec.dim,
        "labels": list(spec.labels),
        "bracket": br,
        "form": [fmt(r) for r in spec.form],
        "e": fmt(spec.e), "h": fmt(spec.h), "f": fmt(spec.f),
        "grading": list(spec.grading),
        "t": [fmt(t) for t in spec.t_basis],
        "te": [fmt(t) for t in spec.te_basis],
        "natural": None if spec.natural is None else [[fmt(r) for r in M] for M in spec.natural],
    }


def load_spec(path: str) -> AlgebraSpec:
    with open(path) as fh:
        return spec_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_spec(spec: AlgebraSpec) -> List[str]:
    """Return the list of violated structural invariants (empty if fine)."""
    bad = []
    n = spec.dim
    basis = [unit(n, i) for i in range(n)]
    for i in range(n):
        for j in range(n):
            a = spec.struct.get((i, j), {})
            b = spec.struct.get((j, i), {})
            if any(a.get(k, 0) + b.get(k, 0) for k in set(a) | set(b)):
                bad.append("antisymmetry")
                break
        else:
            continue
        break
    jac_ok = True
    for i in range(n):
        for j in range(i + 1, n):
            bij = spec.bracket(basis[i], basis[j])
            for k in range(j + 1, n):
                s = add(add(spec.bracket(bij, basis[k]),
                            spec.bracket(spec.bracket(basis[j], basis[k]), basis[i])),
                        spec.bracket(spec.bracket(basis[k], basis[i]), basis[j]))
                if not is_zero(s):
                    jac_ok = False
                    break
            if not jac_ok:
                break
        if not jac_ok:
            break
    if not jac_ok:
        bad.append("Jacobi identity")
    if any(spec.form[i][j] != spec.form[j][i] for i in range(n) for j in range(n)):
        bad.append("form symmetric")
    if len(rref_rows([{j: v for j, v in enumerate(r) if v} for r in spec.form], n)[1]) != n:
        bad.append("form nondegenerate")
    inv_ok = True
    for i, j, k in product(range(n), repeat=3):
        if spec.pair(spec.bracket(basis[i], basis[j]), basis[k]) != spec.pair(basis[i], spec.bracket(basis[j], basis[k])):
            inv_ok = False
            break
    if not inv_ok:
        bad.append("form invariant")
    e, h, f = spec.e, spec.h, spec.f
    if spec.bracket(h, e) != scale(2, e) or spec.bracket(e, f) != h or spec.bracket(h, f) != scale(-2, f):
        bad.append("sl2 relations")
    try:
        for t in spec.t_basis:
            for i in range(n):
                spec.weight_on(t, i)
        for t in spec.t_basis:
            for t2 in spec.t_basis:
                if not is_zero(spec.bracket(t, t2)):
                    raise LieDataError("t not abelian")
    except LieDataError:
        bad.append("t toral")
    for t in spec.te_basis:
        if not is_zero(spec.bracket(t, e)) or not is_zero(spec.bracket(t, h)):
            bad.append("t^e centralizes e and h")
            break
    for i in range(n):
        for j in range(n):
            for k, c in spec.struct.get((i, j), {}).items():
                if c and spec.grading[k] != spec.grading[i] + spec.grading[j]:
                    bad.append("grading is a Lie grading")
                    break
            else:
                continue
            break
        else:
            continue
        break
    return bad


def validate_good_grading(spec: AlgebraSpec, grading: Optional[Sequence[int]] = None) -> List[str]:
    """Check the axioms of a good grading; returns violated axiom names."""
    grading = list(spec.grading if grading is None else grading)
    n = spec.dim
    bad = []
    if any(a and grading[i] != 2 for i, a in enumerate(spec.e)):
        bad.append("e ∈ g(2)")
    neg = [i for i in range(n) if grading[i] < 0]
    if neg and subspace_kernel(spec, [spec.ad_matrix(spec.e)], neg):
        bad.append("g^e ⊆ ⊕_{j≥0} g(j)")
    if any(a and grading[i] != 0 for z in center(spec) for i, a in enumerate(z)):
        bad.append("z(g) ⊆ g(0)")
    lie_ok = all(grading[k] == grading[i] + grading[j]
                 for (i, j), row in spec.struct.items() for k, c in row.items() if c)
    if not lie_ok:
        bad.append("[g(i),g(j)] ⊆ g(i+j)")
    if any(a and grading[i] != 0 for t in spec.t_basis for i, a in enumerate(t)):
        bad.append("t ⊆ g(0)")
    if any(a and grading[i] != -2 for i, a in enumerate(spec.f)):
        bad.append("f ∈ g(−2)")
    return bad


# ---------------------------------------------------------------------------
# grading tables
# ---------------------------------------------------------------------------

def splitting_functional(weights: Sequence[Tuple[Fraction, ...]], rank: int) -> Tuple[Fraction, ...]:
    """A rational functional nonzero on every nonzero weight in ``weights``.

    Tries (1, M, M^2, ...) for M = 1, 2, ... in turn, so the choice is
    deterministic.
    """
    nonzero = [w for w in weights if any(w)]
    M = 1
    while True:
        phi = tuple(Fraction(M) ** k for k in range(rank))
        if all(sum(a * b for a, b in zip(phi, w)) != 0 for w in nonzero):
            return phi
        M += 1


@dataclass
class GradingTables:
    spec: AlgebraSpec
    p_idx: List[int]            # basis indices of p, by (degree, index)
    n_idx: List[int]            # basis indices of n, by (degree, index)
    k_idx: List[int]            # basis indices of k = g(-1)
    d: Dict[int, int]           # n basis index -> d_i
    chi: Vector                 # chi_e(b_k) = (e|b_k)
    split: Tuple[Fraction, ...]  # splitting functional on t^e-weights
    ge_basis: List[Vector]      # g^e basis: negatives, zeros, positives
    ge_degree: List[int]
    ge_weight: List[Tuple[Fraction, ...]]
    ge_class: List[int]         # -1, 0, +1 by sign of the splitting functional
    r_basis: List[Tuple[int, Vector]]  # (n basis index b_i, x_i); k-part first
    s: int
    z_basis: List[Vector]       # symplectic basis z_1..z_2s of k
    p_coords: Dict[int, Tuple[Dict[int, Fraction], Dict[int, Fraction]]]
    # p basis index -> ({g^e position: coef}, {r position: coef})
    beta: Dict[int, Fraction]   # character of p: trace of ad on g/p
    gamma: Dict[int, Fraction]  # character of p0 from negative restricted roots
    delta_shift_t: Tuple[Fraction, ...]   # on the t basis
    delta_shift_te: Tuple[Fraction, ...]  # on the t^e basis

    def omega(self, x: Sequence, y: Sequence) -> Fraction:
        """<x|y> = chi_e([y, x])."""
        return self.spec.pair(self.spec.e, self.spec.bracket(y, x))

    def chi_of(self, x: Sequence) -> Fraction:
        return sum((a * c for a, c in zip(x, self.chi) if a), Fraction(0))

    def z_star(self, j: int) -> Vector:
        s = self.s
        return self.z_basis[j + s] if j < s else scale(-1, self.z_basis[j - s])

    def restricted_class(self, w: Sequence[Fraction]) -> int:
        v = sum((a * b for a, b in zip(self.split, w)), Fraction(0))
        return (v > 0) - (v < 0)

    @property
    def p0_idx(self) -> List[int]:
        return [i for i in self.p_idx if not any(self.spec.te_weight(i))]

    @property
    def n0_idx(self) -> List[int]:
        return [i for i in self.n_idx if not any(self.spec.te_weight(i))]


def _symplectic_basis(spec: AlgebraSpec, k_vecs: List[Vector], omega) -> List[Vector]:
    """Deterministic symplectic Gram-Schmidt: <z_i|z_{i+s}> = 1."""
    pool = list(k_vecs)
    firsts, seconds = [], []
    while pool:
        u = pool.pop(0)
        partner = None
        for idx, w in enumerate(pool):
            if omega(u, w) != 0:
                partner = idx
                break
        if partner is None:
            raise LieDataError("the form <.|.> is degenerate on k")
        w = pool.pop(partner)
        w = scale(1 / omega(u, w), w)
        firsts.append(u)
        seconds.append(w)
        new_pool = []
        for v in pool:
            # v <- v - <v|w> u + <v|u> w keeps v orthogonal to u and w
            v2 = add(v, add(scale(-omega(v, w), u), scale(omega(v, u), w)))
            if not is_zero(v2):
                new_pool.append(v2)
        pool = new_pool
    return firsts + seconds


def grading_tables(spec: AlgebraSpec) -> GradingTables:
    n = spec.dim
    bad = validate_good_grading(spec)
    if bad:
        raise LieDataError(f"grading is not good: {bad}")
    deg = spec.grading
    p_idx = sorted((i for i in range(n) if deg[i] >= 0), key=lambda i: (deg[i], i))
    n_idx = sorted((i for i in range(n) if deg[i] < 0), key=lambda i: (deg[i], i))
    k_idx = [i for i in range(n) if deg[i] == -1]
    d = {i: -deg[i] for i in n_idx}
    chi = tuple(spec.pair(spec.e, unit(n, k)) for k in range(n))

    # restricted weights and the splitting functional
    te_w = [spec.te_weight(i) for i in range(n)]
    split = splitting_functional(te_w, len(spec.te_basis))

    def cls(w):
        v = sum((a * b for a, b in zip(split, w)), Fraction(0))
        return (v > 0) - (v < 0)

    # g^e basis, block by block (class, degree, weight)
    blocks: Dict[Tuple[int, int, Tuple[Fraction, ...]], List[int]] = {}
    for i in range(n):
        blocks.setdefault((cls(te_w[i]), deg[i], te_w[i]), []).append(i)
    adE = spec.ad_matrix(spec.e)
    ge_basis, ge_degree, ge_weight, ge_class = [], [], [], []
    for key in sorted(blocks):
        for v in subspace_kernel(spec, [adE], blocks[key]):
            ge_basis.append(v)
            ge_degree.append(key[1])
            ge_weight.append(key[2])
            ge_class.append(key[0])

    omega = lambda x, y: spec.pair(spec.e, spec.bracket(y, x))

    # r-basis: x_i in g(d_i - 2), (x_i | [b_j, e]) = delta_ij, (x_i | g^f) = 0
    gf = centralizer(spec, spec.f)
    order = [i for i in n_idx if d[i] == 1] + [i for i in n_idx if d[i] != 1]
    r_basis = []
    for bi in order:
        support = [k for k in range(n) if deg[k] == d[bi] - 2]
        rows, rhs = [], []
        for bj in n_idx:
            target = spec.bracket(unit(n, bj), spec.e)
            rows.append({pos: spec.pair(unit(n, k), target) for pos, k in enumerate(support)
                         if spec.pair(unit(n, k), target)})
            rhs.append(Fraction(int(bj == bi)))
        for y in gf:
            rows.append({pos: spec.pair(unit(n, k), y) for pos, k in enumerate(support)
                         if spec.pair(unit(n, k), y)})
            rhs.append(Fraction(0))
        try:
            sol = solve_rows(rows, len(support), rhs)
        except InconsistentSystem:
            raise LieDataError("the pairing system for the r-basis is singular") from None
        if kernel_rows((rows, len(support))):
            raise LieDataError("the r-basis vector is not unique")
        x = [Fraction(0)] * n
        for pos, a in sol.items():
            x[support[pos]] = a
        r_basis.append((bi, tuple(x)))
    s2 = len(k_idx)
    if s2 % 2:
        raise LieDataError("dim k is odd")
    z_basis = _symplectic_basis(spec, [unit(n, i) for i in k_idx], omega)

    # coordinates of p basis vectors in g^e ⊕ span{x_i : d_i >= 2}
    r_p = [(pos, x) for pos, (bi, x) in enumerate(r_basis) if d[bi] >= 2]
    cols = [v for v in ge_basis] + [x for _, x in r_p]
    p_coords = {}
    for i in p_idx:
        sol = _solve_linear_map(cols, unit(n, i), n)
        if sol is None:
            raise LieDataError("p is not g^e ⊕ [f, g(>=2)]")
        gpart = {k: a for k, a in sol.items() if k < len(ge_basis)}
        rpart = {r_p[k - len(ge_basis)][0]: a for k, a in sol.items() if k >= len(ge_basis)}
        p_coords[i] = (gpart, rpart)
    if len(ge_basis) + len(r_basis) != len(p_idx) + len(k_idx):
        raise LieDataError("dimension count for p~ = g^e ⊕ r fails")

    # characters: beta(x) = tr(ad x on g/p); gamma restricted to negative classes
    def trace_char(indices, domain):
        out = {}
        for x in domain:
            val = Fraction(0)
            for b in indices:
                val += spec.struct.get((x, b), {}).get(b, Fraction(0))
            if val:
                out[x] = val
        return out

    beta = trace_char(n_idx, p_idx)
    neg_n = [b for b in n_idx if cls(te_w[b]) < 0]
    p0 = [i for i in p_idx if not any(te_w[i])]
    gamma = trace_char(neg_n, p0)
    dt = [Fraction(0)] * len(spec.t_basis)
    for b in neg_n:
        c = Fraction(1) if d[b] >= 2 else Fraction(1, 2)
        dt = [a + c * w for a, w in zip(dt, spec.t_weight(b))]
    dte = [Fraction(0)] * len(spec.te_basis)
    for b in neg_n:
        c = Fraction(1) if d[b] >= 2 else Fraction(1, 2)
        dte = [a + c * w for a, w in zip(dte, te_w[b])]

    return GradingTables(spec=spec, p_idx=p_idx, n_idx=n_idx, k_idx=k_idx, d=d, chi=chi,
                         split=split, ge_basis=ge_basis, ge_degree=ge_degree,
                         ge_weight=ge_weight, ge_class=ge_class, r_basis=r_basis,
                         s=s2 // 2, z_basis=z_basis, p_coords=p_coords, beta=beta,
                         gamma=gamma, delta_shift_t=tuple(dt), delta_shift_te=tuple(dte))


def subalgebra_g0(spec: AlgebraSpec, tables: GradingTables) -> Tuple[AlgebraSpec, List[int]]:
    """The zero restricted-weight subalgebra g0 = c_g(t^e), with induced data.

    Basis vectors keep their relative order; e, h, f lie in g0.
    """
    idx = [i for i in range(spec.dim) if not any(spec.te_weight(i))]
    pos = {i: k for k, i in enumerate(idx)}
    struct = {}
    for (i, j), row in spec.struct.items():
        if i in pos and j in pos:
            struct[(pos[i], pos[j])] = {pos[k]: c for k, c in row.items()}
    form = [[spec.form[i][j] for j in idx] for i in idx]
    restrict = lambda v: tuple(v[i] for i in idx)
    for v in (spec.e, spec.h, spec.f):
        if any(a for i, a in enumerate(v) if i not in pos):
            raise LieDataError("sl2-triple is not in g0")
    g0 = AlgebraSpec(dim=len(idx), labels=[spec.labels[i] for i in idx], struct=struct,
                     form=form, e=restrict(spec.e), h=restrict(spec.h), f=restrict(spec.f),
                     grading=[spec.grading[i] for i in idx],
                     t_basis=[restrict(t) for t in spec.t_basis],
                     name=spec.name + "/g0")
    if any(g % 2 for g in g0.grading):
        raise LieDataError("the grading of g0 must be even")
    g0.te_basis = compute_te_basis(g0)
    return g0, idx
