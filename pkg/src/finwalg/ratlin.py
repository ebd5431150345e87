"""Exact rational linear algebra.

Everything here works over ``fractions.Fraction``.  Matrices are stored
sparsely as one ``{column: value}`` dict per row, which is the natural
shape for the invariance and lift systems built elsewhere: each equation
touches only a handful of unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Rational = Fraction
Row = Dict[int, Fraction]


class InconsistentSystem(ValueError):
    """Raised by :func:`solve` when the right hand side is not in the column space."""


def parse_rational(value) -> Fraction:
    """Accept ints, Fractions and ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass
class SparseMatrix:
    rows: int
    cols: int
    data: List[Row] = field(default_factory=list)

    def __post_init__(self):
        if not self.data:
            self.data = [dict() for _ in range(self.rows)]
        if len(self.data) != self.rows:
            raise ValueError("row count mismatch")
        for r in self.data:
            for c, v in list(r.items()):
                if not 0 <= c < self.cols:
                    raise ValueError(f"column index {c} out of range")
                if v == 0:
                    del r[c]

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        ncols = len(rows[0]) if rows else 0
        data = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            data.append({j: parse_rational(v) for j, v in enumerate(r) if v != 0})
        return cls(len(rows), ncols, data)

    @classmethod
    def from_triples(cls, rows: int, cols: int, triples: Iterable[Tuple[int, int, Fraction]]) -> "SparseMatrix":
        data: List[Row] = [dict() for _ in range(rows)]
        for i, j, v in triples:
            v = parse_rational(v)
            if v:
                data[i][j] = data[i].get(j, 0) + v
                if data[i][j] == 0:
                    del data[i][j]
        return cls(rows, cols, data)

    def triples(self) -> List[Tuple[int, int, Fraction]]:
        return [(i, j, v) for i, r in enumerate(self.data) for j, v in sorted(r.items())]

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for i, r in enumerate(self.data):
            for j, v in r.items():
                out[i][j] = v
        return out

    def apply(self, vec: Sequence) -> List[Fraction]:
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        return [sum((v * vec[j] for j, v in r.items()), Fraction(0)) for r in self.data]


def _as_rows(A) -> Tuple[List[Row], int]:
    if isinstance(A, SparseMatrix):
        return [dict(r) for r in A.data], A.cols
    rows, ncols = A
    return [dict(r) for r in rows], ncols


def rref_rows(rows: List[Row], ncols: int) -> Tuple[List[Row], List[int]]:
    """Reduced row echelon form of sparse rows; returns (nonzero rows, pivots).

    Columns are eliminated left to right, so the result only depends on the
    row space and the column order.
    """
    # bucket rows by leading column to keep pivot search cheap
    pending = [r for r in rows if r]
    pivot_rows: Dict[int, Row] = {}
    for r in pending:
        r = {c: Fraction(v) for c, v in r.items() if v}
        while r:
            lead = min(r)
            prow = pivot_rows.get(lead)
            if prow is None:
                inv = 1 / r[lead]
                r = {c: v * inv for c, v in r.items()}
                pivot_rows[lead] = r
                break
            factor = r[lead]
            for c, v in prow.items():
                nv = r.get(c, 0) - factor * v
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
    pivots = sorted(pivot_rows)
    # back substitution, from the last pivot upwards
    for idx in range(len(pivots) - 1, -1, -1):
        p = pivots[idx]
        prow = pivot_rows[p]
        for q in pivots[:idx]:
            qrow = pivot_rows[q]
            factor = qrow.get(p)
            if factor:
                for c, v in prow.items():
                    nv = qrow.get(c, 0) - factor * v
                    if nv:
                        qrow[c] = nv
                    else:
                        qrow.pop(c, None)
    return [pivot_rows[p] for p in pivots], pivots


def rank(A) -> int:
    rows, ncols = _as_rows(A)
    return len(rref_rows(rows, ncols)[1])


def kernel_rows(A) -> List[Row]:
    """Sparse RREF basis of the null space."""
    rows, ncols = _as_rows(A)
    red, pivots = rref_rows(rows, ncols)
    pivset = set(pivots)
    raw: List[Row] = []
    for free in range(ncols):
        if free in pivset:
            continue
        v: Row = {free: Fraction(1)}
        for r, p in zip(red, pivots):
            c = r.get(free)
            if c:
                v[p] = -c
        raw.append(v)
    return rref_rows(raw, ncols)[0]


def kernel_basis(A) -> List[List[Fraction]]:
    """Basis of ``{v : Av = 0}``, itself in reduced row echelon form."""
    if isinstance(A, SparseMatrix):
        ncols = A.cols
    else:
        ncols = A[1]
    return [dense(v, ncols) for v in kernel_rows(A)]


def solve_rows(rows: List[Row], ncols: int, rhs: Sequence) -> Row:
    """Particular solution with all free variables zero (sparse result)."""
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[ncols] = Fraction(b)
        aug.append(row)
    red, pivots = rref_rows(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        raise InconsistentSystem("right hand side is not in the column space")
    sol: Row = {}
    for r, p in zip(red, pivots):
        v = r.get(ncols)
        if v:
            sol[p] = v
    return sol


def solve(A, b: Sequence) -> List[Fraction]:
    """Solve ``Ax = b`` exactly; free variables are set to zero.

    Raises :class:`InconsistentSystem` if there is no solution.
    """
    rows, ncols = _as_rows(A)
    if len(rows) != len(b):
        raise ValueError("dimension mismatch")
    return dense(solve_rows(rows, ncols, [parse_rational(x) for x in b]), ncols)


def dense(v: Row, n: int) -> List[Fraction]:
    out = [Fraction(0)] * n
    for k, x in v.items():
        out[k] = Fraction(x)
    return out


def reduce_against(vec: Row, basis: List[Row], pivots: List[int]) -> Row:
    """Subtract multiples of RREF rows so that ``vec`` vanishes on every pivot."""
    out = dict(vec)
    for r, p in zip(basis, pivots):
        c = out.get(p)
        if c:
            for k, v in r.items():
                nv = out.get(k, 0) - c * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
    return out


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> List[List[Fraction]]:
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(m) if A[i][k] and B[k][j]), Fraction(0))
             for j in range(p)] for i in range(n)]


def identity(n: int) -> List[List[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def is_zero_matrix(A: Sequence[Sequence]) -> bool:
    return all(x == 0 for row in A for x in row)


def inverse(A: Sequence[Sequence]) -> Optional[List[List[Fraction]]]:
    """Exact inverse of a square matrix, or ``None`` if singular."""
    n = len(A)
    rows = []
    for i in range(n):
        r = {j: Fraction(A[i][j]) for j in range(n) if A[i][j]}
        r[n + i] = Fraction(1)
        rows.append(r)
    red, pivots = rref_rows(rows, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        return None
    return [[red[i].get(n + j, Fraction(0)) for j in range(n)] for i in range(n)]
