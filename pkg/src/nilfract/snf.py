"""Exact integer matrices and Smith normal form with transforms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], inner: int | None = None) -> list[list]:
    """Product of row-major matrices; ``inner`` is needed when ``a`` has no rows."""
    k = len(b) if inner is None else inner
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        out.append([sum(row[t] * b[t][j] for t in range(k)) for j in range(cols)])
    return out


def transpose(a: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        n = len(rows[0]) if rows else (ncols or 0)
        if any(len(r) != n for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), n, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls.from_rows(identity(n), n)

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return IntMatrix.from_rows(matmul(self.to_rows(), other.to_rows(), self.cols), other.cols)

    def diagonal(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


class _Reducer:
    """Row/column operations on ``a`` mirrored onto u, u^-1, v, v^-1 so that
    u @ a0 @ v == a and u @ uinv == I throughout."""

    def __init__(self, a: list[list[int]]):
        self.a = a
        self.m = len(a)
        self.n = len(a[0]) if a else 0
        self.u, self.uinv = identity(self.m), identity(self.m)
        self.v, self.vinv = identity(self.n), identity(self.n)

    # row i <- row i + q * row t
    def add_row(self, i: int, t: int, q: int):
        for mat in (self.a, self.u):
            ri, rt = mat[i], mat[t]
            for j in range(len(ri)):
                ri[j] += q * rt[j]
        for row in self.uinv:
            row[t] -= q * row[i]

    def swap_rows(self, i: int, t: int):
        if i == t:
            return
        for mat in (self.a, self.u):
            mat[i], mat[t] = mat[t], mat[i]
        for row in self.uinv:
            row[i], row[t] = row[t], row[i]

    def negate_row(self, i: int):
        for mat in (self.a, self.u):
            mat[i] = [-x for x in mat[i]]
        for row in self.uinv:
            row[i] = -row[i]

    # col j <- col j + q * col t
    def add_col(self, j: int, t: int, q: int):
        for mat in (self.a, self.v):
            for row in mat:
                row[j] += q * row[t]
        rj, rt = self.vinv[j], self.vinv[t]
        for k in range(len(rt)):
            rt[k] -= q * rj[k]

    def swap_cols(self, j: int, t: int):
        if j == t:
            return
        for mat in (self.a, self.v):
            for row in mat:
                row[j], row[t] = row[t], row[j]
        self.vinv[j], self.vinv[t] = self.vinv[t], self.vinv[j]

    def run(self):
        a, m, n = self.a, self.m, self.n
        for t in range(min(m, n)):
            piv = None
            for i in range(t, m):
                for j in range(t, n):
                    x = a[i][j]
                    if x and (piv is None or abs(x) < abs(a[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                break
            self.swap_rows(t, piv[0])
            self.swap_cols(t, piv[1])
            while True:
                p = a[t][t]
                for i in range(t + 1, m):
                    if a[i][t]:
                        self.add_row(i, t, -(a[i][t] // p))
                for j in range(t + 1, n):
                    if a[t][j]:
                        self.add_col(j, t, -(a[t][j] // p))
                # smallest leftover in row t, then column t (row-major tie order)
                best = None
                for j in range(t + 1, n):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), "c", j)
                for i in range(t + 1, m):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), "r", i)
                if best is not None:
                    if best[1] == "c":
                        self.swap_cols(t, best[2])
                    else:
                        self.swap_rows(t, best[2])
                    continue
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                self.add_row(t, bad[0], 1)
            if a[t][t] < 0:
                self.negate_row(t)
        return self


def snf_full(a: Sequence[Sequence[int]], ncols: int | None = None):
    """Smith form of a row-major integer matrix.

    Returns (u, uinv, d, v, vinv) as lists of rows with d = u a v.
    """
    rows = [[int(x) for x in r] for r in a]
    if not rows and ncols:
        return [], [], [], identity(ncols), identity(ncols)
    r = _Reducer(rows).run()
    return r.u, r.uinv, r.a, r.v, r.vinv


def smith_normal_form(m: IntMatrix | Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Unimodular u, v and diagonal d = u @ m @ v with d_11 | d_22 | ...

    Pivots are chosen by smallest nonzero absolute value, ties broken in
    row-major order, so results are reproducible.
    """
    if not isinstance(m, IntMatrix):
        m = IntMatrix.from_rows(m)
    u, _, d, v, _ = snf_full(m.to_rows(), m.cols)
    return (IntMatrix.from_rows(u, m.rows), IntMatrix.from_rows(d, m.cols),
            IntMatrix.from_rows(v, m.cols))
