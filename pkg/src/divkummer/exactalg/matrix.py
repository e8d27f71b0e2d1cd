"""Exact integer matrices: Hermite and Smith normal forms, kernels, solving.

Matrices act on row vectors (``x -> x @ M``) everywhere in the package, so
"row space" and "left kernel" are the natural notions.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence


class IntMatrix:
    """Immutable integer matrix with explicit shape (0-row matrices allowed)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Sequence[int]] = (), cols: int | None = None):
        rows = tuple(tuple(int(v) for v in row) for row in data)
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix without rows")
            cols = len(rows[0])
        for row in rows:
            if len(row) != cols:
                raise ValueError(f"row of length {len(row)} in matrix with {cols} columns")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", rows)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(([int(i == j) for j in range(n)] for i in range(n)), cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(([0] * cols for _ in range(rows)), cols=cols)

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls(([entries[i] if i == j else 0 for j in range(n)] for i in range(n)), cols=n)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def transpose(self) -> "IntMatrix":
        if not self.rows:
            return IntMatrix(([] for _ in range(self.cols)), cols=0)
        return IntMatrix(zip(*self.data), cols=self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols = list(zip(*other.data)) if other.rows else [()] * other.cols
        return IntMatrix(
            ([sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.data),
            cols=other.cols,
        )

    def vecmul(self, x: Sequence[int]) -> tuple[int, ...]:
        """Row vector times matrix."""
        if len(x) != self.rows:
            raise ValueError("vector length does not match matrix rows")
        out = [0] * self.cols
        for xi, r in zip(x, self.data):
            if xi:
                for j, v in enumerate(r):
                    if v:
                        out[j] += xi * v
        return tuple(out)

    def stack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in stack")
        return IntMatrix(self.data + other.data, cols=self.cols)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return _bareiss_det([list(r) for r in self.data])

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.cols, self.data))

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r}, cols={self.cols})"


def as_matrix(m, cols: int | None = None) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix(m, cols=cols)


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
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
    return sign * a[n - 1][n - 1]


def _pick_pivot(cands):
    # smallest absolute value, ties broken by lowest index
    best = None
    for idx, v in cands:
        if v and (best is None or abs(v) < best[1]):
            best = (idx, abs(v))
    return None if best is None else best[0]


def hnf_with_transform(m) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form ``H = U @ m`` with ``U`` unimodular.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)``, zero rows
    come last.
    """
    m = as_matrix(m)
    a = [list(r) for r in m.data]
    nr, nc = m.rows, m.cols
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    prow = 0
    pivots = []
    for col in range(nc):
        if prow >= nr:
            break
        while True:
            p = _pick_pivot((i, a[i][col]) for i in range(prow, nr))
            if p is None:
                break
            if p != prow:
                a[p], a[prow] = a[prow], a[p]
                u[p], u[prow] = u[prow], u[p]
            pv = a[prow][col]
            done = True
            for i in range(prow + 1, nr):
                if a[i][col]:
                    q = a[i][col] // pv
                    if q:
                        ai, ap = a[i], a[prow]
                        for j in range(col, nc):
                            ai[j] -= q * ap[j]
                        ui, up = u[i], u[prow]
                        for j in range(nr):
                            ui[j] -= q * up[j]
                    if a[i][col]:
                        done = False
            if done:
                break
        if prow < nr and a[prow][col]:
            if a[prow][col] < 0:
                a[prow] = [-v for v in a[prow]]
                u[prow] = [-v for v in u[prow]]
            pivots.append((prow, col))
            prow += 1
    for r, c in pivots:
        pv = a[r][c]
        for i in range(r):
            q = a[i][c] // pv
            if q:
                for j in range(c, nc):
                    a[i][j] -= q * a[r][j]
                for j in range(nr):
                    u[i][j] -= q * u[r][j]
    return IntMatrix(a, cols=nc), IntMatrix(u, cols=nr)


def hnf(m) -> IntMatrix:
    return hnf_with_transform(m)[0]


def snf(m) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns ``(U, S, V)`` with ``S = U @ m @ V``.

    ``U`` and ``V`` are unimodular, ``S`` is diagonal with non-negative entries
    ``d1 | d2 | ...`` (zeros last).
    """
    m = as_matrix(m)
    nr, nc = m.rows, m.cols
    a = [list(r) for r in m.data]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_op(i, k, q):  # row_i -= q * row_k
        ai, ak = a[i], a[k]
        for j in range(nc):
            if ak[j]:
                ai[j] -= q * ak[j]
        ui, uk = u[i], u[k]
        for j in range(nr):
            if uk[j]:
                ui[j] -= q * uk[j]

    def col_op(j, k, q):  # col_j -= q * col_k
        for r in a:
            if r[k]:
                r[j] -= q * r[k]
        for r in v:
            if r[k]:
                r[j] -= q * r[k]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            dirty = False
            pv = a[t][t]
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_op(i, t, a[i][t] // pv)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_op(j, t, a[t][j] // pv)
                    if a[t][j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t, nr):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), "r", i)
                for j in range(t, nc):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), "c", j)
                if best[1] == "r":
                    swap_rows(t, best[2])
                else:
                    swap_cols(t, best[2])
                continue
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % pv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return IntMatrix(u, cols=nr), IntMatrix(a, cols=nc), IntMatrix(v, cols=nc)


def snf_diagonal(m) -> list[int]:
    """Diagonal of the Smith form, length ``min(rows, cols)``."""
    _, s, _ = snf(m)
    return [s[i, i] for i in range(min(s.rows, s.cols))]


def left_kernel(m) -> IntMatrix:
    """Basis (as rows) of the lattice ``{x : x @ m = 0}``."""
    m = as_matrix(m)
    h, u = hnf_with_transform(m)
    rows = [u.row(i) for i in range(h.rows) if not any(h.row(i))]
    return IntMatrix(rows, cols=m.rows)


def solve_left(m, b: Sequence[int]) -> tuple[int, ...] | None:
    """Some integer ``x`` with ``x @ m = b``, or ``None``."""
    m = as_matrix(m)
    if len(b) != m.cols:
        raise ValueError("right-hand side has the wrong length")
    if m.rows == 0:
        return () if not any(b) else None
    u, s, v = snf(m)
    c = v.vecmul(b)
    y = [0] * m.rows
    for i, ci in enumerate(c):
        d = s[i, i] if i < s.rows else 0
        if d == 0:
            if ci:
                return None
        else:
            if ci % d:
                return None
            y[i] = ci // d
    return u.vecmul(y)


def inverse_unimodular(m) -> IntMatrix:
    m = as_matrix(m)
    h, u = hnf_with_transform(m)
    if h != IntMatrix.identity(m.rows):
        raise ValueError("matrix is not unimodular")
    return u


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)
