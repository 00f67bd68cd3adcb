"""Integer matrix algebra: Smith normal form, solving, kernels, lattices.

Entries are Python ints (arbitrary precision, so SNF pivot growth cannot
overflow). Shapes are tracked explicitly so zero-row and zero-column
matrices behave; those occur constantly as (co)chain groups of small cell
complexes.
"""

from __future__ import annotations

from dataclasses import dataclass


class IMat:
    """Dense integer matrix with explicit shape.

    ``snf()`` caches its result on the instance; do not mutate a matrix
    after factoring it (internal callers build matrices, then consume them).
    """

    __slots__ = ("rows", "cols", "data", "_snf")

    def __init__(self, rows: int, cols: int, data=None):
        self.rows = rows
        self.cols = cols
        self._snf = None
        if data is None:
            self.data = [[0] * cols for _ in range(rows)]
        else:
            self.data = [list(r) for r in data]
            if len(self.data) != rows or any(len(r) != cols for r in self.data):
                raise ValueError("data does not match shape")

    def snf(self) -> "SNF":
        if self._snf is None:
            self._snf = smith_normal_form(self)
        return self._snf

    @staticmethod
    def from_rows(data) -> "IMat":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return IMat(rows, cols, data)

    @staticmethod
    def identity(n: int) -> "IMat":
        m = IMat(n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @staticmethod
    def zeros(rows: int, cols: int) -> "IMat":
        return IMat(rows, cols)

    @staticmethod
    def column(vec) -> "IMat":
        return IMat(len(vec), 1, [[x] for x in vec])

    @staticmethod
    def from_columns(cols_list, rows: int) -> "IMat":
        m = IMat(rows, len(cols_list))
        for j, col in enumerate(cols_list):
            if len(col) != rows:
                raise ValueError("column length mismatch")
            for i in range(rows):
                m.data[i][j] = col[i]
        return m

    def copy(self) -> "IMat":
        return IMat(self.rows, self.cols, self.data)

    def __getitem__(self, ij):
        return self.data[ij[0]][ij[1]]

    def __setitem__(self, ij, v):
        self.data[ij[0]][ij[1]] = v

    def __eq__(self, other):
        return (isinstance(other, IMat) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __repr__(self):
        return f"IMat({self.rows}x{self.cols}, {self.data})"

    def col(self, j: int) -> list[int]:
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    def transpose(self) -> "IMat":
        t = IMat(self.cols, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                t.data[j][i] = self.data[i][j]
        return t

    def __matmul__(self, other: "IMat") -> "IMat":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = IMat(self.rows, other.cols)
        for i in range(self.rows):
            arow = self.data[i]
            orow = out.data[i]
            for k in range(self.cols):
                v = arow[k]
                if v:
                    brow = other.data[k]
                    for j in range(other.cols):
                        orow[j] += v * brow[j]
        return out

    def mul_vec(self, v) -> list[int]:
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        return [sum(self.data[i][j] * v[j] for j in range(self.cols) if v[j])
                for i in range(self.rows)]

    def hstack(self, other: "IMat") -> "IMat":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return IMat(self.rows, self.cols + other.cols,
                    [self.data[i] + other.data[i] for i in range(self.rows)])

    def is_zero(self) -> bool:
        return all(all(x == 0 for x in row) for row in self.data)

    def neg(self) -> "IMat":
        return IMat(self.rows, self.cols, [[-x for x in row] for row in self.data])

    def add(self, other: "IMat") -> "IMat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IMat(self.rows, self.cols,
                    [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])


@dataclass
class SNF:
    """U @ M @ V == D with U, V unimodular, D diagonal in divisibility order.

    ``uinv`` and ``vinv`` are maintained alongside so bases can be read in
    both directions without re-inversion.
    """

    u: IMat
    d: IMat
    v: IMat
    uinv: IMat
    vinv: IMat
    rank: int

    def diagonal(self) -> list[int]:
        return [self.d[i, i] for i in range(min(self.d.rows, self.d.cols))]


def smith_normal_form(m: IMat) -> SNF:
    rows, cols = m.rows, m.cols
    d = m.copy()
    u, uinv = IMat.identity(rows), IMat.identity(rows)
    v, vinv = IMat.identity(cols), IMat.identity(cols)

    def swap_rows(i, j):
        d.data[i], d.data[j] = d.data[j], d.data[i]
        u.data[i], u.data[j] = u.data[j], u.data[i]
        for row in uinv.data:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in d.data:
            row[i], row[j] = row[j], row[i]
        for row in v.data:
            row[i], row[j] = row[j], row[i]
        vinv.data[i], vinv.data[j] = vinv.data[j], vinv.data[i]

    def add_row(src, dst, k):
        # row_dst += k * row_src;  U <- E U, Uinv <- Uinv E^-1
        drow_s, drow_d = d.data[src], d.data[dst]
        for j in range(cols):
            drow_d[j] += k * drow_s[j]
        urow_s, urow_d = u.data[src], u.data[dst]
        for j in range(rows):
            urow_d[j] += k * urow_s[j]
        for r in range(rows):
            uinv.data[r][src] -= k * uinv.data[r][dst]

    def add_col(src, dst, k):
        for i in range(rows):
            d.data[i][dst] += k * d.data[i][src]
        for i in range(cols):
            v.data[i][dst] += k * v.data[i][src]
        vrow_s, vrow_d = vinv.data[src], vinv.data[dst]
        for j in range(cols):
            vrow_s[j] -= k * vrow_d[j]

    def negate_row(i):
        d.data[i] = [-x for x in d.data[i]]
        u.data[i] = [-x for x in u.data[i]]
        for r in range(rows):
            uinv.data[r][i] = -uinv.data[r][i]

    limit = min(rows, cols)

    def diagonalize():
        for t in range(limit):
            # smallest nonzero entry of the remaining block becomes the pivot
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    val = abs(d.data[i][j])
                    if val and (best is None or val < best[0]):
                        best = (val, i, j)
            if best is None:
                return
            _, bi, bj = best
            if bi != t:
                swap_rows(t, bi)
            if bj != t:
                swap_cols(t, bj)
            while True:
                for i in range(t + 1, rows):
                    if d.data[i][t]:
                        add_row(t, i, -(d.data[i][t] // d.data[t][t]))
                        if d.data[i][t]:      # remainder smaller than pivot
                            swap_rows(t, i)
                for j in range(t + 1, cols):
                    if d.data[t][j]:
                        add_col(t, j, -(d.data[t][j] // d.data[t][t]))
                        if d.data[t][j]:
                            swap_cols(t, j)
                if all(d.data[i][t] == 0 for i in range(t + 1, rows)) and \
                   all(d.data[t][j] == 0 for j in range(t + 1, cols)):
                    break
            if d.data[t][t] < 0:
                negate_row(t)

    diagonalize()
    # enforce the divisibility chain: on a violation, mix the columns and
    # rediagonalize; each fix strictly shrinks the earlier diagonal entry.
    while True:
        rank = sum(1 for i in range(limit) if d.data[i][i] != 0)
        violation = None
        for i in range(rank - 1):
            if d.data[i + 1][i + 1] % d.data[i][i] != 0:
                violation = i
                break
        if violation is None:
            break
        add_col(violation + 1, violation, 1)
        diagonalize()

    return SNF(u, d, v, uinv, vinv, rank)


def solve(m: IMat, b: list[int]) -> list[int] | None:
    """An integer solution x of M x = b, or None if none exists.

    The factorization is cached on ``m``, so solving many right-hand sides
    against one matrix costs one SNF total.
    """
    if len(b) != m.rows:
        raise ValueError("shape mismatch")
    s = m.snf()
    ub = s.u.mul_vec(b)
    y = [0] * m.cols
    for i in range(m.rows):
        di = s.d[i, i] if i < min(m.rows, m.cols) else 0
        if di:
            if ub[i] % di != 0:
                return None
            y[i] = ub[i] // di
        elif ub[i] != 0:
            return None
    return s.v.mul_vec(y)


def kernel_basis(m: IMat) -> IMat:
    """Basis of ker(M) as columns; a pure sublattice of Z^cols."""
    s = m.snf()
    cols = [s.v.col(j) for j in range(s.rank, m.cols)]
    return IMat.from_columns(cols, m.cols)


def lattice_contains(gens: IMat, vec: list[int]) -> bool:
    """Is vec in the lattice spanned by the columns of gens?"""
    return solve(gens, vec) is not None


def lattice_subset(a: IMat, b: IMat) -> bool:
    """Column lattice of a contained in column lattice of b?"""
    return all(lattice_contains(b, a.col(j)) for j in range(a.cols))


def lattice_equal(a: IMat, b: IMat) -> bool:
    return lattice_subset(a, b) and lattice_subset(b, a)


def rank_q(m: IMat) -> int:
    """Rank over Q (equals the SNF rank)."""
    return m.snf().rank
