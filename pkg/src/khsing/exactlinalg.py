"""Exact sparse linear algebra over Z, Q, and Z/p.

Everything downstream (cube complexes, mapping cones, homology) reduces to
three primitives implemented here: exact rank computation, Smith normal form
over the integers, and the kernel/image bookkeeping that turns a pair of
composable differentials into a homology group.

All arithmetic is exact: Python ints for Z and Z/p, ``fractions.Fraction``
for Q.  No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import ContractViolation

# Size (rows * cols) below which Smith reduction runs on dense lists; sparse
# index maintenance costs more than it saves on tiny blocks.
_DENSE_LIMIT = 64 * 64


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: Z, Q, or the prime field Z/p."""

    kind: str  # "Z", "Q", or "Fp"
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise ContractViolation(f"unknown ring kind {self.kind!r}")
        if self.kind == "Fp":
            if self.p is None or not _is_prime(self.p):
                raise ContractViolation(f"modulus {self.p!r} is not prime")
        elif self.p is not None:
            raise ContractViolation("modulus only makes sense for Fp")

    @staticmethod
    def integers() -> "Ring":
        return Ring("Z")

    @staticmethod
    def rationals() -> "Ring":
        return Ring("Q")

    @staticmethod
    def prime_field(p: int) -> "Ring":
        return Ring("Fp", p)

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    def coerce(self, v):
        if self.kind == "Z":
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise ContractViolation(f"{v} is not an integer")
                return int(v)
            return int(v)
        if self.kind == "Q":
            return Fraction(v)
        return int(v) % self.p

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def add(self, a, b):
        return (a + b) % self.p if self.kind == "Fp" else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.kind == "Fp" else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.kind == "Fp" else a * b

    def neg(self, a):
        return (-a) % self.p if self.kind == "Fp" else -a

    def inv(self, a):
        if self.kind == "Q":
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return Fraction(1) / a
        if self.kind == "Fp":
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(a, self.p - 2, self.p)
        raise ContractViolation("Z is not a field")

    def __str__(self):
        return {"Z": "Z", "Q": "Q"}.get(self.kind, f"F{self.p}")


ZZ = Ring.integers()
QQ = Ring.rationals()


class SparseMatrix:
    """Immutable sparse exact matrix with (row, col) -> value storage.

    Zero entries are never stored; indices are 0-based.
    """

    __slots__ = ("rows", "cols", "ring", "data")

    def __init__(self, rows: int, cols: int, ring: Ring, data=None):
        if rows < 0 or cols < 0:
            raise ContractViolation("negative matrix dimension")
        cleaned = {}
        for (r, c), v in (data or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise ContractViolation(f"entry ({r},{c}) outside {rows}x{cols}")
            v = ring.coerce(v)
            if v != 0:
                cleaned[(r, c)] = v
        self.rows = rows
        self.cols = cols
        self.ring = ring
        self.data = cleaned

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int, ring: Ring) -> "SparseMatrix":
        return cls(rows, cols, ring)

    @classmethod
    def identity(cls, n: int, ring: Ring) -> "SparseMatrix":
        return cls(n, n, ring, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_rows(cls, rows_list, ring: Ring) -> "SparseMatrix":
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        data = {}
        for r, row in enumerate(rows_list):
            if len(row) != cols:
                raise ContractViolation("ragged row lengths")
            for c, v in enumerate(row):
                if v:
                    data[(r, c)] = v
        return cls(rows, cols, ring, data)

    # -- basic access ------------------------------------------------------

    def entry(self, r: int, c: int):
        return self.data.get((r, c), self.ring.zero())

    def to_rows(self):
        out = [[self.ring.zero()] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.data.items():
            out[r][c] = v
        return out

    def nnz(self) -> int:
        return len(self.data)

    def is_zero(self) -> bool:
        return not self.data

    def columns(self):
        """Group entries by column: {c: [(r, v), ...]}."""
        cols = {}
        for (r, c), v in self.data.items():
            cols.setdefault(c, []).append((r, v))
        return cols

    # -- algebra -----------------------------------------------------------

    def _check_ring(self, other: "SparseMatrix"):
        if self.ring != other.ring:
            raise ContractViolation(f"ring mismatch: {self.ring} vs {other.ring}")

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.ring, self.data) == (
            other.rows, other.cols, other.ring, other.data)

    def __hash__(self):
        raise TypeError("SparseMatrix is not hashable")

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_ring(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ContractViolation("shape mismatch in addition")
        data = dict(self.data)
        ring = self.ring
        for k, v in other.data.items():
            s = ring.add(data.get(k, ring.zero()), v)
            if s == 0:
                data.pop(k, None)
            else:
                data[k] = s
        return SparseMatrix(self.rows, self.cols, ring, data)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def __neg__(self) -> "SparseMatrix":
        ring = self.ring
        return SparseMatrix(self.rows, self.cols, ring,
                            {k: ring.neg(v) for k, v in self.data.items()})

    def scale(self, a) -> "SparseMatrix":
        ring = self.ring
        a = ring.coerce(a)
        return SparseMatrix(self.rows, self.cols, ring,
                            {k: ring.mul(a, v) for k, v in self.data.items()})

    def __mul__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_ring(other)
        if self.cols != other.rows:
            raise ContractViolation(
                f"shape mismatch in product: {self.rows}x{self.cols} * "
                f"{other.rows}x{other.cols}")
        ring = self.ring
        left_cols = self.columns()
        acc = {}
        for (k, j), v in other.data.items():
            for i, w in left_cols.get(k, ()):
                key = (i, j)
                s = ring.add(acc.get(key, ring.zero()), ring.mul(w, v))
                if s == 0:
                    acc.pop(key, None)
                else:
                    acc[key] = s
        return SparseMatrix(self.rows, other.cols, ring, acc)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, self.ring,
                            {(c, r): v for (r, c), v in self.data.items()})

    def submatrix(self, row_idx, col_idx) -> "SparseMatrix":
        rmap = {r: i for i, r in enumerate(row_idx)}
        cmap = {c: j for j, c in enumerate(col_idx)}
        data = {}
        for (r, c), v in self.data.items():
            if r in rmap and c in cmap:
                data[(rmap[r], cmap[c])] = v
        return SparseMatrix(len(row_idx), len(col_idx), self.ring, data)

    @classmethod
    def block(cls, grid, row_sizes, col_sizes, ring: Ring) -> "SparseMatrix":
        """Assemble a block matrix; ``grid[i][j]`` may be None for zero."""
        roff = [0]
        for s in row_sizes:
            roff.append(roff[-1] + s)
        coff = [0]
        for s in col_sizes:
            coff.append(coff[-1] + s)
        data = {}
        for i, row in enumerate(grid):
            for j, blk in enumerate(row):
                if blk is None:
                    continue
                if (blk.rows, blk.cols) != (row_sizes[i], col_sizes[j]):
                    raise ContractViolation("block shape mismatch")
                for (r, c), v in blk.data.items():
                    data[(roff[i] + r, coff[j] + c)] = v
        return cls(roff[-1], coff[-1], ring, data)

    def change_ring(self, ring: Ring) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, ring,
                            {k: ring.coerce(v) for k, v in self.data.items()})

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols} over {self.ring}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """Divisor chain d1 | d2 | ... | dr with optional unimodular transforms.

    When transforms are requested, ``left * m * right`` equals the
    diag(d1, ..., dr) rectangular matrix of the input's shape.
    """

    diagonal: tuple[int, ...]
    rows: int
    cols: int
    left: SparseMatrix | None = None
    right: SparseMatrix | None = None

    @property
    def rank(self) -> int:
        return len(self.diagonal)

    def diagonal_matrix(self) -> SparseMatrix:
        return SparseMatrix(self.rows, self.cols, ZZ,
                            {(i, i): d for i, d in enumerate(self.diagonal)})


class _DenseSmith:
    """Textbook Smith reduction on dense integer lists."""

    def __init__(self, rows_list, nrows, ncols, transforms):
        self.m = [row[:] for row in rows_list]
        self.nrows = nrows
        self.ncols = ncols
        self.track = transforms
        self.left = [[int(i == j) for j in range(nrows)] for i in range(nrows)] if transforms else None
        self.right = [[int(i == j) for j in range(ncols)] for i in range(ncols)] if transforms else None

    def row_op(self, i, j, q):
        # row_i += q * row_j
        mi, mj = self.m[i], self.m[j]
        for c in range(self.ncols):
            if mj[c]:
                mi[c] += q * mj[c]
        if self.track:
            li, lj = self.left[i], self.left[j]
            for c in range(self.nrows):
                if lj[c]:
                    li[c] += q * lj[c]

    def col_op(self, i, j, q):
        # col_i += q * col_j
        for row in self.m:
            if row[j]:
                row[i] += q * row[j]
        if self.track:
            for row in self.right:
                if row[j]:
                    row[i] += q * row[j]

    def swap_rows(self, i, j):
        self.m[i], self.m[j] = self.m[j], self.m[i]
        if self.track:
            self.left[i], self.left[j] = self.left[j], self.left[i]

    def swap_cols(self, i, j):
        for row in self.m:
            row[i], row[j] = row[j], row[i]
        if self.track:
            for row in self.right:
                row[i], row[j] = row[j], row[i]

    def negate_row(self, i):
        self.m[i] = [-v for v in self.m[i]]
        if self.track:
            self.left[i] = [-v for v in self.left[i]]

    def reduce(self):
        m, nrows, ncols = self.m, self.nrows, self.ncols
        k = 0  # next diagonal slot
        while True:
            # pick pivot among active block [k:, k:]: min |v|, then sparsity
            best = None
            for r in range(k, nrows):
                row = m[r]
                for c in range(k, ncols):
                    v = row[c]
                    if v:
                        nz = (sum(1 for x in row[k:] if x)
                              + sum(1 for rr in range(k, nrows) if m[rr][c]))
                        key = (abs(v), nz, r, c)
                        if best is None or key < best[0]:
                            best = (key, r, c)
            if best is None:
                break
            _, pr, pc = best
            if pr != k:
                self.swap_rows(k, pr)
            if pc != k:
                self.swap_cols(k, pc)
            while True:
                if m[k][k] < 0:
                    self.negate_row(k)
                pivot = m[k][k]
                moved = False
                for r in range(k + 1, nrows):
                    v = m[r][k]
                    if v:
                        q, rem = divmod(v, pivot)
                        self.row_op(r, k, -q)
                        if rem:
                            self.swap_rows(k, r)
                            moved = True
                            break
                if moved:
                    continue
                for c in range(k + 1, ncols):
                    v = m[k][c]
                    if v:
                        q, rem = divmod(v, pivot)
                        self.col_op(c, k, -q)
                        if rem:
                            self.swap_cols(k, c)
                            moved = True
                            break
                if not moved:
                    break
            k += 1
        self._fix_divisibility(k)
        diag = tuple(m[i][i] for i in range(k))
        return diag

    def _fix_divisibility(self, k):
        # pairwise (a, b) -> (gcd, lcm) passes until the chain divides
        changed = True
        while changed:
            changed = False
            for i in range(k):
                if self.m[i][i] < 0:
                    self.negate_row(i)
            for i in range(k):
                for j in range(i + 1, k):
                    a, b = self.m[i][i], self.m[j][j]
                    if b % a == 0:
                        continue
                    changed = True
                    # col_i += col_j, then clear with exact Euclid steps
                    self.col_op(i, j, 1)
                    while True:
                        if self.m[i][i] < 0:
                            self.negate_row(i)
                        p = self.m[i][i]
                        v = self.m[j][i]
                        if v == 0:
                            break
                        q, rem = divmod(v, p)
                        self.row_op(j, i, -q)
                        if self.m[j][i]:
                            self.swap_rows(i, j)
                    # row i now (g, c_ij'); clear the off-diagonal entry
                    p = self.m[i][i]
                    v = self.m[i][j]
                    if v:
                        self.col_op(j, i, -(v // p))
                    if self.m[i][j]:
                        raise AssertionError("divisibility fix failed")
                    if self.m[j][j] < 0:
                        self.negate_row(j)


def _snf_dense(m: SparseMatrix, transforms: bool) -> SmithDecomposition:
    eng = _DenseSmith(m.to_rows(), m.rows, m.cols, transforms)
    diag = eng.reduce()
    left = right = None
    if transforms:
        left = SparseMatrix.from_rows(eng.left, ZZ) if m.rows else SparseMatrix.zero(0, 0, ZZ)
        right = SparseMatrix.from_rows(eng.right, ZZ) if m.cols else SparseMatrix.zero(0, 0, ZZ)
    return SmithDecomposition(diag, m.rows, m.cols, left, right)


def _divisor_chain(values):
    """Smith divisors of a diagonal matrix with the given nonzero entries:
    repeated pairwise (gcd, lcm) replacement, then sorted."""
    vals = sorted(abs(v) for v in values)
    changed = True
    while changed:
        changed = False
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a:
                    g = gcd(a, b)
                    vals[i], vals[j] = g, a * b // g
                    changed = True
        if changed:
            vals.sort()
    return tuple(vals)


class _SparseSmith:
    """Smith reduction on dict-of-dicts rows with column index tracking.

    Pivot choice: smallest absolute value, ties broken by fewest nonzeros in
    the pivot row plus column, then by position.  This keeps intermediate
    entries small on cube differentials, which are mostly unit entries.
    With transforms off, finished pivots leave the active structures and the
    divisor chain is recovered arithmetically from the diagonal values.
    """

    def __init__(self, entries, nrows, ncols, transforms):
        self.rows = {}
        self.colidx = {}
        for (r, c), v in entries.items():
            self.rows.setdefault(r, {})[c] = v
            self.colidx.setdefault(c, set()).add(r)
        self.track = transforms
        self.nrows = nrows
        self.ncols = ncols
        self.left = {i: {i: 1} for i in range(nrows)} if transforms else None
        # right transform tracked column-wise: right[c] = {r: v} column vector
        self.right = {i: {i: 1} for i in range(ncols)} if transforms else None
        self.done_rows = set()
        self.done_cols = set()
        self.finished = []

    def _row_nnz(self, r):
        return len(self.rows.get(r, ()))

    def _col_nnz(self, c):
        return len(self.colidx.get(c, ()))

    def _retire(self, pr, pc, value):
        """Drop a finished pivot from the active structures (untracked runs
        only); the divisor chain is recovered arithmetically at the end."""
        self.finished.append(value)
        self.rows.pop(pr, None)
        self.colidx.pop(pc, None)

    def _set(self, r, c, v):
        row = self.rows.setdefault(r, {})
        if v:
            row[c] = v
            self.colidx.setdefault(c, set()).add(r)
        else:
            if c in row:
                del row[c]
                self.colidx[c].discard(r)

    def row_op(self, i, j, q):
        # row_i += q * row_j
        for c, v in list(self.rows.get(j, {}).items()):
            cur = self.rows.get(i, {}).get(c, 0) + q * v
            self._set(i, c, cur)
        if self.track:
            li = self.left.setdefault(i, {})
            for c, v in self.left.get(j, {}).items():
                s = li.get(c, 0) + q * v
                if s:
                    li[c] = s
                else:
                    li.pop(c, None)

    def col_op(self, i, j, q):
        # col_i += q * col_j
        for r in list(self.colidx.get(j, ())):
            v = self.rows[r][j]
            cur = self.rows.get(r, {}).get(i, 0) + q * v
            self._set(r, i, cur)
        if self.track:
            ri = self.right.setdefault(i, {})
            for r, v in self.right.get(j, {}).items():
                s = ri.get(r, 0) + q * v
                if s:
                    ri[r] = s
                else:
                    ri.pop(r, None)

    def swap_rows(self, i, j):
        if i == j:
            return
        ri = self.rows.pop(i, {})
        rj = self.rows.pop(j, {})
        for c in ri:
            self.colidx[c].discard(i)
        for c in rj:
            self.colidx[c].discard(j)
        if rj:
            self.rows[i] = rj
            for c in rj:
                self.colidx[c].add(i)
        if ri:
            self.rows[j] = ri
            for c in ri:
                self.colidx[c].add(j)
        if self.track:
            self.left[i], self.left[j] = self.left.get(j, {}), self.left.get(i, {})

    def swap_cols(self, i, j):
        if i == j:
            return
        rows_i = self.colidx.get(i, set()).copy()
        rows_j = self.colidx.get(j, set()).copy()
        vals_i = {r: self.rows[r][i] for r in rows_i}
        vals_j = {r: self.rows[r][j] for r in rows_j}
        for r in rows_i:
            self._set(r, i, 0)
        for r in rows_j:
            self._set(r, j, 0)
        for r, v in vals_j.items():
            self._set(r, i, v)
        for r, v in vals_i.items():
            self._set(r, j, v)
        if self.track:
            self.right[i], self.right[j] = self.right.get(j, {}), self.right.get(i, {})

    def negate_row(self, i):
        for c in self.rows.get(i, {}):
            self.rows[i][c] = -self.rows[i][c]
        if self.track:
            self.left[i] = {c: -v for c, v in self.left.get(i, {}).items()}

    def _pick_pivot(self):
        # smallest absolute value, then lightest row+column; a unit entry in
        # a singleton row and column cannot be beaten, so exit early on one
        best = None
        best_abs = None
        best_fill = None
        for r, row in self.rows.items():
            if not row or (self.track and r in self.done_rows):
                continue
            rn = len(row)
            for c, v in row.items():
                if self.track and c in self.done_cols:
                    continue
                a = -v if v < 0 else v
                if best_abs is not None and a > best_abs:
                    continue
                fill = rn + len(self.colidx.get(c, ()))
                key = (a, fill, r, c)
                if best is None or key < (best_abs, best_fill) + best:
                    best = (r, c)
                    best_abs, best_fill = a, fill
                    if a == 1 and fill <= 2:
                        return best
        return best

    def reduce(self):
        slots = []
        while True:
            picked = self._pick_pivot()
            if picked is None:
                break
            pr, pc = picked
            while True:
                if self.rows.get(pr, {}).get(pc, 0) < 0:
                    self.negate_row(pr)
                pivot = self.rows[pr][pc]
                moved = False
                for r in sorted(self.colidx.get(pc, ())):
                    if r == pr or r in self.done_rows:
                        continue
                    v = self.rows[r][pc]
                    q, rem = divmod(v, pivot)
                    if q:
                        self.row_op(r, pr, -q)
                    if rem:
                        pr = r
                        moved = True
                        break
                if moved:
                    continue
                for c in sorted(self.rows.get(pr, {}).keys()):
                    if c == pc or c in self.done_cols:
                        continue
                    v = self.rows[pr][c]
                    q, rem = divmod(v, pivot)
                    if q:
                        self.col_op(c, pc, -q)
                    if rem:
                        pc = c
                        moved = True
                        break
                if not moved:
                    break
            if self.track:
                self.done_rows.add(pr)
                self.done_cols.add(pc)
                slots.append((pr, pc))
            else:
                self._retire(pr, pc, self.rows[pr][pc])
        if not self.track:
            return _divisor_chain(self.finished)
        self._fix_divisibility(slots)
        # normalize: move pivots onto leading diagonal in divisor order
        diag = []
        for k, (pr, pc) in enumerate(sorted(slots, key=lambda s: self.rows[s[0]][s[1]])):
            diag.append((pr, pc))
        for k, (pr, pc) in enumerate(diag):
            self.done_rows.discard(pr)
            self.done_cols.discard(pc)
            self.swap_rows(k, pr)
            self.swap_cols(k, pc)
            # keep later slot records in sync with the swap
            for idx in range(k + 1, len(diag)):
                qr, qc = diag[idx]
                if qr == k:
                    qr = pr
                elif qr == pr:
                    qr = k
                if qc == k:
                    qc = pc
                elif qc == pc:
                    qc = k
                diag[idx] = (qr, qc)
        return tuple(self.rows[i][i] for i in range(len(diag)))

    def _fix_divisibility(self, slots):
        # each 2x2 fix replaces (a, b) with (gcd, lcm); the sorted value
        # multiset strictly decreases lexicographically, so this terminates
        while True:
            for (r, c) in slots:
                if self.rows[r][c] < 0:
                    self.negate_row(r)
            order = sorted(slots, key=lambda rc: self.rows[rc[0]][rc[1]])
            offender = None
            for ii in range(len(order)):
                for jj in range(ii + 1, len(order)):
                    a = self.rows[order[ii][0]][order[ii][1]]
                    b = self.rows[order[jj][0]][order[jj][1]]
                    if b % a:
                        offender = (order[ii], order[jj])
                        break
                if offender:
                    break
            if offender is None:
                return
            (ra, ca), (rb, cb) = offender
            self.col_op(ca, cb, 1)
            while True:
                if self.rows.get(ra, {}).get(ca, 0) < 0:
                    self.negate_row(ra)
                p = self.rows[ra][ca]
                v = self.rows.get(rb, {}).get(ca, 0)
                if v == 0:
                    break
                q, rem = divmod(v, p)
                if q:
                    self.row_op(rb, ra, -q)
                if self.rows.get(rb, {}).get(ca, 0):
                    self.swap_rows(ra, rb)
            p = self.rows[ra][ca]
            v = self.rows.get(ra, {}).get(cb, 0)
            if v:
                self.col_op(cb, ca, -(v // p))
            if self.rows.get(ra, {}).get(cb, 0):
                raise AssertionError("divisibility fix failed")


def smith_normal_form(m: SparseMatrix, transforms: bool = False) -> SmithDecomposition:
    """Smith normal form of an integer matrix.

    Returns the divisor chain d1 | d2 | ... | dr (all positive) and, when
    ``transforms`` is set, unimodular L and R with ``L * m * R`` equal to the
    rectangular diagonal matrix of the divisors.
    """
    if m.ring.kind != "Z":
        raise ContractViolation("Smith normal form requires integer entries")
    if m.rows * m.cols <= _DENSE_LIMIT:
        return _snf_dense(m, transforms)
    eng = _SparseSmith(m.data, m.rows, m.cols, transforms)
    diag = eng.reduce()
    left = right = None
    if transforms:
        ldata = {(r, c): v for r, row in eng.left.items() for c, v in row.items()}
        left = SparseMatrix(m.rows, m.rows, ZZ, ldata)
        rdata = {(r, c): v for c, col in eng.right.items() for r, v in col.items()}
        right = SparseMatrix(m.cols, m.cols, ZZ, rdata)
    return SmithDecomposition(diag, m.rows, m.cols, left, right)


# ---------------------------------------------------------------------------
# Rank and kernels
# ---------------------------------------------------------------------------


def _rank_mod_p(m: SparseMatrix, p: int) -> int:
    rows = {}
    for (r, c), v in m.data.items():
        v %= p
        if v:
            rows.setdefault(r, {})[c] = v
    rank = 0
    while rows:
        r0, row0 = min(rows.items(), key=lambda kv: (len(kv[1]), kv[0]))
        del rows[r0]
        if not row0:
            continue
        rank += 1
        c0 = min(row0)
        inv = pow(row0[c0], p - 2, p)
        row0 = {c: (v * inv) % p for c, v in row0.items()}
        for r, row in list(rows.items()):
            f = row.get(c0)
            if not f:
                continue
            for c, v in row0.items():
                s = (row.get(c, 0) - f * v) % p
                if s:
                    row[c] = s
                else:
                    row.pop(c, None)
            if not row:
                del rows[r]
    return rank


def _integerized(m: SparseMatrix) -> dict:
    """Clear denominators column by column; rank is unchanged."""
    cols = {}
    for (r, c), v in m.data.items():
        cols.setdefault(c, []).append((r, v))
    out = {}
    for c, entries in cols.items():
        mult = 1
        for _, v in entries:
            mult = mult * v.denominator // gcd(mult, v.denominator)
        for r, v in entries:
            out[(r, c)] = int(v * mult)
    return out


def _rank_int(entries: dict, nrows: int, ncols: int) -> int:
    """Rank over Q of an integer matrix via gcd-pivoted elimination."""
    if not entries:
        return 0
    if nrows * ncols <= _DENSE_LIMIT:
        rows_list = [[0] * ncols for _ in range(nrows)]
        for (r, c), v in entries.items():
            rows_list[r][c] = v
        eng = _DenseSmith(rows_list, nrows, ncols, False)
        return len(eng.reduce())
    eng = _SparseSmith(entries, nrows, ncols, False)
    return len(eng.reduce())


def rank(m: SparseMatrix) -> int:
    """Rank over the fraction field (Q for Z input) or over Z/p."""
    if m.ring.kind == "Fp":
        return _rank_mod_p(m, m.ring.p)
    if m.ring.kind == "Q":
        return _rank_int(_integerized(m), m.rows, m.cols)
    return _rank_int(m.data, m.rows, m.cols)


def kernel_basis(m: SparseMatrix) -> SparseMatrix:
    """Columns spanning the null space of a matrix over a field."""
    ring = m.ring
    if not ring.is_field:
        raise ContractViolation("kernel basis requires a field")
    nrows, ncols = m.rows, m.cols
    rows = [dict() for _ in range(nrows)]
    for (r, c), v in m.data.items():
        rows[r][c] = v
    pivots = {}  # col -> reduced row dict
    for row in rows:
        row = dict(row)
        while row:
            c = min(row)
            if c in pivots:
                f = row[c]
                for cc, vv in pivots[c].items():
                    s = ring.sub(row.get(cc, ring.zero()), ring.mul(f, vv))
                    if s == 0:
                        row.pop(cc, None)
                    else:
                        row[cc] = s
            else:
                inv = ring.inv(row[c])
                pivots[c] = {cc: ring.mul(inv, vv) for cc, vv in row.items()}
                break
    free_cols = [c for c in range(ncols) if c not in pivots]
    data = {}
    for j, c in enumerate(free_cols):
        data[(c, j)] = ring.one()
        # back-substitute: pivot rows are echelon but not fully reduced,
        # so solve from the largest pivot column downwards.
        for pc in sorted(pivots, reverse=True):
            if pc >= c:
                continue
            prow = pivots[pc]
            acc = ring.zero()
            for cc, vv in prow.items():
                if cc == pc:
                    continue
                x = data.get((cc, j))
                if x is not None:
                    acc = ring.add(acc, ring.mul(vv, x))
            if acc != 0:
                data[(pc, j)] = ring.neg(acc)
    return SparseMatrix(ncols, len(free_cols), ring, data)


# ---------------------------------------------------------------------------
# Homology
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomologySummary:
    """Per-degree free rank and torsion, the canonical invariant report.

    Keys are integers (homological degree) or (i, j) pairs when a quantum
    grading is available.  Only nonzero groups are stored.
    """

    ring: Ring
    groups: tuple  # sorted tuple of (key, free_rank, torsion_tuple)

    @classmethod
    def build(cls, ring: Ring, entries: dict) -> "HomologySummary":
        rows = []
        for key, (free, torsion) in entries.items():
            torsion = tuple(sorted(int(t) for t in torsion))
            if any(t <= 1 for t in torsion):
                raise ContractViolation("torsion coefficients must exceed 1")
            if ring.is_field and torsion:
                raise ContractViolation("field homology cannot carry torsion")
            if free or torsion:
                rows.append(((key,) if isinstance(key, int) else tuple(key),
                             int(free), torsion))
        rows.sort(key=lambda e: e[0])
        return cls(ring, tuple(rows))

    def group(self, key):
        key = (key,) if isinstance(key, int) else tuple(key)
        for k, free, torsion in self.groups:
            if k == key:
                return free, torsion
        return 0, ()

    def keys(self):
        return [k if len(k) > 1 else k[0] for k, _, _ in self.groups]

    def free_rank(self, key) -> int:
        return self.group(key)[0]

    def total_dimension(self) -> int:
        """Total free rank (dimension over a field)."""
        return sum(free for _, free, _ in self.groups)

    def ungraded(self) -> "HomologySummary":
        """Collapse (i, j) keys onto the homological degree i."""
        acc = {}
        for k, free, torsion in self.groups:
            i = k[0]
            f0, t0 = acc.get(i, (0, ()))
            acc[i] = (f0 + free, tuple(sorted(t0 + torsion)))
        return HomologySummary.build(self.ring, acc)

    def to_json_dict(self) -> dict:
        out = []
        for k, free, torsion in self.groups:
            entry = {"i": k[0], "free": free, "torsion": list(torsion)}
            if len(k) > 1:
                entry["j"] = k[1]
            out.append(entry)
        return {"ring": str(self.ring), "groups": out}

    @classmethod
    def from_json_dict(cls, payload: dict) -> "HomologySummary":
        name = payload["ring"]
        if name == "Z":
            ring = ZZ
        elif name == "Q":
            ring = QQ
        else:
            ring = Ring.prime_field(int(name[1:]))
        entries = {}
        for g in payload["groups"]:
            key = (g["i"], g["j"]) if "j" in g else g["i"]
            entries[key] = (g["free"], tuple(g["torsion"]))
        return cls.build(ring, entries)

    def format_table(self) -> str:
        if not self.groups:
            return "(zero)"
        lines = []
        for k, free, torsion in self.groups:
            where = f"i={k[0]}" + (f", j={k[1]}" if len(k) > 1 else "")
            parts = []
            if free:
                parts.append(f"{self.ring}^{free}")
            parts.extend(f"Z/{t}" for t in torsion)
            lines.append(f"{where}: " + " + ".join(parts))
        return "\n".join(lines)


def homology_at(d_in: SparseMatrix, d_out: SparseMatrix, ring: Ring):
    """Homology at the middle of ``. -> C -> .`` given both differentials.

    ``d_in`` maps into the middle module, ``d_out`` maps out of it.  Returns
    ``(free_rank, torsion)``; torsion is empty over a field.
    """
    if d_in.rows != d_out.cols:
        raise ContractViolation(
            f"differentials not composable: d_in lands in dim {d_in.rows}, "
            f"d_out expects dim {d_out.cols}")
    if not (d_out * d_in).is_zero():
        raise ContractViolation("d_out * d_in is nonzero; not a complex")
    n = d_out.cols
    if ring.kind == "Fp":
        din = d_in.change_ring(ring)
        dout = d_out.change_ring(ring)
        free = n - _rank_mod_p(dout, ring.p) - _rank_mod_p(din, ring.p)
        return free, ()
    if ring.kind == "Q":
        free = n - rank(d_out) - rank(d_in)
        return free, ()
    snf = smith_normal_form(d_in.change_ring(ZZ))
    free = n - rank(d_out) - snf.rank
    torsion = tuple(d for d in snf.diagonal if d > 1)
    return free, torsion
